"""Localized virial functionals, their exact time derivatives, and residual checks.

Every ``rhs`` returns the time derivative d/dt of the functional (not its
negative) together with the individual integrals that make it up, so a
mismatch between a finite-difference derivative and the identity can be
traced to a single term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import ModelParams, TimeSeries
from .errors import CoercivityViolation, IncompatibleSpec, InvalidParameter, TooFewRecords
from .functionals import Curve, WeightProfile, _abs2
from .grid import Grid, integrate, spectral_derivative

KINDS = ("I_zak", "K_mass", "J_energy_zak", "I_kgz", "J_energy_kgz", "local_mass_zak", "local_energy_kgz")

_WEIGHTS = {
    "I_zak": ("tanh_lambda", "constant"),
    "I_kgz": ("tanh_lambda", "constant"),
    "K_mass": ("cutoff", "bump"),
    "J_energy_zak": ("cutoff", "bump"),
    "J_energy_kgz": ("cutoff", "bump"),
    "local_mass_zak": ("sech_plain",),
    "local_energy_kgz": ("sech_plain",),
}
_SYSTEMS = {
    "I_zak": ("zakharov",),
    "K_mass": ("zakharov", "nls"),
    "J_energy_zak": ("zakharov",),
    "I_kgz": ("kgz",),
    "J_energy_kgz": ("kgz",),
    "local_mass_zak": ("zakharov",),
    "local_energy_kgz": ("kgz",),
}
TIME_DEPENDENT = ("K_mass", "J_energy_zak", "J_energy_kgz")


@dataclass(frozen=True)
class VirialSpec:
    kind: str
    weight: WeightProfile
    curve: Optional[Curve] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise IncompatibleSpec(f"unknown virial kind {self.kind!r}")
        if self.weight.family not in _WEIGHTS[self.kind]:
            raise IncompatibleSpec(
                f"{self.kind} needs a weight from {_WEIGHTS[self.kind]}, got {self.weight.family}")
        if self.kind in TIME_DEPENDENT and self.curve is None:
            raise IncompatibleSpec(f"{self.kind} needs a curve")


@dataclass(frozen=True)
class VirialRHS:
    total: float
    terms: dict = field(default_factory=dict)


def _check(spec: VirialSpec, state) -> None:
    if state.system not in _SYSTEMS[spec.kind]:
        raise IncompatibleSpec(f"{spec.kind} cannot be evaluated on a {state.system} state")


def _dx(f, g):
    return spectral_derivative(f, g, 1)


def _moving(spec: VirialSpec, g: Grid, t: float):
    """phi(y), phi'(y), y with y = (x + mu(t)) / lambda(t)."""
    c = spec.curve
    lam, mu = c.lam(t), c.mu(t)
    y = (g.nodes + mu) / lam
    return spec.weight.phi(y), spec.weight.dphi(y), y, lam, c.dlam(t), c.dmu(t)


def _energy_density_zak(u, ux, n, v):
    return _abs2(ux) + 0.5 * v * v + 0.5 * n * n + n * _abs2(u) + _abs2(u)


def _energy_density_kgz(u, ux, ut, n, v, c):
    return c * c * _abs2(u) + _abs2(ux) + _abs2(ut) / (c * c) + 0.5 * (n * n + v * v) + n * _abs2(u)


def evaluate(spec: VirialSpec, state, g: Grid, prm: Optional[ModelParams] = None) -> float:
    """Value of the functional on ``state``."""
    _check(spec, state)
    alpha = prm.alpha if prm else 1.0
    c = prm.c if prm else 1.0
    k = spec.kind
    x = g.nodes
    w = spec.weight
    u = state.u
    if k == "I_zak":
        phi = w.phi(x)
        val = integrate(phi * (u * np.conj(_dx(u, g))).imag, g) - integrate(phi * state.v * state.n, g) / alpha
    elif k == "I_kgz":
        phi, dphi = w.phi(x), w.dphi(x)
        ux, ut = _dx(u, g), state.ut
        val = (2.0 * integrate(phi * (ux * np.conj(ut)).real, g) / (c * c)
               - integrate(phi * state.v * state.n, g) / alpha
               + integrate(dphi * (u * np.conj(ut)).real, g) / (c * c))
    elif k == "K_mass":
        phi = _moving(spec, g, state.t)[0]
        val = 0.5 * integrate(phi * _abs2(u), g)
    elif k == "J_energy_zak":
        phi = _moving(spec, g, state.t)[0]
        val = integrate(phi * _energy_density_zak(u, _dx(u, g), state.n, state.v), g)
    elif k == "J_energy_kgz":
        phi = _moving(spec, g, state.t)[0]
        val = 0.5 * integrate(phi * _energy_density_kgz(u, _dx(u, g), state.ut, state.n, state.v, c), g)
    elif k == "local_mass_zak":
        phi = w.phi(x)
        val = integrate(phi * (_abs2(u) + state.v ** 2 + state.n ** 2), g)
    else:  # local_energy_kgz
        phi = w.phi(x)
        dens = (c * c * _abs2(u) + _abs2(state.ut) / (c * c) + _abs2(_dx(u, g))
                + state.n ** 2 + state.v ** 2)
        val = 0.5 * integrate(phi * dens, g)
    return float(np.real(val))


def rhs(spec: VirialSpec, state, g: Grid, prm: Optional[ModelParams] = None) -> VirialRHS:
    """d/dt of the functional from the closed-form identity, itemized."""
    _check(spec, state)
    alpha = prm.alpha if prm else 1.0
    c = prm.c if prm else 1.0
    k = spec.kind
    x = g.nodes
    w = spec.weight
    u = state.u
    ux = _dx(u, g)
    I = lambda f: float(np.real(integrate(f, g)))  # noqa: E731
    terms: dict = {}
    if k in ("I_zak", "I_kgz"):
        dphi, d3phi = w.dphi(x), w.d3phi(x)
        terms["grad"] = -2.0 * I(dphi * _abs2(ux))
        terms["phi3"] = 0.5 * I(d3phi * _abs2(u))
        terms["coupling"] = -I(dphi * state.n * _abs2(u))
        terms["n2"] = -0.5 * I(dphi * state.n ** 2)
        terms["v2"] = -0.5 * I(dphi * state.v ** 2)
    elif k == "K_mass":
        _, dphi, y, lam, dlam, dmu = _moving(spec, g, state.t)
        dens = _abs2(u)
        terms["flux"] = I(dphi * (np.conj(u) * ux).imag) / lam
        terms["mu"] = dmu / (2.0 * lam) * I(dphi * dens)
        terms["lam"] = -dlam / (2.0 * lam) * I(dphi * y * dens)
    elif k == "J_energy_zak":
        _, dphi, y, lam, dlam, dmu = _moving(spec, g, state.t)
        n, v = state.n, state.v
        uxx = spectral_derivative(u, g, 2)
        e = _energy_density_zak(u, ux, n, v)
        ub = np.conj(u)
        terms["wave_flux"] = alpha * I(dphi * (n + _abs2(u)) * v) / lam
        terms["schrod_flux"] = 2.0 * I(dphi * (np.conj(ux) * uxx + n * ub * ux + ub * ux).imag) / lam
        terms["mu"] = dmu / lam * I(dphi * e)
        terms["lam"] = -dlam / lam * I(dphi * y * e)
    elif k == "J_energy_kgz":
        _, dphi, y, lam, dlam, dmu = _moving(spec, g, state.t)
        n, v, ut = state.n, state.v, state.ut
        e = _energy_density_kgz(u, ux, ut, n, v, c)
        terms["wave_flux"] = 0.5 * alpha * I(dphi * (n + _abs2(u)) * v) / lam
        terms["cross_flux"] = -I(dphi * (np.conj(ut) * ux).real) / lam
        terms["mu"] = dmu / (2.0 * lam) * I(dphi * e)
        terms["lam"] = -dlam / (2.0 * lam) * I(dphi * y * e)
    elif k == "local_mass_zak":
        phi, dphi = w.phi(x), w.dphi(x)
        n, v = state.n, state.v
        terms["mass_flux"] = 2.0 * I(dphi * (np.conj(u) * ux).imag)
        terms["wave_flux"] = 2.0 * alpha * I(dphi * n * v)
        terms["coupling"] = -4.0 * alpha * I(phi * v * (u * np.conj(ux)).real)
    else:  # local_energy_kgz
        phi, dphi = w.phi(x), w.dphi(x)
        n, v, ut = state.n, state.v, state.ut
        terms["cross"] = -I(dphi * (np.conj(ut) * ux).real)
        terms["potential"] = -I(phi * n * (u * np.conj(ut)).real)
        terms["wave_flux"] = alpha * I(dphi * n * v)
        terms["coupling"] = -2.0 * alpha * I(phi * v * (u * np.conj(ux)).real)
    return VirialRHS(float(sum(terms.values())), terms)


def rhs_as_printed(spec: VirialSpec, state, g: Grid) -> float:
    """Right-hand side with the published coefficients, for the two identities where
    they differ from the derivation (unit alpha and c).

    J_energy_zak: the mu/lambda terms carry |u|^2 with weight 1/2 instead of 1.
    local_energy_kgz: the last term enters with + instead of -.
    """
    r = rhs(spec, state, g)
    if spec.kind == "J_energy_zak":
        _, dphi, y, lam, dlam, dmu = _moving(spec, g, state.t)
        m = _abs2(state.u)
        fix = 0.5 * (dmu / lam * float(integrate(dphi * m, g)) - dlam / lam * float(integrate(dphi * y * m, g)))
        return r.total - fix
    if spec.kind == "local_energy_kgz":
        return r.total - 2.0 * r.terms["coupling"]
    raise InvalidParameter(f"no printed variant differs for {spec.kind}")


def observer(spec: VirialSpec, g: Grid, prm: Optional[ModelParams] = None, prefix: str = ""):
    """Observer recording the functional, its identity RHS and the itemized terms."""
    name = prefix or spec.kind

    def obs(state) -> dict:
        r = rhs(spec, state, g, prm)
        out = {name: evaluate(spec, state, g, prm), f"{name}_rhs": r.total}
        out.update({f"{name}_{key}": val for key, val in r.terms.items()})
        return out

    return obs


# ------------------------------------------------------------- residuals


@dataclass(frozen=True)
class Residual:
    t: np.ndarray
    residual: np.ndarray
    max_abs: float
    scale: float

    @property
    def relative(self) -> float:
        return self.max_abs / self.scale if self.scale > 0 else self.max_abs


def virial_residual(t, values, rhs_values, scale: Optional[float] = None) -> Residual:
    """Central-difference derivative of the recorded functional minus the identity RHS.

    ``scale`` defaults to max |rhs|; pass the sum of absolute itemized terms when
    the RHS cancels internally.
    """
    t = np.asarray(t, dtype=float)
    vals = np.asarray(values, dtype=float)
    rh = np.asarray(rhs_values, dtype=float)
    if len(t) < 3:
        raise TooFewRecords(f"need at least 3 records, got {len(t)}")
    steps = np.diff(t)
    h = steps.mean()
    if np.max(np.abs(steps - h)) > 1e-9 * max(h, 1e-300):
        raise InvalidParameter("records are not uniformly spaced")
    r = (vals[2:] - vals[:-2]) / (2.0 * h) - rh[1:-1]
    if scale is None:
        scale = float(np.max(np.abs(rh))) if len(rh) else 0.0
    return Residual(t[1:-1], r, float(np.max(np.abs(r))), float(scale))


def series_residual(series: TimeSeries, name: str) -> Residual:
    """Residual for an observer-recorded functional; scale = max over records of sum |terms|."""
    prefix = f"{name}_"
    term_cols = [c for c in series.names if c.startswith(prefix) and c != f"{name}_rhs"]
    scale = float(np.max(np.sum(np.abs([series[c] for c in term_cols]), axis=0))) if term_cols else None
    return virial_residual(series["t"], series[name], series[f"{name}_rhs"], scale)


# ------------------------------------------------------------- bilinear forms


def bilinear_B(u, w: WeightProfile, g: Grid) -> float:
    """2 int phi' |u_x|^2 - 1/2 int phi''' |u|^2, summed over real and imaginary parts."""
    if w.family != "tanh_lambda":
        raise IncompatibleSpec("bilinear_B is defined for the tanh weight")
    u = np.asarray(u)
    dphi, d3phi = w.dphi(g.nodes), w.d3phi(g.nodes)
    total = 0.0
    for eta in (u.real, u.imag) if np.iscomplexobj(u) else (u,):
        if not np.any(eta):
            continue
        ex = _dx(eta, g)
        total += float(integrate(2.0 * dphi * ex * ex - 0.5 * d3phi * eta * eta, g))
    return total


def bilinear_Bcal(zeta, lam: float, g: Grid) -> float:
    """2 int zeta_x^2 - lambda^-2 int sech^2(x/lambda) zeta^2."""
    zeta = np.asarray(zeta, dtype=float)
    zx = _dx(zeta, g)
    pot = 1.0 / np.cosh(g.nodes / lam) ** 2
    return float(integrate(2.0 * zx * zx - pot * zeta * zeta / lam ** 2, g))


def change_of_variables_check(u, w: WeightProfile, g: Grid) -> float:
    """Largest |B(eta) - Bcal(omega eta)| over eta = Re u, Im u."""
    u = np.asarray(u)
    omega = w.omega(g.nodes)
    worst = 0.0
    for eta in (u.real, u.imag) if np.iscomplexobj(u) else (u,):
        eta = np.ascontiguousarray(eta, dtype=float)
        worst = max(worst, abs(bilinear_B(eta, w, g) - bilinear_Bcal(omega * eta, w.lam, g)))
    return worst


# ------------------------------------------------------------- coercivity


def random_odd_fields(seed: int, ids, g: Grid, modes: Optional[int] = None):
    """Odd sine series with N(0,1) m^-2 coefficients over the first N/4 modes.

    Each sample draws from its own generator keyed by (seed, sample id), so
    any subset can be regenerated independently. Returns (fields, derivatives).
    """
    N = g.num_points
    M = modes or N // 4
    ids = list(ids)
    m = np.arange(1, M + 1)
    coeffs = np.empty((len(ids), M))
    for row, i in enumerate(ids):
        coeffs[row] = np.random.default_rng([seed, i]).standard_normal(M) / m ** 2
    # x_j = -L + j dx, so sin(k_m x_j) = (-1)^m sin(2 pi m j / N)
    signed = coeffs * (-1.0) ** m
    spec = np.zeros((len(ids), N), dtype=complex)
    spec[:, 1:M + 1] = signed
    wave = np.fft.ifft(spec, axis=1) * N
    k = np.pi * m / g.half_length
    dspec = np.zeros((len(ids), N), dtype=complex)
    dspec[:, 1:M + 1] = signed * k
    dwave = np.fft.ifft(dspec, axis=1) * N
    return wave.imag, dwave.real


@dataclass
class CoercivityReport:
    samples: int
    violations: int
    min_ratio: float  # min over samples of Bcal(zeta) / int zeta_x^2
    c0_estimate: float
    c0_argmin: int
    rows: list = field(default_factory=list, repr=False)  # (sample_id, ratio, c0 ratio)


def coercivity_sample(seed: int, count: int, lam: float, g: Grid, chunk: int = 500,
                      raise_on_violation: bool = True) -> CoercivityReport:
    """Check Bcal(zeta) >= 1.5 int zeta_x^2 on random odd zeta and estimate c0.

    c0 is the minimum over random odd complex u of B(u) / ||u||^2_{H^1_omega}.
    """
    if count < 1:
        raise InvalidParameter("count must be >= 1")
    if not lam > 0:
        raise InvalidParameter("lambda must be positive")
    x = g.nodes
    with np.errstate(over="ignore"):
        dphi = 1.0 / np.cosh(x / lam) ** 2
    pot = dphi / lam ** 2
    sh2 = dphi
    d3phi = (2.0 / lam ** 2) * sh2 * (2.0 - 3.0 * sh2)
    dx = g.dx
    violations = 0
    rows: list = []
    min_ratio, c0, arg = math.inf, math.inf, -1
    for start in range(0, count, chunk):
        ids = range(start, min(count, start + chunk))
        z, zx = random_odd_fields(seed, ids, g)
        grad = np.sum(zx * zx, axis=1) * dx
        bcal = 2.0 * grad - np.sum(pot * z * z, axis=1) * dx
        scale = 2.0 * grad + np.sum(pot * z * z, axis=1) * dx
        margin = bcal - 1.5 * grad
        # complex u = eta1 + i eta2 from two independent streams
        e1, e1x = z, zx
        e2, e2x = random_odd_fields(seed + 1_000_003, ids, g)
        B = np.sum(2.0 * dphi * (e1x ** 2 + e2x ** 2) - 0.5 * d3phi * (e1 ** 2 + e2 ** 2), axis=1) * dx
        H = np.sum(dphi * (e1x ** 2 + e2x ** 2 + e1 ** 2 + e2 ** 2), axis=1) * dx
        ratio_c0 = B / H
        for row, i in enumerate(ids):
            ratio = bcal[row] / grad[row]
            rows.append((i, float(ratio), float(ratio_c0[row])))
            if margin[row] < -1e-9 * scale[row]:
                violations += 1
                if raise_on_violation:
                    raise CoercivityViolation(i, z[row].copy(),
                                              f"sample {i}: Bcal={bcal[row]:.6e} < 1.5*{grad[row]:.6e}")
            min_ratio = min(min_ratio, ratio)
            if ratio_c0[row] < c0:
                c0, arg = float(ratio_c0[row]), i
    return CoercivityReport(count, violations, float(min_ratio), c0, arg, rows)
