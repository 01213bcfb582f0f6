"""Conserved quantities, weight profiles, weighted and localized norms, a-priori bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidParameter, NegativeWeight
from .grid import Grid, integrate, spectral_derivative

SQRT3 = math.sqrt(3.0)
C_GN = SQRT3 / 3.0
E4_CONSTANT = SQRT3 / 6.0

FAMILIES = ("tanh_lambda", "cutoff", "bump", "sech_plain", "constant")


def _sech(x):
    return 1.0 / np.cosh(x)


# -------------------------------------------------------------------- weights


@dataclass(frozen=True)
class WeightProfile:
    """A weight phi with evaluators for phi, phi', phi''' and omega = sqrt(phi').

    ``constant`` (phi = 1) is the degenerate weight that turns the localized
    momentum functional into the global momentum.
    """

    family: str
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidParameter(f"unknown weight family {self.family!r}")
        if not self.lam > 0:
            raise InvalidParameter("lambda must be positive")

    def phi(self, s):
        s = np.asarray(s, dtype=float)
        f = self.family
        if f == "tanh_lambda":
            return self.lam * np.tanh(s / self.lam)
        if f == "cutoff":
            r = np.clip(s + 1.0, 0.0, 1.0)
            return 1.0 - r ** 3 * (10.0 - 15.0 * r + 6.0 * r * r)
        if f == "bump":
            return _bump_derivs(s)[0]
        if f == "sech_plain":
            return _sech(s)
        return np.ones_like(s)

    def dphi(self, s):
        s = np.asarray(s, dtype=float)
        f = self.family
        if f == "tanh_lambda":
            return _sech(s / self.lam) ** 2
        if f == "cutoff":
            r = np.clip(s + 1.0, 0.0, 1.0)
            return -30.0 * r * r * (1.0 - r) ** 2
        if f == "bump":
            return _bump_derivs(s)[1]
        if f == "sech_plain":
            return -_sech(s) * np.tanh(s)
        return np.zeros_like(s)

    def d2phi(self, s):
        s = np.asarray(s, dtype=float)
        f = self.family
        if f == "tanh_lambda":
            y = s / self.lam
            return -(2.0 / self.lam) * _sech(y) ** 2 * np.tanh(y)
        if f == "cutoff":
            r = np.clip(s + 1.0, 0.0, 1.0)
            return -30.0 * (2.0 * r - 6.0 * r * r + 4.0 * r ** 3)
        if f == "bump":
            return _bump_derivs(s)[2]
        if f == "sech_plain":
            sh = _sech(s)
            return sh - 2.0 * sh ** 3
        return np.zeros_like(s)

    def d3phi(self, s):
        s = np.asarray(s, dtype=float)
        f = self.family
        if f == "tanh_lambda":
            y = s / self.lam
            sh2 = _sech(y) ** 2
            return (2.0 / self.lam ** 2) * sh2 * (2.0 - 3.0 * sh2)
        if f == "cutoff":
            r = s + 1.0
            inside = (r > 0.0) & (r < 1.0)
            return np.where(inside, -30.0 * (2.0 - 12.0 * r + 12.0 * r * r), 0.0)
        if f == "bump":
            return _bump_derivs(s)[3]
        if f == "sech_plain":
            sh = _sech(s)
            return sh * np.tanh(s) * (6.0 * sh * sh - 1.0)
        return np.zeros_like(s)

    def omega(self, s):
        """sqrt(phi'); only defined where phi' >= 0 everywhere (tanh and constant families)."""
        if self.family == "tanh_lambda":
            return _sech(np.asarray(s, dtype=float) / self.lam)
        if self.family == "constant":
            return np.zeros_like(np.asarray(s, dtype=float))
        raise NegativeWeight(f"{self.family} weight has a sign-changing or negative derivative")

    def sample(self, x) -> dict:
        """Columns for plotting: x, phi, phi', phi'''."""
        x = np.asarray(x, dtype=float)
        return {"x": x, "phi": self.phi(x), "dphi": self.dphi(x), "d3phi": self.d3phi(x)}


def tanh_weight(lam: float = 1.0) -> WeightProfile:
    return WeightProfile("tanh_lambda", lam)


def _bump_derivs(s):
    """Bump exp(1 - 1/(1 - z^2)) with z = 4 s + 2, supported on [-3/4, -1/4], and 3 derivatives."""
    z = 4.0 * np.asarray(s, dtype=float) + 2.0
    inside = np.abs(z) < 1.0
    zi = np.where(inside, z, 0.0)
    w = 1.0 - zi * zi
    b = np.where(inside, np.exp(1.0 - 1.0 / w), 0.0)
    g1 = -2.0 * zi / w ** 2
    g2 = -2.0 / w ** 2 - 8.0 * zi * zi / w ** 3
    g3 = -24.0 * zi / w ** 3 - 48.0 * zi ** 3 / w ** 4
    d1 = b * g1 * 4.0
    d2 = b * (g1 * g1 + g2) * 16.0
    d3 = b * (g1 ** 3 + 3.0 * g1 * g2 + g3) * 64.0
    return b, d1, d2, d3


def bump_comparability(samples: int = 20001) -> tuple[float, float]:
    """Constants C1, C2 with bump <= C1 |cutoff'| and |bump'| <= C2 |cutoff'| on the bump support."""
    s = np.linspace(-0.75, -0.25, samples)[1:-1]
    cut = np.abs(WeightProfile("cutoff").dphi(s))
    b, d1, _, _ = _bump_derivs(s)
    return float(np.max(b / cut)), float(np.max(np.abs(d1) / cut))


# --------------------------------------------------------------------- curves


class TrackedEnvelope:
    """Running monotone envelope of observed ||u||_{H^2}, normalised to 1 at the first record.

    f(t) is the piecewise-linear interpolant of the cumulative maximum; beyond the
    last observation it is held constant.
    """

    def __init__(self) -> None:
        self.times: list = []
        self.values: list = []
        self._base: Optional[float] = None

    def observe(self, t: float, h2: float) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError("observations must be strictly increasing in time")
        if self._base is None:
            self._base = max(h2, 1e-300)
        level = max(h2 / self._base, self.values[-1] if self.values else 1.0)
        self.times.append(float(t))
        self.values.append(float(level))

    def f(self, t: float) -> float:
        if not self.times:
            return 1.0
        return float(np.interp(t, self.times, self.values))

    def df(self, t: float) -> float:
        ts, vs = self.times, self.values
        if len(ts) < 2 or t <= ts[0] or t > ts[-1]:
            return 0.0
        i = int(np.searchsorted(ts, t))
        return (vs[i] - vs[i - 1]) / (ts[i] - ts[i - 1])


@dataclass
class Curve:
    """lambda(t) = t log(t)^(1+delta) f(t) with mu = lambda, defined for t >= 2."""

    delta: float = 0.5
    f_mode: str = "constant"
    f_const: float = 1.0
    envelope: TrackedEnvelope = field(default_factory=TrackedEnvelope)

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise InvalidParameter("delta must be positive")
        if self.f_mode not in ("constant", "tracked"):
            raise InvalidParameter(f"unknown f_mode {self.f_mode!r}")
        if not self.f_const > 0:
            raise InvalidParameter("f_const must be positive")

    def _check(self, t: float) -> None:
        if t < 2.0 - 1e-12:
            raise InvalidParameter(f"curve defined only for t >= 2 (got {t})")

    def f(self, t: float) -> float:
        return self.f_const if self.f_mode == "constant" else self.envelope.f(t)

    def df(self, t: float) -> float:
        return 0.0 if self.f_mode == "constant" else self.envelope.df(t)

    def lam(self, t: float) -> float:
        self._check(t)
        return t * math.log(t) ** (1.0 + self.delta) * self.f(t)

    def dlam(self, t: float) -> float:
        self._check(t)
        lg = math.log(t)
        base = lg ** (1.0 + self.delta) + (1.0 + self.delta) * lg ** self.delta
        return base * self.f(t) + t * lg ** (1.0 + self.delta) * self.df(t)

    mu = lam
    dmu = dlam

    def region(self, t: float) -> tuple[tuple[float, float], tuple[float, float]]:
        """Both mirrored intervals where (x + mu)/lambda lies in [-3/4, -1/4] (and its reflection)."""
        lam, mu = self.lam(t), self.mu(t)
        left = (-mu - 0.75 * lam, -mu - 0.25 * lam)
        right = (mu + 0.25 * lam, mu + 0.75 * lam)
        return left, right


# ---------------------------------------------------------- conserved quantities


def _abs2(f):
    return f.real ** 2 + f.imag ** 2 if np.iscomplexobj(f) else f * f


def _dx(f, g):
    return spectral_derivative(f, g, 1)


def mass(s, g: Grid) -> float:
    return float(integrate(_abs2(s.u), g))


def energy_zakharov(s, g: Grid) -> float:
    u, n, v = s.u, s.n, s.v
    dens = _abs2(_dx(u, g)) + 0.5 * (n * n + v * v) + n * _abs2(u)
    return float(integrate(dens, g))


def momentum_zakharov(s, g: Grid, alpha: float = 1.0) -> float:
    u = s.u
    return float(integrate((u * np.conj(_dx(u, g))).imag, g) - integrate(s.v * s.n, g) / alpha)


def energy_kgz(s, g: Grid, c: float = 1.0) -> float:
    u = s.u
    dens = (c * c * _abs2(u) + _abs2(_dx(u, g)) + _abs2(s.ut) / (c * c)
            + 0.5 * (s.n ** 2 + s.v ** 2) + s.n * _abs2(u))
    return float(integrate(dens, g))


def momentum_kgz(s, g: Grid, c: float = 1.0, alpha: float = 1.0) -> float:
    cross = (s.ut * np.conj(_dx(s.u, g))).real
    return float(integrate(cross, g) / (c * c) - 0.5 * integrate(s.v * s.n, g) / alpha)


def energy_nls(s, g: Grid, p: float = 3.0, sign: int = 1) -> float:
    u = s.u
    dens = _abs2(_dx(u, g)) - sign * (2.0 / (p + 1.0)) * np.abs(u) ** (p + 1.0)
    return float(integrate(dens, g))


def momentum_nls(s, g: Grid) -> float:
    u = s.u
    return float(integrate((u * np.conj(_dx(u, g))).imag, g))


def conserved(s, g: Grid, prm) -> dict:
    """The invariants of whichever system ``prm`` names (KGZ does not conserve mass)."""
    if prm.system == "zakharov":
        return {"mass": mass(s, g), "energy": energy_zakharov(s, g),
                "momentum": momentum_zakharov(s, g, prm.alpha)}
    if prm.system == "kgz":
        return {"energy": energy_kgz(s, g, prm.c), "momentum": momentum_kgz(s, g, prm.c, prm.alpha)}
    return {"mass": mass(s, g), "energy": energy_nls(s, g, prm.p, prm.sign),
            "momentum": momentum_nls(s, g)}


def conserved_scales(s, g: Grid, prm) -> dict:
    """Size of each invariant's density taken in absolute value, term by term.

    Drifts are measured against max(|Q|, scale) so that quantities which vanish
    by symmetry (momentum of odd data) still get a meaningful relative drift.
    """
    u = s.u
    ux = _dx(u, g)
    au, aux = np.abs(u), np.abs(ux)
    m = float(integrate(au ** 2, g))
    if prm.system == "nls":
        return {"mass": m,
                "energy": float(integrate(aux ** 2 + (2.0 / (prm.p + 1.0)) * au ** (prm.p + 1.0), g)),
                "momentum": float(integrate(au * aux, g))}
    wave = float(integrate(0.5 * (s.n ** 2 + s.v ** 2) + np.abs(s.n) * au ** 2, g))
    vn = float(integrate(np.abs(s.v * s.n), g)) / prm.alpha
    if prm.system == "zakharov":
        return {"mass": m, "energy": float(integrate(aux ** 2, g)) + wave,
                "momentum": float(integrate(au * aux, g)) + vn}
    c2 = prm.c ** 2
    aut = np.abs(s.ut)
    # AM-GM bound on |P|; unlike a Cauchy-Schwarz product it stays positive when u_t = v = 0
    kin = float(integrate(aux ** 2 + aut ** 2 / c2, g))
    waves = float(integrate(s.n ** 2 + s.v ** 2, g))
    return {"energy": c2 * m + kin + wave,
            "momentum": kin / (2.0 * prm.c) + waves / (4.0 * prm.alpha)}


def relative_drift(q, q0: dict, scales: dict) -> dict:
    return {k: abs(q[k] - q0[k]) / max(abs(q0[k]), scales[k], 1e-300) for k in q0}


# ----------------------------------------------------------------- norms


def l2_norm(f, g: Grid) -> float:
    return math.sqrt(float(integrate(_abs2(np.asarray(f)), g)))


def h1_norm(f, g: Grid) -> float:
    f = np.asarray(f)
    return math.sqrt(float(integrate(_abs2(f) + _abs2(_dx(f, g)), g)))


def h2_norm(f, g: Grid) -> float:
    f = np.asarray(f)
    return math.sqrt(float(integrate(_abs2(f) + _abs2(_dx(f, g)) + _abs2(spectral_derivative(f, g, 2)), g)))


def _positive_weight(w: WeightProfile, g: Grid) -> np.ndarray:
    dphi = w.dphi(g.nodes)
    if w.family == "constant" or np.any(dphi < 0):
        raise NegativeWeight(f"{w.family} weight derivative is not a non-negative density")
    return dphi


def weighted_l2(f, w: WeightProfile, g: Grid) -> float:
    """Squared weighted norm  int phi' |f|^2."""
    return float(integrate(_positive_weight(w, g) * _abs2(np.asarray(f)), g))


def weighted_h1(f, w: WeightProfile, g: Grid) -> float:
    """Squared weighted norm  int phi' (|f_x|^2 + |f|^2)."""
    f = np.asarray(f)
    return float(integrate(_positive_weight(w, g) * (_abs2(_dx(f, g)) + _abs2(f)), g))


def _mask(g: Grid, intervals) -> np.ndarray:
    x = g.nodes
    m = np.zeros(g.num_points, dtype=bool)
    for a, b in intervals:
        m |= (x >= a) & (x <= b)
    return m


def local_l2(f, g: Grid, intervals) -> float:
    m = _mask(g, intervals)
    return math.sqrt(float(np.sum(_abs2(np.asarray(f))[m]) * g.dx))


def local_linf(f, g: Grid, intervals) -> float:
    m = _mask(g, intervals)
    return float(np.max(np.abs(np.asarray(f))[m])) if m.any() else 0.0


def local_h1(f, g: Grid, intervals) -> float:
    f = np.asarray(f)
    m = _mask(g, intervals)
    return math.sqrt(float(np.sum((_abs2(f) + _abs2(_dx(f, g)))[m]) * g.dx))


# ------------------------------------------------------------ inequalities


def gn_quartic_check(u, g: Grid) -> tuple[float, float, bool]:
    """int |u|^4 against (sqrt3/3) ||u_x|| ||u||^3."""
    u = np.asarray(u)
    lhs = float(integrate(_abs2(u) ** 2, g))
    rhs = C_GN * l2_norm(_dx(u, g), g) * l2_norm(u, g) ** 3
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-10)


@dataclass(frozen=True)
class EnergyBound:
    lhs: float
    bound: float
    ok: bool
    full_lhs: float  # lhs plus the mass term of the full energy-norm statement


def energy_bound_check(s, g: Grid, M0: float, E0: float, constant: float = E4_CONSTANT) -> EnergyBound:
    """int |u_x|^2 + (v^2 + n^2)/2 against 2 E0 + constant * M0^3."""
    lhs = float(integrate(_abs2(_dx(s.u, g)) + 0.5 * (s.v ** 2 + s.n ** 2), g))
    bound = 2.0 * E0 + constant * M0 ** 3
    return EnergyBound(lhs, bound, lhs <= bound * (1.0 + 1e-12) + 1e-300, lhs + mass(s, g))
