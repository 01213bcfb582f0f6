"""Right-hand sides of the first-order systems and explicit time integration."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import IncompatibleSpec, InvalidParameter, UnstableStep
from .grid import Grid
from .states import KGZState, NLSState, ZakharovState

log = logging.getLogger(__name__)

SYSTEMS = ("zakharov", "kgz", "nls")
SCHEMES = ("rk4", "strang_nls")
_STATE_TYPES = {"zakharov": ZakharovState, "kgz": KGZState, "nls": NLSState}


@dataclass(frozen=True)
class ModelParams:
    """alpha is the ion sound speed, c the plasma frequency (KGZ only),
    p and sign the NLS power and focusing (+1) / defocusing (-1) choice."""

    system: str = "zakharov"
    alpha: float = 1.0
    c: float = 1.0
    p: float = 3.0
    sign: int = 1

    def __post_init__(self) -> None:
        if self.system not in SYSTEMS:
            raise InvalidParameter(f"unknown system {self.system!r}")
        if not self.alpha > 0:
            raise InvalidParameter("alpha must be positive")
        if not self.c > 0:
            raise InvalidParameter("c must be positive")
        if not 1.0 < self.p < 5.0:
            raise InvalidParameter("p must lie in (1, 5)")
        if self.sign not in (1, -1):
            raise InvalidParameter("sign must be +1 or -1")


@dataclass(frozen=True)
class StepperConfig:
    dt: float = 1e-3
    scheme: str = "rk4"
    record_every: int = 1
    t_final: float = 1.0
    dealias: bool = False
    force: bool = False

    def __post_init__(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvalidParameter("dt must be positive")
        if self.scheme not in SCHEMES:
            raise InvalidParameter(f"unknown scheme {self.scheme!r}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise InvalidParameter("record_every must be an integer >= 1")
        if self.t_final < 0:
            raise InvalidParameter("t_final must be non-negative")
        if self.t_final > 0 and self.dt > self.t_final:
            raise InvalidParameter("dt must not exceed t_final")

    def num_steps(self) -> int:
        if self.t_final == 0:
            return 0
        return max(1, math.ceil(self.t_final / self.dt - 1e-9))

    def effective_dt(self) -> float:
        n = self.num_steps()
        return self.t_final / n if n else self.dt


@dataclass
class TimeSeries:
    """Scalar diagnostics recorded along a trajectory, columns in first-seen order."""

    t: list = field(default_factory=list)
    columns: dict = field(default_factory=dict)

    def append(self, t: float, values: Mapping[str, float]) -> None:
        k = len(self.t)
        for name in values:
            if name not in self.columns:
                if k:
                    raise ValueError(f"diagnostic {name!r} appeared after the first record")
                self.columns[name] = []
        for name, col in self.columns.items():
            if name not in values:
                raise ValueError(f"diagnostic {name!r} missing at t={t}")
            col.append(float(values[name]))
        self.t.append(float(t))

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, name: str) -> np.ndarray:
        if name == "t":
            return np.asarray(self.t)
        return np.asarray(self.columns[name])

    @property
    def names(self) -> list:
        return list(self.columns)


# --------------------------------------------------------------------------
# right-hand sides on raw arrays


def _filtered(prod: np.ndarray, mask) -> np.ndarray:
    if mask is None:
        return prod
    out = np.fft.ifft(np.fft.fft(prod) * mask)
    return out.real if np.isrealobj(prod) else out


def _dxx_complex(u: np.ndarray, g: Grid) -> np.ndarray:
    return np.fft.ifft(-(g.wavenumbers ** 2) * np.fft.fft(u))


def _dx_real(f: np.ndarray, g: Grid) -> np.ndarray:
    mult = 1j * g.rwavenumbers
    fh = np.fft.rfft(f) * mult
    fh[-1] = 0.0
    return np.fft.irfft(fh, n=g.num_points)


def _wave_rhs(n, v, dens, g, alpha):
    return -alpha * _dx_real(v, g), -alpha * _dx_real(n + dens, g)


def _zakharov(fields, g, prm, mask):
    u, n, v = fields
    dens = _filtered(u.real ** 2 + u.imag ** 2, mask)
    ut = 1j * (_dxx_complex(u, g) - _filtered(n * u, mask))
    nt, vt = _wave_rhs(n, v, dens, g, prm.alpha)
    return ut, nt, vt


def _kgz(fields, g, prm, mask):
    u, ut, n, v = fields
    c2 = prm.c ** 2
    dens = _filtered(u.real ** 2 + u.imag ** 2, mask)
    utt = c2 * (_dxx_complex(u, g) - c2 * u - _filtered(n * u, mask))
    nt, vt = _wave_rhs(n, v, dens, g, prm.alpha)
    return ut.copy(), utt, nt, vt


def _nls(fields, g, prm, mask):
    (u,) = fields
    mod = np.abs(u)
    nonlin = _filtered(prm.sign * mod ** (prm.p - 1) * u, mask)
    return (1j * (_dxx_complex(u, g) + nonlin),)


_RHS = {"zakharov": _zakharov, "kgz": _kgz, "nls": _nls}


def _check_system(state, prm: ModelParams) -> None:
    if state.system != prm.system:
        raise IncompatibleSpec(f"{type(state).__name__} used with system={prm.system!r}")


def rhs_fields(state, g: Grid, prm: ModelParams, dealias: bool = False) -> tuple:
    _check_system(state, prm)
    mask = g.dealias_mask() if dealias else None
    return _RHS[prm.system](state.fields, g, prm, mask)


def zakharov_rhs(s: ZakharovState, g: Grid, prm: ModelParams, dealias: bool = False) -> ZakharovState:
    """Time derivative (u_t, n_t, v_t), returned as a state-shaped container."""
    return ZakharovState(*rhs_fields(s, g, prm, dealias), t=s.t)


def kgz_rhs(s: KGZState, g: Grid, prm: ModelParams, dealias: bool = False) -> KGZState:
    return KGZState(*rhs_fields(s, g, prm, dealias), t=s.t)


def nls_rhs(s: NLSState, g: Grid, prm: ModelParams, dealias: bool = False) -> NLSState:
    return NLSState(*rhs_fields(s, g, prm, dealias), t=s.t)


# --------------------------------------------------------------------------
# steppers


def _norms(fields) -> list:
    return [math.sqrt(float(np.vdot(f, f).real)) for f in fields]


def _rk4_arrays(fields, g, prm, dt, mask):
    f = _RHS[prm.system]
    k1 = f(fields, g, prm, mask)
    k2 = f(tuple(y + 0.5 * dt * k for y, k in zip(fields, k1)), g, prm, mask)
    k3 = f(tuple(y + 0.5 * dt * k for y, k in zip(fields, k2)), g, prm, mask)
    k4 = f(tuple(y + dt * k for y, k in zip(fields, k3)), g, prm, mask)
    return tuple(y + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d)
                 for y, a, b, c, d in zip(fields, k1, k2, k3, k4))


def _guard(before, after, t) -> None:
    # round-off growth of a field that is essentially zero is not an instability
    floor = 1e-8 * max(max(before), 1e-300)
    for b, a in zip(before, after):
        if not math.isfinite(a) or (b > 0 and a > 10.0 * b and a > floor):
            raise UnstableStep(t, f"field norm grew from {b:.3e} to {a:.3e} in one step at t={t:.6g}")


def step_rk4(state, g: Grid, prm: ModelParams, dt: float, dealias: bool = False):
    """One classical Runge-Kutta step of the method-of-lines system."""
    _check_system(state, prm)
    mask = g.dealias_mask() if dealias else None
    new = _rk4_arrays(state.fields, g, prm, dt, mask)
    _guard(_norms(state.fields), _norms(new), state.t + dt)
    return state.with_fields(new, state.t + dt)


def _strang_arrays(u, g, prm, dt, lin):
    half = 0.5 * dt * prm.sign
    u = u * np.exp(1j * half * np.abs(u) ** (prm.p - 1))
    u = np.fft.ifft(lin * np.fft.fft(u))
    return u * np.exp(1j * half * np.abs(u) ** (prm.p - 1))


def step_strang_nls(state: NLSState, g: Grid, prm: ModelParams, dt: float) -> NLSState:
    """Nonlinear half step, exact linear step in Fourier space, nonlinear half step."""
    if prm.system != "nls" or state.system != "nls":
        raise IncompatibleSpec("strang_nls applies only to the NLS system")
    lin = np.exp(-1j * g.wavenumbers ** 2 * dt)
    return NLSState(_strang_arrays(state.u, g, prm, dt, lin), t=state.t + dt)


def stability_limit(g: Grid) -> float:
    """Largest dt the runner accepts for Schroedinger-type stiffness."""
    # RK4 covers the imaginary axis up to |z| = 2 sqrt(2); the stiffest mode is k_max^2
    return 2.0 * math.sqrt(2.0) / g.k_max ** 2


def check_stability(g: Grid, prm: ModelParams, cfg: StepperConfig) -> None:
    """Refuse (or, with ``force``, only warn about) explicit steps past the linear limit."""
    if cfg.scheme == "strang_nls":
        return
    wave = 2.0 / (prm.alpha * g.k_max)
    if prm.system == "kgz":
        limit = min(wave, 2.0 / (prm.c * math.sqrt(g.k_max ** 2 + prm.c ** 2)))
    else:
        limit = min(wave, stability_limit(g)) if prm.system == "zakharov" else stability_limit(g)
    if cfg.effective_dt() > limit:
        msg = f"dt={cfg.effective_dt():.3e} exceeds the explicit stability limit {limit:.3e}"
        if not cfg.force:
            raise InvalidParameter(msg + " (set force to override)")
        log.warning(msg)


Observer = Callable[[object], Mapping[str, float]]


def evolve(state, g: Grid, prm: ModelParams, cfg: StepperConfig,
           observers: Sequence[Observer] | Iterable[Observer] = ()):
    """Step to t_final, calling every observer at step 0 and every ``record_every`` steps.

    The step count is ceil(t_final / dt) and the step actually taken is
    t_final / count, so records are uniformly spaced. The final state is
    always recorded.
    """
    _check_system(state, prm)
    if cfg.scheme == "strang_nls" and prm.system != "nls":
        raise IncompatibleSpec("strang_nls applies only to the NLS system")
    check_stability(g, prm, cfg)
    observers = list(observers)
    series = TimeSeries()

    def record(s) -> None:
        values: dict = {}
        for obs in observers:
            values.update(obs(s))
        series.append(s.t, values)

    steps = cfg.num_steps()
    dt = cfg.effective_dt()
    t0 = state.t
    mask = g.dealias_mask() if cfg.dealias else None
    lin = np.exp(-1j * g.wavenumbers ** 2 * dt) if cfg.scheme == "strang_nls" else None
    fields = state.fields
    record(state)
    current = state
    norms = _norms(fields)
    for k in range(1, steps + 1):
        t = t0 + k * dt
        if lin is not None:
            fields = (_strang_arrays(fields[0], g, prm, dt, lin),)
        else:
            fields = _rk4_arrays(fields, g, prm, dt, mask)
        new_norms = _norms(fields)
        _guard(norms, new_norms, t)
        norms = new_norms
        if k % cfg.record_every == 0 or k == steps:
            current = state.with_fields(fields, t)
            record(current)
    return series, current
