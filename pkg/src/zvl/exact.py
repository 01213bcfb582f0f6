"""Closed-form solitary waves and structured initial data.

All profiles assume unit ion sound speed and unit plasma frequency, the
setting in which the solitary-wave formulas hold.

Wu waves are built as exp(i w t) exp(i q x) U(x - c t) with q = c/2. This is
the phase convention under which the sech profile with width sqrt(4w + c^2)/2
actually solves i u_t + u_xx = n u; the density is n = -|u|^2 / (1 - c^2) and
v = c n. ``printed_signs=True`` reproduces the sign of the published density
(and Chen velocity / time derivative) for the residual comparison in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import rhs_fields
from .errors import InvalidParameter
from .grid import Grid, integrate, spectral_derivative
from .states import KGZState, NLSState, ZakharovState


def sech(x):
    return 1.0 / np.cosh(x)


@dataclass(frozen=True)
class SolitonParams:
    omega: float
    speed: float
    center: float = 0.0


def wu_valid(p: SolitonParams) -> bool:
    return 4.0 * p.omega + p.speed ** 2 >= 0.0 and 1.0 - p.speed ** 2 > 0.0


def chen_valid(p: SolitonParams) -> bool:
    return 1.0 - p.speed ** 2 - p.omega ** 2 > 0.0


def _wrapped(g: Grid, x0: float) -> np.ndarray:
    """x - x0 mapped periodically into [-L, L)."""
    L = g.half_length
    return np.mod(g.nodes - x0 + L, 2.0 * L) - L


def wu_soliton(p: SolitonParams, t: float, g: Grid, printed_signs: bool = False) -> ZakharovState:
    if not wu_valid(p):
        raise InvalidParameter(
            f"Wu solitary wave needs 4*omega + speed^2 >= 0 and 1 - speed^2 > 0 (omega={p.omega}, speed={p.speed})")
    w, c = p.omega, p.speed
    kappa = math.sqrt(4.0 * w + c * c) / 2.0
    amp = math.sqrt((4.0 * w + c * c) * (1.0 - c * c) / 2.0)
    q = c / 2.0
    xi = _wrapped(g, p.center + c * t)
    s = sech(kappa * xi)
    u = amp * s * np.exp(1j * (q * xi + (w + c * c / 2.0) * t))
    n = -(2.0 * w + c * c / 2.0) * s ** 2
    if printed_signs:
        n = -n
    return ZakharovState(u, n, c * n, t)


def chen_soliton(p: SolitonParams, t: float, g: Grid, printed_signs: bool = False) -> KGZState:
    if not chen_valid(p):
        raise InvalidParameter(
            f"Chen solitary wave needs 1 - speed^2 - omega^2 > 0 (omega={p.omega}, speed={p.speed})")
    w, c = p.omega, p.speed
    d = 1.0 - c * c
    root = math.sqrt(d - w * w)
    kappa = root / d
    amp = math.sqrt(2.0) * root
    q = w * c / d
    xi = _wrapped(g, p.center + c * t)
    s = sech(kappa * xi)
    phase = np.exp(1j * (q * xi - w * t))
    U = amp * s
    dU = -amp * kappa * s * np.tanh(kappa * xi)
    u = U * phase
    ux = (1j * q * U + dU) * phase
    ut = -1j * w * u - c * ux
    n = -(2.0 * (d - w * w) / d) * s ** 2
    v = c * n
    if printed_signs:
        ut = 1j * w * u + c * ux
        v = -v
    return KGZState(u, ut, n, v, t)


def _h1(f: np.ndarray, g: Grid) -> float:
    fx = spectral_derivative(f, g)
    return math.sqrt(float(integrate(np.abs(f) ** 2 + np.abs(fx) ** 2, g).real))


def odd_packet(amp: float | None, width: float, g: Grid, system: str = "zakharov",
               h1: float | None = None):
    """Odd-sector data u = amp x exp(-x^2/width^2), n even, v odd.

    Pass ``h1`` instead of ``amp`` to rescale u to a prescribed H^1 norm.
    """
    if width <= 0:
        raise InvalidParameter("width must be positive")
    x = g.nodes
    gauss = np.exp(-(x / width) ** 2)
    shape = x * gauss
    if h1 is not None:
        if h1 < 0:
            raise InvalidParameter("h1 must be non-negative")
        base = _h1(shape, g)
        amp = h1 / base
    if amp is None or amp < 0:
        raise InvalidParameter("amp must be a non-negative number")
    u = amp * shape
    n = -(amp ** 2) * gauss
    v = (amp ** 2) * shape
    if system == "zakharov":
        return ZakharovState(u, n, v, 0.0)
    if system == "kgz":
        return KGZState(u, np.zeros_like(u), n, v, 0.0)
    if system == "nls":
        return NLSState(u, 0.0)
    raise InvalidParameter(f"unknown system {system!r}")


def gaussian_data(amp: float, width: float, g: Grid, system: str = "zakharov",
                  center: float = 0.0, k0: float = 0.0):
    """Generic (no parity) Schwartz data: a modulated Gaussian with a Gaussian density bump."""
    if width <= 0:
        raise InvalidParameter("width must be positive")
    xi = g.nodes - center
    gauss = np.exp(-(xi / width) ** 2)
    u = amp * gauss * np.exp(1j * k0 * g.nodes)
    n = 0.5 * amp ** 2 * gauss
    v = np.zeros_like(n)
    if system == "zakharov":
        return ZakharovState(u, n, v, 0.0)
    if system == "kgz":
        return KGZState(u, np.zeros_like(u), n, v, 0.0)
    if system == "nls":
        return NLSState(u, 0.0)
    raise InvalidParameter(f"unknown system {system!r}")


def nls_soliton(t: float, g: Grid, center: float = 0.0) -> NLSState:
    """Cubic focusing ground state sqrt(2) sech(x) exp(i t)."""
    xi = _wrapped(g, center)
    return NLSState(math.sqrt(2.0) * sech(xi) * np.exp(1j * t), t)


def pde_residual(solution, t: float, g: Grid, prm, h: float = 1e-3) -> float:
    """Largest pointwise |d/dt state - RHS(state)| for a closed-form ``solution(t)``.

    The time derivative is a fourth-order central difference, so the residual of
    an exact solution sits near h^4 plus the spatial truncation error.
    """
    sm2, sm1, sp1, sp2 = (solution(t + k * h) for k in (-2, -1, 1, 2))
    rhs = rhs_fields(solution(t), g, prm)
    worst = 0.0
    for a, b, c, d, r in zip(sm2.fields, sm1.fields, sp1.fields, sp2.fields, rhs):
        dt = (a - 8.0 * b + 8.0 * c - d) / (12.0 * h)
        worst = max(worst, float(np.max(np.abs(dt - r))))
    return worst
