"""Periodic uniform grid on [-L, L) with Fourier differentiation and quadrature."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter, NonzeroMean, ShapeMismatch


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class Grid:
    half_length: float
    num_points: int
    dx: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    wavenumbers: np.ndarray = field(init=False, repr=False)
    rwavenumbers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        L, N = float(self.half_length), int(self.num_points)
        if not (L > 0 and np.isfinite(L)):
            raise InvalidParameter(f"half_length must be positive, got {self.half_length}")
        if N < 16 or not _is_power_of_two(N):
            raise InvalidParameter(f"num_points must be a power of two >= 16, got {self.num_points}")
        dx = 2.0 * L / N
        object.__setattr__(self, "half_length", L)
        object.__setattr__(self, "num_points", N)
        object.__setattr__(self, "dx", dx)
        nodes = -L + dx * np.arange(N)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        # fftfreq ordering: m = 0..N/2-1, -N/2..-1
        m = np.fft.fftfreq(N, d=1.0 / N)
        k = np.pi * m / L
        k.setflags(write=False)
        object.__setattr__(self, "wavenumbers", k)
        kr = np.pi * np.arange(N // 2 + 1) / L
        kr.setflags(write=False)
        object.__setattr__(self, "rwavenumbers", kr)

    @property
    def x(self) -> np.ndarray:
        return self.nodes

    @property
    def k_max(self) -> float:
        return np.pi / self.dx

    def reflect(self, f: np.ndarray) -> np.ndarray:
        """Return f(-x) using the node reflection x_{N-j} = -x_j (x_0 = -L maps to itself)."""
        return np.roll(f[::-1], 1)

    def dealias_mask(self) -> np.ndarray:
        """Boolean mask over full-FFT modes keeping |m| < N/3 (2/3 rule)."""
        m = np.abs(np.fft.fftfreq(self.num_points, d=1.0 / self.num_points))
        return m < self.num_points / 3.0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.half_length == other.half_length and self.num_points == other.num_points

    def __hash__(self) -> int:
        return hash((self.half_length, self.num_points))


def make_grid(half_length: float, num_points: int) -> Grid:
    return Grid(half_length, num_points)


def _check(f: np.ndarray, g: Grid) -> np.ndarray:
    f = np.asarray(f)
    if f.shape != (g.num_points,):
        raise ShapeMismatch(f"field of shape {f.shape} does not live on a grid of {g.num_points} points")
    return f


def spectral_derivative(f: np.ndarray, g: Grid, order: int = 1) -> np.ndarray:
    """Multiply by (ik)^order in Fourier space; the Nyquist mode is dropped for odd orders."""
    f = _check(f, g)
    if order < 1:
        raise InvalidParameter("order must be >= 1")
    if np.isrealobj(f):
        mult = (1j * g.rwavenumbers) ** order
        if order % 2:
            mult[-1] = 0.0
        return np.fft.irfft(mult * np.fft.rfft(f), n=g.num_points)
    mult = (1j * g.wavenumbers) ** order
    if order % 2:
        mult[g.num_points // 2] = 0.0
    return np.fft.ifft(mult * np.fft.fft(f))


def integrate(f: np.ndarray, g: Grid):
    """Rectangle rule, spectrally accurate for smooth periodic integrands."""
    f = _check(f, g)
    return f.sum() * g.dx


def antiderivative_zero_mean(f: np.ndarray, g: Grid) -> np.ndarray:
    """Zero-mean F with F' = f, for real zero-mean f."""
    f = _check(f, g)
    if not np.isrealobj(f):
        raise InvalidParameter("antiderivative_zero_mean expects a real field")
    mean = f.mean()
    scale = np.sqrt(np.mean(f * f))
    if abs(mean) > 1e-10 * max(scale, 1e-300) and abs(mean) > 0.0:
        raise NonzeroMean(f"field mean {mean:.3e} is not zero")
    fh = np.fft.rfft(f)
    kr = g.rwavenumbers
    out = np.zeros_like(fh)
    out[1:] = fh[1:] / (1j * kr[1:])
    out[-1] = 0.0
    return np.fft.irfft(out, n=g.num_points)
