"""Field tuples for the Zakharov, Klein-Gordon-Zakharov and NLS systems.

States are immutable value objects. ``fields`` lists the evolved arrays in a
fixed order so that time steppers can treat every system uniformly.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import ClassVar, Union

import numpy as np

from .errors import ShapeMismatch
from .grid import Grid

PARITY_TOL = 1e-10


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ZakharovState:
    u: np.ndarray
    n: np.ndarray
    v: np.ndarray
    t: float = 0.0

    system: ClassVar[str] = "zakharov"
    names: ClassVar[tuple] = ("u", "n", "v")
    # parity required by the odd sector: +1 even, -1 odd
    odd_sector: ClassVar[tuple] = (-1, +1, -1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", _frozen(self.u, complex))
        object.__setattr__(self, "n", _real(self.n, "n"))
        object.__setattr__(self, "v", _real(self.v, "v"))
        object.__setattr__(self, "t", float(self.t))
        _same_shape(self)

    @property
    def fields(self) -> tuple:
        return (self.u, self.n, self.v)

    def with_fields(self, fields, t: float) -> "ZakharovState":
        return type(self)(*fields, t=t)

    @classmethod
    def zeros(cls, g: Grid, t: float = 0.0) -> "ZakharovState":
        z = np.zeros(g.num_points)
        return cls(z, z, z, t)


@dataclass(frozen=True, eq=False)
class KGZState:
    u: np.ndarray
    ut: np.ndarray
    n: np.ndarray
    v: np.ndarray
    t: float = 0.0

    system: ClassVar[str] = "kgz"
    names: ClassVar[tuple] = ("u", "ut", "n", "v")
    odd_sector: ClassVar[tuple] = (-1, -1, +1, -1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", _frozen(self.u, complex))
        object.__setattr__(self, "ut", _frozen(self.ut, complex))
        object.__setattr__(self, "n", _real(self.n, "n"))
        object.__setattr__(self, "v", _real(self.v, "v"))
        object.__setattr__(self, "t", float(self.t))
        _same_shape(self)

    @property
    def fields(self) -> tuple:
        return (self.u, self.ut, self.n, self.v)

    def with_fields(self, fields, t: float) -> "KGZState":
        return type(self)(*fields, t=t)

    @classmethod
    def zeros(cls, g: Grid, t: float = 0.0) -> "KGZState":
        z = np.zeros(g.num_points)
        return cls(z, z, z, z, t)


@dataclass(frozen=True, eq=False)
class NLSState:
    u: np.ndarray
    t: float = 0.0

    system: ClassVar[str] = "nls"
    names: ClassVar[tuple] = ("u",)
    odd_sector: ClassVar[tuple] = (-1,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", _frozen(self.u, complex))
        object.__setattr__(self, "t", float(self.t))
        _same_shape(self)

    @property
    def fields(self) -> tuple:
        return (self.u,)

    def with_fields(self, fields, t: float) -> "NLSState":
        return type(self)(*fields, t=t)

    @classmethod
    def zeros(cls, g: Grid, t: float = 0.0) -> "NLSState":
        return cls(np.zeros(g.num_points), t)


State = Union[ZakharovState, KGZState, NLSState]


def _real(a, name: str) -> np.ndarray:
    a = np.asarray(a)
    if np.iscomplexobj(a) and np.any(a.imag != 0):
        raise ValueError(f"field {name} must be real")
    return _frozen(a.real, float)


def _same_shape(state) -> None:
    shapes = {f.shape for f in state.fields}
    if len(shapes) != 1 or len(next(iter(shapes))) != 1:
        raise ShapeMismatch(f"{state.system} fields must be 1-D arrays of one length, got {sorted(shapes)}")


def retime(state, t: float):
    return replace(state, t=t)


def parity_decompose(f: np.ndarray, g: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Split f into even and odd parts about x = 0."""
    f = np.asarray(f)
    fr = g.reflect(f)
    even = 0.5 * (f + fr)
    odd = f - even
    return even, odd


def parity_violation(state, g: Grid) -> float:
    """Largest relative L2 size of the wrong-parity part over the odd-sector fields."""
    worst = 0.0
    for f, parity in zip(state.fields, state.odd_sector):
        even, odd = parity_decompose(f, g)
        wrong = even if parity < 0 else odd
        norm = np.sqrt(np.sum(np.abs(f) ** 2) * g.dx)
        bad = np.sqrt(np.sum(np.abs(wrong) ** 2) * g.dx)
        worst = max(worst, bad / max(norm, 1e-30))
    return float(worst)
