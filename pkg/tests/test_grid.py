import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zvl.errors import InvalidParameter, NonzeroMean, ShapeMismatch
from zvl.grid import antiderivative_zero_mean, integrate, make_grid, spectral_derivative


@pytest.mark.parametrize("L,N,dx", [(math.pi, 16, math.pi / 8), (64 * math.pi, 2048, math.pi / 16)])
def test_spacing(L, N, dx):
    g = make_grid(L, N)
    assert g.dx == pytest.approx(dx, rel=1e-15)
    assert g.nodes[0] == -L
    assert abs(g.dx * N - 2 * L) <= 2 * L * 2.3e-16


@pytest.mark.parametrize("L,N", [(1.0, 10), (1.0, 8), (0.0, 16), (-1.0, 32), (1.0, 24)])
def test_bad_grid(L, N):
    with pytest.raises(InvalidParameter):
        make_grid(L, N)


def test_nodes_symmetric():
    g = make_grid(3.0, 128)
    x = g.nodes
    assert np.all(np.diff(x) > 0)
    j = np.arange(1, 128)
    assert np.array_equal(x[128 - j], -x[j])


def test_derivative_of_sine(small_grid):
    g = small_grid
    assert np.max(np.abs(spectral_derivative(np.sin(g.x), g) - np.cos(g.x))) < 1e-12
    assert np.max(np.abs(spectral_derivative(np.ones(g.num_points), g))) < 1e-14
    err = spectral_derivative(np.sin(3 * g.x), g, 3) + 27 * np.cos(3 * g.x)
    assert np.max(np.abs(err)) < 1e-10


def test_derivative_complex_matches_real_parts(small_grid):
    g = small_grid
    f = np.exp(1j * 2 * g.x) * np.cos(g.x)
    d = spectral_derivative(f, g)
    assert np.allclose(d.real, spectral_derivative(f.real, g), atol=1e-12)
    assert np.allclose(d.imag, spectral_derivative(f.imag, g), atol=1e-12)


def test_derivative_shape_check(small_grid):
    with pytest.raises(ShapeMismatch):
        spectral_derivative(np.zeros(10), small_grid)


def test_integrals():
    g = make_grid(math.pi, 16)
    assert integrate(np.ones(16), g) == pytest.approx(2 * math.pi, rel=1e-15)
    g = make_grid(20.0, 1024)
    sech = 1 / np.cosh(g.x)
    assert abs(integrate(sech ** 2, g) - 2.0) < 1e-12
    assert abs(integrate(sech ** 4, g) - 4.0 / 3.0) < 1e-12


def test_antiderivative(small_grid):
    g = small_grid
    assert np.max(np.abs(antiderivative_zero_mean(np.cos(g.x), g) - np.sin(g.x))) < 1e-12
    F = antiderivative_zero_mean(np.sin(2 * g.x), g)
    assert np.max(np.abs(F + np.cos(2 * g.x) / 2)) < 1e-12
    assert abs(F.mean()) < 1e-15
    with pytest.raises(NonzeroMean):
        antiderivative_zero_mean(np.ones(g.num_points), g)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6), st.integers(1, 3))
def test_derivative_exact_on_trig_polynomials(coef, order):
    g = make_grid(math.pi, 32)
    x = g.x
    f = sum(a * np.sin((m + 1) * x) for m, a in enumerate(coef))
    exact = sum(a * (m + 1) ** order * np.sin((m + 1) * x + order * math.pi / 2) for m, a in enumerate(coef))
    assert np.max(np.abs(spectral_derivative(f, g, order) - exact)) < 1e-9
