import numpy as np
import pytest

from zvl.exact import SolitonParams, odd_packet, wu_soliton
from zvl.grid import make_grid
from zvl.states import KGZState, NLSState, ZakharovState, parity_decompose, parity_violation, retime


@pytest.fixture
def g():
    return make_grid(40.0, 1024)


def test_decompose_even_and_odd(g):
    sech = 1 / np.cosh(g.x)
    even, odd = parity_decompose(sech, g)
    assert np.max(np.abs(even - sech)) < 1e-15 and np.max(np.abs(odd)) < 1e-15
    f = g.x * np.exp(-g.x ** 2)
    even, odd = parity_decompose(f, g)
    assert np.max(np.abs(even)) < 1e-15 and np.max(np.abs(odd - f)) < 1e-15


def test_decompose_mixture_sums_back(g):
    sech = 1 / np.cosh(g.x)
    f = sech + np.tanh(g.x) * sech
    even, odd = parity_decompose(f, g)
    assert np.array_equal(even + odd, f)
    assert np.max(np.abs(even - sech)) < 1e-14
    assert np.max(np.abs(odd - np.tanh(g.x) * sech)) < 1e-14


def test_parity_violation_cases(g):
    gauss = np.exp(-g.x ** 2)
    s = ZakharovState(g.x * gauss, gauss, g.x * gauss, 0.0)
    assert parity_violation(s, g) < 1e-12
    assert parity_violation(ZakharovState.zeros(g), g) == 0.0
    wu = wu_soliton(SolitonParams(1.0, 0.0), 0.0, g)
    assert parity_violation(wu, g) == pytest.approx(1.0, abs=1e-12)


def test_states_are_immutable_copies(g):
    u = np.ones(g.num_points, dtype=complex)
    s = ZakharovState(u, np.zeros(g.num_points), np.zeros(g.num_points), 0.0)
    u[0] = 5.0
    assert s.u[0] == 1.0
    with pytest.raises(ValueError):
        s.u[0] = 2.0


def test_real_fields_reject_imaginary_parts(g):
    z = np.zeros(g.num_points)
    with pytest.raises(ValueError):
        ZakharovState(z, z + 1j, z, 0.0)
    s = ZakharovState(z, z + 0j, z, 0.0)
    assert np.isrealobj(s.n)


def test_shape_mismatch(g):
    z = np.zeros(g.num_points)
    with pytest.raises(ValueError):
        KGZState(z, z, z[:-1], z, 0.0)


@pytest.mark.parametrize("system", ["zakharov", "kgz", "nls"])
def test_odd_packet_in_odd_sector(g, system):
    s = odd_packet(0.3, 2.0, g, system)
    assert parity_violation(s, g) < 1e-14


def test_retime_keeps_fields(g):
    s = NLSState(np.exp(-g.x ** 2), 0.0)
    r = retime(s, 3.0)
    assert r.t == 3.0 and np.array_equal(r.u, s.u)
