import math
from functools import partial

import numpy as np
import pytest

from zvl.dynamics import ModelParams
from zvl.errors import InvalidParameter
from zvl.exact import (SolitonParams, chen_soliton, chen_valid, gaussian_data, nls_soliton, odd_packet, pde_residual,
                       wu_soliton, wu_valid)
from zvl.functionals import h1_norm, mass
from zvl.grid import make_grid, spectral_derivative
from zvl.states import parity_violation

ZAK, KGZ, NLS = ModelParams("zakharov"), ModelParams("kgz"), ModelParams("nls")


@pytest.fixture(scope="module")
def g():
    return make_grid(40.0, 2048)


def test_wu_standing_profile(g):
    s = wu_soliton(SolitonParams(1.0, 0.0), 0.0, g)
    i0 = g.num_points // 2
    assert g.x[i0] == 0.0
    assert s.u[i0] == pytest.approx(math.sqrt(2.0), abs=1e-15)
    assert np.max(np.abs(s.u - math.sqrt(2.0) / np.cosh(g.x))) < 1e-15
    assert s.n[i0] == pytest.approx(-2.0, abs=1e-15)
    assert np.all(s.v == 0)


@pytest.mark.parametrize("omega,speed,ok", [(1.0, 0.5, True), (-1.0, 1.0, False), (1.0, 2.0, False),
                                            (-0.05, 0.5, True), (-0.2, 0.5, False), (0.0, 0.0, True)])
def test_wu_validity(omega, speed, ok):
    p = SolitonParams(omega, speed)
    assert wu_valid(p) is ok
    if not ok:
        with pytest.raises(InvalidParameter):
            wu_soliton(p, 0.0, make_grid(10.0, 64))


@pytest.mark.parametrize("omega,speed,ok", [(0.3, 0.4, True), (1.0, 1.0, False), (0.0, 0.99, True),
                                            (0.8, 0.6, False)])
def test_chen_validity(omega, speed, ok):
    p = SolitonParams(omega, speed)
    assert chen_valid(p) is ok
    if not ok:
        with pytest.raises(InvalidParameter):
            chen_soliton(p, 0.0, make_grid(10.0, 64))


def test_chen_rest_profile(g):
    s = chen_soliton(SolitonParams(0.0, 0.0), 0.0, g)
    sech = 1 / np.cosh(g.x)
    assert np.max(np.abs(s.u - math.sqrt(2) * sech)) < 1e-15
    assert np.max(np.abs(s.ut)) == 0.0
    assert np.max(np.abs(s.n + 2 * sech ** 2)) < 1e-15
    assert np.all(s.v == 0)


def test_chen_rest_solves_stationary_equation():
    g = make_grid(30.0, 1024)
    s = chen_soliton(SolitonParams(0.0, 0.0), 0.0, g)
    res = -spectral_derivative(s.u, g, 2) + s.u + s.n * s.u
    assert np.max(np.abs(res)) < 1e-10


@pytest.mark.parametrize("omega,speed", [(1.0, 0.0), (1.0, 0.5), (0.5, -0.3), (0.5, 0.6)])
def test_wu_solves_zakharov(g, omega, speed):
    sol = partial(wu_soliton, SolitonParams(omega, speed, center=1.0), g=g)
    assert pde_residual(sol, 0.7, g, ZAK) < 1e-8


@pytest.mark.parametrize("omega,speed", [(0.0, 0.0), (0.3, 0.4), (-0.5, 0.2), (0.6, -0.5)])
def test_chen_solves_kgz(g, omega, speed):
    sol = partial(chen_soliton, SolitonParams(omega, speed, center=-2.0), g=g)
    assert pde_residual(sol, 0.4, g, KGZ) < 1e-8


def test_chen_time_derivative_field_is_consistent(g):
    p = SolitonParams(0.3, 0.4)
    h = 1e-3
    a, b, c, d = (chen_soliton(p, k * h, g).u for k in (-2, -1, 1, 2))
    du = (a - 8 * b + 8 * c - d) / (12 * h)
    assert np.max(np.abs(du - chen_soliton(p, 0.0, g).ut)) < 1e-10


def test_printed_signs_fail_the_equations(g):
    wu = partial(wu_soliton, SolitonParams(1.0, 0.5), g=g, printed_signs=True)
    assert pde_residual(wu, 0.0, g, ZAK) > 0.5
    chen = partial(chen_soliton, SolitonParams(0.3, 0.4), g=g, printed_signs=True)
    assert pde_residual(chen, 0.0, g, KGZ) > 0.1


def test_odd_packet_rescaling():
    g = make_grid(64 * math.pi, 2048)
    s = odd_packet(None, 2.0, g, h1=0.01)
    assert abs(h1_norm(s.u, g) - 0.01) < 1e-10
    assert parity_violation(s, g) < 1e-14
    z = odd_packet(0.0, 2.0, g)
    assert not np.any(z.u) and not np.any(z.n) and not np.any(z.v)


@pytest.mark.parametrize("kw", [dict(amp=None), dict(amp=-1.0), dict(amp=1.0, width=0.0)])
def test_odd_packet_rejects(kw):
    width = kw.pop("width", 2.0)
    with pytest.raises(InvalidParameter):
        odd_packet(kw["amp"], width, make_grid(10.0, 64))


def test_nls_soliton(g):
    s = nls_soliton(0.0, g)
    assert s.u[g.num_points // 2] == pytest.approx(math.sqrt(2))
    assert mass(s, g) == pytest.approx(4.0, abs=1e-12)
    assert pde_residual(partial(nls_soliton, g=g), 0.3, g, NLS) < 1e-10


def test_gaussian_data_shapes(g):
    s = gaussian_data(0.5, 3.0, g, "kgz", center=4.0, k0=0.2)
    assert s.system == "kgz" and np.all(s.v == 0)
    assert np.argmax(np.abs(s.u)) == np.argmin(np.abs(g.x - 4.0))
