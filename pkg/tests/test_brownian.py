import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from stablecat.brownian import (INFINITE, MeasureSpec, TestFunction, ball_volume, en, energy, heat_kernel,
                                hitting_prob, occupation_moment, occupation_times, semigroup_apply,
                                simulate_path)
from stablecat.brownian.paths import hitting_limit, simulate_endpoints, tail_bound, upta_constant
from stablecat.lattice import Lattice


# -- test functions --------------------------------------------------------------

def test_ball_volume_values():
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert ball_volume(5) == pytest.approx(8 * math.pi ** 2 / 15)
    assert ball_volume(2, 2.0) == pytest.approx(4 * math.pi)


def test_gaussian_integral_power_closed_form():
    phi = TestFunction.gaussian(3, 0.4, 2.0)
    g = 0.8
    # int (A e^{-r^2/2s^2})^g = A^g (2 pi s^2 / g)^{3/2}
    exact = 2.0 ** g * (2 * math.pi * 0.16 / g) ** 1.5
    assert phi.integral_power(g) == pytest.approx(exact, rel=1e-10)


def test_box_integral_power():
    phi = TestFunction.box([0, 0], [2, 0.5], 4.0)
    assert phi.integral_power(0.5) == pytest.approx(2.0 * 1.0)


def test_exponential_integral_power_midpoint():
    phi = TestFunction.exponential(1, 2.0, 3.0)
    # int_R 3^g e^{-2 g |x|} dx = 3^g / g
    assert phi.integral_power(0.5) == pytest.approx(3 ** 0.5 / 0.5, rel=1e-3)


@pytest.mark.parametrize("kind", ["gaussian", "mollified"])
def test_heat_flow_matches_spectral_semigroup(kind):
    lat = Lattice(3, 48, 8.0)
    phi = (TestFunction.gaussian(3, 0.5, 1.3) if kind == "gaussian"
           else TestFunction.mollified(3, 0.6, 0.3, 1.0))
    t = 0.3
    num = semigroup_apply(phi.on_lattice(lat), t, lat)
    exact = phi.heat_flow(t, lat.points())
    assert np.max(np.abs(num - exact)) < 1e-6


def test_constant_heat_flow_is_identity():
    phi = TestFunction.constant(3, 2.5)
    assert np.all(phi.heat_flow(1.0, np.zeros((4, 3))) == 2.5)


def test_dilation():
    phi = TestFunction.gaussian(2, 0.5)
    x = np.array([[1.0, 2.0]])
    assert phi.dilated(4.0)(4 * x) == pytest.approx(phi(x))


def test_rejects_negative_amplitude():
    with pytest.raises(ValueError):
        TestFunction.gaussian(3, 1.0, -1.0)


# -- kernel ---------------------------------------------------------------------

def test_heat_kernel_values():
    assert heat_kernel(1.0, np.zeros(3)) == pytest.approx((2 * math.pi) ** -1.5)
    assert heat_kernel(-1.0, np.zeros(3)) == 0.0
    with pytest.raises(ValueError):
        heat_kernel(0.0, np.zeros(3))


@given(st.floats(0.01, 0.5), st.floats(0.01, 0.5))
@settings(max_examples=15, deadline=None)
def test_semigroup_property(s, t):
    lat = Lattice(2, 32, 6.0)
    f = TestFunction.gaussian(2, 0.4).on_lattice(lat)
    a = semigroup_apply(semigroup_apply(f, s, lat), t, lat)
    b = semigroup_apply(f, s + t, lat)
    assert np.max(np.abs(a - b)) < 1e-10


def test_semigroup_preserves_mass_and_positivity():
    lat = Lattice(3, 32, 6.0)
    f = TestFunction.mollified(3, 0.5, 0.2).on_lattice(lat)
    g = semigroup_apply(f, 0.7, lat)
    assert lat.integrate(g) == pytest.approx(lat.integrate(f), rel=1e-10)
    assert g.min() > -1e-12


# -- measures -------------------------------------------------------------------

def test_measure_masses_and_pairing():
    lat = Lattice(3, 16, 4.0)
    leb = MeasureSpec.lebesgue([-1] * 3, [1] * 3, 0.5)
    assert leb.total_mass == pytest.approx(4.0)
    assert leb.pair(np.ones(lat.shape), lat) == pytest.approx(4.0)
    at = MeasureSpec.atoms([[0.0, 0, 0], [1.0, 0, 0]], [2.0, 3.0])
    assert at.is_atomic and at.total_mass == 5.0
    phi = TestFunction.gaussian(3, 1.0)
    assert at.pair(phi) == pytest.approx(2.0 + 3.0 * math.exp(-0.5))
    assert MeasureSpec.zero(3).total_mass == 0.0


def test_poisson_points_count():
    leb = MeasureSpec.lebesgue([0.0] * 2, [1.0] * 2)
    rng = np.random.default_rng(0)
    counts = [len(leb.poisson_points(50.0, rng)) for _ in range(400)]
    assert np.mean(counts) == pytest.approx(50.0, abs=3 * math.sqrt(50 / 400))


# -- paths ----------------------------------------------------------------------

def test_simulate_path_shapes_and_reproducibility():
    p = simulate_path(np.zeros(3), 1.0, 0.01, seed=4)
    q = simulate_path(np.zeros(3), 1.0, 0.01, seed=4)
    np.testing.assert_array_equal(p.positions, q.positions)
    assert p.positions.shape[1] == 3
    e = simulate_endpoints(np.zeros(3), 2.0, 20000, seed=1)
    assert np.var(e[:, 0]) == pytest.approx(2.0, rel=0.05)


def test_hitting_infinite_horizon_against_exact():
    x = np.array([4.0, 0.0, 0.0])
    r = hitting_prob(x, np.zeros(3), 1.0, math.inf, 4000, 1e-3, seed=2)
    assert r.extra["exact"] == pytest.approx(0.25)
    assert abs(r.value - 0.25) < 4 * r.se


def test_hitting_limit_closed_form_matches_quadrature():
    x, z = np.zeros(3), np.array([1.0, 0.0, 0.0])
    assert hitting_limit(x, z, 1.0) == pytest.approx(special.erfc(1 / math.sqrt(2)))
    # the general-d quadrature path agrees with the d=3 closed form through c_ba1 = 2 pi
    from scipy import integrate

    val, _ = integrate.quad(lambda s: heat_kernel(s, z), 0, 1.0)
    assert 2 * math.pi * val == pytest.approx(hitting_limit(x, z, 1.0), rel=1e-8)


def test_hitting_start_inside_rejected():
    with pytest.raises(ValueError):
        hitting_prob(np.zeros(3), np.zeros(3), 1.0, 1.0, 10, 1e-3)


def test_occupation_columns_monotone_and_ordered():
    occ = occupation_times(np.zeros(3), 1.0, [5.0, 1.0, 20.0], 500, 1e-3, seed=3)
    assert occ.shape == (500, 3)
    assert np.all(occ[:, 1] <= occ[:, 0] + 1e-12)
    assert np.all(occ[:, 0] <= occ[:, 2] + 1e-12)
    assert np.all(occ[:, 1] <= 1.0 + 1e-12)


def test_upta_constant_and_tail():
    # |B_1| (2 pi)^{-3/2} / (1/2)
    assert upta_constant(3) == pytest.approx(0.531923, rel=1e-5)
    assert tail_bound(3, 100.0) == pytest.approx(0.531923 / 10, rel=1e-5)
    assert tail_bound(3, 100.0, 0.5) == pytest.approx(math.sqrt(0.0531923), rel=1e-5)
    r = occupation_moment(np.array([1.0, 0, 0]), 0.0, 1.0, 10.0, 5, 1e-3)
    assert r.value == 0.0


# -- energy ---------------------------------------------------------------------

def test_energy_kernel():
    assert en(np.array([0.3, 0.4, 0.0])) == 1.0
    assert en(np.array([0.5, 0, 0, 0])) == pytest.approx(math.log(2))
    assert en(np.array([2.0, 0, 0, 0])) == 0.0
    assert en(np.array([0.5, 0, 0, 0, 0])) == pytest.approx(2.0)


def test_energy_atoms():
    at3 = MeasureSpec.atoms([[0.0, 0, 0], [1.0, 0, 0]], [1.0, 2.0])
    assert energy(at3, 1.0) == pytest.approx((1 + 2 * math.exp(-1)) ** 2)
    at5 = MeasureSpec.atoms([[0.0] * 5], [1.0])
    assert energy(at5, 1.0) == INFINITE


def test_energy_d3_lebesgue_is_squared_mass():
    mu = MeasureSpec.lebesgue([-0.5] * 3, [0.5] * 3)
    phi = TestFunction.exponential(3, 1.0)
    m = phi.integral([-0.5] * 3, [0.5] * 3)
    assert energy(mu, 1.0) == pytest.approx(m * m, rel=1e-3)


def test_energy_d5_unit_box():
    # reference from a staggered brute-force double sum extrapolated in the cell size
    mu = MeasureSpec.lebesgue([0.0] * 5, [1.0] * 5)
    assert energy(mu, 1.0, n=10) == pytest.approx(0.1109, rel=0.015)
