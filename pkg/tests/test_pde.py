import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablecat.brownian import MeasureSpec, TestFunction
from stablecat.lattice import Lattice
from stablecat.medium import MediumField, default_eps_min, rasterize, sample_stable_measure, window_for
from stablecat.pde import (ScalingConfig, SpaceTimeField, constant_medium_solution, critical_index,
                           fluctuation_functional, heat_flow, limit_residual, read_field, solve_fields,
                           solve_limit_mild, solve_linearized, solve_scaled_loglaplace, variance_index,
                           write_field)
from stablecat.pde.fields import csv_slice
from stablecat.pde.limit import simpson_weights


def test_indices():
    assert critical_index(0.8, 3) == pytest.approx(2 / 9)
    assert critical_index(0.5, 5) == pytest.approx(1 / 3)
    assert variance_index(0.8, 5) == pytest.approx(0.875)
    assert variance_index(0.8, 3) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        critical_index(0.5, 3)


def test_config_validation_and_derived():
    c = ScalingConfig(3, 0.8, 1.0, 4.0, 2 / 9, 0.25, 32, 4.0, 64)
    assert c.dt == pytest.approx(0.25 / 32)
    assert c.amplitude == pytest.approx(4.0 ** (2 / 9))
    assert c.coupling == pytest.approx(4.0 ** -1)
    assert c.kappa_c == pytest.approx(2 / 9)
    assert c.resolves_medium
    assert c.with_(steps=64).dt == pytest.approx(0.25 / 64)
    assert c.digest() == ScalingConfig(3, 0.8, 1.0, 4.0, 2 / 9, 0.25, 32, 4.0, 64).digest()
    with pytest.raises(ValueError):
        ScalingConfig(2, 0.8, 1.0, 4.0, 0.0, 0.25, 32, 4.0, 64)
    with pytest.raises(ValueError):
        ScalingConfig(3, 0.6, 1.0, 4.0, 0.0, 0.25, 32, 4.0, 64)


def test_stiffness_guard():
    c = ScalingConfig(3, 0.8, 1.0, 1.0, 0.0, 1.0, 4, 2.0, 8)
    with pytest.raises(ValueError):
        solve_fields(c, np.full(c.lattice.shape, 1e3), TestFunction.constant(3, 1.0))
    ok = c.with_(stiff_limit=math.inf)
    solve_fields(ok, np.full(c.lattice.shape, 1e3), TestFunction.constant(3, 1.0))


@pytest.mark.parametrize("rho_bar,theta", [(0.5, 1.0), (3.0, 2.0), (20.0, 0.3)])
def test_constant_medium_closed_forms(rho_bar, theta):
    c = ScalingConfig(3, 0.8, 1.0, 4.0, 2 / 9, 0.5, 64, 2.0, 8, math.inf)
    out = solve_fields(c, np.full(c.lattice.shape, rho_bar), TestFunction.constant(3, theta))
    u, w, m = constant_medium_solution(c, rho_bar, theta, c.t)
    assert np.max(np.abs(out["u"].final / u - 1)) < 1e-10
    assert np.max(np.abs(out["w"].final / w - 1)) < 1e-10
    assert np.max(np.abs(out["m"].final / m - 1)) < 1e-4


def _random_raster(k, seed, L=1.0):
    lat = Lattice.for_scale(3, L, k)
    lo, hi = window_for(lat, k)
    s = sample_stable_measure((lo, hi), 0.8, default_eps_min(0.8, 3), 1.0, seed)
    return lat, rasterize(MediumField(s, k), lat)


@given(st.integers(0, 2 ** 31))
@settings(max_examples=10, deadline=None)
def test_bracket_ordering_on_random_media(seed):
    lat, raster = _random_raster(2.0, seed)
    c = ScalingConfig(3, 0.8, 1.0, 2.0, 2 / 9, 0.25, 16, lat.side, lat.n, math.inf)
    out = solve_fields(c, raster, TestFunction.gaussian(3, 0.2, 1.0))
    h, u, w, m = (out[q].final for q in ("heat", "u", "w", "m"))
    assert np.all(w <= u + 1e-14)
    assert np.all(u <= m + 1e-14)
    assert np.all(m <= h + 1e-14)
    assert np.all(w >= 0)


def test_zero_rho_gives_heat_flow():
    c = ScalingConfig(3, 0.8, 0.0, 2.0, 0.1, 0.3, 8, 2.0, 16)
    phi = TestFunction.gaussian(3, 0.3)
    out = solve_fields(c, np.full(c.lattice.shape, 5.0), phi)
    for q in ("u", "w", "m"):
        np.testing.assert_allclose(out[q].final, out["heat"].final, atol=1e-14)
    np.testing.assert_allclose(out["heat"].final, heat_flow(c, phi), atol=1e-12)


def test_convenience_wrappers_agree():
    lat, raster = _random_raster(2.0, 3)
    c = ScalingConfig(3, 0.8, 1.0, 2.0, 2 / 9, 0.25, 16, lat.side, lat.n, math.inf)
    phi = TestFunction.gaussian(3, 0.2)
    full = solve_fields(c, raster, phi)
    np.testing.assert_array_equal(solve_scaled_loglaplace(c, raster, phi).final, full["u"].final)
    w, m = solve_linearized(c, raster, phi)
    np.testing.assert_array_equal(w.final, full["w"].final)
    np.testing.assert_array_equal(m.final, full["m"].final)


def test_record_times_and_rejects_off_grid():
    c = ScalingConfig(3, 0.8, 1.0, 1.0, 0.0, 1.0, 4, 2.0, 8, math.inf)
    out = solve_fields(c, np.ones(c.lattice.shape), TestFunction.constant(3, 1.0), record=[0.0, 0.5, 1.0])
    u = out["u"]
    assert list(u.times) == [0.0, 0.5, 1.0]
    assert u.at(0.5)[0, 0, 0] == pytest.approx(1 / 1.5)
    with pytest.raises(ValueError):
        solve_fields(c, np.ones(c.lattice.shape), TestFunction.constant(3, 1.0), record=[0.3])


def test_field_io_round_trip(tmp_path):
    lat = Lattice(3, 4, 2.0)
    vals = np.random.default_rng(0).random((2,) + lat.shape)
    f = SpaceTimeField("u", lat, np.array([0.0, 1.0]), vals, "abc")
    write_field(f, tmp_path / "f.bin")
    g = read_field(tmp_path / "f.bin")
    np.testing.assert_array_equal(g.values, vals)
    assert g.quantity == "u" and g.config_hash == "abc" and g.lattice == lat
    assert len(csv_slice(f).splitlines()) == 1 + lat.n


def test_field_rejects_unknown_quantity():
    lat = Lattice(3, 2, 1.0)
    with pytest.raises(ValueError):
        SpaceTimeField("q", lat, np.array([0.0]), np.zeros((1,) + lat.shape))


# -- limit equation ---------------------------------------------------------------

def test_simpson_weights_exact_for_cubics():
    r, w = simpson_weights(0.0, 2.0, 8)
    assert np.dot(w, r ** 3) == pytest.approx(4.0, rel=1e-13)


@pytest.mark.parametrize("c,theta,gamma,t", [(1.0, 1.0, 0.8, 0.5), (2.3, 0.4, 0.6, 1.7)])
def test_constant_phi_identity(c, theta, gamma, t):
    lat = Lattice(3, 8, 2.0)
    v = solve_limit_mild(c, TestFunction.constant(3, theta), t, gamma, lat).final
    np.testing.assert_allclose(v, c * theta ** (1 + gamma) * t, rtol=1e-12)


def test_limit_residual_small():
    lat = Lattice(3, 32, 6.0)
    res = limit_residual(1.5, TestFunction.gaussian(3, 0.5), 0.3, 0.8, lat, h=1e-4)
    assert np.max(np.abs(res)) < 1e-6


def test_two_time_collapse():
    lat = Lattice(3, 16, 4.0)
    mu = MeasureSpec.lebesgue([-0.5] * 3, [0.5] * 3)
    a, b = TestFunction.gaussian(3, 0.4), TestFunction.gaussian(3, 0.6, 0.5)
    two = fluctuation_functional(mu, [(0.3, a), (0.3, b)], 1.2, 0.8, lat)
    one = fluctuation_functional(mu, [(0.3, a.on_lattice(lat) + b.on_lattice(lat))], 1.2, 0.8, lat)
    assert two == pytest.approx(one, rel=1e-12)


def test_functional_single_time_matches_mild_solution():
    lat = Lattice(3, 16, 4.0)
    mu = MeasureSpec.lebesgue([-0.5] * 3, [0.5] * 3)
    phi = TestFunction.gaussian(3, 0.4)
    f = fluctuation_functional(mu, [(0.4, phi)], 2.0, 0.8, lat)
    v = solve_limit_mild(2.0, phi, 0.4, 0.8, lat)
    assert f == pytest.approx(v.pair(mu), rel=1e-12)


def test_functional_linear_in_c_and_trivial_cases():
    lat = Lattice(3, 8, 4.0)
    mu = MeasureSpec.lebesgue([-0.5] * 3, [0.5] * 3)
    phi = TestFunction.gaussian(3, 0.5)
    f1 = fluctuation_functional(mu, [(0.2, phi)], 1.0, 0.8, lat)
    assert fluctuation_functional(mu, [(0.2, phi)], 3.0, 0.8, lat) == pytest.approx(3 * f1)
    assert fluctuation_functional(mu, [], 3.0, 0.8, lat) == 0.0
    assert fluctuation_functional(mu, [(0.0, phi)], 3.0, 0.8, lat) == 0.0
    with pytest.raises(ValueError):
        fluctuation_functional(mu, [(0.3, phi), (0.1, phi)], 1.0, 0.8, lat)
