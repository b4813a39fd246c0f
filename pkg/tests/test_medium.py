import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablecat.brownian import TestFunction, ball_volume
from stablecat.lattice import Lattice
from stablecat.medium import (MediumField, c_gamma, default_eps_min, empirical_loglaplace, field_at, rasterize,
                              read_sample, sample_stable_measure, scaling_check, truncation_bias_bound,
                              weighted_identity, window_for, write_sample)
from stablecat.medium.sampler import expected_count, residual_std


@pytest.mark.parametrize("gamma,value", [(0.5, 0.28209479), (0.8, 0.17426)])
def test_c_gamma(gamma, value):
    # gamma / Gamma(1 - gamma)
    assert c_gamma(gamma) == pytest.approx(value, rel=1e-4)


def test_truncation_formulas():
    assert expected_count(0.01, 0.5, 1.0) == pytest.approx(5.641896, rel=1e-6)
    assert truncation_bias_bound(1e-4, 0.5, 1.0) == pytest.approx(5.641896e-3, rel=1e-6)
    assert residual_std(0.01, 0.5, 2.0) > residual_std(0.001, 0.5, 2.0)


@pytest.mark.parametrize("gamma,d,value", [(0.8, 3, 0.013887), (0.5, 5, 0.18186)])
def test_default_eps_min(gamma, d, value):
    eps = default_eps_min(gamma, d)
    assert eps == pytest.approx(value, rel=1e-3)
    # residual std of Gamma^1 equals 1% of the stable scale |B_1|^{1/gamma}
    vb = ball_volume(d)
    assert residual_std(eps, gamma, vb) == pytest.approx(1e-2 * vb ** (1 / gamma), rel=1e-9)


def test_sample_invariants():
    s = sample_stable_measure(([-2.0] * 3, [2.0] * 3), 0.8, 0.05, 1.0, seed=11)
    assert len(s) > 0
    assert np.all(s.weights >= 0.05)
    assert np.all(np.diff(s.weights) <= 0)
    assert np.all(s.locations >= s.region_lo) and np.all(s.locations <= s.region_hi)
    assert s.region_volume == pytest.approx(6.0 ** 3)
    assert s.drift == pytest.approx(truncation_bias_bound(0.05, 0.8, 1.0))


@given(st.integers(0, 2 ** 32), st.floats(0.02, 0.5), st.floats(1.5, 10.0))
@settings(max_examples=20, deadline=None)
def test_lowering_truncation_only_appends(seed, eps, factor):
    w = ([0.0, 0.0], [2.0, 2.0])
    coarse = sample_stable_measure(w, 0.6, eps * factor, 0.5, seed)
    fine = sample_stable_measure(w, 0.6, eps, 0.5, seed)
    n = len(coarse)
    np.testing.assert_array_equal(fine.weights[:n], coarse.weights)
    np.testing.assert_array_equal(fine.locations[:n], coarse.locations)
    t = fine.truncated(eps * factor)
    np.testing.assert_array_equal(t.weights, coarse.weights)


def test_atom_count_is_poisson_mean():
    eps, g = 0.1, 0.5
    counts = [len(sample_stable_measure(([0.0], [1.0]), g, eps, 0.0, i)) for i in range(3000)]
    mean = expected_count(eps, g, 1.0)
    assert np.mean(counts) == pytest.approx(mean, abs=4 * math.sqrt(mean / 3000))


def test_dilation_maps_law_parameters():
    s = sample_stable_measure(([-1.0] * 2, [1.0] * 2), 0.5, 0.1, 1.0, seed=2)
    f = 0.5
    t = s.dilated(f)
    np.testing.assert_allclose(t.locations, f * s.locations)
    np.testing.assert_allclose(t.weights, s.weights * f ** 4)
    assert t.eps_min == pytest.approx(0.1 * f ** 4)
    assert t.pad == 0.5
    # same atoms, so the expected count in the dilated region is unchanged
    assert expected_count(t.eps_min, 0.5, t.region_volume) == pytest.approx(
        expected_count(s.eps_min, 0.5, s.region_volume))


def test_dilated_sample_is_stable_in_law():
    # <Gamma, phi> for the dilated sample matches exp(-int phi^gamma)
    g, d = 0.5, 1
    phi = TestFunction.box([-0.4], [0.4], 1.0)
    samples = [sample_stable_measure(([-2.0], [2.0]), g, 1e-6, 0.0, 100 + i).dilated(0.5) for i in range(3000)]
    r = empirical_loglaplace(samples, phi)
    assert abs(r.value - r.extra["analytic"]) < 4 * r.se


def test_io_round_trip(tmp_path):
    s = sample_stable_measure(([-1.0] * 3, [1.0] * 3), 0.8, 0.05, 1.0, seed=5)
    write_sample(s, tmp_path / "m.bin")
    r = read_sample(tmp_path / "m.bin")
    np.testing.assert_array_equal(r.locations, s.locations)
    np.testing.assert_array_equal(r.weights, s.weights)
    assert (r.lo, r.hi, r.pad, r.gamma, r.eps_min, r.seed, r.drift) == (
        s.lo, s.hi, s.pad, s.gamma, s.eps_min, s.seed, s.drift)


def test_io_rejects_foreign_file(tmp_path):
    (tmp_path / "x.bin").write_bytes(b"not a medium")
    with pytest.raises(ValueError):
        read_sample(tmp_path / "x.bin")


def _brute(sample, y):
    d2 = np.sum((sample.locations - y) ** 2, axis=1)
    return float(np.sum(sample.weights[d2 <= 1.0])) + sample.drift * ball_volume(sample.d)


def test_field_matches_brute_force():
    s = sample_stable_measure(([-3.0] * 3, [3.0] * 3), 0.8, 0.02, 1.0, seed=9)
    fld = MediumField(s, 2.0)
    rng = np.random.default_rng(0)
    xs = rng.uniform(-1.5, 1.5, size=(50, 3))
    got = fld(xs)
    want = [_brute(s, 2.0 * x) for x in xs]
    np.testing.assert_allclose(got, want, rtol=1e-12)
    assert field_at(fld, xs[0]) == pytest.approx(want[0])


def test_raster_matches_pointwise():
    lat = Lattice.for_scale(3, 1.0, 2.0)
    lo, hi = window_for(lat, 2.0)
    s = sample_stable_measure((lo, hi), 0.8, 0.02, 1.0, seed=1)
    fld = MediumField(s, 2.0)
    r = rasterize(fld, lat)
    np.testing.assert_allclose(r.ravel(), fld(lat.points().reshape(-1, 3)), rtol=1e-12)


def test_field_requires_pad_and_window():
    s = sample_stable_measure(([-1.0] * 3, [1.0] * 3), 0.8, 0.05, 0.5, seed=1)
    with pytest.raises(ValueError):
        MediumField(s, 1.0)
    s = sample_stable_measure(([-1.0] * 3, [1.0] * 3), 0.8, 0.05, 1.0, seed=1)
    with pytest.raises(ValueError):
        MediumField(s, 1.0).catalyst(np.array([[5.0, 0.0, 0.0]]))


def test_weighted_identity_small_run():
    g, d = 0.5, 1
    samples = [sample_stable_measure(([-1.5], [1.5]), g, 1e-6, 0.0, i) for i in range(3000)]
    r = weighted_identity(samples, TestFunction.gaussian(1, 0.3), TestFunction.box([-1.5], [1.5], 0.5))
    assert abs(r.value - r.extra["analytic"]) < 4 * r.se


def test_scaling_check_and_negative_control():
    g, d, k, n = 0.5, 1, 2.0, 1000
    small = [sample_stable_measure(([-1.0], [1.0]), g, 1e-5, 0.0, i) for i in range(n)]
    large = [sample_stable_measure(([-k], [k]), g, 1e-5 * k ** (d / g), 0.0, 10_000 + i) for i in range(n)]
    phi = TestFunction.gaussian(1, 0.25)
    assert scaling_check(small, large, k, phi).passed
    assert not scaling_check(small, large, k, phi, exponent=d / g + 1.0).passed
