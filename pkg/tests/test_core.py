import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablecat.estimator import CSV_FIELDS, EstimatorResult, combined_se, results_to_csv
from stablecat.lattice import Lattice
from stablecat.seeding import child_rng, child_seed


def test_child_seed_deterministic_and_distinct():
    assert child_seed(7, 1, 2) == child_seed(7, 1, 2)
    assert len({child_seed(7, i) for i in range(100)}) == 100
    assert child_seed(7, 1) != child_seed(8, 1)
    a = child_rng(3, 0).random(5)
    b = child_rng(3, 0).random(5)
    np.testing.assert_array_equal(a, b)


def test_estimator_from_samples():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    r = EstimatorResult.from_samples(x, seed=5)
    assert r.value == 2.5
    assert r.se == pytest.approx(np.std(x, ddof=1) / 2)
    assert r.n == 4 and r.seed == 5
    assert r.within(2.5 + 2 * r.se) and not r.within(2.5 + 4 * r.se)
    s = r.scaled(-2.0)
    assert s.value == -5.0 and s.se == pytest.approx(2 * r.se)
    assert combined_se(r, r) == pytest.approx(math.sqrt(2) * r.se)


def test_results_csv_has_no_wall_time():
    r = EstimatorResult(1.0, 0.1, 10, 3, 123.4)
    text = results_to_csv({"a": r})
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    assert "123.4" not in text


def test_lattice_geometry():
    lat = Lattice(3, 16, 4.0)
    assert lat.spacing == 0.25
    assert lat.shape == (16, 16, 16)
    assert lat.cell_volume == 0.25 ** 3
    assert lat.origin == -2.0
    pts = lat.points()
    assert pts.shape == (16, 16, 16, 3)
    assert lat.integrate(np.ones(lat.shape)) == pytest.approx(64.0)


def test_lattice_for_scale_resolves_medium():
    for k in (1, 4, 16):
        lat = Lattice.for_scale(3, 4.0, k)
        assert lat.spacing <= 1 / (4 * k) + 1e-12
        assert lat.n % 2 == 0
        assert lat.max_spacing_for(k)
    assert not Lattice(3, 8, 4.0).max_spacing_for(4)


def test_lattice_interpolation_periodic():
    lat = Lattice(1, 32, 2 * math.pi, origin=0.0)
    f = np.sin(lat.axis)
    x = np.array([[0.3], [2 * math.pi + 0.3]])
    v = lat.interpolate(f, x)
    assert v[0] == pytest.approx(v[1])
    assert v[0] == pytest.approx(math.sin(0.3), abs=5e-3)


@given(st.floats(0.5, 8.0), st.integers(1, 4))
@settings(max_examples=25, deadline=None)
def test_lattice_integral_of_constant(side, d):
    lat = Lattice(d, 4, side)
    assert lat.integrate(np.full(lat.shape, 2.0)) == pytest.approx(2.0 * side ** d)
