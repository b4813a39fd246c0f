import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablecat.brownian import MeasureSpec, TestFunction
from stablecat.lattice import Lattice
from stablecat.reactant import (ParticleSystem, PopulationExplosion, ReactantConfig, initial_transform,
                                laplace_samples, offspring_law, rescale, simulate)
from stablecat.harness.validate import reactant_homogeneous, reactant_quenched


def test_offspring_law_is_critical():
    for rate, dt in [(0.0, 0.1), (1.0, 0.01), (50.0, 0.1)]:
        p = offspring_law(rate, dt)
        n = np.arange(p.size)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.dot(n, p) == pytest.approx(1.0, abs=1e-10)
        # variance of critical binary branching over time dt at rate r is r dt
        assert np.dot(n * n, p) - 1 == pytest.approx(rate * dt, rel=1e-8, abs=1e-12)


def test_no_branching_keeps_count():
    mu = MeasureSpec.lebesgue([0.0] * 3, [1.0] * 3)
    x = simulate(mu, 1.0, ReactantConfig(0.0, 0.01, 0.1), medium=5.0, seed=2)
    y = simulate(mu, 0.0, ReactantConfig(0.0, 0.01, 0.1), medium=5.0, seed=2)
    assert x.count == y.count
    assert x.total_mass == pytest.approx(0.01 * x.count)


def test_zero_test_function_gives_one():
    mu = MeasureSpec.lebesgue([0.0] * 3, [1.0] * 3)
    x = laplace_samples(mu, TestFunction.constant(3, 0.0), 0.5, ReactantConfig(1.0, 0.05, 0.05), 20,
                        medium=2.0)
    np.testing.assert_array_equal(np.exp(-x), 1.0)


def test_population_cap():
    mu = MeasureSpec.lebesgue([0.0] * 3, [1.0] * 3)
    with pytest.raises(PopulationExplosion):
        simulate(mu, 2.0, ReactantConfig(1.0, 0.001, 0.01, cap=1100), medium=50.0, seed=1)


def test_expected_mass_is_conserved():
    mu = MeasureSpec.lebesgue([0.0] * 3, [1.0] * 3)
    cfg = ReactantConfig(1.0, 0.02, 0.05)
    masses = np.array([simulate(mu, 1.0, cfg, medium=4.0, seed=s).total_mass for s in range(400)])
    assert abs(masses.mean() - 1.0) < 3 * masses.std(ddof=1) / math.sqrt(400)


def test_mean_measure_is_heat_flow_without_branching():
    mu = MeasureSpec.atoms([[0.0, 0.0, 0.0]], [1.0])
    cfg = ReactantConfig(0.0, 0.001, 0.05)
    x = simulate(mu, 0.5, cfg, seed=3)
    # a Poisson cloud of 1000 particles at 0 spread with variance t per axis
    assert np.var(x.positions[:, 0]) == pytest.approx(0.5, rel=0.15)


def test_initial_transform():
    assert initial_transform(2.0, 1e-9) == pytest.approx(2.0, rel=1e-8)
    assert initial_transform(2.0, 0.5) == pytest.approx((1 - math.exp(-1.0)) / 0.5)


def test_rescale_maps():
    p = ParticleSystem(np.array([[2.0, 4.0, 6.0]]), 1.0, 4.0)
    q = rescale(p, 2.0)
    np.testing.assert_allclose(q.positions, [[1.0, 2.0, 3.0]])
    assert q.mass == pytest.approx(1 / 8) and q.time == pytest.approx(1.0)
    assert rescale(p, 1.0).positions.tolist() == p.positions.tolist()
    with pytest.raises(ValueError):
        rescale(p, 0.0)


@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0))
@settings(max_examples=25, deadline=None)
def test_rescale_composition(k1, k2):
    p = ParticleSystem(np.array([[1.0, -2.0, 0.5], [0.0, 3.0, 1.0]]), 0.7, 2.0)
    a = rescale(p, k1 * k2)
    b = rescale(rescale(p, k1), k2)
    np.testing.assert_allclose(a.positions, b.positions, rtol=1e-12)
    assert a.mass == pytest.approx(b.mass, rel=1e-12)
    assert a.time == pytest.approx(b.time, rel=1e-12)
    assert a.total_mass == pytest.approx(p.total_mass * (k1 * k2) ** -3, rel=1e-12)


def test_snapshot_csv():
    p = ParticleSystem(np.array([[1.0, 2.0]]), 0.5, 0.0)
    assert p.to_csv() == "x1,x2,mass\n1.0,2.0,0.5\n"


def test_torus_wrapping_with_raster():
    lat = Lattice(3, 8, 2.0)
    mu = MeasureSpec.lebesgue([-1.0] * 3, [1.0] * 3)
    x = simulate(mu, 3.0, ReactantConfig(1.0, 0.05, 0.1), np.ones(lat.shape), lat, seed=1)
    assert np.all(x.positions >= -1.0) and np.all(x.positions < 1.0)
    with pytest.raises(ValueError):
        simulate(mu, 1.0, ReactantConfig(1.0, 0.05, 0.1), np.ones((4, 4, 4)), lat)


def test_homogeneous_oracle_small_run():
    c = reactant_homogeneous(runs=1000, seed=11)
    assert c.passed(3.0)


@pytest.mark.slow
def test_quenched_oracle_one_medium():
    c = reactant_quenched(5, runs=1000, seed=2)
    assert c.passed(3.0)
