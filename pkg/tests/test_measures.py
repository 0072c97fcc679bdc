import numpy as np
import pytest

from singhyp.errors import GridMismatch, MassMismatch
from singhyp.maps import doubling_map, make_affine_skew
from singhyp.measures import (DensityGrid, EmpiricalMeasure1D, EmpiricalMeasure2D, delta, disintegrate,
                              prod_inequality_check, project_pi, pushforward, variation_distance, w1_distance)


def test_w1_deltas():
    assert w1_distance(delta(0.2), delta(0.7)) == pytest.approx(0.5)


def test_w1_uniform_vs_half_point():
    # ∫ |x - 1/2| dx over [0, 1] = 1/4
    assert w1_distance(DensityGrid.uniform(64), delta(0.5)) == pytest.approx(0.25, abs=1e-12)


def test_w1_unequal_sizes_exact():
    a = EmpiricalMeasure1D(np.array([0.0, 1.0]))
    b = EmpiricalMeasure1D(np.array([0.0, 0.5, 1.0]))
    # CDFs differ by 1/6 on [0, 0.5) and 1/6 on [0.5, 1)
    assert w1_distance(a, b) == pytest.approx(1 / 6, abs=1e-14)


def test_w1_translation():
    x = np.random.default_rng(0).uniform(0, 0.5, 100)
    assert w1_distance(EmpiricalMeasure1D(x), EmpiricalMeasure1D(x + 0.25)) == pytest.approx(0.25)


def test_mass_mismatch():
    with pytest.raises(MassMismatch):
        w1_distance(EmpiricalMeasure1D(np.array([0.1]), 1.0), EmpiricalMeasure1D(np.array([0.1]), 2.0))


def test_samples_outside_interval_rejected():
    with pytest.raises(ValueError):
        EmpiricalMeasure1D(np.array([1.5]))


def test_variation_distance_needs_grid():
    a = EmpiricalMeasure1D(np.array([0.1, 0.2]))
    with pytest.raises(GridMismatch):
        variation_distance(a, a)
    assert variation_distance(DensityGrid.uniform(4), DensityGrid(np.array([2.0, 0.0, 2.0, 0.0]))) == pytest.approx(1.0)


def test_density_grid_coarsen_and_cdf():
    g = DensityGrid(np.array([1.0, 3.0, 0.0, 0.0]))
    np.testing.assert_allclose(g.coarsen(2).values, [2.0, 0.0])
    assert g.cdf(0.5) == pytest.approx(1.0)
    with pytest.raises(GridMismatch):
        g.coarsen(3)


def test_project_pi_polynomial():
    pi = project_pi(lambda x, y: x * y**2)
    assert pi(0.6) == pytest.approx(0.2, abs=1e-14)


def test_disintegrate_marginal_and_leaves(rng):
    pts = rng.random((1000, 2))
    d = disintegrate(EmpiricalMeasure2D(pts), 10)
    assert d.marginal.total_mass == pytest.approx(1.0)
    assert sum(len(c.ys) for c in d.conditionals) == 1000


def test_pushforward_grid_preserves_lebesgue():
    g, _ = pushforward(doubling_map(), DensityGrid.uniform(128), n=3)
    np.testing.assert_allclose(g.values, 1.0, atol=1e-12)


def test_prod_inequality_holds(rng):
    F = make_affine_skew(1 / 3)
    a = EmpiricalMeasure2D(rng.random((2000, 2)))
    b, _ = pushforward(F, a, n=2, rng=rng)
    rep = prod_inequality_check(a, b, lambda x, y: np.sin(3 * x) * y, bin_count=16)
    assert rep.holds
