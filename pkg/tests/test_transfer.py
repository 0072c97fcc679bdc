import numpy as np
import pytest

from singhyp.errors import DegenerateSeries, NoConvergence
from singhyp.maps import doubling_map, lorenz_base, tent_map
from singhyp.measures import DensityGrid
from singhyp.transfer import (UlamOperator, convergence_rate, fit_log_linear, invariant_density,
                              lasota_yorke_probe, pf_apply, ulam_matrix)


def test_pf_preserves_lebesgue_for_full_branches():
    for T in (doubling_map(), tent_map()):
        x = np.linspace(0.01, 0.99, 50)
        np.testing.assert_allclose(pf_apply(T, lambda y: np.ones_like(y))(x), 1.0, atol=1e-15)


def test_pf_annihilates_cos():
    x = np.linspace(0, 1, 101)
    assert np.max(np.abs(pf_apply(doubling_map(), lambda y: np.cos(2 * np.pi * y))(x))) <= 1e-12


def test_pf_of_x_on_doubling():
    # P x = (x/2 + (x+1)/2) / 2 = x/2 + 1/4
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(pf_apply(doubling_map(), lambda y: y)(x), x / 2 + 0.25, atol=1e-15)


def test_ulam_row_stochastic():
    op = ulam_matrix(lorenz_base(0.75), 256)
    np.testing.assert_allclose(np.asarray(op.matrix.sum(axis=1)).ravel(), 1.0, atol=1e-12)


def test_ulam_doubling_density_is_one():
    rep = invariant_density(ulam_matrix(doubling_map(), 1024), T=doubling_map())
    assert np.sum(np.abs(rep.invariant_density.values - 1.0)) / 1024 <= 1e-10
    assert rep.leading_eigenvalue == pytest.approx(1.0, abs=1e-12)
    assert rep.second_modulus < 0.6


def test_triplet_roundtrip():
    op = ulam_matrix(tent_map(), 16)
    back = UlamOperator.from_triplets(op.to_triplets(), 16)
    assert abs(back.matrix - op.matrix).max() == 0


def test_no_convergence_raised():
    with pytest.raises(NoConvergence):
        invariant_density(ulam_matrix(lorenz_base(0.75), 512), tol=1e-15, max_iter=2)


def test_doubling_rate():
    fit = convergence_rate(doubling_map(), np.exp, lambda x: x, 30, bins=1024)
    assert 0.45 < fit.rate < 0.55


def test_degenerate_series():
    # Lebesgue is already invariant, so every term vanishes
    with pytest.raises(DegenerateSeries):
        convergence_rate(doubling_map(), np.ones_like, lambda x: x, 5, bins=64)


def test_fit_log_linear_exact_geometric():
    s = 0.5 ** np.arange(20)
    slope, r2, window = fit_log_linear(s, floor=1e-4)
    assert np.exp(slope) == pytest.approx(0.5)
    assert r2 == pytest.approx(1.0)
    assert window[-1] == 13


def test_ly_probe_doubling():
    probe = lasota_yorke_probe(doubling_map(), p=1.0, trials=10, seed=0)
    assert probe.feasible and probe.beta <= 0.6


def test_density_grid_pf_mass():
    g = pf_apply(lorenz_base(0.75), DensityGrid.uniform(512))
    assert g.total_mass == pytest.approx(1.0, abs=1e-2)
