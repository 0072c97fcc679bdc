from fractions import Fraction

import numpy as np
import pytest

from singhyp.errors import NotHit, SparseBall
from singhyp.ergodic import (birkhoff_average, correlation_series, dimension_formula, hitting_time,
                             local_dimension, loglaw_exponent, sample_orbit)
from singhyp.maps import LorenzModelParams, doubling_map, make_affine_skew, make_lorenz_model

AFFINE_DIM = 1 + np.log(2) / np.log(3)


def test_hitting_time_exact():
    T = doubling_map()
    # 1/3 -> 2/3 -> 1/3
    assert hitting_time(T, Fraction(1, 3), Fraction(1, 3), Fraction(1, 100)) == 2
    with pytest.raises(NotHit):
        hitting_time(T, Fraction(1, 10), Fraction(1, 3), Fraction(1, 100), horizon=1000)


def test_orbit_shape_and_determinism():
    F = make_affine_skew()
    a = sample_orbit(F, seed=3, burn_in=10, length=7, chains=600)
    b = sample_orbit(F, seed=3, burn_in=10, length=7, chains=600, workers=3)
    assert a.points.shape == (600, 7, 2)
    np.testing.assert_array_equal(a.points, b.points)


def test_doubling_orbit_is_not_trapped():
    orbit = sample_orbit(doubling_map(), seed=0, burn_in=200, length=200, chains=64)
    assert abs(orbit.xs.mean() - 0.5) < 0.02


def test_dimension_formula_affine():
    F = make_affine_skew(1 / 3)
    orbit = sample_orbit(F, seed=0, burn_in=10, length=10, chains=64)
    assert dimension_formula(F, orbit) == pytest.approx(AFFINE_DIM, abs=1e-12)


def test_dimension_formula_lorenz_in_range():
    F = make_lorenz_model(LorenzModelParams())
    orbit = sample_orbit(F, seed=0, burn_in=500, length=100, chains=512)
    assert 1.0 < dimension_formula(F, orbit) < 2.0


def test_local_dimension_affine():
    F = make_affine_skew(1 / 3)
    orbit = sample_orbit(F, seed=1, burn_in=100, length=500, chains=1024)
    rep = local_dimension(orbit, orbit.points[5, -1], 2.0 ** -np.arange(3, 9))
    assert abs(rep.slope - AFFINE_DIM) < 0.2


def test_local_dimension_sparse():
    orbit = sample_orbit(doubling_map(), seed=1, burn_in=10, length=10, chains=10)
    with pytest.raises(SparseBall):
        local_dimension(orbit, 0.5, [0.1, 0.05, 0.02, 0.01, 0.005])


def test_correlations_decay_for_doubling():
    orbit = sample_orbit(doubling_map(), seed=2, burn_in=100, length=2000, chains=512)
    ds = correlation_series(lambda x: x, lambda x: x, orbit, 12)
    # Cov(x, T^n x) = 2^-n / 12 for the doubling map
    assert ds.correlations[0] == pytest.approx(1 / 12, rel=0.02)
    assert ds.correlations[1] == pytest.approx(1 / 24, rel=0.05)


def test_loglaw_doubling():
    rep = loglaw_exponent(doubling_map(), 0.37, 2.0 ** -np.arange(3, 9), samples=200, seed=0, burn_in=50)
    assert abs(rep.slope - 1.0) < 0.2
    assert rep.dropped == []


def test_birkhoff_average_constant():
    avg = birkhoff_average(np.full(1000, 2.5))
    assert avg.mean == 2.5 and avg.drift == 0.0 and avg.converged


def test_reports_carry_assumption_caveats():
    rep = loglaw_exponent(doubling_map(), 0.37, 2.0 ** -np.arange(3, 8), samples=100, seed=0, burn_in=50)
    assert any("injectiv" in c for c in rep.summary()["caveats"])
    F = make_affine_skew(1 / 3)
    orbit = sample_orbit(F, seed=1, burn_in=100, length=200, chains=512)
    dim = local_dimension(orbit, orbit.points[3, -1], 2.0 ** -np.arange(3, 8))
    assert "caveats" not in dim.summary()
    dim.formula_value = dimension_formula(F, orbit)
    assert any("generat" in c for c in dim.summary()["caveats"])
