from fractions import Fraction

import numpy as np
import pytest

from singhyp.errors import InvalidParams, NotHit, OnStableManifold
from singhyp.flow import (FlowPoint, SingularityParams, constant_roof, flow_evolve, flow_hitting_time,
                          flow_loglaw, linear_flow, lorenz_suspension, return_time_integral, singular_return,
                          singular_return_time)
from singhyp.maps import doubling_map, make_affine_skew

P = SingularityParams(1.0, -2.0, -0.75)


def test_params_ordering():
    assert P.alpha == 0.75 and P.beta == 2.0
    with pytest.raises(InvalidParams):
        SingularityParams(0.5, -2.0, -0.75)


def test_linear_flow_group_property():
    p0 = np.array([0.3, -0.2, 0.9])
    a = linear_flow(P, p0, 1.7)
    b = linear_flow(P, linear_flow(P, p0, 0.4), 1.3)
    np.testing.assert_allclose(a, b, rtol=1e-13)


def test_singular_return_closed_form():
    (y, z), side = singular_return(P, (-0.25, 0.5))
    assert side == -1
    assert y == pytest.approx(0.5 * 0.25**2)
    assert z == pytest.approx(0.25**0.75)
    # leaving point of the linear flow at the passage time
    t = singular_return_time(P, 0.25)
    out = linear_flow(P, np.array([0.25, 0.5, 1.0]), t)
    assert out[0] == pytest.approx(1.0)
    assert out[1] == pytest.approx(y) and out[2] == pytest.approx(z)


def test_stable_manifold():
    with pytest.raises(OnStableManifold):
        singular_return(P, (0.0, 0.3))


def test_return_time_integral():
    q, closed = return_time_integral(P, 0.5)
    assert q == pytest.approx(closed, abs=1e-10)
    assert closed == pytest.approx(2 * 0.5 * (1 - np.log(0.5)))


def test_flow_evolve_constant_roof_exact():
    S = constant_roof(doubling_map(), 1.0)
    p = flow_evolve(S, FlowPoint(Fraction(1, 10), 0.0), 3.5)
    assert p.base_point == Fraction(4, 5)
    assert p.height == pytest.approx(0.5)


def test_flow_evolve_composes():
    S = constant_roof(doubling_map(), 0.7)
    p = FlowPoint(Fraction(1, 7), 0.1)
    a = flow_evolve(S, p, 2.3)
    b = flow_evolve(S, flow_evolve(S, p, 1.0), 1.3)
    assert a.base_point == b.base_point
    assert a.height == pytest.approx(b.height)


def test_flow_hitting_time():
    S = constant_roof(doubling_map(), 1.0)
    target = FlowPoint(Fraction(1, 3), 0.5)
    assert flow_hitting_time(S, target, target, 0.01) == 0
    # 1/3 -> 2/3 -> 1/3: enters the height window (0.4, 0.6) over 1/3 two roofs later
    assert flow_hitting_time(S, FlowPoint(Fraction(1, 3), 0.9), target, 0.1) == pytest.approx(1.1 + 0.4)
    with pytest.raises(NotHit):
        flow_hitting_time(S, FlowPoint(Fraction(1, 10), 0.0), target, 0.01, horizon=500)


def test_lorenz_suspension_roof_lower_bound():
    S = lorenz_suspension(P, check_orbit=2**12)
    x = np.linspace(0.01, 0.99, 99)
    vals = S.roof_xy(x, np.full_like(x, 0.5))
    assert np.all(vals >= S.tau0)
    assert vals[np.argmin(np.abs(x - 0.5))] > vals[0]


def test_flow_loglaw_affine_matches_section():
    S = constant_roof(make_affine_skew(1 / 3), 1.0)
    rep = flow_loglaw(S, FlowPoint(np.array([0.3, 0.1]), 0.5), 2.0 ** -np.arange(3, 8), samples=100,
                      seed=0, burn_in=100)
    assert abs(rep.slope_flow - rep.slope_section) < 0.15


def test_flow_loglaw_rejects_high_target():
    S = constant_roof(doubling_map(), 1.0)
    with pytest.raises(InvalidParams):
        flow_loglaw(S, FlowPoint(0.3, 0.99), 2.0 ** -np.arange(3, 8), samples=100)
