import numpy as np
import pytest

from singhyp.errors import InvalidEpsilon
from singhyp.norms import (Observable1D, Observable2D, compare_variations, norm_p_r, osc_p_profile,
                           universal_p_variation, var_p_on, var_square, vertical_lip_norm)


def test_total_variation_of_monotone():
    assert universal_p_variation(Observable1D(lambda x: x**2, ()), p=1).value == pytest.approx(1.0)


def test_variation_of_tent_shape():
    h = Observable1D(lambda x: 1 - np.abs(2 * x - 1), (0.5,))
    rep = universal_p_variation(h, p=1)
    assert rep.value == pytest.approx(2.0, abs=1e-9)
    assert not rep.is_lower_bound
    # for p = 2 the best subdivision is the single jump 0 -> 1 -> 0
    assert universal_p_variation(h, p=2).value == pytest.approx(np.sqrt(2.0), abs=1e-9)


def test_variation_of_jump():
    h = Observable1D(lambda x: np.where(x < 0.3, 0.0, 1.0), (0.3,))
    assert universal_p_variation(h, p=3).value == pytest.approx(1.0, abs=1e-9)


def test_untagged_is_lower_bound():
    rep = universal_p_variation(lambda x: np.sin(6 * np.pi * x), p=1, grid_size=2001)
    assert rep.is_lower_bound
    # three full periods, variation 4 each
    assert rep.value <= 12.0 + 1e-12
    assert rep.value == pytest.approx(12.0, abs=1e-3)


def test_var_p_on_fixed_subdivision():
    assert var_p_on(lambda x: x, [0, 0.5, 1], 2) == pytest.approx(np.sqrt(0.5))


def test_var_square_lipschitz_bound():
    f = Observable2D(lambda x, y: np.sin(2 * x) * y)
    assert var_square(f, 257).value <= 2.0 + 1e-12
    # x-variation at y = 1 is sin(2) - 0 plus the descent after π/4
    assert var_square(f, 2049).value == pytest.approx(2 - np.sin(2), abs=1e-5)


def test_vertical_lip_norm():
    assert vertical_lip_norm(lambda x, y: x * y, 129) == pytest.approx(2.0, abs=1e-12)


def test_osc_of_linear():
    # oscillation of x on B_eps(x) is 2 eps away from the edges
    prof = osc_p_profile(lambda x: x, [1 / 64], p=1, samples=4096)
    assert prof[0] == pytest.approx(2 / 64, rel=0.02)


def test_invalid_epsilon():
    with pytest.raises(InvalidEpsilon):
        osc_p_profile(lambda x: x, [0.75])


def test_norm_p_r_is_sup_plus_lp():
    res = norm_p_r(lambda x: x, p=1, r=1.0)
    assert res.lp_norm == pytest.approx(0.5, abs=1e-6)
    assert res.value == pytest.approx(res.variation + res.lp_norm)
    assert res.variation <= 2.0 + 1e-9


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_compare_variations_chain(p):
    h = Observable1D(lambda x: np.where(x < 0.4, x, 1.5 - x), (0.4,))
    chain = compare_variations(h, p=p)
    assert chain.certified and chain.holds
