from fractions import Fraction

import numpy as np
import pytest

from singhyp.errors import InvalidParams, UndefinedAtCut
from singhyp.maps import (LorenzModelParams, branch_preimages, doubling_map, eval_base, eval_skew,
                          leaf_diameter_decay, lorenz_base, make_affine_skew, make_lorenz_model, make_map,
                          tent_map)


def test_doubling_exact_on_fractions():
    T = doubling_map()
    assert eval_base(T, Fraction(1, 3)) == Fraction(2, 3)
    assert eval_base(T, Fraction(2, 3)) == Fraction(1, 3)
    assert eval_base(T, Fraction(1, 10)) == Fraction(1, 5)


def test_doubling_and_tent_values():
    x = np.array([0.1, 0.3, 0.7, 0.9])
    np.testing.assert_allclose(eval_base(doubling_map(), x), [0.2, 0.6, 0.4, 0.8], atol=1e-15)
    np.testing.assert_allclose(eval_base(tent_map(), x), [0.2, 0.6, 0.6, 0.2], atol=1e-15)


@pytest.mark.parametrize("T", [doubling_map(), tent_map(), lorenz_base(0.75)])
def test_undefined_at_interior_cut(T):
    with pytest.raises(UndefinedAtCut):
        eval_base(T, 0.5)


def test_preimages_map_back():
    T = lorenz_base(0.75)
    for y in (0.05, 0.4, 0.93):
        pre = branch_preimages(T, y)
        assert len(pre) == 2
        for _, x, d in pre:
            assert abs(eval_base(T, x) - y) < 1e-12
            assert d >= 2 * 0.75 - 1e-12


def test_lorenz_base_expansion_floor_and_range():
    T = lorenz_base(0.75)
    x = np.linspace(0.001, 0.999, 2001)
    x = x[np.abs(x - 0.5) > 1e-9]
    assert np.all(np.abs(T.derivative(x)) >= 1.5 - 1e-12)
    y = T.apply(x)
    assert y.min() >= 0.0 and y.max() <= 1.0


def test_lorenz_params_validation():
    with pytest.raises(InvalidParams):
        make_lorenz_model(LorenzModelParams(alpha=0.4))
    with pytest.raises(InvalidParams):
        make_lorenz_model(LorenzModelParams(kappa=0.3))
    with pytest.raises(InvalidParams):
        make_lorenz_model(LorenzModelParams(beta=0.5))


def test_affine_skew_fiber_oracle():
    F = make_affine_skew(1 / 3)
    assert eval_skew(F, (0.25, 0.9)) == pytest.approx((0.5, 0.3))
    assert eval_skew(F, (0.75, 0.9)) == pytest.approx((0.5, 0.3 + 2 / 3))


def test_leaf_contraction_rate():
    F = make_affine_skew(1 / 3)
    assert leaf_diameter_decay(F, 0.1234, 5) == pytest.approx(3.0**-5, rel=1e-12)
    G = make_lorenz_model(LorenzModelParams())
    assert leaf_diameter_decay(G, 0.1234, 5) <= 0.25**5


def test_make_map_rejects_unknown():
    with pytest.raises(InvalidParams):
        make_map("doubling", alpha=0.7)
    with pytest.raises(InvalidParams):
        make_map("henon")
    assert make_map("lorenz", alpha=0.8).base.expansion_floor == pytest.approx(1.6)
