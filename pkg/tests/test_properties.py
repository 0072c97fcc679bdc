import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from singhyp.maps import doubling_map, lorenz_base
from singhyp.measures import EmpiricalMeasure1D, w1_distance
from singhyp.norms import Observable1D, universal_p_variation
from singhyp.transfer import pf_apply

unit = st.floats(0.0, 1.0, allow_nan=False)
samples = arrays(np.float64, st.integers(1, 40), elements=unit)


@settings(max_examples=100, deadline=None)
@given(samples, samples, samples)
def test_w1_metric_axioms(a, b, c):
    A, B, C = (EmpiricalMeasure1D(v) for v in (a, b, c))
    assert w1_distance(A, B) == w1_distance(B, A)
    assert w1_distance(A, A) == 0.0
    assert w1_distance(A, C) <= w1_distance(A, B) + w1_distance(B, C) + 1e-12
    assert 0.0 <= w1_distance(A, B) <= 1.0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_w1_deltas_is_distance(a, b):
    d = w1_distance(EmpiricalMeasure1D(np.array([a])), EmpiricalMeasure1D(np.array([b])))
    assert abs(d - abs(a - b)) <= 1e-15


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_pf_integral_preserved(a, b):
    f = lambda x: np.exp(a * x) + b * x**2  # noqa: E731
    x = (np.arange(4096) + 0.5) / 4096
    for T in (doubling_map(), lorenz_base(0.75)):
        assert abs(np.mean(pf_apply(T, f)(x)) - np.mean(f(x))) <= 2e-3 * (1 + np.mean(np.abs(f(x))))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.05, 0.95), min_size=1, max_size=6, unique=True), st.sampled_from([1.0, 2.0, 3.0]))
def test_variation_monotone_in_p(cuts, p):
    cuts = sorted(cuts)
    h = Observable1D(lambda x: np.searchsorted(cuts, x, side="right") % 2, tuple(cuts))
    v1 = universal_p_variation(h, 1.0).value
    vp = universal_p_variation(h, p).value
    assert vp <= v1 + 1e-12
    assert abs(v1 - len(cuts)) <= 1e-9
