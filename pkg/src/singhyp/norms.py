"""Generalized variation functionals and anisotropic norms.

All suprema over subdivisions or radii are replaced by maxima over finite,
nested grids.  The results are therefore lower bounds of the true quantities
(flagged ``is_lower_bound``) except for observables carrying an analytic tag
listing their turning points, where the universal p-variation is exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .errors import InvalidEpsilon

A_CONST = 0.5  # the fixed constant bounding the radii in osc / var_{p,r}
ONE_SIDED = 1e-12
DEFAULT_SAMPLES = 2**14


@dataclass(frozen=True)
class Observable1D:
    """A function on ``[0, 1]``.

    ``turning_points`` is the analytic tag: every point where the function
    changes monotonicity or jumps.  With it, variations are computed exactly.
    """

    func: Callable[[np.ndarray], np.ndarray]
    turning_points: Optional[tuple] = None

    def __call__(self, x):
        return self.func(x)

    @property
    def tagged(self) -> bool:
        return self.turning_points is not None


@dataclass(frozen=True)
class Observable2D:
    """A bounded function on the unit square with optional regularity hints."""

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lipschitz: Optional[float] = None
    lip_y: Optional[float] = None
    sup_norm: Optional[float] = None

    def __call__(self, x, y):
        return self.func(x, y)


@dataclass
class VariationReport:
    norm: str
    value: float
    subdivision: np.ndarray = field(repr=False)
    grid: int
    is_lower_bound: bool

    def to_json(self) -> str:
        return json.dumps({
            "norm": self.norm,
            "value": self.value,
            "grid": self.grid,
            "is_lower_bound": self.is_lower_bound,
            "witness": [float(v) for v in np.ravel(self.subdivision)],
        })


def _as1d(h) -> Observable1D:
    return h if isinstance(h, Observable1D) else Observable1D(h)


def _eval(h, x) -> np.ndarray:
    with np.errstate(all="ignore"):
        return np.asarray(h(x), dtype=float) * np.ones_like(x)


# ---------------------------------------------------------------------------
# universal p-variation


def _local_extrema(v: np.ndarray) -> np.ndarray:
    """Indices of the endpoints and of the turning points of a sequence.

    Points inside a monotone run never help a p-variation sum for p >= 1
    (``a^p + b^p <= (a+b)^p``), so only these indices are kept.
    """
    if v.size <= 2:
        return np.arange(v.size)
    d = np.diff(v)
    keep = [0]
    for i in range(1, v.size - 1):
        if d[i - 1] * d[i] < 0 or (d[i - 1] != 0 and d[i] == 0) or (d[i - 1] == 0 and d[i] != 0):
            keep.append(i)
    keep.append(v.size - 1)
    return np.array(keep)


def _max_p_sum(v: np.ndarray, p: float):
    """Maximize ``sum |v[i_k+1] - v[i_k]|^p`` over increasing index chains."""
    if v.size < 2:
        return 0.0, np.arange(v.size)
    if p == 1:
        return float(np.sum(np.abs(np.diff(v)))), np.arange(v.size)
    k = v.size
    best = np.zeros(k)
    prev = np.zeros(k, dtype=int)
    for j in range(1, k):
        cand = best[:j] + np.abs(v[j] - v[:j]) ** p
        i = int(np.argmax(cand))
        best[j], prev[j] = cand[i], i
    chain = [k - 1]
    while chain[-1] != 0:
        chain.append(prev[chain[-1]])
    return float(best[-1]), np.array(chain[::-1])


def var_p_on(h, subdivision: Sequence[float], p: float) -> float:
    """``(sum |h(x_i) - h(x_{i+1})|^p)^{1/p}`` on one fixed subdivision."""
    v = _eval(h, np.asarray(subdivision, dtype=float))
    return float(np.sum(np.abs(np.diff(v)) ** p) ** (1.0 / p))


def universal_p_variation(h, p: float = 1.0, grid_size: int = 1024) -> VariationReport:
    """Universal p-variation ``sup (sum |h(x_i)-h(x_{i+1})|^p)^{1/p}``.

    Exact for tagged observables (the supremum is attained on endpoints,
    turning points and one-sided limits at jumps); otherwise the maximum over
    subdivisions of a regular grid, which is a lower bound.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    h = _as1d(h)
    if h.tagged:
        pts = [0.0, 1.0]
        for t in h.turning_points:
            pts.extend([t - ONE_SIDED, t, t + ONE_SIDED])
        xs = np.unique(np.clip(pts, 0.0, 1.0))
        exact = True
    else:
        xs = np.linspace(0.0, 1.0, grid_size)
        exact = False
    v = _eval(h, xs)
    idx = _local_extrema(v)
    s, chain = _max_p_sum(v[idx], p)
    return VariationReport(f"var_{p:g}", s ** (1.0 / p), xs[idx][chain], xs.size, not exact)


# ---------------------------------------------------------------------------
# two-variable variation and the vertical Lipschitz norm


def _as2d(f):
    return f if isinstance(f, Observable2D) else Observable2D(f)


def var_square(f, grid_size: int = 256, y_grid: Optional[int] = None) -> VariationReport:
    """Lower bound for ``var^□(f)`` on a regular ``grid_size`` x ``y_grid`` grid.

    On a fixed x-grid the finest subdivision is optimal (each new point can
    only add to the sum, choosing ``y`` independently per pair), so the
    estimate is ``sum_i max_y |f(x_i, y) - f(x_{i+1}, y)|``.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    f = _as2d(f)
    ny = grid_size if y_grid is None else y_grid
    xs = np.linspace(0.0, 1.0, grid_size)
    ys = np.linspace(0.0, 1.0, ny)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(xs[:, None], ys[None, :]), dtype=float) * np.ones((grid_size, ny))
    diffs = np.abs(np.diff(vals, axis=0))
    jmax = np.argmax(diffs, axis=1)
    total = float(np.sum(diffs[np.arange(grid_size - 1), jmax]))
    witness = np.stack([xs[:-1], ys[jmax]], axis=1)
    return VariationReport("var_square", total, witness, grid_size, True)


def sup_norm_2d(f, grid_size: int = 256) -> float:
    f = _as2d(f)
    if f.sup_norm is not None:
        return float(f.sup_norm)
    xs = np.linspace(0.0, 1.0, grid_size)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(xs[:, None], xs[None, :]), dtype=float)
    return float(np.max(np.abs(vals)))


def lip_y(f, grid_size: int = 256) -> float:
    """Largest vertical difference quotient on the grid (exact if hinted)."""
    f = _as2d(f)
    if f.lip_y is not None:
        return float(f.lip_y)
    xs = np.linspace(0.0, 1.0, grid_size)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(xs[:, None], xs[None, :]), dtype=float) * np.ones((grid_size, grid_size))
    return float(np.max(np.abs(np.diff(vals, axis=1))) * (grid_size - 1))


def vertical_lip_norm(f, grid_size: int = 256) -> float:
    """``||f||_{↕lip} = sup |f| + Lip_y(f)``."""
    return sup_norm_2d(f, grid_size) + lip_y(f, grid_size)


# ---------------------------------------------------------------------------
# oscillation and the generalized variation norms


def default_epsilons(samples: int = DEFAULT_SAMPLES, a: float = A_CONST) -> list:
    eps = []
    e = a
    while e * samples >= 4:
        eps.append(e)
        e /= 2
    return eps


def _osc_curves(h, epsilons, samples: int) -> tuple[np.ndarray, list]:
    xs = (np.arange(samples) + 0.5) / samples
    v = _eval(_as1d(h), xs)
    curves = []
    for e in epsilons:
        if not 0.0 < e <= A_CONST:
            raise InvalidEpsilon(f"epsilon must lie in (0, {A_CONST}], got {e}")
        w = int(np.floor(e * samples + 1e-9))
        size = 2 * w + 1
        curves.append(maximum_filter1d(v, size, mode="nearest") - minimum_filter1d(v, size, mode="nearest"))
    return v, curves


def _lp(v: np.ndarray, p: float) -> float:
    if np.isinf(p):
        return float(np.max(np.abs(v)))
    return float(np.mean(np.abs(v) ** p) ** (1.0 / p))


def osc_p_profile(h, epsilons: Sequence[float], p: float = 1.0, samples: int = DEFAULT_SAMPLES) -> list:
    """``osc_p(h, ε)`` for each ε: the L^p norm in x of the local oscillation.

    The oscillation at ``x`` is ``max - min`` of ``h`` over the regular
    ``samples``-point grid inside ``B_ε(x) ∩ [0, 1]``.
    """
    _, curves = _osc_curves(h, epsilons, samples)
    return [_lp(c, p) for c in curves]


@dataclass
class NormPR:
    value: float
    variation: float
    lp_norm: float
    argmax_eps: float
    is_lower_bound: bool = True


def norm_p_r(h, p: float = 1.0, r: float = 1.0, epsilons: Optional[Sequence[float]] = None,
             samples: int = DEFAULT_SAMPLES) -> NormPR:
    """``||h||_{p,r} = sup_ε ε^{-r} osc_p(h, ε) + ||h||_p`` over the given radii."""
    if not 0.0 <= r <= 1.0 or p < 1:
        raise ValueError("need p >= 1 and 0 <= r <= 1")
    eps = default_epsilons(samples) if epsilons is None else list(epsilons)
    v, curves = _osc_curves(h, eps, samples)
    scaled = [e ** (-r) * _lp(c, p) for e, c in zip(eps, curves)]
    k = int(np.argmax(scaled))
    var = scaled[k]
    lp = _lp(v, p)
    return NormPR(var + lp, var, lp, eps[k])


def var_p_r(h, p: float = 1.0, r: float = 1.0, epsilons=None, samples: int = DEFAULT_SAMPLES) -> float:
    return norm_p_r(h, p, r, epsilons, samples).variation


@dataclass
class VariationChain:
    var_1: float
    var_p_seminorm: float
    var_p_universal: float
    p: float
    holds: bool
    certified: bool

    def as_dict(self):
        return dict(self.__dict__)


def compare_variations(h, p: float = 1.0, samples: int = DEFAULT_SAMPLES, slack: float = 1e-9) -> VariationChain:
    """Evaluate ``var_{1,1/p}(h) <= var_{p,1/p}(h) <= 2^{1/p} var_p(h)``.

    Only certified when ``var_p`` is exact (tagged ``h``); the two left terms
    are lower-bound estimates on a common grid.
    """
    h = _as1d(h)
    r = 1.0 / p
    eps = default_epsilons(samples)
    left = var_p_r(h, 1.0, r, eps, samples)
    mid = var_p_r(h, p, r, eps, samples)
    up = universal_p_variation(h, p)
    right = 2.0 ** r * up.value
    tol = slack * max(1.0, right)
    holds = left <= mid + tol and mid <= right + tol
    return VariationChain(left, mid, up.value, p, bool(holds), not up.is_lower_bound)
