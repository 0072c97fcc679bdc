"""Interval maps, skew products and the geometric Lorenz model family.

Every evaluator here is vectorized over numpy arrays.  Scalar calls go through
the same code path and are converted back to Python floats (or kept as
:class:`fractions.Fraction` for the affine families, which makes exact orbit
enumeration possible).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidParams, OrbitHitsCut, UndefinedAtCut

CUT_TOL = 4 * np.finfo(float).eps
NUDGE = 1e-9
BISECT_TOL = 1e-12
BISECT_MAXITER = 200

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Branch:
    """One monotone C^1 branch of a piecewise expanding map on ``[left, right]``.

    ``inverse`` is optional; without it preimages are found by bisection.
    """

    left: float
    right: float
    func: ArrayFn
    deriv: ArrayFn
    inverse: Optional[ArrayFn] = None

    @property
    def increasing(self) -> bool:
        return bool(self.func(np.array(self.right)) > self.func(np.array(self.left)))

    @property
    def image(self) -> tuple[float, float]:
        a = float(self.func(np.array(self.left)))
        b = float(self.func(np.array(self.right)))
        return (min(a, b), max(a, b))

    def invert(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.inverse is not None:
            return self.inverse(y)
        return _bisect_inverse(self, y)


def _bisect_inverse(branch: Branch, y: np.ndarray) -> np.ndarray:
    lo = np.full(y.shape, float(branch.left))
    hi = np.full(y.shape, float(branch.right))
    sign = 1.0 if branch.increasing else -1.0
    for _ in range(BISECT_MAXITER):
        mid = 0.5 * (lo + hi)
        above = sign * (branch.func(mid) - y) > 0
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= BISECT_TOL):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PiecewiseExpandingMap:
    """A piecewise monotone, uniformly expanding map of ``[0, 1]``.

    Parameters
    ----------
    branches : sequence of Branch
        Consecutive branches; ``branches[i].right == branches[i+1].left``.
    name : str
        Family name, used in reports.
    expansion_floor : float, optional
        ``inf |T'|``.  Estimated by sampling when omitted.
    refresh_digits : bool
        Set for maps with integer slopes (doubling, tent).  Their floating
        point orbits lose one binary digit per step and collapse onto dyadic
        rationals; ``step`` then appends a random low-order bit so that the
        iterates follow the orbit of a real number with a random expansion.
    """

    branches: tuple[Branch, ...]
    name: str = "custom"
    expansion_floor: Optional[float] = None
    refresh_digits: bool = False
    interior_cuts: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        branches = tuple(self.branches)
        object.__setattr__(self, "branches", branches)
        cuts = np.array([b.left for b in branches[1:]], dtype=float)
        cuts.setflags(write=False)
        object.__setattr__(self, "interior_cuts", cuts)
        if self.expansion_floor is None:
            object.__setattr__(self, "expansion_floor", self._sampled_floor())

    dim = 1

    @property
    def cuts(self) -> tuple[float, ...]:
        return (self.branches[0].left, *map(float, self.interior_cuts), self.branches[-1].right)

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def _sampled_floor(self, n: int = 4097) -> float:
        lows = []
        for b in self.branches:
            t = np.linspace(b.left, b.right, n)[1:-1]
            with np.errstate(divide="ignore", invalid="ignore"):
                d = np.abs(b.deriv(t))
            lows.append(np.nanmin(d))
        return float(min(lows))

    # -- evaluation ---------------------------------------------------------
    def branch_index(self, x):
        return np.searchsorted(self.interior_cuts, x, side="right")

    def at_cut(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.interior_cuts.size == 0:
            return np.zeros(x.shape, dtype=bool)
        idx = np.searchsorted(self.interior_cuts, x)
        lo = self.interior_cuts[np.clip(idx - 1, 0, None)]
        hi = self.interior_cuts[np.clip(idx, None, self.interior_cuts.size - 1)]
        return (np.abs(x - lo) <= CUT_TOL) | (np.abs(x - hi) <= CUT_TOL)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Vectorized evaluation without cut checks."""
        x = np.asarray(x, dtype=float)
        idx = self.branch_index(x)
        out = np.empty_like(x)
        for i, b in enumerate(self.branches):
            m = idx == i
            if np.any(m):
                out[m] = b.func(x[m])
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        idx = self.branch_index(x)
        out = np.empty_like(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            for i, b in enumerate(self.branches):
                m = idx == i
                if np.any(m):
                    out[m] = b.deriv(x[m])
        out = np.where(np.isnan(out), np.inf, out)
        return out if out.ndim else float(out)

    def __call__(self, x):
        return eval_base(self, x)

    def step(self, x: np.ndarray, rng: Optional[np.random.Generator] = None):
        """One vectorized step for orbit sampling.

        Points within ``CUT_TOL`` of a cut are moved right by ``NUDGE`` first.
        Returns ``(image, number_of_nudged_points)``.
        """
        hit = self.at_cut(x)
        n_hit = int(np.count_nonzero(hit))
        if n_hit:
            x = np.where(hit, x + NUDGE, x)
        y = self.apply(x)
        if self.refresh_digits and rng is not None:
            y = y + rng.integers(0, 2, size=y.shape) * 2.0**-53
            y = np.minimum(y, 1.0)
        return y, n_hit

    def preimages(self, x: float):
        return branch_preimages(self, x)


def _check_cut(T: PiecewiseExpandingMap, x) -> None:
    hit = T.at_cut(np.asarray(x, dtype=float))
    if np.any(hit):
        bad = np.asarray(x, dtype=float)[hit] if np.ndim(x) else float(x)
        bad = float(np.ravel(bad)[0])
        cut = T.interior_cuts[np.argmin(np.abs(T.interior_cuts - bad))]
        raise UndefinedAtCut(bad, float(cut))


def eval_base(T: PiecewiseExpandingMap, x):
    """Evaluate ``T`` at ``x`` (scalar or array); raises at interior cuts."""
    if isinstance(x, Fraction):
        return _eval_fraction(T, x)
    _check_cut(T, x)
    y = T.apply(np.asarray(x, dtype=float))
    return y if y.ndim else float(y)


def _eval_fraction(T, x: Fraction):
    _check_cut(T, float(x))
    b = T.branches[int(T.branch_index(float(x)))]
    exact = getattr(b.func, "exact", None)
    if exact is None:
        return float(b.func(np.array(float(x))))
    return exact(x)


def branch_preimages(T: PiecewiseExpandingMap, x: float):
    """All preimages of ``x``: list of ``(branch index, preimage, |T'(preimage)|)``."""
    out = []
    for i, b in enumerate(T.branches):
        lo, hi = b.image
        if lo - BISECT_TOL <= x <= hi + BISECT_TOL:
            y = float(b.invert(np.array(min(max(x, lo), hi))))
            with np.errstate(divide="ignore"):
                d = float(np.abs(b.deriv(np.array(y))))
            out.append((i, y, d if np.isfinite(d) else np.inf))
    return out


@dataclass(frozen=True)
class SkewProductMap:
    """``F(x, y) = (T(x), G(x, y))`` with ``G`` a ``lam``-contraction in ``y``."""

    base: PiecewiseExpandingMap
    fiber: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lam: float
    dG_dy: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    dG_dx: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    name: str = "custom-skew"
    # cut position for the Lorenz family, used by the roof function
    singular_cut: Optional[float] = None

    dim = 2

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise InvalidParams(f"fiber contraction must lie in (0,1), got {self.lam}")

    @property
    def n_branches(self) -> int:
        return self.base.n_branches

    def apply(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        x, y = p[..., 0], p[..., 1]
        return np.stack([self.base.apply(x), self.fiber(x, y)], axis=-1)

    def __call__(self, p):
        return eval_skew(self, p)

    def step(self, p: np.ndarray, rng: Optional[np.random.Generator] = None):
        x, y = p[..., 0], p[..., 1]
        hit = self.base.at_cut(x)
        n_hit = int(np.count_nonzero(hit))
        if n_hit:
            x = np.where(hit, x + NUDGE, x)
        nx = self.base.apply(x)
        ny = self.fiber(x, y)
        if self.base.refresh_digits and rng is not None:
            nx = np.minimum(nx + rng.integers(0, 2, size=nx.shape) * 2.0**-53, 1.0)
        return np.stack([nx, ny], axis=-1), n_hit


def eval_skew(F: SkewProductMap, p):
    p_arr = np.asarray(p, dtype=float)
    _check_cut(F.base, p_arr[..., 0])
    out = F.apply(p_arr)
    return tuple(float(v) for v in out) if out.ndim == 1 else out


def leaf_diameter_decay(F: SkewProductMap, x0: float, n: int, grid: int = 1000) -> float:
    """Diameter (sup metric) of ``F^n`` applied to the vertical leaf through ``x0``."""
    y = np.linspace(0.0, 1.0, grid)
    x = float(x0)
    for k in range(n):
        if F.base.at_cut(x):
            raise OrbitHitsCut(k, x)
        xs = np.full_like(y, x)
        y = F.fiber(xs, y)
        x = float(F.base.apply(np.array(x)))
    return float(y.max() - y.min())


# ---------------------------------------------------------------------------
# families


def _exact(fn, exact):
    fn.exact = exact
    return fn


def doubling_map() -> PiecewiseExpandingMap:
    return PiecewiseExpandingMap(
        branches=(
            Branch(0.0, 0.5, _exact(lambda x: 2.0 * x, lambda q: 2 * q),
                   lambda x: np.full_like(x, 2.0), lambda y: 0.5 * y),
            Branch(0.5, 1.0, _exact(lambda x: 2.0 * x - 1.0, lambda q: 2 * q - 1),
                   lambda x: np.full_like(x, 2.0), lambda y: 0.5 * (y + 1.0)),
        ),
        name="doubling",
        expansion_floor=2.0,
        refresh_digits=True,
    )


def tent_map() -> PiecewiseExpandingMap:
    return PiecewiseExpandingMap(
        branches=(
            Branch(0.0, 0.5, _exact(lambda x: 2.0 * x, lambda q: 2 * q),
                   lambda x: np.full_like(x, 2.0), lambda y: 0.5 * y),
            Branch(0.5, 1.0, _exact(lambda x: 2.0 - 2.0 * x, lambda q: 2 - 2 * q),
                   lambda x: np.full_like(x, -2.0), lambda y: 1.0 - 0.5 * y),
        ),
        name="tent",
        expansion_floor=2.0,
        refresh_digits=True,
    )


@dataclass(frozen=True)
class LorenzModelParams:
    """Exponents of the geometric Lorenz model.

    ``alpha = -lambda3/lambda1`` drives the base, ``beta = -lambda2/lambda1``
    the fibers, ``kappa`` scales the fiber images.
    """

    alpha: float = 0.75
    beta: float = 2.0
    kappa: float = 0.25

    def validate(self) -> "LorenzModelParams":
        if not 0.5 < self.alpha < 1.0:
            raise InvalidParams(f"alpha must lie in (1/2, 1) for 2*alpha > 1, got {self.alpha}")
        if self.beta < 1.0:
            raise InvalidParams(f"beta must be >= 1 for bounded dG/dx, got {self.beta}")
        if not 0.0 < self.kappa <= 0.25:
            raise InvalidParams(f"kappa must lie in (0, 1/4], got {self.kappa}")
        return self


def lorenz_base(alpha: float) -> PiecewiseExpandingMap:
    a = float(alpha)
    return PiecewiseExpandingMap(
        branches=(
            Branch(0.0, 0.5,
                   lambda x: 1.0 - np.abs(2.0 * x - 1.0) ** a,
                   lambda x: 2.0 * a * np.abs(2.0 * x - 1.0) ** (a - 1.0),
                   lambda y: 0.5 * (1.0 - np.abs(1.0 - y) ** (1.0 / a))),
            Branch(0.5, 1.0,
                   lambda x: np.abs(2.0 * x - 1.0) ** a,
                   lambda x: 2.0 * a * np.abs(2.0 * x - 1.0) ** (a - 1.0),
                   lambda y: 0.5 * (1.0 + np.abs(y) ** (1.0 / a))),
        ),
        name="lorenz-base",
        expansion_floor=2.0 * a,
    )


def make_lorenz_model(params: LorenzModelParams) -> SkewProductMap:
    """Canonical geometric Lorenz return map on the unit square, cut at 1/2."""
    params.validate()
    beta, kappa = float(params.beta), float(params.kappa)

    def fiber(x, y):
        u = 2.0 * x - 1.0
        s = np.where(u > 0, 0.25, -0.25)
        return 0.5 + s + kappa * (y - 0.5) * np.abs(u) ** beta

    def dG_dy(x, y):
        return kappa * np.abs(2.0 * x - 1.0) ** beta + 0.0 * y

    def dG_dx(x, y):
        u = 2.0 * x - 1.0
        return 2.0 * kappa * beta * (y - 0.5) * np.sign(u) * np.abs(u) ** (beta - 1.0)

    return SkewProductMap(
        base=lorenz_base(params.alpha),
        fiber=fiber,
        lam=kappa,
        dG_dy=dG_dy,
        dG_dx=dG_dx,
        name="lorenz",
        singular_cut=0.5,
    )


def make_affine_skew(contraction: float = 1.0 / 3.0) -> SkewProductMap:
    """Baker-like map over the doubling map: ``G(x, y) = c*y + i*(1-c)``.

    ``i`` is the branch index of ``x``.  For ``c < 1/2`` the invariant measure
    is Lebesgue times a Cantor measure of dimension ``log 2 / log(1/c)``.
    """
    c = float(contraction)
    if not 0.0 < c <= 0.5:
        raise InvalidParams(f"contraction must lie in (0, 1/2], got {c}")

    def fiber(x, y):
        return c * y + np.where(x >= 0.5, 1.0 - c, 0.0)

    return SkewProductMap(
        base=doubling_map(),
        fiber=fiber,
        lam=c,
        dG_dy=lambda x, y: np.full(np.broadcast(x, y).shape, c),
        dG_dx=lambda x, y: np.zeros(np.broadcast(x, y).shape),
        name="affine-skew",
    )


FAMILIES = ("doubling", "tent", "lorenz", "lorenz-base", "affine-skew")


def make_map(family: str, **params):
    """Build a map from a family name and numeric parameters (config entry point)."""
    if family == "doubling":
        _no_params(family, params)
        return doubling_map()
    if family == "tent":
        _no_params(family, params)
        return tent_map()
    if family == "lorenz":
        return make_lorenz_model(LorenzModelParams(**_only(family, params, ("alpha", "beta", "kappa"))))
    if family == "lorenz-base":
        p = _only(family, params, ("alpha",))
        alpha = p.get("alpha", 0.75)
        LorenzModelParams(alpha=alpha).validate()
        return lorenz_base(alpha)
    if family == "affine-skew":
        return make_affine_skew(**_only(family, params, ("contraction",)))
    raise InvalidParams(f"unknown map family {family!r}; expected one of {FAMILIES}")


def _no_params(family, params):
    if params:
        raise InvalidParams(f"family {family!r} takes no parameters, got {sorted(params)}")


def _only(family, params, allowed: Sequence[str]):
    extra = set(params) - set(allowed)
    if extra:
        raise InvalidParams(f"unknown parameters for {family!r}: {sorted(extra)}")
    return {k: float(v) for k, v in params.items()}
