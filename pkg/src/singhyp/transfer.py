"""Perron-Frobenius operator of a piecewise expanding map and its Ulam discretization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import DegenerateSeries, NoConvergence
from .maps import PiecewiseExpandingMap
from .measures import DensityGrid
from .norms import DEFAULT_SAMPLES, Observable1D, norm_p_r

NOISE_FLOOR = 100 * np.finfo(float).eps
GAP_FLAG = 1.0 - 1e-6


# ---------------------------------------------------------------------------
# the operator itself


def _interp_linear(grid: DensityGrid, x: np.ndarray) -> np.ndarray:
    """Linear interpolation through bin midpoints, extrapolated linearly at the ends."""
    m, v = grid.midpoints, grid.values
    if v.size == 1:
        return np.full_like(x, v[0])
    out = np.interp(x, m, v)
    lo = x < m[0]
    hi = x > m[-1]
    out[lo] = v[0] + (x[lo] - m[0]) * (v[1] - v[0]) / (m[1] - m[0])
    out[hi] = v[-1] + (x[hi] - m[-1]) * (v[-1] - v[-2]) / (m[-1] - m[-2])
    return out


def _pf_pointwise(T: PiecewiseExpandingMap, f: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        for b in T.branches:
            lo, hi = b.image
            m = (x >= lo) & (x <= hi)
            if not np.any(m):
                continue
            y = b.invert(x[m])
            d = np.abs(b.deriv(y))
            term = np.where(np.isfinite(d), np.asarray(f(y), dtype=float) / d, 0.0)
            out[m] += term
    return out


def pf_apply(T: PiecewiseExpandingMap, f):
    """Apply ``Pf(x) = sum_i f(T_i^{-1} x) / |T'(T_i^{-1} x)|``.

    For a :class:`DensityGrid` the formula is evaluated at bin midpoints with
    ``f`` interpolated linearly between midpoints; callables (and
    :class:`Observable1D`) return a new callable evaluated exactly.
    """
    if isinstance(f, DensityGrid):
        vals = _pf_pointwise(T, lambda y: _interp_linear(f, y), f.midpoints)
        return DensityGrid(np.maximum(vals, 0.0))

    def pf(x):
        x = np.asarray(x, dtype=float)
        out = _pf_pointwise(T, f, np.atleast_1d(x))
        return out if x.ndim else float(out[0])

    return Observable1D(pf) if isinstance(f, Observable1D) else pf


# ---------------------------------------------------------------------------
# Ulam discretization


@dataclass(frozen=True)
class UlamOperator:
    """Row-stochastic ``P[i, j] = m(bin_i ∩ T^{-1} bin_j) / m(bin_i)``."""

    matrix: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def act(self, h: np.ndarray) -> np.ndarray:
        """Action on density vectors (values per bin)."""
        return self.matrix.T @ h

    def to_triplets(self) -> str:
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        lines = [f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}" for k in order]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_triplets(cls, text: str, n: int) -> "UlamOperator":
        rows, cols, vals = [], [], []
        for line in text.splitlines():
            if line.strip():
                r, c, v = line.split()
                rows.append(int(r)); cols.append(int(c)); vals.append(float(v))
        return cls(sp.csr_matrix((vals, (rows, cols)), shape=(n, n)))


def ulam_matrix(T: PiecewiseExpandingMap, n: int) -> UlamOperator:
    """Ulam matrix from exact branch-preimage intervals (no sampling)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    edges = np.linspace(0.0, 1.0, n + 1)
    rows, cols, vals = [], [], []
    for b in T.branches:
        lo, hi = b.image
        pre = b.invert(np.clip(edges, lo, hi))
        # source-bin edges inside the branch domain plus preimage edges
        inner = edges[(edges > b.left) & (edges < b.right)]
        pts = np.unique(np.concatenate([[b.left, b.right], inner, pre]))
        pts = pts[(pts >= b.left) & (pts <= b.right)]
        seg_len = np.diff(pts)
        mid = 0.5 * (pts[:-1] + pts[1:])
        keep = seg_len > 0
        mid, seg_len = mid[keep], seg_len[keep]
        i = np.minimum((mid * n).astype(int), n - 1)
        if b.increasing:
            j = np.searchsorted(pre, mid, side="right") - 1
        else:
            j = n - 1 - (np.searchsorted(pre[::-1], mid, side="right") - 1)
        j = np.clip(j, 0, n - 1)
        rows.append(i); cols.append(j); vals.append(seg_len * n)
    mat = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    mat.sum_duplicates()
    return UlamOperator(mat)


@dataclass
class SpectralReport:
    leading_eigenvalue: float
    second_modulus: float
    invariant_density: DensityGrid = field(repr=False)
    residual: float
    iterations: int
    flags: list = field(default_factory=list)
    pf_residual: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps({
            "leading_eigenvalue": self.leading_eigenvalue,
            "second_modulus": self.second_modulus,
            "residual": self.residual,
            "pf_residual": self.pf_residual,
            "iterations": self.iterations,
            "bins": self.invariant_density.bins,
            "flags": self.flags,
        })


def _l1(v: np.ndarray) -> float:
    return float(np.sum(np.abs(v)) / v.size)


def invariant_density(op: UlamOperator, tol: float = 1e-12, max_iter: int = 10_000,
                      deflated_iter: int = 200, T: Optional[PiecewiseExpandingMap] = None,
                      seed: int = 0) -> SpectralReport:
    """Fixed density of the Ulam operator by power iteration from the uniform density.

    ``second_modulus`` is estimated by ``deflated_iter`` further power steps on a
    zero-mass vector, where the fixed direction is absent.  When ``T`` is
    given, the fixed density is re-checked against the exact operator: the
    bin averages of ``P h`` (Gauss-Legendre quadrature of :func:`pf_apply`)
    are compared with ``h`` and stored as ``pf_residual``.
    """
    n = op.n
    h = np.ones(n)
    residual = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        nxt = op.act(h)
        nxt /= nxt.sum() / n
        residual = _l1(nxt - h)
        h = nxt
        if residual <= tol:
            break
    if residual > tol:
        raise NoConvergence(residual, it)
    lead = float(np.sum(op.act(h)) / np.sum(h))

    rng = np.random.default_rng(seed)
    w = rng.standard_normal(n)
    w -= w.mean()
    w /= np.linalg.norm(w)
    norms = []
    for _ in range(deflated_iter):
        w = op.act(w)
        w -= w.mean()
        nw = np.linalg.norm(w)
        norms.append(nw)
        if nw == 0.0:
            break
        w /= nw
    tail = np.array(norms[len(norms) // 2:])
    second = 0.0 if tail.size == 0 or np.any(tail == 0) else float(np.exp(np.mean(np.log(tail))))

    flags = []
    if second >= GAP_FLAG:
        flags.append("no spectral gap: second eigenvalue on the unit circle, "
                     "possible periodic decomposition; probe an iterate T^k")
    dens = DensityGrid(h)
    pf_res = None
    if T is not None:
        pf_res = _pf_bin_residual(T, dens)
    return SpectralReport(lead, second, dens, residual, it, flags, pf_res)


def _pf_bin_residual(T: PiecewiseExpandingMap, h: DensityGrid, nodes: int = 8) -> float:
    g, w = np.polynomial.legendre.leggauss(nodes)
    n = h.bins
    left = np.arange(n) / n
    x = (left[:, None] + (g[None, :] + 1.0) / (2 * n)).ravel()
    ph = _pf_pointwise(T, h, x).reshape(n, nodes)
    avg = ph @ (w / 2.0)
    return _l1(avg - h.values)


def pf_power_density(T: PiecewiseExpandingMap, n: int, tol: float = 1e-12, max_iter: int = 10_000) -> DensityGrid:
    """Fixed density of the midpoint/interpolation discretization of :func:`pf_apply`."""
    h = DensityGrid.uniform(n)
    for it in range(max_iter):
        nxt = pf_apply(T, h).normalized()
        if _l1(nxt.values - h.values) <= tol:
            return nxt
        h = nxt
    raise NoConvergence(_l1(nxt.values - h.values), max_iter)


# ---------------------------------------------------------------------------
# convergence to equilibrium


@dataclass
class DecayFit:
    series: np.ndarray
    rate: float
    slope: float
    r2: float
    window: np.ndarray

    def as_dict(self):
        return {"rate": self.rate, "slope": self.slope, "r2": self.r2,
                "window": [int(k) for k in self.window],
                "series": [float(v) for v in self.series]}


def fit_log_linear(series: np.ndarray, floor: float, skip: int = 0):
    """Least-squares slope of ``log series[n]`` on the lags above ``floor``.

    Lags before ``skip`` are dropped, and so is everything from the first lag
    that falls below ``floor`` on.  Returns ``(slope, r2, window)``.
    """
    s = np.asarray(series, dtype=float)
    lags = np.arange(s.size)
    below = np.nonzero(s <= floor)[0]
    stop = below[below >= skip][0] if np.any(below >= skip) else s.size
    window = lags[skip:stop]
    if window.size < 2:
        return float("nan"), float("nan"), window
    y = np.log(s[window])
    slope, icpt = np.polyfit(window, y, 1)
    resid = y - (slope * window + icpt)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss if ss > 0 else 1.0
    return float(slope), float(r2), window


def convergence_rate(T: PiecewiseExpandingMap, f0, g, N: int, bins: int = 2048,
                     invariant: Optional[DensityGrid] = None, skip: int = 2,
                     floor: Optional[float] = None) -> DecayFit:
    """Convergence to equilibrium of the Lebesgue-initialized density ``f0``.

    Series ``|∫ g P^n f0 dm - ∫ g dμ ∫ f0 dm|`` for ``n = 0..N``; the rate is
    ``exp(slope)`` of a log-linear fit after dropping ``skip`` transient lags
    and everything below ``floor``.  The floor defaults to the squared grid
    width: the interpolating discretization cannot resolve smaller terms.
    ``μ`` defaults to the fixed density of the same discretized operator, so
    both terms share one discretization.
    """
    f = f0 if isinstance(f0, DensityGrid) else DensityGrid.from_function(f0, bins, normalize=False)
    mid = f.midpoints
    gv = np.asarray(g(mid), dtype=float) * np.ones_like(mid)
    if invariant is None:
        invariant = pf_power_density(T, f.bins)
    mass = f.values.sum() / f.bins
    eq = np.sum(gv * invariant.values) / f.bins * mass
    series = np.empty(N + 1)
    cur = f
    for k in range(N + 1):
        series[k] = abs(np.sum(gv * cur.values) / f.bins - eq)
        if k < N:
            cur = pf_apply(T, cur)
    if np.all(series < 1e-14):
        err = DegenerateSeries("all correlation terms below 1e-14")
        err.series = series
        raise err
    if floor is None:
        floor = max(NOISE_FLOOR, 1.0 / f.bins**2)
    slope, r2, window = fit_log_linear(series, floor, skip)
    return DecayFit(series, float(np.exp(slope)), slope, r2, window)


# ---------------------------------------------------------------------------
# Lasota-Yorke probe


def random_piecewise_density(rng: np.random.Generator, max_pieces: int = 24, degree: int = 2) -> Observable1D:
    """Positive piecewise polynomial with random breakpoints and jumps.

    The tag lists the breakpoints together with every vertex and sign change
    of the polynomial pieces, i.e. all points where monotonicity can change.
    """
    k = int(rng.integers(1, max_pieces + 1))
    cuts = np.sort(rng.uniform(0.0, 1.0, k - 1))
    coefs = rng.uniform(-1.0, 1.0, size=(k, degree + 1))
    offset = rng.uniform(0.0, 2.0, size=k)
    scale = 10.0 ** rng.uniform(-1.0, 1.0)
    if degree < 2:
        coefs[:, 2:] = 0.0

    def h(x):
        x = np.asarray(x, dtype=float)
        i = np.searchsorted(cuts, x, side="right")
        c = coefs[i]
        val = c[..., 0] + c[..., 1] * x + c[..., 2] * x * x
        return scale * (np.abs(val) + offset[i])

    edges = np.concatenate([[0.0], cuts, [1.0]])
    turns = list(cuts)
    for i, (c0, c1, c2) in enumerate(coefs[:, :3]):
        cand = list(np.roots([c2, c1, c0]) if c2 != 0 or c1 != 0 else [])
        if c2 != 0:
            cand.append(-c1 / (2 * c2))
        for t in cand:
            if np.isreal(t) and edges[i] < np.real(t) < edges[i + 1]:
                turns.append(float(np.real(t)))
    return Observable1D(h, turning_points=tuple(sorted(turns)))


@dataclass
class LYProbe:
    beta: float
    C: float
    feasible: bool
    lhs: np.ndarray = field(repr=False)
    norm_f: np.ndarray = field(repr=False)
    l1_f: np.ndarray = field(repr=False)

    def as_dict(self):
        return {"beta": self.beta, "C": self.C, "feasible": self.feasible, "trials": int(self.lhs.size)}


def lasota_yorke_probe(T: PiecewiseExpandingMap, p: float = 1.0, trials: int = 50, seed: int = 0,
                       c_cap: float = 10.0, beta_tol: float = 0.01,
                       samples: int = DEFAULT_SAMPLES, extra=()) -> LYProbe:
    """Fit ``||Pf||_{1,1/p} <= β ||f||_{1,1/p} + C ||f||_1`` over random test densities.

    Two linear programs: first the smallest ``β`` feasible with ``0 <= C <=
    c_cap``, then the smallest ``C`` keeping ``β`` within ``beta_tol`` of it.
    ``extra`` adds caller-supplied test functions to the random ones.
    """
    rng = np.random.default_rng(seed)
    tests = [random_piecewise_density(rng) for _ in range(trials)] + list(extra)
    r = 1.0 / p
    a, b, c = [], [], []
    for f in tests:
        nf = norm_p_r(f, 1.0, r, samples=samples)
        npf = norm_p_r(pf_apply(T, f), 1.0, r, samples=samples)
        a.append(npf.value); b.append(nf.value); c.append(nf.lp_norm)
    a, b, c = map(np.asarray, (a, b, c))
    # a_i <= beta*b_i + C*c_i  <=>  -b_i*beta - c_i*C <= -a_i
    A_ub = np.stack([-b, -c], axis=1)
    res = linprog([1.0, 0.0], A_ub=A_ub, b_ub=-a, bounds=[(0, None), (0, c_cap)], method="highs")
    if not res.success:
        return LYProbe(float("inf"), float("inf"), False, a, b, c)
    beta_min = res.x[0]
    res2 = linprog([0.0, 1.0], A_ub=np.vstack([A_ub, [1.0, 0.0]]), b_ub=np.append(-a, beta_min + beta_tol),
                   bounds=[(0, None), (0, c_cap)], method="highs")
    beta, C = (res2.x if res2.success else res.x)
    return LYProbe(float(beta), float(C), bool(beta < 1.0), a, b, c)
