"""Orbit-based estimators: correlations, hitting times, local dimension.

Randomness comes from one integer seed.  Work is split into fixed blocks of
chains (or hitting-time samples); block ``b`` draws from the sub-stream
``SeedSequence(seed, spawn_key=(b,))``.  Blocks are independent, so the result
does not depend on how many worker threads process them.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (AllMissing, DegenerateFiber, InsufficientOrbit, NotHit, OrbitHitsCut,
                     SparseBall, TooManyCutHits)
from .maps import PiecewiseExpandingMap, SkewProductMap, eval_base
from .transfer import fit_log_linear

BLOCK = 512
MAX_NUDGE_FRACTION = 1e-3
DEFAULT_BURN_IN = 10_000
DEFAULT_HORIZON = 10**8
# hypotheses that are assumed rather than verified for user maps
LOGLAW_CAVEAT = "injectivity assumed: F is taken to be injective with C^1 fiber maps on each strip"
FORMULA_CAVEAT = "generator assumed: the vertical partition is taken to be generating"


def substream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def _run_blocks(fn, n_items: int, workers: int):
    blocks = [(b, b * BLOCK, min(n_items, (b + 1) * BLOCK)) for b in range((n_items + BLOCK - 1) // BLOCK)]
    if workers <= 1 or len(blocks) <= 1:
        return [fn(*blk) for blk in blocks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda blk: fn(*blk), blocks))


def _random_points(F, rng: np.random.Generator, k: int) -> np.ndarray:
    return rng.random((k, F.dim)) if F.dim == 2 else rng.random(k)


# ---------------------------------------------------------------------------
# orbits


@dataclass
class Orbit:
    """Iterates of one or more independent chains, shape ``(chains, length[, 2])``."""

    points: np.ndarray = field(repr=False)
    burn_in: int
    seed: Optional[int]
    nudged: int = 0
    steps: int = 0

    @property
    def chains(self) -> int:
        return self.points.shape[0]

    @property
    def length(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.chains * self.length

    def flat(self) -> np.ndarray:
        return self.points.reshape(self.size, *self.points.shape[2:])

    @property
    def xs(self) -> np.ndarray:
        return self.points[..., 0] if self.points.ndim == 3 else self.points


def sample_orbit(F, start=None, seed: int = 0, burn_in: int = DEFAULT_BURN_IN, length: int = 1000,
                 chains: int = 1, workers: int = 1) -> Orbit:
    """Iterate ``F`` after discarding ``burn_in`` steps.

    With ``start`` a single chain is run from that point; otherwise ``chains``
    chains start from uniform random points.  Iterates within the cut
    tolerance are nudged off the cut and counted.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if start is not None:
        chains = 1

    def block(b, lo, hi):
        rng = substream(seed, b)
        k = hi - lo
        if start is not None:
            p = np.array([start], dtype=float).reshape((1, F.dim) if F.dim == 2 else (1,))
        else:
            p = _random_points(F, rng, k)
        nudged = 0
        for _ in range(burn_in):
            p, m = F.step(p, rng)
            nudged += m
        out = np.empty((length,) + p.shape)
        out[0] = p
        for t in range(1, length):
            p, m = F.step(p, rng)
            nudged += m
            out[t] = p
        return np.swapaxes(out, 0, 1), nudged

    parts = _run_blocks(block, chains, workers)
    pts = np.concatenate([p for p, _ in parts], axis=0)
    nudged = sum(m for _, m in parts)
    steps = chains * (burn_in + length - 1)
    if steps and nudged > MAX_NUDGE_FRACTION * steps:
        raise TooManyCutHits(nudged, steps)
    return Orbit(pts, burn_in, seed, nudged, steps)


# ---------------------------------------------------------------------------
# correlations


@dataclass
class DecaySeries:
    lags: np.ndarray
    correlations: np.ndarray
    fitted_rate: float
    fit_quality: float
    noise_floor: float
    window: np.ndarray

    def to_csv(self) -> str:
        rows = ["lag,C_n"] + [f"{int(k)},{c:.17g}" for k, c in zip(self.lags, self.correlations)]
        return "\n".join(rows) + "\n"

    def summary(self) -> dict:
        return {"rate": self.fitted_rate, "r2": self.fit_quality, "noise_floor": self.noise_floor,
                "window": [int(k) for k in self.window]}


def _obs_values(f, pts: np.ndarray) -> np.ndarray:
    if pts.ndim == 3:
        return np.asarray(f(pts[..., 0], pts[..., 1]), dtype=float) * np.ones(pts.shape[:2])
    return np.asarray(f(pts), dtype=float) * np.ones(pts.shape)


def correlation_series(f, g, orbit: Orbit, max_lag: int, skip: int = 1) -> DecaySeries:
    """``C_n = |<f(p_k) g(p_{k+n})> - <f><g>|`` averaged along all chains.

    The fit uses lags from ``skip`` up to the first lag below the noise floor
    ``3 std(f g) / sqrt(M)``.
    """
    if orbit.length <= max_lag or orbit.size < 100 * max_lag:
        raise InsufficientOrbit(f"orbit of {orbit.chains}x{orbit.length} points too short for lag {max_lag}")
    fv = _obs_values(f, orbit.points)
    gv = _obs_values(g, orbit.points)
    fbar, gbar = fv.mean(), gv.mean()
    L = orbit.length
    corr = np.empty(max_lag + 1)
    for n in range(max_lag + 1):
        corr[n] = abs(np.mean(fv[:, :L - n] * gv[:, n:]) - fbar * gbar)
    floor = 3.0 * float(np.std(fv * gv)) / np.sqrt(orbit.size)
    slope, r2, window = fit_log_linear(corr, floor, skip)
    return DecaySeries(np.arange(max_lag + 1), corr, float(np.exp(slope)), r2, floor, window)


# ---------------------------------------------------------------------------
# hitting times


def _sup_dist(p, x0):
    p = np.asarray(p, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if p.ndim == x0.ndim + 1 and x0.ndim == 1:
        return np.max(np.abs(p - x0), axis=-1)
    if x0.ndim == 0:
        return np.abs(p - x0)
    return np.max(np.abs(p - x0))


def hitting_time(F, x, x0, r: float, horizon: int = DEFAULT_HORIZON) -> int:
    """Smallest ``n >= 1`` with ``F^n(x)`` in the open sup-metric ball ``B_r(x0)``.

    Scalar and deterministic.  Fractions are iterated exactly on affine
    families.  Raises :class:`NotHit` if the ball is not entered within
    ``horizon`` steps.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    p = x
    for n in range(1, horizon + 1):
        try:
            p = _step_exact(F, p)
        except Exception as exc:  # UndefinedAtCut
            raise OrbitHitsCut(n, p) from exc
        if _dist_scalar(p, x0) < r:
            return n
    raise NotHit(horizon)


def _step_exact(F, p):
    if isinstance(F, PiecewiseExpandingMap):
        return eval_base(F, p)
    return F(p)


def _dist_scalar(p, x0):
    if isinstance(p, tuple) or np.ndim(p) == 1:
        return max(abs(float(a) - float(b)) for a, b in zip(p, x0))
    return abs(p - x0) if isinstance(p, Fraction) and isinstance(x0, Fraction) else abs(float(p) - float(x0))


def hitting_times(F, starts: np.ndarray, x0, radii: Sequence[float], horizon: int = DEFAULT_HORIZON,
                  seed: int = 0, workers: int = 1) -> np.ndarray:
    """First entrance times into each of the nested balls ``B_r(x0)``.

    Returns an array ``(samples, len(radii))`` with ``nan`` where the ball was
    not entered within ``horizon`` steps.  Every start is stepped with the
    vectorized ``F.step`` until it has entered the smallest ball.
    """
    radii = np.asarray(radii, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    starts = np.asarray(starts, dtype=float)
    n_samples = starts.shape[0]

    def block(b, lo, hi):
        rng = substream(seed, 10**6 + b)
        out = np.full((hi - lo, radii.size), np.nan)
        p = starts[lo:hi].copy()
        active = np.arange(hi - lo)
        imin = int(np.argmin(radii))
        for n in range(1, horizon + 1):
            p, _ = F.step(p, rng)
            d = _sup_dist(p, x0)
            inside = d[:, None] < radii[None, :]
            fresh = inside & np.isnan(out[active])
            if np.any(fresh):
                rows, cols = np.nonzero(fresh)
                out[active[rows], cols] = n
                done = ~np.isnan(out[active, imin])
                if np.any(done):
                    active = active[~done]
                    p = p[~done]
                    if active.size == 0:
                        break
        return out

    return np.concatenate(_run_blocks(block, n_samples, workers), axis=0)


@dataclass
class LogLawReport:
    slope: float
    intercept: float
    radii: np.ndarray
    medians: np.ndarray
    missing: np.ndarray
    dropped: list
    taus: np.ndarray = field(repr=False)

    def to_csv(self) -> str:
        rows = ["r,median_log_tau,missing_fraction"]
        rows += [f"{r:.17g},{m:.17g},{f:.17g}" for r, m, f in zip(self.radii, self.medians, self.missing)]
        return "\n".join(rows) + "\n"

    def summary(self) -> dict:
        return {"slope": self.slope, "dropped_radii": [float(r) for r in self.dropped],
                "caveats": [LOGLAW_CAVEAT]}

    def ratios(self, index: int = -1) -> np.ndarray:
        """Per-sample ``log tau / (-log r)`` at one of the kept radii."""
        kept = [i for i, r in enumerate(self.radii) if r not in self.dropped]
        i = kept[index]
        return np.log(self.taus[:, i]) / -np.log(self.radii[i])


def _median_log(taus: np.ndarray) -> float:
    # missing values are censored at +inf, which the median tolerates below 50%
    with np.errstate(divide="ignore"):
        return float(np.median(np.log(np.where(np.isnan(taus), np.inf, taus))))


def _loglaw_fit(radii, taus, max_missing=0.2) -> LogLawReport:
    radii = np.asarray(radii, dtype=float)
    missing = np.mean(np.isnan(taus), axis=0)
    keep = missing <= max_missing
    if not np.any(keep):
        raise AllMissing("every radius has more than 20% missing hitting times")
    meds = np.array([_median_log(taus[:, i]) for i in range(radii.size)])
    x = -np.log(radii[keep])
    if x.size >= 2:
        slope, icpt = np.polyfit(x, meds[keep], 1)
    else:
        slope, icpt = float("nan"), float("nan")
    return LogLawReport(float(slope), float(icpt), radii, meds, missing, list(radii[~keep]), taus)


def loglaw_exponent(F, x0, radii: Sequence[float], samples: int = 200, horizon: int = DEFAULT_HORIZON,
                    seed: int = 0, burn_in: int = DEFAULT_BURN_IN, workers: int = 1) -> LogLawReport:
    """Slope of the median ``log tau`` against ``-log r`` over invariant-distributed starts."""
    radii = np.asarray(radii, dtype=float)
    if radii.size < 5:
        raise ValueError("need at least 5 radii")
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if np.any(radii >= 1.0):
        raise ValueError("radii must be below diam(Q) = 1")
    starts = sample_orbit(F, seed=seed, burn_in=burn_in, length=1, chains=samples, workers=workers).points[:, 0]
    taus = hitting_times(F, starts, x0, radii, horizon, seed, workers)
    return _loglaw_fit(radii, taus)


# ---------------------------------------------------------------------------
# dimension


@dataclass
class DimensionReport:
    point: np.ndarray
    radii: np.ndarray
    ball_masses: np.ndarray
    slope: float
    used: np.ndarray
    formula_value: Optional[float] = None

    def to_csv(self) -> str:
        rows = ["r,mass"] + [f"{r:.17g},{m:.17g}" for r, m in zip(self.radii, self.ball_masses)]
        return "\n".join(rows) + "\n"

    def summary(self) -> dict:
        out = {"slope": self.slope, "formula": self.formula_value,
               "used_radii": [float(r) for r in self.radii[self.used]]}
        if self.formula_value is not None:
            out["caveats"] = [FORMULA_CAVEAT]
        return out


def local_dimension(orbit: Orbit, x0, radii: Sequence[float], min_visits: int = 30,
                    min_largest: int = 1000) -> DimensionReport:
    """Slope of ``log μ̂(B_r(x0))`` against ``log r`` from orbit visit frequencies."""
    radii = np.sort(np.asarray(radii, dtype=float))[::-1]
    pts = orbit.flat()
    d = np.sort(_sup_dist(pts, x0))
    counts = np.searchsorted(d, radii, side="left")
    if counts[0] < min_largest:
        raise SparseBall(list(radii))
    used = counts >= min_visits
    if np.count_nonzero(used) < 5:
        raise SparseBall(list(radii[~used]))
    masses = counts / d.size
    slope, _ = np.polyfit(np.log(radii[used]), np.log(masses[used]), 1)
    return DimensionReport(np.asarray(x0, dtype=float), radii, masses, float(slope), used)


def _psi_phi(F: SkewProductMap, pts: np.ndarray):
    x, y = pts[:, 0], pts[:, 1]
    psi = np.log(np.abs(F.base.derivative(x)))
    dgy = np.abs(F.dG_dy(x, y))
    if np.any(dgy < 1e-300):
        raise DegenerateFiber("dG/dy vanishes along the orbit")
    return psi, -np.log(dgy)


def dimension_formula(F: SkewProductMap, orbit: Orbit) -> float:
    """``h (1/∫ψ + 1/∫φ)`` with ``h = ∫ψ``, i.e. ``1 + Ψ/Φ``.

    ``ψ = log|T'|`` and ``φ = -log|∂G/∂y|`` averaged along the orbit.
    """
    psi, phi = _psi_phi(F, orbit.flat())
    Psi, Phi = float(np.mean(psi)), float(np.mean(phi))
    entropy = Psi
    return entropy * (1.0 / Psi + 1.0 / Phi)


@dataclass
class Average:
    mean: float
    drift: float
    converged: bool
    heavy_tail: bool

    def as_dict(self):
        return dict(self.__dict__)


def birkhoff_average(values: np.ndarray) -> Average:
    """Birkhoff mean with last-quarter drift and a heavy-tail flag."""
    v = np.asarray(values, dtype=float).ravel()
    n = v.size
    mean = float(np.mean(v))
    early = float(np.mean(v[: max(1, (3 * n) // 4)]))
    drift = abs(mean - early) / abs(mean) if mean != 0 else abs(mean - early)
    heavy = bool(np.max(np.abs(v)) > 10.0 * abs(mean) * np.log(max(n, 2)))
    return Average(mean, float(drift), bool(drift < 0.01), heavy)


def integrability_report(F: SkewProductMap, orbit: Orbit, roof: Optional[Callable] = None) -> dict:
    """Birkhoff averages of ``log|T'|``, ``-log|∂_y G|`` and optionally the roof."""
    pts = orbit.flat()
    psi, phi = _psi_phi(F, pts)
    out = {"psi": birkhoff_average(psi), "phi": birkhoff_average(phi)}
    if roof is not None:
        out["tau"] = birkhoff_average(roof(pts[:, 0], pts[:, 1]))
    return out
