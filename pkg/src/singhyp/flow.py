"""Linearized singular flow, suspension semiflows and the flow log-law.

Points of a suspension are pairs ``(q, s)`` with ``0 <= s < roof(q)``; the
flow moves ``s`` up at unit speed and identifies ``(q, roof(q))`` with
``(F(q), 0)``.  Distances use ``max(base sup-distance, |s - s'|)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .ergodic import (BLOCK, DEFAULT_BURN_IN, DEFAULT_HORIZON, _loglaw_fit, _run_blocks, dimension_formula,
                      integrability_report, loglaw_exponent, sample_orbit, substream)
from .errors import InvalidParams, NotHit, OnStableManifold, OrbitHitsCut, UndefinedAtCut
from .maps import PiecewiseExpandingMap, SkewProductMap, eval_base, make_lorenz_model, LorenzModelParams

DEFAULT_TAU0 = 1.0
FLOW_HORIZON = 1e8


@dataclass(frozen=True)
class SingularityParams:
    """Eigenvalues of a Lorenz-like equilibrium, ``l2 < l3 < 0 < -l3 < l1``."""

    lambda1: float
    lambda2: float
    lambda3: float

    def __post_init__(self):
        l1, l2, l3 = self.lambda1, self.lambda2, self.lambda3
        if not (l2 < l3 < 0.0 < -l3 < l1):
            raise InvalidParams(f"need lambda2 < lambda3 < 0 < -lambda3 < lambda1, got {(l1, l2, l3)}")

    @property
    def alpha(self) -> float:
        return -self.lambda3 / self.lambda1

    @property
    def beta(self) -> float:
        return -self.lambda2 / self.lambda1

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2, self.lambda3])


def linear_flow(params: SingularityParams, p0, t):
    """Exact solution ``(x e^{l1 t}, y e^{l2 t}, z e^{l3 t})``; broadcasts over ``p0`` and ``t``."""
    p0 = np.asarray(p0, dtype=float)
    t = np.asarray(t, dtype=float)
    return p0 * np.exp(params.eigenvalues * t[..., None])


def singular_return(params: SingularityParams, ingoing):
    """Map ``(x1, x2)`` on the ingoing section ``{z = 1}`` to the outgoing section.

    Returns ``((x2 |x1|^beta, |x1|^alpha), side)`` where ``side = sign(x1)``
    tells which of the two outgoing sections ``{x = ±1}`` is reached.
    """
    x1, x2 = (float(v) for v in ingoing)
    if x1 == 0.0:
        raise OnStableManifold("x1 = 0 lies on the stable manifold and never exits")
    if abs(x1) > 1.0 or abs(x2) > 1.0:
        raise InvalidParams("ingoing point must lie in the unit box")
    a = abs(x1)
    return (x2 * a ** params.beta, a ** params.alpha), int(np.sign(x1))


def singular_return_time(params: SingularityParams, x1: float) -> float:
    """Passage time ``-log|x1| / l1`` through the linearization box."""
    if x1 == 0.0:
        raise OnStableManifold("x1 = 0 lies on the stable manifold and never exits")
    if abs(x1) > 1.0:
        raise InvalidParams("|x1| must be at most 1")
    return -np.log(abs(x1)) / params.lambda1


def return_time_integral(params: SingularityParams, delta: float = 1.0) -> tuple[float, float]:
    """``∫_{-δ}^{δ} τ(x1) dx1`` by quadrature, together with ``2δ(1 - log δ)/l1``."""
    if not 0.0 < delta <= 1.0:
        raise InvalidParams("delta must lie in (0, 1]")
    half, _ = quad(lambda u: -np.log(u) / params.lambda1, 0.0, delta, epsabs=1e-13, epsrel=1e-13, limit=200)
    return 2.0 * half, 2.0 * delta * (1.0 - np.log(delta)) / params.lambda1


# ---------------------------------------------------------------------------
# suspensions


@dataclass(frozen=True)
class FlowPoint:
    base_point: object
    height: float


@dataclass
class SuspensionFlow:
    """Suspension of ``base`` under ``roof``.

    ``roof`` takes an array of base points (shape ``(k,)`` for interval maps,
    ``(k, 2)`` for skew products) and returns times ``>= tau0``.
    """

    base: object
    roof: Callable[[np.ndarray], np.ndarray]
    tau0: float = DEFAULT_TAU0
    params: Optional[SingularityParams] = None
    name: str = "suspension"

    def __post_init__(self):
        if self.tau0 <= 0:
            raise InvalidParams("tau0 must be positive")

    def roof_at(self, q) -> float:
        """Roof value at a single base point."""
        return float(np.ravel(self.roof(np.asarray([q], dtype=float)))[0])

    def roof_xy(self, x, y):
        return self.roof(np.stack([np.asarray(x, float), np.asarray(y, float)], axis=-1))


def constant_roof(base, tau: float = DEFAULT_TAU0) -> SuspensionFlow:
    """Suspension with ``roof ≡ tau``."""
    if tau <= 0:
        raise InvalidParams("roof must be positive")
    shape_of = (lambda q: np.shape(q)[:-1]) if getattr(base, "dim", 1) == 2 else np.shape
    return SuspensionFlow(base, lambda q: np.full(shape_of(q), tau), tau0=tau, name=f"const-{base.name}")


def make_lorenz_roof(params: SingularityParams, F: SkewProductMap, tau0: float = DEFAULT_TAU0,
                     check_orbit: Optional[int] = 2**17, seed: int = 0) -> SuspensionFlow:
    """Roof ``tau0 + (-log|x - c|)/l1`` over a Lorenz model cut at ``c``.

    The roof is constant along vertical leaves.  Unless ``check_orbit`` is
    ``None``, integrability is confirmed by a Birkhoff average over that many
    orbit points (drift below 1%).
    """
    if not isinstance(F, SkewProductMap) or F.singular_cut is None:
        raise InvalidParams("the roof needs a Lorenz model with a singular cut")
    if tau0 <= 0:
        raise InvalidParams("tau0 must be positive")
    c, l1 = float(F.singular_cut), float(params.lambda1)

    def roof(q):
        with np.errstate(divide="ignore"):
            return tau0 - np.log(np.abs(q[..., 0] - c)) / l1

    S = SuspensionFlow(F, roof, tau0=tau0, params=params, name=f"lorenz-roof-{F.name}")
    if check_orbit:
        chains = 64
        orbit = sample_orbit(F, seed=seed, burn_in=500, length=max(2, check_orbit // chains), chains=chains)
        rep = integrability_report(F, orbit, S.roof_xy)["tau"]
        if not rep.converged or not np.isfinite(rep.mean):
            raise InvalidParams(f"roof average did not settle (drift {rep.drift:.3g})")
    return S


def lorenz_suspension(params: SingularityParams, kappa: float = 0.25, tau0: float = DEFAULT_TAU0,
                      check_orbit: Optional[int] = 2**17) -> SuspensionFlow:
    """Lorenz model with exponents taken from ``params`` and its singular roof."""
    F = make_lorenz_model(LorenzModelParams(alpha=params.alpha, beta=params.beta, kappa=kappa))
    return make_lorenz_roof(params, F, tau0, check_orbit)


def _base_step(S: SuspensionFlow, q, k: int):
    try:
        if isinstance(S.base, PiecewiseExpandingMap):
            return eval_base(S.base, q)
        return S.base(q)
    except UndefinedAtCut as exc:
        raise OrbitHitsCut(k, q) from exc


def flow_evolve(S: SuspensionFlow, p: FlowPoint, t) -> FlowPoint:
    """Move ``p`` forward by time ``t >= 0``.

    Base points may be :class:`fractions.Fraction` for exact base orbits of
    the affine families; heights are floats.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    q, h = p.base_point, p.height
    k = 0
    while True:
        rest = S.roof_at(q) - h
        if t < rest:
            return FlowPoint(q, h + t)
        t -= rest
        k += 1
        q = _base_step(S, q, k)
        h = 0


def _dist(q, q0) -> float:
    if isinstance(q, tuple) or np.ndim(q) == 1:
        return max(abs(float(a) - float(b)) for a, b in zip(q, q0))
    return abs(q - q0)


def flow_hitting_time(S: SuspensionFlow, p: FlowPoint, target: FlowPoint, r: float,
                      horizon: float = FLOW_HORIZON):
    """First time ``t >= 0`` at which the flow orbit of ``p`` enters ``B_r(target)``.

    The orbit is advanced roof by roof.  While the base point ``q`` is within
    ``r`` of the target base point, the height ball ``(s* - r, s* + r)`` is
    crossed linearly, so the entry time is solved in closed form.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    q0, s0 = target.base_point, target.height
    q, h = p.base_point, p.height
    elapsed = 0
    k = 0
    while elapsed <= horizon:
        top = S.roof_at(q)
        if _dist(q, q0) < r and s0 + r > h and s0 - r < top:
            hit = elapsed + max(0, s0 - r - h)
            if hit <= horizon:
                return hit
            break
        elapsed += top - h
        k += 1
        q = _base_step(S, q, k)
        h = 0
    raise NotHit(horizon)


# ---------------------------------------------------------------------------
# flow log-law


def _flow_hits(S: SuspensionFlow, starts, heights, q0, s0, radii, horizon, seed, workers):
    """Flow entry times and base-map hitting steps along the same base orbits.

    Segment ``k`` of a sample sits over ``F^k(q)``.  The flow enters the ball
    during that segment if the base point is within ``r`` and the height
    window overlaps; the section time is the first ``k >= 1`` with the base
    point within ``r``.
    """
    q0 = np.asarray(q0, dtype=float)
    F = S.base

    def block(b, lo, hi):
        rng = substream(seed, 2 * 10**6 + b)
        flow = np.full((hi - lo, radii.size), np.nan)
        sec = np.full((hi - lo, radii.size), np.nan)
        q = starts[lo:hi].copy()
        h = heights[lo:hi].copy()
        elapsed = np.zeros(hi - lo)
        active = np.arange(hi - lo)
        imin = int(np.argmin(radii))
        k = 0
        while active.size:
            top = np.asarray(S.roof(q), dtype=float)
            near = (np.abs(q - q0) if q.ndim == 1 else np.max(np.abs(q - q0), axis=-1))[:, None] < radii
            ok = near & (s0 + radii > h[:, None]) & (s0 - radii < top[:, None]) & np.isnan(flow[active])
            if np.any(ok):
                rows, cols = np.nonzero(ok)
                flow[active[rows], cols] = elapsed[rows] + np.maximum(0.0, s0 - radii[cols] - h[rows])
            if k >= 1:
                fresh = near & np.isnan(sec[active])
                rows, cols = np.nonzero(fresh)
                sec[active[rows], cols] = k
            elapsed = elapsed + top - h
            keep = ((np.isnan(flow[active, imin]) & (elapsed <= horizon))
                    | (np.isnan(sec[active, imin]) & (k < horizon)))
            active, q, elapsed = active[keep], q[keep], elapsed[keep]
            if not active.size:
                break
            q, _ = F.step(q, rng)
            h = np.zeros(active.size)
            k += 1
        flow[flow > horizon] = np.nan
        sec[sec > horizon] = np.nan
        return flow, sec

    parts = _run_blocks(block, starts.shape[0], workers)
    return np.concatenate([f for f, _ in parts], axis=0), np.concatenate([s for _, s in parts], axis=0)


@dataclass
class FlowLogLawReport:
    slope_flow: float
    slope_section: float
    radii: np.ndarray
    median_tau_flow: np.ndarray
    median_tau_section: np.ndarray
    missing_flow: np.ndarray
    missing_section: np.ndarray
    dropped: list
    d_formula: Optional[float] = None
    slope_section_independent: Optional[float] = None
    flow_taus: np.ndarray = field(default=None, repr=False)

    def to_csv(self) -> str:
        rows = ["r,median_tau_flow,median_tau_section"]
        rows += [f"{r:.17g},{a:.17g},{b:.17g}"
                 for r, a, b in zip(self.radii, self.median_tau_flow, self.median_tau_section)]
        return "\n".join(rows) + "\n"

    def summary(self) -> dict:
        return {"slope_flow": self.slope_flow, "slope_section": self.slope_section,
                "d_formula": self.d_formula,
                "slope_section_independent": self.slope_section_independent, "dropped_radii": [float(r) for r in self.dropped]}


def sample_flow_points(S: SuspensionFlow, samples: int, seed: int = 0, burn_in: int = DEFAULT_BURN_IN,
                       workers: int = 1, pool: int = 4):
    """Draw points from the suspended invariant measure.

    Base points come from a pool of ``pool * samples`` orbit points and are
    resampled with weights proportional to the roof; heights are uniform
    below the roof.
    """
    orbit = sample_orbit(S.base, seed=seed, burn_in=burn_in, length=1, chains=pool * samples, workers=workers)
    cand = orbit.points[:, 0]
    w = np.asarray(S.roof(cand), dtype=float)
    rng = substream(seed, 3 * 10**6)
    idx = rng.choice(cand.shape[0], size=samples, replace=True, p=w / w.sum())
    q = cand[idx]
    return q, rng.random(samples) * w[idx]


def flow_loglaw(S: SuspensionFlow, x0: FlowPoint, radii: Sequence[float], samples: int = 200,
                horizon: float = FLOW_HORIZON, seed: int = 0, burn_in: int = DEFAULT_BURN_IN,
                workers: int = 1, independent_section: bool = False) -> FlowLogLawReport:
    """Flow and section log-law slopes at ``x0``.

    The flow slope regresses the median ``log tau_flow`` against ``-log r``;
    the section slope does the same for base-map hitting steps along the same
    base orbits, so the two differ only through the roof sums.  Both estimate
    the local dimension of the base invariant measure.  With
    ``independent_section`` the base exponent is also estimated from fresh
    samples by :func:`loglaw_exponent`.  The
    target height must stay at least ``max(radii)`` away from ``0`` and from
    the roof.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size < 5:
        raise ValueError("need at least 5 radii")
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if S.params is not None and S.params.lambda1 + S.params.lambda2 >= 0:
        raise InvalidParams("the flow log-law needs lambda1 + lambda2 < 0")
    q0 = np.asarray(x0.base_point, dtype=float)
    c = getattr(S.base, "singular_cut", None)
    if c is not None and q0[0] == c:
        raise OnStableManifold("target lies on the stable manifold of the singularity")
    rmax = float(radii.max())
    top = S.roof_at(q0)
    if not rmax <= x0.height <= top - rmax:
        raise InvalidParams(f"target height must lie in [{rmax}, roof - {rmax}]")

    starts, heights = sample_flow_points(S, samples, seed, burn_in, workers)
    flow_taus, sec_taus = _flow_hits(S, starts, heights, q0, float(x0.height), radii, horizon, seed, workers)
    fl = _loglaw_fit(radii, flow_taus)
    sec = _loglaw_fit(radii, sec_taus)
    independent = None
    if independent_section:
        independent = loglaw_exponent(S.base, q0, radii, samples, int(min(horizon, DEFAULT_HORIZON)),
                                      seed + 1, burn_in, workers).slope
    d_formula = None
    if isinstance(S.base, SkewProductMap):
        orb = sample_orbit(S.base, seed=seed, burn_in=1000, length=256, chains=BLOCK, workers=workers)
        d_formula = dimension_formula(S.base, orb)
    return FlowLogLawReport(fl.slope, sec.slope, radii, np.exp(fl.medians), np.exp(sec.medians),
                            fl.missing, sec.missing, sorted(set(fl.dropped) | set(sec.dropped)),
                            d_formula, independent, flow_taus)
