"""Acceptance suites: analytic oracles and cross-estimator checks at desk scale.

Each suite returns a :class:`SuiteResult` holding named checks and the CSV
tables it produced.  Verdicts contain no timings, so rerunning a suite with
the same seed gives an identical verdict file.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .ergodic import (correlation_series, dimension_formula, integrability_report, local_dimension,
                      loglaw_exponent, sample_orbit)
from .flow import (FlowPoint, SingularityParams, constant_roof, flow_loglaw, lorenz_suspension,
                   linear_flow, return_time_integral, singular_return)
from .maps import LorenzModelParams, doubling_map, lorenz_base, make_affine_skew, make_lorenz_model
from .measures import (DensityGrid, EmpiricalMeasure1D, EmpiricalMeasure2D, pushforward, project_pi,
                       w1_distance)
from .norms import (Observable1D, Observable2D, compare_variations, norm_p_r, sup_norm_2d,
                    universal_p_variation, var_p_r, var_square, vertical_lip_norm)
from .output import csv_text
from .transfer import (convergence_rate, invariant_density, lasota_yorke_probe, pf_apply, pf_power_density,
                       random_piecewise_density, ulam_matrix)

LORENZ = LorenzModelParams(alpha=0.75, beta=2.0, kappa=0.25)
AFFINE_DIM = 1.0 + np.log(2.0) / np.log(3.0)


@dataclass
class Check:
    criterion: int
    name: str
    value: float
    threshold: str
    passed: bool

    def as_dict(self):
        return {"criterion": self.criterion, "name": self.name, "value": self.value,
                "threshold": self.threshold, "passed": bool(self.passed)}


@dataclass
class SuiteResult:
    suite: str
    criterion: int
    checks: list = field(default_factory=list)
    csvs: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value, threshold: str, passed) -> None:
        self.checks.append(Check(self.criterion, name, float(value), threshold, bool(passed)))

    def as_dict(self):
        return {"suite": self.suite, "criterion": self.criterion, "passed": self.passed,
                "checks": [c.as_dict() for c in self.checks]}


def suite_rng(seed: int, criterion: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(7, criterion)))


def _random_empirical(rng, size=None) -> EmpiricalMeasure1D:
    n = int(rng.integers(1, 200)) if size is None else size
    a, b = rng.uniform(0.3, 5.0, 2)
    return EmpiricalMeasure1D(rng.beta(a, b, n))


def _random_pl(rng, pieces: int = 8):
    """Random continuous piecewise-linear function with its Lipschitz constant."""
    knots = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, pieces - 1)), [1.0]])
    vals = rng.normal(size=knots.size)
    slopes = np.diff(vals) / np.maximum(np.diff(knots), 1e-300)
    return (lambda x: np.interp(x, knots, vals)), float(np.max(np.abs(slopes))), knots


# ---------------------------------------------------------------------------
# 1. Wasserstein distance


def suite_w1(seed: int = 0, workers: int = 1) -> SuiteResult:
    res = SuiteResult("w1", 1)
    rng = suite_rng(seed, 1)

    err = abs(w1_distance(EmpiricalMeasure1D([0.2]), EmpiricalMeasure1D([0.7])) - 0.5)
    res.add("delta pair |a-b|", err, "<= 1e-15", err <= 1e-15)
    half = DensityGrid(np.r_[np.full(512, 2.0), np.zeros(512)])
    err = abs(w1_distance(DensityGrid.uniform(1024), half) - 0.25)
    res.add("uniform vs uniform on [0,1/2]", err, "<= 1e-12", err <= 1e-12)

    rows = []
    sym_bad = tri_worst = ident_worst = 0.0
    for k in range(100):
        a, b, c = (_random_empirical(rng) for _ in range(3))
        ab, ba, bc, ac = w1_distance(a, b), w1_distance(b, a), w1_distance(b, c), w1_distance(a, c)
        sym_bad = max(sym_bad, abs(ab - ba))
        tri_worst = max(tri_worst, ac - ab - bc)
        ident_worst = max(ident_worst, w1_distance(a, a))
        rows.append((k, len(a), len(b), len(c), ab, ba, bc, ac))
    res.csvs["w1_triples.csv"] = csv_text(["trial", "n_a", "n_b", "n_c", "w_ab", "w_ba", "w_bc", "w_ac"], rows)
    res.add("symmetry (max |W(a,b)-W(b,a)|)", sym_bad, "== 0", sym_bad == 0.0)
    res.add("triangle (max excess)", tri_worst, "<= 1e-12", tri_worst <= 1e-12)
    res.add("identity (max W(a,a))", ident_worst, "== 0", ident_worst == 0.0)

    # contraction of a 1/3 fiber map on a single leaf
    F = make_affine_skew(1.0 / 3.0)
    worst = -np.inf
    rows = []
    for k in range(50):
        x0 = rng.uniform(0.05, 0.95)
        n = int(rng.integers(5, 200))
        mu = EmpiricalMeasure2D(np.column_stack([np.full(n, x0), rng.beta(*rng.uniform(0.3, 5, 2), n)]))
        nu = EmpiricalMeasure2D(np.column_stack([np.full(n, x0), rng.beta(*rng.uniform(0.3, 5, 2), n)]))
        before = w1_distance(EmpiricalMeasure1D(mu.points[:, 1]), EmpiricalMeasure1D(nu.points[:, 1]))
        fmu, _ = pushforward(F, mu, 1)
        fnu, _ = pushforward(F, nu, 1)
        after = w1_distance(EmpiricalMeasure1D(fmu.points[:, 1]), EmpiricalMeasure1D(fnu.points[:, 1]))
        worst = max(worst, after - (F.lam * before + 1e-10))
        rows.append((k, before, after))
    res.csvs["w1_contraction.csv"] = csv_text(["trial", "w_before", "w_after"], rows)
    res.add("contraction W(F*mu,F*nu) - (W/3 + 1e-10)", worst, "<= 0", worst <= 0.0)

    # convex combinations: grid mixtures and concatenated empirical mixtures
    worst = -np.inf
    for _ in range(50):
        k = int(rng.integers(2, 5))
        w = rng.dirichlet(np.ones(k))
        mus = [DensityGrid.from_function(_positive_pl(rng), 256) for _ in range(k)]
        nus = [DensityGrid.from_function(_positive_pl(rng), 256) for _ in range(k)]
        mix_mu = DensityGrid(sum(wi * m.values for wi, m in zip(w, mus)))
        mix_nu = DensityGrid(sum(wi * m.values for wi, m in zip(w, nus)))
        lhs = w1_distance(mix_mu, mix_nu)
        rhs = sum(wi * w1_distance(m, n) for wi, m, n in zip(w, mus, nus))
        worst = max(worst, lhs - rhs)
    for _ in range(50):
        sizes = rng.integers(1, 60, size=int(rng.integers(2, 5)))
        parts = [(_random_empirical(rng, int(s)), _random_empirical(rng, int(s))) for s in sizes]
        lhs = w1_distance(EmpiricalMeasure1D(np.concatenate([m.samples for m, _ in parts])),
                          EmpiricalMeasure1D(np.concatenate([n.samples for _, n in parts])))
        rhs = sum(s / sizes.sum() * w1_distance(m, n) for s, (m, n) in zip(sizes, parts))
        worst = max(worst, lhs - rhs)
    res.add("convexity (max excess)", worst, "<= 1e-12", worst <= 1e-12)

    # Lipschitz test functions
    worst = -np.inf
    for _ in range(100):
        a, b = _random_empirical(rng), _random_empirical(rng)
        g, lip, _ = _random_pl(rng)
        worst = max(worst, abs(a.integrate(g) - b.integrate(g)) - lip * w1_distance(a, b))
    res.add("Lipschitz test bound (max excess)", worst, "<= 1e-12", worst <= 1e-12)
    return res


def _positive_pl(rng):
    g, _, _ = _random_pl(rng)
    return lambda x: np.abs(g(x)) + 0.1


# ---------------------------------------------------------------------------
# 2. transfer operator


def lorenz_grid_gaps(sizes=(1024, 2048, 4096), fine: int = 2**16) -> tuple[list, list]:
    """L1 gaps between Lorenz-base invariant densities on consecutive grids.

    Returns ``(pf_gaps, ulam_gaps)``.  The first compares fixed densities of
    the interpolating transfer-operator discretization as functions
    (interpolated through the bin midpoints, integrated on ``fine`` cells).
    The second compares Ulam densities as piecewise-constant functions.
    """
    T = lorenz_base(LORENZ.alpha)
    x = (np.arange(fine) + 0.5) / fine
    pf = [pf_power_density(T, n).interp(x) for n in sizes]
    pf_gaps = [float(np.mean(np.abs(b - a))) for a, b in zip(pf[:-1], pf[1:])]
    ulam = [invariant_density(ulam_matrix(T, n)).invariant_density.values for n in sizes]
    ulam_gaps = [float(np.mean(np.abs(b - np.repeat(a, b.size // a.size)))) for a, b in zip(ulam[:-1], ulam[1:])]
    return pf_gaps, ulam_gaps


def suite_transfer(seed: int = 0, workers: int = 1) -> SuiteResult:
    res = SuiteResult("transfer", 2)
    T = doubling_map()
    rep = invariant_density(ulam_matrix(T, 1024), T=T)
    l1 = float(np.mean(np.abs(rep.invariant_density.values - 1.0)))
    res.csvs["doubling_density.csv"] = rep.invariant_density.to_csv()
    res.add("doubling Ulam density L1 from 1", l1, "<= 1e-10", l1 <= 1e-10)

    x = np.linspace(0.0, 1.0, 4097)
    cos = pf_apply(T, lambda t: np.cos(2 * np.pi * t))
    err = float(np.max(np.abs(cos(x))))
    res.add("P cos(2 pi x) sup", err, "<= 1e-12", err <= 1e-12)

    gaps, ulam_gaps = lorenz_grid_gaps()
    res.csvs["lorenz_grid_gaps.csv"] = csv_text(
        ["coarse_bins", "fine_bins", "l1_gap", "ulam_l1_gap"],
        [(1024, 2048, gaps[0], ulam_gaps[0]), (2048, 4096, gaps[1], ulam_gaps[1])])
    ratio = gaps[1] / gaps[0]
    res.add("Lorenz base gap ratio (2048->4096)/(1024->2048)", ratio, "<= 0.5", ratio <= 0.5)

    fit = convergence_rate(T, lambda t: np.exp(t), lambda t: t, N=30, bins=2048)
    res.csvs["doubling_convergence.csv"] = csv_text(["lag", "term"], enumerate(fit.series))
    res.add("doubling convergence rate", fit.rate, "in (0.45, 0.55)", 0.45 < fit.rate < 0.55)
    return res


# ---------------------------------------------------------------------------
# 3. Lasota-Yorke probe


def suite_ly(seed: int = 0, workers: int = 1) -> SuiteResult:
    res = SuiteResult("ly", 3)
    d = lasota_yorke_probe(doubling_map(), p=1.0, trials=50, seed=seed)
    res.add("doubling p=1 beta", d.beta, "<= 0.6 and feasible", d.feasible and d.beta <= 0.6)
    lz = lasota_yorke_probe(lorenz_base(LORENZ.alpha), p=2.0, trials=50, seed=seed)
    res.add("Lorenz base p=2 beta", lz.beta, "< 1 and feasible", lz.feasible and lz.beta < 1.0)
    res.csvs["ly_probe.csv"] = csv_text(["map", "p", "beta", "C"],
                                        [("doubling", 1, d.beta, d.C), ("lorenz-base", 2, lz.beta, lz.C)])
    return res


# ---------------------------------------------------------------------------
# 4. norm inequalities


def random_lipschitz_2d(rng, terms: int = 3) -> tuple[Observable2D, float]:
    """Random smooth ``f`` on the square with a sup-metric Lipschitz bound."""
    c = rng.normal(size=terms)
    om = rng.uniform(-8, 8, terms)
    nu = rng.uniform(-8, 8, terms)
    ph = rng.uniform(0, 2 * np.pi, terms)
    a = rng.normal()

    def f(x, y):
        s = a * x * y
        for k in range(terms):
            s = s + c[k] * np.sin(om[k] * x + nu[k] * y + ph[k])
        return s

    lip = float(np.sum(np.abs(c) * (np.abs(om) + np.abs(nu))) + 2 * abs(a))
    return Observable2D(f, lipschitz=lip), lip


def random_pl_1d(rng) -> Observable1D:
    g, _, knots = _random_pl(rng, int(rng.integers(2, 12)))
    return Observable1D(g, turning_points=tuple(knots[1:-1]))


def norm_audit(seed: int = 0, grid: int = 256, samples: int = 2**14, trials: int = 20, p: float = 2.0,
               criterion: int = 4) -> SuiteResult:
    res = SuiteResult("norms", criterion)
    rng = suite_rng(seed, 4)

    rows = []
    worst_l4 = worst_lip = -np.inf
    for k in range(trials):
        f, lip = random_lipschitz_2d(rng)
        vs = var_square(f, grid).value
        lhs = var_p_r(project_pi(f), 1.0, 1.0, samples=samples)
        worst_l4 = max(worst_l4, lhs - 2 * vs)
        worst_lip = max(worst_lip, vs - lip)
        rows.append((k, lhs, vs, lip))
    res.csvs["norms_pi.csv"] = csv_text(["trial", "var11_pi_f", "var_square", "lip"], rows)
    res.add("var_{1,1}(pi f) - 2 var_square(f)", worst_l4, "<= 0", worst_l4 <= 0)
    res.add("var_square(f) - Lip(f)", worst_lip, "<= 0", worst_lip <= 0)

    rows = []
    worst = -np.inf
    for k in range(trials):
        h = random_pl_1d(rng)
        sup = float(np.max(np.abs(h(np.linspace(0, 1, 4097)))))
        for r in (0.5, 1.0):
            nrm = norm_p_r(h, 1.0, r, samples=samples).value
            worst = max(worst, sup - 0.5 ** (r - 1) * nrm)
            rows.append((k, r, sup, nrm))
    res.csvs["norms_linf.csv"] = csv_text(["trial", "r", "sup", "norm_1r"], rows)
    res.add("sup|h| - A^(r-1) ||h||_{1,r}", worst, "<= 0", worst <= 0)

    rows = []
    ok = True
    for k in range(trials):
        h = random_piecewise_density(rng)
        for q in (1.0, p):
            ch = compare_variations(h, q, samples=samples)
            ok &= ch.holds and ch.certified
            rows.append((k, q, ch.var_1, ch.var_p_seminorm, ch.var_p_universal))
    res.csvs["norms_chain.csv"] = csv_text(["trial", "p", "var_1_r", "var_p_r", "var_p"], rows)
    res.add("variation chain holds on tagged h", float(ok), "== 1", ok)

    F = make_lorenz_model(LORENZ)
    f = Observable2D(lambda x, y: np.sin(2 * np.pi * x) * (1 + y) / 2 + 0.5 * x * y)
    G = Observable2D(F.fiber)
    m = F.n_branches
    vf, vG = var_square(f, grid).value, var_square(G, grid).value
    nl, sup = vertical_lip_norm(f, grid), sup_norm_2d(f, grid)
    rows = []
    worst = -np.inf
    for n in (1, 2, 3):
        def comp(x, y, n=n):
            p_ = np.stack(np.broadcast_arrays(x, y), axis=-1)
            for _ in range(n):
                p_ = F.apply(p_)
            return f(p_[..., 0], p_[..., 1])
        lhs = var_square(comp, 4 * grid).value
        geo = sum(m ** j for j in range(1, n))
        rhs = m ** n * vf + geo * (vG * nl + 2 * m * sup)
        worst = max(worst, lhs - rhs)
        rows.append((n, lhs, rhs))
    res.csvs["norms_growth.csv"] = csv_text(["n", "var_square_f_Fn", "bound"], rows)
    res.add("var_square(f o F^n) - bound, n<=3", worst, "<= 0", worst <= 0)
    return res


def suite_norms(seed: int = 0, workers: int = 1) -> SuiteResult:
    return norm_audit(seed)


# ---------------------------------------------------------------------------
# 5. correlations


def lipschitz_bump(x, y):
    return np.maximum(0.0, 1.0 - 2.0 * np.maximum(np.abs(x - 0.5), np.abs(y - 0.5)))


def suite_correlation(seed: int = 0, workers: int = 1, chains: int = 2000, length: int = 5000) -> SuiteResult:
    res = SuiteResult("correlation", 5)
    F = make_lorenz_model(LORENZ)
    orbit = sample_orbit(F, seed=seed, burn_in=1000, length=length, chains=chains, workers=workers)
    ds = correlation_series(lipschitz_bump, lipschitz_bump, orbit, max_lag=40)
    res.csvs["lorenz_correlations.csv"] = ds.to_csv()
    res.add("Lorenz rate", ds.fitted_rate, "< 1", ds.fitted_rate < 1.0)
    res.add("Lorenz fit R^2", ds.fit_quality, ">= 0.9", ds.fit_quality >= 0.9)
    res.add("Lorenz fit window length", len(ds.window), ">= 3", len(ds.window) >= 3)
    del orbit

    A = make_affine_skew(1.0 / 3.0)
    orbit = sample_orbit(A, seed=seed + 1, burn_in=1000, length=2000, chains=2000, workers=workers)
    obs = lambda x, y: x
    ds_a = correlation_series(obs, obs, orbit, max_lag=20)
    fit = convergence_rate(doubling_map(), lambda t: t + 0.5, lambda t: t, N=30, bins=2048)
    res.csvs["affine_correlations.csv"] = ds_a.to_csv()
    diff = abs(ds_a.fitted_rate - fit.rate)
    res.add("affine orbit rate vs transfer-operator rate", diff, "<= 0.1", diff <= 0.1)
    return res


# ---------------------------------------------------------------------------
# 6. dimension


def interior_orbit_points(orbit, k: int, margin: float, rng) -> np.ndarray:
    """``k`` orbit points whose x-coordinate is at least ``margin`` from the edges."""
    pts = orbit.flat()
    xs = pts[:, 0] if pts.ndim == 2 else pts
    idx = np.nonzero((xs > margin) & (xs < 1 - margin))[0]
    return pts[rng.choice(idx, size=k, replace=False)]


def suite_dimension(seed: int = 0, workers: int = 1) -> SuiteResult:
    res = SuiteResult("dimension", 6)
    rng = suite_rng(seed, 6)
    radii = 2.0 ** -np.arange(5, 12)

    A = make_affine_skew(1.0 / 3.0)
    orbit = sample_orbit(A, seed=seed, burn_in=500, length=2000, chains=2048, workers=workers)
    rows = []
    worst = 0.0
    for x0 in interior_orbit_points(orbit, 5, radii[0], rng):
        d = local_dimension(orbit, x0, radii).slope
        worst = max(worst, abs(d - AFFINE_DIM))
        rows.append((x0[0], x0[1], d))
    res.csvs["affine_local_dimension.csv"] = csv_text(["x", "y", "slope"], rows)
    res.add("affine local dimension max |d - 1.63093|", worst, "<= 0.15", worst <= 0.15)
    form = dimension_formula(A, orbit)
    rep = integrability_report(A, orbit)
    drift = max(rep["psi"].drift, rep["phi"].drift)
    res.add("affine formula |d - 1.63093|", abs(form - AFFINE_DIM), "<= 1e-12", abs(form - AFFINE_DIM) <= 1e-12)
    res.add("affine Birkhoff drift", drift, "<= 1e-3", drift <= 1e-3)
    del orbit

    F = make_lorenz_model(LORENZ)
    orbit = sample_orbit(F, seed=seed, burn_in=1000, length=2000, chains=2048, workers=workers)
    form = dimension_formula(F, orbit)
    rows = []
    slopes = []
    for x0 in interior_orbit_points(orbit, 5, radii[0], rng):
        d = local_dimension(orbit, x0, 2.0 ** -np.arange(4, 12)).slope
        slopes.append(d)
        rows.append((x0[0], x0[1], d))
    res.csvs["lorenz_local_dimension.csv"] = csv_text(["x", "y", "slope"], rows)
    rel = abs(np.mean(slopes) - form) / form
    res.add("Lorenz mean box slope vs formula (relative)", rel, "<= 0.10", rel <= 0.10)
    res.add("Lorenz formula in (1, 2)", form, "in (1, 2)", 1.0 < form < 2.0)
    return res


# ---------------------------------------------------------------------------
# 7. map log-law


def suite_loglaw(seed: int = 0, workers: int = 1) -> SuiteResult:
    res = SuiteResult("loglaw", 7)
    rng = suite_rng(seed, 7)
    radii = 2.0 ** -np.arange(4, 11)
    rows = []

    T = doubling_map()
    x0 = float(rng.uniform(0.2, 0.8))
    rep = loglaw_exponent(T, x0, radii, samples=200, seed=seed, burn_in=1000, workers=workers)
    rows.append(("doubling", x0, np.nan, rep.slope))
    res.add("doubling slope", rep.slope, "1 +- 0.15", abs(rep.slope - 1.0) <= 0.15)

    A = make_affine_skew(1.0 / 3.0)
    orbit = sample_orbit(A, seed=seed, burn_in=500, length=1, chains=4096)
    slopes = []
    for q in interior_orbit_points(orbit, 5, radii[0], rng):
        rep = loglaw_exponent(A, q, radii, samples=200, seed=seed, burn_in=1000, workers=workers)
        slopes.append(rep.slope)
        rows.append(("affine-skew", q[0], q[1], rep.slope))
    mean = float(np.mean(slopes))
    res.add("affine mean slope", mean, "1.631 +- 0.15", abs(mean - AFFINE_DIM) <= 0.15)

    F = make_lorenz_model(LORENZ)
    orbit = sample_orbit(F, seed=seed, burn_in=1000, length=256, chains=2048, workers=workers)
    form = dimension_formula(F, orbit)
    slopes = []
    for q in interior_orbit_points(orbit, 5, radii[0], rng):
        rep = loglaw_exponent(F, q, radii, samples=200, seed=seed, burn_in=1000, workers=workers)
        slopes.append(rep.slope)
        rows.append(("lorenz", q[0], q[1], rep.slope))
    res.csvs["loglaw_slopes.csv"] = csv_text(["map", "x", "y", "slope"], rows)
    diff = abs(float(np.mean(slopes)) - form)
    res.add("Lorenz mean slope vs formula", diff, "<= 0.15", diff <= 0.15)
    return res


# ---------------------------------------------------------------------------
# 8. flow


def integrate_to_exit(params: SingularityParams, x1: float, x2: float):
    """Numerically integrate the linear field from ``(x1, x2, 1)`` until ``|x| = 1``."""
    lam = params.eigenvalues

    def exit_event(t, p):
        return abs(p[0]) - 1.0

    exit_event.terminal = True
    sol = solve_ivp(lambda t, p: lam * p, (0.0, 200.0), [x1, x2, 1.0], method="DOP853",
                    rtol=1e-13, atol=1e-16, events=exit_event)
    return sol.y_events[0][0]


def suite_flow(seed: int = 0, workers: int = 1) -> SuiteResult:
    res = SuiteResult("flow", 8)
    rng = suite_rng(seed, 8)
    P = SingularityParams(1.0, -2.0, -0.5)

    worst = 0.0
    for _ in range(100):
        p0 = rng.uniform(-1, 1, 3)
        s, t = rng.uniform(0, 2, 2)
        a = linear_flow(P, p0, s + t)
        b = linear_flow(P, linear_flow(P, p0, s), t)
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300))))
    res.add("linear_flow group property (relative)", worst, "<= 1e-12", worst <= 1e-12)

    worst = 0.0
    for _ in range(20):
        x1 = float(rng.uniform(0.01, 1.0) * rng.choice([-1, 1]))
        x2 = float(rng.uniform(-1, 1))
        (y2, y3), side = singular_return(P, (x1, x2))
        ex = integrate_to_exit(P, x1, x2)
        worst = max(worst, abs(ex[1] - y2), abs(ex[2] - y3), abs(ex[0] - side))
    res.add("singular_return vs integration", worst, "<= 1e-10", worst <= 1e-10)

    worst = 0.0
    for delta in (0.1, 0.5, 1.0):
        q, closed = return_time_integral(P, delta)
        worst = max(worst, abs(q - closed))
    res.add("return-time integral vs closed form", worst, "<= 1e-6", worst <= 1e-6)

    radii = 2.0 ** -np.arange(4, 11)
    rows = []
    A = make_affine_skew(1.0 / 3.0)
    orbit = sample_orbit(A, seed=seed, burn_in=500, length=1, chains=4096)
    q = interior_orbit_points(orbit, 1, radii[0], rng)[0]
    rep = flow_loglaw(constant_roof(A, 1.0), FlowPoint(q, 0.5), radii, samples=200, seed=seed, workers=workers)
    rows.append(("affine-skew", rep.slope_flow, rep.slope_section, AFFINE_DIM + 1))
    res.add("affine flow vs section slope", abs(rep.slope_flow - rep.slope_section), "<= 0.1",
            abs(rep.slope_flow - rep.slope_section) <= 0.1)
    res.add("affine flow slope vs d_flow - 1", abs(rep.slope_flow - AFFINE_DIM), "<= 0.15",
            abs(rep.slope_flow - AFFINE_DIM) <= 0.15)
    res.csvs["flow_affine.csv"] = rep.to_csv()

    D = doubling_map()
    x0 = float(rng.uniform(0.2, 0.8))
    rep = flow_loglaw(constant_roof(D, 1.0), FlowPoint(x0, 0.5), radii, samples=200, seed=seed, workers=workers)
    rows.append(("doubling", rep.slope_flow, rep.slope_section, 2.0))
    res.add("doubling flow vs section slope", abs(rep.slope_flow - rep.slope_section), "<= 0.1",
            abs(rep.slope_flow - rep.slope_section) <= 0.1)
    res.add("doubling flow slope vs d_flow - 1", abs(rep.slope_flow - 1.0), "<= 0.15",
            abs(rep.slope_flow - 1.0) <= 0.15)
    res.csvs["flow_doubling.csv"] = rep.to_csv()

    L = lorenz_suspension(SingularityParams(1.0, -LORENZ.beta, -LORENZ.alpha), kappa=LORENZ.kappa)
    orbit = sample_orbit(L.base, seed=seed, burn_in=1000, length=1, chains=4096)
    q = interior_orbit_points(orbit, 1, radii[0], rng)[0]
    rep = flow_loglaw(L, FlowPoint(q, 0.5), radii, samples=200, seed=seed, workers=workers)
    rows.append(("lorenz", rep.slope_flow, rep.slope_section, np.nan if rep.d_formula is None else rep.d_formula + 1))
    res.add("Lorenz flow vs section slope", abs(rep.slope_flow - rep.slope_section), "<= 0.1",
            abs(rep.slope_flow - rep.slope_section) <= 0.1)
    res.csvs["flow_lorenz.csv"] = rep.to_csv()
    res.csvs["flow_slopes.csv"] = csv_text(["base", "slope_flow", "slope_section", "d_flow"], rows)
    return res


# ---------------------------------------------------------------------------
# 9. determinism


DETERMINISM_SUITES = ("w1", "transfer", "norms", "correlation", "dimension")


def suite_determinism(seed: int = 0, workers: int = 1) -> SuiteResult:
    """Rerun suites with one and with several workers and compare the CSV bytes."""
    res = SuiteResult("determinism", 9)
    many = max(2, workers if workers > 1 else 4)
    for name in DETERMINISM_SUITES:
        a = SUITES[name](seed, 1)
        b = SUITES[name](seed, many)
        same = a.csvs.keys() == b.csvs.keys() and all(a.csvs[k] == b.csvs[k] for k in a.csvs)
        res.add(f"{name}: CSVs identical for workers 1 and {many}", float(same), "== 1", same)
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "w1": suite_w1,
    "transfer": suite_transfer,
    "ly": suite_ly,
    "norms": suite_norms,
    "correlation": suite_correlation,
    "dimension": suite_dimension,
    "loglaw": suite_loglaw,
    "flow": suite_flow,
    "determinism": suite_determinism,
}


def run_suites(names, seed: int = 0, workers: int = 1) -> list:
    if names == "all" or names == ["all"]:
        names = list(SUITES)
    elif isinstance(names, str):
        names = [names]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suites {unknown}; expected {list(SUITES)} or 'all'")
    return [SUITES[n](seed, workers) for n in names]
