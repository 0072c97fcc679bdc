"""Experiment runners behind the command line.

Each runner takes a parsed :class:`ExperimentConfig` and returns an
:class:`ExperimentResult` with CSV tables, a JSON-ready summary, warnings for
the manifest and any invariant violations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acceptance import interior_orbit_points, lipschitz_bump, norm_audit
from .config import ExperimentConfig
from .ergodic import (correlation_series, dimension_formula, local_dimension, loglaw_exponent, sample_orbit,
                      substream)
from .errors import ConfigError
from .flow import FlowPoint, SingularityParams, constant_roof, flow_loglaw, make_lorenz_roof
from .maps import LorenzModelParams, PiecewiseExpandingMap, SkewProductMap
from .output import csv_text
from .transfer import convergence_rate, invariant_density, ulam_matrix

OBSERVABLES_1D = {
    "x": lambda x: x,
    "exp": lambda x: np.exp(x),
    "sin2pi": lambda x: np.sin(2 * np.pi * x),
    "cos2pi": lambda x: np.cos(2 * np.pi * x),
    "one": lambda x: np.ones_like(np.asarray(x, dtype=float)),
    "bump": lambda x: np.maximum(0.0, 1.0 - 2.0 * np.abs(x - 0.5)),
}

OBSERVABLES_2D = {
    "x": lambda x, y: x,
    "y": lambda x, y: y,
    "xy": lambda x, y: x * y,
    "bump": lipschitz_bump,
}


@dataclass
class ExperimentResult:
    csvs: dict
    summary: dict
    warnings: list = field(default_factory=list)
    violations: list = field(default_factory=list)


def _interval_map(cfg: ExperimentConfig) -> PiecewiseExpandingMap:
    T = cfg.build_map()
    if not isinstance(T, PiecewiseExpandingMap):
        raise ConfigError(f"experiment {cfg.experiment!r} needs an interval map, got {cfg.map_family!r}",
                          key="family")
    return T


def _observable(name: str, dim: int):
    table = OBSERVABLES_2D if dim == 2 else OBSERVABLES_1D
    if name not in table:
        raise ConfigError(f"observable {name!r} not available for a {dim}-dimensional map", key=name)
    return table[name]


def _target(cfg: ExperimentConfig, F, seed: int, margin: float):
    x0 = cfg.knobs.get("x0", ())
    if x0:
        if len(x0) != F.dim:
            raise ConfigError(f"x0 needs {F.dim} coordinates", key="x0")
        return np.array(x0) if F.dim == 2 else float(x0[0])
    orbit = sample_orbit(F, seed=seed, burn_in=1000, length=1, chains=1024)
    q = interior_orbit_points(orbit, 1, margin, substream(seed, 4 * 10**6))[0]
    return q if F.dim == 2 else float(q)


def _orbit_warnings(orbit) -> list:
    return [f"{orbit.nudged} of {orbit.steps} iterates nudged off a cut"] if orbit.nudged else []


def run_ulam(cfg: ExperimentConfig, workers: int) -> ExperimentResult:
    T = _interval_map(cfg)
    k = cfg.knobs
    rep = invariant_density(ulam_matrix(T, k["bins"]), tol=k["tol"], max_iter=k["max_iter"], T=T)
    dens = rep.invariant_density
    summary = {"leading_eigenvalue": rep.leading_eigenvalue, "second_modulus": rep.second_modulus,
               "residual": rep.residual, "iterations": rep.iterations, "pf_residual": rep.pf_residual,
               "flags": rep.flags}
    violations = []
    if abs(dens.total_mass - 1.0) > 1e-10:
        violations.append(f"density mass {dens.total_mass} differs from 1")
    if np.any(dens.values < -1e-12):
        violations.append("negative density values")
    return ExperimentResult({"density.csv": dens.to_csv()}, summary, list(rep.flags), violations)


def run_convergence(cfg: ExperimentConfig, workers: int) -> ExperimentResult:
    T = _interval_map(cfg)
    k = cfg.knobs
    fit = convergence_rate(T, OBSERVABLES_1D[k["f0"]], OBSERVABLES_1D[k["g"]], k["lags"], k["bins"], skip=k["skip"])
    summary = {"rate": fit.rate, "r2": fit.r2, "window": [int(w) for w in fit.window]}
    violations = [] if fit.rate <= 1.0 else [f"fitted rate {fit.rate} exceeds 1"]
    return ExperimentResult({"series.csv": csv_text(["lag", "term"], enumerate(fit.series))}, summary, [], violations)


def run_correlations(cfg: ExperimentConfig, workers: int) -> ExperimentResult:
    F = cfg.build_map()
    k = cfg.knobs
    f, g = _observable(k["f"], F.dim), _observable(k["g"], F.dim)
    orbit = sample_orbit(F, seed=cfg.seed, burn_in=k["burn_in"], length=k["length"], chains=k["chains"],
                         workers=workers)
    ds = correlation_series(f, g, orbit, k["lags"], skip=k["skip"])
    warnings = _orbit_warnings(orbit)
    if len(ds.window) < 3:
        warnings.append(f"fit window has only {len(ds.window)} lags above the noise floor")
    return ExperimentResult({"correlations.csv": ds.to_csv()}, ds.summary(), warnings)


def run_loglaw(cfg: ExperimentConfig, workers: int) -> ExperimentResult:
    F = cfg.build_map()
    k = cfg.knobs
    radii = cfg.radii()
    x0 = _target(cfg, F, cfg.seed, max(radii))
    rep = loglaw_exponent(F, x0, radii, k["samples"], k["horizon"], cfg.seed, k["burn_in"], workers)
    summary = rep.summary()
    summary["x0"] = np.atleast_1d(x0).tolist()
    if isinstance(F, SkewProductMap):
        orbit = sample_orbit(F, seed=cfg.seed, burn_in=1000, length=256, chains=1024, workers=workers)
        summary["d_formula"] = dimension_formula(F, orbit)
    warnings = [f"radius {r:.17g} dropped (more than 20% NotHit)" for r in rep.dropped]
    warnings += [f"radius {r:.17g}: {m:.3%} of samples NotHit" for r, m in zip(rep.radii, rep.missing) if m > 0]
    return ExperimentResult({"loglaw.csv": rep.to_csv()}, summary, warnings)


def run_dimension(cfg: ExperimentConfig, workers: int) -> ExperimentResult:
    F = cfg.build_map()
    k = cfg.knobs
    radii = cfg.radii()
    orbit = sample_orbit(F, seed=cfg.seed, burn_in=k["burn_in"], length=k["length"], chains=k["chains"],
                         workers=workers)
    x0 = _target(cfg, F, cfg.seed, max(radii))
    rep = local_dimension(orbit, x0, radii, min_visits=k["min_visits"])
    if isinstance(F, SkewProductMap):
        rep.formula_value = dimension_formula(F, orbit)
    summary = rep.summary()
    summary["x0"] = np.atleast_1d(x0).tolist()
    warnings = _orbit_warnings(orbit)
    warnings += [f"radius {r:.17g} has fewer than {k['min_visits']} visits" for r in rep.radii[~rep.used]]
    return ExperimentResult({"dimension.csv": rep.to_csv()}, summary, warnings)


def run_flow_loglaw(cfg: ExperimentConfig, workers: int) -> ExperimentResult:
    F = cfg.build_map()
    k = cfg.knobs
    radii = cfg.radii()
    if k["roof"] == "lorenz":
        if cfg.map_family != "lorenz":
            raise ConfigError("roof = lorenz needs map family lorenz", key="roof")
        params = SingularityParams(k["lambda1"], k["lambda2"], k["lambda3"])
        base = LorenzModelParams(**cfg.map_params)
        # the exponents of the map must come from the same eigenvalues as the roof
        for name, want in (("alpha", params.alpha), ("beta", params.beta)):
            if abs(getattr(base, name) - want) > 1e-12:
                raise ConfigError(f"[map] {name} = {getattr(base, name)} does not match the eigenvalues "
                                  f"({name} = {want})", key=name)
        S = make_lorenz_roof(params, F, k["tau0"], seed=cfg.seed)
    else:
        S = constant_roof(F, k["tau0"])
    x0 = _target(cfg, F, cfg.seed, max(radii))
    rep = flow_loglaw(S, FlowPoint(x0, k["height"]), radii, k["samples"], k["horizon"], cfg.seed,
                      k["burn_in"], workers)
    summary = rep.summary()
    summary["x0"] = np.atleast_1d(x0).tolist()
    warnings = [f"radius {r:.17g} dropped (more than 20% NotHit)" for r in rep.dropped]
    return ExperimentResult({"flow_loglaw.csv": rep.to_csv()}, summary, warnings)


def run_norms_audit(cfg: ExperimentConfig, workers: int) -> ExperimentResult:
    k = cfg.knobs
    res = norm_audit(cfg.seed, k["grid"], k["samples"], k["trials"], k["p"])
    violations = [c.name for c in res.checks if not c.passed]
    return ExperimentResult(res.csvs, res.as_dict(), [], violations)


RUNNERS = {
    "ulam": run_ulam,
    "convergence": run_convergence,
    "correlations": run_correlations,
    "loglaw-map": run_loglaw,
    "dimension": run_dimension,
    "flow-loglaw": run_flow_loglaw,
    "norms-audit": run_norms_audit,
}
