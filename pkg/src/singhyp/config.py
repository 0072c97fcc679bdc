"""Experiment configuration: flat ``key = value`` text with sections.

Example::

    [map]
    family = lorenz
    alpha = 0.75

    [dimension]
    chains = 512
    length = 2000

Blank lines and ``#`` comments are ignored.  Every key must be known for its
section; unknown sections and keys raise :class:`ConfigError` naming the key
and line.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ConfigError, InvalidParams
from .maps import FAMILIES, make_map

EXPERIMENTS = ("ulam", "convergence", "correlations", "loglaw-map", "dimension", "flow-loglaw", "norms-audit")


@dataclass(frozen=True)
class Knob:
    kind: Callable[[str], Any]
    default: Any
    lo: Any = None
    hi: Any = None
    choices: tuple = ()


def _int(s):
    return int(s, 0)


def _float(s):
    if "/" in s:
        num, den = s.split("/", 1)
        return float(num) / float(den)
    return float(s)


def _floats(s):
    return tuple(_float(v) for v in s.split(",") if v.strip())


def _str(s):
    return s


OBS_1D = ("x", "exp", "sin2pi", "cos2pi", "one", "bump")
OBS_2D = ("x", "y", "xy", "bump")

KNOBS: dict[str, dict[str, Knob]] = {
    "run": {
        "seed": Knob(_int, 0, 0, 2**64 - 1),
    },
    "map": {
        "family": Knob(_str, "doubling", choices=FAMILIES),
        "alpha": Knob(_float, None, 0.5, 1.0),
        "beta": Knob(_float, None, 1.0, 10.0),
        "kappa": Knob(_float, None, 0.0, 0.25),
        "contraction": Knob(_float, None, 0.0, 0.5),
    },
    "ulam": {
        "bins": Knob(_int, 1024, 2, 2**20),
        "tol": Knob(_float, 1e-12, 0.0, 1e-3),
        "max_iter": Knob(_int, 10_000, 1, 10**7),
    },
    "convergence": {
        "bins": Knob(_int, 2048, 16, 2**20),
        "lags": Knob(_int, 30, 2, 10_000),
        "f0": Knob(_str, "exp", choices=OBS_1D),
        "g": Knob(_str, "x", choices=OBS_1D),
        "skip": Knob(_int, 2, 0, 100),
    },
    "correlations": {
        "chains": Knob(_int, 512, 1, 10**7),
        "length": Knob(_int, 5000, 2, 10**9),
        "burn_in": Knob(_int, 1000, 0, 10**8),
        "lags": Knob(_int, 40, 1, 10_000),
        "f": Knob(_str, "bump", choices=OBS_1D + OBS_2D),
        "g": Knob(_str, "bump", choices=OBS_1D + OBS_2D),
        "skip": Knob(_int, 1, 0, 100),
    },
    "loglaw-map": {
        "x0": Knob(_floats, ()),
        "r_min_exp": Knob(_int, 4, 1, 40),
        "r_max_exp": Knob(_int, 10, 1, 40),
        "samples": Knob(_int, 200, 100, 10**7),
        "burn_in": Knob(_int, 1000, 0, 10**8),
        "horizon": Knob(_int, 10**8, 1, 10**12),
    },
    "dimension": {
        "x0": Knob(_floats, ()),
        "chains": Knob(_int, 512, 1, 10**7),
        "length": Knob(_int, 2000, 2, 10**9),
        "burn_in": Knob(_int, 1000, 0, 10**8),
        "r_min_exp": Knob(_int, 4, 1, 40),
        "r_max_exp": Knob(_int, 10, 1, 40),
        "min_visits": Knob(_int, 30, 1, 10**9),
    },
    "flow-loglaw": {
        "roof": Knob(_str, "constant", choices=("constant", "lorenz")),
        "tau0": Knob(_float, 1.0, 0.0, 1e6),
        "lambda1": Knob(_float, 1.0),
        "lambda2": Knob(_float, -2.0),
        "lambda3": Knob(_float, -0.75),
        "x0": Knob(_floats, ()),
        "height": Knob(_float, 0.5, 0.0, 1e6),
        "r_min_exp": Knob(_int, 4, 1, 40),
        "r_max_exp": Knob(_int, 10, 1, 40),
        "samples": Knob(_int, 200, 100, 10**7),
        "burn_in": Knob(_int, 1000, 0, 10**8),
        "horizon": Knob(_float, 1e8, 1.0, 1e12),
    },
    "norms-audit": {
        "grid": Knob(_int, 256, 4, 8192),
        "samples": Knob(_int, 2**14, 64, 2**22),
        "trials": Knob(_int, 20, 1, 10_000),
        "p": Knob(_float, 2.0, 1.0, 100.0),
    },
}


@dataclass
class ExperimentConfig:
    experiment: str
    map_family: str
    map_params: dict
    knobs: dict
    seed: int = 0
    text: str = field(default="", repr=False)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def build_map(self):
        try:
            return make_map(self.map_family, **self.map_params)
        except InvalidParams as exc:
            raise ConfigError(str(exc), key="map") from exc

    def radii(self):
        lo, hi = self.knobs["r_min_exp"], self.knobs["r_max_exp"]
        if hi - lo < 4:
            raise ConfigError("need at least 5 radii (r_max_exp - r_min_exp >= 4)", key="r_max_exp")
        return [2.0 ** -k for k in range(lo, hi + 1)]


def _in_range(knob: Knob, v) -> bool:
    if knob.choices:
        return v in knob.choices
    vals = v if isinstance(v, tuple) else (v,)
    for x in vals:
        if knob.lo is not None and x < knob.lo:
            return False
        if knob.hi is not None and x > knob.hi:
            return False
    return True


def parse_config(text: str, experiment: str) -> ExperimentConfig:
    """Parse config ``text`` for ``experiment``.

    Only the sections ``run``, ``map`` and the experiment's own section are
    allowed.  Values are range-checked.
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    allowed = ("run", "map", experiment)
    values: dict[str, dict[str, Any]] = {s: {} for s in allowed}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in allowed:
                raise ConfigError(f"unknown section [{section}] for experiment {experiment!r}",
                                  key=section, line=lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", line=lineno)
        if section is None:
            raise ConfigError("key outside of any section", key=line.split("=", 1)[0].strip(), line=lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        knob = KNOBS[section].get(key)
        if knob is None:
            raise ConfigError(f"unknown key {key!r} in section [{section}]", key=key, line=lineno)
        if key in values[section]:
            raise ConfigError(f"duplicate key {key!r} in section [{section}]", key=key, line=lineno)
        try:
            parsed = knob.kind(val)
        except ValueError:
            raise ConfigError(f"cannot parse {val!r} for {key!r}", key=key, line=lineno) from None
        if not _in_range(knob, parsed):
            raise ConfigError(f"value {val!r} for {key!r} out of range", key=key, line=lineno)
        values[section][key] = parsed

    knobs = {k: kb.default for k, kb in KNOBS[experiment].items()}
    knobs.update(values[experiment])
    m = values["map"]
    family = m.pop("family", "doubling")
    seed = values["run"].get("seed", 0)
    return ExperimentConfig(experiment, family, m, knobs, seed, text)


def load_config(path: str, experiment: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), experiment)
