"""Forecast scoring and the Monte-Carlo benchmark over the synthetic families."""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .belief import FLOOR
from .errors import ConfigurationError
from .filter import run_filter
from .simulation import FAMILIES, RNG_ALGORITHM, SimConfig, make_pair

DEFAULT_SIGMA_GRID = (0.1, 0.25, 0.5, 1.0, 1.5, 2.0)
DEFAULT_TRIALS = 50
FULL_TRIALS = 500

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "BenchmarkReport",
    "type": "object",
    "required": ["metadata", "cells"],
    "properties": {
        "metadata": {
            "type": "object",
            "required": ["seed_base", "n_states", "length", "floor", "sweep", "trials", "rng"],
            "properties": {
                "seed_base": {"type": "integer"},
                "n_states": {"type": "integer", "minimum": 2},
                "length": {"type": "integer", "minimum": 1},
                "floor": {"type": "number", "minimum": 0},
                "sweep": {"enum": ["pseudocode", "fresh-buffer"]},
                "trials": {"type": "integer", "minimum": 1},
                "rng": {"type": "string"},
            },
        },
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "family", "sigma_u", "trials", "mean_rmse", "mean_fe",
                    "se_rmse", "se_fe", "rmse", "fe",
                ],
                "properties": {
                    "family": {"enum": list(FAMILIES)},
                    "sigma_u": {"type": "number", "minimum": 0},
                    "trials": {"type": "integer", "minimum": 1},
                    "mean_rmse": {"type": "number", "minimum": 0},
                    "mean_fe": {"type": "number"},
                    "se_rmse": {"type": "number", "minimum": 0},
                    "se_fe": {"type": "number", "minimum": 0},
                    "rmse": {"type": "array", "items": {"type": "number"}},
                    "fe": {"type": "array", "items": {"type": "number"}},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class ForecastRecord:
    t: int
    y_hat: float
    y: float


def forecast_records(result, y):
    """Pair each forecast in a `FitResult` with its observed value."""
    y = np.asarray(y, dtype=float)
    return [ForecastRecord(int(t), float(f), float(y[t])) for t, f in zip(result.t, result.y_hat)]


def _rmse(y_hat, y):
    e = np.asarray(y_hat, dtype=float) - np.asarray(y, dtype=float)
    if e.size == 0:
        raise ConfigurationError("cannot score an empty forecast")
    return float(np.sqrt(np.mean(e * e)))


def rmse(records):
    """Root mean squared error over a sequence of `ForecastRecord`."""
    records = list(records)
    if not records:
        raise ConfigurationError("cannot score an empty forecast")
    return _rmse([r.y_hat for r in records], [r.y for r in records])


def fe_stat(rmse_value, sigma_u):
    """Forecast error in excess of the noise level (may be negative)."""
    return rmse_value - sigma_u


@dataclass
class TrialResult:
    config: SimConfig
    rmse: float
    fe: float
    weights: np.ndarray
    lag_path: np.ndarray
    fit: object = field(repr=False, default=None)

    def argmax_lag(self):
        return self.fit.argmax_lag()


def run_trial(config, n_states=30, floor=FLOOR, sweep="pseudocode"):
    """Generate one pair, filter it and score the forecasts.

    Forecasts exist from the first time with a full lag window (1-based
    ``t = n_states + 1``) onward; all of them are scored.
    """
    pair = make_pair(config)
    fit = run_filter(pair.x, pair.y, n_states, "uni", floor, sweep)
    r = _rmse(fit.y_hat, pair.y[fit.t])
    return TrialResult(config, r, fe_stat(r, config.sigma_u), fit.beliefs,
                       pair.lag_path[fit.t], fit)


def _trial_scores(args):
    config, n_states, floor, sweep = args
    res = run_trial(config, n_states, floor, sweep)
    return res.rmse, res.fe


@dataclass
class CellSummary:
    family: str
    sigma_u: float
    rmse: list
    fe: list

    @property
    def trials(self):
        return len(self.rmse)

    @property
    def mean_rmse(self):
        return float(np.mean(self.rmse))

    @property
    def mean_fe(self):
        return float(np.mean(self.fe))

    @staticmethod
    def _se(values):
        if len(values) < 2:
            return 0.0
        return float(np.std(values, ddof=1) / math.sqrt(len(values)))

    @property
    def se_rmse(self):
        return self._se(self.rmse)

    @property
    def se_fe(self):
        return self._se(self.fe)

    def to_dict(self):
        return {
            "family": self.family,
            "sigma_u": self.sigma_u,
            "trials": self.trials,
            "mean_rmse": self.mean_rmse,
            "mean_fe": self.mean_fe,
            "se_rmse": self.se_rmse,
            "se_fe": self.se_fe,
            "rmse": list(self.rmse),
            "fe": list(self.fe),
        }


@dataclass
class BenchmarkReport:
    cells: list
    metadata: dict

    def cell(self, family, sigma_u):
        for c in self.cells:
            if c.family == family and c.sigma_u == sigma_u:
                return c
        raise KeyError((family, sigma_u))

    def to_dict(self):
        return {"metadata": dict(self.metadata), "cells": [c.to_dict() for c in self.cells]}

    def raw_csv(self):
        """Per-trial values, one row per (family, sigma_u, trial)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "sigma_u", "trial", "seed", "rmse", "fe"])
        seed_base = self.metadata["seed_base"]
        for c in self.cells:
            for k, (r, f) in enumerate(zip(c.rmse, c.fe)):
                w.writerow([c.family, repr(c.sigma_u), k, seed_base + k, f"{r:.17g}", f"{f:.17g}"])
        return buf.getvalue()


def run_benchmark(families=FAMILIES, sigma_grid=DEFAULT_SIGMA_GRID, trials=DEFAULT_TRIALS,
                  seed_base=0, n_states=30, length=600, floor=FLOOR, sweep="pseudocode",
                  jobs=1):
    """Average forecast scores over ``trials`` seeded runs per (family, sigma) cell.

    Trial ``k`` of every cell uses seed ``seed_base + k``. Results do not
    depend on ``jobs``.
    """
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1, got {trials}")
    families = list(families)
    sigma_grid = [float(s) for s in sigma_grid]
    tasks = [
        (SimConfig(fam, length, s, seed=seed_base + k), n_states, floor, sweep)
        for fam in families
        for s in sigma_grid
        for k in range(trials)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(_trial_scores, tasks, chunksize=max(1, trials // 4)))
    else:
        scores = [_trial_scores(t) for t in tasks]

    cells = []
    it = iter(scores)
    for fam in families:
        for s in sigma_grid:
            chunk = [next(it) for _ in range(trials)]
            cells.append(CellSummary(fam, s, [r for r, _ in chunk], [f for _, f in chunk]))
    metadata = {
        "seed_base": int(seed_base),
        "n_states": int(n_states),
        "length": int(length),
        "floor": float(floor),
        "sweep": sweep,
        "trials": int(trials),
        "families": families,
        "sigma_grid": sigma_grid,
        "rng": RNG_ALGORITHM,
    }
    return BenchmarkReport(cells, metadata)


def report_from_dict(data):
    cells = [CellSummary(c["family"], c["sigma_u"], list(c["rmse"]), list(c["fe"]))
             for c in data["cells"]]
    return BenchmarkReport(cells, dict(data["metadata"]))


__all__ = [
    "DEFAULT_SIGMA_GRID", "DEFAULT_TRIALS", "FULL_TRIALS", "REPORT_SCHEMA",
    "ForecastRecord", "forecast_records", "rmse", "fe_stat", "TrialResult",
    "run_trial", "CellSummary", "BenchmarkReport", "run_benchmark", "report_from_dict",
]
