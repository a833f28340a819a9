"""Command-line interface: ``sdm simulate | fit | benchmark``.

Settings are resolved in order: built-in defaults, then ``--config FILE``,
then command-line flags. The seed falls back to the ``SDM_SEED`` environment
variable when neither the file nor the flags set it.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical degeneracy.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .belief import FLOOR, SWEEPS
from .dataio import (
    STANDARDIZE_MODES,
    atomic_write_text,
    csv_text,
    dump_json,
    load_pair,
    standardize,
)
from .errors import ConfigurationError, SDMError
from .filter import run_filter
from .measurement import VARIANTS
from .metrics import DEFAULT_SIGMA_GRID, DEFAULT_TRIALS, FULL_TRIALS, run_benchmark
from .simulation import FAMILIES, RNG_ALGORITHM, SimConfig, make_pair

MODES = ("simulate", "fit", "benchmark")


@dataclass
class RunConfig:
    mode: str = "fit"
    variant: str = "uni"
    n_states: int = 30
    floor: float = FLOOR
    sweep: str = "pseudocode"
    standardize: str = "none"
    min_history: int = None
    input: str = None
    output: str = None
    x_col: str = "x"
    y_col: str = "y"
    seed: int = 0
    family: str = "f5"
    length: int = 600
    sigma_u: float = 0.0
    ar_coefficient: float = 0.9
    trials: int = DEFAULT_TRIALS
    families: tuple = FAMILIES
    sigma_grid: tuple = DEFAULT_SIGMA_GRID
    jobs: int = 1

    def validate(self):
        checks = [
            (self.mode in MODES, f"mode must be one of {MODES}"),
            (self.variant in VARIANTS, f"variant must be one of {VARIANTS}"),
            (self.sweep in SWEEPS, f"sweep must be one of {SWEEPS}"),
            (self.standardize in STANDARDIZE_MODES, f"standardize must be one of {STANDARDIZE_MODES}"),
            (self.n_states >= 2, "n_states must be >= 2"),
            (0 <= self.floor < 1.0 / (2 * max(self.n_states, 2)), "floor out of range"),
            (self.trials >= 1, "trials must be >= 1"),
            (self.jobs >= 1, "jobs must be >= 1"),
            (self.sigma_u >= 0, "sigma_u must be >= 0"),
            (all(f in FAMILIES for f in self.families), f"families must be drawn from {FAMILIES}"),
            (all(s >= 0 for s in self.sigma_grid), "sigma_grid values must be >= 0"),
            (self.output is not None, "an output path is required"),
        ]
        if self.mode == "fit":
            checks.append((self.input is not None, "fit needs an input file"))
        for ok, msg in checks:
            if not ok:
                raise ConfigurationError(msg)
        return self

    def to_dict(self):
        d = asdict(self)
        d["families"] = list(self.families)
        d["sigma_grid"] = list(self.sigma_grid)
        return d


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, value):
    kind = _FIELD_TYPES[key]
    if isinstance(value, str):
        value = value.strip()
    if kind is tuple:
        items = value.split(",") if isinstance(value, str) else list(value)
        items = [str(v).strip() for v in items if str(v).strip()]
        return tuple(float(v) for v in items) if key == "sigma_grid" else tuple(items)
    if value is None or value == "" or (kind is int and value == "none"):
        return None
    if kind is int:
        return int(value)
    if kind is float:
        return float(value)
    return str(value)


def read_config_file(path):
    """Parse a config file: a JSON object, or ``key = value`` lines.

    Keys may use dashes or underscores. ``#`` starts a comment.
    """
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for n, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{n}: expected 'key = value'")
            k, v = line.split("=", 1)
            raw[k.strip()] = v.strip().strip('"').strip("'")
    out = {}
    for k, v in raw.items():
        key = k.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"{path}: unknown setting {k!r}")
        try:
            out[key] = _coerce(key, v)
        except ValueError as exc:
            raise ConfigurationError(f"{path}: bad value for {k!r}: {exc}") from exc
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="sdm", description="Signal diffusion mapping: time-varying lag filter.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="key = value (or JSON) settings file; flags override it")
        p.add_argument("--output", "-o", help="output file (simulate) or directory (fit, benchmark)")
        p.add_argument("--seed", type=int)
        p.add_argument("--n-states", type=int)
        p.add_argument("--floor", type=float)
        p.add_argument("--sweep", choices=SWEEPS)

    p = sub.add_parser("simulate", help="write a synthetic series pair as CSV")
    common(p)
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--length", type=int)
    p.add_argument("--sigma-u", type=float)
    p.add_argument("--ar-coefficient", type=float)

    p = sub.add_parser("fit", help="run the filter over a CSV series pair")
    common(p)
    p.add_argument("--input", "-i")
    p.add_argument("--x-col")
    p.add_argument("--y-col")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--standardize", choices=STANDARDIZE_MODES)
    p.add_argument("--min-history", type=int)

    p = sub.add_parser("benchmark", help="Monte-Carlo forecast benchmark")
    common(p)
    p.add_argument("--families", help="comma-separated, e.g. f1,f5")
    p.add_argument("--sigma-grid", help="comma-separated noise levels")
    p.add_argument("--trials", type=int)
    p.add_argument("--full", action="store_true", help=f"use {FULL_TRIALS} trials per cell")
    p.add_argument("--length", type=int)
    p.add_argument("--jobs", type=int)
    return parser


def resolve_config(args, environ=None):
    environ = os.environ if environ is None else environ
    settings = {}
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    for key, value in vars(args).items():
        if key in _FIELD_TYPES and value is not None and key != "mode":
            settings[key] = _coerce(key, value)
    if getattr(args, "full", False):
        settings["trials"] = FULL_TRIALS
    if "seed" not in settings and environ.get("SDM_SEED"):
        try:
            settings["seed"] = int(environ["SDM_SEED"])
        except ValueError as exc:
            raise ConfigurationError(f"SDM_SEED must be an integer: {exc}") from exc
    settings["mode"] = args.mode
    return RunConfig(**settings).validate()


def _meta(config):
    return {"config": config.to_dict(), "seed": config.seed, "version": __version__}


def cmd_simulate(config):
    sim = SimConfig(config.family, config.length, config.sigma_u, config.ar_coefficient, config.seed)
    pair = make_pair(sim)
    meta = _meta(config)
    meta["rng"] = RNG_ALGORITHM
    rows = ((t, x, y, int(tau)) for t, x, y, tau in
            zip(range(1, sim.length + 1), pair.x.tolist(), pair.y.tolist(), pair.lag_path))
    out = Path(config.output)
    atomic_write_text(out, csv_text(["t", "x", "y", "tau"], rows, meta))
    atomic_write_text(out.with_name(out.name + ".json"), dump_json(meta))
    return 0


def _weight_columns(variant, n):
    if variant == "uni":
        return [f"w{i}" for i in range(1, n + 1)]
    a, b = ("x", "y") if variant == "bidirectional" else ("pos", "neg")
    return [f"{a}{i}" for i in range(1, n + 1)] + [f"{b}{i}" for i in range(1, n + 1)]


def _rmse(e):
    e = e[np.isfinite(e)]
    return float(np.sqrt(np.mean(e * e))) if e.size else None


def cmd_fit(config):
    n = config.n_states
    x, y = load_pair(config.input, config.x_col, config.y_col, min_rows=n + 2)
    x = standardize(x, config.standardize, config.min_history)
    y = standardize(y, config.standardize, config.min_history)
    fit = run_filter(x, y, n, config.variant, config.floor, config.sweep)
    meta = _meta(config)
    outdir = Path(config.output)

    m = len(fit.t)
    flat = fit.beliefs.reshape(m, n) if fit.beliefs.ndim == 2 else np.concatenate(
        [fit.beliefs[:, :, 0], fit.beliefs[:, :, 1]], axis=1)
    header = ["t", "theta", "lambda", "v", "u2", "y_hat"] + _weight_columns(config.variant, n)
    rows = ([int(t) + 1, th, lam, v, u2, yh] + w
            for t, th, lam, v, u2, yh, w in zip(fit.t, fit.theta.tolist(), fit.rate.tolist(),
                                                 fit.transition_error.tolist(), fit.residual.tolist(),
                                                 fit.y_hat.tolist(), flat.tolist()))
    atomic_write_text(outdir / "heatmap.csv", csv_text(header, rows, meta))

    t = fit.t
    persistence = y[t - 1]
    fheader = ["t", "y", "y_hat", "y_persistence"]
    fcols = [t + 1, y[t].tolist(), fit.y_hat.tolist(), persistence.tolist()]
    if config.variant == "bidirectional":
        fheader += ["x", "x_hat", "x_persistence", "mass_x_leads", "mass_y_leads"]
        fcols += [x[t].tolist(), fit.x_hat.tolist(), x[t - 1].tolist(),
                  fit.column_mass[:, 0].tolist(), fit.column_mass[:, 1].tolist()]
    frows = ([int(r[0])] + list(r[1:]) for r in zip(*fcols))
    atomic_write_text(outdir / "forecasts.csv", csv_text(fheader, frows, meta))

    summary = {
        **meta,
        "created": datetime.now(timezone.utc).isoformat(),
        "n_scored": int(m),
        "rmse": _rmse(fit.y_hat - y[t]),
        "persistence_rmse": _rmse(persistence - y[t]),
        "final_argmax_lag": int(np.unravel_index(np.argmax(fit.beliefs[-1]), fit.beliefs[-1].shape)[0]) + 1,
    }
    if config.variant == "bidirectional":
        summary["rmse_x"] = _rmse(fit.x_hat - x[t])
        summary["persistence_rmse_x"] = _rmse(x[t - 1] - x[t])
        summary["final_column_mass"] = fit.column_mass[-1].tolist()
    atomic_write_text(outdir / "summary.json", dump_json(summary))
    return 0


def cmd_benchmark(config):
    report = run_benchmark(config.families, config.sigma_grid, config.trials, config.seed,
                           config.n_states, config.length, config.floor, config.sweep, config.jobs)
    data = report.to_dict()
    data["metadata"]["config"] = config.to_dict()
    outdir = Path(config.output)
    atomic_write_text(outdir / "report.json", dump_json(data))
    atomic_write_text(outdir / "raw.csv", report.raw_csv())
    return 0


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "benchmark": cmd_benchmark}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        return COMMANDS[config.mode](config)
    except SDMError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(err), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": 2}
        print(json.dumps(err), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
