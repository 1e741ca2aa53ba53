"""Command-line interface: ``are-lab {stat,are,curve,sample,power,check}``.

Exit codes: 0 success, 2 configuration error, 3 numeric error, 4 I/O error.
Floats are written with ``repr`` (shortest round-trip form); infinite
values are written as the string ``"inf"``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from . import power_sim
from .are_engine import SIDES, are_closed, are_numeric
from .checks import SUITES, run_suite
from .errors import AreLabError, ConfigError, ParseError
from .model_core import PairedSample
from .models import MODELS, get_model
from .rank_stats import kendall_t, spearman_s

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

NULL_SIGMA2_T = 4.0 / 9.0
NULL_SIGMA2_S = 1.0


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str | None = None
    theta: float | None = None
    theta0: float | None = None
    grid: tuple | None = None
    alpha: float | None = None
    beta: float | None = None
    n: int | None = None
    reps: int | None = None
    seed: int | None = None
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.model is not None and self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.grid is not None:
            g = self.grid
            if any(b <= a for a, b in zip(g, g[1:])):
                raise ConfigError("theta grid must be strictly increasing")
        if self.n is not None and self.n < 1:
            raise ConfigError("n must be positive")
        if self.reps is not None and self.reps < 1:
            raise ConfigError("reps must be positive")
        if self.seed is not None and self.seed < 0:
            raise ConfigError("seed must be unsigned")
        if self.fmt not in ("json", "csv"):
            raise ConfigError("format must be json or csv")


# serialisation ----------------------------------------------------------------

def format_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return repr(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else format_float(x)
    return obj


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)


def read_pairs_csv(path):
    """Read a two-column ``x,y`` CSV; errors name the offending line."""
    with open(path, newline="") as fh:
        text = fh.read()
    return parse_pairs_csv(text)


def parse_pairs_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
        raise ParseError('expected header "x,y"', 1)
    xs, ys = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", lineno)
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            raise ParseError(f"not a number: {','.join(row)!r}", lineno) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError("non-finite value", lineno)
        xs.append(x)
        ys.append(y)
    return np.array(xs), np.array(ys)


def write_pairs_csv(sample):
    lines = ["x,y"]
    lines += [f"{format_float(x)},{format_float(y)}" for x, y in zip(sample.x, sample.y)]
    return "\n".join(lines) + "\n"


def write_curve_csv(rows):
    lines = ["theta,are"]
    lines += [f"{format_float(t)},{format_float(v)}" for t, v in rows]
    return "\n".join(lines) + "\n"


def read_curve_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["theta", "are"]:
        raise ParseError('expected header "theta,are"', 1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", lineno)
        out.append((float(row[0]), float(row[1])))
    return out


# commands -------------------------------------------------------------------

def cmd_stat(cfg, path):
    x, y = read_pairs_csv(path)
    sample = PairedSample(x, y)
    n = len(sample)
    if n < 3:
        raise ConfigError(f"need at least 3 rows, got {n}")
    t = kendall_t(sample)
    s = spearman_s(sample)
    z_t = t / math.sqrt(NULL_SIGMA2_T / n)
    z_s = s / math.sqrt(NULL_SIGMA2_S / n)
    report = {
        "n": n,
        "T": t,
        "S": s,
        "z_T": z_t,
        "z_S": z_s,
        "p_T": float(norm.sf(z_t)),
        "p_S": float(norm.sf(z_s)),
    }
    if cfg.fmt == "csv":
        keys = list(report)
        return ",".join(keys) + "\n" + ",".join(
            str(report[k]) if isinstance(report[k], int) else format_float(report[k]) for k in keys
        ) + "\n"
    return dumps(report)


def are_record(result):
    return {
        "model": result.model,
        "theta0": result.theta0,
        "side": result.side,
        "value": result.value,
        "method": result.method,
        "diagnostics": result.diagnostics,
    }


def compute_are(model_name, theta0, method, side="two-sided"):
    if method == "closed-form":
        if side != "two-sided":
            raise ConfigError("closed forms are symmetric; --side applies to the numeric method")
        return are_closed(model_name, theta0)
    return are_numeric(get_model(model_name), theta0, side=side)


def cmd_are(cfg, method, side):
    return dumps(are_record(compute_are(cfg.model, cfg.theta0, method, side)))


def curve_rows(model_name, grid, method):
    return [(float(t), compute_are(model_name, t, method).value) for t in grid]


def cmd_curve(cfg, method):
    return write_curve_csv(curve_rows(cfg.model, cfg.grid, method))


def cmd_sample(cfg):
    sample = get_model(cfg.model).sample(cfg.theta, cfg.n, cfg.seed)
    return write_pairs_csv(sample)


def _size_record(res):
    return {"rate": res.rate, "se": res.se, "n": res.n}


def _ssr_record(r):
    return {
        "n_required": r.n_required,
        "n_se": r.n_se,
        "n_analytic": r.n_analytic,
        "power": r.power,
        "power_se": r.power_se,
        "size": r.size,
        "size_se": r.size_se,
    }


def _eff_record(e):
    return {
        "alpha": e.alpha,
        "beta": e.beta,
        "ratio": e.ratio,
        "ratio_se": e.ratio_se,
        "T": _ssr_record(e.t),
        "S": _ssr_record(e.s),
    }


def power_record(cfg, second_pair=(0.01, 0.2), skip_second=False):
    exp = power_sim.PowerExperiment(
        cfg.model, cfg.theta0, cfg.theta, cfg.alpha, cfg.beta, cfg.reps, cfg.seed,
        second_pair=second_pair,
    )
    record = {
        "model": cfg.model,
        "theta0": cfg.theta0,
        "theta": cfg.theta,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "reps": cfg.reps,
        "seed": cfg.seed,
    }
    sim = power_sim.PowerSimulator(exp)
    if cfg.theta == cfg.theta0:
        n = cfg.n or 500
        record["null_only"] = True
        record["size"] = {w: _size_record(sim.power(w, n)) for w in power_sim.STATISTICS}
        record["ratio"] = None
        return record
    record["null_only"] = False
    first = power_sim.efficiency_ratio(exp, sim)
    record["primary"] = _eff_record(first)
    record["ratio"] = first.ratio
    record["ratio_se"] = first.ratio_se
    if not skip_second:
        second = power_sim.efficiency_at(sim, *second_pair)
        record["secondary"] = _eff_record(second)
        gap = abs(first.ratio - second.ratio)
        band = 2.0 * math.hypot(first.ratio_se, second.ratio_se)
        record["invariant"] = bool(gap <= band)
    return record


def cmd_power(cfg, second_pair, skip_second):
    return dumps(power_record(cfg, second_pair, skip_second))


def cmd_check(suite):
    checks = run_suite(suite)
    lines = [c.line() for c in checks]
    passed = sum(c.passed for c in checks)
    lines.append(f"{suite}: {passed}/{len(checks)} passed")
    return "\n".join(lines) + "\n", passed == len(checks)


# argument parsing -------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="are-lab", description="Pitman ARE of Kendall's T versus Spearman's S.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stat", help="T_n, S_n and null z-tests for an x,y CSV")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")

    s = sub.add_parser("are", help="ARE at one parameter value")
    s.add_argument("--model", required=True)
    s.add_argument("--theta0", type=float, required=True)
    s.add_argument("--method", choices=("closed-form", "numeric"), default="numeric")
    s.add_argument("--side", choices=SIDES, default="two-sided")
    s.add_argument("--out")

    s = sub.add_parser("curve", help="ARE over a theta grid as CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--from", dest="start", type=float, required=True)
    s.add_argument("--to", dest="stop", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--method", choices=("closed-form", "numeric"), default="closed-form")
    s.add_argument("--out")

    s = sub.add_parser("sample", help="draw a sample as x,y CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")

    s = sub.add_parser("power", help="Monte Carlo size, power and n_S/n_T")
    s.add_argument("--model", required=True)
    s.add_argument("--theta0", type=float, default=0.0)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--beta", type=float, default=0.1)
    s.add_argument("--reps", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, help="sample size for the size-only run when theta equals theta0")
    s.add_argument("--second-alpha", type=float, default=0.01)
    s.add_argument("--second-beta", type=float, default=0.2)
    s.add_argument("--skip-second", action="store_true")
    s.add_argument("--out")

    s = sub.add_parser("check", help="run a verification suite")
    s.add_argument("--suite", choices=SUITES, required=True)
    return p


def _grid(start, stop, steps):
    if steps < 1:
        raise ConfigError("steps must be at least 1")
    if steps == 1:
        if start != stop:
            raise ConfigError("a single-step grid needs --from equal to --to")
        return (float(start),)
    if not stop > start:
        raise ConfigError("--to must exceed --from")
    return tuple(float(t) for t in np.linspace(start, stop, steps))


def run(argv=None):
    args = build_parser().parse_args(argv)
    cmd = args.command
    if cmd == "stat":
        cfg = RunConfig(cmd, out=args.out, fmt=args.format)
        _emit(cmd_stat(cfg, args.inp), cfg.out)
    elif cmd == "are":
        cfg = RunConfig(cmd, model=args.model, theta0=args.theta0, out=args.out)
        _emit(cmd_are(cfg, args.method, args.side), cfg.out)
    elif cmd == "curve":
        cfg = RunConfig(cmd, model=args.model, grid=_grid(args.start, args.stop, args.steps), out=args.out, fmt="csv")
        _emit(cmd_curve(cfg, args.method), cfg.out)
    elif cmd == "sample":
        cfg = RunConfig(cmd, model=args.model, theta=args.theta, n=args.n, seed=args.seed, out=args.out, fmt="csv")
        _emit(cmd_sample(cfg), cfg.out)
    elif cmd == "power":
        cfg = RunConfig(
            cmd, model=args.model, theta=args.theta, theta0=args.theta0, alpha=args.alpha,
            beta=args.beta, n=args.n, reps=args.reps, seed=args.seed, out=args.out,
        )
        _emit(cmd_power(cfg, (args.second_alpha, args.second_beta), args.skip_second), cfg.out)
    else:
        text, ok = cmd_check(args.suite)
        sys.stdout.write(text)
        return EXIT_OK if ok else 1
    return EXIT_OK


def main(argv=None):
    try:
        return run(argv)
    except AreLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
