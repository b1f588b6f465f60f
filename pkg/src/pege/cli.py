"""Experiment runner.

    pege run <config> --out <dir> [--seeds a,b,c] [--jobs k]
    pege preset <name> [--out <dir>] [--seeds ...] [--jobs k]

Exit status: 0 on success, 1 on an invalid config, 2 on a runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .config import format_config, parse_config
from .presets import PRESETS
from .simulator import ConfigError, ExperimentConfig, aggregate, fit_scaling_exponent, run_single

log = logging.getLogger("pege")


def fmt(x) -> str:
    """17 significant digits; round-trips any double."""
    return format(float(x), ".17g")


@dataclass
class RunManifest:
    config_path: str
    out_dir: str
    sigma: tuple
    beta_sigma: float
    curve_files: list = field(default_factory=list)
    aggregate_file: str = ""
    summary_file: str = ""
    timings: dict = field(default_factory=dict)

    def files(self):
        return [*self.curve_files, self.aggregate_file, self.summary_file]


def write_curve(path: Path, rounds, regret, stderr=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("round,cum_regret" + (",stderr" if stderr is not None else "") + "\n")
        for i, t in enumerate(rounds):
            row = f"{int(t)},{fmt(regret[i])}"
            if stderr is not None:
                row += f",{fmt(stderr[i])}"
            fh.write(row + "\n")


def read_curve(path):
    """Load a curve CSV as a dict of numpy columns."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def default_slope_t_min(horizon: int) -> float:
    return max(1.0, horizon / 100)


def _run_seed(args):
    config, seed = args
    start = time.perf_counter()
    curve = run_single(config, seed)
    return curve, time.perf_counter() - start


def run_curves(config: ExperimentConfig, jobs: int = 1):
    tasks = [(config, s) for s in config.seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_seed, tasks))
    return [_run_seed(t) for t in tasks]


def summarize(config, curves, slope_t_min=None) -> dict:
    rounds, mean, stderr = aggregate(curves)
    t_min = default_slope_t_min(config.horizon) if slope_t_min is None else slope_t_min
    try:
        slope = fit_scaling_exponent(rounds, mean, t_min)
    except ValueError:
        slope = math.nan
    calls = Counter()
    for c in curves:
        calls.update(c.oracle_calls)
    first = curves[0]
    summary = {
        "env": config.env,
        "algo": config.algo,
        "horizon": config.horizon,
        "n": config.n,
        "seeds": len(curves),
        "fingerprint": first.fingerprint,
        "sigma": " ".join(_action_str(x) for x in first.sigma),
        "beta_sigma": fmt(first.beta_sigma),
        "gap": fmt(first.gap) if first.gap is not None else "none",
        "final_mean_regret": fmt(mean[-1]),
        "final_stderr": fmt(stderr[-1]),
        "slope_t_min": fmt(t_min),
        "slope": fmt(slope),
        "argmax_calls": calls["argmax"],
        "secondmax_calls": calls["secondmax"],
        "max_recovery_error": fmt(max(c.max_recovery_error for c in curves)),
    }
    if config.h is not None:
        summary["h"] = fmt(config.h)
    if any(c.gap_outcome for c in curves):
        tally = Counter(c.gap_outcome for c in curves)
        for kind in ("estimate", "threshold_exceeded", "truncated"):
            summary[f"outcome_{kind}"] = tally.get(kind, 0)
        estimates = [c.delta_hat for c in curves if c.gap_outcome == "estimate"]
        if estimates:
            summary["delta_hat_mean"] = fmt(np.mean(estimates))
    return summary


def _action_str(x):
    if isinstance(x, tuple):
        return "(" + ",".join(str(v) for v in x) + ")"
    return str(x)


def write_summary(path: Path, summary: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, v in summary.items():
            fh.write(f"{k} = {v}\n")


def run_experiment(config: ExperimentConfig, out_dir, jobs: int = 1, slope_t_min=None,
                   config_path: str = "") -> RunManifest:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    results = run_curves(config, jobs)
    curves = [c for c, _ in results]
    manifest = RunManifest(config_path, str(out), curves[0].sigma, curves[0].beta_sigma)
    for curve, elapsed in results:
        path = out / f"seed_{curve.seed}.csv"
        write_curve(path, curve.rounds, curve.cum_regret)
        manifest.curve_files.append(str(path))
        manifest.timings[f"seed_{curve.seed}"] = elapsed
    rounds, mean, stderr = aggregate(curves)
    agg = out / "aggregate.csv"
    write_curve(agg, rounds, mean, stderr)
    manifest.aggregate_file = str(agg)
    summary = out / "summary.txt"
    write_summary(summary, summarize(config, curves, slope_t_min))
    manifest.summary_file = str(summary)
    manifest.timings["total"] = time.perf_counter() - start
    (out / "config.txt").write_text(format_config(config), encoding="utf-8")
    with open(out / "manifest.txt", "w", encoding="utf-8") as fh:
        fh.write(f"config = {manifest.config_path}\n")
        fh.write(f"out_dir = {manifest.out_dir}\n")
        fh.write(f"sigma = {' '.join(_action_str(x) for x in manifest.sigma)}\n")
        fh.write(f"beta_sigma = {fmt(manifest.beta_sigma)}\n")
        for f in manifest.files():
            fh.write(f"file = {Path(f).name}\n")
        for k, v in manifest.timings.items():
            fh.write(f"seconds_{k} = {v:.3f}\n")
    return manifest


def _seed_list(s):
    try:
        seeds = [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {s!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return seeds


def build_parser():
    p = argparse.ArgumentParser(prog="pege", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--out", required=True)
    run.add_argument("--seeds", type=_seed_list)
    run.add_argument("--jobs", type=int, default=1)

    pre = sub.add_parser("preset", help="run a named acceptance experiment")
    pre.add_argument("name", choices=sorted(PRESETS))
    pre.add_argument("--out")
    pre.add_argument("--seeds", type=_seed_list)
    pre.add_argument("--jobs", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            config, extras = parse_config(args.config, args.seeds)
            slope_t_min, path = extras["slope_t_min"], args.config
            out = args.out
        else:
            config = PRESETS[args.name]()
            if args.seeds:
                config = replace(config, seeds=args.seeds)
            slope_t_min, path = None, f"preset:{args.name}"
            out = args.out or f"results/{args.name}"
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        manifest = run_experiment(config, out, args.jobs, slope_t_min, path)
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        log.debug("run failed", exc_info=True)
        print(f"run failed: {exc}", file=sys.stderr)
        return 2
    print(Path(manifest.summary_file).read_text(encoding="utf-8"), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
