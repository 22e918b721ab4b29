"""Command-line entry points: ``evaluate``, ``theory``, ``sweep``, ``report``, ``simulate``.

Exit codes are 0 on success, 1 for usage errors and 2 for data errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .adjustment import IslandParams
from .metrics import DEFAULT_K_PERCENT, all_f1, event_metrics, separation_score
from .report import default_figures, write_report
from .series import SeriesError, as_labels, as_scores, threshold_scores
from .simulator import (
    GroundTruthConfig,
    MetricConfig,
    ScoreConfig,
    SimulationError,
    generate_ground_truth,
    run_simulation,
    simulate_scores,
)
from .sweep import (
    SweepSpec,
    default_master_seed,
    default_sweep_spec,
    read_runs_csv,
    run_sweep,
    write_runs_csv,
)
from .theory import NoiseModel, theory_curve

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- series CSV -------------------------------------------------------------

def read_series_csv(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Parse a ``t,label[,score]`` file into ``(labels, scores or None)``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    fields = [f.strip() for f in reader.fieldnames or []]
    if fields[:2] != ["t", "label"] or len(fields) > 3 or (len(fields) == 3 and fields[2] != "score"):
        raise DataError(f"{path}: header must be 't,label' or 't,label,score', got {','.join(fields)!r}")
    labels, scores = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if lineno == 1 or not row:
            continue
        try:
            t = int(row[0])
            labels.append(int(row[1]))
            if len(fields) == 3:
                scores.append(float(row[2]))
        except (ValueError, IndexError) as exc:
            raise DataError(f"{path}:{lineno}: malformed row {row!r}") from exc
        if t != len(labels) - 1:
            raise DataError(f"{path}:{lineno}: t must count up from 0, got {t}")
    if not labels:
        raise DataError(f"{path}: no rows")
    try:
        lab = as_labels(labels)
        sc = as_scores(scores) if scores else None
    except SeriesError as exc:
        raise DataError(f"{path}: {exc}") from exc
    return lab, sc


def write_series_csv(fh, labels, scores=None) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", "label", "score"] if scores is not None else ["t", "label"])
    for t, lab in enumerate(labels):
        row = [t, int(lab)]
        if scores is not None:
            row.append(repr(float(scores[t])))
        writer.writerow(row)


# -- shared flags -----------------------------------------------------------

def _island(args) -> IslandParams:
    if args.island_width is not None:
        return IslandParams.explicit(args.island_width)
    return IslandParams.mean_true_width()


def _add_metric_flags(p):
    p.add_argument("--k-percent", type=float, default=DEFAULT_K_PERCENT, help="K for the K%% adjustment")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--island-width", type=int, help="explicit island width w_N")
    group.add_argument("--island-auto", action="store_true",
                       help="w_N = rounded mean true-segment width (default)")


def _float_list(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:step`` (stop inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            n = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 12) for i in range(n)]
        return [float(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _parse_noise(text: str) -> NoiseModel:
    kind, _, arg = text.partition(":")
    if kind == "uniform" and not arg:
        return NoiseModel.uniform()
    if kind == "gaussian":
        try:
            mu, sigma = (float(x) for x in arg.split(","))
        except ValueError as exc:
            raise UsageError("gaussian noise is 'gaussian:MU,SIGMA'") from exc
        return NoiseModel.truncated_gaussian(mu, sigma)
    if kind == "empirical" and arg:
        _, scores = read_series_csv(arg)
        if scores is None:
            raise DataError(f"{arg}: empirical noise needs a score column")
        return NoiseModel.empirical(scores)
    raise UsageError(f"unknown noise model {text!r}; use uniform, gaussian:MU,SIGMA or empirical:FILE")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


# -- subcommands ------------------------------------------------------------

def cmd_evaluate(args) -> int:
    truth, truth_scores = read_series_csv(args.truth)
    if args.pred:
        pred_labels, scores = read_series_csv(args.pred)
        if len(pred_labels) != len(truth):
            raise DataError(f"length mismatch: truth has {len(truth)} rows, prediction {len(pred_labels)}")
    else:
        pred_labels, scores = None, truth_scores
        if scores is None:
            raise UsageError("give a prediction file, or a score column in the truth file")
    if scores is not None:
        if args.gamma is None:
            raise UsageError("--gamma is required when scores are given")
        pred = threshold_scores(scores, args.gamma)
    else:
        pred = pred_labels
    f1s = all_f1(truth, pred, k_percent=args.k_percent, island=_island(args))
    ev = event_metrics(truth, pred)
    report = [("f1_p", f1s["p"].f1), ("f1_pa", f1s["pa"].f1), ("f1_kpa", f1s["kpa"].f1),
              ("f1_ba", f1s["ba"].f1)]
    for name in ("p", "pa", "kpa", "ba"):
        report += [(f"precision_{name}", f1s[name].precision), (f"recall_{name}", f1s[name].recall)]
    report += [("precision_E", ev.precision_e), ("recall_E", ev.recall_e), ("coverage", ev.coverage),
               ("n_true_events", ev.n_true_events), ("n_pred_events", ev.n_pred_events)]
    if scores is not None:
        report.append(("separation", separation_score(scores, truth)))
    width = max(len(k) for k, _ in report)
    for k, v in report:
        print(f"{k:<{width}}  {v:.6g}" if isinstance(v, float) else f"{k:<{width}}  {v}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["metric", "value"])
            w.writerows((k, repr(float(v)) if isinstance(v, float) else v) for k, v in report)
    return EXIT_OK


def cmd_theory(args) -> int:
    qs = _float_list(args.q)
    gammas = _float_list(args.gamma_grid)
    w_n = args.w_a if args.island_auto or args.w_n is None else args.w_n
    try:
        rows = theory_curve(qs, args.w_a, w_n, gammas, _parse_noise(args.noise))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    fh, close = _open_out(args.out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        cols = ["q", "gamma", "f1_pa", "f1_ba", "precision_pa", "precision_ba", "recall"]
        writer.writerow(cols)
        for r in rows:
            writer.writerow([repr(float(r[c])) for c in cols])
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _load_spec(args) -> SweepSpec:
    seed = args.seed
    if args.spec:
        try:
            spec = SweepSpec.from_json(args.spec)
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DataError(f"bad sweep spec {args.spec}: {exc}") from exc
        if seed is not None:
            spec.master_seed = seed
    else:
        spec = default_sweep_spec(seed)
    if args.runs is not None:
        spec.run_count = args.runs
    if args.k_percent is not None:
        spec.k_percent = args.k_percent
    if args.island_width is not None:
        spec.island = args.island_width
    elif args.island_auto:
        spec.island = "auto"
    if args.gamma is not None:
        spec.score["gamma"] = args.gamma
    return spec


def cmd_sweep(args) -> int:
    spec = _load_spec(args)
    if args.dump_spec:
        json.dump(spec.to_dict(), sys.stdout, indent=2)
        print()
        return EXIT_OK

    def progress(done, total):
        if done == total or done % 1000 == 0:
            print(f"{done}/{total} runs", file=sys.stderr)

    rows = run_sweep(spec, workers=args.workers, progress=None if args.quiet else progress)
    write_runs_csv(rows, args.out)
    skipped = sum(r["status"] == "skipped" for r in rows)
    print(f"wrote {len(rows)} rows ({skipped} skipped) to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        rows = read_runs_csv(args.runs)
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    figs = default_figures(_float_list(args.recall_edges), _float_list(args.precision_edges),
                           _float_list(args.coverage_edges))
    write_report(rows, args.out, figs)
    print(f"wrote {len(figs)} figures to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    seed = default_master_seed() if args.seed is None else args.seed
    gt = GroundTruthConfig(T=args.T, n_events=args.n_events, width_range=tuple(args.width),
                           min_gap=args.min_gap, seed=seed)
    sc = ScoreConfig(detect_prob=args.detect_prob, coverage_range=tuple(args.coverage),
                     n_false_events=args.n_false, false_width_range=tuple(args.false_width),
                     separation=args.separation, score_noise_sigma=args.sigma,
                     gamma=0.5 if args.gamma is None else args.gamma, seed=seed + 1)
    labels, segments = generate_ground_truth(gt)
    scores, _ = simulate_scores(segments, sc, gt.T)
    fh, close = _open_out(args.out)
    try:
        write_series_csv(fh, labels, scores)
    finally:
        if close:
            fh.close()
    if labels.any():
        rec = run_simulation(gt, sc, MetricConfig(args.k_percent, _island(args)))
        summary = " ".join(f"{k}={v:.4f}" for k, v in rec.metric_values().items())
        print(f"{summary} separation={rec.separation:.4f}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="balanced-f1", description="Adjusted F1 metrics for time-series anomaly detection.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", help="score a prediction or score series against ground truth")
    p.add_argument("truth", help="t,label[,score] CSV")
    p.add_argument("pred", nargs="?", help="t,label[,score] CSV; scores take precedence over labels")
    p.add_argument("--gamma", type=float, help="threshold, required with scores")
    _add_metric_flags(p)
    p.add_argument("--out", help="also write metric,value CSV here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("theory", help="closed-form F1 curves against the threshold")
    p.add_argument("--q", default="0.05,0.1,0.2,0.33", help="anomaly ratios")
    p.add_argument("--w-a", type=int, default=100, help="anomaly width")
    p.add_argument("--w-n", type=int, help="island width (default: equal to --w-a)")
    p.add_argument("--island-auto", action="store_true", help="island width equal to --w-a")
    p.add_argument("--gamma-grid", default="0.05:0.99:0.02", help="list or start:stop:step")
    p.add_argument("--noise", default="uniform", help="uniform | gaussian:MU,SIGMA | empirical:FILE")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("sweep", help="run a simulation sweep and write run records")
    p.add_argument("spec", nargs="?", help="sweep JSON (default: built-in 15,000-run grid)")
    p.add_argument("--out", default="runs.csv")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--runs", type=int, help="override the run count")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--gamma", type=float, help="override the threshold for every run")
    p.add_argument("--k-percent", type=float)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--island-width", type=int)
    g.add_argument("--island-auto", action="store_true")
    p.add_argument("--dump-spec", action="store_true", help="print the resolved spec as JSON and stop")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="bin run records and draw SVG panels")
    p.add_argument("runs", help="runs CSV from 'sweep'")
    p.add_argument("--out", default="report")
    p.add_argument("--recall-edges", default="0.25,0.75")
    p.add_argument("--precision-edges", default="0.25,0.75")
    p.add_argument("--coverage-edges", default="0.2,0.3")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("simulate", help="one simulated series as t,label,score CSV")
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--n-events", type=int, default=2)
    p.add_argument("--width", type=int, nargs=2, default=(50, 50), metavar=("MIN", "MAX"))
    p.add_argument("--min-gap", type=int, default=50)
    p.add_argument("--detect-prob", type=float, default=1.0)
    p.add_argument("--coverage", type=float, nargs=2, default=(1.0, 1.0), metavar=("MIN", "MAX"))
    p.add_argument("--n-false", type=int, default=0)
    p.add_argument("--false-width", type=int, nargs=2, default=(1, 10), metavar=("MIN", "MAX"))
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--gamma", type=float)
    p.add_argument("--seed", type=int)
    _add_metric_flags(p)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, SeriesError, SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
