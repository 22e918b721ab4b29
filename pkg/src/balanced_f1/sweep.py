"""Grid sweeps over simulator configurations and the run-record CSV format."""
from __future__ import annotations

import csv
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adjustment import IslandParams
from .series import SeriesError
from .simulator import (
    GroundTruthConfig,
    MetricConfig,
    ScoreConfig,
    SimulationError,
    run_simulation,
)

SEED_ENV_VAR = "BALANCED_F1_SEED"
DEFAULT_MASTER_SEED = 20240601

RUN_COLUMNS = [
    "run_id", "seed", "T", "n_events", "gamma", "K", "w_N",
    "precision_E", "recall_E", "coverage", "separation",
    "f1_p", "f1_pa", "f1_kpa", "f1_ba",
]
# Knob and status columns appended after the fixed schema above.
EXTRA_COLUMNS = [
    "score_seed", "width_min", "width_max", "min_gap", "detect_prob",
    "coverage_min", "coverage_max", "n_false_events", "false_width_min",
    "false_width_max", "separation_knob", "score_noise_sigma",
    "n_pred_events", "detected_true_events", "true_positive_predictions",
    "status", "reason",
]
CSV_COLUMNS = RUN_COLUMNS + EXTRA_COLUMNS

GT_KNOBS = ("T", "n_events", "width_range", "min_gap")
SCORE_KNOBS = ("detect_prob", "coverage_range", "n_false_events", "false_width_range",
               "separation", "score_noise_sigma", "gamma")
RANGE_KNOBS = {"width_range", "coverage_range", "false_width_range"}


def default_master_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_MASTER_SEED))


def _alternatives(name: str, value) -> list:
    """Normalize a knob value to a list of alternatives."""
    if name in RANGE_KNOBS:
        if isinstance(value, (int, float)):
            return [(value, value)]
        value = list(value)
        if len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
            return [tuple(value)]
        return [tuple(v) if isinstance(v, (list, tuple)) else (v, v) for v in value]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def coverage_pairs(endpoints) -> list[tuple[float, float]]:
    """All ``(lo, hi)`` pairs with ``lo <= hi`` from a list of endpoints."""
    pts = sorted(endpoints)
    return [(lo, hi) for i, lo in enumerate(pts) for hi in pts[i:]]


@dataclass
class SweepSpec:
    """A cartesian grid of simulator knobs plus run count and master seed.

    Run ``i`` uses grid point ``i % len(grid)`` and a seed derived from
    ``(master_seed, i)``, so the run count may exceed the grid size.
    """

    ground_truth: dict
    score: dict
    k_percent: float = 20.0
    island: int | str = "auto"
    run_count: int = 0
    master_seed: int = field(default_factory=default_master_seed)

    def __post_init__(self):
        unknown = set(self.ground_truth) - set(GT_KNOBS)
        unknown |= set(self.score) - set(SCORE_KNOBS)
        if unknown:
            raise ValueError(f"unknown sweep knobs: {sorted(unknown)}")
        if self.run_count <= 0:
            self.run_count = len(self.grid())

    @classmethod
    def from_dict(cls, doc: dict) -> "SweepSpec":
        metric = doc.get("metric", {})
        seed = doc.get("master_seed")
        return cls(
            ground_truth=dict(doc["ground_truth"]),
            score=dict(doc.get("score", {})),
            k_percent=float(metric.get("k_percent", 20.0)),
            island=metric.get("island", "auto"),
            run_count=int(doc.get("run_count", 0)),
            master_seed=default_master_seed() if seed is None else int(seed),
        )

    @classmethod
    def from_json(cls, path) -> "SweepSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return dict(ground_truth=self.ground_truth, score=self.score,
                    metric=dict(k_percent=self.k_percent, island=self.island),
                    run_count=self.run_count, master_seed=self.master_seed)

    def metric_config(self) -> MetricConfig:
        return MetricConfig(k_percent=self.k_percent, island=IslandParams.coerce(self.island))

    def grid(self) -> list[tuple[dict, dict]]:
        gt_names = [k for k in GT_KNOBS if k in self.ground_truth]
        sc_names = [k for k in SCORE_KNOBS if k in self.score]
        axes = [_alternatives(k, self.ground_truth[k]) for k in gt_names]
        axes += [_alternatives(k, self.score[k]) for k in sc_names]
        combos = []
        for values in itertools.product(*axes):
            gt = dict(zip(gt_names, values[:len(gt_names)]))
            sc = dict(zip(sc_names, values[len(gt_names):]))
            combos.append((gt, sc))
        return combos


def default_sweep_spec(master_seed: int | None = None) -> SweepSpec:
    """The 15,000-run grid behind the separation/precision/recall study."""
    return SweepSpec(
        ground_truth=dict(T=5000, n_events=[1, 2, 4, 8], width_range=[20, 50, 100], min_gap=50),
        score=dict(
            detect_prob=[0.25, 0.5, 0.75, 1.0],
            coverage_range=coverage_pairs([0.1, 0.4, 0.7, 1.0]),
            n_false_events=[0, 2, 5, 10],
            false_width_range=[(1, 10)],
            separation=[0.0, 0.25, 0.5, 0.75, 1.0],
            score_noise_sigma=0.1,
            gamma=0.5,
        ),
        k_percent=20.0,
        island="auto",
        run_count=15000,
        master_seed=default_master_seed() if master_seed is None else master_seed,
    )


def derive_seeds(master_seed: int, index: int) -> tuple[int, int]:
    """Independent (ground-truth, score) seeds for run ``index``."""
    state = np.random.SeedSequence([master_seed, index]).generate_state(2)
    return int(state[0]), int(state[1])


def _blank_row(run_id: int, gt: dict, sc: dict, k: float, seeds) -> dict:
    row = {c: "" for c in CSV_COLUMNS}
    w = gt.get("width_range", ("", ""))
    c = sc.get("coverage_range", ("", ""))
    f = sc.get("false_width_range", ("", ""))
    row.update(
        run_id=run_id, seed=seeds[0], score_seed=seeds[1], T=gt.get("T", ""),
        n_events=gt.get("n_events", ""), gamma=sc.get("gamma", ""), K=k,
        width_min=w[0], width_max=w[1], min_gap=gt.get("min_gap", ""),
        detect_prob=sc.get("detect_prob", ""), coverage_min=c[0], coverage_max=c[1],
        n_false_events=sc.get("n_false_events", ""), false_width_min=f[0],
        false_width_max=f[1], separation_knob=sc.get("separation", ""),
        score_noise_sigma=sc.get("score_noise_sigma", ""),
    )
    return row


def run_one(spec: SweepSpec, index: int, combo=None) -> dict:
    """Execute run ``index`` of ``spec`` and return its CSV row."""
    if combo is None:
        grid = spec.grid()
        combo = grid[index % len(grid)]
    gt, sc = combo
    seeds = derive_seeds(spec.master_seed, index)
    row = _blank_row(index, gt, sc, spec.k_percent, seeds)
    try:
        record = run_simulation(
            GroundTruthConfig(**gt, seed=seeds[0]),
            ScoreConfig(**sc, seed=seeds[1]),
            spec.metric_config(),
            run_id=index,
        )
    except (SimulationError, SeriesError) as exc:
        row.update(status="skipped", reason=str(exc))
        return row
    row.update(
        gamma=record.score.gamma, w_N=record.island_width,
        precision_E=record.precision_e, recall_E=record.recall_e,
        coverage=record.coverage, separation=record.separation,
        f1_p=record.f1_p, f1_pa=record.f1_pa, f1_kpa=record.f1_kpa, f1_ba=record.f1_ba,
        n_pred_events=record.n_pred_events,
        detected_true_events=record.detected_true_events,
        true_positive_predictions=record.true_positive_predictions,
        status="ok",
    )
    return row


def _run_chunk(args) -> list[dict]:
    spec, indices = args
    grid = spec.grid()
    return [run_one(spec, i, grid[i % len(grid)]) for i in indices]


def run_sweep(spec: SweepSpec, workers: int = 1, progress=None) -> list[dict]:
    """Run every simulation in ``spec``; rows come back ordered by run index."""
    indices = list(range(spec.run_count))
    if workers <= 1:
        grid = spec.grid()
        rows = []
        for i in indices:
            rows.append(run_one(spec, i, grid[i % len(grid)]))
            if progress:
                progress(i + 1, spec.run_count)
        return rows
    chunk = max(1, len(indices) // (workers * 8))
    chunks = [(spec, indices[i:i + chunk]) for i in range(0, len(indices), chunk)]
    rows = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, chunks):
            rows.extend(part)
            if progress:
                progress(len(rows), spec.run_count)
    rows.sort(key=lambda r: r["run_id"])
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))  # plain repr even for numpy scalars
    return str(value)


def write_runs_csv(rows, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(c, "")) for c in CSV_COLUMNS])


def read_runs_csv(path) -> list[dict]:
    """Read a run-record CSV; numeric fields become floats, blanks stay ``""``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RUN_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"runs CSV is missing columns: {missing}")
        rows = []
        for raw in reader:
            row = {}
            for k, v in raw.items():
                if k in ("status", "reason") or v == "":
                    row[k] = v
                else:
                    try:
                        row[k] = float(v)
                    except ValueError as exc:
                        raise ValueError(f"non-numeric value {v!r} in column {k}") from exc
            row.setdefault("status", "ok")
            rows.append(row)
    return rows
