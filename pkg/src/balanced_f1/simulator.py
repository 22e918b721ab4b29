"""Controlled generation of ground truth, detector scores and metric records.

A run has two stages. Ground truth places ``n_events`` disjoint events under
width and gap constraints. Scores are then produced by planning which
timesteps a detector "latently" flags (a contiguous sub-span of each detected
event plus a few spurious spans), drawing truncated-Gaussian scores whose mean
is shifted up on the planned spans by an amount set by ``separation``, and
thresholding.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .adjustment import IslandParams, resolve_island_width
from .metrics import DEFAULT_K_PERCENT, all_f1, event_metrics, separation_score
from .series import (
    AnomalySegment,
    SeriesError,
    as_segment_set,
    labels_from_segments,
    threshold_scores,
)
from .theory import NoiseModel

# Fraction of the available headroom used to shift the score means.
MEAN_SHIFT = 0.9
MAX_PLACEMENT_RETRIES = 1000


class SimulationError(ValueError):
    """Raised for infeasible or unplaceable simulation configurations."""


@dataclass(frozen=True)
class GroundTruthConfig:
    T: int
    n_events: int
    width_range: tuple[int, int] = (100, 100)
    min_gap: int = 1
    seed: int = 0

    def __post_init__(self):
        w_min, w_max = self.width_range
        if self.T < 1:
            raise SimulationError(f"T must be >= 1, got {self.T}")
        if self.n_events < 0:
            raise SimulationError(f"n_events must be >= 0, got {self.n_events}")
        if not 1 <= w_min <= w_max:
            raise SimulationError(f"invalid width range {self.width_range}")
        if self.min_gap < 1:
            raise SimulationError(f"min_gap must be >= 1, got {self.min_gap}")
        need = self.n_events * w_min + max(self.n_events - 1, 0) * self.min_gap
        if need > self.T:
            raise SimulationError(
                f"infeasible ground truth: {self.n_events} events of width >= {w_min} "
                f"with gap {self.min_gap} need {need} > T={self.T} timesteps")


@dataclass(frozen=True)
class ScoreConfig:
    detect_prob: float = 1.0
    coverage_range: tuple[float, float] = (1.0, 1.0)
    n_false_events: int = 0
    false_width_range: tuple[int, int] = (1, 1)
    separation: float = 1.0
    score_noise_sigma: float = 0.1
    gamma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        c_min, c_max = self.coverage_range
        f_min, f_max = self.false_width_range
        if not 0 <= self.detect_prob <= 1:
            raise SimulationError(f"detect_prob must lie in [0, 1], got {self.detect_prob}")
        if not 0 < c_min <= c_max <= 1:
            raise SimulationError(f"coverage range must satisfy 0 < c_min <= c_max <= 1, got {self.coverage_range}")
        if self.n_false_events < 0:
            raise SimulationError("n_false_events must be >= 0")
        if not 1 <= f_min <= f_max:
            raise SimulationError(f"invalid false width range {self.false_width_range}")
        if not 0 <= self.separation <= 1:
            raise SimulationError(f"separation must lie in [0, 1], got {self.separation}")
        if self.score_noise_sigma < 0:
            raise SimulationError("score_noise_sigma must be >= 0")
        if not 0 < self.gamma < 1:
            raise SimulationError(f"gamma must lie in (0, 1), got {self.gamma}")


@dataclass(frozen=True)
class MetricConfig:
    k_percent: float = DEFAULT_K_PERCENT
    island: IslandParams = field(default_factory=IslandParams.mean_true_width)


@dataclass(frozen=True)
class DetectionPlan:
    """Timesteps a simulated detector latently flags, before score noise."""

    detected_spans: tuple[AnomalySegment, ...]
    false_spans: tuple[AnomalySegment, ...]
    coverages: tuple[float, ...]

    def mask(self, T: int) -> np.ndarray:
        return labels_from_segments(self.detected_spans + self.false_spans, T).astype(bool)


@dataclass(frozen=True)
class RunRecord:
    run_id: int
    ground_truth: GroundTruthConfig
    score: ScoreConfig
    k_percent: float
    island_width: int
    n_true_events: int
    n_pred_events: int
    detected_true_events: int
    true_positive_predictions: int
    precision_e: float
    recall_e: float
    coverage: float
    separation: float
    f1_p: float
    f1_pa: float
    f1_kpa: float
    f1_ba: float

    def metric_values(self) -> dict[str, float]:
        return dict(f1_p=self.f1_p, f1_pa=self.f1_pa, f1_kpa=self.f1_kpa, f1_ba=self.f1_ba)


def generate_ground_truth(cfg: GroundTruthConfig):
    """Place ``cfg.n_events`` events; returns ``(labels, segments)``.

    Widths are uniform on ``width_range``. The slack left after widths and
    minimum gaps is split into ``n_events + 1`` non-negative parts uniformly
    over all compositions, so every feasible layout for the drawn widths is
    equally likely.
    """
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_events
    if n == 0:
        return labels_from_segments((), cfg.T), ()
    w_min, w_max = cfg.width_range
    widths = rng.integers(w_min, w_max + 1, size=n)
    slack = cfg.T - int(widths.sum()) - (n - 1) * cfg.min_gap
    if slack < 0:
        # Feasible for w_min but not for the drawn widths: shrink to fit.
        widths = _shrink_widths(widths, -slack, w_min)
        slack = 0
    # Stars and bars: choose n bar positions among slack + n slots.
    bars = np.sort(rng.choice(slack + n, size=n, replace=False)) if slack + n > 0 else np.arange(n)
    extras = np.diff(np.concatenate(([-1], bars, [slack + n]))) - 1
    segments = []
    pos = int(extras[0])
    for i in range(n):
        segments.append(AnomalySegment(pos, int(widths[i]), severity=1.0))
        pos += int(widths[i]) + cfg.min_gap + int(extras[i + 1])
    segments = as_segment_set(segments)
    return labels_from_segments(segments, cfg.T), segments


def _shrink_widths(widths: np.ndarray, excess: int, w_min: int) -> np.ndarray:
    widths = widths.copy()
    while excess > 0:
        i = int(np.argmax(widths))
        cut = min(excess, int(widths[i]) - w_min)
        widths[i] -= cut
        excess -= cut
    return widths


def plan_detection(truth_segments, cfg: ScoreConfig, T: int,
                   rng: np.random.Generator | None = None) -> DetectionPlan:
    """Latent detection: which true events are caught, where, and the spurious spans."""
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    segments = as_segment_set(truth_segments)
    if segments and segments[-1].stop > T:
        raise SeriesError(f"segment {segments[-1]} exceeds series length {T}")
    detected, coverages = [], []
    for seg in segments:
        if rng.random() >= cfg.detect_prob:
            continue
        c = rng.uniform(*cfg.coverage_range)
        length = min(seg.width, max(1, round(c * seg.width)))
        offset = int(rng.integers(0, seg.width - length + 1))
        detected.append(AnomalySegment(seg.start + offset, length))
        coverages.append(length / seg.width)

    # Spurious spans stay at least one timestep away from truth and from each
    # other so that each one is a separate predicted event.
    blocked = labels_from_segments(segments, T).astype(bool)
    false_spans = []
    f_min, f_max = cfg.false_width_range
    for _ in range(cfg.n_false_events):
        width = int(rng.integers(f_min, f_max + 1))
        if width > T:
            raise SimulationError(f"false event width {width} exceeds T={T}")
        for _ in range(MAX_PLACEMENT_RETRIES):
            start = int(rng.integers(0, T - width + 1))
            if not blocked[max(start - 1, 0):start + width + 1].any():
                break
        else:
            raise SimulationError(f"could not place a false event of width {width} "
                                  f"after {MAX_PLACEMENT_RETRIES} attempts")
        false_spans.append(AnomalySegment(start, width))
        blocked[start:start + width] = True
    return DetectionPlan(tuple(detected), as_segment_set(false_spans), tuple(coverages))


def score_means(on_span: np.ndarray, separation: float, gamma: float) -> np.ndarray:
    """Per-timestep score mean: raised above ``gamma`` on planned spans, lowered elsewhere."""
    mu_off = gamma * (1 - separation * MEAN_SHIFT)
    mu_on = gamma + separation * (1 - gamma) * MEAN_SHIFT
    return np.where(on_span, mu_on, mu_off)


def truncated_gaussian(rng: np.random.Generator, mean: np.ndarray, sigma: float) -> np.ndarray:
    """Draws from N(mean, sigma) truncated to [0, 1]; ``sigma == 0`` returns ``mean``."""
    mean = np.asarray(mean, dtype=float)
    if sigma == 0:
        return mean.copy()
    a = (0.0 - mean) / sigma
    b = (1.0 - mean) / sigma
    return stats.truncnorm.rvs(a, b, loc=mean, scale=sigma, size=mean.shape, random_state=rng)


def simulate_scores(truth_segments, cfg: ScoreConfig, T: int):
    """Simulated detector scores and the raw thresholded prediction.

    Returns ``(scores, raw_pred)``. Deterministic given ``cfg.seed``.
    """
    rng = np.random.default_rng(cfg.seed)
    plan = plan_detection(truth_segments, cfg, T, rng)
    mean = score_means(plan.mask(T), cfg.separation, cfg.gamma)
    scores = np.clip(truncated_gaussian(rng, mean, cfg.score_noise_sigma), 0.0, 1.0)
    scores.setflags(write=False)
    return scores, threshold_scores(scores, cfg.gamma)


def random_scorer(T: int, seed: int, noise: NoiseModel | None = None) -> np.ndarray:
    """Label-independent i.i.d. scores from ``noise`` (uniform by default)."""
    if T < 1:
        raise SimulationError(f"T must be >= 1, got {T}")
    rng = np.random.default_rng(seed)
    scores = np.asarray((noise or NoiseModel.uniform()).draw(rng, T), dtype=float)
    scores.setflags(write=False)
    return scores


def run_simulation(gt_cfg: GroundTruthConfig, score_cfg: ScoreConfig,
                   metric_cfg: MetricConfig = MetricConfig(), run_id: int = 0) -> RunRecord:
    """Generate truth and scores, then evaluate every metric on them."""
    truth, segments = generate_ground_truth(gt_cfg)
    scores, raw_pred = simulate_scores(segments, score_cfg, gt_cfg.T)
    island_width = resolve_island_width(truth, metric_cfg.island)
    f1s = all_f1(truth, raw_pred, k_percent=metric_cfg.k_percent,
                 island=IslandParams.explicit(island_width))
    events = event_metrics(truth, raw_pred)
    return RunRecord(
        run_id=run_id,
        ground_truth=gt_cfg,
        score=score_cfg,
        k_percent=metric_cfg.k_percent,
        island_width=island_width,
        n_true_events=events.n_true_events,
        n_pred_events=events.n_pred_events,
        detected_true_events=events.detected_true_events,
        true_positive_predictions=events.true_positive_predictions,
        precision_e=events.precision_e,
        recall_e=events.recall_e,
        coverage=events.coverage,
        separation=separation_score(scores, truth),
        f1_p=f1s["p"].f1,
        f1_pa=f1s["pa"].f1,
        f1_kpa=f1s["kpa"].f1,
        f1_ba=f1s["ba"].f1,
    )


def config_dict(cfg) -> dict:
    """Plain-JSON view of a config dataclass (tuples become lists)."""
    return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(cfg).items()}

