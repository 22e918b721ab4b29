"""Pointwise F1 variants, event-level diagnostics and the score separation.

The four F1 variants differ only in how the raw prediction is adjusted before
the usual pointwise confusion matrix is tallied:

* ``"p"``   -- no adjustment
* ``"pa"``  -- point adjustment
* ``"kpa"`` -- point adjustment gated by a K% detection ratio
* ``"ba"``  -- balanced adjustment (point adjustment + false-positive islands)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adjustment import IslandParams, adjust_ba, adjust_kpa, adjust_pa, no_adjustment
from .series import (
    SeriesError,
    as_labels,
    as_segment_set,
    as_scores,
    check_same_length,
    labels_from_segments,
    segments_from_labels,
)

DEFAULT_K_PERCENT = 20.0
KDE_GRID_POINTS = 256
VARIANTS = ("p", "pa", "kpa", "ba")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class PointMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EventMetrics:
    n_true_events: int
    n_pred_events: int
    detected_true_events: int
    true_positive_predictions: int
    precision_e: float
    recall_e: float
    coverage: float


def confusion(truth, pred) -> ConfusionCounts:
    truth = as_labels(truth)
    pred = as_labels(pred)
    check_same_length(truth, pred)
    t = truth.astype(bool)
    p = pred.astype(bool)
    return ConfusionCounts(
        tp=int(np.count_nonzero(t & p)),
        fp=int(np.count_nonzero(~t & p)),
        fn=int(np.count_nonzero(t & ~p)),
        tn=int(np.count_nonzero(~t & ~p)),
    )


def precision_recall_f1(c: ConfusionCounts) -> PointMetrics:
    """Precision, recall and F1 with the degenerate cases pinned.

    No predicted positives gives precision 1, no true positives to find gives
    recall 1, and a perfect all-negative agreement gives F1 = 1. Any error
    with ``tp == 0`` gives F1 = 0.
    """
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 1.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 1.0
    if c.tp == 0:
        f1 = 1.0 if c.fp == 0 and c.fn == 0 else 0.0
    else:
        f1 = 2 * c.tp / (2 * c.tp + c.fp + c.fn)
    return PointMetrics(precision, recall, f1)


def adjust(truth, pred, variant: str, *, k_percent: float = DEFAULT_K_PERCENT,
           island: IslandParams | int | str = "auto"):
    variant = variant.lower()
    if variant == "p":
        return no_adjustment(pred, truth)
    if variant == "pa":
        return adjust_pa(pred, truth)
    if variant == "kpa":
        return adjust_kpa(pred, truth, k_percent)
    if variant == "ba":
        return adjust_ba(pred, truth, IslandParams.coerce(island))
    raise ValueError(f"unknown F1 variant {variant!r}; expected one of {VARIANTS}")


def f1_variant(truth, pred, variant: str, *, k_percent: float = DEFAULT_K_PERCENT,
               island: IslandParams | int | str = "auto") -> PointMetrics:
    """Precision/recall/F1 of ``pred`` after the chosen adjustment.

    >>> truth = [0, 0, 1, 1, 1, 0, 0, 0, 0, 0]
    >>> pred = [0, 0, 0, 1, 0, 0, 0, 1, 0, 0]
    >>> round(f1_variant(truth, pred, "ba", island=3).f1, 4)
    0.6667
    """
    adjusted = adjust(truth, pred, variant, k_percent=k_percent, island=island)
    return precision_recall_f1(confusion(truth, adjusted.values))


def all_f1(truth, pred, *, k_percent: float = DEFAULT_K_PERCENT,
           island: IslandParams | int | str = "auto") -> dict[str, PointMetrics]:
    return {v: f1_variant(truth, pred, v, k_percent=k_percent, island=island) for v in VARIANTS}


def event_metrics_from_segments(true_segments, pred_segments, length: int) -> EventMetrics:
    """Event precision/recall/coverage from explicit event lists.

    Adjacent predicted segments stay distinct events here, unlike
    :func:`event_metrics`, which derives events from labels.
    """
    true_segs = as_segment_set(true_segments)
    pred_segs = as_segment_set(pred_segments)
    truth = labels_from_segments(true_segs, length)
    pred = labels_from_segments(pred_segs, length)
    tcum = np.concatenate(([0], np.cumsum(truth, dtype=np.int64)))
    pcum = np.concatenate(([0], np.cumsum(pred, dtype=np.int64)))

    hits = np.array([pcum[s.stop] - pcum[s.start] for s in true_segs], dtype=np.int64)
    widths = np.array([s.width for s in true_segs], dtype=np.int64)
    overlaps = np.array([tcum[s.stop] - tcum[s.start] for s in pred_segs], dtype=np.int64)

    n_true, n_pred = len(true_segs), len(pred_segs)
    detected = hits > 0
    m_tp = int(np.count_nonzero(detected))
    n_tp = int(np.count_nonzero(overlaps > 0))
    coverage = float(np.mean(hits[detected] / widths[detected])) if m_tp else 0.0
    return EventMetrics(
        n_true_events=n_true,
        n_pred_events=n_pred,
        detected_true_events=m_tp,
        true_positive_predictions=n_tp,
        precision_e=n_tp / n_pred if n_pred else 1.0,
        recall_e=m_tp / n_true if n_true else 1.0,
        coverage=coverage,
    )


def event_metrics(truth, pred_raw) -> EventMetrics:
    """Event-level precision, recall and coverage of a raw (unadjusted) prediction.

    A true event counts as detected when any predicted event overlaps it, and
    a predicted event is a true positive when it overlaps any true event.
    Coverage is the mean detected fraction over detected true events.
    """
    truth = as_labels(truth)
    pred_raw = as_labels(pred_raw)
    n = check_same_length(truth, pred_raw)
    return event_metrics_from_segments(segments_from_labels(truth), segments_from_labels(pred_raw), n)


def hellinger(p, q) -> float:
    """Hellinger distance between two discrete distributions (normalized to sum 1)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    if np.any(p < 0) or np.any(q < 0) or p.sum() <= 0 or q.sum() <= 0:
        raise ValueError("distributions must be non-negative with positive mass")
    p = p / p.sum()
    q = q / q.sum()
    h = np.sqrt(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2) / 2.0)
    return float(min(h, 1.0))


def silverman_bandwidth(x: np.ndarray, floor: float = 1e-3) -> float:
    """Silverman's rule of thumb, ``0.9 * min(std, IQR/1.34) * n**-0.2``.

    Falls back to the standard deviation when the IQR is zero and to ``floor``
    for constant samples.
    """
    n = x.size
    std = float(np.std(x, ddof=1)) if n > 1 else 0.0
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(std, (q75 - q25) / 1.34) if q75 > q25 else std
    return max(0.9 * spread * n ** -0.2, floor)


def gaussian_kde_on_grid(x: np.ndarray, grid: np.ndarray, bandwidth: float) -> np.ndarray:
    """Gaussian kernel density of sample ``x`` evaluated at ``grid`` (unnormalized)."""
    # Sort once so each grid point only touches samples within 8 bandwidths.
    xs = np.sort(x)
    lo = np.searchsorted(xs, grid - 8 * bandwidth, side="left")
    hi = np.searchsorted(xs, grid + 8 * bandwidth, side="right")
    out = np.empty(grid.size)
    for i, (g, a, b) in enumerate(zip(grid, lo, hi)):
        z = (xs[a:b] - g) / bandwidth
        out[i] = np.exp(-0.5 * z * z).sum()
    return out / (x.size * bandwidth * np.sqrt(2 * np.pi))


def separation_score(scores, truth, grid_points: int = KDE_GRID_POINTS) -> float:
    """Hellinger distance between the score distributions of regular and anomalous timesteps.

    Both densities are Gaussian KDEs (Silverman bandwidth per class),
    evaluated on ``grid_points`` evenly spaced points over the overlap of the
    two sample ranges and normalized to discrete distributions there.
    Disjoint ranges give 1.0.
    """
    truth = as_labels(truth)
    scores = as_scores(scores, length=len(truth))
    regular = scores[truth == 0]
    anomalous = scores[truth == 1]
    if regular.size == 0 or anomalous.size == 0:
        raise SeriesError("separation needs at least one regular and one anomalous timestep")
    lo = max(regular.min(), anomalous.min())
    hi = min(regular.max(), anomalous.max())
    if lo > hi:
        return 1.0
    grid = np.linspace(lo, hi, grid_points) if hi > lo else np.array([lo])
    p = gaussian_kde_on_grid(regular, grid, silverman_bandwidth(regular))
    q = gaussian_kde_on_grid(anomalous, grid, silverman_bandwidth(anomalous))
    if p.sum() <= 0 or q.sum() <= 0:
        # All kernel mass underflowed on the overlap: effectively disjoint.
        return 1.0
    return hellinger(p, q)
