"""Prediction adjustment protocols: point adjustment (PA), K%-thresholded
point adjustment (KPA) and balanced adjustment (BA).

All protocols take a raw binary prediction and the ground truth and return an
:class:`AdjustedPrediction`. Adjustment only ever adds positives.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .series import SeriesError, as_labels, check_same_length, run_bounds


class Protocol(enum.Enum):
    NONE = "none"
    PA = "pa"
    KPA = "kpa"
    BA = "ba"


class Provenance(enum.IntEnum):
    """Per-timestep audit tag of an adjusted prediction."""

    NEGATIVE = 0
    RAW_TP = 1
    RAW_FP = 2
    PA_FILL = 3
    ISLAND_FILL = 4


class IslandPolicy(enum.Enum):
    EXPLICIT = "explicit"
    MEAN_TRUE_WIDTH = "mean_true_width"


@dataclass(frozen=True)
class IslandParams:
    """How the false-positive island width is chosen.

    Use ``IslandParams.explicit(w)`` for a fixed width or
    ``IslandParams.mean_true_width()`` to use the rounded mean width of the
    ground-truth events.
    """

    policy: IslandPolicy = IslandPolicy.MEAN_TRUE_WIDTH
    width: int | None = None

    def __post_init__(self):
        if self.policy is IslandPolicy.EXPLICIT:
            if self.width is None or int(self.width) != self.width or self.width < 1:
                raise ValueError(f"explicit island width must be a positive integer, got {self.width}")

    @classmethod
    def explicit(cls, width: int) -> "IslandParams":
        return cls(IslandPolicy.EXPLICIT, width)

    @classmethod
    def mean_true_width(cls) -> "IslandParams":
        return cls(IslandPolicy.MEAN_TRUE_WIDTH)

    @classmethod
    def coerce(cls, value) -> "IslandParams":
        """Accept an ``IslandParams``, a positive int, or ``"auto"``."""
        if isinstance(value, cls):
            return value
        if value is None or value == "auto":
            return cls.mean_true_width()
        return cls.explicit(int(value))


@dataclass(frozen=True)
class AdjustedPrediction:
    values: np.ndarray
    provenance: np.ndarray
    protocol: Protocol
    k_percent: float | None = None
    island_width: int | None = None


def _pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    pred = as_labels(pred)
    truth = as_labels(truth)
    check_same_length(pred, truth)
    return pred, truth


def _segment_hits(pred: np.ndarray, truth: np.ndarray):
    """Bounds of every true segment and the number of raw positives inside it."""
    starts, stops = run_bounds(truth)
    if starts.size == 0:
        return starts, stops, starts
    csum = np.concatenate(([0], np.cumsum(pred, dtype=np.int64)))
    return starts, stops, csum[stops] - csum[starts]


def _fill(mask_len: int, starts, stops) -> np.ndarray:
    """Boolean mask covering the half-open intervals ``[starts, stops)``."""
    diff = np.zeros(mask_len + 1, dtype=np.int64)
    np.add.at(diff, starts, 1)
    np.add.at(diff, stops, -1)
    return np.cumsum(diff[:-1]) > 0


def _build(pred, truth, filled_segments, islands, protocol, **params) -> AdjustedPrediction:
    prov = np.full(pred.shape, Provenance.NEGATIVE, dtype=np.int8)
    prov[islands] = Provenance.ISLAND_FILL
    prov[filled_segments] = Provenance.PA_FILL
    prov[(pred == 1) & (truth == 1)] = Provenance.RAW_TP
    prov[(pred == 1) & (truth == 0)] = Provenance.RAW_FP
    values = (prov != Provenance.NEGATIVE).astype(np.int8)
    values.setflags(write=False)
    prov.setflags(write=False)
    return AdjustedPrediction(values, prov, protocol, **params)


def no_adjustment(pred, truth) -> AdjustedPrediction:
    pred, truth = _pair(pred, truth)
    empty = np.zeros(pred.shape, dtype=bool)
    return _build(pred, truth, empty, empty, Protocol.NONE)


def adjust_pa(pred, truth) -> AdjustedPrediction:
    """Fill every true segment that contains at least one raw positive."""
    pred, truth = _pair(pred, truth)
    starts, stops, hits = _segment_hits(pred, truth)
    hit = hits > 0
    filled = _fill(len(pred), starts[hit], stops[hit])
    return _build(pred, truth, filled, np.zeros_like(filled), Protocol.PA)


def adjust_kpa(pred, truth, k_percent: float) -> AdjustedPrediction:
    """Fill a true segment only if at least ``k_percent`` % of it was detected.

    Segments below the ratio keep their raw predictions. ``k_percent=0``
    reduces to :func:`adjust_pa`.
    """
    if not 0 <= k_percent <= 100:
        raise ValueError(f"k_percent must lie in [0, 100], got {k_percent}")
    pred, truth = _pair(pred, truth)
    starts, stops, hits = _segment_hits(pred, truth)
    # hits / width >= K / 100, compared without division
    ok = (hits > 0) & (hits * 100 >= k_percent * (stops - starts))
    filled = _fill(len(pred), starts[ok], stops[ok])
    return _build(pred, truth, filled, np.zeros_like(filled), Protocol.KPA, k_percent=k_percent)


def resolve_island_width(truth, params) -> int:
    params = IslandParams.coerce(params)
    if params.policy is IslandPolicy.EXPLICIT:
        return int(params.width)
    starts, stops = run_bounds(as_labels(truth))
    if starts.size == 0:
        raise SeriesError("mean-true-width island policy needs at least one true segment")
    mean_width = float(np.mean(stops - starts))
    return max(1, math.floor(mean_width + 0.5))


def island_mask(pred, truth, island_width: int) -> np.ndarray:
    """Timesteps covered by islands anchored on raw false positives.

    Each anchor ``u`` spans ``island_width`` timesteps,
    ``[u - (w-1)//2, u + ceil((w-1)/2)]``, clipped to the series and to
    timesteps whose ground truth is 0. Islands are anchored only on raw false
    positives; filled timesteps never anchor new islands.
    """
    if island_width < 1:
        raise ValueError(f"island width must be >= 1, got {island_width}")
    pred, truth = _pair(pred, truth)
    n = len(pred)
    anchors = np.flatnonzero((pred == 1) & (truth == 0))
    left = (island_width - 1) // 2
    right = island_width - 1 - left
    lo = np.maximum(anchors - left, 0)
    hi = np.minimum(anchors + right + 1, n)
    return _fill(n, lo, hi) & (truth == 0)


def adjust_ba(pred, truth, params: IslandParams | int = IslandParams()) -> AdjustedPrediction:
    """Point adjustment plus a width-``w_N`` island around every raw false positive."""
    params = IslandParams.coerce(params)
    pred, truth = _pair(pred, truth)
    width = resolve_island_width(truth, params)
    starts, stops, hits = _segment_hits(pred, truth)
    hit = hits > 0
    filled = _fill(len(pred), starts[hit], stops[hit])
    islands = island_mask(pred, truth, width)
    return _build(pred, truth, filled, islands, Protocol.BA, island_width=width)
