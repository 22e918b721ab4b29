"""Label and score series, and the label <-> event-segment correspondence.

Series are plain 1-D numpy arrays. ``as_labels`` and ``as_scores`` validate
and return read-only copies so that downstream code can share them freely.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class SeriesError(ValueError):
    """Raised when a series or segment violates its contract."""


@dataclass(frozen=True, order=True)
class AnomalySegment:
    """A contiguous anomaly event: ``width`` timesteps starting at ``start``."""

    start: int
    width: int
    severity: float = 0.0

    def __post_init__(self):
        if self.start < 0:
            raise SeriesError(f"segment start must be >= 0, got {self.start}")
        if self.width < 1:
            raise SeriesError(f"segment width must be >= 1, got {self.width}")
        if self.severity < 0:
            raise SeriesError(f"segment severity must be >= 0, got {self.severity}")

    @property
    def stop(self) -> int:
        """One past the last timestep of the segment."""
        return self.start + self.width

    @property
    def end(self) -> int:
        """Last timestep of the segment (inclusive)."""
        return self.start + self.width - 1


SegmentSet = tuple  # tuple[AnomalySegment, ...], sorted and disjoint


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def as_labels(values, length: int | None = None) -> np.ndarray:
    """Validate a binary label sequence and return it as a read-only int8 array."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise SeriesError(f"labels must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise SeriesError("labels must contain at least one timestep")
    if arr.dtype == bool:
        out = arr.astype(np.int8)
    else:
        if not np.all((arr == 0) | (arr == 1)):
            raise SeriesError("labels must contain only 0 and 1")
        out = arr.astype(np.int8)
    if length is not None and out.size != length:
        raise SeriesError(f"expected {length} timesteps, got {out.size}")
    return _freeze(out)


def as_scores(values, length: int | None = None) -> np.ndarray:
    """Validate a detector score sequence (finite, within [0, 1])."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise SeriesError(f"scores must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise SeriesError("scores must contain at least one timestep")
    if not np.all(np.isfinite(arr)):
        raise SeriesError("scores must be finite")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise SeriesError("scores must lie in [0, 1]; normalize them first")
    if length is not None and arr.size != length:
        raise SeriesError(f"expected {length} timesteps, got {arr.size}")
    return _freeze(arr.copy())


def check_same_length(*series: np.ndarray) -> int:
    lengths = {len(s) for s in series}
    if len(lengths) != 1:
        raise SeriesError(f"series lengths differ: {sorted(lengths)}")
    return lengths.pop()


def as_segment_set(segments: Iterable[AnomalySegment | Sequence]) -> SegmentSet:
    """Normalize segments (or ``(start, width[, severity])`` tuples) into a sorted, disjoint tuple."""
    segs = []
    for seg in segments:
        if not isinstance(seg, AnomalySegment):
            seg = AnomalySegment(*seg)
        segs.append(seg)
    segs.sort()
    for prev, nxt in zip(segs, segs[1:]):
        if nxt.start <= prev.end:
            raise SeriesError(f"segments overlap: {prev} and {nxt}")
    return tuple(segs)


def run_bounds(flags: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Start indices and (exclusive) stop indices of maximal runs of nonzero values."""
    padded = np.concatenate(([0], np.asarray(flags, dtype=np.int8) != 0, [0])).astype(np.int8)
    edges = np.diff(padded)
    return np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)


def segments_from_labels(labels) -> SegmentSet:
    """Maximal runs of 1s as segments (severity 0)."""
    labels = as_labels(labels)
    starts, stops = run_bounds(labels)
    return tuple(AnomalySegment(int(a), int(b - a)) for a, b in zip(starts, stops))


def labels_from_segments(segments, length: int) -> np.ndarray:
    """Inverse of :func:`segments_from_labels`."""
    if length < 1:
        raise SeriesError(f"length must be >= 1, got {length}")
    out = np.zeros(length, dtype=np.int8)
    for seg in as_segment_set(segments):
        if seg.stop > length:
            raise SeriesError(f"segment {seg} exceeds series length {length}")
        out[seg.start:seg.stop] = 1
    return _freeze(out)


def threshold_scores(scores, gamma: float) -> np.ndarray:
    """Binary predictions ``scores > gamma``; ties at ``gamma`` are negatives."""
    if not np.isfinite(gamma):
        raise SeriesError(f"threshold must be finite, got {gamma}")
    scores = np.asarray(scores, dtype=float)
    return _freeze((scores > gamma).astype(np.int8))
