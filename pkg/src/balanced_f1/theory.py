"""Closed-form PA and BA metrics for a label-independent random scorer.

For a single anomaly event of width ``w_a`` in a long series with anomaly
ratio ``q``, let ``n = N(gamma)`` be the probability that a noise score falls
at or below the threshold. Then

    recall     = 1 - n**w_a
    F1_PA      = 2 q r / ((1 - n)      + q (1 + n      - n**w_a))
    F1_BA      = 2 q r / ((1 - n**w_N) + q (1 + n**w_N - n**w_a))

where ``r`` is the recall. The BA form is the PA form with the noise
exceedance probability of a normal timestep replaced by the probability that
any of the ``w_N`` anchors of its island fires.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .metrics import PointMetrics


class NoiseKind(enum.Enum):
    UNIFORM = "uniform"
    TRUNCATED_GAUSSIAN = "truncated_gaussian"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class NoiseModel:
    """Distribution of a random scorer's values on [0, 1].

    Build one with :meth:`uniform`, :meth:`truncated_gaussian` or
    :meth:`empirical`.
    """

    kind: NoiseKind
    mu: float = 0.5
    sigma: float = 1.0
    sample: np.ndarray | None = field(default=None, repr=False, compare=False)

    @classmethod
    def uniform(cls) -> "NoiseModel":
        return cls(NoiseKind.UNIFORM)

    @classmethod
    def truncated_gaussian(cls, mu: float, sigma: float) -> "NoiseModel":
        if sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {sigma}")
        return cls(NoiseKind.TRUNCATED_GAUSSIAN, mu=float(mu), sigma=float(sigma))

    @classmethod
    def empirical(cls, sample) -> "NoiseModel":
        xs = np.sort(np.asarray(sample, dtype=float))
        if xs.size == 0 or xs[0] < 0 or xs[-1] > 1:
            raise ValueError("empirical noise sample must be non-empty and within [0, 1]")
        xs.setflags(write=False)
        return cls(NoiseKind.EMPIRICAL, sample=xs)

    def _empirical_knots(self):
        # Midpoint plotting positions (i - 0.5)/n at the sorted samples,
        # pinned to 0 and 1 at the ends of the unit interval.
        xs = self.sample
        n = xs.size
        levels = (np.arange(1, n + 1) - 0.5) / n
        ux, idx = np.unique(xs, return_inverse=True)
        ulevels = np.bincount(idx, weights=levels) / np.bincount(idx)
        knots_x = np.concatenate(([0.0], ux, [1.0]))
        knots_y = np.concatenate(([0.0], ulevels, [1.0]))
        if ux[0] == 0.0:
            knots_x, knots_y = knots_x[1:], knots_y[1:]
        if ux[-1] == 1.0:
            knots_x, knots_y = knots_x[:-1], knots_y[:-1]
        return knots_x, knots_y

    def _truncnorm(self):
        a = (0.0 - self.mu) / self.sigma
        b = (1.0 - self.mu) / self.sigma
        return stats.truncnorm(a, b, loc=self.mu, scale=self.sigma)

    def cdf(self, x):
        """``N(x) = P(score <= x)``."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        if self.kind is NoiseKind.UNIFORM:
            out = x
        elif self.kind is NoiseKind.TRUNCATED_GAUSSIAN:
            if self.sigma == 0:
                out = (x >= np.clip(self.mu, 0.0, 1.0)).astype(float)
            else:
                out = self._truncnorm().cdf(x)
        else:
            kx, ky = self._empirical_knots()
            out = np.interp(x, kx, ky)
        return out if np.ndim(out) else float(out)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """i.i.d. draws from the model."""
        if self.kind is NoiseKind.UNIFORM:
            return rng.uniform(0.0, 1.0, size)
        if self.kind is NoiseKind.TRUNCATED_GAUSSIAN:
            if self.sigma == 0:
                return np.full(size, float(np.clip(self.mu, 0.0, 1.0)))
            return self._truncnorm().rvs(size=size, random_state=rng)
        kx, ky = self._empirical_knots()
        return np.interp(rng.uniform(0.0, 1.0, size), ky, kx)


@dataclass(frozen=True)
class TheoryParams:
    q: float
    w_a: int
    w_n: int = 1
    gamma: float = 0.5

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError(f"anomaly ratio q must lie in (0, 1), got {self.q}")
        if self.w_a < 1 or self.w_n < 1:
            raise ValueError("widths must be >= 1")


def _closed_form(q: float, miss: float, quiet: float) -> PointMetrics:
    """Metrics from the event miss probability and the normal-timestep quiet probability.

    ``miss`` is the probability that no timestep of the event fires
    (``n**w_a``); ``quiet`` is the probability that a normal timestep stays
    negative after adjustment (``n`` for PA, ``n**w_N`` for BA).
    """
    recall = 1 - miss
    denom = (1 - quiet) + q * (quiet - miss)
    precision = q * recall / denom if denom > 0 else 1.0
    f1 = 2 * q * recall / ((1 - quiet) + q * (1 + quiet - miss))
    return PointMetrics(precision, recall, f1)


def f1_pa_noise(p: TheoryParams, noise: NoiseModel | None = None) -> PointMetrics:
    """Point-adjusted precision/recall/F1 of a random scorer on a single event."""
    n = (noise or NoiseModel.uniform()).cdf(p.gamma)
    return _closed_form(p.q, n ** p.w_a, n)


def f1_ba_noise(p: TheoryParams, noise: NoiseModel | None = None) -> PointMetrics:
    """Balanced-adjusted precision/recall/F1 of a random scorer on a single event."""
    n = (noise or NoiseModel.uniform()).cdf(p.gamma)
    return _closed_form(p.q, n ** p.w_a, n ** p.w_n)


def f1_ba_closed(alpha: float, beta: float, p: TheoryParams) -> PointMetrics:
    """BA metrics for a detector with miss rate ``alpha`` on anomalous and
    true-negative rate ``beta`` on normal timesteps (both per timestep)."""
    if not (0 <= alpha <= 1 and 0 <= beta <= 1):
        raise ValueError("alpha and beta must lie in [0, 1]")
    return _closed_form(p.q, alpha ** p.w_a, beta ** p.w_n)


def threshold_sensitivity(p: TheoryParams) -> float:
    """d F1_BA / d gamma under uniform noise with ``w_N == w_a``."""
    q, w, g = p.q, p.w_a, p.gamma
    return -2 * q * q * w * g ** (w - 1) / (1 + q - g ** w) ** 2


def theory_curve(qs, w_a: int, w_n: int, gammas, noise: NoiseModel | None = None) -> list[dict]:
    """Rows of ``q, gamma, f1_pa, f1_ba, precision_pa, precision_ba, recall``."""
    rows = []
    for q in qs:
        for g in gammas:
            p = TheoryParams(q=float(q), w_a=w_a, w_n=w_n, gamma=float(g))
            pa = f1_pa_noise(p, noise)
            ba = f1_ba_noise(p, noise)
            rows.append(dict(q=p.q, gamma=p.gamma, f1_pa=pa.f1, f1_ba=ba.f1,
                             precision_pa=pa.precision, precision_ba=ba.precision,
                             recall=pa.recall))
    return rows
