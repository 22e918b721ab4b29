import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balanced_f1.theory import (
    NoiseModel,
    TheoryParams,
    f1_ba_closed,
    f1_ba_noise,
    f1_pa_noise,
    theory_curve,
    threshold_sensitivity,
)

GAMMAS = np.round(np.arange(0.05, 0.991, 0.02), 10)
NOISES = [
    NoiseModel.uniform(),
    NoiseModel.truncated_gaussian(0.5, 0.2),
    NoiseModel.truncated_gaussian(0.9, 0.05),
    NoiseModel.empirical(np.random.default_rng(0).beta(2, 5, 300)),
]


def f1_from_pr(m):
    return 2 * m.precision * m.recall / (m.precision + m.recall)


class TestNoiseModel:
    def test_uniform_cdf(self):
        assert NoiseModel.uniform().cdf(0.3) == pytest.approx(0.3)

    @pytest.mark.parametrize("noise", NOISES, ids=lambda n: n.kind.value)
    def test_cdf_monotone_and_bounded(self, noise):
        xs = np.linspace(0, 1, 201)
        cdf = noise.cdf(xs)
        assert np.all(np.diff(cdf) >= -1e-15)
        assert cdf[0] == pytest.approx(0.0, abs=1e-9)
        assert cdf[-1] == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("noise", NOISES, ids=lambda n: n.kind.value)
    def test_draws_follow_cdf(self, noise):
        from scipy.stats import kstest

        x = noise.draw(np.random.default_rng(1), 20_000)
        assert x.min() >= 0 and x.max() <= 1
        assert kstest(x, noise.cdf).statistic < 0.02

    def test_degenerate_gaussian(self):
        noise = NoiseModel.truncated_gaussian(0.4, 0.0)
        assert noise.cdf(0.39) == 0.0 and noise.cdf(0.4) == 1.0
        assert np.all(noise.draw(np.random.default_rng(0), 5) == 0.4)

    def test_empirical_midpoint_levels(self):
        noise = NoiseModel.empirical([0.2, 0.4, 0.6, 0.8])
        assert noise.cdf(0.2) == pytest.approx(0.125)
        assert noise.cdf(0.5) == pytest.approx(0.5)
        assert noise.cdf(0.8) == pytest.approx(0.875)


class TestPointAdjustedNoise:
    def test_reference_value(self):
        # direct scalar evaluation of the displayed formula
        n = 0.9
        expected = 2 * 0.2 * (1 - n ** 100) / ((1 - n) + 0.2 * (1 + n - n ** 100))
        m = f1_pa_noise(TheoryParams(q=0.2, w_a=100, gamma=0.9))
        assert m.f1 == pytest.approx(expected, abs=1e-15)
        assert m.f1 == pytest.approx(0.8333, abs=1e-4)

    def test_zero_threshold(self):
        m = f1_pa_noise(TheoryParams(q=0.25, w_a=10, gamma=0.0))
        assert m.recall == 1.0
        assert m.f1 == pytest.approx(2 * 0.25 / 1.25)

    def test_vanishing_anomaly_ratio(self):
        f = [f1_pa_noise(TheoryParams(q=q, w_a=10, gamma=0.7)).f1 for q in (1e-2, 1e-4, 1e-6)]
        assert f[-1] < 1e-5 and f == sorted(f, reverse=True)

    def test_increasing_with_threshold_below_peak(self):
        f = [f1_pa_noise(TheoryParams(q=0.2, w_a=100, gamma=g)).f1 for g in GAMMAS if g <= 0.95]
        assert np.all(np.diff(f) >= -1e-12)

    @pytest.mark.xfail(strict=True, reason="recall 1 - g**100 collapses past g~0.966; the curve peaks there")
    def test_increasing_with_threshold_full_grid(self):
        f = [f1_pa_noise(TheoryParams(q=0.2, w_a=100, gamma=g)).f1 for g in GAMMAS]
        assert np.all(np.diff(f) >= -1e-12)

    def test_precision_formula(self):
        n, q, w = 0.8, 0.1, 20
        m = f1_pa_noise(TheoryParams(q=q, w_a=w, gamma=n))
        assert m.precision == pytest.approx(q * (1 - n ** w) / ((1 - n) + q * (n - n ** w)))


class TestBalancedNoise:
    def test_matched_islands_give_one_third(self):
        m = f1_ba_noise(TheoryParams(q=0.2, w_a=100, w_n=100, gamma=0.5))
        assert m.f1 == pytest.approx(1 / 3, abs=1e-12)

    def test_width_one_is_pa(self):
        for g in GAMMAS:
            p = TheoryParams(q=0.1, w_a=50, w_n=1, gamma=g)
            assert f1_ba_noise(p).f1 == f1_pa_noise(p).f1

    def test_chance_boundary(self):
        m = f1_ba_noise(TheoryParams(q=1 / 3, w_a=100, w_n=100, gamma=0.5))
        assert m.f1 == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("noise", NOISES, ids=lambda n: n.kind.value)
    def test_below_chance_for_any_noise(self, noise):
        for q in (0.05, 0.2, 1 / 3):
            for w in (10, 100):
                f = [f1_ba_noise(TheoryParams(q=q, w_a=w, w_n=w, gamma=g), noise).f1 for g in GAMMAS]
                assert max(f) <= 0.5 + 1e-9

    def test_harmonic_mean_consistency(self):
        p = TheoryParams(q=0.15, w_a=30, w_n=12, gamma=0.93)
        m = f1_ba_noise(p)
        assert m.f1 == pytest.approx(f1_from_pr(m), rel=1e-12)


class TestClosedForm:
    P = TheoryParams(q=0.2, w_a=100, w_n=100)

    def test_perfect_detector(self):
        m = f1_ba_closed(0.0, 1.0, self.P)
        assert m.f1 == 1.0 and m.precision == 1.0

    def test_blind_detector(self):
        assert f1_ba_closed(1.0, 0.3, self.P).f1 == 0.0

    def test_recovers_noise_form(self):
        p = TheoryParams(q=0.2, w_a=100, w_n=100, gamma=0.9)
        assert f1_ba_closed(0.9, 0.9, p).f1 == pytest.approx(f1_ba_noise(p).f1, abs=1e-15)
        assert f1_ba_closed(0.9, 0.9, p).f1 == pytest.approx(1 / 3, abs=1e-4)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            f1_ba_closed(1.2, 0.5, self.P)

    @settings(max_examples=500, deadline=None)
    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 0.99),
           st.integers(1, 200), st.integers(1, 200))
    def test_monotone(self, a1, a2, b, q, wa, wn):
        p = TheoryParams(q=q, w_a=wa, w_n=wn)
        lo, hi = sorted((a1, a2))
        assert f1_ba_closed(lo, b, p).f1 >= f1_ba_closed(hi, b, p).f1 - 1e-12
        assert f1_ba_closed(b, lo, p).f1 <= f1_ba_closed(b, hi, p).f1 + 1e-12


class TestThresholdSensitivity:
    def test_zero_threshold(self):
        assert threshold_sensitivity(TheoryParams(q=0.2, w_a=100, gamma=0.0)) == 0.0

    def test_wide_event_is_flat(self):
        assert abs(threshold_sensitivity(TheoryParams(q=0.2, w_a=100, gamma=0.5))) < 1e-25

    def test_narrow_event_is_sensitive(self):
        d = threshold_sensitivity(TheoryParams(q=0.2, w_a=2, gamma=0.9))
        assert d == pytest.approx(-2 * 0.04 * 2 * 0.9 / (1.2 - 0.81) ** 2)
        assert d == pytest.approx(-0.947, abs=1e-3)

    @pytest.mark.parametrize("q,w,g", [(0.2, 2, 0.9), (0.1, 5, 0.5), (0.3, 20, 0.95), (0.05, 100, 0.99)])
    def test_matches_finite_difference(self, q, w, g):
        h = 1e-6

        def f(x):
            return f1_ba_noise(TheoryParams(q=q, w_a=w, w_n=w, gamma=x)).f1

        fd = (f(g + h) - f(g - h)) / (2 * h)
        assert threshold_sensitivity(TheoryParams(q=q, w_a=w, w_n=w, gamma=g)) == pytest.approx(fd, rel=1e-5, abs=1e-9)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0.01, 0.99), st.integers(1, 300), st.floats(0, 1))
    def test_nonpositive(self, q, w, g):
        assert threshold_sensitivity(TheoryParams(q=q, w_a=w, gamma=g)) <= 0.0


def test_theory_curve_columns():
    rows = theory_curve([0.2], 100, 1, [0.5, 0.9])
    assert set(rows[0]) == {"q", "gamma", "f1_pa", "f1_ba", "precision_pa", "precision_ba", "recall"}
    assert all(r["f1_pa"] == r["f1_ba"] for r in rows)


def test_params_validation():
    with pytest.raises(ValueError):
        TheoryParams(q=1.0, w_a=10)
    with pytest.raises(ValueError):
        TheoryParams(q=0.5, w_a=0)
