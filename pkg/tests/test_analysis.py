"""Psychometric, power-law, and repeated-measures analyses."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stickslip.analysis import (
    AnovaResult,
    PsychometricFit,
    fit_power_law,
    fit_psychometric,
    jnd,
    logistic,
    pse,
    rm_anova,
    tukey_hsd,
)
from stickslip.exceptions import InvalidParameterError, UndefinedJndError

from oracles import f_sf, rm_anova_exact

LEVELS = np.array([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])

# Fixed 6 x 4 fixture whose RM-ANOVA has the exact rational F below,
# checked by two independent integer-arithmetic routes in oracles.py.
ANOVA_FIXTURE = [
    [8.0, 7.0, 1.0, 6.0],
    [9.0, 5.0, 2.0, 5.0],
    [6.0, 2.0, 3.0, 8.0],
    [5.0, 3.0, 1.0, 9.0],
    [8.0, 4.0, 5.0, 8.0],
    [7.0, 5.0, 6.0, 7.0],
]


class TestFitPsychometric:
    def test_noiseless_recovery(self):
        ys = logistic(LEVELS, 4.0, 0.5)
        fit = fit_psychometric(zip(LEVELS, ys))
        assert fit.identifiable
        assert fit.slope == pytest.approx(4.0, abs=1e-6)
        assert fit.midpoint == pytest.approx(0.5, abs=1e-6)
        assert fit.sse < 1e-12

    def test_steep_and_shallow_noiseless(self):
        for slope, mid in ((0.8, 0.3), (12.0, 0.7), (2.0, 0.0)):
            ys = logistic(LEVELS, slope, mid)
            fit = fit_psychometric(zip(LEVELS, ys))
            assert fit.slope == pytest.approx(slope, rel=1e-5)
            assert fit.midpoint == pytest.approx(mid, abs=1e-5)

    def test_flat_data_is_non_identifiable(self):
        fit = fit_psychometric([(lv, 0.5) for lv in LEVELS])
        assert not fit.identifiable
        assert fit.slope == 0.0
        assert math.isnan(fit.midpoint)
        assert fit.sse == 0.0
        assert math.isnan(pse(fit))

    def test_all_zero_and_all_one_are_non_identifiable(self):
        assert not fit_psychometric([(lv, 0.0) for lv in LEVELS]).identifiable
        assert not fit_psychometric([(lv, 1.0) for lv in LEVELS]).identifiable

    def test_determinism(self):
        rng = np.random.default_rng(7)
        ys = np.clip(logistic(LEVELS, 4.0, 0.5) + rng.normal(0, 0.05, 6), 0, 1)
        pts = list(zip(LEVELS, ys))
        assert fit_psychometric(pts) == fit_psychometric(pts)

    @pytest.mark.parametrize("points", [
        [], [(0.0, 0.5), (1.0, 0.6)],
        [(0.0, 0.5), (0.0, 0.6), (0.0, 0.7), (1.0, 0.8)],
        [(0.0, -0.1), (0.5, 0.5), (1.0, 0.9)],
        [(0.0, 0.1), (0.5, 1.5), (1.0, 0.9)],
        [(0.0, 0.1), (math.nan, 0.5), (1.0, 0.9)],
    ])
    def test_rejects_unusable_points(self, points):
        with pytest.raises(InvalidParameterError):
            fit_psychometric(points)

    @given(a=st.floats(0.25, 4.0), b=st.floats(-2.0, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_shift_scale_equivariance(self, a, b):
        # Relabeling the stimulus axis x -> a*x + b rescales the slope
        # by 1/a and moves the midpoint with the axis.
        ys = logistic(LEVELS, 4.0, 0.5)
        fit = fit_psychometric(zip(a * LEVELS + b, ys))
        assert fit.slope == pytest.approx(4.0 / a, rel=1e-4)
        assert fit.midpoint == pytest.approx(a * 0.5 + b, abs=1e-4)

    def test_binomial_monte_carlo_recovery(self):
        # 200 simulated sessions of 10 trials per level; the median of
        # the fitted parameters must sit close to the generating truth.
        rng = np.random.default_rng(2026)
        true = logistic(LEVELS, 4.0, 0.5)
        slopes, mids = [], []
        for _ in range(200):
            props = rng.binomial(10, true) / 10.0
            fit = fit_psychometric(zip(LEVELS, props))
            if fit.identifiable:
                slopes.append(fit.slope)
                mids.append(fit.midpoint)
        assert len(slopes) >= 190
        assert 3.5 < float(np.median(slopes)) < 4.6
        assert 0.46 < float(np.median(mids)) < 0.54


class TestJndPse:
    def test_jnd_is_log3_over_slope(self):
        fit = PsychometricFit(slope=4.0, midpoint=0.5, sse=0.0)
        assert jnd(fit) == math.log(3.0) / 4.0
        assert pse(fit) == 0.5

    def test_jnd_slope_product_is_invariant(self):
        for slope in (0.5, 2.0, 9.0):
            fit = PsychometricFit(slope=slope, midpoint=0.1, sse=0.0)
            assert jnd(fit) * slope == pytest.approx(math.log(3.0), rel=1e-12)

    def test_75_percent_point_definition(self):
        # The fitted curve crosses 0.75 exactly one JND above the PSE.
        fit = PsychometricFit(slope=3.0, midpoint=0.4, sse=0.0)
        x75 = pse(fit) + jnd(fit)
        assert logistic(x75, fit.slope, fit.midpoint) == pytest.approx(0.75, rel=1e-12)

    def test_undefined_for_non_identifiable(self):
        flat = PsychometricFit(slope=0.0, midpoint=math.nan, sse=0.0,
                               identifiable=False)
        with pytest.raises(UndefinedJndError):
            jnd(flat)

    def test_undefined_for_non_positive_slope(self):
        with pytest.raises(UndefinedJndError):
            jnd(PsychometricFit(slope=-2.0, midpoint=0.5, sse=0.0))
        with pytest.raises(UndefinedJndError):
            jnd(PsychometricFit(slope=0.0, midpoint=0.5, sse=0.0))


class TestFitPowerLaw:
    def test_two_point_exact_solution(self):
        # Two observations pin the line in log-log space exactly.
        lo_level, lo_ratio = 0.4, 0.94
        hi_level, hi_ratio = 1.0, 1.16
        fit = fit_power_law([(lo_level, lo_ratio), (hi_level, hi_ratio)])
        expected_exponent = math.log(hi_ratio / lo_ratio) / math.log(hi_level / lo_level)
        assert fit.exponent == pytest.approx(expected_exponent, abs=1e-9)
        assert fit.scale == pytest.approx(hi_ratio, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_noiseless_recovery(self):
        levels = np.array([0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
        ratios = 1.12 * levels ** 0.204
        fit = fit_power_law(zip(levels, ratios))
        assert fit.scale == pytest.approx(1.12, rel=1e-9)
        assert fit.exponent == pytest.approx(0.204, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_constant_ratios_give_zero_exponent(self):
        fit = fit_power_law([(0.4, 1.05), (0.7, 1.05), (1.0, 1.05)])
        assert fit.exponent == pytest.approx(0.0, abs=1e-12)
        assert fit.scale == pytest.approx(1.05, rel=1e-12)
        assert fit.r_squared == 1.0

    @pytest.mark.parametrize("points", [
        [], [(1.0, 1.1)],
        [(0.0, 1.0), (0.5, 1.1)],
        [(0.4, -0.2), (0.8, 1.1)],
        [(0.5, 1.0), (0.5, 1.2)],
    ])
    def test_rejects_unusable_points(self, points):
        with pytest.raises(InvalidParameterError):
            fit_power_law(points)

    @given(scale=st.floats(0.5, 2.0), exponent=st.floats(-1.0, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_exact_on_generated_data(self, scale, exponent):
        levels = np.array([0.4, 0.6, 0.8, 1.0])
        fit = fit_power_law(zip(levels, scale * levels ** exponent))
        assert fit.scale == pytest.approx(scale, rel=1e-9)
        assert fit.exponent == pytest.approx(exponent, abs=1e-9)


class TestRmAnova:
    def test_fixture_f_matches_exact_ratio(self):
        result = rm_anova(ANOVA_FIXTURE)
        f_exact, df1, df2 = rm_anova_exact(ANOVA_FIXTURE)
        assert f_exact == Fraction(2365, 289)
        assert (result.df1, result.df2) == (df1, df2) == (3, 15)
        assert result.f_value == pytest.approx(float(f_exact), abs=1e-9)

    def test_fixture_p_dual_route(self):
        # Same survival probability through the continued-fraction oracle
        # and through the production incomplete-beta path.
        result = rm_anova(ANOVA_FIXTURE)
        assert abs(result.p_value - f_sf(result.f_value, 3, 15)) < 1e-12

    def test_subject_offsets_do_not_change_f(self):
        m = np.array(ANOVA_FIXTURE)
        shifted = m + np.arange(6.0)[:, None] * 3.7
        a, b = rm_anova(m), rm_anova(shifted)
        assert b.f_value == pytest.approx(a.f_value, rel=1e-9)
        assert b.p_value == pytest.approx(a.p_value, rel=1e-9)

    def test_identical_conditions_give_zero_f(self):
        col = np.array([[1.0], [2.0], [5.0], [3.0]])
        m = np.repeat(col, 4, axis=1)
        result = rm_anova(m)
        assert result.f_value == 0.0
        assert result.p_value == 1.0

    def test_condition_means_reported_in_order(self):
        result = rm_anova(ANOVA_FIXTURE)
        np.testing.assert_allclose(
            result.condition_means, np.mean(ANOVA_FIXTURE, axis=0))

    @pytest.mark.parametrize("data", [
        [[1.0, 2.0]],
        [[1.0], [2.0]],
        [1.0, 2.0, 3.0],
        [[1.0, np.nan], [2.0, 3.0]],
    ])
    def test_rejects_bad_matrices(self, data):
        with pytest.raises(InvalidParameterError):
            rm_anova(data)

    @given(st.integers(3, 8), st.integers(3, 6), st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_random_matrices_agree_with_exact_oracle(self, n, k, seed):
        rng = np.random.default_rng(seed)
        m = rng.integers(0, 50, size=(n, k)).astype(float)
        result = rm_anova(m)
        try:
            f_exact, df1, df2 = rm_anova_exact(m.astype(int).tolist())
        except ZeroDivisionError:
            assert result.f_value == math.inf
            return
        assert (result.df1, result.df2) == (df1, df2)
        if f_exact == 0:
            assert result.f_value == 0.0 and result.p_value == 1.0
        else:
            assert result.f_value == pytest.approx(float(f_exact), rel=1e-9)
            assert abs(result.p_value - f_sf(result.f_value, df1, df2)) < 1e-12


class TestTukeyHsd:
    def test_pair_count_and_ordering(self):
        result = rm_anova(ANOVA_FIXTURE)
        pairs = tukey_hsd(ANOVA_FIXTURE, result)
        assert len(pairs) == 6
        assert [(p.first, p.second) for p in pairs] == [
            (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

    def test_q_values_match_definition(self):
        result = rm_anova(ANOVA_FIXTURE)
        denom = math.sqrt(result.ms_error / 6)
        for pair in tukey_hsd(ANOVA_FIXTURE, result):
            expected = abs(result.condition_means[pair.second]
                           - result.condition_means[pair.first]) / denom
            assert pair.q_value == pytest.approx(expected, rel=1e-12)

    def test_significance_is_consistent(self):
        result = rm_anova(ANOVA_FIXTURE)
        for pair in tukey_hsd(ANOVA_FIXTURE, result):
            # 0.01 significance implies 0.05 significance.
            assert pair.significant_05 or not pair.significant_01

    def test_fixture_extreme_pair_is_significant(self):
        # Columns 0 and 2 differ by 25/6 on ms_error = 289/90; their
        # q of 5.70 clears both thresholds while the 0-1 pair's 3.87
        # clears neither at k=4, df=15.
        result = rm_anova(ANOVA_FIXTURE)
        pairs = {(p.first, p.second): p for p in tukey_hsd(ANOVA_FIXTURE, result)}
        assert pairs[(0, 2)].significant_05
        assert pairs[(0, 2)].significant_01
        assert not pairs[(0, 1)].significant_05
        assert not pairs[(0, 1)].significant_01

    def test_identical_means_are_never_significant(self):
        col = np.array([[1.0], [2.0], [5.0], [3.0], [4.0]])
        m = np.repeat(col, 3, axis=1)
        result = rm_anova(m)
        for pair in tukey_hsd(m, result):
            assert pair.q_value == 0.0
            assert not pair.significant_05 and not pair.significant_01

    def test_shape_mismatch_rejected(self):
        result = rm_anova(ANOVA_FIXTURE)
        with pytest.raises(InvalidParameterError):
            tukey_hsd(np.array(ANOVA_FIXTURE)[:, :3], result)
