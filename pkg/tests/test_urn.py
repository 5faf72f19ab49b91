"""Urn-model analytics: expectations, series expansion, pseudo-statistics."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heapsq.urn import (
    MomentVector,
    TypeDistribution,
    beta_coeffs,
    closed_form_T3,
    expected_types_with_replacement,
    expected_types_without_replacement,
    geometric_tokens,
    mc_expected_types,
    model_curve_fit,
    moments,
    poisson_approx,
    pseudo_mean,
    pseudo_spectrum,
    pseudo_variance,
    pseudo_weights,
    stirling_first,
    zipf_distribution,
)

HALF = Fraction(1, 2)


def uniform(K):
    return TypeDistribution.from_counts([1] * K)


@pytest.fixture(scope="module")
def zipf_5000():
    return zipf_distribution(5000, 1.01, precision_bits=128)


@st.composite
def rational_distributions(draw):
    counts = draw(st.lists(st.integers(min_value=1, max_value=9), min_size=2, max_size=6))
    return TypeDistribution.from_counts(counts)


class TestZipfDistribution:
    def test_single_type(self):
        d = zipf_distribution(1, 1.3)
        assert d.probs == (Fraction(1),)

    def test_harmonic_normalization(self):
        d = zipf_distribution(2, 1)
        assert d.probs == (Fraction(2, 3), Fraction(1, 3))
        assert d.rationalization_error == 0.0

    def test_integer_exponent_is_exact(self):
        d = zipf_distribution(4, 2)
        total = Fraction(1) + Fraction(1, 4) + Fraction(1, 9) + Fraction(1, 16)
        assert d.probs[2] == Fraction(1, 9) / total

    def test_irrational_exponent_rationalized(self):
        d = zipf_distribution(50, 1.01)
        assert d.exact
        assert sum(d.probs) == 1
        assert 0 < d.rationalization_error < 1e-70

    def test_reference_second_moment(self):
        d = zipf_distribution(50, 1.01)
        assert float(moments(d, 2).m(2)) == pytest.approx(0.082, abs=1e-3)

    def test_float_mode(self):
        d = zipf_distribution(50, 1.01, exact=False)
        assert not d.exact
        assert abs(sum(d.probs) - 1.0) < 1e-12

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            zipf_distribution(0, 1.0)
        with pytest.raises(ValueError):
            zipf_distribution(5, -1.0)


class TestMoments:
    def test_uniform_two_types(self):
        M = moments(uniform(2), 3)
        assert M.m(2) == Fraction(1, 2)
        assert M.m(3) == Fraction(1, 4)

    def test_first_moment_is_one(self):
        for dist in (uniform(5), zipf_distribution(10, 2), zipf_distribution(7, 1.15)):
            assert moments(dist, 1).m(1) == 1

    def test_strictly_decreasing_for_nondegenerate(self):
        M = moments(zipf_distribution(20, 1.05), 12)
        vals = M.values
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert all(0 < v <= 1 for v in vals)

    def test_large_dictionary_reference_values(self, zipf_5000):
        M = moments(zipf_5000, 3)
        assert float(M.m(2)) == pytest.approx(0.02128, abs=1e-5)
        assert float(M.m(3)) == pytest.approx(0.00179, abs=1e-5)


class TestExpectedTypes:
    def test_single_type_always_one(self):
        d = zipf_distribution(1, 1.0)
        for T in (1, 5, 100):
            assert expected_types_with_replacement(d, T) == 1

    def test_two_fair_types(self):
        assert expected_types_with_replacement(uniform(2), 2) == Fraction(3, 2)

    def test_zero_draws(self):
        assert expected_types_with_replacement(uniform(3), 0) == 0

    def test_float_matches_exact(self):
        d = zipf_distribution(10, 1.2)
        for T in (1, 7, 40):
            exact = float(expected_types_with_replacement(d, T))
            approx = expected_types_with_replacement(d, T, exact=False)
            assert approx == pytest.approx(exact, rel=1e-12)

    def test_bounds_monotonicity_concavity(self):
        d = zipf_distribution(10, 1.2)
        values = [expected_types_with_replacement(d, T) for T in range(31)]
        for T, v in enumerate(values):
            if T >= 1:
                assert 0 < v <= min(T, d.K)
        diffs = [b - a for a, b in zip(values, values[1:])]
        assert all(dd >= 0 for dd in diffs)
        assert all(b <= a for a, b in zip(diffs, diffs[1:]))  # concave

    def test_matches_monte_carlo(self):
        d = zipf_distribution(50, 1.2)
        mean, se = mc_expected_types(d, 400, trials=100_000, seed=42)
        exact = expected_types_with_replacement(d, 400, exact=False)
        assert abs(mean - exact) <= 3 * se


class TestWithoutReplacement:
    def test_full_sample_sees_every_type(self):
        assert expected_types_without_replacement([3, 2, 1, 1], 7) == 4

    def test_single_draw(self):
        assert expected_types_without_replacement([5, 2, 9], 1) == 1

    def test_small_census_enumeration(self):
        assert expected_types_without_replacement({"a": 2, "b": 1}, 2) == Fraction(5, 3)

    def test_accepts_type_census(self):
        from heapsq.corpus import TokenStream, census

        c = census(TokenStream(("a", "a", "b"), "t"))
        assert expected_types_without_replacement(c, 2) == Fraction(5, 3)

    def test_loggamma_path_matches_exact(self):
        counts = [5, 3, 2, 1]
        for T in (1, 4, 8, 11):
            exact = float(expected_types_without_replacement(counts, T, exact=True))
            approx = expected_types_without_replacement(counts, T, exact=False)
            assert approx == pytest.approx(exact, rel=1e-10)

    def test_oversized_sample_rejected(self):
        with pytest.raises(ValueError, match="T must be"):
            expected_types_without_replacement([2, 1], 4)


class TestPoissonApprox:
    def test_zero_draws(self):
        assert poisson_approx(uniform(3), 0) == 0.0

    def test_single_type_saturates(self):
        assert poisson_approx(zipf_distribution(1, 1.0), 200) == pytest.approx(1.0, abs=1e-12)

    def test_close_to_exact_for_small_probabilities(self, zipf_5000):
        exact = expected_types_with_replacement(zipf_5000, 1000, exact=False)
        approx = poisson_approx(zipf_5000, 1000)
        assert abs(approx - exact) / exact < 1e-3


class TestStirlingFirst:
    def test_row_two(self):
        row = stirling_first(2)
        assert row[1] == -1 and row[2] == 1

    def test_row_one(self):
        assert stirling_first(1) == [0, 1]

    def test_row_three(self):
        assert stirling_first(3) == [0, 2, -3, 1]

    def test_row_zero(self):
        assert stirling_first(0) == [1]

    def test_rows_reproduce_falling_factorial(self):
        T, j = 12, 7
        falling = math.prod(T - i for i in range(j))
        row = stirling_first(j)
        assert sum(c * T**k for k, c in enumerate(row)) == falling

    def test_cache_not_corrupted_by_order_of_calls(self):
        stirling_first(9)
        assert stirling_first(3) == [0, 2, -3, 1]


class TestBetaCoeffs:
    def test_two_token_closed_form(self):
        M = moments(uniform(3), 2)
        b1, b2 = beta_coeffs(M, 2)
        assert b1 == M.m(1) + M.m(2) / 2
        assert b2 == -M.m(2) / 2

    def test_first_coefficient_is_harmonic_moment_sum(self):
        d = zipf_distribution(6, 2)
        M = moments(d, 8)
        betas = beta_coeffs(M, 8)
        assert betas[0] == sum(M.m(j) / j for j in range(1, 9))

    def test_requires_enough_moments(self):
        with pytest.raises(ValueError, match="moments"):
            beta_coeffs(moments(uniform(3), 2), 5)

    @given(rational_distributions(), st.integers(min_value=1, max_value=10))
    @settings(max_examples=30, deadline=None)
    def test_master_identity(self, dist, T):
        M = moments(dist, T)
        betas = beta_coeffs(M, T)
        poly = sum(b * Fraction(T) ** k for k, b in enumerate(betas, start=1))
        assert poly == expected_types_with_replacement(dist, T)


class TestPseudoWeights:
    def test_sum_to_one_exactly(self):
        d = zipf_distribution(50, 1.01)
        betas = beta_coeffs(moments(d, 50), 50)
        pis = pseudo_weights(betas, 50)
        assert sum(pis) == 1

    def test_zero_denominator_rejected(self):
        with pytest.raises(ValueError, match="zero expectation"):
            pseudo_weights([Fraction(1), Fraction(-1, 2)], 2)

    def test_degenerate_single_type(self):
        # K=1 keeps E[V] = 1 exactly, but the expansion itself oscillates:
        # the exact pseudo-mean alternates +-1 with the parity of T.
        d = zipf_distribution(1, 1.0)
        for T in range(1, 9):
            M = moments(d, T)
            pis = pseudo_weights(beta_coeffs(M, T), T)
            assert sum(pis) == 1
            assert pseudo_mean(pis) == (1 if T % 2 else -1)


class TestPseudoStatistics:
    def test_uniform_small_T_slope_near_one(self):
        d = uniform(50)
        spec = pseudo_spectrum(d, 5)
        pm = float(spec.pseudo_mean)
        assert 0.9 < pm < 1.0
        # centered finite-difference oracle on the exact expectation
        e = [expected_types_with_replacement(d, t, exact=False) for t in (4, 5, 6)]
        coef = np.polyfit(np.log([4, 5, 6]), np.log(e), 2)
        fd = 2 * coef[0] * math.log(5) + coef[1]
        assert pm == pytest.approx(fd, rel=2e-3)

    def test_variance_negative_for_zipf(self):
        d = zipf_distribution(50, 1.01)
        spec = pseudo_spectrum(d, 50)
        assert float(spec.pseudo_variance) < 0

    def test_exact_and_float_modes_agree(self):
        d = zipf_distribution(50, 1.01)
        exact = pseudo_spectrum(d, 50, mode="exact")
        hp = pseudo_spectrum(d, 50, mode="float")
        assert float(hp.pseudo_variance) == pytest.approx(
            float(exact.pseudo_variance), rel=1e-12
        )
        assert not exact.unstable
        assert not hp.unstable

    def test_cancellation_grows_and_flags_instability(self):
        d = zipf_distribution(50, 1.01)
        small = pseudo_spectrum(d, 50)
        big = pseudo_spectrum(d, 140, mode="float")
        assert big.cancellation_ratio > small.cancellation_ratio
        assert big.unstable  # ratio ~7e12 exceeds the 1e12 monitor threshold
        assert not small.unstable

    def test_exact_mode_requires_rational_probs(self):
        d = zipf_distribution(50, 1.01, exact=False)
        with pytest.raises(ValueError, match="rational"):
            pseudo_spectrum(d, 10, mode="exact")


class TestClosedFormT3:
    def test_uniform_three_types_matches_pipeline(self):
        d = uniform(3)
        M = moments(d, 3)
        assert (M.m(2), M.m(3)) == (Fraction(1, 3), Fraction(1, 9))
        pi1, pi2, pi3, pv = closed_form_T3(M)
        spec = pseudo_spectrum(d, 3)
        assert (pi1, pi2, pi3) == spec.pi_weights
        assert pv == spec.pseudo_variance

    def test_large_zipf_ratio_to_second_moment(self, zipf_5000):
        M = moments(zipf_5000, 3)
        *_, pv = closed_form_T3(M)
        ratio = float(pv) / float(M.m(2))
        assert ratio == pytest.approx(-1.19, abs=0.01)

    def test_vanishing_third_moment_limit(self):
        M = MomentVector((Fraction(1), Fraction(1, 100), Fraction(0, 1)))
        *_, pv = closed_form_T3(M)
        target = -1.5 * 0.01
        assert abs(float(pv) - target) <= 0.05 * abs(target)


class TestMonteCarlo:
    def test_single_type(self):
        mean, se = mc_expected_types(zipf_distribution(1, 1.0), 10, trials=500, seed=1)
        assert (mean, se) == (1.0, 0.0)

    def test_two_fair_types_analytic(self):
        mean, se = mc_expected_types(uniform(2), 2, trials=100_000, seed=3)
        assert abs(mean - 1.5) <= 3 * se

    def test_reproducible(self):
        d = zipf_distribution(20, 1.1, exact=False)
        assert mc_expected_types(d, 50, 2000, seed=9) == mc_expected_types(d, 50, 2000, seed=9)

    def test_zero_draws(self):
        mean, _ = mc_expected_types(uniform(4), 0, trials=100, seed=0)
        assert mean == 0.0


class TestModelCurveFit:
    def test_geometric_grid_keeps_duplicates(self):
        ts = geometric_tokens(20, 402)
        assert len(ts) == 304
        assert len(set(ts)) == 220
        assert min(ts) == 20 and max(ts) <= 402

    def test_geometric_fit_reference_value(self):
        f = model_curve_fit(zipf_distribution(50, 1.01))
        assert f.beta == pytest.approx(-0.095, abs=1e-3)
        assert f.model == "quadratic"

    def test_integer_grid_overweights_saturation(self):
        geo = model_curve_fit(zipf_distribution(50, 1.01), grid="geometric")
        integer = model_curve_fit(zipf_distribution(50, 1.01), grid="integer")
        assert integer.beta < geo.beta < 0

    def test_invalid_grid(self):
        with pytest.raises(ValueError, match="grid"):
            model_curve_fit(uniform(5), grid="log")

    def test_invalid_range(self):
        with pytest.raises(ValueError, match="T_min"):
            model_curve_fit(uniform(5), T_min=10, T_max=10)
