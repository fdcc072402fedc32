import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import betainc

from tsbitlab.beta_math import (
    BetaParams,
    IncrementalBetaCdf,
    TailSumQuery,
    beta_cdf,
    beta_cdf_array,
    beta_cdf_rational,
    beta_function_rational,
    beta_sf,
    binom_point_mass,
    exp_sum,
    exp_sum_bounds,
    incremental_inc_a,
    incremental_inc_b,
    incremental_new,
    stirling_ratio,
    tail_sum,
)


def mp_beta_cdf(a, b, x):
    mpmath.mp.dps = 50
    return float(mpmath.betainc(a, b, 0, x, regularized=True))


def mp_beta_sf(a, b, x):
    mpmath.mp.dps = 50
    return float(mpmath.betainc(a, b, x, 1, regularized=True))


class TestParams:
    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            BetaParams(0, 1)

    def test_rejects_non_integer(self):
        with pytest.raises(TypeError):
            BetaParams(1.5, 1)


class TestBetaCdf:
    @pytest.mark.parametrize("a,b,x,expected", [
        (2, 2, 0.5, 0.5),
        (2, 1, 0.5, 0.25),
        (1, 2, 0.25, 7 / 16),
    ])
    def test_examples(self, a, b, x, expected):
        assert beta_cdf(BetaParams(a, b), x) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("x", [-0.1, 1.1])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            beta_cdf(BetaParams(1, 1), x)

    def test_endpoints(self):
        p = BetaParams(3, 4)
        assert beta_cdf(p, 0.0) == 0.0
        assert beta_cdf(p, 1.0) == 1.0

    def test_symmetry_grid(self):
        xs = np.round(np.arange(0, 1.0001, 0.01), 2)
        worst = 0.0
        for a in (1, 2, 3, 7, 20, 50, 99, 150, 200):
            for b in (1, 2, 5, 13, 40, 101, 200):
                for x in xs:
                    s = beta_cdf(BetaParams(a, b), x) + beta_cdf(BetaParams(b, a), 1 - x)
                    worst = max(worst, abs(s - 1))
        assert worst <= 1e-10

    def test_power_law(self):
        for a in range(1, 101):
            for x in (0.01, 0.3, 0.5, 0.77, 0.99):
                assert abs(beta_cdf(BetaParams(a, 1), x) - x**a) <= 1e-12

    def test_against_mpmath_deep_tails(self):
        cases = [(500, 20, 0.5), (20, 500, 0.2), (3000, 3000, 0.47), (10, 1000, 0.05), (900, 100, 0.95)]
        for a, b, x in cases:
            ref = mp_beta_cdf(a, b, x)
            got = beta_cdf(BetaParams(a, b), x)
            assert got == pytest.approx(ref, rel=1e-11)
            assert beta_sf(BetaParams(a, b), x) == pytest.approx(mp_beta_sf(a, b, x), rel=1e-11)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 400), st.integers(1, 400), st.floats(0.0, 1.0))
    def test_against_scipy(self, a, b, x):
        assert beta_cdf(BetaParams(a, b), x) == pytest.approx(float(betainc(a, b, x)), rel=1e-9, abs=1e-300)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 80), st.integers(1, 80), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_monotone(self, a, b, x, y):
        lo, hi = sorted((x, y))
        p = BetaParams(a, b)
        assert beta_cdf(p, lo) <= beta_cdf(p, hi)

    @pytest.mark.parametrize("x", [1e-6, 0.2, 0.5, 0.999])
    def test_strictly_inside(self, x):
        v = beta_cdf(BetaParams(5, 5), x)
        assert 0.0 < v < 1.0

    def test_array_matches_scalar(self):
        xs = np.linspace(0, 1, 257)
        p = BetaParams(7, 3)
        np.testing.assert_array_equal(beta_cdf_array(p, xs), [beta_cdf(p, x) for x in xs])


class TestRational:
    @pytest.mark.parametrize("a,b,q,expected", [
        (1, 1, Fraction(3, 7), Fraction(3, 7)),
        (2, 1, Fraction(1, 2), Fraction(1, 4)),
        (3, 2, Fraction(1, 3), Fraction(1, 9)),
    ])
    def test_examples(self, a, b, q, expected):
        assert beta_cdf_rational(BetaParams(a, b), q) == expected

    def test_agrees_with_float(self):
        for a in range(1, 60):
            for b in range(1, 61 - a):
                for q in (Fraction(1, 3), Fraction(2, 5), Fraction(1, 2), Fraction(9, 10)):
                    exact = beta_cdf_rational(BetaParams(a, b), q)
                    assert abs(float(exact) - beta_cdf(BetaParams(a, b), float(q))) <= 1e-10

    def test_beta_function(self):
        assert beta_function_rational(2, 3) == Fraction(1, 12)


class TestIncremental:
    def test_examples(self):
        s = incremental_new(0.5)
        assert (s.a, s.b, s.cdf) == (1, 1, 0.5)
        assert incremental_inc_b(s).cdf == pytest.approx(0.75, rel=1e-15)
        assert incremental_inc_a(s).cdf == pytest.approx(0.25, rel=1e-15)

    def test_immutable(self):
        s = incremental_new(0.3)
        t = s.inc_a()
        assert (s.a, t.a) == (1, 2)
        with pytest.raises(AttributeError):
            s.extra = 1

    @pytest.mark.parametrize("x,p_one,seed", [
        (0.5, 0.5, 0), (0.5, 0.9, 1), (0.3, 0.3, 2), (0.3, 0.7, 3), (0.1, 0.5, 4), (0.9, 0.95, 5), (0.02, 0.01, 6),
    ])
    def test_random_walk_matches_direct(self, x, p_one, seed):
        rng = np.random.default_rng(seed)
        moves = rng.random(10_000) < p_one
        s = incremental_new(x)
        worst = 0.0
        for i, inc_a in enumerate(moves):
            s = s.inc_a() if inc_a else s.inc_b()
            assert not math.isnan(s.cdf)
            assert 0.0 <= s.cdf <= 1.0 and s.kernel >= 0.0
            if i % 97 == 0 or i == len(moves) - 1:
                ref = beta_cdf(s.params, x)
                ref_sf = beta_sf(s.params, x)
                if ref > 1e-300:
                    worst = max(worst, abs(s.cdf - ref) / ref)
                if ref_sf > 1e-300:
                    worst = max(worst, abs(s.sf - ref_sf) / ref_sf)
        assert worst <= 1e-10

    def test_matches_mpmath_after_walk(self):
        s = incremental_new(0.4)
        for _ in range(300):
            s = s.inc_a()
        for _ in range(500):
            s = s.inc_b()
        assert s.cdf == pytest.approx(mp_beta_cdf(301, 501, 0.4), rel=1e-10)

    def test_kernel_goes_to_log_space(self):
        s = incremental_new(0.5)
        for _ in range(3000):
            s = s.inc_a()
        assert s.kernel == 0.0 or s.kernel < 1e-300
        assert math.isfinite(s.log_kernel)
        expected = 3001 * math.log(0.5) + math.log(0.5) - (math.lgamma(3001) + math.lgamma(1) - math.lgamma(3002))
        assert s.log_kernel == pytest.approx(expected, rel=1e-12)


class TestTailSums:
    def test_first_term_lower_bound(self):
        res = tail_sum(TailSumQuery(1, 0.5))
        assert res.start == 2
        assert res.value >= 5 / 16
        assert math.isfinite(res.value)

    def test_n100_half(self):
        res = tail_sum(TailSumQuery(100, 0.5))
        assert 0.5 <= res.value / 10 <= 5.0
        assert res.truncation_bound < 1e-12

    def test_n100_high_p(self):
        p = 0.9
        res = tail_sum(TailSumQuery(100, p))
        assert res.value <= 1 + p / (1 - p) + math.sqrt(math.pi * p * 101) / (1 - p) + 4 * p / (1 - p)

    def test_matches_scipy_sum(self):
        n = 50
        i = np.arange(n + 1, n + 2000)
        ref = betainc(i + 1.0, n + 1.0, 0.5).sum()
        assert tail_sum(TailSumQuery(n, 0.5)).value == pytest.approx(ref, rel=1e-12)

    def test_terms_cap(self):
        res = tail_sum(TailSumQuery(100, 0.5, terms=3))
        assert res.terms_used == 3

    def test_query_validation(self):
        with pytest.raises(ValueError):
            TailSumQuery(0, 0.5)
        with pytest.raises(ValueError):
            TailSumQuery(1, 1.0)

    @pytest.mark.parametrize("n", [1, 100, 1000, 10_000])
    def test_exp_sum_bounds(self, n):
        lo, hi = exp_sum_bounds(n)
        assert lo <= exp_sum(n) <= hi

    def test_exp_sum_bounds_n100(self):
        lo, hi = exp_sum_bounds(100)
        assert lo == pytest.approx(17.81, abs=0.01)
        assert hi == pytest.approx(30.72, abs=0.01)

    def test_exp_sum_over_sqrt_n_stable(self):
        r = [exp_sum(n) / math.sqrt(n) for n in (100, 1000, 10_000)]
        assert all(math.sqrt(math.pi) * 0.9 <= v <= 2.6 for v in r)
        assert r[0] > r[1] > r[2]


class TestPointMass:
    def test_n1000_half(self):
        pm = binom_point_mass(1000, 0.5)
        assert pm.m == 2000
        ref = math.exp(math.lgamma(2001) - 2 * math.lgamma(1001) - 2000 * math.log(2))
        assert pm.pmf == pytest.approx(ref, rel=1e-12)
        assert pm.pmf == pytest.approx(0.01784, abs=1e-5)

    def test_stirling_ratio(self):
        assert abs(stirling_ratio(100, 50) - 1) < 0.01

    def test_exact_floor(self):
        assert binom_point_mass(3, 0.1).m == 30
        assert binom_point_mass(7, Fraction(1, 3)).m == 21

    def test_domain(self):
        with pytest.raises(ValueError):
            binom_point_mass(17, 0.9)
        binom_point_mass(18, 0.9)
