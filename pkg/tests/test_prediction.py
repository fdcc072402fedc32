import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import betainc

from tsbitlab.prediction import (
    BitSequence,
    SwapEffect,
    TradeoffParameter,
    regret,
    static_benchmark,
    step_error_prob,
    swap,
    swap_comparison,
    swap_delta_closed_form,
)
from tsbitlab.sequences import flip

bit_strings = st.text(alphabet="01", min_size=1, max_size=20)
rationals = st.builds(lambda n, d: Fraction(n, d), st.integers(1, 11), st.just(12))


class TestTypes:
    def test_bit_sequence_counts(self):
        s = BitSequence.from_string("01101")
        assert (s.T, s.num_ones, s.num_zeros) == (5, 3, 2)
        assert list(s.ones) == [0, 0, 1, 2, 2, 3]
        assert str(s) == "01101"

    def test_bits_are_read_only(self):
        s = BitSequence.from_string("01")
        with pytest.raises(ValueError):
            s.bits[0] = 1

    @pytest.mark.parametrize("bad", ["012", "ab"])
    def test_rejects_non_bits(self, bad):
        with pytest.raises(ValueError):
            BitSequence.from_string(bad)

    @pytest.mark.parametrize("text,expected", [
        ("1/2", Fraction(1, 2)), ("0.1", Fraction(1, 10)), ("2/6", Fraction(1, 3)), ("0", Fraction(0)),
    ])
    def test_parse_q(self, text, expected):
        assert TradeoffParameter.parse(text).value == expected

    def test_parse_float_is_decimal(self):
        assert TradeoffParameter.parse(0.3).value == Fraction(3, 10)

    @pytest.mark.parametrize("bad", ["3/2", "-1/4", "x", "1/0"])
    def test_parse_q_rejects(self, bad):
        with pytest.raises(ValueError):
            TradeoffParameter.parse(bad)

    def test_str(self):
        assert str(TradeoffParameter.parse("4/8")) == "1/2"


class TestStepError:
    @pytest.mark.parametrize("O,Z,bit,expected", [
        (0, 0, 0, Fraction(1, 2)), (1, 0, 1, Fraction(1, 4)), (0, 1, 1, Fraction(3, 4)),
    ])
    def test_examples(self, O, Z, bit, expected):
        assert step_error_prob(O, Z, bit, "1/2", "rational") == expected
        assert step_error_prob(O, Z, bit, "1/2") == pytest.approx(float(expected), rel=1e-15)

    def test_rejects_bad_mode(self):
        with pytest.raises(ValueError):
            step_error_prob(0, 0, 0, "1/2", "decimal")


class TestBenchmark:
    @pytest.mark.parametrize("seq,q,expected", [
        ("110", "1/3", Fraction(1, 3)), ("01", "1/2", Fraction(1, 2)), ("1111111000", "1/2", Fraction(3, 2)),
    ])
    def test_examples(self, seq, q, expected):
        assert static_benchmark(seq, q, "rational") == expected


class TestRegret:
    @pytest.mark.parametrize("seq,expected", [("01", Fraction(1, 8)), ("10", Fraction(1, 8)), ("110", Fraction(5, 16))])
    def test_examples(self, seq, expected):
        res = regret(seq, "1/2", "rational")
        assert res.regret == expected
        assert regret(seq, "1/2").regret == pytest.approx(float(expected), rel=1e-14)

    def test_breakdown_fields(self):
        res = regret("110", "1/2", "rational")
        assert res.per_step_error_prob == (Fraction(1, 2), Fraction(1, 4), Fraction(7, 8))
        assert res.expected_loss == Fraction(13, 16)
        assert res.regret == res.expected_loss - res.static_benchmark

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            regret([], "1/2")

    @settings(max_examples=200, deadline=None)
    @given(bit_strings, rationals)
    def test_flip_symmetry(self, s, q):
        seq = BitSequence.from_string(s)
        assert regret(seq, q, "rational").regret == regret(flip(seq), 1 - q, "rational").regret

    @settings(max_examples=200, deadline=None)
    @given(bit_strings)
    def test_half_is_half_the_error_count(self, s):
        res = regret(s, "1/2", "rational")
        assert res.expected_loss == sum(res.per_step_error_prob) / 2

    def test_modes_agree(self):
        rng = random.Random(7)
        for _ in range(200):
            T = rng.randint(1, 60)
            s = "".join(rng.choice("01") for _ in range(T))
            q = Fraction(rng.randint(1, 19), 20)
            exact = regret(s, q, "rational")
            approx = regret(s, q, "float")
            assert abs(float(exact.regret) - approx.regret) <= 1e-8
            assert abs(float(exact.expected_loss) - approx.expected_loss) <= 1e-8

    def test_float_matches_scipy_long(self):
        rng = np.random.default_rng(3)
        bits = (rng.random(20_000) < 0.7).astype(np.uint8)
        q = 0.3
        ones = np.concatenate(([0], np.cumsum(bits)))[:-1]
        zeros = np.arange(bits.size) - ones
        f = betainc(ones + 1.0, zeros + 1.0, q)
        ref = np.where(bits == 1, f, 1 - f)
        got = np.asarray(regret(BitSequence(bits), q).per_step_error_prob)
        mask = ref > 1e-290
        np.testing.assert_allclose(got[mask], ref[mask], rtol=1e-8)

    @settings(max_examples=100, deadline=None)
    @given(bit_strings, bit_strings, rationals)
    def test_prefix_swap_keeps_counts(self, a, b, q):
        # regret depends on the bits after a prefix only through the prefix counts
        a2 = "".join(sorted(a))
        base = regret(a + b, q, "rational").expected_loss - regret(a, q, "rational").expected_loss
        other = regret(a2 + b, q, "rational").expected_loss - regret(a2, q, "rational").expected_loss
        assert base == other


class TestSwap:
    @pytest.mark.parametrize("seq,t,expected", [("0110", 1, "1010"), ("0110", 2, "0110"), ("01", 1, "10")])
    def test_examples(self, seq, t, expected):
        assert str(swap(seq, t)) == expected

    @pytest.mark.parametrize("t", [0, 4])
    def test_bounds(self, t):
        with pytest.raises(IndexError):
            swap("0110", t)

    def test_closed_form_examples(self):
        assert swap_delta_closed_form(0, 0, "1/2", 0) == 0
        assert swap_delta_closed_form(0, 0, "1/3", 0) > 0
        assert swap_delta_closed_form(2, 0, "1/2", 1) < 0

    def test_closed_form_value(self):
        # (1/3)(2/3) / B(1,1) * (2/3 - 1/3)
        assert swap_delta_closed_form(0, 0, "1/3", 0) == Fraction(2, 27)

    @pytest.mark.parametrize("O,Z,q,first,expected", [
        (0, 0, "1/2", 0, SwapEffect.EQUAL),
        (0, 1, "1/2", 0, SwapEffect.INCREASES),
        (2, 0, "1/2", 1, SwapEffect.INCREASES),
        (2, 0, "1/2", 0, SwapEffect.DECREASES),
    ])
    def test_comparison_examples(self, O, Z, q, first, expected):
        assert swap_comparison(O, Z, q, first) is expected

    @settings(max_examples=300, deadline=None)
    @given(st.text(alphabet="01", min_size=2, max_size=12), st.sampled_from(["1/2", "1/3", "2/5"]), st.data())
    def test_closed_form_matches_recompute(self, s, q, data):
        seq = BitSequence.from_string(s)
        t = data.draw(st.integers(1, seq.T - 1))
        if s[t - 1] == s[t]:
            return
        diff = regret(seq, q, "rational").regret - regret(swap(seq, t), q, "rational").regret
        O, Z = int(seq.ones[t - 1]), int(seq.zeros[t - 1])
        assert swap_delta_closed_form(O, Z, q, int(s[t - 1])) == diff

    def test_float_closed_form(self):
        exact = swap_delta_closed_form(5, 3, "2/5", 0, "rational")
        assert swap_delta_closed_form(5, 3, "2/5", 0, "float") == pytest.approx(float(exact), rel=1e-12)
