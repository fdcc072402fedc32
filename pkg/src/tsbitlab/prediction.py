"""Loss model, exact expected regret of TS(q), and the swap machinery.

Two evaluation modes are available everywhere a value is produced:

``"float"``
    O(T) walk of the incremental Beta CDF; scales to T ~ 1e6.
``"rational"``
    exact :class:`fractions.Fraction` arithmetic, O(T^2); needed wherever
    exact ties matter.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .beta_math import BetaParams, beta_cdf_pair_rational, beta_function_rational

MODES = ("float", "rational")
Value = Union[float, Fraction]


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


class BitSequence:
    """An immutable bit sequence with cached prefix counts.

    ``ones[t]`` and ``zeros[t]`` hold O_t and Z_t for t = 0..T.
    """

    __slots__ = ("bits", "ones", "zeros", "_key")

    def __init__(self, bits: Iterable[int]):
        arr = np.array(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        arr.flags.writeable = False
        ones = np.zeros(arr.size + 1, dtype=np.int64)
        np.cumsum(arr, out=ones[1:])
        zeros = np.arange(arr.size + 1, dtype=np.int64) - ones
        ones.flags.writeable = False
        zeros.flags.writeable = False
        self.bits = arr
        self.ones = ones
        self.zeros = zeros
        self._key = arr.tobytes()

    @classmethod
    def from_string(cls, text: str) -> "BitSequence":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))

    @property
    def T(self) -> int:
        return int(self.bits.size)

    @property
    def num_ones(self) -> int:
        return int(self.ones[-1])

    @property
    def num_zeros(self) -> int:
        return int(self.zeros[-1])

    def __len__(self):
        return self.T

    def __getitem__(self, i):
        return int(self.bits[i])

    def __iter__(self):
        return (int(b) for b in self.bits)

    def __eq__(self, other):
        if not isinstance(other, BitSequence):
            return NotImplemented
        return self._key == other._key

    def __lt__(self, other):
        return str(self) < str(other)

    def __hash__(self):
        return hash(self._key)

    def __str__(self):
        return (self.bits + ord("0")).tobytes().decode()

    def __repr__(self):
        s = str(self)
        if len(s) > 40:
            s = s[:37] + "..."
        return f"BitSequence('{s}')"


def as_sequence(seq) -> BitSequence:
    if isinstance(seq, BitSequence):
        return seq
    if isinstance(seq, str):
        return BitSequence.from_string(seq)
    return BitSequence(seq)


@dataclass(frozen=True)
class TradeoffParameter:
    """Weight q of a false positive; a false negative costs 1 - q."""

    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if not 0 <= v <= 1:
            raise ValueError(f"q must lie in [0, 1], got {v}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, q) -> "TradeoffParameter":
        """Accept a TradeoffParameter, Fraction, int, ``"n/d"`` or decimal string, or float.

        Floats are read through their shortest repr, so 0.1 becomes 1/10.
        """
        if isinstance(q, cls):
            return q
        if isinstance(q, float):
            if not math.isfinite(q):
                raise ValueError(f"q must be finite, got {q}")
            return cls(Fraction(repr(q)))
        if isinstance(q, str):
            try:
                return cls(Fraction(q.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"cannot parse q from {q!r}") from exc
        return cls(Fraction(q))

    @property
    def num(self) -> int:
        return self.value.numerator

    @property
    def den(self) -> int:
        return self.value.denominator

    @property
    def real(self) -> float:
        return float(self.value)

    @property
    def complement(self) -> "TradeoffParameter":
        return TradeoffParameter(1 - self.value)

    def weight(self, bit: int) -> Fraction:
        """Loss of a wrong prediction on ``bit``: q on a zero, 1 - q on a one."""
        return self.value if bit == 0 else 1 - self.value

    def compare_ratio(self, O: int, Z: int) -> int:
        """sign((O+1)/(Z+1) - q/(1-q)) by integer cross-multiplication."""
        lhs = (O + 1) * (self.den - self.num)
        rhs = self.num * (Z + 1)
        return (lhs > rhs) - (lhs < rhs)

    def __str__(self):
        return f"{self.num}/{self.den}"


def _q(q) -> TradeoffParameter:
    return TradeoffParameter.parse(q)


def step_error_prob(O: int, Z: int, bit: int, q, mode: str = "float") -> Value:
    """Probability that TS(q) mispredicts ``bit`` after O ones and Z zeros."""
    _check_mode(mode)
    q = _q(q)
    if O < 0 or Z < 0:
        raise ValueError("counts must be nonnegative")
    if mode == "rational":
        f, g = beta_cdf_pair_rational(BetaParams(O + 1, Z + 1), q.value)
    else:
        f, g = kernels.beta_cdf_pair(O + 1, Z + 1, q.real)
    return f if bit == 1 else g


def static_benchmark(seq, q, mode: str = "float") -> Value:
    """Loss of the best constant prediction: min(q Z_T, (1-q) O_T)."""
    _check_mode(mode)
    seq = as_sequence(seq)
    q = _q(q)
    best = min(q.value * seq.num_zeros, (1 - q.value) * seq.num_ones)
    return best if mode == "rational" else float(best)


@dataclass(frozen=True)
class RegretBreakdown:
    per_step_error_prob: Sequence[Value]
    expected_loss: Value
    static_benchmark: Value
    regret: Value
    mode: str


def _float_error_probs(seq: BitSequence, q: TradeoffParameter) -> np.ndarray:
    return kernels.error_prob_walk(seq.bits, q.real)


def _rational_error_probs(seq: BitSequence, q: TradeoffParameter) -> tuple:
    out = []
    for t in range(seq.T):
        out.append(step_error_prob(int(seq.ones[t]), int(seq.zeros[t]), int(seq.bits[t]), q, "rational"))
    return tuple(out)


def regret(seq, q, mode: str = "float") -> RegretBreakdown:
    """Exact expected regret of TS(q) on a fixed sequence."""
    _check_mode(mode)
    seq = as_sequence(seq)
    q = _q(q)
    if seq.T < 1:
        raise ValueError("sequence must be nonempty")
    bench = static_benchmark(seq, q, mode)
    if mode == "rational":
        probs = _rational_error_probs(seq, q)
        w0, w1 = q.weight(0), q.weight(1)
        loss = sum((w1 if b else w0) * p for b, p in zip(seq, probs))
        loss = Fraction(loss)
    else:
        probs = _float_error_probs(seq, q)
        probs.flags.writeable = False
        w = np.where(seq.bits == 1, 1.0 - q.real, q.real)
        loss = float(np.dot(w, probs))
    return RegretBreakdown(
        per_step_error_prob=probs,
        expected_loss=loss,
        static_benchmark=bench,
        regret=loss - bench,
        mode=mode,
    )


def swap(seq, t: int) -> BitSequence:
    """Exchange bits t and t+1 (1-based, 1 <= t <= T-1)."""
    seq = as_sequence(seq)
    if not 1 <= t <= seq.T - 1:
        raise IndexError(f"swap position must be in [1, {seq.T - 1}], got {t}")
    bits = seq.bits.copy()
    bits[t - 1], bits[t] = bits[t], bits[t - 1]
    return BitSequence(bits)


def swap_delta_closed_form(O: int, Z: int, q, first_bit: int, mode: str = "rational") -> Value:
    """regret(G) - regret(Swap(G, t)) for a pair (first_bit, 1-first_bit) at t.

    O and Z are the counts before position t.  For the pair (0, 1) the
    difference is q^(O+1) (1-q)^(Z+1) / B(O+1, Z+1) * ((1-q)/(Z+1) - q/(O+1));
    the pair (1, 0) is its negation.
    """
    _check_mode(mode)
    q = _q(q)
    a, b = O + 1, Z + 1
    if mode == "rational":
        qv = q.value
        factor = qv**a * (1 - qv) ** b / beta_function_rational(a, b)
        delta = factor * ((1 - qv) / b - qv / a)
    else:
        x = q.real
        if x in (0.0, 1.0):
            delta = 0.0
        else:
            logf = a * math.log(x) + b * math.log1p(-x) - kernels.log_beta_fn(float(a), float(b))
            delta = math.exp(logf) * ((1 - x) / b - x / a)
    return delta if first_bit == 0 else -delta


class SwapEffect(enum.Enum):
    INCREASES = "increases"
    DECREASES = "decreases"
    EQUAL = "equal"


def swap_comparison(O: int, Z: int, q, first_bit: int) -> SwapEffect:
    """Effect of swapping (first_bit, 1-first_bit) on the regret, decided exactly."""
    sign = _q(q).compare_ratio(O, Z)
    if sign == 0:
        return SwapEffect.EQUAL
    # (0,1): swap raises regret iff q/(1-q) > (O+1)/(Z+1)
    raises = sign < 0 if first_bit == 0 else sign > 0
    return SwapEffect.INCREASES if raises else SwapEffect.DECREASES
