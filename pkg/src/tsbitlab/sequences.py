"""Extremal sequences: H^q, head/tail decomposition, worst and best cases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .prediction import BitSequence, TradeoffParameter, as_sequence

__all__ = [
    "HqVerdict",
    "SequenceDecomposition",
    "InfeasibleError",
    "hq",
    "decompose",
    "tail_fill_bit",
    "gen_worst",
    "gen_best",
    "flip",
    "head_count_violations",
]


# products (O+1)(den-num) and num(Z+1) must stay inside int64
_INT64_SAFE = 1 << 31


class InfeasibleError(ValueError):
    """No worst-case sequence with the requested zero count could be built."""


@dataclass(frozen=True)
class HqVerdict:
    allowed: frozenset

    def __contains__(self, bit):
        return bit in self.allowed

    @property
    def is_tie(self) -> bool:
        return len(self.allowed) == 2


_ZERO = HqVerdict(frozenset({0}))
_ONE = HqVerdict(frozenset({1}))
_BOTH = HqVerdict(frozenset({0, 1}))


def _param(q) -> TradeoffParameter:
    q = TradeoffParameter.parse(q)
    if q.value == 1:
        raise ValueError("H^q is undefined at q = 1")
    return q


def hq(O: int, Z: int, q) -> HqVerdict:
    """Next bits that keep the prefix regret-maximal under adjacent swaps."""
    sign = _param(q).compare_ratio(O, Z)
    if sign > 0:
        return _ZERO
    if sign < 0:
        return _ONE
    return _BOTH


@dataclass(frozen=True)
class SequenceDecomposition:
    head_len: int
    tail_bit: Optional[int]
    is_worst_case: bool


def _head_len(bits: np.ndarray, q: TradeoffParameter) -> int:
    O = Z = 0
    for t, bit in enumerate(bits):
        if bit not in hq(O, Z, q):
            return t
        if bit:
            O += 1
        else:
            Z += 1
    return len(bits)


def decompose(seq, q) -> SequenceDecomposition:
    """Split ``seq`` at p(seq), the longest prefix that follows H^q."""
    seq = as_sequence(seq)
    q = _param(q)
    p = _head_len(seq.bits, q)
    if p == seq.T:
        return SequenceDecomposition(head_len=p, tail_bit=None, is_worst_case=True)
    tail = seq.bits[p:]
    return SequenceDecomposition(head_len=p, tail_bit=int(tail[0]), is_worst_case=bool((tail == tail[0]).all()))


def tail_fill_bit(T: int, k: int, q) -> int:
    """Bit filling the tail of a worst-case sequence: 1 iff k <= (1-q) T - q."""
    if not 0 <= k <= T:
        raise ValueError(f"need 0 <= k <= T, got k={k}, T={T}")
    qv = TradeoffParameter.parse(q).value
    return 1 if k <= (1 - qv) * T - qv else 0


def gen_worst(T: int, k: int, q, tie_choice: int = 0) -> BitSequence:
    """Worst-case sequence of length T with exactly k zeros.

    The head follows H^q (taking ``tie_choice`` at ties) until the budget of
    the bit opposite to the tail is spent; the rest is the tail bit.
    """
    q = TradeoffParameter.parse(q)
    if q.value in (0, 1):
        raise ValueError("worst-case sequences need 0 < q < 1")
    if tie_choice not in (0, 1):
        raise ValueError("tie_choice must be 0 or 1")
    fill = tail_fill_bit(T, k, q)
    if q.den < _INT64_SAFE and T < _INT64_SAFE:
        bits, _ = kernels.worst_case_bits(T, k, q.num, q.den, tie_choice, fill)
    else:
        bits = _worst_bits_exact(T, k, q, tie_choice, fill)
    out = BitSequence(bits)
    if out.num_zeros != k:
        raise InfeasibleError(f"no worst-case sequence with T={T}, k={k}, q={q}")
    return out


def _worst_bits_exact(T, k, q, tie_choice, fill):
    budget = k if fill == 1 else T - k
    other = 1 - fill
    bits = np.full(T, fill, dtype=np.uint8)
    O = Z = used = t = 0
    while used < budget and t < T:
        allowed = hq(O, Z, q).allowed
        bit = tie_choice if len(allowed) == 2 else next(iter(allowed))
        bits[t] = bit
        if bit:
            O += 1
        else:
            Z += 1
        if bit == other:
            used += 1
        t += 1
    return bits


def gen_best(T: int, k: int, q) -> BitSequence:
    """1^(T-k) 0^k when q k <= (1-q)(T-k), else 0^k 1^(T-k)."""
    if not 0 <= k <= T:
        raise ValueError(f"need 0 <= k <= T, got k={k}, T={T}")
    qv = TradeoffParameter.parse(q).value
    n = T - k
    if qv * k <= (1 - qv) * n:
        bits = np.concatenate([np.ones(n, np.uint8), np.zeros(k, np.uint8)])
    else:
        bits = np.concatenate([np.zeros(k, np.uint8), np.ones(n, np.uint8)])
    return BitSequence(bits)


def flip(seq) -> BitSequence:
    """Complement every bit."""
    seq = as_sequence(seq)
    return BitSequence(1 - seq.bits)


def head_count_violations(seq, q) -> list[int]:
    """Head positions t where Z_t leaves [(1-q)t - q, (1-q)t + (1-q)].

    The check is exact; an empty list means the head obeys the count
    bounds that every worst-case sequence satisfies.
    """
    seq = as_sequence(seq)
    q = _param(q)
    qv = q.value
    p = decompose(seq, q).head_len
    bad = []
    for t in range(1, p + 1):
        z = int(seq.zeros[t])
        if not (1 - qv) * t - qv <= z <= (1 - qv) * t + (1 - qv):
            bad.append(t)
    return bad
