"""Exhaustive exact-rational ground truth for small T.

Every sequence is scored with :class:`fractions.Fraction` arithmetic, so
ties are certified exactly.  Enumeration walks the prefix tree in
lexicographic order (0 before 1), which keeps reported counterexamples
reproducible and lets shared prefixes share their partial losses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

from .beta_math import BetaParams, beta_cdf_rational
from .prediction import (
    BitSequence,
    SwapEffect,
    TradeoffParameter,
    swap_comparison,
    swap_delta_closed_form,
)
from .sequences import decompose

DEFAULT_LIMIT = 2_000_000


class BudgetError(RuntimeError):
    """Enumeration would exceed the sequence budget."""


@lru_cache(maxsize=None)
def _predict_zero_prob(O: int, Z: int, q: Fraction) -> Fraction:
    return beta_cdf_rational(BetaParams(O + 1, Z + 1), q)


def _exact_losses(T: int, q: TradeoffParameter, k: Optional[int] = None) -> Iterator[tuple[str, Fraction]]:
    """Yield (bits, expected loss) for every length-T sequence (with k zeros if given)."""
    qv = q.value
    w0, w1 = qv, 1 - qv
    prefix: list[str] = []

    def walk(O: int, Z: int, loss: Fraction):
        t = O + Z
        if t == T:
            yield "".join(prefix), loss
            return
        f = _predict_zero_prob(O, Z, qv)
        if k is None or Z < k:
            prefix.append("0")
            yield from walk(O, Z + 1, loss + w0 * (1 - f))
            prefix.pop()
        if k is None or O < T - k:
            prefix.append("1")
            yield from walk(O + 1, Z, loss + w1 * f)
            prefix.pop()

    yield from walk(0, 0, Fraction(0))


def _benchmark(T: int, k: int, q: TradeoffParameter) -> Fraction:
    return min(q.value * k, (1 - q.value) * (T - k))


@dataclass(frozen=True)
class ExtremalReport:
    T: int
    k: int
    q: TradeoffParameter
    argmax_set: frozenset
    argmin_set: frozenset
    max_regret: Fraction
    min_regret: Fraction
    sequences_scanned: int
    regrets: dict = field(default_factory=dict, repr=False, compare=False)

    def sorted_argmax(self) -> list[BitSequence]:
        return sorted(self.argmax_set, key=str)

    def sorted_argmin(self) -> list[BitSequence]:
        return sorted(self.argmin_set, key=str)


def enumerate_extremal(T: int, k: int, q, limit: int = DEFAULT_LIMIT) -> ExtremalReport:
    """Exact regret of every length-T sequence with k zeros; argmax and argmin sets."""
    q = TradeoffParameter.parse(q)
    if not 0 <= k <= T:
        raise ValueError(f"need 0 <= k <= T, got k={k}, T={T}")
    total = math.comb(T, k)
    if total > limit:
        raise BudgetError(f"C({T},{k}) = {total} sequences exceeds the budget of {limit}")
    bench = _benchmark(T, k, q)
    regrets: dict[str, Fraction] = {}
    for bits, loss in _exact_losses(T, q, k):
        regrets[bits] = loss - bench
    hi = max(regrets.values())
    lo = min(regrets.values())
    return ExtremalReport(
        T=T, k=k, q=q,
        argmax_set=frozenset(BitSequence.from_string(s) for s, r in regrets.items() if r == hi),
        argmin_set=frozenset(BitSequence.from_string(s) for s, r in regrets.items() if r == lo),
        max_regret=hi, min_regret=lo,
        sequences_scanned=len(regrets),
        regrets=regrets,
    )


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    checked: int
    counterexample: Optional[BitSequence] = None
    counterexample_regret: Optional[Fraction] = None
    reference: Optional[BitSequence] = None
    reference_regret: Optional[Fraction] = None
    message: str = ""

    def __bool__(self):
        return self.ok


def verify_worst_characterization(T: int, k: int, q, limit: int = DEFAULT_LIMIT) -> VerificationResult:
    """Check that the maximizers are exactly the worst-case sequences, all tied."""
    report = enumerate_extremal(T, k, q, limit)
    predicted = {s for s in report.regrets if decompose(s, report.q).is_worst_case}
    argmax = {str(s) for s in report.argmax_set}
    ref = min(argmax)
    if predicted == argmax:
        return VerificationResult(ok=True, checked=report.sequences_scanned,
                                  reference=BitSequence.from_string(ref),
                                  reference_regret=report.max_regret)
    missing = sorted(predicted - argmax)
    if missing:
        bad = missing[0]
        msg = "worst-case sequence does not attain the maximum"
    else:
        bad = sorted(argmax - predicted)[0]
        msg = "maximizer is not a worst-case sequence"
    return VerificationResult(
        ok=False, checked=report.sequences_scanned,
        counterexample=BitSequence.from_string(bad),
        counterexample_regret=report.regrets[bad],
        reference=BitSequence.from_string(ref),
        reference_regret=report.max_regret,
        message=msg,
    )


def all_exact_regrets(T: int, q, limit: int = DEFAULT_LIMIT) -> dict[str, Fraction]:
    """Exact regret of all 2^T sequences, keyed by bit string."""
    q = TradeoffParameter.parse(q)
    if 2**T > limit:
        raise BudgetError(f"2^{T} sequences exceeds the budget of {limit}")
    out = {}
    for bits, loss in _exact_losses(T, q):
        k = bits.count("0")
        out[bits] = loss - _benchmark(T, k, q)
    return out


def verify_swap_lemma(T: int, q, check_closed_form: bool = True) -> VerificationResult:
    """Exhaustively compare swap effects with the ratio rule (and the closed form)."""
    if T > 12:
        raise BudgetError("swap-rule verification is limited to T <= 12")
    q = TradeoffParameter.parse(q)
    regrets = all_exact_regrets(T, q)
    checked = 0
    for bits in sorted(regrets):
        r = regrets[bits]
        O = Z = 0
        for t in range(1, T):
            first, second = bits[t - 1], bits[t]
            if first != second:
                swapped = bits[:t - 1] + second + first + bits[t + 1:]
                rs = regrets[swapped]
                diff = rs - r
                observed = (SwapEffect.INCREASES if diff > 0
                            else SwapEffect.DECREASES if diff < 0 else SwapEffect.EQUAL)
                expected = swap_comparison(O, Z, q, int(first))
                checked += 1
                msg = ""
                if observed is not expected:
                    msg = f"swap at t={t}: rule says {expected.value}, exact regrets say {observed.value}"
                elif check_closed_form and swap_delta_closed_form(O, Z, q, int(first), "rational") != r - rs:
                    msg = f"closed-form delta at t={t} differs from the recomputed difference"
                if msg:
                    return VerificationResult(
                        ok=False, checked=checked,
                        counterexample=BitSequence.from_string(bits), counterexample_regret=r,
                        reference=BitSequence.from_string(swapped), reference_regret=rs,
                        message=msg,
                    )
            if first == "1":
                O += 1
            else:
                Z += 1
    return VerificationResult(ok=True, checked=checked)
