"""Beta and Binomial CDFs for integer parameters, exact and floating point.

All Beta CDFs go through F_beta(a,b)(x) = 1 - F_Bin(a+b-1, x)(a-1), so only
integer shape parameters are supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from . import kernels


@dataclass(frozen=True)
class BetaParams:
    a: int
    b: int

    def __post_init__(self):
        if int(self.a) != self.a or int(self.b) != self.b:
            raise TypeError("Beta parameters must be integers")
        if self.a < 1 or self.b < 1:
            raise ValueError(f"Beta parameters must be >= 1, got ({self.a}, {self.b})")


def _check_unit(x) -> None:
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x}")


def beta_cdf(params: BetaParams, x: float) -> float:
    """F_beta(a,b)(x) via the smaller binomial tail."""
    _check_unit(x)
    f, _ = kernels.beta_cdf_pair(params.a, params.b, float(x))
    return f


def beta_cdf_array(params: BetaParams, xs) -> np.ndarray:
    """Vectorized :func:`beta_cdf` over an array of points."""
    xs = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    if xs.size and not (xs.min() >= 0.0 and xs.max() <= 1.0):
        raise ValueError("all points must lie in [0, 1]")
    return kernels.beta_cdf_many(params.a, params.b, xs)


def beta_sf(params: BetaParams, x: float) -> float:
    """1 - F_beta(a,b)(x), accurate when F is close to one."""
    _check_unit(x)
    _, g = kernels.beta_cdf_pair(params.a, params.b, float(x))
    return g


@lru_cache(maxsize=1 << 16)
def _beta_cdf_rational(a: int, b: int, num: int, den: int) -> Fraction:
    n = a + b - 1
    rest = den - num
    total = sum(comb(n, j) * num**j * rest ** (n - j) for j in range(a, n + 1))
    return Fraction(total, den**n)


def beta_cdf_rational(params: BetaParams, q) -> Fraction:
    """Exact F_beta(a,b)(q) for rational q: sum_{j>=a} C(n,j) q^j (1-q)^(n-j)."""
    q = Fraction(q)
    _check_unit(q)
    return _beta_cdf_rational(params.a, params.b, q.numerator, q.denominator)


def beta_cdf_pair_rational(params: BetaParams, q) -> tuple[Fraction, Fraction]:
    """(F, 1 - F) in exact arithmetic."""
    f = beta_cdf_rational(params, q)
    return f, 1 - f


def beta_function_rational(a: int, b: int) -> Fraction:
    """B(a, b) = (a-1)! (b-1)! / (a+b-1)! for positive integers."""
    return Fraction(math.factorial(a - 1) * math.factorial(b - 1), math.factorial(a + b - 1))


class IncrementalBetaCdf:
    """Running value of F_beta(a,b)(x) updated in O(1) per increment.

    Increments return new objects; an instance is never modified after
    construction.  Internally only min(F, 1 - F) is stored, together with
    the kernel x^a (1-x)^b / B(a, b) (kept as a logarithm once it drops
    below 1e-300).
    """

    __slots__ = ("a", "b", "x", "_tail", "_upper", "_kernel", "_logk", "_in_log", "_err")

    def __init__(self, a, b, x, tail, upper, kernel, logk, in_log, err):
        self.a = int(a)
        self.b = int(b)
        self.x = float(x)
        self._tail = float(tail)
        self._upper = bool(upper)
        self._kernel = float(kernel)
        self._logk = float(logk)
        self._in_log = bool(in_log)
        self._err = float(err)

    @classmethod
    def start(cls, x: float, params: BetaParams = BetaParams(1, 1)) -> "IncrementalBetaCdf":
        _check_unit(x)
        state = kernels.beta_state_init(params.a, params.b, float(x))
        return cls(params.a, params.b, x, *state)

    @property
    def params(self) -> BetaParams:
        return BetaParams(self.a, self.b)

    @property
    def cdf(self) -> float:
        return 1.0 - self._tail if self._upper else self._tail

    @property
    def sf(self) -> float:
        return self._tail if self._upper else 1.0 - self._tail

    @property
    def kernel(self) -> float:
        """x^a (1-x)^b / B(a, b); may underflow to 0.0 (see ``log_kernel``)."""
        return math.exp(self._logk) if self._in_log else self._kernel

    @property
    def log_kernel(self) -> float:
        return self._logk if self._in_log else (math.log(self._kernel) if self._kernel > 0 else -math.inf)

    def _step(self, inc_ones: bool) -> "IncrementalBetaCdf":
        out = kernels.beta_state_step(
            self.a, self.b, self.x, self._tail, self._upper, self._kernel,
            self._logk, self._in_log, self._err, inc_ones,
        )
        a, b, tail, upper, kernel, logk, in_log, err = out
        return IncrementalBetaCdf(a, b, self.x, tail, upper, kernel, logk, in_log, err)

    def inc_a(self) -> "IncrementalBetaCdf":
        return self._step(True)

    def inc_b(self) -> "IncrementalBetaCdf":
        return self._step(False)

    def __repr__(self):
        return f"IncrementalBetaCdf(a={self.a}, b={self.b}, x={self.x!r}, cdf={self.cdf!r})"


def incremental_new(x: float) -> IncrementalBetaCdf:
    return IncrementalBetaCdf.start(x)


def incremental_inc_a(state: IncrementalBetaCdf) -> IncrementalBetaCdf:
    return state.inc_a()


def incremental_inc_b(state: IncrementalBetaCdf) -> IncrementalBetaCdf:
    return state.inc_b()


@dataclass(frozen=True)
class TailSumQuery:
    n: int
    p: float
    terms: int = 1_000_000

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if self.terms < 1:
            raise ValueError("terms must be >= 1")

    @property
    def start(self) -> int:
        """First summation index, floor(p n / (1-p)) + 1 (n + 1 at p = 1/2)."""
        p = Fraction(self.p) if not isinstance(self.p, float) else Fraction(str(self.p))
        return math.floor(p * self.n / (1 - p)) + 1


@dataclass(frozen=True)
class TailSumResult:
    value: float
    terms_used: int
    truncation_bound: float
    start: int


def tail_sum(query: TailSumQuery, tol: float = 1e-15) -> TailSumResult:
    """sum_{i >= start} F_beta(i+1, n+1)(p), truncated adaptively.

    The truncation bound assumes the summands keep decaying at least
    geometrically at the ratio of the last two terms; it is ``inf`` when
    that ratio is not below one.
    """
    start = query.start
    total, used, last, prev = kernels.beta_tail_walk(start + 1, query.n + 1, float(query.p), query.terms, tol)
    if used >= 2 and prev > 0 and last < prev:
        r = last / prev
        bound = last * r / (1 - r)
    elif last == 0.0:
        bound = 0.0
    else:
        bound = math.inf
    return TailSumResult(value=total, terms_used=used, truncation_bound=bound, start=start)


def exp_sum(n: int, tol: float = 1e-15) -> float:
    """sum_{i >= n+1} exp(-(i - (n+1))^2 / (2 (i + n + 1)))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total, _ = kernels.gaussian_tail_series(float(n), tol)
    return total


def exp_sum_bounds(n: int) -> tuple[float, float]:
    """Closed-form lower and upper bounds for :func:`exp_sum`."""
    lo = math.sqrt(math.pi * (n + 1))
    hi = 1 + math.sqrt(2 * math.pi * (n + 1)) + 1 / (1 - math.exp(-0.25))
    return lo, hi


def log_binomial(m: int, n: int) -> float:
    return math.lgamma(m + 1) - math.lgamma(n + 1) - math.lgamma(m - n + 1)


def log_stirling_binomial(m: int, n: int) -> float:
    """log of sqrt(m / (2 pi n (m-n))) (m/n)^n (m/(m-n))^(m-n), for 0 < n < m."""
    if not 0 < n < m:
        raise ValueError("Stirling estimate needs 0 < n < m")
    k = m - n
    return (0.5 * (math.log(m) - math.log(2 * math.pi) - math.log(n) - math.log(k))
            + n * (math.log(m) - math.log(n)) + k * (math.log(m) - math.log(k)))


def stirling_ratio(m: int, n: int) -> float:
    """C(m, n) divided by its Stirling estimate."""
    return math.exp(log_binomial(m, n) - log_stirling_binomial(m, n))


@dataclass(frozen=True)
class PointMass:
    n: int
    p: float
    m: int
    pmf: float
    stirling_pmf: float
    ratio: float


def binom_point_mass(n: int, p) -> PointMass:
    """Pr(X = n) for X ~ Bin(floor(n/p), p), with its Stirling estimate.

    ``p`` may be a float (read as its shortest decimal), a Fraction, or a
    ``"num/den"`` string; floor(n/p) is taken exactly.
    """
    pf = Fraction(str(p)) if isinstance(p, float) else Fraction(p)
    if not 0 < pf < 1:
        raise ValueError("p must lie in (0, 1)")
    if n < 2 * pf / (1 - pf):
        raise ValueError(f"need n >= 2p/(1-p) = {float(2 * pf / (1 - pf)):.6g}, got n={n}")
    m = math.floor(n / pf)
    x = float(pf)
    log_weight = n * math.log(x) + (m - n) * math.log1p(-x)
    pmf = math.exp(kernels.log_binom_pmf(m, n, x))
    if n < m:
        stirling = math.exp(log_stirling_binomial(m, n) + log_weight)
        ratio = pmf / stirling
    else:
        stirling = math.nan
        ratio = math.nan
    return PointMass(n=n, p=x, m=m, pmf=pmf, stirling_pmf=stirling, ratio=ratio)
