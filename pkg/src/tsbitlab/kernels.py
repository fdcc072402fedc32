"""Scalar hot loops shared by the float engine.

Everything here is written in the numba-compatible subset of Python and
wrapped with :func:`tsbitlab._jit.jit`; the same source runs uncompiled
when numba is disabled.  Callers should go through the public modules
(:mod:`tsbitlab.beta_math`, :mod:`tsbitlab.prediction`) rather than
importing these directly.
"""

import math

import numpy as np

from ._jit import jit

LOG_2PI = math.log(2.0 * math.pi)
# kernel values below this are tracked as logarithms
KERNEL_FLOOR = 1e-300
LOG_KERNEL_FLOOR = math.log(KERNEL_FLOOR)
# hysteresis for leaving log mode
LOG_KERNEL_RESUME = LOG_KERNEL_FLOOR + 10.0
# relative error budget of the stored tail, in units of machine epsilon
ERR_LIMIT = 1e5
FRESH_ERR = 8.0


@jit
def stirlerr(n):
    """log(n!) - log(sqrt(2 pi n) (n/e)^n) for n >= 1."""
    if n <= 15.0:
        return math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - 0.5 * LOG_2PI
    nn = n * n
    s0 = 1.0 / 12.0
    s1 = 1.0 / 360.0
    s2 = 1.0 / 1260.0
    s3 = 1.0 / 1680.0
    s4 = 1.0 / 1188.0
    if n > 500.0:
        return (s0 - s1 / nn) / n
    if n > 80.0:
        return (s0 - (s1 - s2 / nn) / nn) / n
    if n > 35.0:
        return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n


@jit
def bd0(x, np_):
    """Deviance term x log(x/np) + np - x without cancellation."""
    if abs(x - np_) < 0.1 * (x + np_):
        v = (x - np_) / (x + np_)
        s = (x - np_) * v
        ej = 2.0 * x * v
        v = v * v
        j = 1
        while j < 1000:
            ej *= v
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
        return s
    return x * math.log(x / np_) + np_ - x


@jit
def log_binom_pmf(n, j, x):
    """log Pr(Bin(n, x) = j) for 0 < x < 1 (saddle-point form)."""
    if j == 0:
        return n * math.log1p(-x)
    if j == n:
        return n * math.log(x)
    fn = float(n)
    fj = float(j)
    lc = (stirlerr(fn) - stirlerr(fj) - stirlerr(fn - fj)
          - bd0(fj, fn * x) - bd0(fn - fj, fn * (1.0 - x)))
    lf = LOG_2PI + math.log(fj) + math.log1p(-fj / fn)
    return lc - 0.5 * lf


@jit
def binom_range_sum(n, x, lo, hi):
    """Pr(lo <= Bin(n, x) <= hi) for 0 < x < 1, summed outward from the peak.

    Terms are scaled by the largest pmf in the range, and summation stops
    once the geometric bound on the remaining terms drops below 1e-17 of
    the running sum.
    """
    if lo < 0:
        lo = 0
    if hi > n:
        hi = n
    if lo > hi:
        return 0.0
    mode = int(math.floor((n + 1) * x))
    if mode > n:
        mode = n
    j0 = mode
    if j0 < lo:
        j0 = lo
    if j0 > hi:
        j0 = hi
    odds = x / (1.0 - x)
    s = 1.0
    t = 1.0
    j = j0
    while j < hi:
        t *= (n - j) / (j + 1.0) * odds
        s += t
        j += 1
        if j < hi:
            rn = (n - j) / (j + 1.0) * odds
            if rn < 1.0 and t * rn <= 1e-17 * s * (1.0 - rn):
                break
    t = 1.0
    j = j0
    while j > lo:
        t *= j / ((n - j + 1.0) * odds)
        s += t
        j -= 1
        if j > lo:
            rn = j / ((n - j + 1.0) * odds)
            if rn < 1.0 and t * rn <= 1e-17 * s * (1.0 - rn):
                break
    return math.exp(log_binom_pmf(n, j0, x) + math.log(s))


@jit
def beta_cdf_pair(a, b, x):
    """(F, 1 - F) for F = F_beta(a,b)(x), integer a, b >= 1.

    Uses F = Pr(Bin(a+b-1, x) >= a) and evaluates whichever binomial tail
    is the smaller one, so both entries carry full relative precision.
    """
    if x <= 0.0:
        return 0.0, 1.0
    if x >= 1.0:
        return 1.0, 0.0
    n = a + b - 1
    if a - 1 < n * x:
        lower = binom_range_sum(n, x, 0, a - 1)
        if lower > 1.0:
            lower = 1.0
        return 1.0 - lower, lower
    upper = binom_range_sum(n, x, a, n)
    if upper > 1.0:
        upper = 1.0
    return upper, 1.0 - upper


@jit
def beta_cdf_many(a, b, xs):
    """F_beta(a,b) evaluated at every entry of ``xs``."""
    out = np.empty(xs.shape[0])
    for i in range(xs.shape[0]):
        f, _ = beta_cdf_pair(a, b, xs[i])
        out[i] = f
    return out


@jit
def log_beta_fn(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


@jit
def beta_state_init(a, b, x):
    """Fresh incremental state at (a, b).

    Returns (tail, upper, kernel, log_kernel, in_log, err) where ``tail`` is
    min(F, 1 - F), ``upper`` says the tail stores 1 - F, and the kernel is
    x^a (1-x)^b / B(a, b).
    """
    f, g = beta_cdf_pair(a, b, x)
    if x <= 0.0 or x >= 1.0:
        kernel = 0.0
        logk = -np.inf
        in_log = False
    else:
        logk = a * math.log(x) + b * math.log1p(-x) - log_beta_fn(float(a), float(b))
        in_log = logk < LOG_KERNEL_FLOOR
        kernel = 0.0 if in_log else math.exp(logk)
    if f <= g:
        return f, False, kernel, logk, in_log, FRESH_ERR
    return g, True, kernel, logk, in_log, FRESH_ERR


@jit
def beta_state_step(a, b, x, tail, upper, kernel, logk, in_log, err, inc_ones):
    """Advance (a, b) by one observed bit using the Beta CDF recurrences.

    ``inc_ones`` increments a (F drops by kernel/a), otherwise b (F grows by
    kernel/b).  The stored tail shrinks in one of the two directions; there
    the subtraction amplifies relative error, which is tracked in ``err``
    and cleared by a direct re-evaluation once it exceeds ``ERR_LIMIT``.
    Returns (a, b, tail, upper, kernel, logk, in_log, err).
    """
    count = a if inc_ones else b
    if in_log:
        d = math.exp(logk - math.log(count))
    else:
        d = kernel / count
    shrink = inc_ones != upper
    if shrink:
        new = tail - d
    else:
        new = tail + d
    if new > 0.0:
        err = (err * tail + 4.0 * d) / new + 1.0

    s = a + b
    if inc_ones:
        if in_log or kernel > 0.0:
            logk += math.log(x) + math.log(s) - math.log(a)
            kernel *= x * s / a
        a += 1
    else:
        if in_log or kernel > 0.0:
            logk += math.log1p(-x) + math.log(s) - math.log(b)
            kernel *= (1.0 - x) * s / b
        b += 1
    if in_log:
        if logk > LOG_KERNEL_RESUME:
            in_log = False
            kernel = math.exp(logk)
    elif 0.0 < kernel < KERNEL_FLOOR:
        in_log = True
        logk = math.log(kernel)

    if new > 0.5:
        if new > 1.0:
            new = 1.0
        tail = 1.0 - new
        upper = not upper
        err = err * new / tail + 1.0 if tail > 0.0 else ERR_LIMIT + 1.0
    elif new < 0.0:
        tail = 0.0
        if d > 0.0:
            err = ERR_LIMIT + 1.0
    else:
        tail = new
    if err > ERR_LIMIT:
        f, g = beta_cdf_pair(a, b, x)
        if f <= g:
            tail = f
            upper = False
        else:
            tail = g
            upper = True
        err = FRESH_ERR
    return a, b, tail, upper, kernel, logk, in_log, err


@jit
def error_prob_walk(bits, x):
    """Per-step error probability of TS with threshold x on ``bits``.

    Step t sees F = F_beta(O+1, Z+1)(x) from the counts before bit t; the
    error probability is F for a one and 1 - F for a zero.
    """
    T = bits.shape[0]
    out = np.empty(T)
    a = 1
    b = 1
    tail, upper, kernel, logk, in_log, err = beta_state_init(a, b, x)
    for t in range(T):
        bit = bits[t]
        if upper:
            f = 1.0 - tail
            g = tail
        else:
            f = tail
            g = 1.0 - tail
        out[t] = f if bit == 1 else g
        a, b, tail, upper, kernel, logk, in_log, err = beta_state_step(
            a, b, x, tail, upper, kernel, logk, in_log, err, bit == 1)
    return out


@jit
def beta_tail_walk(a0, b, x, max_terms, tol):
    """Sum F_beta(a, b)(x) for a = a0, a0+1, ... with b fixed.

    Stops after ``max_terms`` summands or once a summand falls below
    ``tol``.  Returns (total, terms_used, last, previous).
    """
    a = a0
    tail, upper, kernel, logk, in_log, err = beta_state_init(a, b, x)
    total = 0.0
    last = 0.0
    prev = 0.0
    used = 0
    while used < max_terms:
        f = 1.0 - tail if upper else tail
        prev = last
        last = f
        total += f
        used += 1
        if f < tol:
            break
        a, b, tail, upper, kernel, logk, in_log, err = beta_state_step(
            a, b, x, tail, upper, kernel, logk, in_log, err, True)
    return total, used, last, prev


@jit
def gaussian_tail_series(n, tol):
    """sum_{j>=0} exp(-j^2 / (2 (j + 2 (n + 1)))) until a term drops below tol."""
    total = 0.0
    j = 0
    while True:
        term = math.exp(-(j * j) / (2.0 * (j + 2.0 * (n + 1.0))))
        total += term
        if term < tol:
            break
        j += 1
    return total, j + 1


@jit
def worst_case_bits(T, k, qn, qd, tie, fill):
    """Head follows H^q (tie -> ``tie``) until the non-fill budget is spent.

    q = qn/qd; ratios are compared as (O+1)(qd-qn) vs qn(Z+1) in int64.
    Returns (bits, zeros placed); the caller checks the zero count.
    """
    bits = np.empty(T, dtype=np.uint8)
    bits[:] = fill
    other = 1 - fill
    budget = k if fill == 1 else T - k
    O = 0
    Z = 0
    used = 0
    t = 0
    while used < budget and t < T:
        lhs = (O + 1) * (qd - qn)
        rhs = qn * (Z + 1)
        if lhs > rhs:
            bit = 0
        elif lhs < rhs:
            bit = 1
        else:
            bit = tie
        bits[t] = bit
        if bit == 1:
            O += 1
        else:
            Z += 1
        if bit == other:
            used += 1
        t += 1
    zeros = 0
    for i in range(T):
        if bits[i] == 0:
            zeros += 1
    return bits, zeros
