"""Exact regret of Thompson sampling on adversarial bit sequences."""

from ._jit import HAVE_NUMBA
from .beta_math import (
    BetaParams,
    IncrementalBetaCdf,
    TailSumQuery,
    beta_cdf,
    beta_cdf_rational,
    binom_point_mass,
    exp_sum,
    tail_sum,
)
from .prediction import (
    BitSequence,
    RegretBreakdown,
    SwapEffect,
    TradeoffParameter,
    regret,
    static_benchmark,
    step_error_prob,
    swap,
    swap_comparison,
    swap_delta_closed_form,
)
from .sequences import decompose, flip, gen_best, gen_worst, hq, tail_fill_bit

__version__ = "0.1.0"
