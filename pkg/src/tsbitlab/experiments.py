"""Scaling sweeps over worst- and best-case sequences, with CSV output."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .prediction import TradeoffParameter, regret
from .sequences import gen_best, gen_worst, tail_fill_bit

CSV_COLUMNS = ("k", "T", "q", "regret", "regret_over_sqrt", "engine_mode", "wall_time_ms")


@dataclass(frozen=True)
class ScalingRow:
    k: int
    T: int
    q: str
    regret: float
    regret_over_sqrt: float
    engine_mode: str = "float"
    wall_time_ms: Optional[float] = None


def _over_sqrt(value: float, T: int, k: int, q: TradeoffParameter) -> float:
    # sqrt(k) when the worst-case tail is ones, sqrt(T - k) otherwise
    scale = k if tail_fill_bit(T, k, q) == 1 else T - k
    return value / math.sqrt(scale) if scale > 0 else math.nan


def _row(seq, T: int, k: int, q: TradeoffParameter, timing: bool) -> ScalingRow:
    t0 = time.perf_counter()
    value = float(regret(seq, q, "float").regret)
    elapsed = (time.perf_counter() - t0) * 1e3
    return ScalingRow(
        k=k, T=T, q=str(q), regret=value,
        regret_over_sqrt=_over_sqrt(value, T, k, q),
        wall_time_ms=elapsed if timing else None,
    )


def _map(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def scan_worst(q, ks: Iterable[int], pad: int = 0, tie_choice: int = 0,
               workers: int = 1, timing: bool = False) -> list[ScalingRow]:
    """Float regret of gen_worst(2k + pad, k, q) for each k, sorted by k."""
    q = TradeoffParameter.parse(q)
    ks = sorted(set(int(k) for k in ks))

    def one(k):
        T = 2 * k + pad
        return _row(gen_worst(T, k, q, tie_choice), T, k, q, timing)

    return sorted(_map(one, ks, workers), key=lambda r: r.k)


def scan_best(q, T: int, ks: Iterable[int], workers: int = 1, timing: bool = False) -> list[ScalingRow]:
    """Float regret of gen_best(T, k, q) for each k, sorted by k."""
    q = TradeoffParameter.parse(q)
    ks = sorted(set(int(k) for k in ks))

    def one(k):
        return _row(gen_best(T, k, q), T, k, q, timing)

    return sorted(_map(one, ks, workers), key=lambda r: r.k)


def best_case_violations(rows: Sequence[ScalingRow], limit: float = 1.0) -> list[ScalingRow]:
    return [r for r in rows if not r.regret <= limit]


def worst_regret_over_k(T: int, q, coarse: int = 101, tie_choice: int = 0) -> tuple[int, float]:
    """(k, regret) maximizing regret(gen_worst(T, k, q)) over 0 <= k <= T.

    A coarse grid locates the peak, then every k between the grid
    neighbours of the best point is evaluated.
    """
    q = TradeoffParameter.parse(q)

    def value(k):
        return float(regret(gen_worst(T, k, q, tie_choice), q, "float").regret)

    grid = sorted(set(np.linspace(0, T, coarse).round().astype(int).tolist()))
    vals = [value(k) for k in grid]
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    best_k, best = grid[i], vals[i]
    for k in range(lo, hi + 1):
        v = value(k)
        if v > best:
            best_k, best = k, v
    return best_k, best


def k_grid(kmin: int, kmax: int, steps: int) -> list[int]:
    """About ``steps`` geometrically spaced integers from kmin to kmax inclusive."""
    if kmin < 0 or kmax < kmin:
        raise ValueError("need 0 <= kmin <= kmax")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1 or kmin == kmax:
        return sorted({kmin, kmax})
    lo = max(kmin, 1)
    pts = np.geomspace(lo, kmax, steps).round().astype(int).tolist()
    out = set(pts) | {kmax}
    if kmin == 0:
        out.add(0)
    return sorted(out)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def rows_to_csv(rows: Iterable[ScalingRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows: Iterable[ScalingRow], path) -> None:
    Path(path).write_text(rows_to_csv(rows), encoding="utf-8", newline="\n")


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
