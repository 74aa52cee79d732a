"""Feasibility map of the (sigma1, eta_a1) plane.

Scans a rectangular grid of exchange coefficients and fixed-point stocks,
evaluating the four two-good feasibility conditions at every node, and
cross-checks against the closed-form answer: all four conditions are linear
in k = sigma1*(eta_a1 - 1), so the feasible set is exactly an interval in k.

The interval endpoints are tightened to float resolution against the same
rate formulas the scanner evaluates, so interval membership and the per-node
check agree exactly at every representable k.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .core import TwoGoodScenario
from .money import FeasibilityResult, _rates_at_k, feasibility_check

__all__ = ["GridSpec", "RegionScan", "KInterval", "scan_region", "feasible_k_interval"]

_BRACKET_CAP = 1e30


@dataclass(frozen=True)
class GridSpec:
    """Node counts and ranges of the scan; ``*_steps`` counts nodes per axis."""

    sigma1_min: float
    sigma1_max: float
    sigma1_steps: int
    eta_min: float
    eta_max: float
    eta_steps: int

    def __post_init__(self) -> None:
        for name in ("sigma1_min", "sigma1_max", "eta_min", "eta_max"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if not (self.sigma1_min < self.sigma1_max):
            raise ValueError("sigma1_min must be < sigma1_max")
        if not (self.eta_min < self.eta_max):
            raise ValueError("eta_min must be < eta_max")
        if self.sigma1_steps < 2 or self.eta_steps < 2:
            raise ValueError("each axis needs at least 2 nodes")
        if self.sigma1_min < 0.0:
            raise ValueError("sigma1_min must be >= 0")
        if self.eta_min < 1.0:
            raise ValueError("eta_min must be >= 1")

    def sigma1_values(self) -> list[float]:
        return _axis(self.sigma1_min, self.sigma1_max, self.sigma1_steps)

    def eta_values(self) -> list[float]:
        return _axis(self.eta_min, self.eta_max, self.eta_steps)


def _axis(lo: float, hi: float, n: int) -> list[float]:
    # Interpolate from the endpoints with index fractions; no accumulated
    # rounding, identical nodes on every platform.
    span = hi - lo
    last = n - 1
    return [lo + span * (i / last) for i in range(n)]


@dataclass(frozen=True)
class KInterval:
    """Closed interval of transfer intensities k = sigma1*(eta_a1 - 1);
    empty when lo > hi."""

    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def contains(self, k: float) -> bool:
        return self.lo <= k <= self.hi


@dataclass(eq=False)
class RegionScan:
    """Feasibility results on the grid, rows indexed by eta_a1, columns by
    sigma1."""

    grid: GridSpec
    sigma1: list[float]
    eta_a1: list[float]
    cells: list[list[FeasibilityResult]]

    def rows(self) -> Iterator[tuple[float, float, float, FeasibilityResult]]:
        """Flat (sigma1, eta_a1, k, result) tuples in row-major eta order."""
        for i, eta in enumerate(self.eta_a1):
            row = self.cells[i]
            for j, sig in enumerate(self.sigma1):
                yield sig, eta, sig * (eta - 1.0), row[j]

    def feasible_mask(self) -> np.ndarray:
        return np.array(
            [[cell.feasible for cell in row] for row in self.cells], dtype=bool
        )


def _worker_count(requested: int | None, n_rows: int) -> int:
    if requested is None:
        env = os.environ.get("TRADEFLOW_THREADS")
        if env is not None:
            try:
                requested = int(env)
            except ValueError:
                raise ValueError(f"TRADEFLOW_THREADS must be an integer, got {env!r}")
        else:
            requested = min(8, os.cpu_count() or 1)
    return max(1, min(requested, n_rows))


def scan_region(
    s: TwoGoodScenario, grid: GridSpec, max_workers: int | None = None
) -> RegionScan:
    """Evaluate the feasibility conditions at every grid node.

    Rows are computed independently (scenario and grid are immutable, each
    worker fills disjoint row slots), so the result is identical for any
    degree of parallelism. ``TRADEFLOW_THREADS`` caps the worker count when
    ``max_workers`` is not given.
    """
    sig_vals = grid.sigma1_values()
    eta_vals = grid.eta_values()
    cells: list[list[FeasibilityResult] | None] = [None] * len(eta_vals)

    def fill_row(i: int) -> None:
        eta = eta_vals[i]
        cells[i] = [feasibility_check(s, sig, eta) for sig in sig_vals]

    workers = _worker_count(max_workers, len(eta_vals))
    if workers == 1:
        for i in range(len(eta_vals)):
            fill_row(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(len(eta_vals))))
    return RegionScan(grid, sig_vals, eta_vals, cells)  # type: ignore[arg-type]


def _smallest_true(pred: Callable[[float], bool]) -> float:
    """Smallest non-negative float where a monotone false-to-true predicate
    holds; +inf if it never does below the bracket cap."""
    if pred(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while not pred(hi):
        lo = hi
        hi *= 2.0
        if hi > _BRACKET_CAP:
            return math.inf
    while True:
        mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi:
            return hi
        if pred(mid):
            hi = mid
        else:
            lo = mid


def _largest_true(pred: Callable[[float], bool]) -> float:
    """Largest non-negative float where a monotone true-to-false predicate
    holds; requires pred(0) and returns +inf if it never fails below the cap."""
    if not pred(0.0):
        return -math.inf
    lo, hi = 0.0, 1.0
    while pred(hi):
        lo = hi
        hi *= 2.0
        if hi > _BRACKET_CAP:
            return math.inf
    while True:
        mid = lo + 0.5 * (hi - lo)
        if mid <= lo or mid >= hi:
            return lo
        if pred(mid):
            lo = mid
        else:
            hi = mid


def feasible_k_interval(s: TwoGoodScenario) -> KInterval:
    """Solve the four feasibility conditions for k and intersect.

    The money conditions are non-decreasing in k (exports earn, so more
    transfer helps) and the production conditions non-increasing (the
    importers' own production shrinks), giving two lower and two upper
    bounds. Endpoints are exact at float resolution with respect to the
    scanner's arithmetic.
    """

    def rates(k: float) -> tuple[float, float, float, float, float, float]:
        return _rates_at_k(s, k)

    lo = max(
        _smallest_true(lambda k: rates(k)[0] >= 0.0),  # country A money rate
        _smallest_true(lambda k: rates(k)[1] >= 0.0),  # country B money rate
        0.0,
    )
    hi = min(
        _largest_true(lambda k: rates(k)[3] >= 0.0),  # A's production of good 2
        _largest_true(lambda k: rates(k)[4] >= 0.0),  # B's production of good 1
    )
    return KInterval(lo, hi)
