"""The mismatch-profile optimisation and its closed-form comparator.

Maximise sum_i sqrt(p_i) over positive-integer profiles with
sum_i p_i <= n and prod_i max(2, p_i) <= M. The empty profile is feasible
with value 0. Logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .exceptions import InvalidInputError, ScaleLimitError

OPT_MAX_N = 64
OPT_MAX_M = 2 ** 24
ORACLE_MAX_N = 12
ORACLE_MAX_M = 64
_TIE_TOL = 1e-12


def closed_form(n: int, m: int) -> float:
    """sqrt(n log M / (log(n / log M) + 1)), denominator clamped below at 1."""
    if m <= 1 or m > 2 ** n:
        raise InvalidInputError(f"closed form needs 1 < M <= 2^n, got n={n}, M={m}")
    lm = math.log2(m)
    denom = max(1.0, math.log2(n / lm) + 1.0)
    return math.sqrt(n * lm / denom)


def profile_value(profile) -> float:
    return math.fsum(math.sqrt(p) for p in profile)


def is_feasible(profile, n: int, m: int) -> bool:
    if any(p < 1 for p in profile) or sum(profile) > n:
        return False
    prod = 1
    for p in profile:
        prod *= max(2, p)
    return prod <= m


@dataclass(frozen=True)
class BoundResult:
    n: int
    m: int
    opt_value: float
    opt_profile: tuple[int, ...]
    closed_form: float | None

    @property
    def ratio(self) -> float | None:
        if not self.closed_form:
            return None
        return self.opt_value / self.closed_form


def optimal_profile(n: int, m: int) -> BoundResult:
    """Exact optimum over non-increasing profiles.

    Memoised on (budget left, product budget left, largest allowed part),
    pruned by sum sqrt(p) <= sqrt(k * budget) for at most k further parts.
    Among optima the lexicographically largest profile is returned.
    """
    if n < 1 or m < 2:
        raise InvalidInputError("need n >= 1 and M >= 2")
    if n > OPT_MAX_N or m > OPT_MAX_M:
        raise ScaleLimitError(f"optimal_profile limited to n <= {OPT_MAX_N}, M <= {OPT_MAX_M}")

    @lru_cache(maxsize=None)
    def best(rest: int, budget: int, cap: int) -> tuple[float, tuple[int, ...]]:
        # a product of max(2, p) over parts summing to <= rest never exceeds 2^rest
        budget = min(budget, 1 << rest)
        val, prof = 0.0, ()
        for p in range(min(cap, rest), 0, -1):
            f = max(2, p)
            if f > budget:
                continue
            left = budget // f
            parts = (left.bit_length() - 1) if left >= 2 else 0
            if math.sqrt(p) + math.sqrt(parts * (rest - p)) < val - _TIE_TOL:
                continue
            sub_val, sub_prof = best(rest - p, left, p)
            cand = (math.sqrt(p) + sub_val, (p,) + sub_prof)
            if cand[0] > val + _TIE_TOL or (abs(cand[0] - val) <= _TIE_TOL and cand[1] > prof):
                val, prof = cand
        return val, prof

    _, prof = best(n, m, n)
    cf = closed_form(n, m) if m <= 2 ** n else None
    return BoundResult(n, m, profile_value(prof), prof, cf)


def enumerate_oracle(n: int, m: int) -> float:
    """Brute force over every ordered feasible profile (n <= 12, M <= 64)."""
    if n < 1 or m < 2:
        raise InvalidInputError("need n >= 1 and M >= 2")
    if n > ORACLE_MAX_N or m > ORACLE_MAX_M:
        raise ScaleLimitError(f"enumerate_oracle limited to n <= {ORACLE_MAX_N}, M <= {ORACLE_MAX_M}")
    best = 0.0

    def extend(profile, total, prod):
        nonlocal best
        best = max(best, profile_value(profile))
        for p in range(1, n - total + 1):
            if prod * max(2, p) <= m:
                extend(profile + [p], total + p, prod * max(2, p))

    extend([], 0, 1)
    return best


@dataclass(frozen=True)
class ScanRow:
    n: int
    m: int
    opt_value: float
    opt_profile: tuple[int, ...]
    closed_form: float
    ratio: float
    wsize: float | None = None
    wsize_ratio: float | None = None


@dataclass(frozen=True)
class ScanReport:
    rows: tuple[ScanRow, ...]

    @property
    def max_ratio(self) -> float:
        return max(r.ratio for r in self.rows)

    @property
    def max_wsize_ratio(self) -> float | None:
        vals = [r.wsize_ratio for r in self.rows if r.wsize_ratio is not None]
        return max(vals) if vals else None


def scan_grid(ns=(8, 12, 16, 24)) -> list[tuple[int, int]]:
    """(n, M) for M in {n+1, 2^ceil(n/2), 2^ceil(3n/4), 2^n}, duplicates removed."""
    grid = []
    for n in ns:
        for m in (n + 1, 2 ** math.ceil(n / 2), 2 ** math.ceil(3 * n / 4), 2 ** n):
            if (n, m) not in grid:
                grid.append((n, m))
    return grid


def ratio_scan(grid, wsize_fn=None) -> ScanReport:
    """opt_value / closed_form per grid point.

    ``wsize_fn(n, M)`` may return a span-program complexity for an instance
    of that shape (or None to skip); its ratio to the closed form is reported too.
    """
    rows = []
    for n, m in grid:
        res = optimal_profile(n, m)
        cf = closed_form(n, m)
        ws = wsize_fn(n, m) if wsize_fn is not None else None
        rows.append(ScanRow(n, m, res.opt_value, res.opt_profile, cf, res.opt_value / cf,
                            ws, None if ws is None else ws / cf))
    return ScanReport(tuple(rows))
