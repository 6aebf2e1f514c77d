"""Guess strings and query orders with guaranteed elimination.

For a candidate set C, an ordering is a guess string s and a permutation pi
of the indices. Walking pi and comparing against s, the j-th position
eliminates C_j: the candidates that agree with s on pi(1..j-1) and disagree
at pi(j). A good ordering keeps ``|C_j| * max(2, j) <= |C|`` for every j.

Indices are 1-based in every public structure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._validation import as_bit_matrix, as_bitstring, check_candidates
from .exceptions import BoundViolationError, ScaleLimitError

log = logging.getLogger(__name__)

EXHAUSTIVE_MAX_N = 8
EXHAUSTIVE_MAX_M = 64


@dataclass(frozen=True)
class HegedusOrdering:
    s: str
    pi: tuple[int, ...]
    eliminated: tuple[frozenset, ...]  # C_1, ..., C_n

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.eliminated)


@dataclass(frozen=True)
class OrderingReport:
    size: int
    eliminated: tuple[frozenset, ...]
    bound_ok: tuple[bool, ...]
    disjoint: bool
    covered: bool
    survivor: str | None
    problems: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.problems

    @property
    def objective(self) -> Fraction:
        """max_j |C_j| * max(2, j) / |C|; at most 1 for a passing ordering."""
        return max(
            (Fraction(len(c) * max(2, j), self.size) for j, c in enumerate(self.eliminated, 1)),
            default=Fraction(0),
        )


def _greedy(bits: np.ndarray) -> tuple[np.ndarray, list[int], list[int]]:
    """Core max-minority greedy on an ``(M, n)`` 0/1 matrix.

    Returns (s as uint8 array, 0-based order, sizes |C_j|).
    """
    m, n = bits.shape
    s = np.zeros(n, dtype=np.uint8)
    order: list[int] = []
    sizes: list[int] = []
    used = np.zeros(n, dtype=bool)
    rows = bits
    while len(rows) > 1:
        ones = rows.sum(axis=0, dtype=np.int64)
        minority = np.minimum(ones, len(rows) - ones)
        minority[used] = -1
        j = int(np.argmax(minority))  # argmax returns the smallest index on ties
        if minority[j] <= 0:
            # distinct rows always disagree somewhere unused
            raise AssertionError("no informative index for distinct candidates")
        major = 1 if 2 * ones[j] > len(rows) else 0
        s[j] = major
        used[j] = True
        order.append(j)
        sizes.append(int(minority[j]))
        rows = rows[rows[:, j] == major]
    survivor = rows[0] if len(rows) else None
    for j in range(n):
        if not used[j]:
            order.append(j)
            sizes.append(0)
            if survivor is not None:
                s[j] = survivor[j]
    return s, order, sizes


def _eliminated_sets(C: Sequence[str], s: str, pi: Sequence[int]):
    remaining = list(C)
    out = []
    for j in pi:
        keep, drop = [], []
        for c in remaining:
            (keep if c[j - 1] == s[j - 1] else drop).append(c)
        out.append(frozenset(drop))
        remaining = keep
    return tuple(out), remaining


def verify_ordering(C, s, pi) -> OrderingReport:
    """Recompute every C_j from its definition and check bound, disjointness, coverage."""
    C = check_candidates(C)
    n = len(C[0])
    s = as_bitstring(s, n)
    pi = tuple(int(j) for j in pi)
    problems = []
    if sorted(pi) != list(range(1, n + 1)):
        problems.append(f"pi={pi} is not a permutation of 1..{n}")
        return OrderingReport(len(C), (), (), False, False, None, tuple(problems))
    elim, remaining = _eliminated_sets(C, s, pi)
    size = len(C)
    bound_ok = tuple(len(cj) * max(2, j) <= size for j, cj in enumerate(elim, 1))
    for j, ok in enumerate(bound_ok, 1):
        if not ok:
            problems.append(f"|C_{j}|={len(elim[j - 1])} exceeds {size}/max(2,{j})")
    union = set()
    disjoint = True
    for cj in elim:
        if union & cj:
            disjoint = False
        union |= cj
    if not disjoint:
        problems.append("eliminated sets overlap")
    survivor = remaining[0] if remaining else None
    covered = len(remaining) <= 1 and union | set(remaining) == set(C)
    if not covered:
        problems.append("C is not the union of the C_j and the string agreeing with s")
    return OrderingReport(size, elim, bound_ok, disjoint, covered, survivor, tuple(problems))


def greedy_ordering(C) -> HegedusOrdering:
    """Max-minority greedy ordering, verified before it is returned.

    At each step pick the unused index with the largest minority count among
    candidates still consistent with s (smallest index on ties) and set s to
    the majority bit there (0 on ties). Once one candidate survives, the
    remaining indices follow in increasing order with s copying the survivor.

    Raises
    ------
    BoundViolationError
        If the result fails :func:`verify_ordering`; callers may then try
        :func:`exhaustive_ordering`.
    """
    C = check_candidates(C)
    s_bits, order, _ = _greedy(as_bit_matrix(C))
    s = "".join(map(str, s_bits))
    pi = tuple(j + 1 for j in order)
    report = verify_ordering(C, s, pi)
    if not report.passed:
        log.error("greedy ordering failed for C=%s: %s", list(C), report.problems)
        raise BoundViolationError("; ".join(report.problems), report)
    return HegedusOrdering(s, pi, report.eliminated)


def exhaustive_ordering(C) -> HegedusOrdering:
    """Ordering minimising max_j |C_j| * max(2, j) / |C| over every (s, pi).

    Exact search with memoisation on (consistent set, used indices); limited
    to n <= 8 and |C| <= 64.
    """
    C = check_candidates(C)
    n, m = len(C[0]), len(C)
    if n > EXHAUSTIVE_MAX_N or m > EXHAUSTIVE_MAX_M:
        raise ScaleLimitError(f"exhaustive search limited to n <= {EXHAUSTIVE_MAX_N}, |C| <= {EXHAUSTIVE_MAX_M}")

    @lru_cache(maxsize=None)
    def best(rest: frozenset, used: frozenset, j: int):
        # -> (worst |C_k|*max(2,k) over remaining positions, [(index, bit), ...])
        if len(rest) <= 1 or len(used) == n:
            return 0, ()
        choice = None
        for i in range(1, n + 1):
            if i in used:
                continue
            for bit in "01":
                drop = frozenset(c for c in rest if c[i - 1] != bit)
                here = len(drop) * max(2, j)
                if choice is not None and here >= choice[0]:
                    continue
                tail, steps = best(rest - drop, used | {i}, j + 1)
                cost = max(here, tail)
                if choice is None or cost < choice[0]:
                    choice = (cost, ((i, bit),) + steps)
        return choice

    _, steps = best(frozenset(C), frozenset(), 1)
    s = ["0"] * n
    pi = []
    rest = set(C)
    for i, bit in steps:
        pi.append(i)
        s[i - 1] = bit
        rest = {c for c in rest if c[i - 1] == bit}
    survivor = next(iter(rest)) if len(rest) == 1 else None
    for i in range(1, n + 1):
        if i not in pi:
            pi.append(i)
            if survivor is not None:
                s[i - 1] = survivor[i - 1]
    s = "".join(s)
    report = verify_ordering(C, s, pi)
    if not report.passed:
        raise BoundViolationError("; ".join(report.problems), report)
    return HegedusOrdering(s, tuple(pi), report.eliminated)


def ordering_with_fallback(C) -> HegedusOrdering:
    """Greedy ordering, retried exhaustively when within the exhaustive limits."""
    try:
        return greedy_ordering(C)
    except BoundViolationError:
        C = check_candidates(C)
        if len(C[0]) <= EXHAUSTIVE_MAX_N and len(C) <= EXHAUSTIVE_MAX_M:
            return exhaustive_ordering(C)
        raise
