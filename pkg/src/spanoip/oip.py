"""Phased classical identification of a string promised to lie in C.

Each phase takes the current candidate set, computes a greedy ordering
(s, pi) for it and queries along pi guessing s. Agreeing answers are black
edges; the first disagreement is a red edge and starts a new phase on the
candidates eliminated at that position. A leaf is emitted as soon as a
single candidate remains consistent with everything observed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._validation import as_bit_matrix, as_bitstring, check_candidates
from .decision_tree import BLACK, RED, DecisionTree, GColoring, PathStats, TreeBuilder, evaluate
from .exceptions import PromiseViolationError
from .hegedus import _greedy


class _Walker:
    """Phase state shared by tree construction and oracle-driven identification."""

    __slots__ = ("bits", "phase_rows", "s", "order", "k", "rows", "phase_no")

    def __init__(self, bits: np.ndarray, rows: np.ndarray, phase_no: int = 0):
        self.bits = bits
        self._start(rows, phase_no)

    def _start(self, rows, phase_no):
        self.phase_rows = rows
        self.rows = rows
        self.phase_no = phase_no
        self.k = 0
        if len(rows) > 1:
            s, order, _ = _greedy(self.bits[rows])
            self.s, self.order = s, order
        else:
            self.s, self.order = None, []

    def copy(self) -> "_Walker":
        w = _Walker.__new__(_Walker)
        for name in self.__slots__:
            setattr(w, name, getattr(self, name))
        return w

    @property
    def done(self) -> bool:
        return len(self.rows) == 1

    def next_query(self) -> tuple[int, int]:
        """(0-based index, guessed bit) of the next query."""
        j = self.order[self.k]
        return j, int(self.s[j])

    def observe(self, bit: int) -> str:
        j, guess = self.next_query()
        rows = self.rows[self.bits[self.rows, j] == bit]
        if len(rows) == 0:
            raise PromiseViolationError(f"answer {bit} at index {j + 1} matches no remaining candidate")
        if bit == guess:
            self.rows = rows
            self.k += 1
            return BLACK
        self._start(rows, self.phase_no + 1)
        return RED


@dataclass(frozen=True)
class Phase:
    """One application of the greedy ordering inside the tree."""

    start: int  # vertex at which the phase begins
    members: tuple[str, ...]  # C^{(i)}
    s: str
    pi: tuple[int, ...]


@dataclass(frozen=True)
class OipInstance:
    candidates: tuple[str, ...]
    tree: DecisionTree
    coloring: GColoring
    phases: tuple[Phase, ...]
    phase_of: dict = field(repr=False)  # vertex -> index into phases
    consistent: dict = field(repr=False)  # vertex -> number of consistent candidates

    @property
    def n(self) -> int:
        return len(self.candidates[0])

    @property
    def m(self) -> int:
        return len(self.candidates)

    def phase_size(self, v: int) -> int:
        return len(self.phases[self.phase_of[v]].members)


def build_instance(C) -> OipInstance:
    """Materialise the full decision tree, coloring and phase bookkeeping for C."""
    C = check_candidates(C)
    bits = as_bit_matrix(C)
    tb = TreeBuilder()
    phases: list[Phase] = []
    phase_of: dict[int, int] = {}
    consistent: dict[int, int] = {}

    def new_phase(vertex, walker):
        members = tuple(C[i] for i in walker.phase_rows)
        if walker.s is None:
            s, pi = members[0], tuple(range(1, len(members[0]) + 1))
        else:
            s = "".join(map(str, walker.s))
            pi = tuple(j + 1 for j in walker.order)
        phases.append(Phase(vertex, members, s, pi))
        return len(phases) - 1

    def grow(walker: _Walker, phase_idx: int | None) -> int:
        if walker.done:
            v = tb.leaf(C[int(walker.rows[0])])
        else:
            j, guess = walker.next_query()
            v = tb.query(j + 1)
        if phase_idx is None:
            phase_idx = new_phase(v, walker)
        phase_of[v] = phase_idx
        consistent[v] = len(walker.rows)
        if walker.done:
            return v
        for q in (guess, 1 - guess):
            child = walker.copy()
            color = child.observe(q)
            w = grow(child, phase_idx if color == BLACK else None)
            tb.connect(v, q, w, color)
        return v

    root = grow(_Walker(bits, np.arange(len(C))), None)
    tree, coloring = tb.build(root)
    return OipInstance(C, tree, coloring, tuple(phases), phase_of, consistent)


def build_tree(C) -> tuple[DecisionTree, GColoring]:
    inst = build_instance(C)
    return inst.tree, inst.coloring


@dataclass(frozen=True)
class QueryRecord:
    index: int  # 1-based
    answer: int
    guess: int
    color: str


def identify(C, oracle: Callable[[int], int], verify: bool = False):
    """Identify the hidden string by querying ``oracle(index)`` (1-based).

    Returns ``(x, transcript)``. With ``verify=True`` the survivor is checked
    against the oracle on the unqueried indices after the leaf is reached;
    those extra queries are not part of the transcript.

    Raises
    ------
    PromiseViolationError
        If the answers are inconsistent with every candidate.
    """
    C = check_candidates(C)
    bits = as_bit_matrix(C)
    walker = _Walker(bits, np.arange(len(C)))
    transcript: list[QueryRecord] = []
    while not walker.done:
        j, guess = walker.next_query()
        answer = int(oracle(j + 1))
        if answer not in (0, 1):
            raise PromiseViolationError(f"oracle returned {answer!r} for index {j + 1}")
        color = walker.observe(answer)
        transcript.append(QueryRecord(j + 1, answer, guess, color))
    x = C[int(walker.rows[0])]
    if verify:
        asked = {rec.index for rec in transcript}
        for j in range(1, len(x) + 1):
            if j not in asked and int(oracle(j)) != int(x[j - 1]):
                raise PromiseViolationError(
                    f"oracle disagrees with the only consistent candidate {x} at index {j}"
                )
    return x, transcript


def string_oracle(x) -> Callable[[int], int]:
    x = as_bitstring(x)
    return lambda j: int(x[j - 1])


@dataclass(frozen=True)
class ProfileRow:
    x: str
    stats: PathStats

    @property
    def queries(self) -> int:
        return self.stats.queries

    @property
    def p(self) -> tuple[int, ...]:
        return self.stats.mismatches

    @property
    def T(self) -> tuple[int, ...]:
        return self.stats.runs

    @property
    def red_count(self) -> int:
        return self.stats.red_count

    @property
    def sum_sqrt_p(self) -> float:
        return math.fsum(math.sqrt(p) for p in self.p)

    @property
    def sum_sqrt_T(self) -> float:
        return math.fsum(math.sqrt(t) for t in self.T)


def profile(C, instance: OipInstance | None = None) -> list[ProfileRow]:
    """Path statistics of every member, in sorted order of the members."""
    inst = instance if instance is not None else build_instance(C)
    rows = []
    for x in sorted(inst.candidates):
        rows.append(ProfileRow(x, evaluate(inst.tree, inst.coloring, x)))
    return rows


def walk_profiles(C):
    """Yield ``(x, mismatches, runs)`` for every member without materialising the tree.

    Same phase logic as :func:`build_instance`; used where M is too large
    to keep the tree in memory.
    """
    C = check_candidates(C)
    bits = as_bit_matrix(C)

    stack = [(_Walker(bits, np.arange(len(C))), (), (0,))]
    while stack:
        walker, p, runs = stack.pop()
        while not walker.done:
            j, guess = walker.next_query()
            red = walker.copy()
            red.observe(1 - guess)
            stack.append((red, p + (runs[-1] + 1,), runs + (0,)))
            walker.observe(guess)
            runs = runs[:-1] + (runs[-1] + 1,)
        yield C[int(walker.rows[0])], p, runs


def path_constraints(stats: PathStats, n: int, m: int) -> tuple[bool, bool]:
    """(con1, con2) for one path: sum p + trailing <= n and prod max(2, p) <= M."""
    con1 = sum(stats.mismatches) + stats.trailing <= n
    prod = 1
    for p in stats.mismatches:
        prod *= max(2, p)
    return con1, prod <= m


def phase_shrink_ok(inst: OipInstance, stats: PathStats) -> bool:
    """|C^{(i+1)}| * max(2, p_i) <= |C^{(i)}| at every red edge of the path."""
    reds = [(v, w) for (v, q, c), w in zip(stats.edges, stats.vertices[1:]) if c == RED]
    for (v, w), p in zip(reds, stats.mismatches):
        if inst.phase_size(w) * max(2, p) > inst.phase_size(v):
            return False
    return True
