"""Invariant suites over trees, span programs, OIP instances and the optimiser.

Each suite records one pass/fail per checked item into a :class:`Tally`;
the CLI ``verify`` command and the acceptance tests both read these.
"""

from __future__ import annotations

import itertools
import math
from collections import OrderedDict
from dataclasses import dataclass

from . import nbsp
from .bound import is_feasible, optimal_profile, OPT_MAX_M, OPT_MAX_N
from .decision_tree import BLACK, RED, b_values, evaluate, root_leaf_paths, tree_bounds, validate
from .exceptions import WitnessError
from .hegedus import verify_ordering
from .oip import build_instance, identify, path_constraints, phase_shrink_ok, string_oracle


@dataclass(frozen=True)
class Tolerances:
    reconstruction: float = nbsp.RECONSTRUCTION_TOL
    orthogonality: float = nbsp.ORTHOGONALITY_TOL
    membership: float = nbsp.MEMBERSHIP_TOL
    relative: float = 1e-9
    telescoping: float = 1e-12


class Tally:
    def __init__(self):
        self.counts: OrderedDict[str, list[int]] = OrderedDict()
        self.failures: list[str] = []

    def record(self, name: str, ok: bool, detail: str = "") -> bool:
        c = self.counts.setdefault(name, [0, 0])
        c[0 if ok else 1] += 1
        if not ok and len(self.failures) < 200:
            self.failures.append(f"{name}: {detail}" if detail else name)
        return ok

    def merge(self, other: "Tally") -> None:
        for name, (p, f) in other.counts.items():
            c = self.counts.setdefault(name, [0, 0])
            c[0] += p
            c[1] += f
        self.failures.extend(other.failures[: max(0, 200 - len(self.failures))])

    @property
    def ok(self) -> bool:
        return all(f == 0 for _, f in self.counts.values())

    def failed(self, name: str) -> int:
        return self.counts.get(name, [0, 0])[1]

    def lines(self) -> list[str]:
        out = []
        for name, (p, f) in self.counts.items():
            status = "PASS" if f == 0 else "FAIL"
            out.append(f"{status} {name}: {p} passed, {f} failed")
        return out


def all_inputs(n: int):
    return ["".join(bits) for bits in itertools.product("01", repeat=n)]


def _close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def tree_suite(tree, coloring, domain, tally: Tally | None = None) -> Tally:
    """Structure, path statistics, b recurrence and depth/red maxima."""
    tally = tally or Tally()
    diags = validate(tree, coloring)
    black_diags = [d for d in diags if "black out-edge" in d]
    tally.record("one black out-edge", not black_diags, "; ".join(black_diags))
    tally.record("tree valid", not diags, "; ".join(diags))
    if diags:
        return tally
    depth, reds = tree_bounds(tree, coloring)
    paths = root_leaf_paths(tree, coloring)
    tally.record("tree bounds", depth == max(len(e) for _, e in paths)
                 and reds == max(sum(c == RED for *_, c in e) for _, e in paths))
    b = b_values(tree, coloring)
    ok = b[tree.root] == 0
    for v in tree.internal():
        for q in (0, 1):
            w = tree.child(v, q)
            ok &= b[w] == (b[v] + 1 if coloring(v, q) == BLACK else 0)
    tally.record("b recurrence", ok)
    for x in domain:
        st = evaluate(tree, coloring, x)
        follows = all(tree.nodes[v].index <= len(x) and int(x[tree.nodes[v].index - 1]) == q
                      for v, q, _ in st.edges)
        follows &= st == evaluate(tree, coloring, x)
        tally.record("path follows input", follows, x)
        ident = (all(p == t + 1 for p, t in zip(st.mismatches, st.runs))
                 and sum(st.runs) + st.red_count == st.queries
                 and len(st.runs) == st.red_count + 1
                 and min(st.runs) >= 0)
        tally.record("path identities", ident, x)
        tally.record("path within bounds", st.queries <= depth and st.red_count <= reds, x)
    return tally


def nbsp_suite(sp, domain, n: int, tally: Tally | None = None, tol: Tolerances = Tolerances(),
               max_dim: int = nbsp.MAX_DENSE_DIM) -> Tally:
    """Witness checks, formula relations and the constant-3 bound for every input."""
    tally = tally or Tally()
    w = sp.weights
    tele = all(
        abs(math.fsum(w.red[:t]) - math.sqrt(t)) <= tol.telescoping
        and abs(math.fsum(1.0 / v for v in w.black[:t]) - math.sqrt(t)) <= tol.telescoping
        for t in range(len(w.red) + 1)
    )
    tally.record("telescoping", tele)
    separation = 0.5 / math.sqrt(n + 1)
    pe, me, t2 = [], [], []
    for x in domain:
        try:
            rep = nbsp.witness_report(sp, x, membership=sp.dim <= max_dim, max_dim=max_dim,
                                      reconstruction_tol=tol.reconstruction,
                                      orthogonality_tol=tol.orthogonality)
        except WitnessError as exc:
            tally.record("witnesses", False, f"{x}: {exc}")
            continue
        tally.record("reconstruction", rep.reconstruction_residual <= tol.reconstruction, x)
        tally.record("orthogonality", rep.max_orthogonality_violation <= tol.orthogonality, x)
        tally.record("target overlap", rep.target_overlaps_ok, x)
        tally.record("negative witness path sum",
                     _close(rep.wsize_minus_exact, rep.wsize_minus_path_sum, tol.relative), x)
        if rep.uniqueness_residuals is not None:
            agree = rep.member_residual <= tol.membership and all(
                r > tol.membership for r in rep.uniqueness_residuals.values())
            tally.record("membership agreement", agree, x)
            sep = min(rep.uniqueness_residuals.values(), default=math.inf)
            tally.record("membership separation", sep >= separation, f"{x}: {sep}")
        tp, tm = nbsp.terminal_terms(rep.stats, w)
        tally.record("terminal term",
                     _close(rep.wsize_plus_exact, rep.wsize_plus_formula - tp, tol.relative)
                     and _close(rep.wsize_minus_exact, rep.wsize_minus_formula - tm, tol.relative), x)
        bound3 = 3.0 * nbsp.segment_sum(rep.stats)
        tally.record("segment constant",
                     rep.wsize_plus_formula <= bound3 * (1 + tol.relative)
                     and rep.wsize_minus_formula <= bound3 * (1 + tol.relative), x)
        pe.append(rep.wsize_plus_exact)
        me.append(rep.wsize_minus_exact)
        t2.append(bound3)
    if pe:
        wsize = math.sqrt(max(pe) * max(me))
        tally.record("segment constant", wsize <= max(t2) * (1 + tol.relative), f"wsize {wsize}")
    return tally


def oip_suite(C, tally: Tally | None = None, tol: Tolerances = Tolerances(),
              max_dim: int = nbsp.MAX_DENSE_DIM, witnesses: bool = True) -> Tally:
    """Everything checked for one candidate set."""
    tally = tally or Tally()
    inst = build_instance(C)
    n, m = inst.n, inst.m
    for ph in inst.phases:
        rep = verify_ordering(ph.members, ph.s, ph.pi)
        tally.record("hegedus bound", all(rep.bound_ok), f"phase at vertex {ph.start}")
        tally.record("hegedus disjoint/coverage", rep.disjoint and rep.covered, f"phase at vertex {ph.start}")
    leaves = inst.tree.leaves()
    labels = [inst.tree.nodes[u].label for u in leaves]
    tally.record("leaf coverage", len(leaves) == m and sorted(labels) == sorted(inst.candidates))
    best = 0.0
    for x in inst.candidates:
        got, transcript = identify(inst.candidates, string_oracle(x))
        st = evaluate(inst.tree, inst.coloring, x)
        idx = [rec.index for rec in transcript]
        tally.record("identify correctness", got == x and st.label == x, x)
        tally.record("transcript matches tree", len(idx) == st.queries
                     and idx == [inst.tree.nodes[v].index for v, _, _ in st.edges], x)
        tally.record("no repeated index", len(set(idx)) == len(idx) and len(idx) <= n, x)
        con1, con2 = path_constraints(st, n, m)
        tally.record("con1", con1, x)
        tally.record("con2", con2, x)
        tally.record("phase shrink", phase_shrink_ok(inst, st), x)
        best = max(best, math.fsum(math.sqrt(p) for p in st.mismatches))
    if m >= 2 and n <= OPT_MAX_N and m <= OPT_MAX_M:
        res = optimal_profile(n, m)
        tally.record("optimizer feasible", is_feasible(res.opt_profile, n, m))
        tally.record("linking", best <= res.opt_value + 1e-12, f"{best} > {res.opt_value}")
    tree_suite(inst.tree, inst.coloring, sorted(inst.candidates), tally)
    if witnesses:
        sp = nbsp.build(inst.tree, inst.coloring)
        nbsp_suite(sp, sorted(inst.candidates), n, tally, tol, max_dim)
    return tally
