"""End-to-end analysis of a candidate set and its deterministic report."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from collections import OrderedDict

from . import nbsp
from .bound import OPT_MAX_M, OPT_MAX_N, closed_form, is_feasible, optimal_profile, ratio_scan
from .decision_tree import tree_bounds
from .exceptions import WitnessError
from .hegedus import verify_ordering
from .instances import random_candidates
from .oip import build_instance, path_constraints, phase_shrink_ok, profile, walk_profiles
from .verify import Tolerances, _close

SCHEMA = 1
SIG_DIGITS = 12


def num(x):
    """Round to 12 significant digits (round-half-even on the exact binary value)."""
    if x is None:
        return None
    return float(format(x, f".{SIG_DIGITS}g"))


def digest(C) -> str:
    payload = "".join(c + "\n" for c in sorted(C)).encode("ascii")
    return "sha256:" + hashlib.sha256(payload).hexdigest()


def analyze(C, max_dim: int = nbsp.MAX_DENSE_DIM, tol: Tolerances = Tolerances()) -> OrderedDict:
    """Run ordering -> tree -> span program -> bound and collect every check."""
    inst = build_instance(C)
    n, m = inst.n, inst.m
    depth, max_red = tree_bounds(inst.tree, inst.coloring)

    hegedus_ok = all(verify_ordering(ph.members, ph.s, ph.pi).passed for ph in inst.phases)

    sp = nbsp.build(inst.tree, inst.coloring)
    rows = []
    con1 = con2 = witnesses = terminal = seg = True
    membership = None if sp.dim > max_dim else True
    separation = 0.5 / math.sqrt(n + 1)
    pe, me, pf, mf, t2 = [], [], [], [], []
    for row in profile(inst.candidates, inst):
        st = row.stats
        c1, c2 = path_constraints(st, n, m)
        con1 &= c1
        con2 &= c2 and phase_shrink_ok(inst, st)
        try:
            rep = nbsp.witness_report(sp, row.x, membership=membership is not None, max_dim=max_dim,
                                      reconstruction_tol=tol.reconstruction,
                                      orthogonality_tol=tol.orthogonality)
        except WitnessError:
            witnesses = False
            continue
        witnesses &= (rep.reconstruction_residual <= tol.reconstruction
                      and rep.max_orthogonality_violation <= tol.orthogonality
                      and rep.target_overlaps_ok
                      and _close(rep.wsize_minus_exact, rep.wsize_minus_path_sum, tol.relative))
        if membership is not None:
            membership &= rep.member_residual <= tol.membership and all(
                r > tol.membership and r >= separation for r in rep.uniqueness_residuals.values())
        tp, tm = nbsp.terminal_terms(st, sp.weights)
        terminal &= (_close(rep.wsize_plus_exact, rep.wsize_plus_formula - tp, tol.relative)
                     and _close(rep.wsize_minus_exact, rep.wsize_minus_formula - tm, tol.relative))
        b3 = 3.0 * nbsp.segment_sum(st)
        seg &= max(rep.wsize_plus_formula, rep.wsize_minus_formula) <= b3 * (1 + tol.relative)
        pe.append(rep.wsize_plus_exact)
        me.append(rep.wsize_minus_exact)
        pf.append(rep.wsize_plus_formula)
        mf.append(rep.wsize_minus_formula)
        t2.append(b3)
        rows.append(OrderedDict([
            ("x", row.x),
            ("queries", row.queries),
            ("p", list(row.p)),
            ("T", list(row.T)),
            ("sum_sqrt_p", num(row.sum_sqrt_p)),
            ("sum_sqrt_T", num(row.sum_sqrt_T)),
            ("wsize_plus_exact", num(rep.wsize_plus_exact)),
            ("wsize_plus_formula", num(rep.wsize_plus_formula)),
            ("wsize_minus_exact", num(rep.wsize_minus_exact)),
            ("wsize_minus_formula", num(rep.wsize_minus_formula)),
        ]))

    wsize = math.sqrt(max(pe) * max(me)) if pe else 0.0
    if pe:
        seg &= wsize <= max(t2) * (1 + tol.relative)
    cf = closed_form(n, m) if 1 < m <= 2 ** n else None
    if m >= 2 and n <= OPT_MAX_N and m <= OPT_MAX_M:
        res = optimal_profile(n, m)
        opt_value, opt_prof = res.opt_value, list(res.opt_profile)
        con2 &= is_feasible(res.opt_profile, n, m)
        best = max((r["sum_sqrt_p"] for r in rows), default=0.0)
        con2 &= best <= opt_value + 1e-9
    elif m == 1:
        opt_value, opt_prof = 0.0, []
    else:
        opt_value, opt_prof = None, None

    def ratio(a):
        return None if a is None or not cf else num(a / cf)

    report = OrderedDict()
    report["schema"] = SCHEMA
    report["n"] = n
    report["m"] = m
    report["digest"] = digest(inst.candidates)
    report["tree"] = OrderedDict([("vertices", len(inst.tree)), ("depth", depth), ("max_red", max_red)])
    report["per_input"] = rows
    report["aggregate"] = OrderedDict([
        ("wsize", num(wsize)),
        ("closed_form", num(cf)),
        ("opt_value", num(opt_value)),
        ("opt_profile", opt_prof),
        ("ratio_wsize_to_F", ratio(wsize)),
        ("ratio_opt_to_F", ratio(opt_value)),
    ])
    report["checks"] = OrderedDict([
        ("hegedus", hegedus_ok),
        ("con1", con1),
        ("con2", con2),
        ("witnesses", witnesses),
        ("membership", membership),
        ("terminal_term", terminal),
        ("segment_constant", seg),
    ])
    report["conventions"] = OrderedDict([
        ("log_base", 2),
        ("closed_form", "sqrt(n*log2(M) / max(1, log2(n/log2(M)) + 1))"),
    ])
    return report


def checks_passed(report) -> bool:
    return all(v is not False for v in report["checks"].values())


def to_json(report) -> str:
    return json.dumps(report, indent=2) + "\n"


CSV_FIELDS = ("x", "queries", "p", "T", "sum_sqrt_p", "sum_sqrt_T", "wsize_plus_exact",
              "wsize_plus_formula", "wsize_minus_exact", "wsize_minus_formula")


def to_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for row in report["per_input"]:
        w.writerow([" ".join(map(str, row[k])) if isinstance(row[k], list) else row[k] for k in CSV_FIELDS])
    return buf.getvalue()


def instance_wsize(C) -> float:
    """Span-program complexity over C from path statistics alone (no tree in memory)."""
    runs_all = [(p, runs) for _, p, runs in walk_profiles(C)]
    depth = max(sum(r) + len(p) for p, r in runs_all)
    w = nbsp.default_weights(depth)
    plus = minus = 0.0
    for p, runs in runs_all:
        a, b = nbsp.path_wsizes(p, runs, w)
        plus, minus = max(plus, a), max(minus, b)
    return math.sqrt(plus * minus)


SCAN_MAX_MEMBERS = 2 ** 18


def scan(grid, seed: int = 0, max_members: int = SCAN_MAX_MEMBERS):
    """:func:`bound.ratio_scan` plus the complexity of a seeded random instance per point.

    Points with M above ``max_members`` get no instance (wsize is None).
    """

    def wsize_fn(n, m):
        if m > max_members:
            return None
        return instance_wsize(random_candidates(n, m, seed))

    return ratio_scan(grid, wsize_fn)
