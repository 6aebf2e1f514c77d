"""Command-line front end.

Exit codes: 0 success, 1 verification failures, 2 malformed input,
3 internal invariant failure, 4 promise violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import OrderedDict

from . import analysis, nbsp
from ._validation import as_bitstring, read_candidate_file
from .bound import enumerate_oracle, optimal_profile, ratio_scan, scan_grid, ORACLE_MAX_M, ORACLE_MAX_N
from .decision_tree import from_json, to_json
from .exceptions import BoundViolationError, InvalidInputError, PromiseViolationError, ScaleLimitError
from .hegedus import EXHAUSTIVE_MAX_M, EXHAUSTIVE_MAX_N, exhaustive_ordering, greedy_ordering, verify_ordering
from .instances import format_candidates, random_candidates, rng_for
from .oip import build_instance, identify, string_oracle
from .verify import Tally, Tolerances, all_inputs, nbsp_suite, oip_suite, tree_suite

log = logging.getLogger("spanoip")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INTERNAL, EXIT_PROMISE = 0, 1, 2, 3, 4


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _tolerances(args) -> Tolerances:
    return Tolerances(
        reconstruction=args.tol_reconstruction,
        orthogonality=args.tol_orthogonality,
        membership=args.tol_membership,
        relative=args.tol_relative,
    )


def cmd_analyze(args) -> int:
    C = read_candidate_file(args.path)
    report = analysis.analyze(C, max_dim=args.max_dim, tol=_tolerances(args))
    text = analysis.to_csv(report) if args.format == "csv" else analysis.to_json(report)
    _emit(text, args.output)
    if args.tree_out:
        inst = build_instance(C)
        with open(args.tree_out, "w", encoding="utf-8") as fh:
            fh.write(to_json(inst.tree, inst.coloring, indent=2) + "\n")
    if not analysis.checks_passed(report):
        failed = [k for k, v in report["checks"].items() if v is False]
        print(f"invariant failure: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_hegedus(args) -> int:
    C = read_candidate_file(args.path)
    method = "greedy"
    try:
        order = greedy_ordering(C)
    except BoundViolationError as exc:
        print(f"greedy ordering failed: {exc}", file=sys.stderr)
        if len(C[0]) > EXHAUSTIVE_MAX_N or len(C) > EXHAUSTIVE_MAX_M:
            return EXIT_INTERNAL
        method = "exhaustive"
        try:
            order = exhaustive_ordering(C)
        except BoundViolationError as exc2:
            print(f"exhaustive ordering failed: {exc2}", file=sys.stderr)
            return EXIT_INTERNAL
    rep = verify_ordering(C, order.s, order.pi)
    out = OrderedDict([
        ("n", len(C[0])),
        ("m", len(C)),
        ("method", method),
        ("s", order.s),
        ("pi", list(order.pi)),
        ("eliminated", [
            OrderedDict([("j", j), ("size", len(cj)), ("members", sorted(cj)), ("bound_ok", ok)])
            for j, (cj, ok) in enumerate(zip(rep.eliminated, rep.bound_ok), 1)
        ]),
        ("disjoint", rep.disjoint),
        ("covered", rep.covered),
        ("passed", rep.passed),
    ])
    _emit(_dump(out), args.output)
    return EXIT_OK if rep.passed else EXIT_INTERNAL


def cmd_identify(args) -> int:
    C = read_candidate_file(args.path)
    x = as_bitstring(args.x, len(C[0]))
    try:
        found, transcript = identify(C, string_oracle(x), verify=True)
    except PromiseViolationError as exc:
        print(f"promise violation: {exc}", file=sys.stderr)
        return EXIT_PROMISE
    out = OrderedDict([
        ("x", found),
        ("queries", len(transcript)),
        ("transcript", [
            OrderedDict([("index", r.index), ("answer", r.answer), ("guess", r.guess), ("color", r.color)])
            for r in transcript
        ]),
    ])
    _emit(_dump(out), args.output)
    return EXIT_OK


def cmd_optimize(args) -> int:
    res = optimal_profile(args.n, args.m)
    out = OrderedDict([
        ("n", res.n),
        ("m", res.m),
        ("opt_value", analysis.num(res.opt_value)),
        ("opt_profile", list(res.opt_profile)),
        ("closed_form", analysis.num(res.closed_form)),
        ("ratio", analysis.num(res.ratio)),
    ])
    if args.n <= ORACLE_MAX_N and args.m <= ORACLE_MAX_M:
        out["oracle_value"] = analysis.num(enumerate_oracle(args.n, args.m))
    _emit(_dump(out), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    C = random_candidates(args.n, args.m, args.seed)
    header = f"spanoip gen --n {args.n} --m {args.m} --seed {args.seed} (PCG64)"
    _emit(format_candidates(C, header), args.output)
    return EXIT_OK


def _random_instances(count: int, seed: int, max_n: int = 10, max_m: int = 64):
    rng = rng_for(seed)
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, min(2 ** n, max_m) + 1))
        yield random_candidates(n, m, rng=rng)


def cmd_verify(args) -> int:
    tol = _tolerances(args)
    tally = Tally()
    if args.tree:
        with open(args.tree, encoding="utf-8") as fh:
            tree, coloring = from_json(fh.read())
        n = max(tree.max_index(), 1)
        if n > 12:
            raise InvalidInputError("tree verification enumerates {0,1}^n and needs n <= 12")
        domain = all_inputs(n)
        tree_suite(tree, coloring, domain, tally)
        if tally.ok:
            nbsp_suite(nbsp.build(tree, coloring), domain, n, tally, tol, args.max_dim)
    if args.path:
        oip_suite(read_candidate_file(args.path), tally, tol, args.max_dim)
    if args.random:
        for C in _random_instances(args.random, args.seed):
            oip_suite(C, tally, tol, args.max_dim)
    if not tally.counts:
        raise InvalidInputError("nothing to verify: give PATH, --tree or --random")
    for line in tally.lines():
        print(line)
    for failure in tally.failures[:20]:
        print(f"  {failure}", file=sys.stderr)
    print("ALL PASS" if tally.ok else "FAILURES")
    return EXIT_OK if tally.ok else EXIT_VERIFY


def cmd_scan(args) -> int:
    grid = scan_grid(tuple(args.ns))
    rep = analysis.scan(grid, seed=args.seed, max_members=args.max_members) if args.wsize else ratio_scan(grid)
    num = analysis.num
    rows = [
        OrderedDict([("n", r.n), ("m", r.m), ("opt_value", num(r.opt_value)),
                     ("opt_profile", list(r.opt_profile)), ("closed_form", num(r.closed_form)),
                     ("ratio", num(r.ratio)), ("wsize", num(r.wsize)), ("wsize_ratio", num(r.wsize_ratio))])
        for r in rep.rows
    ]
    out = OrderedDict([("rows", rows), ("max_ratio", num(rep.max_ratio)),
                       ("max_wsize_ratio", num(rep.max_wsize_ratio))])
    _emit(_dump(out), args.output)
    return EXIT_OK


def _add_tolerances(p):
    p.add_argument("--max-dim", type=int, default=nbsp.MAX_DENSE_DIM,
                   help="largest span-program dimension for the dense membership check")
    p.add_argument("--tol-reconstruction", type=float, default=nbsp.RECONSTRUCTION_TOL)
    p.add_argument("--tol-orthogonality", type=float, default=nbsp.ORTHOGONALITY_TOL)
    p.add_argument("--tol-membership", type=float, default=nbsp.MEMBERSHIP_TOL)
    p.add_argument("--tol-relative", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spanoip", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline report for a candidate-set file")
    p.add_argument("path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.add_argument("--tree-out", help="also write the decision tree JSON here")
    _add_tolerances(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("hegedus", help="guess string and query order for a candidate set")
    p.add_argument("path")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_hegedus)

    p = sub.add_parser("identify", help="run classical identification against a hidden string")
    p.add_argument("path")
    p.add_argument("--x", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("optimize", help="exact optimum of the mismatch-profile program")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("gen", help="write a reproducible random candidate set")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("path", nargs="?")
    p.add_argument("--random", type=int, default=0, metavar="COUNT")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tree", help="decision tree JSON to check over all inputs")
    _add_tolerances(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="optimum vs closed form over a grid")
    p.add_argument("--ns", type=int, nargs="+", default=[8, 12, 16, 24])
    p.add_argument("--wsize", action="store_true", help="also score a seeded random instance per point")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-members", type=int, default=2 ** 18)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (InvalidInputError, ScaleLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PromiseViolationError as exc:
        print(f"promise violation: {exc}", file=sys.stderr)
        return EXIT_PROMISE
    except (BoundViolationError, AssertionError) as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
