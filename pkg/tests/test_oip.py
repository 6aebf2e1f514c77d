import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spanoip.decision_tree import BLACK, RED, evaluate, validate
from spanoip.exceptions import InvalidInputError, PromiseViolationError
from spanoip.instances import random_candidates
from spanoip.oip import (
    build_instance,
    build_tree,
    identify,
    path_constraints,
    phase_shrink_ok,
    profile,
    string_oracle,
    walk_profiles,
)


def simulate(C, x):
    """Independent re-run of the phase rules with plain lists.

    Returns (queried indices, mismatch positions, phase sizes).
    """
    n = len(C[0])
    phase = list(C)
    sizes = [len(phase)]
    queried, mismatches = [], []
    while True:
        # greedy ordering for this phase, restarted at every mismatch
        rest = list(phase)
        used = set()
        pos = 0
        while len(rest) > 1:
            best = None
            for j in range(n):
                if j in used:
                    continue
                ones = sum(c[j] == "1" for c in rest)
                mino = min(ones, len(rest) - ones)
                if best is None or mino > best[0]:
                    best = (mino, j, "1" if 2 * ones > len(rest) else "0")
            _, j, guess = best
            used.add(j)
            pos += 1
            queried.append(j + 1)
            if x[j] == guess:
                rest = [c for c in rest if c[j] == guess]
            else:
                phase = [c for c in rest if c[j] != guess]
                mismatches.append(pos)
                sizes.append(len(phase))
                break
        else:
            return queried, mismatches, sizes, rest[0]


def test_worked_tree_shape(worked):
    inst = build_instance(worked)
    tree, coloring = inst.tree, inst.coloring
    assert validate(tree, coloring) == []
    root = tree.root
    assert tree[root].index == 2 and coloring.guess(root) == 0
    red = tree.child(root, 1)
    assert inst.phases[inst.phase_of[red]].members == ("0111", "1111")
    black = tree.child(root, 0)
    assert tree[black].index == 3
    assert tree[tree.child(black, 0)].index == 4
    assert len(tree.leaves()) == 5
    assert sorted(tree[u].label for u in tree.leaves()) == sorted(worked)


def test_singleton_tree():
    tree, coloring = build_tree(["0101"])
    assert len(tree) == 1 and tree[0].is_leaf
    x, transcript = identify(["0101"], string_oracle("0101"))
    assert x == "0101" and transcript == []


def test_one_bit():
    tree, _ = build_tree(["0", "1"])
    assert len(tree) == 3 and tree[0].index == 1


def test_identify_worked(worked):
    x, tr = identify(worked, string_oracle("1111"))
    assert x == "1111"
    assert [r.index for r in tr] == [2, 1]
    assert all(r.color == RED for r in tr)
    x, tr = identify(worked, string_oracle("0000"))
    assert x == "0000" and len(tr) == 3
    assert all(r.color == BLACK for r in tr)


def test_identify_promise_violation(worked):
    # 1010 follows the tree to leaf 0011 without an inconsistent answer
    x, _ = identify(worked, string_oracle("1010"))
    assert x == "0011"
    with pytest.raises(PromiseViolationError):
        identify(worked, string_oracle("1010"), verify=True)
    with pytest.raises(PromiseViolationError):
        identify(worked, lambda j: 7)


def test_profile_worked(worked):
    rows = {r.x: r for r in profile(worked)}
    assert max(r.queries for r in rows.values()) == 3
    assert {x for x, r in rows.items() if r.queries == 3} == {"0000", "0001"}
    assert max(r.sum_sqrt_p for r in rows.values()) == 2.0
    assert rows["1111"].p == (1, 1)
    # hand trace of every path
    assert {x: r.p for x, r in rows.items()} == {
        "0000": (), "0001": (3,), "0011": (2,), "0111": (1,), "1111": (1, 1),
    }


def test_profile_full_cube():
    C = ["00", "01", "10", "11"]
    for r in profile(C):
        assert r.queries <= 2 and sum(r.p) <= 2


def test_profile_singleton():
    (row,) = profile(["1"])
    assert row.queries == 0 and row.p == () and row.T == (0,)


def test_bad_inputs():
    with pytest.raises(InvalidInputError):
        build_tree(["01", "0"])
    with pytest.raises(InvalidInputError):
        build_tree([])


@pytest.mark.parametrize("seed", range(25))
def test_matches_independent_simulation(seed):
    n = 3 + seed % 6
    C = random_candidates(n, min(2 ** n, 2 + (seed * 7) % 30), seed)
    inst = build_instance(C)
    for x in C:
        queried, mism, sizes, found = simulate(C, x)
        st_ = evaluate(inst.tree, inst.coloring, x)
        assert found == x == st_.label
        assert [inst.tree[v].index for v, _, _ in st_.edges] == queried
        assert list(st_.mismatches) == mism
        for a, b, p in zip(sizes, sizes[1:], mism):
            assert b * max(2, p) <= a


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7).flatmap(
    lambda n: st.sets(st.text("01", min_size=n, max_size=n), min_size=1, max_size=min(2 ** n, 40))
).map(sorted))
def test_invariants_random(C):
    inst = build_instance(C)
    n, m = inst.n, inst.m
    assert len(inst.tree.leaves()) == m
    for x in C:
        got, tr = identify(C, string_oracle(x))
        assert got == x
        idx = [r.index for r in tr]
        assert len(set(idx)) == len(idx) <= n
        st_ = evaluate(inst.tree, inst.coloring, x)
        assert st_.queries == len(tr)
        con1, con2 = path_constraints(st_, n, m)
        assert con1 and con2
        assert phase_shrink_ok(inst, st_)


def test_walk_profiles_matches_tree():
    C = random_candidates(7, 50, 3)
    inst = build_instance(C)
    walked = {x: (p, runs) for x, p, runs in walk_profiles(C)}
    assert set(walked) == set(C)
    for x in C:
        st_ = evaluate(inst.tree, inst.coloring, x)
        assert walked[x] == (st_.mismatches, st_.runs)


def test_linking_against_optimizer():
    from spanoip.bound import optimal_profile

    for seed in range(10):
        C = random_candidates(8, 20 + seed, seed)
        best = max(r.sum_sqrt_p for r in profile(C))
        assert best <= optimal_profile(8, len(C)).opt_value + 1e-12
