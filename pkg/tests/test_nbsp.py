import math

import numpy as np
import pytest

from spanoip import nbsp
from spanoip.decision_tree import BLACK, RED, evaluate, or_tree, two_zeroes_tree
from spanoip.exceptions import InvalidInputError, MissingWeightError
from spanoip.instances import random_candidates
from spanoip.oip import build_instance

from conftest import all_inputs

SQ2, SQ3 = math.sqrt(2), math.sqrt(3)


def component_residuals(sp, x):
    """Distance of each target to span(I(x)) from the available-edge forest alone.

    span{e_v - e_w : available edges} is the set of vectors summing to zero
    on every connected component, so the residual of t is
    sqrt(sum_comp (sum_{v in comp} t_v)^2 / |comp|).
    """
    parent = list(range(sp.dim))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in sp.available(x):
        parent[find(sp.tail[e])] = find(sp.head[e])
    sizes = {}
    for v in range(sp.dim):
        sizes[find(v)] = sizes.get(find(v), 0) + 1
    out = {}
    for u in sp.leaves:
        sums = {}
        for v, val in ((sp.root, 1.0), (u, -1.0)):
            sums[find(v)] = sums.get(find(v), 0.0) + val
        out[u] = math.sqrt(sum(s * s / sizes[c] for c, s in sums.items()))
    return out


def test_default_weights_values():
    w = nbsp.default_weights(5)
    assert w(RED, 0) == 1.0 and w(BLACK, 0) == 1.0
    assert w(RED, 3) == pytest.approx(2 - SQ3, rel=1e-14)
    assert w(BLACK, 3) == pytest.approx(2 + SQ3, rel=1e-14)
    assert round(w(RED, 3), 5) == 0.26795 and round(w(BLACK, 3), 5) == 3.73205
    for b in range(6):
        assert w(RED, b) * w(BLACK, b) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(MissingWeightError):
        w(RED, 6)


@pytest.mark.parametrize("t", range(0, 70))
def test_telescoping(t):
    w = nbsp.default_weights(max(t, 1))
    assert abs(math.fsum(w.red[:t]) - math.sqrt(t)) <= 1e-12
    assert abs(math.fsum(1 / v for v in w.black[:t]) - math.sqrt(t)) <= 1e-12


def test_weight_table_rejects_nonpositive():
    with pytest.raises(InvalidInputError):
        nbsp.WeightTable((1.0, 0.0), (1.0, 1.0))


def test_build_counts(single, or3, worked):
    sp = nbsp.build(*single)
    assert sp.dim == 3 and len(sp.leaves) == 2 and sp.n_edges == 2
    for e in range(sp.n_edges):
        assert np.dot(sp.vector(e), sp.vector(e)) == pytest.approx(2 * sp.weight[e])
    sp = nbsp.build(*or3)
    assert (sp.dim, len(sp.leaves), sp.n_edges) == (7, 4, 6)
    inst = build_instance(worked)
    assert len(nbsp.build(inst.tree, inst.coloring).leaves) == 5


def test_groups_partition_edges(two_zeroes5):
    sp = nbsp.build(*two_zeroes5)
    ids = sorted(e for g in sp.groups.values() for e in g)
    assert ids == list(range(sp.n_edges))
    for (j, q), edges in sp.groups.items():
        assert all(sp.index[e] == j and sp.value[e] == q for e in edges)


def test_available_is_one_out_edge_per_vertex(two_zeroes5):
    tree, coloring = two_zeroes5
    sp = nbsp.build(tree, coloring)
    for x in all_inputs(5):
        avail = sp.available(x)
        assert sorted(sp.tail[avail]) == sorted(tree.internal())
        for e in avail:
            assert sp.value[e] == int(x[sp.index[e] - 1])


def test_missing_weight(or3):
    with pytest.raises(MissingWeightError):
        nbsp.build(*or3, weights=nbsp.default_weights(1))


def test_positive_witness_single(single):
    sp = nbsp.build(*single)
    pos = nbsp.positive_witness(sp, "0")
    assert list(pos.coefficients.values()) == [1.0]
    assert pos.wsize == 1.0
    assert nbsp.positive_witness(sp, "1").wsize == 1.0


def test_positive_witness_or_001(or3):
    sp = nbsp.build(*or3)
    # 1/W(black,0) + 1/W(black,1) + 1/W(red,2) = 1 + (sqrt2 - 1) + (sqrt3 + sqrt2)
    expected = 1 + (SQ2 - 1) + (SQ3 + SQ2)
    pos = nbsp.positive_witness(sp, "001")
    assert pos.wsize == pytest.approx(expected, rel=1e-12)
    assert pos.wsize == pytest.approx(4.56047793, abs=1e-8)
    assert pos.residual <= 1e-12


def test_negative_witness_examples(single, or3):
    sp = nbsp.build(*single)
    assert nbsp.negative_witness(sp, "0").wsize == pytest.approx(1.0)
    assert nbsp.negative_witness(sp, "1").wsize == pytest.approx(1.0)
    sp = nbsp.build(*or3)
    neg = nbsp.negative_witness(sp, "000")
    assert neg.wsize == pytest.approx(SQ3, rel=1e-12)
    assert neg.wsize == pytest.approx(neg.wsize_path_sum, rel=1e-12)
    leaf = evaluate(*or3, "000").leaf
    assert all(v == 1 for u, v in neg.target_overlaps.items() if u != leaf)
    assert neg.target_overlaps[leaf] == 0


def test_path_formulas_single(single):
    sp = nbsp.build(*single)
    st = evaluate(*single, "0")
    plus, minus = nbsp.wsize_formulas(st, sp.weights)
    assert plus == pytest.approx(2 + SQ2, rel=1e-12)
    assert plus - nbsp.terminal_terms(st, sp.weights)[0] == pytest.approx(1.0, rel=1e-12)
    st1 = evaluate(*single, "1")  # ends with a red edge into a leaf
    plus1, _ = nbsp.wsize_formulas(st1, sp.weights)
    assert plus1 - nbsp.positive_witness(sp, "1").wsize == pytest.approx(1.0, rel=1e-12)


def test_complexity_examples(single, or3):
    assert nbsp.complexity(nbsp.build(*single), ["0", "1"]).wsize == pytest.approx(1.0)
    sp = nbsp.build(*or3)
    comp = nbsp.complexity(sp, all_inputs(3))
    # max over x of sum_g sqrt(T_g + 1) is sqrt3 + 1 (x = 001)
    assert comp.segment_bound == pytest.approx(3 * (SQ3 + 1))
    assert comp.wsize <= comp.segment_bound
    assert comp.wsize == pytest.approx(2 * SQ2 + SQ3, rel=1e-12)
    with pytest.raises(InvalidInputError):
        nbsp.complexity(sp, [])


def test_complexity_worked(worked):
    inst = build_instance(worked)
    sp = nbsp.build(inst.tree, inst.coloring)
    comp = nbsp.complexity(sp, worked)
    best = max(nbsp.segment_sum(evaluate(inst.tree, inst.coloring, x)) for x in worked)
    assert math.isfinite(comp.wsize) and comp.wsize <= 3 * best


def test_membership_single(single):
    sp = nbsp.build(*single)
    leaf0 = evaluate(*single, "0").leaf
    leaf1 = evaluate(*single, "1").leaf
    ok, r = nbsp.membership_check(sp, "0", leaf0)
    assert ok and r <= 1e-9
    ok, r = nbsp.membership_check(sp, "0", leaf1)
    assert not ok and r >= 0.5 / SQ2
    with pytest.raises(InvalidInputError):
        nbsp.membership_check(sp, "0", sp.root)
    with pytest.raises(InvalidInputError):
        nbsp.membership_residuals(sp, "0", max_dim=2)


@pytest.mark.parametrize("tree_fn", [lambda: or_tree(5), lambda: two_zeroes_tree(5)])
def test_membership_matches_component_oracle(tree_fn):
    tree, coloring = tree_fn()
    sp = nbsp.build(tree, coloring)
    for x in all_inputs(5):
        lsq = nbsp.membership_residuals(sp, x)
        comb = component_residuals(sp, x)
        leaf = evaluate(tree, coloring, x).leaf
        for u in sp.leaves:
            assert lsq[u] == pytest.approx(comb[u], abs=1e-9)
            if u == leaf:
                assert lsq[u] <= 1e-9
            else:
                assert lsq[u] >= 0.5 / math.sqrt(5 + 1)


def test_membership_oip_component_oracle():
    C = random_candidates(7, 30, 11)
    inst = build_instance(C)
    sp = nbsp.build(inst.tree, inst.coloring)
    for x in C:
        lsq = nbsp.membership_residuals(sp, x)
        comb = component_residuals(sp, x)
        for u in sp.leaves:
            assert lsq[u] == pytest.approx(comb[u], abs=1e-9)


def test_path_wsizes_equal_exact():
    C = random_candidates(8, 60, 2)
    inst = build_instance(C)
    sp = nbsp.build(inst.tree, inst.coloring)
    for x in C:
        st = evaluate(inst.tree, inst.coloring, x)
        plus, minus = nbsp.path_wsizes(st.mismatches, st.runs, sp.weights)
        assert plus == pytest.approx(nbsp.positive_witness(sp, x).wsize, rel=1e-12)
        assert minus == pytest.approx(nbsp.negative_witness(sp, x).wsize, rel=1e-12)


def test_custom_weights_change_sizes_not_witnesses(or3):
    w = nbsp.WeightTable(red=(2.0, 2.0, 2.0, 2.0), black=(0.5, 0.5, 0.5, 0.5))
    sp = nbsp.build(*or3, weights=w)
    rep = nbsp.witness_report(sp, "010")
    assert rep.reconstruction_residual <= 1e-12
    # path: black(0.5), red(2.0) -> 1/0.5 + 1/2
    assert rep.wsize_plus_exact == pytest.approx(2.5)
    # off-path: red at first vertex (2.0), black at second (0.5)
    assert rep.wsize_minus_exact == pytest.approx(2.5)
