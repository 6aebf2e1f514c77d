"""Weighted span programs compiled from G-colored decision trees.

The vector space has one basis vector per tree vertex. Each leaf u gets the
target ``e_root - e_u``; each edge (v, q) contributes the input vector
``sqrt(w) * (e_v - e_{N(v,q)})`` to the group of index J(v) and value q, with
``w = W(color(v, q), b(v))``. An input x makes available the edges whose
label agrees with x at the queried index, which is exactly one out-edge per
vertex; the path of x then yields both witnesses in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_bitstring
from .decision_tree import BLACK, RED, DecisionTree, GColoring, PathStats, b_values, evaluate, tree_bounds
from .exceptions import InvalidInputError, MissingWeightError, WitnessError

RECONSTRUCTION_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-12
MEMBERSHIP_TOL = 1e-8
MAX_DENSE_DIM = 4096


@dataclass(frozen=True)
class WeightTable:
    red: tuple[float, ...]
    black: tuple[float, ...]

    def __post_init__(self):
        if len(self.red) != len(self.black):
            raise InvalidInputError("red and black weight lists differ in length")
        if any(not w > 0 for w in self.red + self.black):
            raise InvalidInputError("weights must be strictly positive")

    def __call__(self, color: str, b: int) -> float:
        table = self.black if color == BLACK else self.red
        if not 0 <= b < len(table):
            raise MissingWeightError(f"no weight for ({color}, b={b}); table covers b < {len(table)}")
        return table[b]

    @property
    def max_b(self) -> int:
        return len(self.red) - 1


def default_weights(t_max: int) -> WeightTable:
    """W(red, b) = sqrt(b+1) - sqrt(b) and W(black, b) = 1 / W(red, b), for b <= t_max."""
    if t_max < 0:
        raise InvalidInputError("t_max must be nonnegative")
    black = tuple(math.sqrt(b + 1) + math.sqrt(b) for b in range(t_max + 1))
    # 1/(sqrt(b+1)+sqrt(b)) avoids the cancellation in sqrt(b+1)-sqrt(b)
    red = tuple(1.0 / w for w in black)
    return WeightTable(red, black)


@dataclass(frozen=True, eq=False)
class SpanProgram:
    tree: DecisionTree
    coloring: GColoring
    weights: WeightTable
    b: dict
    # edge arrays, one entry per tree edge (v, q)
    tail: np.ndarray
    head: np.ndarray
    value: np.ndarray
    index: np.ndarray
    weight: np.ndarray
    red: np.ndarray
    edge_of: dict
    groups: dict  # (j, q) -> tuple of edge ids

    @property
    def dim(self) -> int:
        return len(self.tree.nodes)

    @property
    def root(self) -> int:
        return self.tree.root

    @property
    def leaves(self) -> list[int]:
        return self.tree.leaves()

    @property
    def n_edges(self) -> int:
        return len(self.tail)

    def target(self, u: int) -> np.ndarray:
        t = np.zeros(self.dim)
        t[self.root] += 1.0
        t[u] -= 1.0
        return t

    def vector(self, e: int) -> np.ndarray:
        vec = np.zeros(self.dim)
        r = math.sqrt(self.weight[e])
        vec[self.tail[e]] = r
        vec[self.head[e]] = -r
        return vec

    def available(self, x) -> np.ndarray:
        """Edge ids in I(x): edges (v, q) with q equal to x at J(v)."""
        x = as_bitstring(x)
        if self.n_edges and int(self.index.max()) > len(x):
            raise InvalidInputError(f"input of length {len(x)} is shorter than the largest query index")
        xs = np.frombuffer(x.encode("ascii"), dtype=np.uint8) - ord("0")
        return np.flatnonzero(xs[self.index - 1] == self.value)

    def matrix(self, edges) -> np.ndarray:
        """Dense ``dim x len(edges)`` matrix whose columns are the input vectors."""
        edges = np.asarray(edges, dtype=np.int64)
        a = np.zeros((self.dim, len(edges)))
        r = np.sqrt(self.weight[edges])
        cols = np.arange(len(edges))
        a[self.tail[edges], cols] = r
        a[self.head[edges], cols] = -r
        return a


def build(tree: DecisionTree, coloring: GColoring, weights: WeightTable | None = None) -> SpanProgram:
    """Compile a valid (tree, coloring) into its span program.

    ``weights`` defaults to :func:`default_weights` up to the tree depth.
    """
    if weights is None:
        weights = default_weights(tree_bounds(tree, coloring)[0])
    b = b_values(tree, coloring)
    tail, head, value, index, weight, red = [], [], [], [], [], []
    edge_of, groups = {}, {}
    for v in tree.internal():
        node = tree.nodes[v]
        for q in (0, 1):
            color = coloring(v, q)
            e = len(tail)
            tail.append(v)
            head.append(node.children[q])
            value.append(q)
            index.append(node.index)
            weight.append(weights(color, b[v]))
            red.append(color == RED)
            edge_of[(v, q)] = e
            groups.setdefault((node.index, q), []).append(e)
    return SpanProgram(
        tree=tree,
        coloring=coloring,
        weights=weights,
        b=b,
        tail=np.array(tail, dtype=np.int64),
        head=np.array(head, dtype=np.int64),
        value=np.array(value, dtype=np.uint8),
        index=np.array(index, dtype=np.int64),
        weight=np.array(weight, dtype=float),
        red=np.array(red, dtype=bool),
        edge_of=edge_of,
        groups={k: tuple(v) for k, v in sorted(groups.items())},
    )


@dataclass(frozen=True)
class PositiveWitness:
    leaf: int
    coefficients: dict  # edge id -> coefficient
    wsize: float
    residual: float


@dataclass(frozen=True)
class NegativeWitness:
    vector: np.ndarray  # 0/1 indicator of the path vertices
    wsize: float
    wsize_path_sum: float  # sum of w(v, 1 - x_J(v)) over path vertices
    max_orthogonality: float
    target_overlaps: dict  # leaf -> <w, t_leaf> (integer)


def positive_witness(sp: SpanProgram, x, tol: float = RECONSTRUCTION_TOL) -> PositiveWitness:
    """Coefficient 1/sqrt(w) on every path edge; checks that they rebuild the target."""
    stats = evaluate(sp.tree, sp.coloring, x)
    coeffs = {}
    acc = np.zeros(sp.dim)
    for v, q, _ in stats.edges:
        e = sp.edge_of[(v, q)]
        c = 1.0 / math.sqrt(sp.weight[e])
        coeffs[e] = c
        acc += c * sp.vector(e)
    residual = float(np.linalg.norm(acc - sp.target(stats.leaf)))
    if residual > tol:
        raise WitnessError(f"positive witness for {x} misses its target by {residual:.3g}")
    wsize = math.fsum(c * c for c in coeffs.values())
    return PositiveWitness(stats.leaf, coeffs, wsize, residual)


def negative_witness(sp: SpanProgram, x, tol: float = ORTHOGONALITY_TOL) -> NegativeWitness:
    """Indicator of the path vertices, orthogonal to every available vector."""
    stats = evaluate(sp.tree, sp.coloring, x)
    w = np.zeros(sp.dim, dtype=np.int64)
    w[list(stats.vertices)] = 1
    # unweighted overlaps are exact integers
    diff = w[sp.tail] - w[sp.head]
    avail = sp.available(x)
    if np.any(diff[avail] != 0):
        raise WitnessError(f"negative witness for {x} overlaps an available vector")
    wf = w.astype(float)
    weighted = np.sqrt(sp.weight) * (wf[sp.tail] - wf[sp.head])
    max_orth = float(np.max(np.abs(weighted[avail]), initial=0.0))
    if max_orth > tol:
        raise WitnessError(f"negative witness for {x} fails orthogonality by {max_orth:.3g}")
    overlaps = {u: int(w[sp.root] - w[u]) for u in sp.leaves}
    wsize = math.fsum(weighted ** 2)
    path_sum = math.fsum(
        sp.weight[sp.edge_of[(v, 1 - q)]] for v, q, _ in stats.edges
    )
    return NegativeWitness(w, wsize, path_sum, max_orth, overlaps)


def wsize_formulas(stats: PathStats, weights: WeightTable) -> tuple[float, float]:
    """Segment sums over g = 0..G_x, including a red (resp. black) term for every segment.

    plus  = sum_g [ 1/W(red, T_g) + sum_{b < T_g} 1/W(black, b) ]
    minus = sum_g [ W(black, T_g) + sum_{b < T_g} W(red, b) ]
    """
    plus, minus = [], []
    for t in stats.runs:
        plus.append(1.0 / weights(RED, t))
        minus.append(weights(BLACK, t))
        for b in range(t):
            plus.append(1.0 / weights(BLACK, b))
            minus.append(weights(RED, b))
    return math.fsum(plus), math.fsum(minus)


def terminal_terms(stats: PathStats, weights: WeightTable) -> tuple[float, float]:
    """Terms for the last segment that have no edge on a path ending in a leaf."""
    t = stats.trailing
    return 1.0 / weights(RED, t), weights(BLACK, t)


def segment_sum(stats: PathStats) -> float:
    """sum_g sqrt(T_g + 1)."""
    return math.fsum(math.sqrt(t + 1) for t in stats.runs)


def membership_residuals(sp: SpanProgram, x, max_dim: int = MAX_DENSE_DIM) -> dict:
    """Least-squares distance from every target to span(I(x)), keyed by leaf."""
    if sp.dim > max_dim:
        raise InvalidInputError(f"program dimension {sp.dim} exceeds dense limit {max_dim}")
    a = sp.matrix(sp.available(x))
    leaves = sp.leaves
    targets = np.zeros((sp.dim, len(leaves)))
    targets[sp.root, :] += 1.0
    targets[leaves, np.arange(len(leaves))] -= 1.0
    if a.shape[1] == 0:
        res = np.linalg.norm(targets, axis=0)
    else:
        coef, *_ = np.linalg.lstsq(a, targets, rcond=None)
        res = np.linalg.norm(a @ coef - targets, axis=0)
    return {u: float(r) for u, r in zip(leaves, res)}


def membership_check(sp: SpanProgram, x, alpha: int, max_dim: int = MAX_DENSE_DIM,
                     tol: float = MEMBERSHIP_TOL) -> tuple[bool, float]:
    """Is the target of leaf ``alpha`` in span(I(x))? Returns (member, residual)."""
    if alpha not in set(sp.leaves):
        raise InvalidInputError(f"vertex {alpha} is not a leaf")
    r = membership_residuals(sp, x, max_dim)[alpha]
    return r <= tol, r


@dataclass(frozen=True)
class WitnessReport:
    x: str
    leaf: int
    stats: PathStats
    wsize_plus_exact: float
    wsize_plus_formula: float
    wsize_minus_exact: float
    wsize_minus_formula: float
    wsize_minus_path_sum: float
    reconstruction_residual: float
    max_orthogonality_violation: float
    target_overlaps_ok: bool
    uniqueness_residuals: dict | None  # leaf -> residual, non-matching leaves only
    member_residual: float | None


def witness_report(sp: SpanProgram, x, membership: bool = True, max_dim: int = MAX_DENSE_DIM,
                   reconstruction_tol: float = RECONSTRUCTION_TOL,
                   orthogonality_tol: float = ORTHOGONALITY_TOL) -> WitnessReport:
    x = as_bitstring(x)
    stats = evaluate(sp.tree, sp.coloring, x)
    pos = positive_witness(sp, x, reconstruction_tol)
    neg = negative_witness(sp, x, orthogonality_tol)
    fplus, fminus = wsize_formulas(stats, sp.weights)
    overlaps_ok = all(val == 1 for u, val in neg.target_overlaps.items() if u != stats.leaf)
    uniq = member = None
    if membership and sp.dim <= max_dim:
        res = membership_residuals(sp, x, max_dim)
        member = res[stats.leaf]
        uniq = {u: r for u, r in res.items() if u != stats.leaf}
    return WitnessReport(
        x=x,
        leaf=stats.leaf,
        stats=stats,
        wsize_plus_exact=pos.wsize,
        wsize_plus_formula=fplus,
        wsize_minus_exact=neg.wsize,
        wsize_minus_formula=fminus,
        wsize_minus_path_sum=neg.wsize_path_sum,
        reconstruction_residual=pos.residual,
        max_orthogonality_violation=neg.max_orthogonality,
        target_overlaps_ok=overlaps_ok,
        uniqueness_residuals=uniq,
        member_residual=member,
    )


@dataclass(frozen=True)
class Complexity:
    wsize: float
    wsize_formula: float
    max_plus_exact: float
    max_minus_exact: float
    max_plus_formula: float
    max_minus_formula: float
    segment_bound: float  # 3 * max_x sum_g sqrt(T_g + 1)


def complexity(sp: SpanProgram, domain) -> Complexity:
    """wsize = sqrt(max_x wsize+(x) * max_x wsize-(x)) over ``domain``, with the formula variant."""
    domain = list(domain)
    if not domain:
        raise InvalidInputError("domain is empty")
    pe, me, pf, mf, tb = [], [], [], [], []
    for x in domain:
        stats = evaluate(sp.tree, sp.coloring, x)
        pe.append(positive_witness(sp, x).wsize)
        me.append(negative_witness(sp, x).wsize)
        fp, fm = wsize_formulas(stats, sp.weights)
        pf.append(fp)
        mf.append(fm)
        tb.append(segment_sum(stats))
    return Complexity(
        wsize=math.sqrt(max(pe) * max(me)),
        wsize_formula=math.sqrt(max(pf) * max(mf)),
        max_plus_exact=max(pe),
        max_minus_exact=max(me),
        max_plus_formula=max(pf),
        max_minus_formula=max(mf),
        segment_bound=3.0 * max(tb),
    )


def path_wsizes(mismatches, runs, weights: WeightTable) -> tuple[float, float]:
    """Edge-wise wsize+/wsize- of a path given only its segment lengths.

    Equals the exact witness sizes of the tree path with those statistics;
    lets large instances be scored without building the span program.
    """
    plus, minus = [], []
    for g, t in enumerate(runs):
        for b in range(t):
            plus.append(1.0 / weights(BLACK, b))
            minus.append(weights(RED, b))
        if g < len(mismatches):
            plus.append(1.0 / weights(RED, t))
            minus.append(weights(BLACK, t))
    return math.fsum(plus), math.fsum(minus)
