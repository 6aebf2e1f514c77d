"""Binary decision trees with guessing colorings.

A tree is an explicit list of vertices with dense integer ids. Internal
vertices query a 1-based index of the input string and have one child per
observed bit; leaves carry an opaque output label. A :class:`GColoring`
marks, for every internal vertex, which of its two out-edges is the guess
(black); the other is red.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable

from ._validation import as_bitstring
from .exceptions import InvalidInputError

BLACK = "black"
RED = "red"
COLORS = (BLACK, RED)


@dataclass(frozen=True)
class Node:
    id: int
    index: int | None = None  # 1-based query index; None for leaves
    children: tuple[int, int] | None = None
    label: Hashable = None

    @property
    def is_leaf(self) -> bool:
        return self.children is None


@dataclass(frozen=True)
class DecisionTree:
    nodes: tuple[Node, ...]
    root: int = 0

    def __len__(self):
        return len(self.nodes)

    def __getitem__(self, v: int) -> Node:
        return self.nodes[v]

    def internal(self):
        return [node.id for node in self.nodes if not node.is_leaf]

    def leaves(self):
        return [node.id for node in self.nodes if node.is_leaf]

    def child(self, v: int, q: int) -> int:
        """N(v, q)."""
        return self.nodes[v].children[q]

    def max_index(self) -> int:
        return max((node.index for node in self.nodes if not node.is_leaf), default=0)


@dataclass(frozen=True)
class GColoring:
    colors: dict = field(default_factory=dict)  # (vertex, q) -> BLACK | RED

    def __call__(self, v: int, q: int) -> str:
        return self.colors[(v, q)]

    def guess(self, v: int) -> int:
        """The query value predicted at ``v`` (the black out-edge)."""
        return 0 if self.colors[(v, 0)] == BLACK else 1


class TreeBuilder:
    """Mutable helper that assigns ids in construction order."""

    def __init__(self):
        self._nodes: list[dict] = []
        self._colors: dict = {}

    def query(self, index: int) -> int:
        self._nodes.append({"index": index, "children": [None, None], "label": None})
        return len(self._nodes) - 1

    def leaf(self, label) -> int:
        self._nodes.append({"index": None, "children": None, "label": label})
        return len(self._nodes) - 1

    def connect(self, v: int, q: int, w: int, color: str) -> None:
        self._nodes[v]["children"][q] = w
        self._colors[(v, q)] = color

    def build(self, root: int = 0) -> tuple[DecisionTree, GColoring]:
        nodes = []
        for i, d in enumerate(self._nodes):
            ch = None if d["children"] is None else tuple(d["children"])
            nodes.append(Node(i, d["index"], ch, d["label"]))
        return DecisionTree(tuple(nodes), root), GColoring(dict(self._colors))


@dataclass(frozen=True)
class PathStats:
    """Segment statistics of the root-leaf path followed by one input."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, str], ...]  # (v, q, color)
    red_count: int  # G_x
    runs: tuple[int, ...]  # T_{0,x}, ..., T_{G_x,x}
    mismatches: tuple[int, ...]  # p_1, ..., p_{G_x}
    label: Hashable

    @property
    def leaf(self) -> int:
        return self.vertices[-1]

    @property
    def queries(self) -> int:
        return len(self.edges)

    @property
    def trailing(self) -> int:
        return self.runs[-1]


def validate(tree: DecisionTree, coloring: GColoring) -> list[str]:
    """Return a list of diagnostics; empty iff tree and coloring are well formed."""
    diags: list[str] = []
    nv = len(tree.nodes)
    if nv == 0:
        return ["tree has no vertices"]
    if not 0 <= tree.root < nv:
        return [f"root {tree.root} is not a vertex"]
    parents: dict[int, list[int]] = {}
    for i, node in enumerate(tree.nodes):
        if node.id != i:
            diags.append(f"vertex at position {i} has id {node.id}")
        if node.is_leaf:
            if node.index is not None:
                diags.append(f"leaf {i} carries a query index")
            continue
        if not isinstance(node.index, int) or node.index < 1:
            diags.append(f"vertex {i} has invalid query index {node.index!r}")
        if len(node.children) != 2:
            diags.append(f"vertex {i} does not have exactly two children")
            continue
        for q, w in enumerate(node.children):
            if w is None or not 0 <= w < nv:
                diags.append(f"vertex {i} child{q} {w!r} is not a vertex")
                continue
            parents.setdefault(w, []).append(i)
        cols = [coloring.colors.get((i, q)) for q in (0, 1)]
        for q, c in enumerate(cols):
            if c not in COLORS:
                diags.append(f"vertex {i} edge {q} has no valid color ({c!r})")
        if cols.count(BLACK) == 2:
            diags.append(f"two black out-edges at vertex {i}")
        elif cols.count(BLACK) == 0 and all(c in COLORS for c in cols):
            diags.append(f"no black out-edge at vertex {i}")
    if tree.root in parents:
        diags.append(f"root {tree.root} has a parent")
    for w, ps in parents.items():
        if len(ps) > 1:
            diags.append(f"vertex {w} has {len(ps)} parents")
    # reachability / cycle detection
    seen = set()
    stack = [tree.root]
    while stack:
        v = stack.pop()
        if v in seen:
            diags.append(f"cycle or shared subtree through vertex {v}")
            continue
        seen.add(v)
        node = tree.nodes[v]
        if not node.is_leaf and len(node.children) == 2:
            stack.extend(w for w in node.children if w is not None and 0 <= w < nv)
    unreachable = sorted(set(range(nv)) - seen)
    if unreachable:
        diags.append(f"unreachable vertices: {unreachable}")
    for (v, q) in coloring.colors:
        if not 0 <= v < nv or tree.nodes[v].is_leaf or q not in (0, 1):
            diags.append(f"coloring entry ({v}, {q}) is not an edge")
    return diags


def evaluate(tree: DecisionTree, coloring: GColoring, x) -> PathStats:
    """Follow input ``x`` from the root to a leaf and collect segment statistics."""
    x = as_bitstring(x)
    v = tree.root
    vertices = [v]
    edges = []
    runs = [0]
    mismatches = []
    while not tree.nodes[v].is_leaf:
        j = tree.nodes[v].index
        if j > len(x):
            raise InvalidInputError(f"vertex {v} queries index {j} but input has length {len(x)}")
        q = int(x[j - 1])
        color = coloring(v, q)
        edges.append((v, q, color))
        if color == BLACK:
            runs[-1] += 1
        else:
            mismatches.append(runs[-1] + 1)
            runs.append(0)
        v = tree.child(v, q)
        vertices.append(v)
    return PathStats(
        vertices=tuple(vertices),
        edges=tuple(edges),
        red_count=len(mismatches),
        runs=tuple(runs),
        mismatches=tuple(mismatches),
        label=tree.nodes[v].label,
    )


def b_values(tree: DecisionTree, coloring: GColoring) -> dict[int, int]:
    """Black edges since the last red edge on the root path, per vertex."""
    b = {tree.root: 0}
    queue = deque([tree.root])
    while queue:
        v = queue.popleft()
        node = tree.nodes[v]
        if node.is_leaf:
            continue
        for q, w in enumerate(node.children):
            b[w] = b[v] + 1 if coloring(v, q) == BLACK else 0
            queue.append(w)
    return b


def tree_bounds(tree: DecisionTree, coloring: GColoring) -> tuple[int, int]:
    """(depth T, maximum number of red edges G) over all root-leaf paths."""
    depth = reds = 0
    stack = [(tree.root, 0, 0)]
    while stack:
        v, d, r = stack.pop()
        node = tree.nodes[v]
        if node.is_leaf:
            depth = max(depth, d)
            reds = max(reds, r)
            continue
        for q, w in enumerate(node.children):
            stack.append((w, d + 1, r + (coloring(v, q) == RED)))
    return depth, reds


def root_leaf_paths(tree: DecisionTree, coloring: GColoring):
    """Yield ``(vertices, edges)`` for every root-leaf path, in leaf-id order."""
    stack = [(tree.root, (tree.root,), ())]
    out = []
    while stack:
        v, verts, edges = stack.pop()
        node = tree.nodes[v]
        if node.is_leaf:
            out.append((verts, edges))
            continue
        for q, w in enumerate(node.children):
            stack.append((w, verts + (w,), edges + ((v, q, coloring(v, q)),)))
    out.sort(key=lambda item: item[0][-1])
    return out


# -- serialization -----------------------------------------------------------

def to_dict(tree: DecisionTree, coloring: GColoring) -> dict[str, Any]:
    nodes = []
    for node in tree.nodes:
        if node.is_leaf:
            nodes.append({"id": node.id, "kind": "leaf", "label": node.label})
        else:
            nodes.append({
                "id": node.id,
                "kind": "query",
                "index": node.index,
                "child0": node.children[0],
                "child1": node.children[1],
                "color0": coloring.colors.get((node.id, 0)),
                "color1": coloring.colors.get((node.id, 1)),
            })
    return {"root": tree.root, "nodes": nodes}


def to_json(tree: DecisionTree, coloring: GColoring, indent: int | None = None) -> str:
    return json.dumps(to_dict(tree, coloring), indent=indent)


def from_dict(doc: dict) -> tuple[DecisionTree, GColoring]:
    """Inverse of :func:`to_dict`. Structural problems are left for :func:`validate`."""
    try:
        raw = sorted(doc["nodes"], key=lambda d: d["id"])
        nodes = []
        colors = {}
        for d in raw:
            if d["kind"] == "leaf":
                nodes.append(Node(d["id"], None, None, d.get("label")))
            elif d["kind"] == "query":
                nodes.append(Node(d["id"], d["index"], (d["child0"], d["child1"])))
                for q in (0, 1):
                    if d.get(f"color{q}") is not None:
                        colors[(d["id"], q)] = d[f"color{q}"]
            else:
                raise InvalidInputError(f"unknown node kind {d['kind']!r}")
        return DecisionTree(tuple(nodes), doc["root"]), GColoring(colors)
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed tree document: {exc}") from exc


def from_json(text: str) -> tuple[DecisionTree, GColoring]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON: {exc}") from exc
    return from_dict(doc)


# -- example trees -----------------------------------------------------------

def single_query_tree(index: int = 1, guess: int = 0):
    """Root queries ``index``; both children are leaves labelled by the bit seen."""
    tb = TreeBuilder()
    r = tb.query(index)
    for q in (0, 1):
        tb.connect(r, q, tb.leaf(q), BLACK if q == guess else RED)
    return tb.build(r)


def or_tree(n: int):
    """Chain querying 1..n, guessing 0; the first 1 jumps (red) to leaf 1."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    tb = TreeBuilder()
    root = v = tb.query(1)
    for j in range(1, n + 1):
        tb.connect(v, 1, tb.leaf(1), RED)
        nxt = tb.query(j + 1) if j < n else tb.leaf(0)
        tb.connect(v, 0, nxt, BLACK)
        v = nxt
    return tb.build(root)


def two_zeroes_tree(n: int):
    """Outputs 1 iff the input has at least two 0s; guesses 1 at every query.

    Queries indices 1..n in order and stops as soon as the second 0 is seen.
    """
    if n < 1:
        raise InvalidInputError("n must be positive")
    tb = TreeBuilder()

    def grow(j, zeros):
        if zeros == 2:
            return tb.leaf(1)
        if j > n:
            return tb.leaf(0)
        v = tb.query(j)
        tb.connect(v, 1, grow(j + 1, zeros), BLACK)
        tb.connect(v, 0, grow(j + 1, zeros + 1), RED)
        return v

    root = grow(1, 0)
    return tb.build(root)
