"""Decision trees over a stump class: evaluation, surrogate, stacking, I/O.

A tree is a full binary tree whose internal nodes reference hypothesis
indices of an :class:`~treelucid.instance.Instance` and whose leaves hold
0/1 labels. Routing convention (fixed so serialized trees are portable):
a stump value of 1 sends the point to the *left* child.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import ArityError, SizeCapError, StructuralError
from .instance import Distribution, Instance, iter_bits

DEFAULT_NODE_CAP = 1 << 22


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Internal:
    hyp: int
    left: int
    right: int


Node = Union[Leaf, Internal]


@dataclass(frozen=True)
class DecisionTree:
    nodes: Tuple[Node, ...]
    root: int = 0

    def __post_init__(self):
        _validate(self.nodes, self.root)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def is_leaf(self) -> bool:
        return isinstance(self.nodes[self.root], Leaf)


def _validate(nodes: Sequence[Node], root: int) -> None:
    n = len(nodes)
    if not 0 <= root < n:
        raise StructuralError(f"root index {root} out of range")
    seen = set()
    stack = [root]
    while stack:
        i = stack.pop()
        if i in seen:
            raise StructuralError(f"node {i} reachable more than once (not a tree)")
        seen.add(i)
        node = nodes[i]
        if isinstance(node, Internal):
            for child in (node.left, node.right):
                if not 0 <= child < n:
                    raise StructuralError(f"child index {child} out of range")
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Leaf):
            if node.label not in (0, 1):
                raise StructuralError(f"leaf label must be 0/1, got {node.label!r}")
        else:
            raise StructuralError(f"unknown node type {type(node).__name__}")
    if len(seen) != n:
        raise StructuralError("unreachable nodes present")


# ---------------------------------------------------------------------------
# Construction helpers

Nested = Union[Tuple[str, int], Tuple[int, "Nested", "Nested"]]


def leaf_tree(label: int) -> DecisionTree:
    return DecisionTree((Leaf(label),))


def stump_tree(hyp: int, left_label: int, right_label: int) -> DecisionTree:
    return DecisionTree((Internal(hyp, 1, 2), Leaf(left_label), Leaf(right_label)))


def tree_from_nested(nested) -> DecisionTree:
    """Build from ``("leaf", b)`` / ``(hyp, left_nested, right_nested)`` tuples."""
    nodes: List[Node] = []

    def build(spec) -> int:
        if spec[0] == "leaf":
            nodes.append(Leaf(int(spec[1])))
            return len(nodes) - 1
        hyp, l_spec, r_spec = spec
        idx = len(nodes)
        nodes.append(None)  # placeholder
        l = build(l_spec)
        r = build(r_spec)
        nodes[idx] = Internal(int(hyp), l, r)
        return idx

    build(nested)
    return DecisionTree(tuple(nodes), 0)


# ---------------------------------------------------------------------------
# Core operations


def depth(tree: DecisionTree) -> int:
    """Longest root-to-leaf edge count."""

    def rec(i: int) -> int:
        node = tree.nodes[i]
        if isinstance(node, Leaf):
            return 0
        return 1 + max(rec(node.left), rec(node.right))

    return rec(tree.root)


def evaluate(tree: DecisionTree, point: int, inst: Instance) -> int:
    if not 0 <= point < inst.n_points:
        raise StructuralError(f"point index {point} out of range")
    i = tree.root
    while True:
        node = tree.nodes[i]
        if isinstance(node, Leaf):
            return node.label
        h = inst.hyp_mask(node.hyp)
        i = node.left if (h >> point) & 1 else node.right


def behavior_of(tree: DecisionTree, inst: Instance) -> int:
    """Bitmask of the tree's induced classifier over the whole domain."""
    full = inst.full_mask

    def rec(i: int) -> int:
        node = tree.nodes[i]
        if isinstance(node, Leaf):
            return full if node.label else 0
        h = inst.hyp_mask(node.hyp)
        return (h & rec(node.left)) | (~h & full & rec(node.right))

    return rec(tree.root)


def leaf_regions(tree: DecisionTree, inst: Instance) -> List[Tuple[int, int, int]]:
    """(node_index, region_mask, label) for every leaf; regions partition X."""
    out = []

    def rec(i: int, region: int) -> None:
        node = tree.nodes[i]
        if isinstance(node, Leaf):
            out.append((i, region, node.label))
            return
        h = inst.hyp_mask(node.hyp)
        rec(node.left, region & h)
        rec(node.right, region & ~h & inst.full_mask)

    rec(tree.root, inst.full_mask)
    return out


def gini_sqrt(q: float) -> float:
    """Surrogate impurity G(q) = sqrt(q (1-q)); peaks at 1/2, zero at purity."""
    q = float(q)
    return math.sqrt(max(q * (1.0 - q), 0.0))


def surrogate(tree: DecisionTree, inst: Instance, dist: Distribution) -> float:
    """Sum over leaves of P(leaf) * G(P(c=1 | leaf)); zero-mass leaves contribute 0."""
    total = 0.0
    for _, region, _ in leaf_regions(tree, inst):
        w = dist.mass(region)
        if w <= 0:
            continue
        p = dist.mass(region & inst.concept_mask) / w
        total += float(w) * gini_sqrt(float(p))
    return total


# ---------------------------------------------------------------------------
# Majority stacking


def _count_leaves(tree: DecisionTree) -> int:
    return sum(1 for node in tree.nodes if isinstance(node, Leaf))


def stack_majority(
    trees: Sequence[DecisionTree], node_cap: int = DEFAULT_NODE_CAP
) -> DecisionTree:
    """Sequential composition whose leaves vote over the constituents.

    Each leaf of the first tree is replaced by a copy of the second, and so
    on; the final leaf label is the majority of the constituent-leaf labels
    along the path, ties resolving to 0. Depth is exactly the sum of the
    constituent depths.
    """
    if not trees:
        raise ArityError("stack_majority needs at least one tree")

    # Exact node count of the product tree, innermost first.
    size = 1
    for t in reversed(trees):
        internal = t.n_nodes - _count_leaves(t)
        size = internal + _count_leaves(t) * size
    if size > node_cap:
        raise SizeCapError(f"stacked tree would have {size} nodes (cap {node_cap})")

    nodes: List[Node] = []

    def build(level: int, src: int, labels: Tuple[int, ...]) -> int:
        tree = trees[level]
        node = tree.nodes[src]
        if isinstance(node, Internal):
            idx = len(nodes)
            nodes.append(None)
            l = build(level, node.left, labels)
            r = build(level, node.right, labels)
            nodes[idx] = Internal(node.hyp, l, r)
            return idx
        labels = labels + (node.label,)
        if level + 1 < len(trees):
            return build(level + 1, trees[level + 1].root, labels)
        vote = 1 if sum(labels) * 2 > len(labels) else 0
        nodes.append(Leaf(vote))
        return len(nodes) - 1

    root = build(0, trees[0].root, ())
    return DecisionTree(tuple(nodes), root)


# ---------------------------------------------------------------------------
# Serialization


def to_json(tree: DecisionTree) -> str:
    out = []
    for node in tree.nodes:
        if isinstance(node, Leaf):
            out.append({"leaf": node.label})
        else:
            out.append({"h": node.hyp, "l": node.left, "r": node.right})
    return json.dumps({"nodes": out, "root": tree.root})


def from_json(text: str) -> DecisionTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(
            f"invalid tree JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        nodes: List[Node] = []
        for entry in doc["nodes"]:
            if "leaf" in entry:
                nodes.append(Leaf(int(entry["leaf"])))
            else:
                nodes.append(Internal(int(entry["h"]), int(entry["l"]), int(entry["r"])))
        return DecisionTree(tuple(nodes), int(doc["root"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"malformed tree JSON: {exc}") from exc


def to_dot(tree: DecisionTree, inst: Optional[Instance] = None) -> str:
    """Graphviz rendering; internal nodes show hypothesis names when available."""
    lines = ["digraph tree {", "  node [shape=box];"]
    for i, node in enumerate(tree.nodes):
        if isinstance(node, Leaf):
            lines.append(f'  n{i} [shape=ellipse, label="{node.label}"];')
        else:
            if inst is not None and 0 <= node.hyp < inst.n_hypotheses:
                name = inst.hypotheses[node.hyp].name
            else:
                name = f"h{node.hyp}"
            label = name.replace('"', r"\"")
            lines.append(f'  n{i} [label="{label}"];')
            lines.append(f'  n{i} -> n{node.left} [label="1"];')
            lines.append(f'  n{i} -> n{node.right} [label="0"];')
    lines.append("}")
    return "\n".join(lines)
