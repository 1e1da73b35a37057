"""Set-algebra expressions over the stump class and graded complexity measures.

An expression is built from hypothesis references, the constants empty/full,
and union/intersection/complement. A graded measure assigns cost 0 to the
generators and bounded increments to the connectives; trees convert into
expressions via A_v = (split ∩ A_left) ∪ (complement(split) ∩ A_right).
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union as TUnion

from .errors import PreconditionError, StructuralError
from .instance import Distribution, Instance, mask_loss
from .tree import DecisionTree, Internal, Leaf


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Hyp:
    index: int


@dataclass(frozen=True)
class Const:
    value: int  # 0 = empty set, 1 = whole domain

    def __post_init__(self):
        if self.value not in (0, 1):
            raise StructuralError("constant must be 0 or 1")


@dataclass(frozen=True)
class Union:
    left: "AlgebraExpr"
    right: "AlgebraExpr"


@dataclass(frozen=True)
class Inter:
    left: "AlgebraExpr"
    right: "AlgebraExpr"


@dataclass(frozen=True)
class Compl:
    arg: "AlgebraExpr"


AlgebraExpr = TUnion[Hyp, Const, Union, Inter, Compl]

EMPTY = Const(0)
FULL = Const(1)


def expr_mask(expr: AlgebraExpr, inst: Instance) -> int:
    """The expression's extension over the whole domain as a bitmask."""
    if isinstance(expr, Const):
        return inst.full_mask if expr.value else 0
    if isinstance(expr, Hyp):
        return inst.hyp_mask(expr.index)
    if isinstance(expr, Union):
        return expr_mask(expr.left, inst) | expr_mask(expr.right, inst)
    if isinstance(expr, Inter):
        return expr_mask(expr.left, inst) & expr_mask(expr.right, inst)
    if isinstance(expr, Compl):
        return ~expr_mask(expr.arg, inst) & inst.full_mask
    raise StructuralError(f"unknown expression node {type(expr).__name__}")


def eval_expr(expr: AlgebraExpr, point: int, inst: Instance) -> int:
    if not 0 <= point < inst.n_points:
        raise StructuralError(f"point index {point} out of range")
    return (expr_mask(expr, inst) >> point) & 1


def tree_to_algebra(tree: DecisionTree) -> AlgebraExpr:
    """Unsimplified set-algebra form of a tree's behavior.

    Internal node with split A and children expressions L, R becomes
    (A ∩ L) ∪ (complement(A) ∩ R); leaves become the constants.
    """

    def rec(i: int) -> AlgebraExpr:
        node = tree.nodes[i]
        if isinstance(node, Leaf):
            return FULL if node.label else EMPTY
        split = Hyp(node.hyp)
        return Union(
            Inter(split, rec(node.left)),
            Inter(Compl(split), rec(node.right)),
        )

    return rec(tree.root)


# ---------------------------------------------------------------------------
# Graded measures


@dataclass(frozen=True)
class GradedMeasure:
    """Rule table: generators cost 0, each connective adds a bounded increment.

    ``mode`` fixes how binary connectives combine child costs:
      * "sum":  cost(a op b) = step + cost(a) + cost(b)
      * "max":  cost(a op b) = step + max(cost(a), cost(b)); this satisfies
        the strengthened union axiom cost(a ∪ b) <= 1 + max(...), which
        ``strengthened`` declares
      * "zero": constantly zero (degenerate but axiom-satisfying)
    """

    name: str
    mode: str = "sum"
    step: int = 1
    strengthened: bool = False

    def __post_init__(self):
        if self.mode not in ("sum", "max", "zero"):
            raise PreconditionError(f"unknown measure mode {self.mode!r}")
        if self.step < 0 or self.step > 1:
            raise PreconditionError("step must be 0 or 1 to satisfy the axioms")


CONNECTIVE_COUNT = GradedMeasure("connective", mode="sum")
MAX_DEPTH_STYLE = GradedMeasure("maxdepth", mode="max", strengthened=True)
ZERO_MEASURE = GradedMeasure("zero", mode="zero", step=0)

MEASURES = {m.name: m for m in (CONNECTIVE_COUNT, MAX_DEPTH_STYLE, ZERO_MEASURE)}


def gamma_of(expr: AlgebraExpr, measure: GradedMeasure) -> int:
    if measure.mode == "zero":
        return 0
    if isinstance(expr, (Hyp, Const)):
        return 0
    if isinstance(expr, Compl):
        return measure.step + gamma_of(expr.arg, measure)
    if isinstance(expr, (Union, Inter)):
        a = gamma_of(expr.left, measure)
        b = gamma_of(expr.right, measure)
        return measure.step + (a + b if measure.mode == "sum" else max(a, b))
    raise StructuralError(f"unknown expression node {type(expr).__name__}")


def random_expr(rng: random.Random, n_hyps: int, max_depth: int) -> AlgebraExpr:
    """Seeded expression generator for sampling-based axiom checks."""
    if max_depth == 0 or rng.random() < 0.3:
        if n_hyps and rng.random() < 0.8:
            return Hyp(rng.randrange(n_hyps))
        return Const(rng.randint(0, 1))
    roll = rng.random()
    if roll < 0.4:
        return Union(
            random_expr(rng, n_hyps, max_depth - 1),
            random_expr(rng, n_hyps, max_depth - 1),
        )
    if roll < 0.8:
        return Inter(
            random_expr(rng, n_hyps, max_depth - 1),
            random_expr(rng, n_hyps, max_depth - 1),
        )
    return Compl(random_expr(rng, n_hyps, max_depth - 1))


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    witness: Tuple[AlgebraExpr, ...]


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    checked: int
    violations: Tuple[AxiomViolation, ...]


def check_axioms(
    measure: GradedMeasure,
    n_hyps: int = 4,
    sample_budget: int = 1000,
    seed: int = 0,
) -> AxiomReport:
    """Sample expression pairs and verify the graded-measure axioms.

    Axioms: zero on generators; union, intersection, and complement each
    cost at most one more than their arguments combined. When the measure
    declares ``strengthened``, the union bound tightens to 1 + max.
    """
    rng = random.Random(seed)
    violations: List[AxiomViolation] = []
    for i in range(n_hyps):
        if gamma_of(Hyp(i), measure) != 0:
            violations.append(AxiomViolation("generator_zero", (Hyp(i),)))
    checked = 0
    for _ in range(sample_budget):
        a = random_expr(rng, n_hyps, 4)
        b = random_expr(rng, n_hyps, 4)
        ga, gb = gamma_of(a, measure), gamma_of(b, measure)
        checked += 1
        if gamma_of(Union(a, b), measure) > 1 + ga + gb:
            violations.append(AxiomViolation("union_bound", (a, b)))
        if gamma_of(Inter(a, b), measure) > 1 + ga + gb:
            violations.append(AxiomViolation("intersection_bound", (a, b)))
        if gamma_of(Compl(a), measure) > 1 + ga:
            violations.append(AxiomViolation("complement_bound", (a,)))
        if measure.strengthened and gamma_of(Union(a, b), measure) > 1 + max(ga, gb):
            violations.append(AxiomViolation("strengthened_union", (a, b)))
    return AxiomReport(not violations, checked, tuple(violations))


# ---------------------------------------------------------------------------
# Minimal complexity of an accurate expression


@dataclass(frozen=True)
class AboveBudget:
    budget: int


def min_gamma(
    inst: Instance,
    dist: Distribution,
    epsilon,
    measure: GradedMeasure,
    budget: int,
) -> TUnion[int, AboveBudget]:
    """Least measure value of an expression whose extension has loss <= epsilon.

    Uniform-cost search over semantically distinct extensions: generators
    enter at cost 0; finalized masks combine pairwise under the connective
    rules. Stops at the first qualifying mask or once every frontier cost
    exceeds the budget.
    """
    if measure.mode == "zero":
        # Every expression costs 0; only feasibility matters.
        reachable = _algebra_closure(inst)
        ok = any(_loss_ok(m, inst, dist, epsilon) for m in reachable)
        return 0 if ok else AboveBudget(budget)

    start = {0: 0, inst.full_mask: 0}
    for h in inst.hypotheses:
        start.setdefault(h.mask, 0)
    dist_cost: Dict[int, int] = {}
    heap = [(0, m) for m in start]
    heapq.heapify(heap)
    done: List[Tuple[int, int]] = []  # (mask, cost), in finalization order
    while heap:
        cost, m = heapq.heappop(heap)
        if m in dist_cost:
            continue
        if cost > budget:
            return AboveBudget(budget)
        if _loss_ok(m, inst, dist, epsilon):
            return cost
        dist_cost[m] = cost
        done.append((m, cost))

        def push(mask: int, c: int) -> None:
            if c <= budget and mask not in dist_cost:
                heapq.heappush(heap, (c, mask))

        push(~m & inst.full_mask, measure.step + cost)
        for m2, c2 in done:
            combined = (
                measure.step + cost + c2
                if measure.mode == "sum"
                else measure.step + max(cost, c2)
            )
            push(m | m2, combined)
            push(m & m2, combined)
    return AboveBudget(budget)


def _loss_ok(mask: int, inst: Instance, dist: Distribution, epsilon) -> bool:
    v = mask_loss(mask, inst, dist)
    if isinstance(v, Fraction) and not isinstance(epsilon, float):
        return v <= epsilon
    return float(v) <= float(epsilon) + 1e-12


def _algebra_closure(inst: Instance) -> List[int]:
    """All extensions generated by H under the Boolean operations."""
    masks = {0, inst.full_mask} | {h.mask for h in inst.hypotheses}
    frontier = list(masks)
    while frontier:
        m = frontier.pop()
        new = {~m & inst.full_mask}
        for m2 in list(masks):
            new.add(m | m2)
            new.add(m & m2)
        for x in new:
            if x not in masks:
                masks.add(x)
                frontier.append(x)
    return sorted(masks)


# ---------------------------------------------------------------------------
# Serialization (prefix form)


def expr_to_json(expr: AlgebraExpr) -> str:
    return json.dumps(_expr_doc(expr))


def _expr_doc(expr: AlgebraExpr):
    if isinstance(expr, Hyp):
        return ["h", expr.index]
    if isinstance(expr, Const):
        return ["const", expr.value]
    if isinstance(expr, Union):
        return ["or", _expr_doc(expr.left), _expr_doc(expr.right)]
    if isinstance(expr, Inter):
        return ["and", _expr_doc(expr.left), _expr_doc(expr.right)]
    if isinstance(expr, Compl):
        return ["not", _expr_doc(expr.arg)]
    raise StructuralError(f"unknown expression node {type(expr).__name__}")


def expr_from_json(text: str) -> AlgebraExpr:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"invalid expression JSON: {exc}") from exc
    return _expr_parse(doc)


def _expr_parse(doc) -> AlgebraExpr:
    try:
        tag = doc[0]
        if tag == "h":
            return Hyp(int(doc[1]))
        if tag == "const":
            return Const(int(doc[1]))
        if tag == "or":
            return Union(_expr_parse(doc[1]), _expr_parse(doc[2]))
        if tag == "and":
            return Inter(_expr_parse(doc[1]), _expr_parse(doc[2]))
        if tag == "not":
            return Compl(_expr_parse(doc[1]))
    except (TypeError, IndexError, ValueError) as exc:
        raise StructuralError(f"malformed expression JSON: {exc}") from exc
    raise StructuralError(f"unknown expression tag {doc!r}")
