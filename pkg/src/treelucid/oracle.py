"""Exact minimal-depth search and Rashomon enumeration.

Two exact engines back the public operations:

* a behavior-level BFS that enumerates every distinct classifier reachable
  by depth-<=k trees (``F_0`` = constants, ``F_k`` built by splicing two
  level-(k-1) behaviors on a hypothesis), deduplicated as bitmasks; and
* a region-memoized dynamic program computing the best achievable loss of
  a depth-<=k tree on a leaf region, for instances whose behavior space is
  too large to enumerate.

Both are exact; they cross-check each other in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import BudgetError, PreconditionError
from .instance import Distribution, Instance, mask_loss
from .tree import DecisionTree, Internal, Leaf

BEHAVIOR_CAP = 200_000
REGION_CAP = 500_000
FLOAT_EPS_SLACK = 1e-12


@dataclass(frozen=True)
class AboveCap:
    """No tree within the depth cap meets the target loss.

    ``structural`` is True when the behavior DP reached its fixpoint, i.e.
    no tree of *any* depth meets the target (non-approximability evidence).
    """

    cap: int
    structural: bool = False


@dataclass(frozen=True)
class DepthProfile:
    pairs: Tuple[Tuple[object, Union[int, AboveCap]], ...]
    cap: int


def _loss_leq(value, epsilon, exact: bool) -> bool:
    if exact and isinstance(value, Fraction):
        eps = Fraction(epsilon) if not isinstance(epsilon, float) else epsilon
        return value <= eps
    return float(value) <= float(epsilon) + FLOAT_EPS_SLACK


# ---------------------------------------------------------------------------
# Behavior-level BFS


class BehaviorFrontier:
    """Cumulative sets of depth-<=k behaviors with witness constructions."""

    def __init__(self, inst: Instance, cap: int = BEHAVIOR_CAP):
        self.inst = inst
        self.cap = cap
        full = inst.full_mask
        # mask -> (level, hyp, left_mask, right_mask); constants have no parents
        self.constructions: Dict[int, Optional[Tuple[int, int, int, int]]] = {
            0: None,
            full: None,
        }
        self.levels: List[List[int]] = [[0, full]]
        self.fixpoint = full == 0  # degenerate empty domain

    @property
    def depth_reached(self) -> int:
        return len(self.levels) - 1

    def grow(self) -> List[int]:
        """Advance one level; returns the masks first seen at the new level."""
        if self.fixpoint:
            return []
        inst = self.inst
        full = inst.full_mask
        known = self.constructions
        level = len(self.levels)
        # Combine only behaviors present before this level started; fresh
        # masks from earlier hypotheses in the same pass would otherwise
        # sneak depth-(level+1) behaviors into this level.
        prior = list(known)
        fresh: List[int] = []
        for h_idx, hyp in enumerate(inst.hypotheses):
            h = hyp.mask
            nh = ~h & full
            on: Dict[int, int] = {}
            off: Dict[int, int] = {}
            for f in prior:
                on.setdefault(f & h, f)
                off.setdefault(f & nh, f)
            for a, fa in on.items():
                for b, fb in off.items():
                    m = a | b
                    if m not in known:
                        known[m] = (level, h_idx, fa, fb)
                        fresh.append(m)
                        if len(known) > self.cap:
                            raise BudgetError(
                                f"behavior count exceeded cap {self.cap}",
                                partial=self,
                            )
        self.levels.append(fresh)
        if not fresh:
            self.fixpoint = True
        return fresh

    def grow_to(self, d: int) -> None:
        while self.depth_reached < d and not self.fixpoint:
            self.grow()

    def masks(self):
        return self.constructions.keys()

    def discovery_level(self, mask: int) -> int:
        entry = self.constructions[mask]
        return 0 if entry is None else entry[0]

    def witness(self, mask: int) -> DecisionTree:
        """A tree of depth equal to the discovery level computing ``mask``."""
        nodes: List[object] = []

        def build(m: int) -> int:
            entry = self.constructions[m]
            if entry is None:
                nodes.append(Leaf(1 if m else 0))
                return len(nodes) - 1
            _, h_idx, fa, fb = entry
            idx = len(nodes)
            nodes.append(None)
            l = build(fa)
            r = build(fb)
            nodes[idx] = Internal(h_idx, l, r)
            return idx

        root = build(mask)
        return DecisionTree(tuple(nodes), root)


def enumerate_behaviors(
    inst: Instance, d: int, cap: int = BEHAVIOR_CAP
) -> List[Tuple[int, DecisionTree]]:
    """All distinct depth-<=d behaviors, each with one minimal-depth witness."""
    if d < 0:
        raise PreconditionError("depth must be nonnegative")
    frontier = BehaviorFrontier(inst, cap=cap)
    frontier.grow_to(d)
    return [(m, frontier.witness(m)) for m in sorted(frontier.masks())]


# ---------------------------------------------------------------------------
# Region-memoized minimum-loss DP


class RegionSearch:
    """Best depth-<=d loss per leaf region, with witness reconstruction."""

    def __init__(
        self,
        inst: Instance,
        dist: Distribution,
        budget: int = REGION_CAP,
    ):
        self.inst = inst
        self.dist = dist
        self.budget = budget
        self.support = dist.support_mask
        # (region, d) -> (loss, choice) with choice ("leaf", label) or
        # ("split", h, l, r, child_d); child_d records the budget the
        # children were solved with, since the optimum for depth d may be
        # inherited unchanged from depth d-1.
        self.memo: Dict[Tuple[int, int], Tuple[object, object]] = {}
        self._stats: Dict[int, Tuple[object, object]] = {}

    def _region_stats(self, region: int):
        st = self._stats.get(region)
        if st is None:
            pos = self.dist.mass(region & self.inst.concept_mask)
            neg = self.dist.mass(region) - pos
            st = (pos, neg)
            self._stats[region] = st
        return st

    def best(self, region: int, d: int):
        region &= self.support
        key = (region, d)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if len(self.memo) > self.budget:
            raise BudgetError(f"region search exceeded {self.budget} states")
        pos, neg = self._region_stats(region)
        if d == 0 or pos == 0 or neg == 0:
            # Majority leaf; ties label 0.
            loss = neg if pos > neg else pos
            label = 1 if pos > neg else 0
            result = (loss, ("leaf", label))
        else:
            loss, choice = self.best(region, d - 1)
            if loss > 0:
                for h_idx, hyp in enumerate(self.inst.hypotheses):
                    left = region & hyp.mask
                    right = region & ~hyp.mask
                    if left == region or left == 0:
                        continue
                    l_loss, _ = self.best(left, d - 1)
                    if l_loss >= loss:
                        continue
                    r_loss, _ = self.best(right, d - 1)
                    cand = l_loss + r_loss
                    if cand < loss:
                        loss, choice = cand, ("split", h_idx, left, right, d - 1)
                        if loss == 0:
                            break
            result = (loss, choice)
        self.memo[key] = result
        return result

    def witness(self, region: int, d: int) -> DecisionTree:
        nodes: List[object] = []

        def build(region_: int, d_: int) -> int:
            region_ &= self.support
            _, choice = self.memo[(region_, d_)]
            if choice[0] == "leaf":
                nodes.append(Leaf(choice[1]))
                return len(nodes) - 1
            _, h_idx, left, right, child_d = choice
            idx = len(nodes)
            nodes.append(None)
            l = build(left, child_d)
            r = build(right, child_d)
            nodes[idx] = Internal(h_idx, l, r)
            return idx

        root = build(region, d)
        return DecisionTree(tuple(nodes), root)


def best_tree(
    inst: Instance,
    dist: Distribution,
    d: int,
    budget: int = REGION_CAP,
) -> Tuple[DecisionTree, object]:
    """Minimum-loss depth-<=d tree for ``dist`` via the region DP."""
    search = RegionSearch(inst, dist, budget=budget)
    loss, _ = search.best(inst.full_mask, d)
    return search.witness(inst.full_mask, d), loss


def min_loss_by_depth(
    inst: Instance,
    dist: Distribution,
    d_max: int,
    budget: int = REGION_CAP,
) -> List[object]:
    """Best achievable loss at each depth 0..d_max (region engine)."""
    search = RegionSearch(inst, dist, budget=budget)
    return [search.best(inst.full_mask, d)[0] for d in range(d_max + 1)]


# ---------------------------------------------------------------------------
# Public operations


def _behavior_min_losses(
    inst: Instance,
    dist: Distribution,
    d_max: int,
    cap: int,
) -> Tuple[List[object], bool]:
    """Per-level best loss over the cumulative frontier, plus fixpoint flag."""
    frontier = BehaviorFrontier(inst, cap=cap)
    best = min(
        mask_loss(m, inst, dist) for m in frontier.levels[0]
    )
    out = [best]
    for _ in range(d_max):
        if frontier.fixpoint or best == 0:
            out.append(best)
            continue
        fresh = frontier.grow()
        for m in fresh:
            v = mask_loss(m, inst, dist)
            if v < best:
                best = v
        out.append(best)
    return out, frontier.fixpoint


def min_depth(
    inst: Instance,
    dist: Distribution,
    epsilon,
    d_max: int,
    engine: str = "auto",
    cap: int = BEHAVIOR_CAP,
) -> Union[int, AboveCap]:
    """Smallest depth k <= d_max at which some tree has loss <= epsilon."""
    if epsilon < 0 or d_max < 0:
        raise PreconditionError("epsilon and d_max must be nonnegative")
    exact = dist.is_exact
    losses = None
    fixpoint = False
    if engine in ("auto", "behaviors"):
        try:
            losses, fixpoint = _behavior_min_losses(inst, dist, d_max, cap)
        except BudgetError:
            if engine == "behaviors":
                raise
    if losses is None:
        losses = min_loss_by_depth(inst, dist, d_max)
    for k, v in enumerate(losses):
        if _loss_leq(v, epsilon, exact):
            return k
    return AboveCap(d_max, structural=fixpoint)


def rashomon(
    inst: Instance,
    dist: Distribution,
    epsilon,
    d: int,
    cap: int = BEHAVIOR_CAP,
) -> List[Tuple[int, DecisionTree]]:
    """All depth-<=d behaviors with loss <= epsilon, with minimal witnesses."""
    exact = dist.is_exact
    frontier = BehaviorFrontier(inst, cap=cap)
    frontier.grow_to(d)
    out = []
    for m in sorted(frontier.masks()):
        if _loss_leq(mask_loss(m, inst, dist), epsilon, exact):
            out.append((m, frontier.witness(m)))
    return out


def depth_profile(
    inst: Instance,
    dist: Distribution,
    epsilons: Sequence,
    d_max: int,
    engine: str = "auto",
    cap: int = BEHAVIOR_CAP,
) -> DepthProfile:
    """min_depth for each epsilon (sorted descending), sharing one DP run."""
    eps = list(epsilons)
    if any(float(a) < float(b) for a, b in zip(eps, eps[1:])):
        raise PreconditionError("epsilons must be sorted in descending order")
    exact = dist.is_exact
    losses = None
    fixpoint = False
    if engine in ("auto", "behaviors"):
        try:
            losses, fixpoint = _behavior_min_losses(inst, dist, d_max, cap)
        except BudgetError:
            if engine == "behaviors":
                raise
    if losses is None:
        losses = min_loss_by_depth(inst, dist, d_max)
    pairs = []
    for e in eps:
        found: Union[int, AboveCap] = AboveCap(d_max, structural=fixpoint)
        for k, v in enumerate(losses):
            if _loss_leq(v, e, exact):
                found = k
                break
        pairs.append((e, found))
    return DepthProfile(tuple(pairs), d_max)
