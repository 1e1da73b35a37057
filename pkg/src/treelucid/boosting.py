"""Level-by-level boosting of shallow weak trees into an accurate tree.

Each phase replaces every impure positive-mass leaf with a depth-<=d tree
learned on the *balanced* conditional distribution at that leaf, then
relabels all new leaves by conditional majority. When every weak tree has
error <= 1/2 - gamma on its balanced conditional, the surrogate potential
sum_z P(z) * sqrt(p_z (1-p_z)) contracts by a factor (1 - 2 gamma^2) per
phase, which yields loss <= epsilon after (d / 2 gamma^2) ln(1/2eps) depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import PreconditionError
from .instance import (
    Distribution,
    Instance,
    balanced,
    conditional,
    loss as tree_loss,
)
from .oracle import best_tree
from .tree import DecisionTree, Internal, Leaf, gini_sqrt, stump_tree

DECAY_SLACK = 1e-9


def phase_bound(gamma: float, epsilon: float) -> int:
    """Phases sufficient for a certified run: ceil(ln(1/2eps) / (2 gamma^2))."""
    if not 0 < gamma < 0.5 or not 0 < epsilon < 1:
        raise PreconditionError("need 0 < gamma < 1/2 and 0 < epsilon < 1")
    need = math.log(1.0 / (2.0 * float(epsilon))) / (2.0 * float(gamma) ** 2)
    return max(0, math.ceil(need))


@dataclass(frozen=True)
class BoostConfig:
    gamma: float
    epsilon: float
    weak_depth: int = 1
    max_phases: Optional[int] = None
    weak_mode: str = "exact"  # "exact" | "greedy"

    def __post_init__(self):
        if not 0 < self.gamma < 0.5:
            raise PreconditionError(f"gamma must lie in (0, 1/2), got {self.gamma}")
        if not 0 < self.epsilon < 1:
            raise PreconditionError(f"epsilon must lie in (0,1), got {self.epsilon}")
        if self.weak_depth < 1:
            raise PreconditionError("weak_depth must be >= 1")
        if self.weak_mode not in ("exact", "greedy"):
            raise PreconditionError(f"unknown weak_mode {self.weak_mode!r}")

    @property
    def phases(self) -> int:
        if self.max_phases is not None:
            return self.max_phases
        return phase_bound(self.gamma, self.epsilon)


@dataclass(frozen=True)
class AdvantageShortfall:
    """A leaf whose weak learner missed the claimed advantage in some phase."""

    phase: int
    region: int
    achieved_error: float


@dataclass(frozen=True)
class BoostTrace:
    surrogates: Tuple[float, ...]  # H_0 .. H_m
    advantages: Tuple[Optional[float], ...]  # min leaf advantage per phase
    certified: Tuple[bool, ...]  # per-phase decay check
    shortfalls: Tuple[AdvantageShortfall, ...]
    tree: DecisionTree
    final_loss: object
    phases: int

    @property
    def fully_certified(self) -> bool:
        return all(self.certified)


def weak_learn(
    inst: Instance, leaf_dist: Distribution, d: int, mode: str = "exact"
) -> Tuple[DecisionTree, object]:
    """Lowest-error depth-<=d tree for a balanced distribution.

    ``exact`` searches all depth-<=d trees (region DP); ``greedy`` scans
    single stumps only. Error is reported on ``leaf_dist`` itself.
    """
    pos = leaf_dist.mass(inst.concept_mask)
    neg = leaf_dist.mass(inst.full_mask & ~inst.concept_mask)
    if abs(float(pos) - 0.5) > 1e-9 or abs(float(neg) - 0.5) > 1e-9:
        raise PreconditionError(
            f"weak_learn needs a balanced distribution, got pos={float(pos)}"
        )
    if mode == "exact":
        return best_tree(inst, leaf_dist, d)
    if mode != "greedy":
        raise PreconditionError(f"unknown weak mode {mode!r}")
    if inst.n_hypotheses == 0:
        return DecisionTree((Leaf(0),)), pos
    # Vectorized scan over all stumps and both orientations.
    _, c, Hm = inst.float_arrays()
    w = leaf_dist.as_floats()
    wrong_pos = w * (1.0 - c)  # mass hurt by labeling 1
    wrong_neg = w * c  # mass hurt by labeling 0
    err_10 = Hm @ wrong_pos + (1.0 - Hm) @ wrong_neg  # stump labels (1, 0)
    err_01 = Hm @ wrong_neg + (1.0 - Hm) @ wrong_pos  # stump labels (0, 1)
    j10, j01 = int(np.argmin(err_10)), int(np.argmin(err_01))
    if err_10[j10] <= err_01[j01]:
        return stump_tree(j10, 1, 0), float(err_10[j10])
    return stump_tree(j01, 0, 1), float(err_01[j01])


# Internal mutable tree representation for phase-by-phase growth.
# node = ["leaf", label, region_mask] | ["node", hyp, left, right]


def _majority_label(inst: Instance, dist: Distribution, region: int) -> int:
    pos = dist.mass(region & inst.concept_mask)
    neg = dist.mass(region) - pos
    return 1 if pos > neg else 0


def _freeze(node, nodes: List[object]) -> int:
    if node[0] == "leaf":
        nodes.append(Leaf(node[1]))
        return len(nodes) - 1
    idx = len(nodes)
    nodes.append(None)
    l = _freeze(node[2], nodes)
    r = _freeze(node[3], nodes)
    nodes[idx] = Internal(node[1], l, r)
    return idx


def _graft(tree: DecisionTree, inst: Instance, dist: Distribution, region: int):
    """Mutable copy of a weak tree restricted to a region, leaves relabeled
    by conditional majority (ties and zero mass -> 0)."""

    def rec(i: int, reg: int):
        node = tree.nodes[i]
        if isinstance(node, Leaf):
            return ["leaf", _majority_label(inst, dist, reg), reg]
        h = inst.hyp_mask(node.hyp)
        return [
            "node",
            node.hyp,
            rec(node.left, reg & h),
            rec(node.right, reg & ~h & inst.full_mask),
        ]

    return rec(tree.root, region)


def topdown_lbl(inst: Instance, dist: Distribution, cfg: BoostConfig) -> BoostTrace:
    """Run the boosting loop; stops at surrogate <= epsilon or the phase cap."""
    root = ["leaf", _majority_label(inst, dist, inst.full_mask), inst.full_mask]
    surrogates = [_surrogate_of(root, inst, dist)]
    advantages: List[Optional[float]] = []
    certified: List[bool] = []
    shortfalls: List[AdvantageShortfall] = []
    target = float(cfg.epsilon)

    for phase in range(1, cfg.phases + 1):
        if surrogates[-1] <= target:
            break
        leaves = _collect_leaves(root)
        min_adv: Optional[float] = None
        grew = False
        for leaf in leaves:
            region = leaf[2]
            mass = dist.mass(region)
            if mass <= 0:
                continue  # frozen: contributes nothing
            cond = conditional(dist, region)
            pos = cond.mass(inst.concept_mask)
            if pos <= 0 or pos >= 1:
                continue  # pure leaf; splitting cannot help
            bal = balanced(cond, inst)
            weak, err = weak_learn(inst, bal, cfg.weak_depth, cfg.weak_mode)
            adv = 0.5 - float(err)
            min_adv = adv if min_adv is None else min(min_adv, adv)
            if float(err) > 0.5 - cfg.gamma + DECAY_SLACK:
                shortfalls.append(AdvantageShortfall(phase, region, float(err)))
            replacement = _graft(weak, inst, dist, region)
            leaf[:] = replacement
            grew = True
        h_new = _surrogate_of(root, inst, dist)
        factor = 1.0 - 2.0 * cfg.gamma**2
        certified.append(h_new <= factor * surrogates[-1] + DECAY_SLACK)
        advantages.append(min_adv)
        surrogates.append(h_new)
        if not grew:
            break

    nodes: List[object] = []
    _freeze(root, nodes)
    final = DecisionTree(tuple(nodes), 0)
    return BoostTrace(
        surrogates=tuple(surrogates),
        advantages=tuple(advantages),
        certified=tuple(certified),
        shortfalls=tuple(shortfalls),
        tree=final,
        final_loss=tree_loss(final, inst, dist),
        phases=len(certified),
    )


def _collect_leaves(node) -> List[list]:
    if node[0] == "leaf":
        return [node]
    return _collect_leaves(node[2]) + _collect_leaves(node[3])


def _surrogate_of(node, inst: Instance, dist: Distribution) -> float:
    total = 0.0
    for leaf in _collect_leaves(node):
        w = dist.mass(leaf[2])
        if w <= 0:
            continue
        p = dist.mass(leaf[2] & inst.concept_mask) / w
        total += float(w) * gini_sqrt(float(p))
    return total


@dataclass(frozen=True)
class CertifyReport:
    decay_ok: Tuple[bool, ...]
    first_violation: Optional[int]  # 1-based phase index
    global_bound: float  # (1/2) e^{-2 m gamma^2}
    bound_ok: bool
    loss_le_surrogate: bool


def certify(trace: BoostTrace, cfg: BoostConfig) -> CertifyReport:
    """Re-check the per-phase decay factor and the global exponential bound."""
    factor = 1.0 - 2.0 * cfg.gamma**2
    decay_ok = tuple(
        trace.surrogates[i + 1] <= factor * trace.surrogates[i] + DECAY_SLACK
        for i in range(trace.phases)
    )
    first = next((i + 1 for i, ok in enumerate(decay_ok) if not ok), None)
    m = trace.phases
    bound = 0.5 * math.exp(-2.0 * m * cfg.gamma**2)
    bound_ok = first is None and trace.surrogates[-1] <= bound + DECAY_SLACK
    return CertifyReport(
        decay_ok=decay_ok,
        first_violation=first,
        global_bound=bound,
        bound_ok=bound_ok,
        loss_le_surrogate=float(trace.final_loss) <= trace.surrogates[-1] + DECAY_SLACK,
    )
