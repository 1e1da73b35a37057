"""Zero-sum game between distributions and shallow trees, and its compression.

The adversary picks a distribution over domain points; the learner picks a
depth-<=d behavior. We solve the matrix game exactly enough to certify a
duality gap, then derandomize the learner's mixed strategy into a small
multiset of trees whose pointwise majority is correct everywhere, and stack
that multiset into one zero-error tree of depth exactly |R| * d.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .errors import DerandomizeFailed, PreconditionError
from .instance import Distribution, Instance, iter_bits
from .oracle import BEHAVIOR_CAP, BehaviorFrontier
from .tree import DecisionTree, Internal, Leaf, depth as tree_depth, stack_majority

from .oracle import enumerate_behaviors  # re-exported: behaviors back the game

__all__ = [
    "GameSolution",
    "Derandomization",
    "CompressResult",
    "SweepResult",
    "enumerate_behaviors",
    "game_value",
    "derandomize",
    "compress",
    "weak_interpretability_sweep",
]

DEFAULT_TOL = 1e-6
DERANDOMIZE_SIZE_CAP = 4097


@dataclass(frozen=True)
class GameSolution:
    """Certified (to ``duality_gap``) solution of the point-vs-tree game."""

    value: float
    point_strategy: Distribution
    tree_strategy: Tuple[float, ...]  # aligned with ``behaviors``
    behaviors: Tuple[int, ...]
    witnesses: Tuple[DecisionTree, ...]
    duality_gap: float
    depth: int


@dataclass(frozen=True)
class Derandomization:
    indices: Tuple[int, ...]  # multiset of positions into sol.behaviors
    margin: float  # min over points of (1/2 - wrong frequency)


@dataclass(frozen=True)
class CompressResult:
    tree: DecisionTree
    multiset_size: int
    solution: GameSolution
    derandomization: Derandomization


@dataclass(frozen=True)
class SweepResult:
    depth: Optional[int]  # smallest d with max game value <= 1/2 - gamma
    table: Tuple[Tuple[int, float], ...]  # (d, max value over family)


def _loss_matrix(inst: Instance, behaviors: Sequence[int]) -> np.ndarray:
    """M[x, j] = 1 iff behavior j mislabels point x."""
    n = inst.n_points
    M = np.zeros((n, len(behaviors)), dtype=float)
    for j, b in enumerate(behaviors):
        wrong = b ^ inst.concept_mask
        for x in iter_bits(wrong):
            M[x, j] = 1.0
    return M


def _point_lp(M: np.ndarray) -> Tuple[np.ndarray, float]:
    """max_p min_j p . M[:,j] over the probability simplex."""
    n, k = M.shape
    # variables [p_0..p_{n-1}, v]; minimize -v
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-M.T, np.ones((k, 1))])  # v - p.M_j <= 0
    b_ub = np.zeros(k)
    A_eq = np.zeros((1, n + 1))
    A_eq[0, :n] = 1.0
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)], method="highs",
    )
    if not res.success:
        raise RuntimeError(f"point LP failed: {res.message}")
    p = np.clip(res.x[:n], 0.0, None)
    p /= p.sum()
    return p, float(res.x[-1])


def _tree_lp(M: np.ndarray) -> Tuple[np.ndarray, float]:
    """min_q max_x (M q)_x over the probability simplex."""
    n, k = M.shape
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A_ub = np.hstack([M, -np.ones((n, 1))])  # M q - u <= 0
    b_ub = np.zeros(n)
    A_eq = np.zeros((1, k + 1))
    A_eq[0, :k] = 1.0
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
        bounds=[(0, None)] * k + [(None, None)], method="highs",
    )
    if not res.success:
        raise RuntimeError(f"tree LP failed: {res.message}")
    q = np.clip(res.x[:k], 0.0, None)
    q /= q.sum()
    return q, float(res.x[-1])


def game_value(
    inst: Instance,
    d: int,
    tol: float = DEFAULT_TOL,
    cap: int = BEHAVIOR_CAP,
    max_rounds: int = 10_000,
) -> GameSolution:
    """Solve sup_P inf_T L_P(T, c) over depth-<=d behaviors.

    Double-oracle iteration: solve the game restricted to a working set of
    behavior columns (all point rows kept), then scan *all* behaviors for a
    best response to the adversary's strategy. The scan value lower-bounds
    the true value and the restricted tree strategy upper-bounds it, so the
    reported duality gap is a genuine certificate.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    frontier = BehaviorFrontier(inst, cap=cap)
    frontier.grow_to(d)
    behaviors = sorted(frontier.masks())
    M = _loss_matrix(inst, behaviors)
    n, total = M.shape

    # Working set: best responses to the uniform distribution, both constants.
    uniform = np.full(n, 1.0 / n)
    cols = {int(np.argmin(uniform @ M)), 0, total - 1}
    best_gap = math.inf
    best = None
    for _ in range(max_rounds):
        idx = sorted(cols)
        sub = M[:, idx]
        p, _ = _point_lp(sub)
        q_sub, v_upper = _tree_lp(sub)
        # Exact best response against p over the full behavior set.
        response = p @ M
        j_star = int(np.argmin(response))
        v_lower = float(response[j_star])
        gap = v_upper - v_lower
        if gap < best_gap:
            best_gap = gap
            q = np.zeros(total)
            q[idx] = q_sub
            best = (p, q, v_upper)
        if gap <= tol or j_star in cols:
            break
        cols.add(j_star)

    p, q, value = best
    witnesses = tuple(frontier.witness(b) for b in behaviors)
    return GameSolution(
        value=value,
        point_strategy=Distribution(tuple(float(x) for x in p)),
        tree_strategy=tuple(float(x) for x in q),
        behaviors=tuple(behaviors),
        witnesses=witnesses,
        duality_gap=max(best_gap, 0.0),
        depth=d,
    )


def derandomize(
    inst: Instance,
    sol: GameSolution,
    gamma: float,
    seed: int = 0,
    size_cap: int = DERANDOMIZE_SIZE_CAP,
) -> Derandomization:
    """Replace the mixed strategy by a finite multiset with correct majority.

    Requires sol.value <= 1/2 - gamma. Returns a multiset R over behavior
    indices such that at every domain point the fraction of members that
    mislabel it is at most 1/2 - gamma/2. Greedy construction first, then
    seeded sampling from the mixed strategy with doubling sizes.
    """
    if sol.value > 0.5 - gamma + 1e-9:
        raise PreconditionError(
            f"game value {sol.value:.6f} exceeds 1/2 - gamma = {0.5 - gamma}"
        )
    n = inst.n_points
    wrong_rows = np.array(
        [[(b ^ inst.concept_mask) >> x & 1 for b in sol.behaviors] for x in range(n)],
        dtype=float,
    )  # wrong_rows[x, j]
    support = [j for j, w in enumerate(sol.tree_strategy) if w > 1e-12]
    if not support:
        support = [int(np.argmax(sol.tree_strategy))]
    threshold = 0.5 - gamma / 2.0 + 1e-12

    def check(counts: np.ndarray, size: int) -> Optional[float]:
        frac = counts / size
        worst = float(frac.max())
        return (0.5 - worst) if worst <= threshold else None

    # Exhaustive search over small odd multisets from the strategy support:
    # small witnesses keep the stacked tree materializable.
    if len(support) <= 16:
        import itertools

        for size in (1, 3, 5, 7):
            best_pick, best_margin = None, None
            for combo in itertools.combinations_with_replacement(support, size):
                counts = wrong_rows[:, list(combo)].sum(axis=1)
                margin = check(counts, size)
                if margin is not None and (
                    best_margin is None or margin > best_margin
                ):
                    best_pick, best_margin = combo, margin
            if best_pick is not None:
                return Derandomization(tuple(best_pick), best_margin)

    # Greedy: always add the candidate minimizing the resulting worst
    # wrong-frequency, testing at every odd size.
    counts = np.zeros(n)
    chosen: List[int] = []
    greedy_cap = min(size_cap, 201)
    while len(chosen) < greedy_cap:
        best_j, best_worst = None, None
        for j in support:
            worst = float((counts + wrong_rows[:, j]).max())
            if best_worst is None or worst < best_worst - 1e-15:
                best_j, best_worst = j, worst
        chosen.append(best_j)
        counts += wrong_rows[:, best_j]
        if len(chosen) % 2 == 1:
            margin = check(counts, len(chosen))
            if margin is not None:
                return Derandomization(tuple(chosen), margin)

    rng = random.Random(seed)
    weights = [max(w, 0.0) for w in sol.tree_strategy]
    size = 3
    while size <= size_cap:
        for _ in range(50):
            sample = rng.choices(range(len(weights)), weights=weights, k=size)
            counts = wrong_rows[:, sample].sum(axis=1)
            margin = check(counts, size)
            if margin is not None:
                return Derandomization(tuple(sample), margin)
        size = 2 * size + 1
    raise DerandomizeFailed(
        f"no correct-majority multiset of size <= {size_cap} found"
    )


def _pad_to_depth(tree: DecisionTree, d: int) -> DecisionTree:
    """Extend a tree to depth exactly d with no-op splits under a deepest leaf."""
    cur = tree_depth(tree)
    if cur > d:
        raise PreconditionError(f"tree depth {cur} exceeds target {d}")
    while cur < d:
        nodes = list(tree.nodes)
        # locate one deepest leaf
        target, _ = _deepest_leaf(nodes, tree.root, 0)
        label = nodes[target].label
        nodes[target] = Internal(0, len(nodes), len(nodes) + 1)
        nodes.extend([Leaf(label), Leaf(label)])
        tree = DecisionTree(tuple(nodes), tree.root)
        cur += 1
    return tree


def _deepest_leaf(nodes, i: int, depth_: int) -> Tuple[int, int]:
    node = nodes[i]
    if isinstance(node, Leaf):
        return i, depth_
    l = _deepest_leaf(nodes, node.left, depth_ + 1)
    r = _deepest_leaf(nodes, node.right, depth_ + 1)
    return l if l[1] >= r[1] else r


def compress(
    inst: Instance,
    d: int,
    gamma: float,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    node_cap: Optional[int] = None,
) -> CompressResult:
    """Zero-error tree of depth exactly |R| * d, when the game value permits.

    Requires the depth-d game value to be at most 1/2 - gamma; the stacked
    majority over the derandomized multiset is then correct on every point.
    """
    if inst.n_hypotheses == 0:
        raise PreconditionError("compress needs at least one hypothesis")
    if d < 1:
        raise PreconditionError("compress needs weak depth d >= 1")
    sol = game_value(inst, d, tol=tol)
    der = derandomize(inst, sol, gamma, seed=seed)
    padded = [_pad_to_depth(sol.witnesses[j], d) for j in der.indices]
    kwargs = {} if node_cap is None else {"node_cap": node_cap}
    stacked = stack_majority(padded, **kwargs)
    return CompressResult(
        tree=stacked,
        multiset_size=len(der.indices),
        solution=sol,
        derandomization=der,
    )


def weak_interpretability_sweep(
    family: Sequence[Instance],
    gamma: float,
    d_max: int,
    tol: float = DEFAULT_TOL,
) -> SweepResult:
    """Smallest d whose worst game value over the family is <= 1/2 - gamma."""
    if not family:
        raise PreconditionError("family must be nonempty")
    table: List[Tuple[int, float]] = []
    found: Optional[int] = None
    for d in range(d_max + 1):
        worst = max(game_value(inst, d, tol=tol).value for inst in family)
        table.append((d, worst))
        if found is None and worst <= 0.5 - gamma + tol:
            found = d
            break
    return SweepResult(depth=found, table=tuple(table))
