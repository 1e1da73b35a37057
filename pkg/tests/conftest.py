"""Shared generators and independent reference oracles for the test suite.

The reference implementations here are deliberately written from the
definitions, without the optimizations used by the package (no restriction
grouping, no double-oracle iteration), so they can serve as ground truth.
"""

import random
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from treelucid.instance import Distribution, Instance, mask_loss


# ---------------------------------------------------------------------------
# Instance generators


def random_instance(rng: random.Random, max_n=8, max_h=4, dyadic=True) -> Instance:
    """Random small instance with exact weights and a non-constant concept."""
    n = rng.randint(2, max_n)
    if dyadic:
        # super-decreasing dyadic masses summing to exactly 1
        weights = [Fraction(1, 2 ** (i + 1)) for i in range(n - 1)]
        weights.append(Fraction(1, 2 ** (n - 1)))
        rng.shuffle(weights)
    else:
        raw = [rng.randint(1, 8) for _ in range(n)]
        total = sum(raw)
        weights = [Fraction(r, total) for r in raw]
    concept = [rng.randint(0, 1) for _ in range(n)]
    if len(set(concept)) == 1:
        concept[rng.randrange(n)] ^= 1
    n_h = rng.randint(1, min(max_h, 2**n))  # only 2^n distinct bit vectors exist
    hyps = []
    seen = set()
    while len(hyps) < n_h:
        bits = tuple(rng.randint(0, 1) for _ in range(n))
        if bits in seen:
            continue
        seen.add(bits)
        hyps.append((f"h{len(hyps)}", list(bits)))
    return Instance(weights, concept, hyps)


def singleton_instance(rng: random.Random, min_n=3, max_n=8) -> Instance:
    """Super-decreasing dyadic weights with all singletons as stumps.

    Every balanced conditional on such an instance gives some singleton
    stump a large advantage, so boosting runs certify cleanly.
    """
    n = rng.randint(min_n, max_n)
    weights = [Fraction(1, 2 ** (i + 1)) for i in range(n - 1)]
    weights.append(Fraction(1, 2 ** (n - 1)))
    concept = [rng.randint(0, 1) for _ in range(n)]
    if len(set(concept)) == 1:
        concept[rng.randrange(n)] ^= 1
    hyps = [
        (f"s{i}", [1 if j == i else 0 for j in range(n)]) for i in range(n)
    ]
    return Instance(weights, concept, hyps)


# ---------------------------------------------------------------------------
# Reference oracle: behaviors straight from the definition


def naive_behavior_sets(inst: Instance, d_max: int):
    """B_0 = constants; B_k = B_{k-1} ∪ {(h∧b1)∨(¬h∧b2)}. Returns the
    cumulative set per depth, with no incremental-frontier tricks."""
    full = inst.full_mask
    levels = [{0, full}]
    for _ in range(d_max):
        prev = levels[-1]
        cur = set(prev)
        for hyp in inst.hypotheses:
            h = hyp.mask
            for b1 in prev:
                for b2 in prev:
                    cur.add((h & b1) | (~h & full & b2))
        levels.append(cur)
    return levels


def naive_min_depth(inst: Instance, dist: Distribution, epsilon, d_max):
    levels = naive_behavior_sets(inst, d_max)
    for k, level in enumerate(levels):
        best = min(mask_loss(b, inst, dist) for b in level)
        if best <= epsilon:
            return k
    return None


# ---------------------------------------------------------------------------
# Reference oracle: full-matrix game value by direct linear programming


def lp_game_value(inst: Instance, d: int) -> float:
    """max_p min_j p·M[:,j] over all depth-<=d behaviors, solved in one LP."""
    behaviors = sorted(naive_behavior_sets(inst, d)[-1])
    n = inst.n_points
    M = np.zeros((n, len(behaviors)))
    for j, b in enumerate(behaviors):
        wrong = b ^ inst.concept_mask
        for x in range(n):
            M[x, j] = (wrong >> x) & 1
    k = M.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-M.T, np.ones((k, 1))])
    A_eq = np.zeros((1, n + 1))
    A_eq[0, :n] = 1.0
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=np.zeros(k),
        A_eq=A_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)],
        method="highs",
    )
    assert res.success, res.message
    return float(res.x[-1])
