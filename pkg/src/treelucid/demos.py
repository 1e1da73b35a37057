"""Canonical demo instances and the trichotomy-evidence classifier.

Builders for the small weighted domains used throughout the test suite and
CLI: the two-point non-approximable instance, the heavy-origin family whose
required depth grows with n, a geometric-series domain approximable at
depth 1 for every accuracy, an adversarial mixture of the heavy-origin
family, and disk-vs-halfplane grid instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import BudgetError, PreconditionError
from .instance import Instance, in_algebra
from .minimax import weak_interpretability_sweep
from .tree import DecisionTree, Internal, Leaf


# ---------------------------------------------------------------------------
# Builders


def two_point() -> Instance:
    """Two equal-mass points the single full-domain stump cannot separate."""
    return Instance(
        [Fraction(1, 2), Fraction(1, 2)],
        [0, 1],
        [("X", [1, 1])],
    )


def pn_family(n: int) -> Instance:
    """Half the mass on the lone negative point 0, the rest spread over n
    positives; stumps are the positive singletons. Reaching loss <= 1/4
    forces depth ceil(n/2)."""
    if n < 1:
        raise PreconditionError("pn_family needs n >= 1")
    weights = [Fraction(1, 2)] + [Fraction(1, 2 * n)] * n
    concept = [0] + [1] * n
    hyps = [
        (f"point{i}", [1 if j == i else 0 for j in range(n + 1)])
        for i in range(1, n + 1)
    ]
    return Instance(weights, concept, hyps)


def geometric_series(N: int) -> Instance:
    """Concept {0} under geometrically decaying mass; prefixes as stumps.

    Points: 0 (mass 1/2, positive), 1..N (mass 2^-(x+1), negative), and a
    tail point holding the residual mass 2^-(N+1) with the limiting label 0.
    Stump h_k = {1..k}; the depth-1 tree splitting on h_k has loss exactly
    2^-(k+1), so every accuracy is reachable at depth 1 but by a different
    tree each time.
    """
    if N < 1:
        raise PreconditionError("geometric_series needs N >= 1")
    n_points = N + 2  # 0, 1..N, tail
    weights = [Fraction(1, 2)]
    weights += [Fraction(1, 2 ** (x + 1)) for x in range(1, N + 1)]
    weights.append(Fraction(1, 2 ** (N + 1)))
    concept = [1] + [0] * (N + 1)
    hyps = []
    for k in range(1, N + 1):
        bits = [0] * n_points
        for x in range(1, k + 1):
            bits[x] = 1
        hyps.append((f"prefix{k}", bits))
    return Instance(weights, concept, hyps)


def default_rate(epsilon: float) -> int:
    """r(eps) = ceil(log2(1/eps)), the rate used by the adversarial mixture."""
    return math.ceil(math.log2(1.0 / float(epsilon)))


def adversarial_mixture(
    gamma: Fraction = Fraction(1, 4),
    N: int = 3,
    rate: Callable[[float], int] = default_rate,
) -> Tuple[Instance, Tuple[Tuple[Fraction, int], ...]]:
    """Mixture defeating any claimed depth rate r at every included scale.

    For n = 1..N set eps_n = 2^-n (1/2 - gamma) and d_n = rate(eps_n); mix
    the pn_family(2 d_n + 2) distributions with coefficients 2^-n
    (renormalized). Each component forces depth > d_n at accuracy eps_n,
    and the mixture inherits every one of those lower bounds.

    Returns the instance and the schedule ((eps_1, d_1), ..., (eps_N, d_N)).
    """
    if not 0 < gamma < Fraction(1, 2):
        raise PreconditionError("gamma must lie in (0, 1/2)")
    if N < 1:
        raise PreconditionError("N must be >= 1")
    schedule = []
    sizes = []
    for n in range(1, N + 1):
        eps_n = Fraction(1, 2**n) * (Fraction(1, 2) - gamma)
        d_n = rate(float(eps_n))
        schedule.append((eps_n, d_n))
        sizes.append(2 * d_n + 2)
    m_max = max(sizes)
    total = sum(Fraction(1, 2**n) for n in range(1, N + 1))
    weights = [Fraction(0)] * (m_max + 1)
    for n, m in enumerate(sizes, start=1):
        coeff = Fraction(1, 2**n) / total
        weights[0] += coeff * Fraction(1, 2)
        for i in range(1, m + 1):
            weights[i] += coeff * Fraction(1, 2 * m)
    concept = [0] + [1] * m_max
    hyps = [
        (f"point{i}", [1 if j == i else 0 for j in range(m_max + 1)])
        for i in range(1, m_max + 1)
    ]
    return Instance(weights, concept, hyps), tuple(schedule)


# --- disk grids -------------------------------------------------------------

DISK_EXTENT = 1.28  # grid covers [-1.28, 1.28]^2


def _disk_cells(resolution: int) -> List[Tuple[float, float]]:
    step = 2 * DISK_EXTENT / resolution
    centers = [-DISK_EXTENT + step * (i + 0.5) for i in range(resolution)]
    return [(x, y) for y in centers for x in centers]


def _halfplane_hyps(
    cells: Sequence[Tuple[float, float]], angles: Sequence[float], resolution: int
) -> List[Tuple[str, List[int]]]:
    """Stumps {proj_angle <= t} with offsets on the grid lines, deduplicated."""
    step = 2 * DISK_EXTENT / resolution
    offsets = [-DISK_EXTENT + step * k for k in range(resolution + 1)]
    hyps: List[Tuple[str, List[int]]] = []
    seen = set()
    for a_idx, theta in enumerate(angles):
        ux, uy = math.cos(theta), math.sin(theta)
        projs = [x * ux + y * uy for x, y in cells]
        for t_idx, t in enumerate(offsets):
            bits = [1 if p <= t else 0 for p in projs]
            key = tuple(bits)
            if key in seen:
                continue
            seen.add(key)
            hyps.append((f"a{a_idx}t{t_idx}", bits))
    return hyps


def disk_grid(variant: str = "axis_only", resolution: int = 64) -> Instance:
    """Unit disk labeled on a grid of cell centers, split by halfplanes.

    Variants:
      * "axis_only": stumps are horizontal halfplanes {y <= t}; mass uniform
        on the shell of cells with center radius in [0.8, 1.1] (where
        one-direction cuts are structurally bad).
      * "margin": stumps at the 8 angles j*pi/8; mass uniform outside the
        band of cells with center radius in (0.9, 1.1), so the octagon of
        circumradius sec(pi/8) ~ 1.0824 separates the support exactly.

    Only positive-mass cells become domain points; zero-mass cells cannot
    affect any loss.
    """
    if resolution < 4:
        raise PreconditionError("resolution must be >= 4")
    all_cells = _disk_cells(resolution)
    if variant == "axis_only":
        keep = [(x, y) for x, y in all_cells if 0.8 <= math.hypot(x, y) <= 1.1]
        angles = [math.pi / 2]
    elif variant == "margin":
        keep = [
            (x, y)
            for x, y in all_cells
            if not 0.9 < math.hypot(x, y) < 1.1
        ]
        angles = [j * math.pi / 8 for j in range(8)]
    else:
        raise PreconditionError(f"unknown disk_grid variant {variant!r}")
    count = len(keep)
    weights = [Fraction(1, count)] * count
    concept = [1 if math.hypot(x, y) <= 1.0 else 0 for x, y in keep]
    hyps = _halfplane_hyps(keep, angles, resolution)
    return Instance(weights, concept, hyps, coords=keep)


def octagon_tree(inst: Instance) -> DecisionTree:
    """Depth-8 chain testing |proj_theta| <= 1 at the four axis/diagonal
    angles; exact on the margin variant's support."""
    step = 2 * DISK_EXTENT / 64  # offsets named by index on the 64-grid
    wanted = []
    for a_idx in (0, 2, 4, 6):  # angles 0, pi/4, pi/2, 3pi/4
        t_hi = round((1.0 + DISK_EXTENT) / step)
        t_lo = round((-1.0 + DISK_EXTENT) / step)
        wanted.append((f"a{a_idx}t{t_hi}", f"a{a_idx}t{t_lo}"))
    by_name = {h.name: i for i, h in enumerate(inst.hypotheses)}
    nodes: List[object] = []

    def chain(constraints) -> int:
        if not constraints:
            nodes.append(Leaf(1))
            return len(nodes) - 1
        hi_name, lo_name = constraints[0]
        if hi_name not in by_name or lo_name not in by_name:
            raise PreconditionError(
                f"instance lacks octagon stump {hi_name!r}/{lo_name!r}"
            )
        # proj <= 1 must hold (else outside); proj <= -1 must fail.
        idx_hi = len(nodes)
        nodes.append(None)
        nodes.append(Leaf(0))  # proj > 1
        idx_lo = len(nodes)
        nodes.append(None)
        nodes.append(Leaf(0))  # proj <= -1
        rest = chain(constraints[1:])
        nodes[idx_hi] = Internal(by_name[hi_name], idx_lo, idx_hi + 1)
        nodes[idx_lo] = Internal(by_name[lo_name], idx_lo + 1, rest)
        return idx_hi

    root = chain(wanted)
    return DecisionTree(tuple(nodes), root)


BUILDERS = {
    "two_point": lambda: two_point(),
    "pn": pn_family,
    "geometric": geometric_series,
    "adversarial": lambda N=3: adversarial_mixture(N=N)[0],
    "disk_axis": lambda resolution=64: disk_grid("axis_only", resolution),
    "disk_margin": lambda resolution=64: disk_grid("margin", resolution),
}


def build(name: str, *params) -> Instance:
    if name not in BUILDERS:
        raise PreconditionError(
            f"unknown demo {name!r}; choose from {sorted(BUILDERS)}"
        )
    return BUILDERS[name](*params)


# ---------------------------------------------------------------------------
# Trichotomy evidence


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str
    params: Tuple[int, ...]
    gamma: float
    builder: Callable[[int], Instance]

    def members(self) -> List[Instance]:
        if not self.params:
            raise PreconditionError("family has no parameters")
        return [self.builder(p) for p in self.params]


@dataclass(frozen=True)
class TrichotomyVerdict:
    """Finite-sample evidence label, not a proof about the infinite family.

    case is one of:
      * "case1": some member's concept is not even in the algebra over H
        (no tree of any depth is exact; approximability fails);
      * "case2": every member is approximable but no uniform depth d <= d_max
        achieves game value <= 1/2 - gamma across the family;
      * "case3": a single depth works for every member;
      * "inconclusive": a search budget ran out first.
    """

    case: str
    depth: Optional[int]
    table: Tuple[Tuple[int, float], ...]  # (d, max game value over family)
    detail: str


def trichotomy_classify(
    fam: FamilyDescriptor, gamma: float, d_max: int
) -> TrichotomyVerdict:
    members = fam.members()
    for param, inst in zip(fam.params, members):
        if not in_algebra(inst):
            return TrichotomyVerdict(
                case="case1",
                depth=None,
                table=(),
                detail=f"member {param}: concept is not a union of atoms",
            )
    try:
        sweep = weak_interpretability_sweep(members, gamma, d_max)
    except BudgetError as exc:
        return TrichotomyVerdict(
            case="inconclusive", depth=None, table=(), detail=str(exc)
        )
    if sweep.depth is not None:
        return TrichotomyVerdict(
            case="case3",
            depth=sweep.depth,
            table=sweep.table,
            detail=f"uniform depth {sweep.depth} beats value 1/2 - gamma",
        )
    return TrichotomyVerdict(
        case="case2",
        depth=None,
        table=sweep.table,
        detail=f"no uniform depth <= {d_max}; per-depth values stay above "
        f"{0.5 - gamma:.4f}",
    )
