"""Finite weighted domains with a binary concept and a stump class.

An :class:`Instance` packages the domain (point indices ``0..n-1``), a
probability distribution over it, the target concept, and the hypothesis
class, with every hypothesis materialized as a bitmask over the points.
Weights are kept as exact :class:`fractions.Fraction` values whenever the
builder can express them (the canonical dyadic instances), and as doubles
otherwise; all arithmetic on Fractions stays exact.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    BalanceUndefined,
    EmptyCondition,
    PreconditionError,
    StructuralError,
)

Num = Union[Fraction, float]

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class AtLeast:
    """Lower-bound result of a capped search (e.g. VC dimension >= bound)."""

    bound: int


def iter_bits(mask: int):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(bits: Sequence[int]) -> int:
    m = 0
    for i, b in enumerate(bits):
        if b:
            m |= 1 << i
    return m


def bits_of(mask: int, n: int) -> Tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(n))


def _is_exact(values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


@dataclass(frozen=True)
class Distribution:
    """Nonnegative per-point mass summing to one over an instance's index space."""

    weights: Tuple[Num, ...]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise StructuralError("distribution has a negative weight")
        total = sum(self.weights)
        if _is_exact(self.weights):
            if total != 1:
                raise StructuralError(f"exact weights sum to {total}, not 1")
        elif abs(float(total) - 1.0) > WEIGHT_TOL:
            raise StructuralError(f"weights sum to {float(total)!r}, not 1")

    @property
    def n_points(self) -> int:
        return len(self.weights)

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.weights)

    @property
    def support_mask(self) -> int:
        m = 0
        for i, w in enumerate(self.weights):
            if w > 0:
                m |= 1 << i
        return m

    def mass(self, mask: int) -> Num:
        return sum(self.weights[i] for i in iter_bits(mask))

    def as_floats(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights], dtype=float)


class Hypothesis:
    """A named 0/1 extension vector, stored as a bitmask."""

    __slots__ = ("name", "mask")

    def __init__(self, name: str, mask: int):
        self.name = name
        self.mask = mask

    def __repr__(self):
        return f"Hypothesis({self.name!r}, {bin(self.mask)})"


class Instance:
    """Finite domain (X, P, c, H).

    Invariants enforced at construction: weights normalize to one, every
    hypothesis and the concept cover exactly ``n_points`` points, and no two
    hypotheses share the same extension.
    """

    def __init__(
        self,
        weights: Sequence[Num],
        concept: Sequence[int],
        hypotheses: Sequence[Tuple[str, Sequence[int]]],
        coords: Optional[Sequence[Tuple[float, float]]] = None,
    ):
        self.weights: Tuple[Num, ...] = tuple(weights)
        self.n_points = len(self.weights)
        if len(concept) != self.n_points:
            raise StructuralError("concept length differs from n_points")
        self.concept: Tuple[int, ...] = tuple(int(b) for b in concept)
        if any(b not in (0, 1) for b in self.concept):
            raise StructuralError("concept must be a 0/1 vector")
        self.concept_mask = mask_of(self.concept)
        self.full_mask = (1 << self.n_points) - 1

        hyps: List[Hypothesis] = []
        seen: Dict[int, str] = {}
        for name, bits in hypotheses:
            if len(bits) != self.n_points:
                raise StructuralError(f"hypothesis {name!r} has wrong length")
            m = mask_of(bits)
            if m in seen:
                raise StructuralError(
                    f"hypotheses {seen[m]!r} and {name!r} have identical extensions"
                )
            seen[m] = name
            hyps.append(Hypothesis(name, m))
        self.hypotheses: Tuple[Hypothesis, ...] = tuple(hyps)
        self.coords = tuple(tuple(c) for c in coords) if coords is not None else None
        if self.coords is not None and len(self.coords) != self.n_points:
            raise StructuralError("coords length differs from n_points")

        # Validates normalization.
        self.distribution = Distribution(self.weights)
        self._float_cache: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None

    @property
    def n_hypotheses(self) -> int:
        return len(self.hypotheses)

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.weights)

    def hyp_mask(self, index: int) -> int:
        try:
            return self.hypotheses[index].mask
        except IndexError:
            raise StructuralError(f"hypothesis index {index} out of range") from None

    def float_arrays(self):
        """(weights, concept, hypothesis matrix) as numpy arrays, cached."""
        if self._float_cache is None:
            w = np.array([float(x) for x in self.weights], dtype=float)
            c = np.array(self.concept, dtype=float)
            h = np.zeros((self.n_hypotheses, self.n_points), dtype=float)
            for j, hyp in enumerate(self.hypotheses):
                for i in iter_bits(hyp.mask):
                    h[j, i] = 1.0
            self._float_cache = (w, c, h)
        return self._float_cache

    def __repr__(self):
        return (
            f"Instance(n={self.n_points}, |H|={self.n_hypotheses}, "
            f"exact={self.is_exact})"
        )


# ---------------------------------------------------------------------------
# Operations


def mask_loss(behavior_mask: int, inst: Instance, dist: Distribution) -> Num:
    """Mass of the symmetric difference between a behavior and the concept."""
    return dist.mass(behavior_mask ^ inst.concept_mask)


def loss(tree, inst: Instance, dist: Distribution) -> Num:
    """P(T(x) != c(x)): the mass where the tree disagrees with the concept."""
    from .tree import behavior_of

    return mask_loss(behavior_of(tree, inst), inst, dist)


def balanced(dist: Distribution, inst: Instance) -> Distribution:
    """Rescale each concept class so both carry mass exactly 1/2."""
    pos = dist.mass(inst.concept_mask)
    neg = dist.mass(inst.full_mask & ~inst.concept_mask)
    if pos <= 0 or neg <= 0:
        raise BalanceUndefined(
            f"cannot balance: class masses pos={float(pos)} neg={float(neg)}"
        )
    half = Fraction(1, 2) if isinstance(pos, Fraction) and isinstance(neg, Fraction) else 0.5
    new = tuple(
        w * (half / pos if inst.concept[i] else half / neg)
        for i, w in enumerate(dist.weights)
    )
    return Distribution(new)


def conditional(dist: Distribution, subset_mask: int) -> Distribution:
    """Renormalized restriction of ``dist`` to a subset of points."""
    total = dist.mass(subset_mask)
    if total <= 0:
        raise EmptyCondition("conditioning on a zero-mass subset")
    new = tuple(
        w / total if (subset_mask >> i) & 1 else (0 * w)
        for i, w in enumerate(dist.weights)
    )
    return Distribution(new)


def atoms(inst: Instance) -> List[Tuple[int, ...]]:
    """Partition of point indices into classes indistinguishable by every hypothesis."""
    groups: Dict[Tuple[int, ...], List[int]] = {}
    for i in range(inst.n_points):
        sig = tuple((h.mask >> i) & 1 for h in inst.hypotheses)
        groups.setdefault(sig, []).append(i)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def in_algebra(inst: Instance) -> bool:
    """True iff the concept is constant on every atom (a union of atoms)."""
    for group in atoms(inst):
        labels = {inst.concept[i] for i in group}
        if len(labels) > 1:
            return False
    return True


def vc_dimension(inst: Instance, cap: Optional[int] = None) -> Union[int, AtLeast]:
    """Exact VC dimension of (X, H) by exhaustive shattering search.

    Returns ``AtLeast(cap)`` when some subset of size ``cap`` is shattered,
    since larger subsets are not examined.
    """
    n = inst.n_points
    if cap is None:
        cap = n
    if cap > n:
        raise PreconditionError(f"cap {cap} exceeds n_points {n}")
    masks = [h.mask for h in inst.hypotheses]

    def shattered(points: Tuple[int, ...]) -> bool:
        k = len(points)
        patterns = set()
        for m in masks:
            patterns.add(tuple((m >> p) & 1 for p in points))
            if len(patterns) == 1 << k:
                return True
        return len(patterns) == 1 << k

    best = 0
    for k in range(1, cap + 1):
        if not any(shattered(pts) for pts in itertools.combinations(range(n), k)):
            return k - 1
        best = k
    return AtLeast(cap) if best == cap and cap < n else best


# ---------------------------------------------------------------------------
# JSON serialization

_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*/\s*2\^(\d+)\s*$")
_RATIO_RE = re.compile(r"^\s*(-?\d+)\s*/\s*(\d+)\s*$")


def parse_weight(value) -> Num:
    if isinstance(value, str):
        m = _DYADIC_RE.match(value)
        if m:
            return Fraction(int(m.group(1)), 2 ** int(m.group(2)))
        m = _RATIO_RE.match(value)
        if m:
            return Fraction(int(m.group(1)), int(m.group(2)))
        raise StructuralError(f"unparseable weight string {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise StructuralError(f"unsupported weight type {type(value).__name__}")


def format_weight(w: Num):
    if isinstance(w, Fraction):
        if w.denominator == 1:
            return int(w)
        k = w.denominator.bit_length() - 1
        if w.denominator == 1 << k:
            return f"{w.numerator}/2^{k}"
        return f"{w.numerator}/{w.denominator}"
    return float(w)


def instance_to_json(inst: Instance) -> str:
    doc = {
        "n": inst.n_points,
        "weights": [format_weight(w) for w in inst.weights],
        "concept": list(inst.concept),
        "hypotheses": [
            {"name": h.name, "bits": list(bits_of(h.mask, inst.n_points))}
            for h in inst.hypotheses
        ],
    }
    if inst.coords is not None:
        doc["coords"] = [list(c) for c in inst.coords]
    return json.dumps(doc, indent=1)


def instance_from_json(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"invalid instance JSON: {exc}") from exc
    try:
        n = doc["n"]
        weights = [parse_weight(w) for w in doc["weights"]]
        concept = doc["concept"]
        hyps = [(h["name"], h["bits"]) for h in doc["hypotheses"]]
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"instance JSON missing field: {exc}") from exc
    if len(weights) != n:
        raise StructuralError("weights length disagrees with n")
    coords = doc.get("coords")
    return Instance(weights, concept, hyps, coords=coords)
