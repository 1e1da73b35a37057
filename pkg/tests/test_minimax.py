import random
from fractions import Fraction

import numpy as np
import pytest

from treelucid.errors import PreconditionError
from treelucid.instance import Instance, loss, mask_loss
from treelucid.minimax import (
    compress,
    derandomize,
    game_value,
    weak_interpretability_sweep,
)
from treelucid.tree import depth as tree_depth, evaluate

from conftest import lp_game_value, random_instance

F = Fraction


def pn(n):
    weights = [F(1, 2)] + [F(1, 2 * n)] * n
    concept = [0] + [1] * n
    hyps = [
        (f"s{i}", [1 if j == i else 0 for j in range(n + 1)])
        for i in range(1, n + 1)
    ]
    return Instance(weights, concept, hyps)


def two_point():
    return Instance([F(1, 2), F(1, 2)], [0, 1], [("X", [1, 1])])


def thirds_instance():
    """Uniform 3 points, concept {0,1,2}... arranged so the three optimal
    depth-1 behaviors are each wrong on exactly one point and D* mixes them."""
    # concept = {0,1,2} over 6 points; hypothesis i covers concept minus
    # point i plus a matching decoy, so each is wrong on exactly 2 of 6
    return Instance(
        [F(1, 6)] * 6,
        [1, 1, 1, 0, 0, 0],
        [
            ("h0", [0, 1, 1, 1, 0, 0]),
            ("h1", [1, 0, 1, 0, 1, 0]),
            ("h2", [1, 1, 0, 0, 0, 1]),
        ],
    )


class TestGameValue:
    def test_concept_in_class_zero(self):
        inst = Instance(
            [F(1, 2), F(1, 4), F(1, 4)],
            [1, 1, 0],
            [("c", [1, 1, 0]), ("b", [1, 0, 0])],
        )
        sol = game_value(inst, 1)
        assert sol.value == pytest.approx(0.0, abs=1e-9)

    def test_two_point_half_at_every_depth(self):
        inst = two_point()
        for d in range(4):
            sol = game_value(inst, d)
            assert sol.value == pytest.approx(0.5, abs=1e-9)
            assert sol.duality_gap <= 1e-6

    def test_matches_direct_lp(self):
        rng = random.Random(55)
        for _ in range(25):
            inst = random_instance(rng, max_n=8, max_h=4)
            for d in (1, 2):
                sol = game_value(inst, d)
                want = lp_game_value(inst, d)
                assert sol.value == pytest.approx(want, abs=1e-6)
                assert sol.duality_gap <= 1e-6

    def test_strategy_certificates(self):
        rng = random.Random(60)
        for _ in range(15):
            inst = random_instance(rng, max_n=8, max_h=4)
            sol = game_value(inst, 1)
            q = np.array(sol.tree_strategy)
            # expected loss of the mixed strategy at EVERY point <= value + tol
            for x in range(inst.n_points):
                exp_loss = sum(
                    w * ((b ^ inst.concept_mask) >> x & 1)
                    for w, b in zip(sol.tree_strategy, sol.behaviors)
                )
                assert exp_loss <= sol.value + 1e-6
            # the adversary's strategy guarantees value against every behavior
            p = sol.point_strategy
            for b in sol.behaviors:
                assert float(mask_loss(b, inst, p)) >= sol.value - 1e-6
            assert q.sum() == pytest.approx(1.0)

    def test_value_nonincreasing_in_depth(self):
        rng = random.Random(61)
        for _ in range(10):
            inst = random_instance(rng, max_n=8, max_h=4)
            values = [game_value(inst, d).value for d in range(3)]
            for a, b in zip(values, values[1:]):
                assert b <= a + 1e-9


class TestDerandomize:
    def test_single_zero_loss_tree(self):
        inst = Instance(
            [F(1, 2), F(1, 4), F(1, 4)],
            [1, 1, 0],
            [("c", [1, 1, 0])],
        )
        sol = game_value(inst, 1)
        der = derandomize(inst, sol, gamma=0.4)
        assert len(der.indices) == 1
        j = der.indices[0]
        assert mask_loss(sol.behaviors[j], inst, inst.distribution) == 0

    def test_three_way_mixture(self):
        inst = thirds_instance()
        sol = game_value(inst, 1)
        gamma = 0.5 - sol.value - 1e-9
        der = derandomize(inst, sol, gamma=gamma)
        counts = np.zeros(inst.n_points)
        for j in der.indices:
            wrong = sol.behaviors[j] ^ inst.concept_mask
            counts += [(wrong >> x) & 1 for x in range(inst.n_points)]
        assert (counts / len(der.indices) < 0.5).all()
        assert der.margin >= gamma / 2 - 1e-9

    def test_precondition(self):
        inst = two_point()
        sol = game_value(inst, 1)
        with pytest.raises(PreconditionError):
            derandomize(inst, sol, gamma=0.25)

    def test_margin_meets_half_gamma(self):
        rng = random.Random(70)
        done = 0
        for _ in range(40):
            inst = random_instance(rng, max_n=8, max_h=4)
            sol = game_value(inst, 2)
            gamma = 0.5 - sol.value - 1e-6
            if gamma < 0.05:
                continue
            der = derandomize(inst, sol, gamma=gamma, seed=done)
            assert der.margin >= gamma / 2 - 1e-9
            done += 1
        assert done >= 10


class TestCompress:
    def test_concept_in_class_single_stump(self):
        inst = Instance(
            [F(1, 2), F(1, 4), F(1, 4)],
            [1, 1, 0],
            [("c", [1, 1, 0])],
        )
        result = compress(inst, 1, gamma=0.4)
        assert result.multiset_size == 1
        assert tree_depth(result.tree) == 1
        assert loss(result.tree, inst, inst.distribution) == 0

    def test_three_way_depth_three(self):
        inst = thirds_instance()
        sol = game_value(inst, 1)
        gamma = 0.5 - sol.value - 1e-9
        result = compress(inst, 1, gamma=gamma)
        assert tree_depth(result.tree) == result.multiset_size * 1
        for x in range(inst.n_points):
            assert evaluate(result.tree, x, inst) == inst.concept[x]

    def test_zero_error_and_exact_depth(self):
        rng = random.Random(80)
        done = 0
        for _ in range(40):
            inst = random_instance(rng, max_n=8, max_h=4)
            for d in (1, 2):
                sol = game_value(inst, d)
                gamma = 0.5 - sol.value - 1e-6
                if gamma < 0.05:
                    continue
                result = compress(inst, d, gamma=gamma, seed=done)
                assert tree_depth(result.tree) == result.multiset_size * d
                for x in range(inst.n_points):
                    assert evaluate(result.tree, x, inst) == inst.concept[x]
                done += 1
        assert done >= 10

    def test_precondition_surfaces(self):
        inst = two_point()
        with pytest.raises(PreconditionError):
            compress(inst, 1, gamma=0.25)


class TestSweep:
    def test_concept_in_class_depth_one(self):
        fam = [
            Instance(
                [F(1, 2), F(1, 4), F(1, 4)],
                [1, 1, 0],
                [("c", [1, 1, 0])],
            )
        ]
        result = weak_interpretability_sweep(fam, gamma=0.4, d_max=3)
        assert result.depth == 1

    def test_pn_family_has_no_uniform_depth(self):
        fam = [pn(n) for n in (2, 4, 6, 8)]
        result = weak_interpretability_sweep(fam, gamma=0.25, d_max=3)
        assert result.depth is None
        values = [v for _, v in result.table]
        assert all(v > 0.25 for v in values)

    def test_two_point_never(self):
        result = weak_interpretability_sweep([two_point()], gamma=0.1, d_max=4)
        assert result.depth is None

    def test_empty_family_rejected(self):
        with pytest.raises(PreconditionError):
            weak_interpretability_sweep([], gamma=0.1, d_max=2)
