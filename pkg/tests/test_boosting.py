import math
import random
from fractions import Fraction

import pytest

from treelucid.boosting import (
    BoostConfig,
    certify,
    phase_bound,
    topdown_lbl,
    weak_learn,
)
from treelucid.errors import PreconditionError
from treelucid.instance import Instance, balanced, loss
from treelucid.oracle import min_depth
from treelucid.tree import depth as tree_depth

from conftest import singleton_instance

F = Fraction


def pn(n):
    weights = [F(1, 2)] + [F(1, 2 * n)] * n
    concept = [0] + [1] * n
    hyps = [
        (f"s{i}", [1 if j == i else 0 for j in range(n + 1)])
        for i in range(1, n + 1)
    ]
    return Instance(weights, concept, hyps)


def concept_in_class():
    return Instance(
        [F(1, 2), F(1, 4), F(1, 4)],
        [1, 1, 0],
        [("c", [1, 1, 0]), ("b", [1, 0, 0])],
    )


class TestPhaseBound:
    def test_quarter_gamma(self):
        assert phase_bound(0.25, 0.05) == 19

    def test_eighth_gamma(self):
        assert phase_bound(0.125, 0.01) == 126

    def test_rejects_bad_params(self):
        with pytest.raises(PreconditionError):
            phase_bound(0.5, 0.05)
        with pytest.raises(PreconditionError):
            phase_bound(0.25, 0)


class TestConfig:
    def test_validation(self):
        with pytest.raises(PreconditionError):
            BoostConfig(gamma=0.6, epsilon=0.1)
        with pytest.raises(PreconditionError):
            BoostConfig(gamma=0.1, epsilon=0.1, weak_depth=0)
        with pytest.raises(PreconditionError):
            BoostConfig(gamma=0.1, epsilon=0.1, weak_mode="magic")

    def test_default_phases(self):
        cfg = BoostConfig(gamma=0.25, epsilon=0.05)
        assert cfg.phases == 19
        assert BoostConfig(gamma=0.25, epsilon=0.05, max_phases=4).phases == 4


class TestWeakLearn:
    def test_concept_in_class_zero_error(self):
        inst = concept_in_class()
        bal = balanced(inst.distribution, inst)
        for mode in ("exact", "greedy"):
            t, err = weak_learn(inst, bal, 1, mode)
            assert float(err) == 0
            assert tree_depth(t) == 1

    def test_xor_no_stump_advantage(self):
        inst = Instance(
            [F(1, 4)] * 4,
            [0, 1, 1, 0],
            [("x", [0, 1, 0, 1]), ("y", [0, 0, 1, 1])],
        )
        bal = balanced(inst.distribution, inst)
        _, err = weak_learn(inst, bal, 1, "greedy")
        assert float(err) == pytest.approx(0.5)

    def test_pn4_stump_error(self):
        inst = pn(4)
        bal = balanced(inst.distribution, inst)
        t, err = weak_learn(inst, bal, 1, "exact")
        assert err == F(3, 8)
        _, err_g = weak_learn(inst, bal, 1, "greedy")
        assert float(err_g) == pytest.approx(0.375)

    def test_requires_balanced(self):
        inst = concept_in_class()  # classes carry mass 3/4 and 1/4
        with pytest.raises(PreconditionError):
            weak_learn(inst, inst.distribution, 1, "exact")

    def test_exact_beats_greedy_at_depth_two(self):
        rng = random.Random(77)
        for _ in range(20):
            inst = singleton_instance(rng)
            bal = balanced(inst.distribution, inst)
            _, e1 = weak_learn(inst, bal, 1, "greedy")
            _, e2 = weak_learn(inst, bal, 2, "exact")
            assert float(e2) <= float(e1) + 1e-12


class TestTopDown:
    def test_concept_in_class_one_phase(self):
        inst = concept_in_class()
        cfg = BoostConfig(gamma=0.25, epsilon=0.05)
        trace = topdown_lbl(inst, inst.distribution, cfg)
        assert trace.phases == 1
        assert tree_depth(trace.tree) == 1
        assert trace.final_loss == 0
        assert trace.fully_certified

    def test_depth_bounded_by_phases(self):
        rng = random.Random(5)
        for _ in range(20):
            inst = singleton_instance(rng)
            cfg = BoostConfig(gamma=0.25, epsilon=0.05, weak_depth=1)
            trace = topdown_lbl(inst, inst.distribution, cfg)
            assert tree_depth(trace.tree) <= trace.phases * cfg.weak_depth
            assert float(trace.final_loss) <= trace.surrogates[-1] + 1e-9

    def test_surrogate_never_increases(self):
        rng = random.Random(6)
        for _ in range(20):
            inst = singleton_instance(rng)
            # deliberately overclaimed gamma: phases may be uncertified,
            # but monotonicity must still hold
            cfg = BoostConfig(gamma=0.49, epsilon=0.01, max_phases=6)
            trace = topdown_lbl(inst, inst.distribution, cfg)
            for a, b in zip(trace.surrogates, trace.surrogates[1:]):
                assert b <= a + 1e-9

    def test_pn6_small_gamma_certifies(self):
        inst = pn(6)
        cfg = BoostConfig(gamma=1 / 12, epsilon=0.01, weak_depth=1)
        trace = topdown_lbl(inst, inst.distribution, cfg)
        factor = 1 - 2 * (1 / 12) ** 2
        for a, b in zip(trace.surrogates, trace.surrogates[1:]):
            assert b <= factor * a + 1e-9
        assert trace.fully_certified

    def test_certified_depth_dominates_oracle(self):
        rng = random.Random(12)
        for _ in range(10):
            inst = singleton_instance(rng)
            cfg = BoostConfig(gamma=0.25, epsilon=0.05)
            trace = topdown_lbl(inst, inst.distribution, cfg)
            eps = trace.surrogates[-1]
            oracle_d = min_depth(inst, inst.distribution, eps + 1e-12, 8)
            if not isinstance(oracle_d, int):
                continue
            assert tree_depth(trace.tree) >= oracle_d


class TestCertify:
    def test_stalled_trace_flagged(self):
        inst = pn(4)
        cfg = BoostConfig(gamma=0.25, epsilon=0.05, max_phases=2)
        trace = topdown_lbl(inst, inst.distribution, cfg)
        # fabricate a no-progress trace by reusing H0 twice
        stalled = trace.__class__(
            surrogates=(0.5, 0.5),
            advantages=(0.0,),
            certified=(False,),
            shortfalls=(),
            tree=trace.tree,
            final_loss=trace.final_loss,
            phases=1,
        )
        report = certify(stalled, cfg)
        assert report.first_violation == 1

    def test_certified_run_meets_global_bound(self):
        rng = random.Random(19)
        for _ in range(20):
            inst = singleton_instance(rng)
            cfg = BoostConfig(gamma=0.25, epsilon=0.05)
            trace = topdown_lbl(inst, inst.distribution, cfg)
            report = certify(trace, cfg)
            if trace.fully_certified:
                assert report.first_violation is None
                m = trace.phases
                assert float(trace.final_loss) <= 0.5 * math.exp(
                    -2 * m * cfg.gamma**2
                ) + 1e-9

    def test_shortfall_recorded_on_hopeless_instance(self):
        # full-domain stump gives zero advantage; claimed gamma must fail
        inst = Instance([F(1, 2), F(1, 2)], [0, 1], [("X", [1, 1])])
        cfg = BoostConfig(gamma=0.25, epsilon=0.05, max_phases=3)
        trace = topdown_lbl(inst, inst.distribution, cfg)
        assert trace.shortfalls
        assert not trace.fully_certified
