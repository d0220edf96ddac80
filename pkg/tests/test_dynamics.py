import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from greedynet.dynamics import (
    CONVERGED,
    CYCLE,
    EXHAUSTED,
    FULL_STRATEGIES,
    STEP_LIMIT,
    ActivationSchedule,
    ScriptedMoves,
    detect_cycle,
    run_best_response_dynamics,
    run_improving_dynamics,
)
from greedynet.equilibria import is_greedy_equilibrium, is_nash_equilibrium
from greedynet.game import StrategyProfile, ZPolicy, agent_cost_of, default_z
from greedynet.metric import metric_from_one_two
from greedynet.onetwo import max_dsg
from greedynet.scenarios import irc_instance
from greedynet.tree import canonical_gt, weak_acyclicity_schedule

import oracles


def test_ne_start_converges_without_moves():
    m = metric_from_one_two(4, [(0, 1), (1, 2), (2, 3)])
    s = max_dsg(m)
    a = Fraction(3, 10)
    for run in (run_improving_dynamics, run_best_response_dynamics):
        tr = run(m, s, a)
        assert tr.status == CONVERGED and not tr.steps and tr.final == s
        assert tr.activations == m.n


def test_irc_scripted_cycle():
    sc = irc_instance()
    u, v = sc.node("u"), sc.node("v")
    tr = run_improving_dynamics(sc.metric, sc.profile, sc.alpha, ActivationSchedule.explicit([u, v] * 3),
                                ScriptedMoves(sc.meta["scripts"]), sc.z, steps=20)
    assert tr.status == CYCLE
    assert (tr.cycle_start, tr.cycle_period) == (0, 4)
    ps = tr.profiles()
    assert ps[4] == ps[0]
    for k, step in enumerate(tr.steps):
        before = agent_cost_of(sc.metric, ps[k], step.agent, sc.alpha).total(sc.z)
        after = agent_cost_of(sc.metric, ps[k + 1], step.agent, sc.alpha).total(sc.z)
        assert after - before == -(sc.z.value - 1)
        assert step.delta == float(after - before)


def test_scripted_moves_cycle_through_list():
    sm = ScriptedMoves({0: [{1}, {2}]})
    assert sm(None, None, 0) == [frozenset({1})]
    assert sm(None, None, 0) == [frozenset({2})]
    assert sm(None, None, 0) == [frozenset({1})]
    assert sm(None, None, 1) == []


def test_detect_cycle():
    a = StrategyProfile.from_lists([[1], []])
    b = StrategyProfile.from_lists([[], [0]])
    assert detect_cycle([a, b, a]) == (0, 2)
    assert detect_cycle([a, b]) is None
    assert detect_cycle([]) is None


def test_step_limit_and_exhausted_statuses():
    m = metric_from_one_two(3, [])
    s = StrategyProfile.empty(3)
    tr = run_improving_dynamics(m, s, 1, steps=1)
    assert tr.status == STEP_LIMIT and len(tr.steps) == 1
    tr = run_improving_dynamics(m, s, 1, ActivationSchedule.explicit([0]))
    assert tr.status == EXHAUSTED and tr.final[0]
    assert run_improving_dynamics(m, s, 1, ActivationSchedule.explicit([])).status == EXHAUSTED


def test_explicit_schedule_that_reaches_fixpoint_reports_converged():
    m = metric_from_one_two(2, [])
    tr = run_improving_dynamics(m, StrategyProfile.empty(2), 1, ActivationSchedule.explicit([0, 1]))
    assert tr.status == CONVERGED
    assert tr.final.canonical() == ((1,), (0,))


def test_random_schedule_is_reproducible():
    rng = random.Random(0)
    m = oracles.random_one_two(rng, 6)
    s = oracles.random_profile(rng, 6)
    a = run_improving_dynamics(m, s, 1, ActivationSchedule.random(7), steps=200)
    b = run_improving_dynamics(m, s, 1, ActivationSchedule.random(7), steps=200)
    assert a.to_json() == b.to_json()


def test_full_strategy_source_uses_best_responses():
    m = metric_from_one_two(3, [(0, 1)])
    s = StrategyProfile.empty(3)
    a = run_improving_dynamics(m, s, 1, move_source=FULL_STRATEGIES)
    b = run_best_response_dynamics(m, s, 1)
    assert a.to_json() == b.to_json()


def test_weak_acyclicity_schedule_reaches_tree_network():
    rng = random.Random(11)
    for _ in range(15):
        t, m = oracles.random_tree_metric(rng, rng.randint(2, 9))
        s0 = oracles.random_profile(rng, m.n, rng.random())
        a = rng.choice([Fraction(1, 2), Fraction(1), Fraction(5)])
        tr = run_best_response_dynamics(m, s0, a, weak_acyclicity_schedule(t, s0))
        assert tr.status == CONVERGED
        assert tr.final.canonical() == canonical_gt(t).canonical()


@given(st.integers(0, 2**32), st.sampled_from([Fraction(3, 10), Fraction(1), Fraction(3)]))
@settings(max_examples=30, deadline=None)
def test_converged_profiles_are_equilibria(seed, a):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    m = oracles.random_one_two(rng, n, rng.random())
    s0 = oracles.random_profile(rng, n, rng.random())
    tr = run_improving_dynamics(m, s0, a, steps=500)
    if tr.status == CONVERGED:
        assert is_greedy_equilibrium(m, tr.final, a).holds
        assert oracles.is_ge(m, tr.final, a)
    tr = run_best_response_dynamics(m, s0, a, steps=500)
    if tr.status == CONVERGED:
        assert is_nash_equilibrium(m, tr.final, a).holds


@given(st.integers(0, 2**32), st.sampled_from([Fraction(3, 10), Fraction(2, 5)]))
@settings(max_examples=30, deadline=None)
def test_best_response_dynamics_on_one_two_low_alpha_never_cycle(seed, a):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    m = oracles.random_one_two(rng, n, rng.random())
    s0 = oracles.random_profile(rng, n, rng.random())
    tr = run_best_response_dynamics(m, s0, a, steps=10 * n)
    assert tr.status == CONVERGED


@given(st.integers(0, 2**32))
@settings(max_examples=30, deadline=None)
def test_every_step_strictly_improves_mover(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    m = oracles.random_one_two(rng, n, rng.random())
    a = Fraction(rng.choice([3, 10, 25]), 10)
    z = ZPolicy.numeric(default_z(a, n))
    tr = run_improving_dynamics(m, oracles.random_profile(rng, n), a, ActivationSchedule.random(seed), z=z, steps=60)
    ps = tr.profiles()
    for k, step in enumerate(tr.steps):
        before = agent_cost_of(m, ps[k], step.agent, a).total(z)
        after = agent_cost_of(m, ps[k + 1], step.agent, a).total(z)
        assert after < before
