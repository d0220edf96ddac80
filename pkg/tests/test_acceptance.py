"""End-to-end acceptance checks, one test per criterion.

The terminal summary prints one PASS/FAIL line per criterion (see conftest).
"""
import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from greedynet.dynamics import CONVERGED, CYCLE, run_best_response_dynamics
from greedynet.equilibria import (
    approx_factor,
    best_response_exact,
    complete_graph_profile,
    count_greedy_equilibria,
    is_greedy_equilibrium,
    is_nash_equilibrium,
)
from greedynet.game import (
    ZPolicy,
    agent_cost_of,
    build_network,
    default_z,
    greedy_distance,
    is_greedy_path,
    routing_enabled,
    stretch,
)
from greedynet.metric import metric_from_points, validate_metric
from greedynet.onetwo import bdsg, dominating_set_gadget, is_bdsg, is_dsg, log_approx_ne, max_dsg
from greedynet.scenarios import (
    EXAMPLE_ASSIGNMENT,
    EXAMPLE_FORMULA,
    euclid_setcover_gadget,
    fig1_instance,
    ge_gap_instance,
    irc_instance,
    no_ge_instance,
    repaired_sat_profile,
    sat_equilibrium_profile,
    sat_reduction,
)
from greedynet.dynamics import ActivationSchedule, ScriptedMoves, run_improving_dynamics
from greedynet.theta import (
    CLAIMED_FACTOR,
    THETA6_STRETCH,
    THETA8_STRETCH,
    ConeSystem,
    lower_bound_instance,
    route_all,
    select_approx_construction,
    small_k_counterexample,
    switch_threshold,
    theta_graph,
)
from greedynet.tree import canonical_gt, tree_setcover_gadget, weak_acyclicity_schedule

import oracles

criterion = pytest.mark.criterion


def _numeric(a, m):
    return ZPolicy.numeric(default_z(a, m.n, m.exact))


@criterion(1, "greedy distance and stretch of the two-path example")
def test_c01_fig1():
    sc = fig1_instance()
    g = build_network(sc.metric, sc.profile)
    u, v, w = sc.node("u"), sc.node("v"), sc.node("w")
    gd = greedy_distance(g, u, v).value
    assert abs(gd - (2 * math.sqrt(2) + 4)) <= 1e-9
    assert abs(stretch(g, u, v) - (2 * math.sqrt(2) + 4) / 6) <= 1e-9
    assert not is_greedy_path(sc.metric, (u, w, v))
    print(f"gd={gd!r} stretch={stretch(g, u, v)!r}")


@criterion(2, "1-2 stretch law on 200 random instances")
def test_c02_one_two_stretch_law():
    rng = random.Random(2)
    seen = set()
    for _ in range(200):
        n = rng.randint(2, 10)
        m = oracles.random_one_two(rng, n, rng.random())
        s = oracles.random_profile(rng, n, rng.random())
        g = build_network(m, s)
        for u in range(n):
            for v in range(n):
                if u == v:
                    continue
                r = greedy_distance(g, u, v)
                if r.reachable:
                    st = r.value / m.d(u, v)
                    assert isinstance(st, Fraction) and st in (1, Fraction(3, 2))
                    assert len(r.path) - 1 <= 2
                    seen.add(st)
    assert seen == {1, Fraction(3, 2)}


@criterion(3, "NE characterisation on 50 random 1-2 instances")
def test_c03_ne_characterisation():
    rng = random.Random(3)
    rejected = 0
    for i in range(50):
        n = rng.randint(2, 8)
        m = oracles.random_one_two(rng, n, rng.random())
        low = Fraction(3, 10)
        assert is_nash_equilibrium(m, max_dsg(m), low).holds
        for a in (Fraction(3, 5), Fraction(1), Fraction(2)):
            assert is_nash_equilibrium(m, bdsg(m, a), a).holds
        a = [low, Fraction(3, 5), Fraction(1), Fraction(2)][i % 4]
        done = 0
        while done < 20:
            s = oracles.random_profile(rng, n, rng.random())
            if is_bdsg(m, s, a):
                continue
            assert not is_nash_equilibrium(m, s, a).holds
            done += 1
            rejected += 1
    assert rejected == 1000


@criterion(4, "best-response dynamics on 1-2 metrics never cycle")
def test_c04_no_best_response_cycles():
    rng = random.Random(4)
    worst = 0
    for _ in range(100):
        n = rng.randint(2, 8)
        m = oracles.random_one_two(rng, n, rng.random())
        a = rng.choice([Fraction(3, 10), Fraction(3, 5), Fraction(1), Fraction(2), Fraction(5)])
        s0 = oracles.random_profile(rng, n, rng.random())
        tr = run_best_response_dynamics(m, s0, a, steps=200)
        assert tr.status != CYCLE
        assert tr.status == CONVERGED
        worst = max(worst, tr.activations)
    print(f"most activations needed: {worst}")


@criterion(5, "improving-response cycle of length four")
def test_c05_irc():
    sc = irc_instance()
    u, v = sc.node("u"), sc.node("v")
    assert sc.z.mode == "numeric"
    tr = run_improving_dynamics(sc.metric, sc.profile, sc.alpha, ActivationSchedule.explicit([u, v] * 3),
                                ScriptedMoves(sc.meta["scripts"]), sc.z, steps=20)
    assert tr.status == CYCLE and tr.cycle_period == 4
    ps = tr.profiles()
    for k, step in enumerate(tr.steps):
        before = agent_cost_of(sc.metric, ps[k], step.agent, sc.alpha).total(sc.z)
        after = agent_cost_of(sc.metric, ps[k + 1], step.agent, sc.alpha).total(sc.z)
        assert after - before == -(sc.z.value - 1)


@criterion(6, "greedy equilibrium far from Nash")
@pytest.mark.parametrize("n,a", [(6, 2), (10, 5), (20, 100)])
def test_c06_ge_gap(n, a):
    sc = ge_gap_instance(n, a)
    m, s = sc.metric, sc.profile
    u, v, w = sc.node("u"), sc.node("v"), sc.node("w")
    assert is_greedy_equilibrium(m, s, a).holds
    assert not is_nash_equilibrium(m, s, a, exact_limit=n).holds
    cu = agent_cost_of(m, s, u, a).value
    dev = agent_cost_of(m, s.with_strategy(u, {v, w}), u, a).value
    beta = cu / dev
    ref = Fraction(n * (a + 1) - 2 * a - 1) / (2 * a + Fraction(3, 2) * n - Fraction(5, 2))
    assert abs(beta - ref) <= 1e-9
    rep = approx_factor(m, s, a, _numeric(a, m), exact_limit=n, agents=[u])
    assert abs(rep.beta[u] - float(ref)) <= 1e-9
    if n == 6:
        br = best_response_exact(m, s, u, a)
        assert br.cost.value == dev and br.strategy == {v, w}


@criterion(7, "the tree network is the unique greedy equilibrium")
def test_c07_tree_uniqueness():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(2, 10)
        t, m = oracles.random_tree_metric(rng, n)
        a = rng.choice([Fraction(1, 4), Fraction(1), Fraction(3), Fraction(10)])
        gt = canonical_gt(t)
        assert is_nash_equilibrium(m, gt, a).holds
        assert is_greedy_equilibrium(m, gt, a).holds
        for _ in range(10):
            x = rng.randrange(n)
            y = rng.choice([w for w in range(n) if w != x])
            pert = gt.with_strategy(x, gt[x] ^ {y})
            assert not is_greedy_equilibrium(m, pert, a).holds
        for _ in range(20):
            s0 = oracles.random_profile(rng, n, rng.random())
            tr = run_best_response_dynamics(m, s0, a, weak_acyclicity_schedule(t, s0))
            assert tr.status == CONVERGED and tr.final == gt


@criterion(8, "no greedy equilibrium among all 16^5 profiles")
def test_c08_no_ge_exhaustive():
    sc = no_ge_instance(Fraction(1, 1000), Fraction(3, 5))
    cnt, _ = count_greedy_equilibria(sc.metric, sc.alpha)
    print(f"greedy equilibria: {cnt}")
    assert cnt == 0


@criterion(9, "theta-graph guarantees")
def test_c09a_small_k_unreachable_pair():
    inst = small_k_counterexample(5)
    g = build_network(inst.metric, theta_graph(inst.metric, ConeSystem(5, 0.0)))
    assert any(not greedy_distance(g, u, w).reachable for u, _, w in inst.triples)


@criterion(9, "theta-graph guarantees")
@pytest.mark.parametrize("k,bound", [(8, THETA8_STRETCH), (6, THETA6_STRETCH)])
def test_c09bc_routing(k, bound):
    worst = 0.0
    for seed in range(20):
        pts = np.random.default_rng(seed).random((200, 2))
        summ = route_all(metric_from_points(pts), ConeSystem(k))
        assert summ.all_reached and summ.all_greedy
        assert summ.max_stretch <= bound + 1e-9
        worst = max(worst, summ.max_stretch)
    print(f"k={k}: worst routing stretch {worst:.4f}")


@criterion(9, "theta-graph guarantees")
def test_c09d_selector_beta():
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(2, 13))
        m = metric_from_points(rng.random((n, 2)) * 10)
        thr = switch_threshold(n)
        for a in (max(thr, 1.0) * 0.5, thr * 2 + 1):
            c = select_approx_construction(m, a)
            assert c.cones.k == (6 if a >= thr else 8)
            rep = approx_factor(m, c.profile, a, _numeric(a, m), exact_limit=12)
            worst = max(worst, rep.max_beta)
            assert rep.max_beta <= 4.8678 + 1e-6
    print(f"worst beta {worst:.6f}, formula value {CLAIMED_FACTOR:.6f}")


@criterion(9, "theta-graph guarantees")
def test_c09e_lower_bound():
    lb = lower_bound_instance(8, 0.5)
    s = theta_graph(lb.metric, lb.cones)
    assert len(s[lb.u]) == 5
    before = agent_cost_of(lb.metric, s, lb.u, lb.alpha)
    after = agent_cost_of(lb.metric, s.with_strategy(lb.u, {lb.v}), lb.u, lb.alpha)
    assert before.unreachable == after.unreachable == 0
    assert float(before.value) / float(after.value) >= math.ceil(8 / 2) + 1 - lb.eps - 1e-9


@criterion(10, "reductions: dominating set and set cover")
def test_c10_dominating_set_gadget():
    rng = random.Random(10)
    for _ in range(10):
        n = rng.randint(1, 10)
        es = [e for e in itertools.combinations(range(n), 2) if rng.random() < rng.random()]
        m, s, u = dominating_set_gadget(n, es)
        br = best_response_exact(m, s, u, Fraction(1), exact_limit=m.n)
        # the deviator builds no hub edge here: its best response is exactly a minimum dominating set
        assert len(br.strategy) == oracles.min_dominating_set(n, es)


def _random_sets(rng):
    uni = list(range(rng.randint(1, 8)))
    sets = [set(rng.sample(uni, rng.randint(1, min(3, len(uni))))) for _ in range(rng.randint(1, 5))]
    for x in uni:
        if not any(x in q for q in sets):
            sets[rng.randrange(len(sets))].add(x)
    return uni, sets


@criterion(10, "reductions: dominating set and set cover")
def test_c10_setcover_gadgets():
    rng = random.Random(11)
    for _ in range(10):
        uni, sets = _random_sets(rng)
        size = oracles.min_set_cover(uni, sets)
        g = tree_setcover_gadget(uni, sets)
        br = best_response_exact(g.metric, g.profile, g.deviator, g.alpha, exact_limit=g.metric.n)
        assert len(br.strategy) - 1 == size
        _, e = euclid_setcover_gadget(uni, sets)
        br = best_response_exact(e.metric, e.profile, e.deviator, e.alpha, exact_limit=e.metric.n)
        assert len(br.strategy) - 1 == size


@criterion(11, "3-SAT gadget: metric and listed equilibrium profile")
def test_c11_sat_gadget():
    sc = sat_reduction(EXAMPLE_FORMULA)
    assert sc.metric.n == 18
    assert validate_metric(sc.metric).ok
    repaired = repaired_sat_profile(sc, EXAMPLE_ASSIGNMENT)
    print(f"repaired profile is a GE: {is_greedy_equilibrium(sc.metric, repaired, sc.alpha).holds}")
    listed = sat_equilibrium_profile(sc, EXAMPLE_ASSIGNMENT)
    rep = is_greedy_equilibrium(sc.metric, listed, sc.alpha)
    if not rep.holds:
        wit = rep.witness
        print(f"listed profile: agent {sc.metric.label(wit.agent)} improves by {wit.move.to_json()}")
    assert rep.holds


@criterion(12, "complete graph is an (alpha+1)-approximate NE")
def test_c12_complete_graph():
    rng = random.Random(12)
    for i in range(20):
        n = rng.randint(2, 10)
        kind = i % 3
        if kind == 0:
            m = oracles.random_one_two(rng, n, rng.random())
        elif kind == 1:
            _, m = oracles.random_tree_metric(rng, n)
        else:
            m = metric_from_points([(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(n)])
        a = [Fraction(1, 2), Fraction(2), Fraction(10)][i % 3]
        a = a if m.exact else float(a)
        rep = approx_factor(m, complete_graph_profile(n), a, _numeric(a, m), exact_limit=10)
        assert rep.max_beta <= float(a) + 1 + (1e-9 if not m.exact else 0)


@criterion(13, "greedy set-cover construction is a log-approximate NE")
def test_c13_log_approx():
    rng = random.Random(13)
    over_hn = 0
    for i in range(20):
        n = rng.randint(2, 10)
        m = oracles.random_one_two(rng, n, rng.random())
        a = Fraction(1) if i % 2 == 0 else Fraction(3)
        s = log_approx_ne(m, a)
        assert is_dsg(m, s).ok
        assert routing_enabled(build_network(m, s))
        rep = approx_factor(m, s, a, _numeric(a, m), exact_limit=10)
        hn = oracles.harmonic(n)
        assert rep.max_beta <= 1.5 * hn
        if rep.max_beta > hn:
            over_hn += 1
            print(f"soft check: beta {rep.max_beta:.4f} exceeds H_{n} = {hn:.4f}")
    print(f"instances above H_n: {over_hn} of 20")
