import itertools
import math
import random
from fractions import Fraction

import pytest

from greedynet.equilibria import best_response_exact, is_greedy_equilibrium
from greedynet.game import agent_cost_of, build_network, greedy_distance, stretch
from greedynet.metric import StructureError, validate_metric
from greedynet.scenarios import (
    EXAMPLE_ASSIGNMENT,
    EXAMPLE_FORMULA,
    euclid_setcover_gadget,
    fig1_instance,
    ge_gap_instance,
    no_ge_instance,
    registry,
    repaired_sat_profile,
    sat_equilibrium_profile,
    sat_example,
    sat_reduction,
    satisfies,
)

import oracles

# every check of these scenarios is expected to hold
CLEAN = ["fig1", "irc", "ge-gap", "no-ge", "euclid-setcover"]


@pytest.mark.parametrize("sid", CLEAN)
def test_scenario_checks_pass(sid):
    sc = registry()[sid]()
    res = sc.run()
    assert res, "scenario has no checks"
    for r in res:
        assert r.passed, f"{r.name}: {r.detail}"


@pytest.mark.parametrize("sid", sorted(registry()))
def test_builders_are_deterministic(sid):
    a, b = registry()[sid](), registry()[sid]()
    assert a.metric.dist == b.metric.dist
    assert [p.canonical() for p in a.profiles.values()] == [p.canonical() for p in b.profiles.values()]


def test_fig1_values():
    sc = fig1_instance()
    g = build_network(sc.metric, sc.profile)
    u, v = sc.node("u"), sc.node("v")
    assert greedy_distance(g, u, v).value == pytest.approx(2 * math.sqrt(2) + 4, abs=1e-9)
    assert stretch(g, u, v) == pytest.approx(1.1380, abs=1e-4)
    assert round(stretch(g, u, v), 2) == 1.14


def test_ge_gap_formulas():
    for n, a in [(6, 2), (8, 1), (10, Fraction(5, 2)), (5, Fraction(1, 2))]:
        sc = ge_gap_instance(n, a)
        assert is_greedy_equilibrium(sc.metric, sc.profile, a).holds
        assert agent_cost_of(sc.metric, sc.profile, 0, a).value == n * (a + 1) - 2 * a - 1
        dev = sc.profile.with_strategy(0, {sc.node("v"), sc.node("w")})
        assert agent_cost_of(sc.metric, dev, 0, a).value == 2 * a + Fraction(3, 2) * n - Fraction(5, 2)


def test_ge_gap_beta_grows_with_alpha():
    def beta(n, a):
        return (n * (a + 1) - 2 * a - 1) / (2 * a + Fraction(3, 2) * n - Fraction(5, 2))

    assert beta(20, 100) > beta(20, 2)
    sc = ge_gap_instance(6, 2)
    assert float(sc.meta["beta"]) == pytest.approx(1.238, abs=1e-3)
    with pytest.raises(StructureError):
        ge_gap_instance(3, 1)


def test_no_ge_metric_and_gate():
    sc = no_ge_instance()
    assert validate_metric(sc.metric).ok
    assert all(sc.meta["constraints"].values())
    assert not all(no_ge_instance(Fraction(1, 200)).meta["constraints"].values())


def test_no_ge_small_random_profiles_never_ge():
    sc = no_ge_instance()
    rng = random.Random(0)
    for _ in range(200):
        s = oracles.random_profile(rng, 5, rng.random())
        assert not oracles.is_ge(sc.metric, s, sc.alpha)


def test_sat_reduction_shape():
    sc = sat_reduction(EXAMPLE_FORMULA)
    assert sc.metric.n == 18
    assert validate_metric(sc.metric).ok
    assert sc.metric.d(sc.node("y"), sc.node("d")) == Fraction("3.26")
    with pytest.raises(StructureError):
        sat_reduction([[1, 2], [1, 3], [1, -2], [-1, 3]])


def test_sat_profile_literal_adjacency_is_mutual():
    sc = sat_reduction(EXAMPLE_FORMULA)
    s = sat_equilibrium_profile(sc, EXAMPLE_ASSIGNMENT)
    eps = Fraction(1, 1000)
    pairs = [(a, b) for a in range(sc.metric.n) for b in range(sc.metric.n)
             if sc.metric.d(a, b) == Fraction(8, 5) - eps]
    assert len(pairs) == 14
    assert all(b in s[a] for a, b in pairs)


def test_sat_profile_preconditions():
    sc = sat_reduction(EXAMPLE_FORMULA)
    assert satisfies(EXAMPLE_FORMULA, EXAMPLE_ASSIGNMENT)
    with pytest.raises(ValueError):
        sat_equilibrium_profile(sc, {1: True, 2: False, 3: False})
    with pytest.raises(StructureError):
        sat_equilibrium_profile(sc, {1: False})


def test_sat_listed_profile_failure_is_at_b_agents():
    # recorded deviation: the literal bullet-list profile leaves each b_i without a greedy route to z
    sc = sat_example()
    s = sc.profiles["equilibrium"]
    g = build_network(sc.metric, s)
    z = sc.node("z")
    for i in range(1, 4):
        b = sc.node(f"b{i}")
        assert not greedy_distance(g, b, z).reachable
    rep = is_greedy_equilibrium(sc.metric, s, sc.alpha)
    assert not rep.holds and sc.metric.label(rep.witness.agent).startswith("b")


def test_sat_repaired_profile_is_ge_for_every_satisfying_assignment():
    for formula in (EXAMPLE_FORMULA, [[1, 2, 3]], [[1, -2], [2, 3], [-1, -3]]):
        sc = sat_reduction(formula)
        nv = sc.meta["nvars"]
        for bits in itertools.product([False, True], repeat=nv):
            asg = {i + 1: b for i, b in enumerate(bits)}
            if satisfies(formula, asg):
                s = repaired_sat_profile(sc, asg)
                assert is_greedy_equilibrium(sc.metric, s, sc.alpha).holds


def test_euclid_gadget_examples():
    sc, gad = euclid_setcover_gadget(["x1"], [{"x1"}])
    br = best_response_exact(gad.metric, gad.profile, gad.deviator, gad.alpha)
    assert len(br.strategy) == 2 and gad.nodes["v"] in br.strategy
    m = gad.metric
    u, v = gad.nodes["u"], gad.nodes["v"]
    assert m.d(u, v) == pytest.approx(6, abs=1e-9)
    for qn in gad.nodes["sets"]:
        assert m.d(v, qn) == pytest.approx(7, abs=2e-3)
        assert m.d(u, qn) == pytest.approx(9, abs=2e-3)
    for x in gad.nodes["elements"]:
        assert m.d(u, x) == pytest.approx(17, abs=2e-3)
        assert m.d(v, x) == pytest.approx(11.10, abs=1e-2)


def test_euclid_gadget_clusters_are_tight_and_unlinked():
    uni, sets = [1, 2, 3], [{1, 2}, {2, 3}, {3}]
    eps = 1e-3
    _, gad = euclid_setcover_gadget(uni, sets, epsilon=eps)
    m = gad.metric
    for c in (gad.nodes["sets"], gad.nodes["elements"]):
        assert all(m.d(a, b) <= eps + 1e-12 for a in c for b in c)
        # the background never links two members of one cluster
        assert all(not (gad.profile[a] & set(c)) for a in c)


def test_euclid_gadget_intra_set_edges_change_the_best_response():
    # recorded finding: linking set nodes to each other lets u reach every set through one of them
    _, gad = euclid_setcover_gadget([0, 1, 2], [{0}, {1}, {2}])
    q = gad.nodes["sets"]
    dense = gad.profile
    for p in q:
        dense = dense.with_strategy(p, dense[p] | (set(q) - {p}))
    sparse_br = best_response_exact(gad.metric, gad.profile, 0, gad.alpha, exact_limit=30)
    dense_br = best_response_exact(gad.metric, dense, 0, gad.alpha, exact_limit=30)
    assert len(sparse_br.strategy) == 4
    assert len(dense_br.strategy) < 4


def test_euclid_gadget_random():
    rng = random.Random(13)
    for _ in range(6):
        uni = list(range(rng.randint(1, 4)))
        sets = [set(rng.sample(uni, rng.randint(1, len(uni)))) for _ in range(rng.randint(1, 4))]
        for x in uni:
            if not any(x in s for s in sets):
                sets[0].add(x)
        _, gad = euclid_setcover_gadget(uni, sets)
        br = best_response_exact(gad.metric, gad.profile, 0, gad.alpha, exact_limit=gad.metric.n)
        assert len(br.strategy) - 1 == oracles.min_set_cover(uni, sets)


def test_scenario_json_report():
    sc = registry()["no-ge"]()
    res = sc.run()
    d = sc.to_json(res)
    assert d["passed"] and d["ge_count"] == 0 and d["n"] == 5
