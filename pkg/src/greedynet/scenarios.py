"""Concrete instances, each bundled with the properties it should exhibit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .dynamics import CYCLE, ActivationSchedule, ScriptedMoves, run_improving_dynamics
from .equilibria import (
    approx_factor,
    best_response_exact,
    count_greedy_equilibria,
    is_greedy_equilibrium,
    is_nash_equilibrium,
)
from .game import (
    StrategyProfile,
    ZPolicy,
    agent_cost,
    agent_cost_of,
    build_network,
    default_z,
    greedy_distance,
    is_greedy_path,
)
from .metric import (
    MetricSpace,
    PartialDistanceSpec,
    StructureError,
    metric_closure,
    metric_from_matrix,
    metric_from_one_two,
    metric_from_points,
    to_exact,
    validate_metric,
)
from .tree import SetCoverGadget, _check_sets

DEFAULT_EPS = Fraction(1, 1000)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Scenario:
    id: str
    params: dict
    metric: MetricSpace
    alpha: object
    profiles: dict = field(default_factory=dict)
    z: ZPolicy = field(default_factory=ZPolicy.lexicographic)
    checks: list = field(default_factory=list)  # (name, fn -> (bool, detail))
    meta: dict = field(default_factory=dict)

    @property
    def profile(self) -> StrategyProfile:
        return next(iter(self.profiles.values()))

    def node(self, label) -> int:
        return self.metric.index(label)

    def check(self, name: str):
        def deco(fn: Callable[[], tuple]):
            self.checks.append((name, fn))
            return fn
        return deco

    def run(self) -> list[CheckResult]:
        out = []
        for name, fn in self.checks:
            try:
                ok, detail = fn()
            except Exception as e:  # a crashing check is a failing check
                ok, detail = False, f"{type(e).__name__}: {e}"
            out.append(CheckResult(name, bool(ok), str(detail)))
        return out

    def to_json(self, results: Sequence[CheckResult] | None = None) -> dict:
        d = {"id": self.id, "params": {k: str(v) for k, v in self.params.items()}, "n": self.metric.n,
             "alpha": str(self.alpha)}
        if self.meta.get("report"):
            d.update(self.meta["report"])
        if results is not None:
            d["checks"] = [r.to_json() for r in results]
            d["passed"] = all(r.passed for r in results)
        return d


def _labelled(m: MetricSpace, labels: Sequence[str]) -> MetricSpace:
    return m.with_labels(labels)


def _profile(labels: Sequence[str], rows: dict) -> StrategyProfile:
    idx = {l: i for i, l in enumerate(labels)}
    return StrategyProfile(tuple(frozenset(idx[x] for x in rows.get(l, ())) for l in labels))


# ------------------------------------------------------------------ greedy path

def fig1_instance() -> Scenario:
    """Two greedy paths from u to v; a shorter non-greedy one via w."""
    pts = {
        "u": (0.0, 0.0), "a": (1.0, 1.0), "b": (3.0, 1.0), "c": (5.0, 1.0), "v": (6.0, 0.0),
        "y": (5.0, -5.9), "z": (6.5, -3.0), "w": (-0.05, 0.0),
    }
    labels = list(pts)
    m = _labelled(metric_from_points(pts.values()), labels)
    s = _profile(labels, {"u": "ayw", "a": "b", "b": "c", "c": "v", "y": "z", "z": "v", "w": "v"})
    sc = Scenario("fig1", {}, m, 1, {"network": s})
    g = build_network(m, s)
    u, v, w, y, z = (m.index(x) for x in "uvwyz")
    want = 2 * math.sqrt(2) + 4

    def all_greedy_paths():
        out = []

        def rec(path):
            x = path[-1]
            if x == v:
                out.append(tuple(path))
                return
            for nxt in sorted(s[x]):
                if m.d(nxt, v) < m.d(x, v):
                    rec(path + [nxt])
        rec([u])
        return out

    def plen(p):
        return sum(m.d(p[i], p[i + 1]) for i in range(len(p) - 1))

    @sc.check("gd(u,v) = 2*sqrt(2) + 4")
    def _():
        r = greedy_distance(g, u, v)
        return abs(r.value - want) <= 1e-9, f"gd={r.value!r} via {[m.label(x) for x in r.path]}"

    @sc.check("stretch(u,v) = (2*sqrt(2) + 4)/6")
    def _():
        st = greedy_distance(g, u, v).value / m.d(u, v)
        return abs(st - want / 6) <= 1e-9, f"stretch={st!r}"

    @sc.check("u,w,v is shorter than gd but not greedy")
    def _():
        p = (u, w, v)
        return (not is_greedy_path(m, p)) and plen(p) < want, f"length={plen(p):.4f}, d(w,v)={m.d(w, v):.4f}"

    @sc.check("exactly two greedy u-v paths; the longer one has an edge longer than d(u,v)")
    def _():
        ps = all_greedy_paths()
        long = [p for p in ps if p != (0, 1, 2, 3, 4)]
        ok = len(ps) == 2 and len(long) == 1 and max(m.d(long[0][i], long[0][i + 1]) for i in range(len(long[0]) - 1)) > m.d(u, v)
        return ok, f"paths={[[m.label(x) for x in p] for p in ps]}"

    return sc


# ------------------------------------------------------------------ 1-2 metrics

IRC_LABELS = ["u", "v", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j"]
IRC_ONE_EDGES = ["ua", "ub", "uc", "ud", "ug", "uh", "ui", "uv", "va", "vb", "ve", "vf", "vg", "vh", "vi", "ij"]


def irc_instance(alpha=1) -> Scenario:
    """Improving-response cycle of length four between agents u and v."""
    idx = {l: i for i, l in enumerate(IRC_LABELS)}
    m = _labelled(metric_from_one_two(len(IRC_LABELS), [(idx[e[0]], idx[e[1]]) for e in IRC_ONE_EDGES]), IRC_LABELS)
    a = to_exact(alpha)
    z = ZPolicy.numeric(default_z(a, m.n))
    s0 = _profile(IRC_LABELS, {"u": "cdi", "v": "efu", "i": "j"})
    script_u = [frozenset(idx[x] for x in "abv"), frozenset(idx[x] for x in "cdi")]
    script_v = [frozenset(idx[x] for x in "ghi"), frozenset(idx[x] for x in "efu")]
    sc = Scenario("irc", {"alpha": a}, m, a, {"start": s0}, z)
    sc.meta["scripts"] = {idx["u"]: script_u, idx["v"]: script_v}
    u, v = idx["u"], idx["v"]

    def run():
        return run_improving_dynamics(m, s0, a, ActivationSchedule.explicit([u, v, u, v, u, v]),
                                      ScriptedMoves({u: script_u, v: script_v}), z, steps=10)

    def reach(s, x):
        g = build_network(m, s)
        return sorted(IRC_LABELS[t] for t in range(m.n) if t != x and greedy_distance(g, x, t).reachable)

    @sc.check("dynamics engine certifies a cycle of length 4")
    def _():
        tr = run()
        return tr.status == CYCLE and tr.cycle_start == 0 and tr.cycle_period == 4, \
            f"status={tr.status}, start={tr.cycle_start}, period={tr.cycle_period}"

    @sc.check("every step improves the mover by exactly Z - 1")
    def _():
        tr = run()
        ps = tr.profiles()
        deltas = []
        for k, st in enumerate(tr.steps):
            before = agent_cost_of(m, ps[k], st.agent, a).total(z)
            after = agent_cost_of(m, ps[k + 1], st.agent, a).total(z)
            deltas.append(after - before)
        ok = len(deltas) == 4 and all(d == -(z.value - 1) for d in deltas)
        return ok, f"deltas={[str(d) for d in deltas]}, Z={z.value}"

    @sc.check("step 1 moves u's reachable set from {c,d,i,j} to {a,b,e,f,v}")
    def _():
        s1 = s0.with_strategy(u, script_u[0])
        before, after = reach(s0, u), reach(s1, u)
        return before == list("cdij") and after == list("abefv"), f"{before} -> {after}"

    return sc


def ge_gap_instance(n: int = 6, alpha=2) -> Scenario:
    """A greedy equilibrium whose hub agent is far from a best response."""
    if n < 4:
        raise StructureError("need n >= 4")
    x = n - 3
    labels = ["u", "w", "v"] + [f"a{i}" for i in range(1, x + 1)]
    u, w, v = 0, 1, 2
    aa = list(range(3, n))
    ones = [(u, w), (w, v)] + [(v, i) for i in aa]
    m = _labelled(metric_from_one_two(n, ones), labels)
    rows = [frozenset()] * n
    rows[u] = frozenset(aa + [w])
    rows[v] = frozenset(aa + [w])
    rows[w] = frozenset([u, v])
    for i in aa:
        rows[i] = frozenset([u, v])
    s = StrategyProfile(tuple(rows))
    a = to_exact(alpha)
    z = ZPolicy.numeric(default_z(a, n))
    sc = Scenario("ge-gap", {"n": n, "alpha": a}, m, a, {"network": s}, z)
    cu_want = n * (a + 1) - 2 * a - 1
    dev_want = 2 * a + Fraction(3, 2) * n - Fraction(5, 2)
    sc.meta.update(cost=cu_want, deviation=dev_want, beta=cu_want / dev_want)
    lim = max(16, n)

    @sc.check("network is a greedy equilibrium")
    def _():
        return is_greedy_equilibrium(m, s, a).holds, ""

    @sc.check("network is not a Nash equilibrium")
    def _():
        r = is_nash_equilibrium(m, s, a, exact_limit=lim)
        return not r.holds, f"witness agent {r.witness.agent} -> {sorted(r.witness.strategy)}" if r.witness else ""

    @sc.check("c_u = n(alpha+1) - 2alpha - 1")
    def _():
        c = agent_cost_of(m, s, u, a)
        return c.unreachable == 0 and c.value == cu_want, f"c_u={c.value}"

    @sc.check("deviation to {v,w} costs 2alpha + 3n/2 - 5/2 and is the exact best response")
    def _():
        c = agent_cost_of(m, s.with_strategy(u, [v, w]), u, a)
        br = best_response_exact(m, s, u, a, exact_limit=lim)
        return c.value == dev_want and br.strategy == frozenset([v, w]) and br.cost.value == dev_want, \
            f"deviation={c.value}, best response {sorted(br.strategy)} at {br.cost.value}"

    @sc.check("beta_u matches the ratio")
    def _():
        b = approx_factor(m, s, a, z, exact_limit=lim, agents=[u]).beta[u]
        return abs(b - float(cu_want / dev_want)) <= 1e-9, f"beta_u={b!r}"

    return sc


# ------------------------------------------------------------------ general metrics

NO_GE_LABELS = ["a", "b", "c", "y", "z"]


def no_ge_instance(epsilon=DEFAULT_EPS, alpha=Fraction(3, 5)) -> Scenario:
    """Five agents without any greedy equilibrium."""
    e = to_exact(epsilon)
    a, b, c, y, z = range(5)
    dd = {(a, b): Fraction("1.14"), (b, c): 1, (a, c): Fraction("2.14"), (a, y): Fraction("1.96"),
          (b, y): 2 - e, (c, y): Fraction("2.45"), (a, z): Fraction("2.47"), (b, z): 2, (c, z): 2 + e,
          (y, z): 1 - 2 * e}
    mat = [[Fraction(0)] * 5 for _ in range(5)]
    for (i, j), x in dd.items():
        mat[i][j] = mat[j][i] = Fraction(x)
    m = _labelled(metric_from_matrix(mat), NO_GE_LABELS)
    al = to_exact(alpha)
    sc = Scenario("no-ge", {"epsilon": e, "alpha": al}, m, al)
    sc.meta["constraints"] = {"(3.14 - eps)/1.96 > 1.6": (Fraction("3.14") - e) / Fraction("1.96") > Fraction("1.6")}

    @sc.check("distances form a metric")
    def _():
        return validate_metric(m).ok, ""

    @sc.check("epsilon satisfies (3.14 - eps)/1.96 > 1.6")
    def _():
        return all(sc.meta["constraints"].values()), ""

    @sc.check("exhaustive search over all 16^5 profiles finds no greedy equilibrium")
    def _():
        cnt, found = count_greedy_equilibria(m, al, store=1)
        sc.meta.setdefault("report", {})["ge_count"] = cnt
        return cnt == 0, f"count={cnt}" + (f", e.g. {found[0].canonical()}" if found else "")

    return sc


def _parse_formula(formula: Iterable[Iterable[int]]) -> list[tuple[int, ...]]:
    cls = [tuple(int(l) for l in c) for c in formula]
    if not cls or any(not c or len(c) > 3 or 0 in c for c in cls):
        raise StructureError("clauses need 1 to 3 non-zero literals")
    occ: dict = {}
    for c in cls:
        for l in c:
            occ[abs(l)] = occ.get(abs(l), 0) + 1
    if any(k > 3 for k in occ.values()):
        raise StructureError("each variable may occur at most three times")
    return cls


def sat_reduction(formula: Iterable[Iterable[int]], epsilon=DEFAULT_EPS, alpha=Fraction(3, 5)) -> Scenario:
    """Metric that has a Nash equilibrium iff the formula is satisfiable.

    Literals are signed ints (3 = x3, -3 = not x3).
    """
    cls = _parse_formula(formula)
    e = to_exact(epsilon)
    nvars = max(abs(l) for c in cls for l in c)
    labels = ["y", "z", "d"]
    for i in range(1, len(cls) + 1):
        labels += [f"a{i}", f"b{i}", f"c{i}"]
    for v in range(1, nvars + 1):
        labels += [f"t{v}", f"f{v}"]
    idx = {l: i for i, l in enumerate(labels)}

    def lit(l):
        return idx[f"t{l}"] if l > 0 else idx[f"f{-l}"]

    y, z, dn = idx["y"], idx["z"], idx["d"]
    F = Fraction
    ent = [(y, z, 1 - 2 * e)]
    for i in range(1, len(cls) + 1):
        a, b, c = idx[f"a{i}"], idx[f"b{i}"], idx[f"c{i}"]
        ent += [(a, b, F("1.14")), (b, c, 1),
                (y, a, F("1.96")), (y, b, 2 - e), (y, c, 2 + 2 * e),
                (z, a, 2 + 2 * e), (z, b, 2), (z, c, 2 + e),
                (dn, a, F("1.3")), (dn, b, F("1.3")), (dn, c, F("1.3"))]
        for l in sorted(set(cls[i - 1])):
            ent.append((c, lit(l), F("1.6") - e))
    for v in range(1, nvars + 1):
        t, f = idx[f"t{v}"], idx[f"f{v}"]
        ent += [(t, f, F("0.85")), (z, t, F("1.6")), (z, f, F("1.6")), (dn, t, F("1.3")), (dn, f, F("1.3"))]
    m = _labelled(metric_closure(PartialDistanceSpec(len(labels), tuple(ent))), labels)
    al = to_exact(alpha)
    sc = Scenario("sat", {"formula": cls, "epsilon": e, "alpha": al}, m, al)
    sc.meta.update(clauses=cls, nvars=nvars, literal_node=lit)

    @sc.check("closure is a metric")
    def _():
        return validate_metric(m).ok, ""

    @sc.check("d(y,d) = 1.96 + 1.3")
    def _():
        return m.d(y, dn) == F("3.26"), f"d(y,d)={m.d(y, dn)}"

    return sc


def satisfies(clauses, assignment: dict) -> bool:
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)


def sat_equilibrium_profile(sc: Scenario, assignment: dict) -> StrategyProfile:
    """The equilibrium built from a satisfying assignment {var: bool}."""
    cls = sc.meta["clauses"]
    if set(assignment) != set(range(1, sc.meta["nvars"] + 1)):
        raise StructureError("assignment must give every variable a value")
    if not satisfies(cls, assignment):
        raise ValueError("assignment does not satisfy the formula")
    m = sc.metric
    N = m.index
    lit = sc.meta["literal_node"]
    rows: dict = {k: set() for k in range(m.n)}
    y, z, dn = N("y"), N("z"), N("d")
    nclause = len(cls)
    A = [N(f"a{i}") for i in range(1, nclause + 1)]
    B = [N(f"b{i}") for i in range(1, nclause + 1)]
    C = [N(f"c{i}") for i in range(1, nclause + 1)]
    T = {v: N(f"t{v}") for v in assignment}
    Fl = {v: N(f"f{v}") for v in assignment}
    rows[y] |= {z, *A, *B}
    rows[z] |= {y} | {T[v] if val else Fl[v] for v, val in assignment.items()}
    rows[dn] |= {*A, *B, *C, *T.values(), *Fl.values()}
    for i in range(nclause):
        rows[A[i]] |= {dn, y, B[i]}
        rows[B[i]] |= {dn, A[i], C[i]}
        rows[C[i]] |= {dn, z, B[i]} | {lit(l) for l in cls[i]}
        for l in cls[i]:
            rows[lit(l)].add(C[i])
    for v in assignment:
        rows[T[v]] |= {dn, z, Fl[v]}
        rows[Fl[v]] |= {dn, z, T[v]}
    return StrategyProfile(tuple(frozenset(rows[k]) for k in range(m.n)))


def repaired_sat_profile(sc: Scenario, assignment: dict) -> StrategyProfile:
    """Variant of ``sat_equilibrium_profile`` where every b_i also links to y
    and every c_i drops its edge to z.

    In the original list b_i has no greedy route to z: d(c_i, z) = 2 + eps
    exceeds d(b_i, z) = 2 and no other out-neighbour of b_i is closer to z
    either.  With y in its strategy, b_i reaches z via y, and c_i's edge to z
    is no longer worth its price.
    """
    s = sat_equilibrium_profile(sc, assignment)
    m = sc.metric
    y, z = m.index("y"), m.index("z")
    for i in range(1, len(sc.meta["clauses"]) + 1):
        b, c = m.index(f"b{i}"), m.index(f"c{i}")
        s = s.with_strategy(b, s[b] | {y}).with_strategy(c, s[c] - {z})
    return s


def unreachable_from(m: MetricSpace, s: StrategyProfile) -> dict:
    """{agent label: sorted labels it has no greedy path to}, only non-empty entries."""
    g = build_network(m, s)
    out = {}
    for u in range(m.n):
        bad = [m.label(v) for v in range(m.n) if v != u and not greedy_distance(g, u, v).reachable]
        if bad:
            out[m.label(u)] = bad
    return out


EXAMPLE_FORMULA = [[1, -2, -3], [-1, 2], [-1, 3]]
EXAMPLE_ASSIGNMENT = {1: False, 2: True, 3: False}


def sat_example() -> Scenario:
    """The three-clause example with its profile for x2 true, x1 and x3 false."""
    sc = sat_reduction(EXAMPLE_FORMULA)
    s = sat_equilibrium_profile(sc, EXAMPLE_ASSIGNMENT)
    fixed = repaired_sat_profile(sc, EXAMPLE_ASSIGNMENT)
    sc.profiles["equilibrium"] = s
    sc.profiles["repaired"] = fixed
    sc.id = "sat-example"
    m = sc.metric

    @sc.check("18 agents")
    def _():
        return m.n == 18, f"n={m.n}"

    @sc.check("every literal adjacency at 1.6 - eps is a mutual edge pair")
    def _():
        near = [(x, w) for x in range(m.n) for w in range(m.n) if m.d(x, w) == Fraction("1.6") - sc.params["epsilon"]]
        return bool(near) and all(w in s[x] for x, w in near), f"{len(near)} ordered pairs"

    @sc.check("listed profile is a greedy equilibrium")
    def _():
        r = is_greedy_equilibrium(m, s, sc.alpha)
        if r.holds:
            return True, ""
        w = r.witness
        return False, (f"agent {m.label(w.agent)} improves by {w.move.kind}; "
                       f"unreachable: {unreachable_from(m, s)}")

    @sc.check("repaired profile is a greedy equilibrium")
    def _():
        r = is_greedy_equilibrium(m, fixed, sc.alpha)
        return r.holds, "" if r.holds else f"agent {m.label(r.witness.agent)}"

    return sc


# ------------------------------------------------------------------ Euclidean set cover

def _circle_points(cx, cy, diameter, count):
    r = diameter / 2
    return [(cx + r * math.cos(2 * math.pi * i / count), cy + r * math.sin(2 * math.pi * i / count))
            for i in range(count)]


def euclid_setcover_gadget(universe: Sequence, sets: Sequence[Iterable], alpha=Fraction(41, 10),
                           epsilon: float = 1e-3) -> tuple[Scenario, SetCoverGadget]:
    """Points in the plane whose deviator's best response is {v} plus a minimum set cover.

    u = (0, 0), v = (6, 0); set nodes sit on a circle of diameter eps
    around the point at distance 9 from u and 7 from v; element nodes on a
    circle around the point at distance 17 from u and 12 from that set
    point (about 11.10 from v).  v links to every set node and each set
    node to its elements.
    """
    uni, ss = _check_sets(universe, sets)
    qx = (81 - 49 + 36) / 12
    qy = math.sqrt(81 - qx * qx)
    # intersect |p| = 17 with |p - q| = 12, on the far side of the line u-q
    dq = math.hypot(qx, qy)
    along = (17**2 - 12**2 + dq**2) / (2 * dq)
    h = math.sqrt(17**2 - along**2)
    ex, ey = qx / dq, qy / dq
    xc = (along * ex + h * ey, along * ey - h * ex)
    pts = [(0.0, 0.0), (6.0, 0.0)]
    pts += _circle_points(qx, qy, epsilon, len(ss))
    pts += _circle_points(xc[0], xc[1], epsilon, len(uni))
    labels = ["u", "v"] + [f"Q{j}" for j in range(len(ss))] + [f"x{e}" for e in uni]
    m = _labelled(metric_from_points(pts), labels)
    n = m.n
    q = list(range(2, 2 + len(ss)))
    xs = {e: 2 + len(ss) + i for i, e in enumerate(uni)}
    rows = [frozenset()] * n
    rows[1] = frozenset(q)
    for j, s in enumerate(ss):
        rows[q[j]] = frozenset(xs[e] for e in s)
    prof = StrategyProfile(tuple(rows))
    al = to_exact(alpha)
    gad = SetCoverGadget(m, prof, 0, al, {"u": 0, "v": 1, "sets": q, "elements": [xs[e] for e in uni]})
    sc = Scenario("euclid-setcover", {"sets": [sorted(s) for s in ss], "alpha": al, "epsilon": epsilon},
                  m, al, {"background": prof})
    sc.meta["nominal"] = {"uv": 6, "vQ": 7, "uQ": 9, "ux": 17, "Qx": 12, "vx": math.hypot(xc[0] - 6, xc[1])}

    @sc.check("stretch gaps delta = 4/17 and Delta = 4/9")
    def _():
        nom = sc.meta["nominal"]
        delta = Fraction(nom["uQ"] + nom["Qx"], nom["ux"]) - 1
        big = Fraction(nom["uv"] + nom["vQ"], nom["uQ"]) - 1
        return delta == Fraction(4, 17) and big == Fraction(4, 9), f"delta={delta}, Delta={big}"

    @sc.check("d(v, x) is about 11.10")
    def _():
        return abs(sc.meta["nominal"]["vx"] - 11.10) < 0.01, f"{sc.meta['nominal']['vx']:.4f}"

    @sc.check("best response of u is v plus a minimum set cover")
    def _():
        br = best_response_exact(m, prof, 0, al, exact_limit=max(16, n))
        k = min_set_cover_size(uni, ss)
        return 1 in br.strategy and len(br.strategy) == 1 + k, \
            f"best response {[m.label(x) for x in sorted(br.strategy)]}, minimum cover {k}"

    return sc, gad


def min_set_cover_size(universe, sets) -> int:
    """Brute force over subsets by increasing size."""
    from itertools import combinations

    need = set(universe)
    for k in range(1, len(sets) + 1):
        for pick in combinations(sets, k):
            if need <= set().union(*pick):
                return k
    raise StructureError("the sets do not cover the universe")


# ------------------------------------------------------------------ registry

def _num(kw, key, default):
    return to_exact(kw[key]) if kw.get(key) is not None else default


def registry() -> dict:
    """Scenario id -> builder taking keyword parameters (strings are parsed)."""
    return {
        "fig1": lambda **kw: fig1_instance(),
        "irc": lambda **kw: irc_instance(_num(kw, "alpha", 1)),
        "ge-gap": lambda **kw: ge_gap_instance(int(kw.get("n") or 6), _num(kw, "alpha", 2)),
        "no-ge": lambda **kw: no_ge_instance(_num(kw, "epsilon", DEFAULT_EPS), _num(kw, "alpha", Fraction(3, 5))),
        "sat-example": lambda **kw: sat_example(),
        "euclid-setcover": lambda **kw: euclid_setcover_gadget(["x1"], [{"x1"}])[0],
    }
