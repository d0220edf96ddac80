"""Structure of equilibria on metrics with distances 1 and 2.

Only 1-edges and 2-edges exist, every greedy path has at most two edges,
and a stretch is always 1 or 3/2.  The key objects are dominating-set
graphs: every agent builds all its 1-edges and its out-neighbourhood
dominates the 1-graph without it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .game import StrategyProfile
from .metric import ONE_TWO, MetricSpace, StructureError, metric_from_one_two, to_exact

HALF = Fraction(1, 2)
EXACT = "exact"
GREEDY = "greedy"
EXACT_LIMIT = 20


def _require_one_two(m: MetricSpace) -> None:
    if m.kind == ONE_TWO:
        return
    if not m.exact or any(m.d(u, v) not in (1, 2) for u in range(m.n) for v in range(m.n) if u != v):
        raise StructureError("expected a metric with distances in {1, 2}")


def one_neighbors(m: MetricSpace) -> list[frozenset]:
    _require_one_two(m)
    return [frozenset(v for v in range(m.n) if v != u and m.d(u, v) == 1) for u in range(m.n)]


@dataclass(frozen=True)
class NeighborhoodSets:
    w1: frozenset      # 1-edges u built
    w11: frozenset     # nodes reached by two built 1-edges
    w2: frozenset      # 2-edges u built
    w2plus: frozenset  # W2 that are also in W11
    w2minus: frozenset
    v1: frozenset      # all nodes at distance 1
    v2: frozenset
    v2plus: frozenset  # V2 that are also in W11
    v2minus: frozenset


def neighborhood_sets(m: MetricSpace, s: StrategyProfile, u: int) -> NeighborhoodSets:
    n1 = one_neighbors(m)
    out = s[u]
    w1 = frozenset(w for w in out if w in n1[u])
    w2 = frozenset(w for w in out if w not in n1[u])
    w11 = frozenset(x for y in w1 for x in s[y] if x in n1[y] and x != u)
    v1 = n1[u]
    v2 = frozenset(v for v in range(m.n) if v != u and v not in v1)
    return NeighborhoodSets(w1, w11, w2, w2 & w11, w2 - w11, v1, v2, v2 & w11, v2 - w11)


def dominates(n1: list[frozenset], u: int, nbhd: Iterable[int], n: int) -> list[int]:
    """Nodes (other than u) neither in nbhd nor 1-adjacent to a member of it."""
    nb = set(nbhd)
    covered = set(nb)
    for y in nb:
        covered |= n1[y]
    return [x for x in range(n) if x != u and x not in covered]


@dataclass(frozen=True)
class DsgReport:
    ok: bool
    all_one_edges: bool
    dominating: bool
    w2plus_minimal: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "all_one_edges": self.all_one_edges, "dominating": self.dominating,
                "w2plus_minimal": self.w2plus_minimal, "witness": self.witness}


def _w2plus_reducer(m, n1, s, u):
    """A single deletion or swap that keeps N(u) dominating and shrinks W2+, if any."""
    ns = neighborhood_sets(m, s, u)
    out = set(s[u])
    for v in sorted(ns.w2plus):
        rest = out - {v}
        if not dominates(n1, u, rest, m.n):
            return {"agent": u, "move": "delete", "remove": v}
        for w in range(m.n):
            if w == u or w in out or w in n1[u] or w in ns.w11:
                continue
            if not dominates(n1, u, rest | {w}, m.n):
                return {"agent": u, "move": "swap", "remove": v, "add": w}
    return None


def is_dsg(m: MetricSpace, s: StrategyProfile) -> DsgReport:
    """Check the three dominating-set-graph conditions for every agent."""
    n1 = one_neighbors(m)
    wit = None
    ones = dom = mini = True
    for u in range(m.n):
        missing = sorted(n1[u] - s[u])
        if missing:
            ones = False
            wit = wit or {"agent": u, "condition": "all_one_edges", "missing": missing}
    for u in range(m.n):
        und = dominates(n1, u, s[u], m.n)
        if und:
            dom = False
            wit = wit or {"agent": u, "condition": "dominating", "undominated": und}
    if ones and dom:
        for u in range(m.n):
            r = _w2plus_reducer(m, n1, s, u)
            if r is not None:
                mini = False
                wit = wit or {**r, "condition": "w2plus_minimal"}
                break
    return DsgReport(ones and dom and mini, ones, dom, mini, wit)


def max_dsg(m: MetricSpace) -> StrategyProfile:
    """All edges except 2-edges whose target is two 1-edges away."""
    n1 = one_neighbors(m)
    rows = []
    for u in range(m.n):
        two_hop = set()
        for y in n1[u]:
            two_hop |= n1[y]
        rows.append(frozenset(w for w in range(m.n) if w != u and (w in n1[u] or w not in two_hop)))
    return StrategyProfile(tuple(rows))


# ------------------------------------------------------------ weighted covers

def _cover_problem(m: MetricSpace, n1, u: int):
    """Universe V2- of u (w.r.t. all 1-edges), candidates V2 with their coverage."""
    two_hop = set()
    for y in n1[u]:
        two_hop |= n1[y]
    two_hop.discard(u)
    v2 = [w for w in range(m.n) if w != u and w not in n1[u]]
    minus = [w for w in v2 if w not in two_hop]
    mset = set(minus)
    cover = {w: frozenset(({w} | n1[w]) & mset) for w in v2}
    plus = {w: w in two_hop for w in v2}
    return minus, v2, cover, plus


def _add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _solve_cover(universe, cands, cover, weight, mode):
    """Pick candidates covering the universe with the least total weight.

    Weights are tuples compared lexicographically; ties go to fewer
    candidates, then to the lexicographically smallest sorted list.
    Candidates with a negative leading weight are always taken.
    """
    zero = tuple(0 * x for x in weight[cands[0]]) if cands else ()
    forced = [w for w in cands if weight[w] < zero]
    free = [w for w in cands if w not in forced]
    covered = set()
    for w in forced:
        covered |= cover[w]
    todo = [x for x in universe if x not in covered]
    base = zero
    for w in forced:
        base = _add(base, weight[w])
    if mode == GREEDY:
        chosen = []
        left = set(todo)
        while left:
            best, best_key = None, None
            for w in free:
                if w in chosen:
                    continue
                gain = len(cover[w] & left)
                if gain == 0:
                    continue
                key = tuple(Fraction(x) / gain for x in weight[w])
                if best is None or key < best_key:
                    best, best_key = w, key
            if best is None:
                raise StructureError("universe cannot be covered")
            chosen.append(best)
            left -= cover[best]
        return sorted(forced + chosen)
    if len(free) > EXACT_LIMIT:
        raise StructureError(f"exact cover limited to {EXACT_LIMIT} candidates")
    best: list = [None]  # (sum, count, sorted tuple)
    by_elem = {x: [w for w in free if x in cover[w]] for x in todo}

    def rec(left: frozenset, chosen: list, total: tuple, banned: frozenset):
        b = best[0]
        if b is not None and (total > b[0] or (total == b[0] and len(chosen) >= b[1] and left)):
            return
        if not left:
            key = (total, len(chosen), tuple(sorted(chosen)))
            if b is None or key < b:
                best[0] = key
            return
        x = min(left)
        opts = [w for w in by_elem[x] if w not in banned]
        done = set()
        for w in opts:
            rec(left - cover[w], chosen + [w], _add(total, weight[w]), banned | done)
            done.add(w)

    rec(frozenset(todo), [], zero, frozenset())
    if best[0] is None:
        raise StructureError("universe cannot be covered")
    return sorted(forced + list(best[0][2]))


def _rows_from_covers(m: MetricSpace, choose) -> StrategyProfile:
    n1 = one_neighbors(m)
    rows = []
    for u in range(m.n):
        minus, v2, cover, plus = _cover_problem(m, n1, u)
        rows.append(frozenset(n1[u]) | frozenset(choose(u, minus, v2, cover, plus)))
    return StrategyProfile(tuple(rows))


def min_dsg(m: MetricSpace, mode: str = EXACT) -> StrategyProfile:
    """Each agent adds as few 2-edges as domination allows.

    Among equally small choices, fewer targets already two 1-edges away
    are preferred, so the result is a dominating-set graph.
    """
    def choose(u, minus, v2, cover, plus):
        w = {x: (1, 1 if plus[x] else 0) for x in v2}
        return _solve_cover(minus, v2, cover, w, mode)
    return _rows_from_covers(m, choose)


def bdsg_weights(plus: dict, alpha) -> dict:
    a = to_exact(alpha)
    return {w: ((a if p else a - HALF),) for w, p in plus.items()}


def bdsg(m: MetricSpace, alpha, mode: str = EXACT) -> StrategyProfile:
    """Each agent minimises (alpha - 1/2)|W2| + |W2+|/2 over dominating choices."""
    def choose(u, minus, v2, cover, plus):
        return _solve_cover(minus, v2, cover, bdsg_weights(plus, alpha), mode)
    return _rows_from_covers(m, choose)


def b_value(m: MetricSpace, s: StrategyProfile, u: int, alpha) -> Fraction:
    ns = neighborhood_sets(m, s, u)
    a = to_exact(alpha)
    return (a - HALF) * len(ns.w2) + HALF * len(ns.w2plus)


def is_bdsg(m: MetricSpace, s: StrategyProfile, alpha) -> bool:
    """All 1-edges, dominating, and every agent's b value is the minimum."""
    rep = is_dsg(m, s)
    if not (rep.all_one_edges and rep.dominating):
        return False
    ref = bdsg(m, alpha)
    return all(b_value(m, s, u, alpha) == b_value(m, ref, u, alpha) for u in range(m.n))


def log_approx_ne(m: MetricSpace, alpha) -> StrategyProfile:
    """Start from the MaxDSG, then let each agent pick its 2-edges by greedy set cover."""
    if to_exact(alpha) <= HALF:
        raise ValueError("the set-cover construction needs alpha > 1/2")
    return bdsg(m, alpha, GREEDY)


def closed_form_cost(m: MetricSpace, s: StrategyProfile, u: int, alpha) -> Fraction:
    """Cost of u in a dominating-set graph, from set sizes alone."""
    ns = neighborhood_sets(m, s, u)
    a = to_exact(alpha)
    return ((a + 1) * len(ns.v1) + len(ns.v2plus) + (a - HALF) * len(ns.w2minus)
            + Fraction(3, 2) * len(ns.v2minus) + a * len(ns.w2plus))


def one_two_best_response(m: MetricSpace, s: StrategyProfile, u: int, alpha) -> frozenset:
    """Best response for alpha <= 1/2: u's MaxDSG row.

    Assumes every other agent has built its 1-edges.
    """
    if to_exact(alpha) > HALF:
        raise ValueError("closed-form best response needs alpha <= 1/2")
    n1 = one_neighbors(m)
    for y in range(m.n):
        if y != u and not n1[y] - {u} <= s[y]:
            raise StructureError(f"agent {y} has not built all its 1-edges")
    return max_dsg(m)[u]


def dominating_set_gadget(n: int, edges: Iterable[tuple[int, int]]):
    """Graph G on 0..n-1 plus an extra agent n.

    d = 1 on the edges of G, 2 otherwise.  The returned profile builds
    every edge of G in both directions and leaves the extra agent empty;
    that agent's best response is a minimum dominating set of G.
    """
    es = [(int(a), int(b)) for a, b in edges]
    m = metric_from_one_two(n + 1, es)
    adj = [set() for _ in range(n + 1)]
    for a, b in es:
        adj[a].add(b)
        adj[b].add(a)
    s = StrategyProfile(tuple(frozenset(x) for x in adj))
    return m, s, n
