"""Strategy profiles, greedy distances and agent costs.

Everything here works in the metric's own scalar type, so rational
instances get exact ``Fraction`` results.  The equilibrium and dynamics
engines use the float kernels instead and lean on this module to confirm
their witnesses.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .metric import MetricSpace, Scalar, StructureError, to_exact

LEXICOGRAPHIC = "lexicographic"
NUMERIC = "numeric"


@dataclass(frozen=True)
class StrategyProfile:
    """strategies[u] is the set of nodes u builds an edge to."""

    strategies: tuple

    @staticmethod
    def from_lists(lists: Iterable[Iterable[int]], n: int | None = None) -> "StrategyProfile":
        ss = tuple(frozenset(int(x) for x in s) for s in lists)
        p = StrategyProfile(ss)
        if n is not None and len(ss) != n:
            raise StructureError(f"profile has {len(ss)} strategies, metric has {n} nodes")
        p.check()
        return p

    @staticmethod
    def empty(n: int) -> "StrategyProfile":
        return StrategyProfile(tuple(frozenset() for _ in range(n)))

    @staticmethod
    def from_adjacency(adj) -> "StrategyProfile":
        a = np.asarray(adj)
        return StrategyProfile(tuple(frozenset(int(y) for y in np.flatnonzero(a[x])) for x in range(a.shape[0])))

    @staticmethod
    def from_masks(masks: Sequence[int]) -> "StrategyProfile":
        n = len(masks)
        return StrategyProfile(tuple(frozenset(y for y in range(n) if (int(m) >> y) & 1) for m in masks))

    @property
    def n(self) -> int:
        return len(self.strategies)

    def check(self) -> None:
        n = self.n
        for u, s in enumerate(self.strategies):
            for w in s:
                if w == u:
                    raise StructureError(f"agent {u} lists itself")
                if not 0 <= w < n:
                    raise StructureError(f"agent {u} lists unknown node {w}")

    def __getitem__(self, u: int) -> frozenset:
        return self.strategies[u]

    def with_strategy(self, u: int, s: Iterable[int]) -> "StrategyProfile":
        ss = list(self.strategies)
        ss[u] = frozenset(s)
        return StrategyProfile(tuple(ss))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, w) for u, s in enumerate(self.strategies) for w in sorted(s)]

    def edge_count(self) -> int:
        return sum(len(s) for s in self.strategies)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, s in enumerate(self.strategies):
            for w in s:
                a[u, w] = 1
        return a

    def masks(self) -> list[int]:
        return [sum(1 << w for w in s) for s in self.strategies]

    def canonical(self) -> tuple:
        return tuple(tuple(sorted(s)) for s in self.strategies)

    def digest(self) -> bytes:
        """128-bit hash of the canonical form."""
        raw = ";".join(",".join(map(str, s)) for s in self.canonical()).encode()
        return hashlib.blake2b(raw, digest_size=16).digest()

    def to_json(self) -> dict:
        return {"strategies": [list(s) for s in self.canonical()]}


@dataclass(frozen=True)
class ZPolicy:
    """How an unreachable target is charged.

    ``lexicographic`` compares (unreachable count, finite cost); ``numeric``
    charges ``value`` per unreachable target.
    """

    mode: str = LEXICOGRAPHIC
    value: Scalar | None = None

    @staticmethod
    def lexicographic() -> "ZPolicy":
        return ZPolicy(LEXICOGRAPHIC, None)

    @staticmethod
    def numeric(value) -> "ZPolicy":
        return ZPolicy(NUMERIC, value)

    @property
    def kernel_value(self) -> float:
        """The penalty as the kernels expect it (0 means lexicographic)."""
        return 0.0 if self.mode == LEXICOGRAPHIC else float(self.value)


def default_z(alpha, n: int, exact: bool = True) -> Scalar:
    """Default numeric penalty, large enough to dominate any finite cost."""
    a = to_exact(alpha) if exact else float(alpha)
    return 10**6 * (1 + a) * n


class LexCost(NamedTuple):
    unreachable: int
    finite: Scalar


@dataclass(frozen=True)
class CostBreakdown:
    unreachable: int
    finite_stretch_sum: Scalar
    edge_count: int
    alpha: Scalar

    @property
    def value(self) -> Scalar:
        """Cost ignoring unreachable targets."""
        return self.finite_stretch_sum + self.alpha * self.edge_count

    def total(self, z: ZPolicy):
        if z.mode == LEXICOGRAPHIC:
            return LexCost(self.unreachable, self.value)
        return self.value + z.value * self.unreachable

    def to_json(self, z: ZPolicy | None = None) -> dict:
        out = {"unreachable": self.unreachable, "stretch_sum": self.finite_stretch_sum, "edges": self.edge_count}
        if z is not None:
            t = self.total(z)
            out["total"] = list(t) if isinstance(t, LexCost) else t
        return out


@dataclass(frozen=True)
class GreedyDistanceResult:
    value: Scalar | None  # None means unreachable
    path: tuple | None

    @property
    def reachable(self) -> bool:
        return self.value is not None


@dataclass(frozen=True, eq=False)
class Network:
    metric: MetricSpace
    profile: StrategyProfile
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.metric.n

    def out(self, x: int) -> list[int]:
        return sorted(self.profile[x])

    def _table(self, v: int):
        """(gd[x], next hop[x]) for every source x toward target v."""
        t = self._cache.get(v)
        if t is not None:
            return t
        d = self.metric.dist
        n = self.n
        gd: list = [None] * n
        nxt: list = [None] * n
        gd[v] = d[v][v]
        for x in sorted(range(n), key=lambda a: d[a][v]):
            if x == v:
                continue
            dx = d[x][v]
            best = None
            hop = None
            for y in self.out(x):
                if d[y][v] < dx and gd[y] is not None:
                    c = d[x][y] + gd[y]
                    if best is None or c < best:
                        best, hop = c, y
            gd[x], nxt[x] = best, hop
        self._cache[v] = (gd, nxt)
        return gd, nxt

    def greedy_matrix(self) -> list[list]:
        cols = [self._table(v)[0] for v in range(self.n)]
        return [[cols[v][x] for v in range(self.n)] for x in range(self.n)]


def build_network(m: MetricSpace, s: StrategyProfile) -> Network:
    if s.n != m.n:
        raise StructureError(f"profile has {s.n} strategies, metric has {m.n} nodes")
    s.check()
    return Network(m, s)


def is_greedy_path(m: MetricSpace, path: Sequence[int]) -> bool:
    """Every hop strictly decreases the distance to the last node."""
    t = path[-1]
    return all(m.d(path[i + 1], t) < m.d(path[i], t) for i in range(len(path) - 1))


def greedy_distance(g: Network, u: int, v: int) -> GreedyDistanceResult:
    """Length of a shortest greedy path from u to v, with one such path."""
    gd, nxt = g._table(v)
    if gd[u] is None:
        return GreedyDistanceResult(None, None)
    path = [u]
    while path[-1] != v:
        path.append(nxt[path[-1]])
    return GreedyDistanceResult(gd[u], tuple(path))


def stretch(g: Network, u: int, v: int, z: ZPolicy | None = None):
    """gd/d, or the penalty (None in lexicographic mode) when unreachable."""
    if u == v:
        raise StructureError("stretch needs two distinct nodes")
    r = greedy_distance(g, u, v)
    if r.value is None:
        if z is None or z.mode == LEXICOGRAPHIC:
            return None
        return z.value
    return r.value / g.metric.d(u, v)


def _alpha(m: MetricSpace, alpha):
    return to_exact(alpha) if m.exact else float(alpha)


def agent_cost(g: Network, u: int, alpha) -> CostBreakdown:
    a = _alpha(g.metric, alpha)
    zero = Fraction(0) if g.metric.exact else 0.0
    unreach = 0
    total = zero
    for v in range(g.n):
        if v == u:
            continue
        gd = g._table(v)[0][u]
        if gd is None:
            unreach += 1
        else:
            total += gd / g.metric.d(u, v)
    return CostBreakdown(unreach, total, len(g.profile[u]), a)


@dataclass(frozen=True)
class SocialCost:
    per_agent: tuple
    z: ZPolicy

    @property
    def total(self):
        ts = [c.total(self.z) for c in self.per_agent]
        if self.z.mode == LEXICOGRAPHIC:
            return LexCost(sum(t.unreachable for t in ts), sum(t.finite for t in ts))
        return sum(ts)


def social_cost(g: Network, alpha, z: ZPolicy | None = None) -> SocialCost:
    z = z or ZPolicy.lexicographic()
    return SocialCost(tuple(agent_cost(g, u, alpha) for u in range(g.n)), z)


def routing_enabled(g: Network) -> bool:
    """Every ordered pair has a greedy path."""
    return all(x is not None for row in g.greedy_matrix() for x in row)


def unreachable_pairs(g: Network) -> list[tuple[int, int]]:
    gm = g.greedy_matrix()
    return [(u, v) for u in range(g.n) for v in range(g.n) if gm[u][v] is None]


def compare_costs(a: CostBreakdown, b: CostBreakdown, z: ZPolicy, tol=0) -> int:
    """-1 if a is cheaper than b, 1 if dearer, 0 on a tie (within tol)."""
    ta, tb = a.total(z), b.total(z)
    if z.mode == LEXICOGRAPHIC:
        if ta.unreachable != tb.unreachable:
            return -1 if ta.unreachable < tb.unreachable else 1
        ta, tb = ta.finite, tb.finite
    if ta < tb - tol:
        return -1
    if ta > tb + tol:
        return 1
    return 0


def agent_cost_of(m: MetricSpace, s: StrategyProfile, u: int, alpha) -> CostBreakdown:
    return agent_cost(build_network(m, s), u, alpha)
