"""Best responses and equilibrium checks.

Searches run on the float kernels with a tolerance on cost comparisons.
Every witness they produce is recomputed with the exact cost engine
before it is reported.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernels
from .game import (
    LEXICOGRAPHIC,
    CostBreakdown,
    StrategyProfile,
    ZPolicy,
    agent_cost_of,
    build_network,
    compare_costs,
    social_cost,
    SocialCost,
)
from .metric import MetricSpace, StructureError

DEFAULT_TOL = 1e-9
DEFAULT_EXACT_LIMIT = 16

_KIND_NAMES = {kernels.DELETE: "delete", kernels.SWAP: "swap", kernels.ADD: "add"}


class ExactLimitExceeded(ValueError):
    """An exact best response was needed for an instance above the size limit."""


class KernelMismatch(RuntimeError):
    """A kernel verdict did not survive exact recomputation."""


@dataclass(frozen=True)
class Move:
    kind: str  # "add" | "delete" | "swap"
    remove: int | None = None
    add: int | None = None

    def apply(self, s: Iterable[int]) -> frozenset:
        out = set(s)
        if self.remove is not None:
            out.discard(self.remove)
        if self.add is not None:
            out.add(self.add)
        return frozenset(out)

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        if self.remove is not None:
            d["remove"] = self.remove
        if self.add is not None:
            d["add"] = self.add
        return d


def _move(kind: int, a: int, b: int) -> Move:
    return Move(_KIND_NAMES[kind], a if a >= 0 else None, b if b >= 0 else None)


@dataclass(frozen=True)
class Witness:
    agent: int
    strategy: frozenset
    old_cost: CostBreakdown
    new_cost: CostBreakdown
    move: Move | None = None

    def to_json(self, z: ZPolicy) -> dict:
        d = {
            "agent": self.agent,
            "strategy": sorted(self.strategy),
            "old_cost": self.old_cost.to_json(z),
            "new_cost": self.new_cost.to_json(z),
        }
        if self.move is not None:
            d["move"] = self.move.to_json()
        return d


@dataclass(frozen=True)
class EquilibriumReport:
    kind: str
    holds: bool
    witness: Witness | None = None
    beta: dict | None = None
    unreachable_agents: tuple = ()
    z: ZPolicy = field(default_factory=ZPolicy.lexicographic)

    @property
    def max_beta(self) -> float | None:
        if not self.beta:
            return None
        return max(self.beta.values())

    def to_json(self) -> dict:
        d = {"check": self.kind, "holds": self.holds, "unreachable_agents": list(self.unreachable_agents)}
        if self.witness is not None:
            d["witness"] = self.witness.to_json(self.z)
        if self.beta is not None:
            d["beta"] = {str(k): v for k, v in sorted(self.beta.items())}
            d["max_beta"] = self.max_beta
        return d


@dataclass(frozen=True)
class DeviationMatrix:
    """Stretch rows for a deviating agent.

    rows[w, v] is the stretch u gets to v through a direct edge to w
    (inf when w is not strictly closer to v or cannot reach it without
    u).  A strategy's cost is alpha * |S| plus the column minima.
    """

    agent: int
    rows: np.ndarray
    du: np.ndarray

    @property
    def raw(self) -> np.ndarray:
        """Path lengths d(u, w) + gd(w, v) instead of stretches."""
        with np.errstate(invalid="ignore"):
            out = self.rows * self.du[None, :]
        out[:, self.agent] = np.inf
        return out

    def cost(self, s: Iterable[int], alpha, z: ZPolicy | None = None) -> tuple[int, float]:
        return kernels.set_cost(self.rows, sorted(s), self.agent, float(alpha))


@dataclass(frozen=True)
class BestResponse:
    agent: int
    strategy: frozenset
    cost: CostBreakdown  # exact


def _prep(m: MetricSpace, s: StrategyProfile):
    if s.n != m.n:
        raise StructureError(f"profile has {s.n} strategies, metric has {m.n} nodes")
    s.check()
    return m.array, s.adjacency(), m.order


def deviation_matrix(m: MetricSpace, s: StrategyProfile, u: int) -> DeviationMatrix:
    dist, adj, order = _prep(m, s)
    return DeviationMatrix(u, kernels.deviation_rows(dist, adj, order, u), dist[u].copy())


def _greedy_members(r: np.ndarray, u: int, alpha: float, z: float, tol: float) -> list[int]:
    n = r.shape[0]
    chosen: list[int] = []
    cur = kernels.set_cost(r, chosen, u, alpha)
    while True:
        pick, pick_cost = None, None
        for w in range(n):
            if w == u or w in chosen:
                continue
            c = kernels.set_cost(r, sorted(chosen + [w]), u, alpha)
            if kernels.better(c[0], c[1], cur[0], cur[1], z, tol) and (
                pick is None or kernels.better(c[0], c[1], pick_cost[0], pick_cost[1], z, tol)
            ):
                pick, pick_cost = w, c
        if pick is None:
            break
        chosen.append(pick)
        cur = pick_cost
    for w in sorted(chosen):
        rest = sorted(x for x in chosen if x != w)
        c = kernels.set_cost(r, rest, u, alpha)
        if not kernels.better(cur[0], cur[1], c[0], c[1], z, tol):
            chosen, cur = rest, c
    return sorted(chosen)


def best_response_greedy(m: MetricSpace, s: StrategyProfile, u: int, alpha, z: ZPolicy | None = None,
                         tol: float = DEFAULT_TOL) -> BestResponse:
    """Add the most helpful edge while it pays off, then drop useless ones."""
    z = z or ZPolicy.lexicographic()
    dm = deviation_matrix(m, s, u)
    mem = _greedy_members(dm.rows, u, float(alpha), z.kernel_value, tol)
    return BestResponse(u, frozenset(mem), agent_cost_of(m, s.with_strategy(u, mem), u, alpha))


def best_response_exact(m: MetricSpace, s: StrategyProfile, u: int, alpha, z: ZPolicy | None = None,
                        tol: float = DEFAULT_TOL, exact_limit: int = DEFAULT_EXACT_LIMIT) -> BestResponse:
    """Cheapest strategy for u against the others' fixed strategies.

    Ties go to fewer edges, then to the lexicographically smallest set.
    """
    z = z or ZPolicy.lexicographic()
    if m.n > exact_limit:
        raise ExactLimitExceeded(f"exact best response limited to n <= {exact_limit}, got n = {m.n}")
    if not 0 <= u < m.n:
        raise StructureError(f"no agent {u}")
    dm = deviation_matrix(m, s, u)
    a, zv = float(alpha), z.kernel_value
    seed = _greedy_members(dm.rows, u, a, zv, tol)
    mem, _, _ = kernels.best_response_bb(dm.rows, u, a, zv, tol, seed)
    return BestResponse(u, frozenset(mem), agent_cost_of(m, s.with_strategy(u, mem), u, alpha))


def _witness(m, s, u, new, alpha, z, move=None, tol=DEFAULT_TOL) -> Witness:
    old_c = agent_cost_of(m, s, u, alpha)
    new_c = agent_cost_of(m, s.with_strategy(u, new), u, alpha)
    if compare_costs(new_c, old_c, z, 0 if m.exact else tol) != -1:
        raise KernelMismatch(f"agent {u}: claimed improvement {sorted(new)} does not hold exactly")
    return Witness(u, frozenset(new), old_c, new_c, move)


def _unreachable_agents(m: MetricSpace, s: StrategyProfile) -> tuple:
    dist, adj, order = _prep(m, s)
    g = kernels.greedy_all_pairs(dist, adj, order)
    return tuple(int(u) for u in np.flatnonzero(np.isinf(g).any(axis=1)))


def is_greedy_equilibrium(m: MetricSpace, s: StrategyProfile, alpha, z: ZPolicy | None = None,
                          tol: float = DEFAULT_TOL) -> EquilibriumReport:
    """No agent gains by a single add, delete or swap."""
    z = z or ZPolicy.lexicographic()
    dist, adj, order = _prep(m, s)
    hit = kernels.first_ge_violation(dist, adj, order, float(alpha), z.kernel_value, tol)
    unreach = _unreachable_agents(m, s)
    if hit is None:
        return EquilibriumReport("ge", True, unreachable_agents=unreach, z=z)
    u, kind, a, b = hit
    mv = _move(kind, a, b)
    w = _witness(m, s, u, mv.apply(s[u]), alpha, z, mv, tol)
    return EquilibriumReport("ge", False, w, unreachable_agents=unreach, z=z)


def improving_single_move(m: MetricSpace, s: StrategyProfile, u: int, alpha, z: ZPolicy | None = None,
                          tol: float = DEFAULT_TOL, best: bool = False) -> Move | None:
    z = z or ZPolicy.lexicographic()
    dm = deviation_matrix(m, s, u)
    hit = kernels.first_improving_move(dm.rows, sorted(s[u]), u, float(alpha), z.kernel_value, tol, best)
    if hit is None:
        return None
    return _move(hit[0], hit[1], hit[2])


def is_nash_equilibrium(m: MetricSpace, s: StrategyProfile, alpha, z: ZPolicy | None = None,
                        tol: float = DEFAULT_TOL, exact_limit: int = DEFAULT_EXACT_LIMIT) -> EquilibriumReport:
    """Every agent already plays a best response.

    Cheap witnesses (single moves, then the greedy heuristic) are tried
    first; certifying a true verdict needs exact best responses.
    """
    z = z or ZPolicy.lexicographic()
    dist, adj, order = _prep(m, s)
    a, zv = float(alpha), z.kernel_value
    unreach = _unreachable_agents(m, s)
    rows = {}
    for u in range(m.n):
        r = kernels.deviation_rows(dist, adj, order, u)
        rows[u] = r
        hit = kernels.first_improving_move(r, sorted(s[u]), u, a, zv, tol)
        if hit is not None:
            mv = _move(hit[0], hit[1], hit[2])
            return EquilibriumReport("ne", False, _witness(m, s, u, mv.apply(s[u]), alpha, z, mv, tol), unreachable_agents=unreach, z=z)
    for u in range(m.n):
        r = rows[u]
        cur = kernels.set_cost(r, sorted(s[u]), u, a)
        g = _greedy_members(r, u, a, zv, tol)
        gc = kernels.set_cost(r, g, u, a)
        if kernels.better(gc[0], gc[1], cur[0], cur[1], zv, tol):
            return EquilibriumReport("ne", False, _witness(m, s, u, g, alpha, z, None, tol), unreachable_agents=unreach, z=z)
    if m.n > exact_limit:
        raise ExactLimitExceeded(f"certifying a Nash equilibrium needs exact best responses; n = {m.n} > {exact_limit}")
    for u in range(m.n):
        r = rows[u]
        cur = kernels.set_cost(r, sorted(s[u]), u, a)
        mem, bu, bf = kernels.best_response_bb(r, u, a, zv, tol, sorted(s[u]))
        if kernels.better(bu, bf, cur[0], cur[1], zv, tol):
            return EquilibriumReport("ne", False, _witness(m, s, u, mem, alpha, z, None, tol), unreachable_agents=unreach, z=z)
    return EquilibriumReport("ne", True, unreachable_agents=unreach, z=z)


def approx_factor(m: MetricSpace, s: StrategyProfile, alpha, z: ZPolicy, tol: float = DEFAULT_TOL,
                  exact_limit: int = DEFAULT_EXACT_LIMIT, agents: Iterable[int] | None = None) -> EquilibriumReport:
    """beta_u = cost(s) / cost(best response) per agent, with a numeric penalty."""
    if z is None or z.mode == LEXICOGRAPHIC:
        raise ValueError("approximation factors need a numeric penalty for unreachable targets")
    if m.n > exact_limit:
        raise ExactLimitExceeded(f"exact best response limited to n <= {exact_limit}, got n = {m.n}")
    dist, adj, order = _prep(m, s)
    a, zv = float(alpha), float(z.value)
    beta = {}
    for u in (range(m.n) if agents is None else agents):
        r = kernels.deviation_rows(dist, adj, order, u)
        cu, cf = kernels.set_cost(r, sorted(s[u]), u, a)
        seed = _greedy_members(r, u, a, zv, tol)
        _, bu, bf = kernels.best_response_bb(r, u, a, zv, tol, seed)
        cur_total = cf + zv * cu
        br_total = bf + zv * bu
        beta[u] = cur_total / br_total
    return EquilibriumReport("approx", all(b <= 1 + tol for b in beta.values()), beta=beta,
                             unreachable_agents=_unreachable_agents(m, s), z=z)


def complete_graph_profile(n: int) -> StrategyProfile:
    return StrategyProfile(tuple(frozenset(w for w in range(n) if w != u) for u in range(n)))


def social_optimum_exact(m: MetricSpace, alpha, z: ZPolicy | None = None, tol: float = DEFAULT_TOL,
                         max_n: int = 4) -> tuple[StrategyProfile, SocialCost]:
    """Brute force over all profiles; ties go to fewer edges, then canonical order."""
    z = z or ZPolicy.lexicographic()
    n = m.n
    if n > max_n:
        raise ExactLimitExceeded(f"social optimum by enumeration limited to n <= {max_n}")
    dist, order = m.array, m.order
    a, zv = float(alpha), z.kernel_value
    options = [[frozenset(c) for k in range(n) for c in itertools.combinations([w for w in range(n) if w != u], k)]
               for u in range(n)]
    best = None
    for combo in itertools.product(*options):
        p = StrategyProfile(tuple(combo))
        g = kernels.greedy_all_pairs(dist, p.adjacency(), order)
        with np.errstate(invalid="ignore", divide="ignore"):
            st = g / dist
        np.fill_diagonal(st, 0.0)
        fin = np.isfinite(st)
        un = int((~fin).sum())
        f = float(st[fin].sum()) + a * p.edge_count()
        key = (un, f, p.edge_count(), p.canonical())
        if best is None or kernels.better(un, f, best[0], best[1], zv, tol) or (
            not kernels.better(best[0], best[1], un, f, zv, tol) and key[2:] < best[2:]
        ):
            best = key + (p,)
    p = best[4]
    return p, social_cost(build_network(m, p), alpha, z)


def _count_chunk(args):
    dist, order, a, zv, tol, start, stop, store = args
    return kernels.count_ge(dist, order, a, zv, tol, start, stop, store)


def count_greedy_equilibria(m: MetricSpace, alpha, z: ZPolicy | None = None, tol: float = DEFAULT_TOL,
                            store: int = 16, workers: int | None = None) -> tuple[int, list[StrategyProfile]]:
    """Enumerate every profile and count the greedy equilibria.

    The first agent's strategies are split into chunks across ``workers``
    processes (default: GNF_THREADS or 1).
    """
    z = z or ZPolicy.lexicographic()
    n = m.n
    if n > 6:
        raise ExactLimitExceeded("exhaustive profile enumeration limited to n <= 6")
    per = 1 << (n - 1)
    workers = workers or int(os.environ.get("GNF_THREADS", "1") or 1)
    workers = max(1, min(workers, per))
    bounds = [(per * i) // workers for i in range(workers + 1)]
    jobs = [(m.array, m.order, float(alpha), z.kernel_value, tol, bounds[i], bounds[i + 1], store)
            for i in range(workers)]
    if workers == 1:
        results = [_count_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_count_chunk, jobs))
    total = sum(int(c) for c, _ in results)
    found = [StrategyProfile.from_masks(row) for _, kept in results for row in kept][:store]
    return total, found
