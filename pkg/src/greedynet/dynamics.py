"""Improving-move and best-response dynamics with cycle detection."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from . import kernels
from .equilibria import (
    DEFAULT_EXACT_LIMIT,
    DEFAULT_TOL,
    ExactLimitExceeded,
    Move,
    _greedy_members,
    _move,
    _prep,
)
from .game import StrategyProfile, ZPolicy
from .metric import MetricSpace

CONVERGED = "converged"
CYCLE = "cycle"
STEP_LIMIT = "step_limit"
EXHAUSTED = "schedule_exhausted"

SINGLE_MOVES = "single"
FULL_STRATEGIES = "full"


@dataclass(frozen=True)
class ActivationSchedule:
    mode: str = "round_robin"  # "round_robin" | "random" | "explicit"
    seed: int | None = None
    agents: tuple = ()

    @staticmethod
    def round_robin() -> "ActivationSchedule":
        return ActivationSchedule("round_robin")

    @staticmethod
    def random(seed: int) -> "ActivationSchedule":
        return ActivationSchedule("random", seed=seed)

    @staticmethod
    def explicit(agents: Sequence[int]) -> "ActivationSchedule":
        return ActivationSchedule("explicit", agents=tuple(int(a) for a in agents))

    def iter_agents(self, n: int) -> Iterator[int]:
        if self.mode == "round_robin":
            while True:
                yield from range(n)
        elif self.mode == "random":
            rng = random.Random(self.seed)
            while True:
                yield rng.randrange(n)
        elif self.mode == "explicit":
            yield from self.agents
        else:
            raise ValueError(f"unknown schedule {self.mode!r}")


@dataclass(frozen=True)
class TraceStep:
    activation: int
    agent: int
    old: frozenset
    new: frozenset
    delta: float  # kernel cost change of the mover (numeric penalty or lexicographic finite part)
    move: Move | None = None

    def to_json(self) -> dict:
        d = {"activation": self.activation, "agent": self.agent, "old": sorted(self.old),
             "new": sorted(self.new), "delta": self.delta}
        if self.move is not None:
            d["move"] = self.move.to_json()
        return d


@dataclass
class DynamicsTrace:
    start: StrategyProfile
    steps: list = field(default_factory=list)
    status: str = STEP_LIMIT
    final: StrategyProfile | None = None
    cycle_start: int | None = None  # index into profiles() where the repeated profile first occurred
    cycle_period: int | None = None
    activations: int = 0

    def profiles(self) -> list[StrategyProfile]:
        out = [self.start]
        for st in self.steps:
            out.append(out[-1].with_strategy(st.agent, st.new))
        return out

    def to_json(self) -> dict:
        d = {"status": self.status, "activations": self.activations,
             "steps": [s.to_json() for s in self.steps]}
        if self.final is not None:
            d["final"] = self.final.to_json()
        if self.status == CYCLE:
            d["cycle"] = {"start": self.cycle_start, "period": self.cycle_period}
        return d


class ScriptedMoves:
    """Per-agent lists of full strategies, proposed in turn (cyclically)."""

    def __init__(self, scripts: dict):
        self.scripts = {int(k): [frozenset(s) for s in v] for k, v in scripts.items()}
        self.pos = {k: 0 for k in self.scripts}

    def __call__(self, m, s, u) -> list:
        lst = self.scripts.get(u)
        if not lst:
            return []
        out = lst[self.pos[u] % len(lst)]
        self.pos[u] += 1
        return [out]


def detect_cycle(profiles: Sequence[StrategyProfile]) -> tuple[int, int] | None:
    """First (i, j), i < j, with profiles[i] == profiles[j]."""
    seen: dict = {}
    for j, p in enumerate(profiles):
        h = p.digest()
        for i in seen.get(h, []):
            if profiles[i].canonical() == p.canonical():
                return i, j
        seen.setdefault(h, []).append(j)
    return None


def _kernel_total(c, z):
    u, f = c
    return f + z * u if z > 0 else f


class _Run:
    def __init__(self, m, s0, alpha, z, tol):
        self.m = m
        self.dist, _, self.order = _prep(m, s0)
        self.alpha = float(alpha)
        self.z = z.kernel_value
        self.tol = tol
        self.trace = DynamicsTrace(s0)
        self.cur = s0
        self.seen = {s0.digest(): [(0, s0.canonical())]}

    def rows(self, u):
        return kernels.deviation_rows(self.dist, self.cur.adjacency(), self.order, u)

    def apply(self, act, u, new, old_c, new_c, move=None) -> bool:
        """Record a change; True when it closes a cycle."""
        old = self.cur[u]
        self.cur = self.cur.with_strategy(u, new)
        delta = _kernel_total(new_c, self.z) - _kernel_total(old_c, self.z)
        if self.z <= 0 and new_c[0] != old_c[0]:
            delta = float(new_c[0] - old_c[0])
        self.trace.steps.append(TraceStep(act, u, old, frozenset(new), delta, move))
        idx = len(self.trace.steps)
        key = self.cur.canonical()
        for i, k in self.seen.get(self.cur.digest(), []):
            if k == key:
                self.trace.status = CYCLE
                self.trace.cycle_start = i
                self.trace.cycle_period = idx - i
                return True
        self.seen.setdefault(self.cur.digest(), []).append((idx, key))
        return False

    def finish(self, status):
        self.trace.status = status
        self.trace.final = self.cur
        return self.trace


def _is_fixpoint(run: _Run, improve: Callable[[int], tuple | None]) -> bool:
    return all(improve(u) is None for u in range(run.m.n))


def _drive(m, s0, alpha, z, tol, schedule, steps, improve_factory):
    run = _Run(m, s0, alpha, z, tol)
    improve = improve_factory(run)
    n = m.n
    stable: set = set()
    act = 0
    for u in schedule.iter_agents(n):
        if act >= steps:
            return run.finish(STEP_LIMIT)
        act += 1
        run.trace.activations = act
        hit = improve(u)
        if hit is None:
            stable.add(u)
            if len(stable) == n:
                return run.finish(CONVERGED)
            continue
        new, old_c, new_c, move = hit
        stable = set()
        if run.apply(act, u, new, old_c, new_c, move):
            run.trace.final = run.cur
            return run.trace
    # explicit schedule ran out
    if _is_fixpoint(run, improve):
        return run.finish(CONVERGED)
    return run.finish(EXHAUSTED)


def run_improving_dynamics(m: MetricSpace, s0: StrategyProfile, alpha, schedule: ActivationSchedule | None = None,
                           move_source=SINGLE_MOVES, z: ZPolicy | None = None, steps: int = 1000,
                           tol: float = DEFAULT_TOL, best_move: bool = False) -> DynamicsTrace:
    """Each activated agent applies an improving move, if it has one.

    ``move_source`` is SINGLE_MOVES (deletions, then swaps, then additions,
    targets ascending; the first improving one, or the best with
    ``best_move``), FULL_STRATEGIES (the exact best response) or a callable (metric, profile, agent) -> candidate
    strategies, of which the first strictly improving one is applied.
    """
    z = z or ZPolicy.lexicographic()
    schedule = schedule or ActivationSchedule.round_robin()

    def factory(run: _Run):
        def improve(u):
            r = run.rows(u)
            if move_source == SINGLE_MOVES:
                hit = kernels.first_improving_move(r, sorted(run.cur[u]), u, run.alpha, run.z, run.tol, best_move)
                if hit is None:
                    return None
                mv = _move(hit[0], hit[1], hit[2])
                return mv.apply(run.cur[u]), hit[3], hit[4], mv
            cur = kernels.set_cost(r, sorted(run.cur[u]), u, run.alpha)
            for cand in move_source(run.m, run.cur, u):
                c = kernels.set_cost(r, sorted(cand), u, run.alpha)
                if kernels.better(c[0], c[1], cur[0], cur[1], run.z, run.tol):
                    return frozenset(cand), cur, c, None
            return None
        return improve

    if move_source == FULL_STRATEGIES:
        return run_best_response_dynamics(m, s0, alpha, schedule, z, steps, tol)
    return _drive(m, s0, alpha, z, tol, schedule, steps, factory)


def run_best_response_dynamics(m: MetricSpace, s0: StrategyProfile, alpha, schedule: ActivationSchedule | None = None,
                               z: ZPolicy | None = None, steps: int = 1000, tol: float = DEFAULT_TOL,
                               exact_limit: int = DEFAULT_EXACT_LIMIT) -> DynamicsTrace:
    """Each activated agent switches to its exact best response.

    An agent whose current strategy is already optimal keeps it.
    """
    z = z or ZPolicy.lexicographic()
    schedule = schedule or ActivationSchedule.round_robin()
    if m.n > exact_limit:
        raise ExactLimitExceeded(f"best-response dynamics need exact best responses; n = {m.n} > {exact_limit}")

    def factory(run: _Run):
        def improve(u):
            r = run.rows(u)
            mine = sorted(run.cur[u])
            cur = kernels.set_cost(r, mine, u, run.alpha)
            seed = _greedy_members(r, u, run.alpha, run.z, run.tol)
            mem, bu, bf = kernels.best_response_bb(r, u, run.alpha, run.z, run.tol, seed)
            if not kernels.better(bu, bf, cur[0], cur[1], run.z, run.tol):
                return None
            return frozenset(mem), cur, (bu, bf), None
        return improve

    return _drive(m, s0, alpha, z, tol, schedule, steps, factory)
