"""Timing of the compiled kernels against the pure Python ones."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .game import StrategyProfile
from .metric import metric_from_points
from .theta import ConeSystem, cone_tables


@dataclass(frozen=True)
class Timing:
    kernel: str
    backend: str
    n: int
    seconds: float
    repeats: int


def _random_case(n: int, seed: int, density: float = 0.3):
    rng = np.random.default_rng(seed)
    m = metric_from_points(rng.random((n, 2)) * 100)
    adj = (rng.random((n, n)) < density).astype(np.uint8)
    np.fill_diagonal(adj, 0)
    return m, StrategyProfile.from_adjacency(adj)


def _clock(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def workloads(n: int, seed: int) -> dict:
    """kernel name -> function(backend module) running one workload."""
    m, s = _random_case(n, seed)
    dist, order, adj = m.array, m.order, s.adjacency()
    alpha = 2.0
    small, small_s = _random_case(min(n, 14), seed + 1)
    r_small = kernels.deviation_rows(small.array, small_s.adjacency(), small.order, 0)
    tiny, _ = _random_case(4, seed + 2)
    cone, edge = cone_tables(m, ConeSystem(8))

    return {
        "greedy_all_pairs": lambda k: k.greedy_all_pairs(dist, adj, order),
        "deviation_rows": lambda k: k.deviation_rows(dist, adj, order, 0),
        "first_ge_violation": lambda k: k.first_ge_violation(dist, adj, order, alpha, 0.0, 1e-9),
        "best_response_bb": lambda k: k.best_response_bb(r_small, 0, alpha, 0.0, 1e-9),
        "count_ge_n4": lambda k: k.count_ge(tiny.array, tiny.order, alpha, 0.0, 1e-9, 0, 8, 0),
        "theta_route_all": lambda k: k.theta_route_all(dist, cone, edge, 4 * n),
    }


def run(n: int = 40, seed: int = 0, repeats: int = 3) -> list[Timing]:
    out = []
    work = workloads(n, seed)
    for name, fn in work.items():
        for bname, mod in sorted(kernels.backends().items()):
            out.append(Timing(name, bname, n, _clock(lambda: fn(mod), repeats), repeats))
    return out


def to_csv(rows: list[Timing]) -> str:
    """One line per kernel and backend, with the speedup over the Python backend."""
    base = {r.kernel: r.seconds for r in rows if r.backend == "python"}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kernel", "backend", "n", "seconds", "speedup"])
    for r in rows:
        sp = base[r.kernel] / r.seconds if r.seconds > 0 and r.kernel in base else float("nan")
        w.writerow([r.kernel, r.backend, r.n, f"{r.seconds:.6f}", f"{sp:.2f}"])
    return buf.getvalue()
