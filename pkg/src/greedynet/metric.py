"""Finite metric spaces: construction, validation and closure.

Rational metrics (1-2, tree, general) keep their distances as ``Fraction``
so that every comparison is exact.  Euclidean metrics use floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

Scalar = Union[Fraction, float]

ONE_TWO = "one_two"
TREE = "tree"
EUCLIDEAN = "euclidean"
GENERAL = "general"
KINDS = (ONE_TWO, TREE, EUCLIDEAN, GENERAL)

FLOAT_TOL = 1e-9


class MetricError(ValueError):
    """The distances do not form a metric (or cannot be completed into one)."""

    def __init__(self, message: str, violations: Sequence[tuple] = ()):
        super().__init__(message)
        self.violations = list(violations)


class StructureError(ValueError):
    """Malformed input: non-square matrix, negative entries, bad indices."""


def to_exact(x) -> Fraction:
    """Parse ints, Fractions, "p/q" strings and decimal floats exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise StructureError(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise StructureError(f"non-finite distance {x!r}")
        # repr gives the shortest decimal that round-trips, so 0.6 -> 3/5
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise StructureError(f"bad rational {x!r}") from e
    raise StructureError(f"not a number: {x!r}")


def to_float(x) -> float:
    if isinstance(x, str):
        return float(to_exact(x))
    return float(x)


@dataclass(frozen=True)
class WeightedTree:
    n: int
    edges: tuple  # ((u, v, w), ...) with w a Fraction

    @staticmethod
    def from_edges(edges: Iterable[Sequence], n: int | None = None) -> "WeightedTree":
        es = []
        for e in edges:
            if len(e) != 3:
                raise StructureError(f"tree edge needs (u, v, w): {e!r}")
            u, v, w = int(e[0]), int(e[1]), to_exact(e[2])
            if w <= 0:
                raise StructureError(f"tree edge weight must be positive: {e!r}")
            es.append((u, v, w))
        if n is None:
            n = 1 + max((max(u, v) for u, v, _ in es), default=0)
        t = WeightedTree(n, tuple(es))
        t._check()
        return t

    def _check(self) -> None:
        if len(self.edges) != self.n - 1:
            raise StructureError(f"a tree on {self.n} nodes has {self.n - 1} edges, got {len(self.edges)}")
        parent = list(range(self.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v, _ in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise StructureError(f"bad tree edge ({u}, {v})")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise StructureError("tree edges contain a cycle")
            parent[ru] = rv

    @cached_property
    def adjacency(self) -> list[dict[int, Fraction]]:
        adj: list[dict[int, Fraction]] = [dict() for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def neighbors(self, u: int) -> list[int]:
        return sorted(self.adjacency[u])


@dataclass(frozen=True)
class PartialDistanceSpec:
    n: int
    entries: tuple  # ((u, v, d), ...)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple = ()  # (u, w, v): d(u,w) > d(u,v) + d(v,w)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [list(t) for t in self.violations]}


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A finite metric on nodes ``0..n-1``."""

    n: int
    kind: str
    dist: tuple  # tuple of row tuples
    points: tuple | None = None
    tree: WeightedTree | None = None
    labels: tuple | None = None
    one_edges: frozenset = field(default=frozenset())

    @property
    def exact(self) -> bool:
        return self.kind != EUCLIDEAN

    def d(self, u: int, v: int) -> Scalar:
        return self.dist[u][v]

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.dist], dtype=np.float64)

    @cached_property
    def order(self) -> np.ndarray:
        """order[v] lists all nodes by increasing distance to v."""
        return np.ascontiguousarray(np.argsort(self.array, axis=1, kind="stable").astype(np.int64))

    def label(self, u: int) -> str:
        return str(self.labels[u]) if self.labels else str(u)

    def index(self, label) -> int:
        if self.labels is None:
            return int(label)
        return self.labels.index(label)

    def with_labels(self, labels: Sequence) -> "MetricSpace":
        if len(labels) != self.n:
            raise StructureError("one label per node")
        return MetricSpace(self.n, self.kind, self.dist, self.points, self.tree, tuple(labels), self.one_edges)

    def to_json(self) -> dict:
        if self.kind == ONE_TWO:
            body = {"n": self.n, "one_edges": sorted([list(e) for e in self.one_edges])}
        elif self.kind == TREE and self.tree is not None:
            body = {"edges": [[u, v, w] for u, v, w in self.tree.edges]}
        elif self.kind == EUCLIDEAN and self.points is not None:
            body = {"points": [list(p) for p in self.points]}
        else:
            body = {"dist": [list(r) for r in self.dist]}
        return {"kind": self.kind, **body}


def _as_rows(matrix) -> list[list]:
    if isinstance(matrix, MetricSpace):
        return [list(r) for r in matrix.dist]
    rows = [list(r) for r in matrix]
    n = len(rows)
    for r in rows:
        if len(r) != n:
            raise StructureError("distance matrix is not square")
    return rows


def validate_metric(m, tol: float = FLOAT_TOL) -> ValidationReport:
    """Check zero diagonal, symmetry, positivity and the triangle inequality.

    Structural problems raise ``StructureError``; metric violations are
    returned in the report.  Float matrices are compared with a relative
    tolerance, rational ones exactly.
    """
    rows = _as_rows(m)
    n = len(rows)
    is_float = any(isinstance(x, float) for r in rows for x in r)
    if is_float:
        d = [[to_float(x) for x in r] for r in rows]
    else:
        d = [[to_exact(x) for x in r] for r in rows]
    for r in d:
        for x in r:
            if x < 0:
                raise StructureError("negative distance")
    slack = (lambda a: tol * max(1.0, abs(a))) if is_float else (lambda a: 0)
    bad = []
    for u in range(n):
        if d[u][u] != 0:
            bad.append((u, u, u))
        for w in range(u + 1, n):
            if d[u][w] != d[w][u] and abs(d[u][w] - d[w][u]) > slack(d[u][w]):
                bad.append((u, w, w))
            if d[u][w] == 0:
                bad.append((u, w, u))
    for u in range(n):
        du = d[u]
        for w in range(u + 1, n):
            duw = du[w]
            lim = duw - slack(duw)
            for v in range(n):
                if v == u or v == w:
                    continue
                if du[v] + d[v][w] < lim:
                    bad.append((u, w, v))
    return ValidationReport(not bad, tuple(bad))


def _make(kind: str, d: list[list], **kw) -> MetricSpace:
    rep = validate_metric(d)
    if not rep.ok:
        raise MetricError(f"not a metric: {len(rep.violations)} violation(s), first {rep.violations[0]}", rep.violations)
    return MetricSpace(len(d), kind, tuple(tuple(r) for r in d), **kw)


def metric_from_matrix(matrix, kind: str = GENERAL) -> MetricSpace:
    rows = _as_rows(matrix)
    if kind == EUCLIDEAN:
        d = [[to_float(x) for x in r] for r in rows]
    else:
        d = [[to_exact(x) for x in r] for r in rows]
    return _make(kind, d)


def metric_from_one_two(n: int, one_edges: Iterable[Sequence[int]]) -> MetricSpace:
    """Distance 1 on the given pairs, 2 everywhere else."""
    if n < 1:
        raise StructureError("need at least one node")
    es = set()
    for e in one_edges:
        u, v = int(e[0]), int(e[1])
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise StructureError(f"bad 1-edge ({u}, {v})")
        es.add((min(u, v), max(u, v)))
    one, two = Fraction(1), Fraction(2)
    d = [[Fraction(0) if u == v else (one if (min(u, v), max(u, v)) in es else two) for v in range(n)] for u in range(n)]
    return MetricSpace(n, ONE_TWO, tuple(tuple(r) for r in d), one_edges=frozenset(es))


def metric_from_tree(t: WeightedTree | Iterable[Sequence]) -> MetricSpace:
    """Shortest-path metric of a positively weighted tree."""
    if not isinstance(t, WeightedTree):
        t = WeightedTree.from_edges(t)
    n = t.n
    d = [[Fraction(0)] * n for _ in range(n)]
    for s in range(n):
        seen = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y, w in t.adjacency[x].items():
                if y not in seen:
                    seen.add(y)
                    d[s][y] = d[s][x] + w
                    stack.append(y)
    return MetricSpace(n, TREE, tuple(tuple(r) for r in d), tree=t)


def metric_from_points(points: Iterable[Sequence[float]]) -> MetricSpace:
    pts = tuple((float(p[0]), float(p[1])) for p in points)
    seen = {}
    for i, p in enumerate(pts):
        if not all(math.isfinite(c) for c in p):
            raise StructureError(f"point {i} is not finite")
        if p in seen:
            raise StructureError(f"points {seen[p]} and {i} coincide")
        seen[p] = i
    n = len(pts)
    d = [[math.hypot(pts[u][0] - pts[v][0], pts[u][1] - pts[v][1]) for v in range(n)] for u in range(n)]
    return MetricSpace(n, EUCLIDEAN, tuple(tuple(r) for r in d), points=pts)


def metric_closure(spec: PartialDistanceSpec | tuple) -> MetricSpace:
    """Complete a partial symmetric distance table by shortest paths.

    Given entries are kept as stated.  If the closure finds a shorter route
    than a given entry, that entry is reported as a violation instead of
    being shortened.
    """
    if not isinstance(spec, PartialDistanceSpec):
        n, entries = spec
        spec = PartialDistanceSpec(int(n), tuple(tuple(e) for e in entries))
    n = spec.n
    inf = None
    d: list[list] = [[inf] * n for _ in range(n)]
    given = {}
    for e in spec.entries:
        u, v, x = int(e[0]), int(e[1]), to_exact(e[2])
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise StructureError(f"bad entry ({u}, {v})")
        if x <= 0:
            raise StructureError(f"distance must be positive: ({u}, {v})")
        key = (min(u, v), max(u, v))
        if key in given and given[key] != x:
            raise StructureError(f"conflicting entries for {key}")
        given[key] = x
        d[u][v] = d[v][u] = x
    for u in range(n):
        d[u][u] = Fraction(0)
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik is None:
                continue
            di = d[i]
            for j in range(n):
                dkj = dk[j]
                if dkj is None:
                    continue
                s = dik + dkj
                if di[j] is None or s < di[j]:
                    di[j] = s
    if any(x is None for r in d for x in r):
        raise StructureError("partial distance spec is disconnected")
    bad = [(u, v, d[u][v]) for (u, v), x in sorted(given.items()) if d[u][v] < x]
    if bad:
        raise MetricError(
            f"{len(bad)} given entr{'y' if len(bad) == 1 else 'ies'} exceed the shortest route, first {bad[0][:2]}",
            bad,
        )
    return MetricSpace(n, GENERAL, tuple(tuple(r) for r in d))


def metric_from_json(obj: dict) -> MetricSpace:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise StructureError("metric object needs a 'kind'")
    kind = obj["kind"]
    try:
        if kind == ONE_TWO:
            return metric_from_one_two(int(obj["n"]), obj.get("one_edges", []))
        if kind == TREE:
            return metric_from_tree(WeightedTree.from_edges(obj["edges"], obj.get("n")))
        if kind == EUCLIDEAN:
            return metric_from_points(obj["points"])
        if kind == GENERAL:
            return metric_from_matrix(obj["dist"], GENERAL)
        if kind == "partial":
            return metric_closure(PartialDistanceSpec(int(obj["n"]), tuple(tuple(e) for e in obj["entries"])))
    except KeyError as e:
        raise StructureError(f"metric of kind {kind!r} is missing {e}") from e
    raise StructureError(f"unknown metric kind {kind!r}")
