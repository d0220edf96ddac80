"""Theta-graphs on points in the plane, routing along them, and the
instances that show where they fail or are tight."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .game import StrategyProfile
from .metric import EUCLIDEAN, MetricSpace, StructureError, metric_from_points

TWO_PI = 2 * math.pi
# fraction of a cone width below which an angle is snapped onto the next boundary
_SNAP = 1e-12


@dataclass(frozen=True)
class ConeSystem:
    """k cones [rotation + 2*pi*i/k, rotation + 2*pi*(i+1)/k) around every point."""

    k: int
    rotation: float = 0.0

    def __post_init__(self):
        if self.k < 2:
            raise StructureError("need at least 2 cones")

    @property
    def width(self) -> float:
        return TWO_PI / self.k

    def cone_of_angle(self, angle):
        t = np.mod(np.asarray(angle, dtype=float) - self.rotation, TWO_PI) / self.width
        i = np.floor(t + _SNAP).astype(np.int64)
        return np.mod(i, self.k)

    def bisector(self, i):
        return self.rotation + (np.asarray(i) + 0.5) * self.width


def _points(p) -> np.ndarray:
    if isinstance(p, MetricSpace):
        if p.kind != EUCLIDEAN or p.points is None:
            raise StructureError("theta constructions need a Euclidean metric")
        return np.array(p.points, dtype=float)
    return np.asarray(p, dtype=float)


def cone_tables(points, cones: ConeSystem) -> tuple[np.ndarray, np.ndarray]:
    """cone_of[x, y]: cone of y around x.  cone_edge[x, i]: x's pick in cone i or -1.

    The pick minimises the projection onto the cone bisector; ties go to
    the smallest id.
    """
    p = _points(points)
    n = len(p)
    dx = p[None, :, 0] - p[:, None, 0]
    dy = p[None, :, 1] - p[:, None, 1]
    ang = np.arctan2(dy, dx)
    cone = cones.cone_of_angle(ang)
    dist = np.hypot(dx, dy)
    proj = dist * np.cos(ang - cones.bisector(cone))
    np.fill_diagonal(cone, -1)
    edge = np.full((n, cones.k), -1, dtype=np.int64)
    for x in range(n):
        for i in range(cones.k):
            ys = np.flatnonzero(cone[x] == i)
            if ys.size:
                pr = proj[x, ys]
                edge[x, i] = ys[np.flatnonzero(pr == pr.min())[0]]
    np.fill_diagonal(cone, 0)
    return np.ascontiguousarray(cone), edge


def theta_graph(points, cones: ConeSystem) -> StrategyProfile:
    _, edge = cone_tables(points, cones)
    return StrategyProfile(tuple(frozenset(int(y) for y in row if y >= 0) for row in edge))


@dataclass(frozen=True)
class ThetaRoute:
    path: tuple | None
    length: float
    greedy: bool

    @property
    def reached(self) -> bool:
        return self.path is not None


def theta_route(points, cones: ConeSystem, u: int, v: int, step_limit: int | None = None) -> ThetaRoute:
    """From u, repeatedly take the edge in the cone containing v."""
    p = _points(points)
    cone, edge = cone_tables(p, cones)
    step_limit = step_limit or 4 * len(p)
    path = [u]
    x = u
    length = 0.0
    greedy = True
    while x != v:
        if len(path) > step_limit:
            return ThetaRoute(None, math.inf, False)
        y = int(edge[x, cone[x, v]])
        if y < 0:
            return ThetaRoute(None, math.inf, False)
        dxv = math.hypot(*(p[x] - p[v]))
        dyv = math.hypot(*(p[y] - p[v]))
        greedy &= dyv < dxv
        length += math.hypot(*(p[x] - p[y]))
        path.append(y)
        x = y
    return ThetaRoute(tuple(path), length, greedy)


@dataclass(frozen=True)
class RoutingSummary:
    max_stretch: float
    all_reached: bool
    all_greedy: bool
    worst_pair: tuple


def route_all(m: MetricSpace, cones: ConeSystem) -> RoutingSummary:
    """Theta-route every ordered pair; stretch is route length over distance."""
    cone, edge = cone_tables(m, cones)
    dist = m.array
    length, greedy, _ = kernels.theta_route_all(dist, cone, edge, 4 * m.n)
    with np.errstate(invalid="ignore", divide="ignore"):
        st = length / dist
    np.fill_diagonal(st, 1.0)
    i = np.unravel_index(int(np.argmax(st)), st.shape)
    return RoutingSummary(float(st[i]), bool(np.isfinite(length).all()), bool(greedy.all()), (int(i[0]), int(i[1])))


def stretch_bound_f(k: int) -> float:
    """Routing stretch bound 1 / (1 - 2 sin(pi/k)) for k > 6."""
    if k <= 6:
        raise ValueError("the bound needs k > 6")
    return 1.0 / (1.0 - 2.0 * math.sin(math.pi / k))


THETA8_STRETCH = 1 + math.sqrt(2)
THETA6_STRETCH = 12 * math.sqrt(3)
CLAIMED_FACTOR = (4 + 4 * math.sqrt(2) - 60 * math.sqrt(3)) / (math.sqrt(2) - 12 * math.sqrt(3))


def switch_threshold(n: int) -> float:
    return (THETA6_STRETCH - THETA8_STRETCH) * (n - 1)


@dataclass(frozen=True)
class Construction:
    cones: ConeSystem
    profile: StrategyProfile
    claimed_factor: float


def select_approx_construction(m: MetricSpace, alpha) -> Construction:
    """Theta_6 when edges are expensive, Theta_8 otherwise."""
    k = 6 if float(alpha) >= switch_threshold(m.n) else 8
    cones = ConeSystem(k, 0.0)
    return Construction(cones, theta_graph(m, cones), CLAIMED_FACTOR)


# ------------------------------------------------------------ instances

_SPREAD = 7 * math.pi / 36


@dataclass(frozen=True)
class SmallKInstance:
    metric: MetricSpace
    k: int
    triples: tuple  # ((u, v, w), ...) one per copy
    rotations: tuple  # rotation applied to each copy


def _rot(p, a):
    c, s = math.cos(a), math.sin(a)
    return (c * p[0] - s * p[1], s * p[0] + c * p[1])


def small_k_counterexample(k: int, eps: float = 1e-3, spacing: float = 4.0) -> SmallKInstance:
    """Copies of a three-point gadget that defeat every rotation of Theta_k, k <= 5.

    In one copy u sits at the origin, v at distance 1 and w at distance
    1 + eps, 7*pi/18 apart and symmetric about the reference direction.
    When one cone of u holds both, u links only to v, and v is farther
    from w than u is, so u has no greedy path to w.  Copy i is turned by
    i * (pi/k - 7*pi/36), enough copies to cover a full cone width.
    """
    if not 2 <= k <= 5:
        raise ValueError("the construction works for 2 <= k <= 5")
    step = math.pi / k - _SPREAD
    copies = math.ceil((TWO_PI / k) / step - 1e-9)
    side = math.ceil(math.sqrt(copies))
    pts = []
    triples = []
    rots = []
    for i in range(copies):
        cx, cy = spacing * (i % side), spacing * (i // side)
        a = i * step
        base = [(0.0, 0.0), _rot((math.cos(-_SPREAD), math.sin(-_SPREAD)), a),
                _rot(((1 + eps) * math.cos(_SPREAD), (1 + eps) * math.sin(_SPREAD)), a)]
        j = len(pts)
        pts += [(cx + x, cy + y) for x, y in base]
        triples.append((j, j + 1, j + 2))
        rots.append(a)
    return SmallKInstance(metric_from_points(pts), k, tuple(triples), tuple(rots))


@dataclass(frozen=True)
class LowerBoundInstance:
    metric: MetricSpace
    cones: ConeSystem
    u: int
    v: int
    others: tuple
    eps: float
    alpha: float
    theta_cost: float    # u's cost in the Theta-graph
    deviation_cost: float  # u's cost after switching to the single edge (u, v)

    @property
    def factor(self) -> float:
        return self.theta_cost / self.deviation_cost


def lower_bound_instance(k: int, eps: float = 0.5, alpha: float | None = None) -> LowerBoundInstance:
    """Points on the line x = 1 seen from u at the origin.

    ceil(k/2) + 1 directions spread evenly over
    [-pi/2 + 2pi/(5k), pi/2 - 2pi/(5k)], one point per direction on the
    line x = 1, each in its own cone of u; v = (1, 0).  When the middle
    direction is 0 that point is v itself.  Cones are aligned with a
    bisector at angle 0 when the count is odd, with a boundary otherwise.
    With alpha from ``required_alpha`` the single edge (u, v) beats u's
    Theta strategy by a factor of at least ceil(k/2) + 1 - eps.
    """
    cnt = math.ceil(k / 2) + 1
    lo = -math.pi / 2 + TWO_PI / (5 * k)
    angles = [lo + i * (-2 * lo) / (cnt - 1) for i in range(cnt)]
    pts = [(0.0, 0.0), (1.0, 0.0)]
    for a in angles:
        if abs(a) < 1e-12:
            continue
        pts.append((1.0, math.tan(a)))
    rotation = -math.pi / k if cnt % 2 else 0.0
    cones = ConeSystem(k, rotation)
    m = metric_from_points(pts)
    s = theta_graph(m, cones)
    from .equilibria import deviation_matrix

    dm = deviation_matrix(m, s, 0)
    cu, cf_theta = kernels.set_cost(dm.rows, sorted(s[0]), 0, 0.0)
    du, cf_dev = kernels.set_cost(dm.rows, [1], 0, 0.0)
    if cu or du:
        raise RuntimeError("construction left u without a greedy path")
    edges = len(s[0])
    if alpha is None:
        alpha = required_alpha(edges, cf_theta, cf_dev, cnt - eps)
    a = float(alpha)
    return LowerBoundInstance(m, cones, 0, 1, tuple(range(2, len(pts))), eps, a,
                              edges * a + cf_theta, a + cf_dev)


def required_alpha(edges: int, stretch_before: float, stretch_after: float, target: float) -> float:
    """Least alpha with (edges*alpha + before) / (alpha + after) >= target."""
    if edges <= target:
        raise ValueError("target factor must be below the edge count")
    return max(0.0, (target * stretch_after - stretch_before) / (edges - target))
