"""Tree metrics: the tree network, rooted views and the set-cover gadget."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .dynamics import ActivationSchedule
from .game import StrategyProfile
from .metric import (
    MetricSpace,
    PartialDistanceSpec,
    StructureError,
    WeightedTree,
    metric_closure,
    metric_from_tree,
    to_exact,
)


def canonical_gt(t: WeightedTree) -> StrategyProfile:
    """Every tree edge, built in both directions."""
    return StrategyProfile(tuple(frozenset(t.adjacency[u]) for u in range(t.n)))


@dataclass(frozen=True)
class RootedView:
    root: int
    parent: tuple       # parent[x], -1 for the root
    children: tuple     # children[x] sorted
    order: tuple        # BFS order from the root
    subtree: tuple      # subtree[x] = frozenset of x's descendants including x

    @property
    def below(self) -> list[frozenset]:
        """The subtrees hanging off the root."""
        return [self.subtree[c] for c in self.children[self.root]]

    def postorder(self) -> list[int]:
        return list(reversed(self.order))


def below_subtrees(t: WeightedTree, u: int) -> RootedView:
    n = t.n
    parent = [-1] * n
    children: list[list[int]] = [[] for _ in range(n)]
    order = [u]
    seen = {u}
    q = deque([u])
    while q:
        x = q.popleft()
        for y in t.neighbors(x):
            if y not in seen:
                seen.add(y)
                parent[y] = x
                children[x].append(y)
                order.append(y)
                q.append(y)
    sub: list = [None] * n
    for x in reversed(order):
        acc = {x}
        for c in children[x]:
            acc |= sub[c]
        sub[x] = frozenset(acc)
    return RootedView(u, tuple(parent), tuple(tuple(c) for c in children), tuple(order), tuple(sub))


def verify_unique_ge(t: WeightedTree, s: StrategyProfile, alpha=None, cross_check: bool = False) -> bool:
    """True exactly when s is the tree network.

    With ``cross_check`` the greedy-equilibrium engine is run as well and
    a disagreement raises AssertionError.
    """
    ok = s.canonical() == canonical_gt(t).canonical()
    if cross_check:
        from .equilibria import is_greedy_equilibrium

        if alpha is None:
            raise ValueError("cross_check needs alpha")
        ge = is_greedy_equilibrium(metric_from_tree(t), s, alpha).holds
        if ge != ok:
            raise AssertionError(f"engine says GE={ge} but profile {'is' if ok else 'is not'} the tree network")
    return ok


def weak_acyclicity_schedule(t: WeightedTree, s0: StrategyProfile, root: int = 0) -> ActivationSchedule:
    """Activation order that takes best-response dynamics from s0 to the tree network.

    Bottom-up (children before parents) every agent learns its child
    edges; then top-down every agent also gets its parent edge and drops
    anything else.  Empty when s0 already is the tree network.
    """
    if s0.canonical() == canonical_gt(t).canonical():
        return ActivationSchedule.explicit([])
    rv = below_subtrees(t, root)
    return ActivationSchedule.explicit(rv.postorder() + list(rv.order))


@dataclass(frozen=True)
class SetCoverGadget:
    metric: MetricSpace
    profile: StrategyProfile  # the others' strategies; the deviator's row is empty
    deviator: int
    alpha: Fraction
    nodes: dict  # role -> node ids

    def cover_from(self, strategy: Iterable[int]) -> list[int]:
        """Indices of the sets whose nodes appear in a strategy."""
        q = self.nodes["sets"]
        return sorted(q.index(w) for w in strategy if w in q)


def _check_sets(universe: Sequence, sets: Sequence[Iterable]) -> tuple[list, list[frozenset]]:
    uni = list(universe)
    ss = [frozenset(s) for s in sets]
    if not uni:
        raise StructureError("empty universe")
    covered = set().union(*ss) if ss else set()
    if not set(uni) <= covered:
        raise StructureError("the sets do not cover the universe")
    if not covered <= set(uni):
        raise StructureError("a set names an element outside the universe")
    return uni, ss


def tree_setcover_gadget(universe: Sequence, sets: Sequence[Iterable], alpha=Fraction(41, 10)) -> SetCoverGadget:
    """General metric whose deviator's best response is {v} plus a minimum set cover.

    Nodes: u (deviator), v, one node per set and one per element.
    d(u,v)=3, d(u,Q)=3, d(v,Q)=2, d(Q,x)=3 when x is in Q, d(u,x)=4;
    every other distance is the shortest route.  v builds edges to every
    set node and each set node to its elements.
    """
    uni, ss = _check_sets(universe, sets)
    u, v = 0, 1
    q = [2 + j for j in range(len(ss))]
    x = {e: 2 + len(ss) + i for i, e in enumerate(uni)}
    n = 2 + len(ss) + len(uni)
    entries = [(u, v, 3)]
    for j, s in enumerate(ss):
        entries += [(u, q[j], 3), (v, q[j], 2)]
        entries += [(q[j], x[e], 3) for e in sorted(s, key=uni.index)]
    entries += [(u, x[e], 4) for e in uni]
    m = metric_closure(PartialDistanceSpec(n, tuple(entries)))
    labels = ["u", "v"] + [f"Q{j}" for j in range(len(ss))] + [f"x{e}" for e in uni]
    m = m.with_labels(labels)
    rows = [frozenset()] * n
    rows[v] = frozenset(q)
    for j, s in enumerate(ss):
        rows[q[j]] = frozenset(x[e] for e in s)
    return SetCoverGadget(m, StrategyProfile(tuple(rows)), u, to_exact(alpha),
                          {"u": u, "v": v, "sets": q, "elements": [x[e] for e in uni]})
