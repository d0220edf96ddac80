"""Pure Python / numpy versions of the hot loops.

Same signatures and results as the compiled module; used when the
extension is not built or when GREEDYNET_KERNELS=python.

Conventions shared by both backends:
  dist   float64[n, n]
  adj    uint8[n, n], adj[x, y] = 1 when x built the edge (x, y)
  order  int64[n, n], order[v] = nodes by increasing distance to v
  z      <= 0 means lexicographic costs (unreachable count first),
         > 0 is the numeric penalty per unreachable target
Costs travel as (unreachable, finite) where finite already includes
alpha * |S|.
"""
import numpy as np

INF = np.inf
DELETE, SWAP, ADD = 0, 1, 2


def better(u1, f1, u2, f2, z, tol):
    """True when cost (u1, f1) is strictly below (u2, f2)."""
    if z <= 0:
        if u1 != u2:
            return u1 < u2
        return f1 < f2 - tol
    return (f1 - f2) + z * (u1 - u2) < -tol


def greedy_all_pairs(dist, adj, order, skip=-1):
    """gd[x, v] over edges that strictly decrease the distance to v.

    Node ``skip`` keeps no out-edges (its row stays at inf).
    """
    n = dist.shape[0]
    out = np.full((n, n), INF)
    nbrs = [np.flatnonzero(adj[x]) for x in range(n)]
    if skip >= 0:
        nbrs[skip] = np.empty(0, dtype=np.int64)
    for v in range(n):
        g = np.full(n, INF)
        g[v] = 0.0
        dv = dist[:, v]
        for x in order[v]:
            if x == v:
                continue
            nb = nbrs[x]
            if nb.size == 0:
                continue
            ok = nb[dv[nb] < dv[x]]
            if ok.size:
                g[x] = (dist[x, ok] + g[ok]).min()
        out[:, v] = g
    return out


def deviation_rows(dist, adj, order, u):
    """r[w, v]: stretch u gets to v when routing through a direct edge to w.

    inf when w is not strictly closer to v than u or cannot reach v once
    u's own edges are removed.  Row and column u are inf.
    """
    g = greedy_all_pairs(dist, adj, order, skip=u)
    du = dist[u]
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (du[:, None] + g) / du[None, :]
    r[~(dist < du[None, :])] = INF
    r[np.isnan(r)] = INF
    r[u, :] = INF
    r[:, u] = INF
    return r


def set_cost(r, members, u, alpha):
    n = r.shape[0]
    if len(members):
        col = r[list(members)].min(axis=0)
    else:
        col = np.full(n, INF)
    col = np.delete(col, u)
    fin = np.isfinite(col)
    return int((~fin).sum()), float(col[fin].sum()) + alpha * len(members)


def first_improving_move(r, members, u, alpha, z, tol, best=False):
    """Scan deletions, then swaps, then additions (targets ascending).

    Returns None or (kind, a, b, old_cost, new_cost); with best=True the
    strictly cheapest single move is returned instead of the first.
    """
    n = r.shape[0]
    members = sorted(members)
    cur = set_cost(r, members, u, alpha)
    outside = [w for w in range(n) if w != u and w not in set(members)]
    found = None
    ref = cur

    def consider(kind, a, b, new):
        nonlocal found, ref
        if better(new[0], new[1], ref[0], ref[1], z, tol):
            found = (kind, a, b, cur, new)
            if best:
                ref = new
            return not best
        return False

    for a in members:
        rest = [w for w in members if w != a]
        if consider(DELETE, a, -1, set_cost(r, rest, u, alpha)):
            return found
    for a in members:
        rest = [w for w in members if w != a]
        for b in outside:
            if consider(SWAP, a, b, set_cost(r, rest + [b], u, alpha)):
                return found
    for b in outside:
        if consider(ADD, -1, b, set_cost(r, members + [b], u, alpha)):
            return found
    return found


def _lex_less(a, b):
    return list(a) < list(b)


def best_response_bb(r, u, alpha, z, tol, seed=None):
    """Exact best response by branch and bound over the rows of r.

    Optimum order: cost, then fewer edges, then lexicographically smallest
    sorted member list.  ``seed`` is an optional starting strategy used
    only as an initial bound.  Returns (members, unreachable, finite).
    """
    n = r.shape[0]
    cols = [v for v in range(n) if v != u]
    rows = {w: r[w, cols] for w in range(n) if w != u}
    # drop w when a smaller id covers every column at least as well
    cands = []
    for w in sorted(rows):
        if not any(np.all(rows[c] <= rows[w]) for c in cands):
            cands.append(w)
    m = len(cols)
    k_c = len(cands)
    suf = np.full((k_c + 1, m), INF)
    for i in range(k_c - 1, -1, -1):
        suf[i] = np.minimum(suf[i + 1], rows[cands[i]])

    def cost_of(col, k):
        fin = np.isfinite(col)
        return int((~fin).sum()), float(col[fin].sum()) + alpha * k

    inc = None  # (unreach, finite, members)
    if seed is not None:
        s = sorted(seed)
        col = np.full(m, INF)
        for w in s:
            col = np.minimum(col, r[w, cols])
        inc = (*cost_of(col, len(s)), s)

    def accept(cu, cf, mem):
        nonlocal inc
        if inc is None or better(cu, cf, inc[0], inc[1], z, tol):
            inc = (cu, cf, list(mem))
        elif not better(inc[0], inc[1], cu, cf, z, tol):
            if len(mem) < len(inc[2]) or (len(mem) == len(inc[2]) and _lex_less(mem, inc[2])):
                inc = (cu, cf, list(mem))

    mem: list[int] = []

    def rec(i, col):
        k = len(mem)
        if i == k_c:
            accept(*cost_of(col, k), mem)
            return
        if inc is not None:
            lu, lf = cost_of(np.minimum(col, suf[i]), k)
            if better(inc[0], inc[1], lu, lf, z, tol):
                return
            if not better(lu, lf, inc[0], inc[1], z, tol) and k >= len(inc[2]):
                if k == len(inc[2]):
                    accept(*cost_of(col, k), mem)
                return
        mem.append(cands[i])
        rec(i + 1, np.minimum(col, rows[cands[i]]))
        mem.pop()
        rec(i + 1, col)

    rec(0, np.full(m, INF))
    return inc[2], inc[0], inc[1]


def first_ge_violation(dist, adj, order, alpha, z, tol):
    """First agent with an improving single move: (agent, kind, a, b) or None."""
    n = dist.shape[0]
    for u in range(n):
        r = deviation_rows(dist, adj, order, u)
        mv = first_improving_move(r, np.flatnonzero(adj[u]).tolist(), u, alpha, z, tol)
        if mv is not None:
            return u, mv[0], mv[1], mv[2]
    return None


def count_ge(dist, order, alpha, z, tol, start, stop, store):
    """Enumerate every profile and count greedy equilibria.

    Agent 0's strategy index runs over [start, stop); strategies are
    bitmasks over the other agents.  Returns (count, masks of the first
    ``store`` equilibria as an int64[k, n] array).
    """
    n = dist.shape[0]
    per = [[mk for mk in range(1 << n) if not mk & (1 << a)] for a in range(n)]
    count = 0
    kept = []
    adj = np.zeros((n, n), dtype=np.uint8)
    digits = [start] + [0] * (n - 1)
    if start >= stop:
        return 0, np.zeros((0, n), dtype=np.int64)

    def load(a):
        mk = per[a][digits[a]]
        for b in range(n):
            adj[a, b] = (mk >> b) & 1

    for a in range(n):
        load(a)
    while True:
        if first_ge_violation(dist, adj, order, alpha, z, tol) is None:
            count += 1
            if len(kept) < store:
                kept.append([per[a][digits[a]] for a in range(n)])
        a = n - 1
        while a >= 0:
            digits[a] += 1
            lim = stop if a == 0 else len(per[a])
            if digits[a] < lim:
                load(a)
                break
            digits[a] = 0
            load(a)
            a -= 1
        if a < 0:
            break
    return count, np.array(kept, dtype=np.int64).reshape(-1, n)


def theta_route_all(dist, cone_of, cone_edge, step_limit):
    """Follow cone edges from every source to every target.

    Returns (length, greedy, hops): length is inf when the walk dead-ends
    or exceeds step_limit; greedy[s, t] says every hop strictly decreased
    the distance to t.
    """
    n = dist.shape[0]
    length = np.zeros((n, n))
    greedy = np.ones((n, n), dtype=np.uint8)
    hops = np.zeros((n, n), dtype=np.int64)
    idx = np.arange(n)
    for t in range(n):
        cur = idx.copy()
        acc = np.zeros(n)
        ok = np.ones(n, dtype=bool)
        steps = np.zeros(n, dtype=np.int64)
        active = cur != t
        for _ in range(step_limit):
            if not active.any():
                break
            a = np.flatnonzero(active)
            x = cur[a]
            nxt = cone_edge[x, cone_of[x, t]]
            dead = nxt < 0
            if dead.any():
                acc[a[dead]] = INF
                active[a[dead]] = False
                a, x, nxt = a[~dead], x[~dead], nxt[~dead]
            ok[a] &= dist[nxt, t] < dist[x, t]
            acc[a] += dist[x, nxt]
            steps[a] += 1
            cur[a] = nxt
            active[a] = nxt != t
        acc[active] = INF
        length[:, t] = acc
        greedy[:, t] = ok
        hops[:, t] = steps
    return length, greedy, hops
