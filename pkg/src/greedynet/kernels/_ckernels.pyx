# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops.  See _pykernels for the conventions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.float64_t f8
ctypedef cnp.uint8_t u1
ctypedef cnp.int64_t i8

cdef enum:
    DELETE = 0
    SWAP = 1
    ADD = 2


cdef inline bint _better(int u1_, double f1, int u2_, double f2, double z, double tol) noexcept nogil:
    if z <= 0:
        if u1_ != u2_:
            return u1_ < u2_
        return f1 < f2 - tol
    return (f1 - f2) + z * (u1_ - u2_) < -tol


def better(int u1_, double f1, int u2_, double f2, double z, double tol):
    return _better(u1_, f1, u2_, f2, z, tol)


cdef void _greedy(const f8[:, ::1] dist, const u1[:, ::1] adj, const i8[:, ::1] order,
                  f8[:, ::1] out, int skip, double* g) noexcept nogil:
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t v, k, x, y
    cdef double dx, best, c
    for v in range(n):
        for x in range(n):
            g[x] = INFINITY
        g[v] = 0.0
        for k in range(n):
            x = order[v, k]
            if x == v or x == skip:
                continue
            dx = dist[x, v]
            best = INFINITY
            for y in range(n):
                if adj[x, y] and dist[y, v] < dx:
                    c = dist[x, y] + g[y]
                    if c < best:
                        best = c
            g[x] = best
        for x in range(n):
            out[x, v] = g[x]


def greedy_all_pairs(const f8[:, ::1] dist, const u1[:, ::1] adj, const i8[:, ::1] order, int skip=-1):
    cdef Py_ssize_t n = dist.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    cdef f8[:, ::1] o = out
    cdef double* g = <double*> malloc(n * sizeof(double))
    try:
        _greedy(dist, adj, order, o, skip, g)
    finally:
        free(g)
    return out


cdef void _deviation(const f8[:, ::1] dist, const u1[:, ::1] adj, const i8[:, ::1] order,
                     int u, f8[:, ::1] r, double* g) noexcept nogil:
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t w, v
    cdef double duv
    _greedy(dist, adj, order, r, u, g)
    for w in range(n):
        for v in range(n):
            if w == u or v == u:
                r[w, v] = INFINITY
                continue
            duv = dist[u, v]
            if dist[w, v] < duv and r[w, v] < INFINITY:
                r[w, v] = (dist[u, w] + r[w, v]) / duv
            else:
                r[w, v] = INFINITY


def deviation_rows(const f8[:, ::1] dist, const u1[:, ::1] adj, const i8[:, ::1] order, int u):
    cdef Py_ssize_t n = dist.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    cdef f8[:, ::1] r = out
    cdef double* g = <double*> malloc(n * sizeof(double))
    try:
        _deviation(dist, adj, order, u, r, g)
    finally:
        free(g)
    return out


cdef inline void _cost(const f8[:, ::1] r, const int* mem, int k, int skip, int extra,
                       int u, double alpha, int* cu, double* cf) noexcept nogil:
    # members mem[0..k) minus index `skip`, plus node `extra` (if >= 0)
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t v, j
    cdef double m, x
    cdef int un = 0, size = 0
    cdef double fin = 0.0
    for v in range(n):
        if v == u:
            continue
        m = INFINITY
        for j in range(k):
            if j == skip:
                continue
            x = r[mem[j], v]
            if x < m:
                m = x
        if extra >= 0:
            x = r[extra, v]
            if x < m:
                m = x
        if m == INFINITY:
            un += 1
        else:
            fin += m
    size = k - (1 if skip >= 0 else 0) + (1 if extra >= 0 else 0)
    cu[0] = un
    cf[0] = fin + alpha * size


cdef int _scan(const f8[:, ::1] r, int* mem, int k, int* outside, int k_out, int u, double alpha,
               double z, double tol, bint best, int* res_kind, int* res_a, int* res_b,
               int* ou, double* of, int* nu, double* nf) noexcept nogil:
    # returns 1 when an improving move was found
    cdef int cu, ru, tu
    cdef double cf, rf, tf
    cdef int i, j, found = 0
    _cost(r, mem, k, -1, -1, u, alpha, &cu, &cf)
    ou[0] = cu
    of[0] = cf
    ru = cu
    rf = cf
    for i in range(k):
        _cost(r, mem, k, i, -1, u, alpha, &tu, &tf)
        if _better(tu, tf, ru, rf, z, tol):
            found = 1
            res_kind[0] = DELETE; res_a[0] = mem[i]; res_b[0] = -1
            nu[0] = tu; nf[0] = tf
            if not best:
                return 1
            ru = tu; rf = tf
    for i in range(k):
        for j in range(k_out):
            _cost(r, mem, k, i, outside[j], u, alpha, &tu, &tf)
            if _better(tu, tf, ru, rf, z, tol):
                found = 1
                res_kind[0] = SWAP; res_a[0] = mem[i]; res_b[0] = outside[j]
                nu[0] = tu; nf[0] = tf
                if not best:
                    return 1
                ru = tu; rf = tf
    for j in range(k_out):
        _cost(r, mem, k, -1, outside[j], u, alpha, &tu, &tf)
        if _better(tu, tf, ru, rf, z, tol):
            found = 1
            res_kind[0] = ADD; res_a[0] = -1; res_b[0] = outside[j]
            nu[0] = tu; nf[0] = tf
            if not best:
                return 1
            ru = tu; rf = tf
    return found


def set_cost(const f8[:, ::1] r, members, int u, double alpha):
    cdef int k = len(members)
    cdef int* mem = <int*> malloc((k + 1) * sizeof(int))
    cdef int cu, i
    cdef double cf
    try:
        for i in range(k):
            mem[i] = members[i]
        _cost(r, mem, k, -1, -1, u, alpha, &cu, &cf)
    finally:
        free(mem)
    return cu, cf


def first_improving_move(const f8[:, ::1] r, members, int u, double alpha, double z, double tol, bint best=False):
    cdef Py_ssize_t n = r.shape[0]
    ms = sorted(members)
    ms_set = set(ms)
    outs = [w for w in range(n) if w != u and w not in ms_set]
    cdef int k = len(ms), k_out = len(outs)
    cdef int* mem = <int*> malloc((k + 1) * sizeof(int))
    cdef int* outside = <int*> malloc((k_out + 1) * sizeof(int))
    cdef int kind = -1, a = -1, b = -1, ou = 0, nu = 0, found, i
    cdef double of = 0, nf = 0
    try:
        for i in range(k):
            mem[i] = ms[i]
        for i in range(k_out):
            outside[i] = outs[i]
        found = _scan(r, mem, k, outside, k_out, u, alpha, z, tol, best, &kind, &a, &b, &ou, &of, &nu, &nf)
    finally:
        free(mem)
        free(outside)
    if not found:
        return None
    return kind, a, b, (ou, of), (nu, nf)


# ---------------------------------------------------------------- best response

cdef struct BB:
    int m              # number of target columns
    int kc             # number of candidates
    int* cands
    double* rows       # kc x m
    double* suf        # (kc + 1) x m
    double* cols       # (kc + 1) x m, running column minima per depth
    double alpha
    double z
    double tol
    int* mem
    int k
    int have
    int inc_u
    double inc_f
    int* inc_mem
    int inc_k


cdef inline void _colcost(BB* s, const double* col, int k, int* cu, double* cf) noexcept nogil:
    cdef int v, un = 0
    cdef double fin = 0.0
    for v in range(s.m):
        if col[v] == INFINITY:
            un += 1
        else:
            fin += col[v]
    cu[0] = un
    cf[0] = fin + s.alpha * k


cdef inline bint _lex_less(const int* a, const int* b, int k) noexcept nogil:
    cdef int i
    for i in range(k):
        if a[i] != b[i]:
            return a[i] < b[i]
    return False


cdef void _accept(BB* s, const double* col) noexcept nogil:
    cdef int cu, i
    cdef double cf
    cdef bint take = False
    _colcost(s, col, s.k, &cu, &cf)
    if not s.have or _better(cu, cf, s.inc_u, s.inc_f, s.z, s.tol):
        take = True
    elif not _better(s.inc_u, s.inc_f, cu, cf, s.z, s.tol):
        if s.k < s.inc_k or (s.k == s.inc_k and _lex_less(s.mem, s.inc_mem, s.k)):
            take = True
    if take:
        s.have = 1
        s.inc_u = cu
        s.inc_f = cf
        s.inc_k = s.k
        for i in range(s.k):
            s.inc_mem[i] = s.mem[i]


cdef void _rec(BB* s, int i) noexcept nogil:
    cdef double* col = s.cols + i * s.m
    cdef double* nxt = s.cols + (i + 1) * s.m
    cdef double* sf
    cdef double* row
    cdef int v, lu
    cdef double lf, x, y
    if i == s.kc:
        _accept(s, col)
        return
    if s.have:
        sf = s.suf + i * s.m
        lu = 0
        lf = 0.0
        for v in range(s.m):
            x = col[v]
            y = sf[v]
            if y < x:
                x = y
            if x == INFINITY:
                lu += 1
            else:
                lf += x
        lf += s.alpha * s.k
        if _better(s.inc_u, s.inc_f, lu, lf, s.z, s.tol):
            return
        if not _better(lu, lf, s.inc_u, s.inc_f, s.z, s.tol) and s.k >= s.inc_k:
            if s.k == s.inc_k:
                _accept(s, col)
            return
    # include candidate i
    row = s.rows + i * s.m
    for v in range(s.m):
        x = col[v]
        if row[v] < x:
            x = row[v]
        nxt[v] = x
    s.mem[s.k] = s.cands[i]
    s.k += 1
    _rec(s, i + 1)
    s.k -= 1
    # exclude candidate i
    for v in range(s.m):
        nxt[v] = col[v]
    _rec(s, i + 1)


def best_response_bb(const f8[:, ::1] r, int u, double alpha, double z, double tol, seed=None):
    cdef Py_ssize_t n = r.shape[0]
    cols = [v for v in range(n) if v != u]
    cdef int m = len(cols)
    # drop w when a smaller id covers every column at least as well
    cand_list = []
    cdef int w, c, v, i
    cdef bint dom
    for w in range(n):
        if w == u:
            continue
        dom = False
        for c in cand_list:
            dom = True
            for v in range(n):
                if v != u and r[c, v] > r[w, v]:
                    dom = False
                    break
            if dom:
                break
        if not dom:
            cand_list.append(w)
    cdef BB s
    s.m = m
    s.kc = len(cand_list)
    s.alpha = alpha
    s.z = z
    s.tol = tol
    s.k = 0
    s.have = 0
    s.inc_k = 0
    s.cands = <int*> malloc((s.kc + 1) * sizeof(int))
    s.rows = <double*> malloc((s.kc + 1) * (m + 1) * sizeof(double))
    s.suf = <double*> malloc((s.kc + 1) * (m + 1) * sizeof(double))
    s.cols = <double*> malloc((s.kc + 1) * (m + 1) * sizeof(double))
    s.mem = <int*> malloc((n + 1) * sizeof(int))
    s.inc_mem = <int*> malloc((n + 1) * sizeof(int))
    cdef double* col0
    cdef double x
    try:
        for i in range(s.kc):
            s.cands[i] = cand_list[i]
            for v in range(m):
                s.rows[i * m + v] = r[cand_list[i], cols[v]]
        for v in range(m):
            s.suf[s.kc * m + v] = INFINITY
        for i in range(s.kc - 1, -1, -1):
            for v in range(m):
                x = s.rows[i * m + v]
                if s.suf[(i + 1) * m + v] < x:
                    x = s.suf[(i + 1) * m + v]
                s.suf[i * m + v] = x
        col0 = s.cols
        if seed is not None:
            sd = sorted(seed)
            for v in range(m):
                col0[v] = INFINITY
            for i, w in enumerate(sd):
                s.mem[i] = w
                for v in range(m):
                    if r[w, cols[v]] < col0[v]:
                        col0[v] = r[w, cols[v]]
            s.k = len(sd)
            _accept(&s, col0)
            s.k = 0
        for v in range(m):
            col0[v] = INFINITY
        with nogil:
            _rec(&s, 0)
        out = [s.inc_mem[i] for i in range(s.inc_k)]
        return out, s.inc_u, s.inc_f
    finally:
        free(s.cands)
        free(s.rows)
        free(s.suf)
        free(s.cols)
        free(s.mem)
        free(s.inc_mem)


# ---------------------------------------------------------------- equilibria

cdef int _ge_violation(const f8[:, ::1] dist, const u1[:, ::1] adj, const i8[:, ::1] order,
                       double alpha, double z, double tol, f8[:, ::1] r, double* g,
                       int* mem, int* outside, int* res) noexcept nogil:
    # returns the violating agent or -1; res = (kind, a, b)
    cdef Py_ssize_t n = dist.shape[0]
    cdef int u, w, k, k_out, kind, a, b, ou, nu
    cdef double of, nf
    for u in range(n):
        _deviation(dist, adj, order, u, r, g)
        k = 0
        k_out = 0
        for w in range(n):
            if w == u:
                continue
            if adj[u, w]:
                mem[k] = w
                k += 1
            else:
                outside[k_out] = w
                k_out += 1
        if _scan(r, mem, k, outside, k_out, u, alpha, z, tol, False, &kind, &a, &b, &ou, &of, &nu, &nf):
            res[0] = kind
            res[1] = a
            res[2] = b
            return u
    return -1


def first_ge_violation(const f8[:, ::1] dist, const u1[:, ::1] adj, const i8[:, ::1] order,
                       double alpha, double z, double tol):
    cdef Py_ssize_t n = dist.shape[0]
    rr = np.empty((n, n), dtype=np.float64)
    cdef f8[:, ::1] r = rr
    cdef double* g = <double*> malloc(n * sizeof(double))
    cdef int* mem = <int*> malloc((n + 1) * sizeof(int))
    cdef int* outside = <int*> malloc((n + 1) * sizeof(int))
    cdef int res[3]
    cdef int who
    try:
        with nogil:
            who = _ge_violation(dist, adj, order, alpha, z, tol, r, g, mem, outside, res)
    finally:
        free(g)
        free(mem)
        free(outside)
    if who < 0:
        return None
    return who, res[0], res[1], res[2]


def count_ge(const f8[:, ::1] dist, const i8[:, ::1] order, double alpha, double z, double tol,
             long start, long stop, int store):
    cdef Py_ssize_t n = dist.shape[0]
    cdef long per = 1 << (n - 1)
    if start >= stop:
        return 0, np.zeros((0, n), dtype=np.int64)
    # strategy index -> bitmask over the other agents
    masks_np = np.zeros((n, per), dtype=np.int64)
    cdef i8[:, ::1] masks = masks_np
    cdef long idx, bit, mk
    cdef int a, b, j
    for a in range(n):
        for idx in range(per):
            mk = 0
            j = 0
            for b in range(n):
                if b == a:
                    continue
                if (idx >> j) & 1:
                    mk |= (<long> 1) << b
                j += 1
            masks[a, idx] = mk
    adj_np = np.zeros((n, n), dtype=np.uint8)
    cdef u1[:, ::1] adj = adj_np
    rr = np.empty((n, n), dtype=np.float64)
    cdef f8[:, ::1] r = rr
    kept_np = np.zeros((max(store, 1), n), dtype=np.int64)
    cdef i8[:, ::1] kept = kept_np
    cdef double* g = <double*> malloc(n * sizeof(double))
    cdef int* mem = <int*> malloc((n + 1) * sizeof(int))
    cdef int* outside = <int*> malloc((n + 1) * sizeof(int))
    cdef long* digits = <long*> malloc(n * sizeof(long))
    cdef int res[3]
    cdef long count = 0
    cdef int nkept = 0
    cdef long lim
    try:
        with nogil:
            digits[0] = start
            for a in range(1, n):
                digits[a] = 0
            for a in range(n):
                mk = masks[a, digits[a]]
                for b in range(n):
                    adj[a, b] = (mk >> b) & 1
            while True:
                if _ge_violation(dist, adj, order, alpha, z, tol, r, g, mem, outside, res) < 0:
                    count += 1
                    if nkept < store:
                        for a in range(n):
                            kept[nkept, a] = masks[a, digits[a]]
                        nkept += 1
                a = n - 1
                while a >= 0:
                    digits[a] += 1
                    lim = stop if a == 0 else per
                    if digits[a] < lim:
                        mk = masks[a, digits[a]]
                        for b in range(n):
                            adj[a, b] = (mk >> b) & 1
                        break
                    digits[a] = 0
                    mk = masks[a, 0]
                    for b in range(n):
                        adj[a, b] = (mk >> b) & 1
                    a -= 1
                if a < 0:
                    break
    finally:
        free(g)
        free(mem)
        free(outside)
        free(digits)
    return count, kept_np[:nkept].copy()


# ---------------------------------------------------------------- theta routing

def theta_route_all(const f8[:, ::1] dist, const i8[:, ::1] cone_of, const i8[:, ::1] cone_edge, int step_limit):
    cdef Py_ssize_t n = dist.shape[0]
    length_np = np.zeros((n, n), dtype=np.float64)
    greedy_np = np.ones((n, n), dtype=np.uint8)
    hops_np = np.zeros((n, n), dtype=np.int64)
    cdef f8[:, ::1] length = length_np
    cdef u1[:, ::1] greedy = greedy_np
    cdef i8[:, ::1] hops = hops_np
    cdef Py_ssize_t s, t, x, y
    cdef int steps
    cdef double acc
    with nogil:
        for s in range(n):
            for t in range(n):
                x = s
                acc = 0.0
                steps = 0
                while x != t:
                    if steps >= step_limit:
                        acc = INFINITY
                        break
                    y = cone_edge[x, cone_of[x, t]]
                    if y < 0:
                        acc = INFINITY
                        break
                    if not dist[y, t] < dist[x, t]:
                        greedy[s, t] = 0
                    acc += dist[x, y]
                    x = y
                    steps += 1
                length[s, t] = acc
                hops[s, t] = steps
    return length_np, greedy_np, hops_np
