"""Shared fixtures for the test suite: small graph families, exact checks, lemma instrumentation."""
from __future__ import annotations

import math
import random

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from distoracle.graph import INF, Graph, random_graph, walk_length


def path_graph(n, w=None):
    return Graph(n, [(i, i + 1) for i in range(n - 1)], weighted=False) if w is None else \
        Graph(n, [(i, i + 1, w) for i in range(n - 1)])


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], weighted=False)


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)], weighted=False)


def star_graph(leaves, weighted=True):
    return Graph(leaves + 1, [(0, i, 1) for i in range(1, leaves + 1)], weighted=weighted)


def random_tree(n, seed=0, wmax=1):
    rng = random.Random(seed)
    edges = [(i, rng.randrange(i), rng.randint(1, wmax)) for i in range(1, n)]
    return Graph(n, edges, weighted=wmax > 1)


def scipy_apsp(g: Graph, method="FW") -> np.ndarray:
    """Independent all-pairs distances through scipy (Floyd-Warshall by default)."""
    n = g.n
    if g.m == 0:
        out = np.full((n, n), np.inf)
        np.fill_diagonal(out, 0)
        return out
    rows, cols, vals = [], [], []
    for u, v, w in g.edges:
        rows += [u, v]
        cols += [v, u]
        # csgraph treats explicit zeros as missing, so nudge them
        vals += [w if w > 0 else 1e-300] * 2
    mat = csr_matrix((vals, (rows, cols)), shape=(n, n))
    out = shortest_path(mat, method=method, directed=False)
    return np.where(out < 1e-200, 0.0, out) if any(w == 0 for _, _, w in g.edges) else out


def graph_family(count, n_lo, n_hi, density=3, wmax=1, seed=0):
    """``count`` seeded random graphs with n in [n_lo, n_hi] and m = density * n."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(n_lo, n_hi)
        m = min(density * n, n * (n - 1) // 2)
        out.append(random_graph(n, m, wmax, seed=rng.randrange(2 ** 31)))
    return out


def check_pairs(o, D, bound, pairs=None, witness_every=0, query=None):
    """Count bound violations, undershoots and witness mismatches over pairs.

    ``bound(d)`` is the upper bound; ``D`` an exact distance matrix over the
    base graph. Witnesses are re-summed for every ``witness_every``-th pair.
    """
    n = o.base.n
    query = query or o.query
    if pairs is None:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    viol = below = wbad = 0
    worst = []
    for idx, (u, v) in enumerate(pairs):
        r = query(u, v)
        d = D[u, v]
        if d == np.inf:
            if r.value != INF:
                below += 1
            continue
        d = int(d)
        if r.value < d:
            below += 1
        if r.value > bound(d):
            viol += 1
            if len(worst) < 5:
                worst.append((u, v, d, r.value))
        if witness_every and idx % witness_every == 0 and r.value != INF:
            w = r.witness
            if w[0] != u or w[-1] != v or walk_length(o.base, w) != r.value:
                wbad += 1
    return viol, below, wbad, worst


def ceil_div(a, b):
    return -(-a // b)


def sample_pairs(n, count, rng):
    out = []
    while len(out) < count:
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            out.append((u, v))
    return out


# ---------------------------------------------------------------------------
# lemma instrumentation; every checker returns (instances checked, counterexamples)


def farthest_inside(path, members):
    """Index of the last vertex of ``path`` that lies in ``members`` (prefix scan from 0)."""
    best = 0
    for i, x in enumerate(path):
        if x in members:
            best = i
    return best


def lemma_borderline_weighted(o, E, pairs):
    """h_c(tau_u) <= d(u, tau_u), and h_{c+1}(v) <= d(u,v) when p_c(tau_u) is not in B_c(v).

    ``o`` is a borderline oracle, ``E`` an exact table over its working graph
    built with parents. tau_u is the farthest vertex of a shortest u-v path in
    C*(u); the claims are about a path that leaves C*(u), so pairs with the
    whole path inside are skipped.
    """
    c = o.c
    h = o.h
    checked = bad = 0
    cond = cbad = 0
    bunch_c = o.bt.bunch[c]
    for u, v in pairs:
        if E.dist[u, v] == np.inf:
            continue
        P = E.path(u, v)
        members = o.cstar[u]
        i = 0
        while i + 1 < len(P) and P[i + 1] in members:
            i += 1
        tau = P[i]
        if tau == v:
            continue
        checked += 1
        dt = int(E.dist[u, tau])
        if h.radius[c][tau] > dt:
            bad += 1
        p = h.pivot[c][tau]
        if p not in bunch_c[v]:
            cond += 1
            if h.radius[c + 1][v] > E.dist[u, v]:
                cbad += 1
    return (checked, bad), (cond, cbad)


def lemma_bunch_dichotomy(o, D, pairs):
    """Nonempty B(u) & B(v) gives exact distance; disjoint gives h(u)+h(v) <= d+1 (unweighted)."""
    b = o.bt.bunch[0]
    rad = o.h.radius[1]
    meet = mbad = disj = dbad = 0
    loose = 0   # pairs where the +1 slack is actually needed
    for u, v in pairs:
        d = D[u, v]
        if d == np.inf:
            continue
        common = set(b[u]) & set(b[v])
        if common:
            meet += 1
            if min(b[u][x] + b[v][x] for x in common) != d:
                mbad += 1
        else:
            disj += 1
            s = rad[u] + rad[v]
            if s > d + 1:
                dbad += 1
            elif s == d + 1:
                loose += 1
    return (meet, mbad), (disj, dbad), loose


def lemma_borderline_unweighted(o, D, E, pairs):
    """h_1(tau') <= d(u,tau')+2 and, if p_1(tau') is not in B_1(v), h_2(v) <= d(u,v)+2.

    tau' is the farthest vertex of a shortest path still inside C(u) (plus u).
    """
    h = o.h
    b1 = o.bt.bunch[1]
    checked = bad = cond = cbad = 0
    for u, v in pairs:
        d = D[u, v]
        if d == np.inf:
            continue
        P = E.path(u, v)
        members = o.cplus[u]
        i = 0
        while i + 1 < len(P) and P[i + 1] in members:
            i += 1
        tau = P[i]
        if tau == v:
            continue
        checked += 1
        if h.radius[1][tau] > D[u, tau] + 2:
            bad += 1
        if h.pivot[1][tau] not in b1[v]:
            cond += 1
            if h.radius[2][v] > d + 2:
                cbad += 1
    return (checked, bad), (cond, cbad)


def lemma_middle_vertex(o, D, E, pairs):
    """Middle-vertex trichotomy on the vertex tau at distance ceil(d/2) from u.

    (a) h_1(tau) > ceil(d/2) implies tau in C(u) & C(v);
    (b) d(u,p_1(tau)) + d(p_1(tau),v) <= d + 2 h_1(tau);
    (c) p_1(tau) outside B_1(u) & B_1(v) implies min(h_2(u),h_2(v)) <= ceil(d/2) + h_1(tau).
    """
    h = o.h
    b1 = o.bt.bunch[1]
    cnt = {"a": [0, 0], "b": [0, 0], "c": [0, 0]}
    for u, v in pairs:
        d = D[u, v]
        if d == np.inf or d == 0:
            continue
        d = int(d)
        P = E.path(u, v)
        half = ceil_div(d, 2)
        tau = P[half]
        h1 = h.radius[1][tau]
        p = h.pivot[1][tau]
        if h1 > half:
            cnt["a"][0] += 1
            if tau not in o.cplus[u] or tau not in o.cplus[v]:
                cnt["a"][1] += 1
        if p >= 0:
            cnt["b"][0] += 1
            if D[u, p] + D[p, v] > d + 2 * h1:
                cnt["b"][1] += 1
            if not (p in b1[u] and p in b1[v]):
                cnt["c"][0] += 1
                if min(h.radius[2][u], h.radius[2][v]) > half + h1:
                    cnt["c"][1] += 1
    return {k: tuple(x) for k, x in cnt.items()}


def greedy_chain(o, P, t):
    """Indices along P of u_0..u_t.

    Each step runs to the last P-vertex of the ball B(u_i); weighted oracles
    then take one more hop (the one-hop closure reaches it exactly).
    """
    idx = [0]
    ball = o.bt.bunch[0]
    for _ in range(t):
        i = idx[-1]
        b = ball[P[i]]
        j = i
        while j + 1 < len(P) and P[j + 1] in b:
            j += 1
        if o.weighted and b and j + 1 < len(P):
            j += 1
        idx.append(j)
    return idx


def lemma_prefix_exact(o, E, pairs, t):
    """Every vertex of the greedy prefix P_t(u) is in S_t(u) with d_t equal to the true distance."""
    checked = bad = 0
    for u, v in pairs:
        if E.dist[u, v] == np.inf:
            continue
        P = E.path(u, v)
        idx = greedy_chain(o, P, t)
        tw = o.compute_s(u, t)
        S = tw.levels[t]
        for j in range(idx[-1] + 1):
            checked += 1
            x = P[j]
            if S.get(x) != E.dist[u, x]:
                bad += 1
    return checked, bad


def lemma_disjoint_budget(o, E, pairs, t, weighted):
    """Sum of h over both greedy chains: <= d + 2t - 1 unweighted, <= d weighted.

    Applies to pairs whose chains stay apart (u_t strictly before v_t on P).
    """
    rad = o.h.radius[1]
    checked = bad = 0
    for u, v in pairs:
        d = E.dist[u, v]
        if d == np.inf:
            continue
        P = E.path(u, v)
        iu = greedy_chain(o, P, t)
        iv = greedy_chain(o, P[::-1], t)
        last = len(P) - 1
        if not iu[t] < last - iv[t]:
            continue
        checked += 1
        total = sum(rad[P[i]] for i in iu[:t]) + sum(rad[P[last - i]] for i in iv[:t])
        limit = d if weighted else d + 2 * t - 1
        if total > limit:
            bad += 1
    return checked, bad


def lemma_weighted_disjoint(o, D, pairs):
    """Disjoint B*(u), B*(v) implies h(u)+h(v) <= d(u,v); plus the B* size bound."""
    rad = o.h.radius[1]
    checked = bad = 0
    for u, v in pairs:
        d = D[u, v]
        if d == np.inf:
            continue
        if set(o.bstar[u]).isdisjoint(o.bstar[v]):
            checked += 1
            if rad[u] + rad[v] > d:
                bad += 1
    deg = o.g.max_degree()
    sbad = 0
    for x in range(o.g.n):
        if len(o.bstar[x]) > (1 + deg) * max(1, len(o.bt.bunch[0][x])):
            sbad += 1
    return (checked, bad), sbad


def lemma_level_descent(o, D, pairs):
    """Per level i, with x the endpoint of smaller h_{i-1} and y the other one:
    either p_{i-1}(x) is in B_{i-1}(y) and that candidate is <= 2 h_{i-1}(x) + d,
    or h_i(y) <= h_{i-1}(x) + d.
    """
    h = o.h
    checked = bad = 0
    for u, v in pairs:
        d = D[u, v]
        if d == np.inf:
            continue
        for i in range(1, h.k):
            x, y = (u, v) if (h.radius[i - 1][u], u) <= (h.radius[i - 1][v], v) else (v, u)
            lo = h.radius[i - 1][x]
            p = h.pivot[i - 1][x]
            checked += 1
            got = o.bt.bunch[i - 1][y].get(p)
            if got is not None:
                ok = lo + got <= 2 * lo + d
            else:
                ok = h.radius[i][y] <= lo + d
            bad += not ok
    return checked, bad


def soft_log(msg):
    print(msg)


def isclose(a, b):
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)
