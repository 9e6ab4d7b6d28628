"""Stretch-below-2 oracles from towers of bunches ``S_t(u)``.

    U-AV   unweighted, landmark-to-all table      d + 2*ceil(d / 2t)
    U-AA   unweighted, landmark-to-landmark table d + 2*ceil(d / t) + 2
    W-AA   weighted (degree reduced), A x A       (1 + 2/t) d
    W-AV   weighted (degree reduced), A x V       (1 + 1/t) d

``S_0(u) = {u}`` and ``S_i(u)`` is the union of ``B~(w)`` over ``w`` in
``S_{i-1}(u)``, where ``B~(w)`` is the ball ``B(w) = {x : d(w,x) < h(w)}``
plus ``w`` itself (weighted: plus the one-hop neighbours of the ball).
"""
from __future__ import annotations

import heapq
import math
from typing import Optional

import numpy as np

from .borderline import augment
from .graph import INF, Graph, GraphError, avoiding_path, degree_reduce, sssp
from .hierarchy import build_hierarchy, compute_bunches
from .tz import DenseTable, Oracle, ParameterError, intersection, reverse_legs

C_RANGE = {"U-AV": 0.5, "U-AA": 1 / 3, "W-AA": 1 / 3, "W-AV": 0.5}


def ceil_div(a, b):
    return -(-a // b)


def bound(variant: str, d, t: int):
    if d == INF:
        return INF
    if variant == "U-AV":
        return d + 2 * ceil_div(d, 2 * t)
    if variant == "U-AA":
        return d + 2 * ceil_div(d, t) + 2
    if variant == "W-AA":
        return d + 2 * d / t
    if variant == "W-AV":
        return d + d / t
    raise ValueError(variant)


class Tower:
    """``S_0(u) .. S_t(u)`` with relaxed distances and predecessor links."""

    __slots__ = ("root", "levels", "pred", "oracle", "local", "_groups")

    def __init__(self, root, oracle):
        self.root = root
        self.levels = [{root: 0}]
        self.pred = [{root: root}]
        self.oracle = oracle
        self.local = {}   # w -> parent map of an edge-avoiding step from w
        self._groups = {}

    def step(self, w: int, x: int) -> list[int]:
        par = self.local.get(w)
        if par is None:
            return self.oracle.step_walk(w, x)
        out = [x]
        while out[-1] != w:
            out.append(par[out[-1]])
        return out[::-1]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def path(self, i: int, x: int) -> list[int]:
        """Walk from the root to ``x`` realising ``d_i(root, x)``."""
        steps = []
        while i > 0:
            w = self.pred[i][x]
            if w != x:
                steps.append(self.step(w, x))
                x = w
            i -= 1
        out = [self.root]
        for s in reversed(steps):
            out.extend(s[1:])
        return out

    def pivot_groups(self, i: int):
        """Per landmark a: min over members x of S_i with p(x)=a of d_i(x)+h(x)."""
        g = self._groups.get(i)
        if g is None:
            h = self.oracle.h
            piv, rad = h.pivot[1], h.radius[1]
            best: dict = {}
            for x, d in self.levels[i].items():
                a = piv[x]
                if a < 0:
                    continue
                val = d + rad[x]
                old = best.get(a)
                if old is None or val < old[0] or (val == old[0] and x < old[1]):
                    best[a] = (val, x)
            keys = sorted(best)
            idx = np.array([self.oracle.landmark_index[a] for a in keys], dtype=np.intp)
            vals = np.array([best[a][0] for a in keys], dtype=float)
            g = (keys, idx, vals, [best[a][1] for a in keys])
            self._groups[i] = g
        return g


class NearOracle(Oracle):

    def __init__(self, base, g, red, params):
        super().__init__(base, g, red, params)
        self.variant = params["variant"]
        self.bstar: list[dict] = []
        self.bvia: list[dict] = []
        self.landmarks: list[int] = []
        self.landmark_index: dict = {}
        self._aa = None
        self.cache_towers = False
        self._towers: dict = {}
        self._repl: dict = {}     # landmark -> replacement distances (edge-avoiding queries)
        self._full: dict = {}     # landmark -> full distance row (edge-avoiding queries)
        self._forbid = None

    @property
    def weighted(self):
        return self.variant.startswith("W-")

    def _derive(self):
        """Closed balls, landmark indexing and the A x A matrix from stored tables."""
        w = self.g
        ball = self.bt.bunch[0]
        self.bstar, self.bvia = [], []
        for x in range(w.n):
            if self.weighted:
                d, via = augment(w, ball[x], x)
            else:
                d = dict(ball[x])
                d.setdefault(x, 0)
                via = {y: y for y in d}
            self.bstar.append(d)
            self.bvia.append(via)
        self.landmarks = sorted(self.h.levels[1])
        self.landmark_index = {a: i for i, a in enumerate(self.landmarks)}
        self._aa = self.tables["land"].matrix() if self.variant.endswith("AA") else None

    def bound(self, d, t):
        return bound(self.variant, d, t)

    # -- towers ---------------------------------------------------------------

    def step_walk(self, w: int, x: int) -> list[int]:
        """Walk from ``w`` to ``x`` in B~(w) of length ``bstar[w][x]``."""
        if x == w:
            return [w]
        y = self.bvia[w][x]
        walk = self.bt.path(0, w, y) if y != w else [w]
        if y != x:
            walk.append(x)
        return walk

    def _local_steps(self, w: int, e: tuple):
        """Distances from ``w`` inside B~(w) once edge ``e`` is removed.

        Returns None when ``e`` cannot lie on any stored step from ``w``.
        Interior vertices of a step are ball members; augmented vertices are leaves.
        """
        a, b = e
        bs = self.bstar[w]
        if a not in bs or b not in bs:
            return None
        inner = self.bt.bunch[0][w]
        adj = self.g.adj
        dist = {w: 0}
        par = {w: w}
        heap = [(0, w)]
        while heap:
            d, y = heapq.heappop(heap)
            if d > dist[y] or (y != w and y not in inner):
                continue
            for x, wt in adj[y]:
                if x not in bs or (y == a and x == b) or (y == b and x == a):
                    continue
                nd = d + wt
                if nd < dist.get(x, INF):
                    dist[x] = nd
                    par[x] = y
                    heapq.heappush(heap, (nd, x))
        return dist, par

    def compute_s(self, u: int, t: int, forbid: Optional[tuple] = None) -> Tower:
        """Tower rooted at ``u`` to depth ``t`` (working-graph ids).

        With ``forbid`` set, relaxation steps whose walk crosses that edge are skipped.
        """
        key = (u, t)
        if forbid is None and self.cache_towers:
            tw = self._towers.get(key)
            if tw is not None:
                return tw
        tw = Tower(u, self)
        bstar = self.bstar
        fresh = {u: 0}
        for _ in range(t):
            prev = tw.levels[-1]
            cur = dict(prev)
            pred = {x: x for x in prev}
            changed = {}
            for w in sorted(fresh):
                dw = prev[w]
                ball = bstar[w]
                if forbid is not None:
                    loc = self._local_steps(w, forbid)
                    if loc is not None:
                        ball = loc[0]
                        tw.local[w] = loc[1]
                for x, dx in ball.items():
                    nd = dw + dx
                    old = cur.get(x)
                    if old is None or nd < old:
                        cur[x] = nd
                        pred[x] = w
                        changed[x] = nd
            tw.levels.append(cur)
            tw.pred.append(pred)
            fresh = changed
        if forbid is None and self.cache_towers:
            self._towers[key] = tw
        return tw

    # -- queries --------------------------------------------------------------

    def query(self, u: int, v: int, t: Optional[int] = None):
        if t is None:
            t = self.params["t"]
        if t > self.params["max_t"] or t < 0:
            raise ParameterError(f"t must lie in [0, {self.params['max_t']}]")
        self._t = t
        return super().query(u, v)

    def _query(self, u, v, forbid=None):
        t = self._t
        tu = self.compute_s(u, t, forbid)
        tv = self.compute_s(v, t, forbid)
        best, x = intersection(tu.levels[t], tv.levels[t])
        self.probes += min(len(tu.levels[t]), len(tv.levels[t]))
        rec = ("int", x) if best < INF else None
        if self.variant.endswith("AV"):
            best, rec = self._bounce(u, v, tu, tv, best, rec, forbid)
        else:
            best, rec = self._bridge(tu, tv, t, best, rec, forbid)
        if best == INF:
            return INF, []
        return best, self._legs(tu, tv, t, rec)

    def _bounce(self, u, v, tu, tv, best, rec, forbid):
        piv = self.h.pivot[1]
        T = self.tables["land"].dist
        cands = set()
        for tw in (tu, tv):
            for w in tw.levels[-1]:
                a = piv[w]
                if a >= 0:
                    cands.add(a)
        if forbid is None:
            for a in sorted(cands):
                row = T[a]
                val = row[u] + row[v]
                if val < best:
                    best, rec = val, ("bounce", a)
            return best, rec
        # stored rows are lower bounds for the edge-avoiding ones
        scored = sorted((T[a][u] + T[a][v], a) for a in cands)
        for val, a in scored:
            if val >= best:
                break
            du = self._row_avoiding(a, u, forbid)
            dv = self._row_avoiding(a, v, forbid)
            if du + dv < best:
                best, rec = du + dv, ("bounce", a, True)
        return best, rec

    # -- edge-avoiding pieces -------------------------------------------------

    def _replacement(self, a):
        """Per vertex x, the shortest a-x distance once the tree edge into x is cut.

        Only the subtree of x loses its tree path, so the answer is the best
        non-tree edge (y, z) entering that subtree: d(a,y) + w(y,z) + d(a,z) - d(a,x).
        Returns ``(value, entry)`` lists with ``entry[x] = (y, z)``.
        """
        got = self._repl.get(a)
        if got is not None:
            return got
        tab = self.tables["land"]
        D, par = tab.dist[a], tab.parent[a]
        n = self.g.n
        order = [x for x in range(n) if D[x] < INF]
        depth = [-1] * n
        depth[a] = 0
        for x in order:
            chain = []
            while depth[x] < 0:
                chain.append(x)
                x = par[x]
            for y in reversed(chain):
                depth[y] = depth[par[y]] + 1
        val = [INF] * n
        arg = [None] * n
        for y in order:
            for z, w in self.g.adj[y]:
                if par[z] == y or par[y] == z:
                    continue
                key = D[y] + w + D[z]
                # z climbs to below lca(y, z); each vertex passed has y outside its subtree
                p, q = y, z
                while depth[p] > depth[q]:
                    p = par[p]
                while depth[q] > depth[p]:
                    if key - D[q] < val[q]:
                        val[q], arg[q] = key - D[q], (y, z)
                    q = par[q]
                while p != q:
                    if key - D[q] < val[q]:
                        val[q], arg[q] = key - D[q], (y, z)
                    p, q = par[p], par[q]
        self._repl[a] = (val, arg)
        return val, arg

    def _row_avoiding(self, a, x, e):
        """Exact d(a, x) in G minus e, for e incident to x."""
        tab = self.tables["land"]
        other = e[1] if e[0] == x else e[0]
        if tab.parent[a][x] != other:
            return tab.dist[a][x]
        return self._replacement(a)[0][x]

    def _row_avoiding_walk(self, a, x, e) -> list[int]:
        tab = self.tables["land"]
        other = e[1] if e[0] == x else e[0]
        if tab.parent[a][x] != other:
            return tab.path(a, x)
        y, z = self._replacement(a)[1][x]
        down = tab.path(a, z)
        return tab.path(a, y) + down[down.index(x):][::-1]

    def _full_row(self, a):
        row = self._full.get(a)
        if row is None:
            row = self._full[a] = sssp(self.g, a).dist
        return row

    def _row_walk(self, a, b, e):
        """A shortest a-b walk avoiding e, or None when all of them use it."""
        return avoiding_path(self.g, self._full_row(a), self.tables["land"].parent[a], b, e)

    def _bridge(self, tu, tv, t, best, rec, forbid):
        D = self._aa
        for i in range(t):
            j = t - 1 - i
            if forbid is None:
                ka, ia, va, xa = tu.pivot_groups(i)
                kb, ib, vb, xb = tv.pivot_groups(j)
            else:
                ka, ia, va, xa = self._valid_groups(tu, i, forbid)
                kb, ib, vb, xb = self._valid_groups(tv, j, forbid)
            if not ka or not kb:
                continue
            M = va[:, None] + D[np.ix_(ia, ib)] + vb[None, :]
            if forbid is None:
                flat = int(np.argmin(M))
                r, s = divmod(flat, len(kb))
                val = M[r, s]
                if val < best:
                    best, rec = val, ("bridge", i, xa[r], xb[s])
                continue
            order = np.argsort(M, axis=None, kind="stable")
            for flat in order:
                r, s = divmod(int(flat), len(kb))
                val = M[r, s]
                if val >= best:
                    break
                row = self._row_walk(ka[r], kb[s], forbid)
                if row is not None:
                    (x, px), (y, py) = xa[r], xb[s]
                    best, rec = val, ("bridge", i, x, y, (px, row, py))
                    break
        return best, rec

    def _valid_groups(self, tw, i, e):
        """Pivot groups whose pivot walk avoids ``e`` (possibly by a tied landmark)."""
        h = self.h
        rad, par = h.radius[1], h.pivot_parent[1]
        best: dict = {}
        for x, d in tw.levels[i].items():
            if rad[x] == INF:
                continue
            walk = avoiding_path(self.g, rad, par, x, e)
            if walk is None:
                continue
            a = walk[0]
            val = d + rad[x]
            old = best.get(a)
            if old is None or val < old[0] or (val == old[0] and x < old[1][0]):
                best[a] = (val, (x, walk))
        keys = sorted(best)
        idx = np.array([self.landmark_index[a] for a in keys], dtype=np.intp)
        vals = np.array([best[a][0] for a in keys], dtype=float)
        return keys, idx, vals, [best[a][1] for a in keys]

    def _legs(self, tu, tv, t, rec):
        kind = rec[0]
        if kind == "int":
            x = rec[1]
            return [("tow", tu, t, x), ("towr", tv, t, x)]
        if kind == "bounce":
            a = rec[1]
            if len(rec) > 2:
                e = self._forbid
                to_a = self._row_avoiding_walk(a, tu.root, e)[::-1]
                return [("walk", tuple(to_a)), ("walk", tuple(self._row_avoiding_walk(a, tv.root, e)))]
            return [("rowr", "land", a, tu.root), ("row", "land", a, tv.root)]
        if kind == "bridge":
            i, x, y = rec[1], rec[2], rec[3]
            if len(rec) > 4:
                px, row, py = rec[4]
                return [("tow", tu, i, x), ("walk", tuple(reversed(px))), ("walk", tuple(row)),
                        ("walk", tuple(py)), ("towr", tv, t - 1 - i, y)]
            a, b = self.h.pivot[1][x], self.h.pivot[1][y]
            return [("tow", tu, i, x), ("piv", 1, x), ("row", "land", a, b),
                    ("pivr", 1, y), ("towr", tv, t - 1 - i, y)]
        raise ValueError(kind)

    def query_avoiding(self, u: int, v: int, t: Optional[int] = None):
        """Estimate of the shortest ``u``-``v`` walk that does not use edge (u, v)."""
        from .tz import EstimateReport

        if not self.base.has_edge(u, v):
            raise GraphError(f"({u}, {v}) is not an edge")
        self._t = self.params["t"] if t is None else t
        # run from the endpoints of the edge image so the cut edge touches both roots
        e = self.work_edge(u, v)
        a, b = e
        self._forbid = e
        val, legs = self._query(a, b, forbid=e)
        return EstimateReport(u, v, val, legs, self)

    def work_edge(self, u, v):
        """The working-graph edge that stands for base edge (u, v)."""
        if self.red is None:
            return (u, v)
        return self.red.edge_image(u, v)


def build_near(g: Graph, variant: str, c: float = 0.25, t: int = 2, max_t: Optional[int] = None,
               seed=0) -> NearOracle:
    variant = variant.upper()
    if variant not in C_RANGE:
        raise ParameterError(f"unknown ball variant {variant!r}")
    if not 0 < c < C_RANGE[variant]:
        raise ParameterError(f"c must lie in (0, {C_RANGE[variant]:.4g}) for {variant}")
    if max_t is None:
        max_t = t
    if t < 0 or t > max_t:
        raise ParameterError("need 0 <= t <= max_t")
    if variant.startswith("W-"):
        red = degree_reduce(g)
        w = red.graph
    else:
        if g.weighted:
            raise ParameterError(f"{variant} needs an unweighted graph")
        red, w = None, g
    n = max(w.n, 2)
    o = NearOracle(g, w, red, {"variant": variant, "c": c, "t": t, "max_t": max_t, "seed": seed})
    o.h = h = build_hierarchy(w, [("geom", n ** (-c))], seed)
    o.bt = compute_bunches(w, h, [0])
    cols = None if variant.endswith("AV") else h.levels[1]
    o.tables["land"] = DenseTable.build(w, "land", h.levels[1], cols)
    o._derive()
    return o


def default_c(variant: str, t: int) -> float:
    """``1/(t+1)`` pulled inside the legal open interval."""
    hi = C_RANGE[variant.upper()]
    return min(1.0 / (t + 1), hi * 0.9)


def log_ratio(n, m):
    return math.log(max(m, 2)) / math.log(max(n, 2))
