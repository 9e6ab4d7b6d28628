"""Unweighted oracles analysed through the middle vertex of a shortest path.

    Q3      3d + 2_odd
    Q4      4d + 3_odd
    Q4wide  3d + 2 + 2_odd
    Q2k5    (2k-5)d + 4 + 2_odd   (k >= 5)

Parity never enters the query; the odd terms only appear in the bounds.
"""
from __future__ import annotations

from typing import Optional

from .graph import INF, Graph
from .hierarchy import build_hierarchy, compute_bunches
from .tz import DenseTable, Oracle, ParameterError, intersection, reverse_legs

VARIANTS = ("Q3", "Q4", "Q4wide", "Q2k5")


def bound(variant: str, d, k: Optional[int] = None):
    if d == INF:
        return INF
    odd = d % 2
    if variant == "Q3":
        return 3 * d + 2 * odd
    if variant == "Q4":
        return 4 * d + 3 * odd
    if variant == "Q4wide":
        return 3 * d + 2 + 2 * odd
    if variant == "Q2k5":
        return (2 * k - 5) * d + 4 + 2 * odd
    raise ValueError(variant)


class MidpointOracle(Oracle):

    def __init__(self, base, g, params):
        super().__init__(base, g, None, params)
        self.variant = params["variant"]
        self.cplus: list[dict] = []   # C(u) with u itself added

    def _derive(self):
        clusters = self.bt.clusters[0].dist
        self.cplus = []
        for u in range(self.g.n):
            row = dict(clusters.get(u, {}))
            row.setdefault(u, 0)
            self.cplus.append(row)

    def bound(self, d):
        return bound(self.variant, d, self.params.get("k"))

    def _query(self, u, v):
        return getattr(self, "_q_" + self.variant.lower())(u, v)

    # -- pieces ---------------------------------------------------------------

    def _cl_legs(self, u, x, forward=True):
        """Walk between ``u`` and ``x`` in C(u)."""
        if x == u:
            return []
        return [("bunr", 0, x, u)] if forward else [("bun", 0, x, u)]

    def _bun_legs(self, i, u, x, forward=True):
        if x == u:
            return []
        return [("bun", i, u, x)] if forward else [("bunr", i, u, x)]

    def _common(self, u, v, rec_best):
        best, rec = rec_best
        val, x = intersection(self.cplus[u], self.cplus[v])
        if val < best:
            best, rec = val, ("cint", x)
        return best, rec

    def _cint_legs(self, u, v, x):
        return self._cl_legs(u, x) + self._cl_legs(v, x, forward=False)

    def _bint(self, i, u, v, best, rec):
        b = self.bt.bunch[i]
        val, x = intersection(b[u], b[v])
        if val < best:
            best, rec = val, ("bint", i, x)
        return best, rec

    def _generic_legs(self, u, v, rec):
        kind = rec[0]
        if kind == "cint":
            return self._cint_legs(u, v, rec[1])
        if kind == "bint":
            i, x = rec[1], rec[2]
            return self._bun_legs(i, u, x) + self._bun_legs(i, v, x, forward=False)
        return None

    # -- Q3 -------------------------------------------------------------------

    def _q_q3(self, u, v):
        h = self.h
        best, rec = self._common(u, v, (INF, None))
        best, rec = self._bint(1, u, v, best, rec)
        b2 = self.bt.bunch[2]
        for x, y in ((u, v), (v, u)):
            p = h.pivot[2][x]
            d = b2[y].get(p)
            if d is not None and h.radius[2][x] + d < best:
                best, rec = h.radius[2][x] + d, ("p2", x, y)
        if best == INF:
            return INF, []
        legs = self._generic_legs(u, v, rec)
        if legs is None:
            x, y = rec[1], rec[2]
            legs = [("piv", 2, x), ("bunr", 2, y, h.pivot[2][x])]
            if x != u:
                legs = reverse_legs(legs)
        return best, legs

    # -- Q4 -------------------------------------------------------------------

    def _q_q4(self, u, v):
        h = self.h
        T = self.tables["a2a1"].dist
        best, rec = self._common(u, v, (INF, None))
        best, rec = self._bint(0, u, v, best, rec)
        best, rec = self._bint(1, u, v, best, rec)
        b1 = self.bt.bunch[1]
        for x, y in ((u, v), (v, u)):
            # x -> p_2(x) -> w1 -> y for w1 in B_1(y), plus w1 = p_1(y)
            p2 = h.pivot[2][x]
            if p2 < 0:
                continue
            row = T[p2]
            h2 = h.radius[2][x]
            for w1, dw in b1[y].items():
                val = h2 + row[w1] + dw
                if val < best:
                    best, rec = val, ("sweep", x, y, w1)
            p1 = h.pivot[1][y]
            if p1 >= 0:
                val = h2 + row[p1] + h.radius[1][y]
                if val < best:
                    best, rec = val, ("p1", x, y)
        if best == INF:
            return INF, []
        legs = self._generic_legs(u, v, rec)
        if legs is None:
            x, y = rec[1], rec[2]
            p2 = h.pivot[2][x]
            if rec[0] == "sweep":
                w1 = rec[3]
                legs = [("piv", 2, x), ("row", "a2a1", p2, w1)] + self._bun_legs(1, y, w1, forward=False)
            else:
                legs = [("piv", 2, x), ("row", "a2a1", p2, h.pivot[1][y]), ("pivr", 1, y)]
            if x != u:
                legs = reverse_legs(legs)
        return best, legs

    # -- Q4wide ---------------------------------------------------------------

    def _b0plus(self, u):
        b0 = self.bt.bunch[0][u]
        if u in b0:
            return b0
        out = dict(b0)
        out[u] = 0
        return out

    def _union(self, u, kind):
        """Union over w in B_0(u)+u of C(w) (or B_1(w)) with composed distances."""
        dist: dict = {}
        via: dict = {}
        src = self.cplus if kind == "C" else self.bt.bunch[1]
        for w, dw in self._b0plus(u).items():
            for x, dx in src[w].items():
                val = dw + dx
                old = dist.get(x)
                if old is None or val < old or (val == old and w < via[x]):
                    dist[x] = val
                    via[x] = w
        return dist, via

    def _q_q4wide(self, u, v):
        h = self.h
        T = self.tables["a2a1"].dist
        best, rec = INF, None
        uc, ucv = self._union(u, "C")
        vc, vcv = self._union(v, "C")
        val, x = intersection(uc, vc)
        if val < best:
            best, rec = val, ("uint", "C", x, ucv[x], vcv[x])
        ub, ubv = self._union(u, "B")
        vb, vbv = self._union(v, "B")
        val, x = intersection(ub, vb)
        if val < best:
            best, rec = val, ("uint", "B", x, ubv[x], vbv[x])
        best, rec = self._bint(0, u, v, best, rec)
        for x, y in ((u, v), (v, u)):
            p1 = h.pivot[1][y]
            if p1 < 0:
                continue
            h1 = h.radius[1][y]
            for w, dw in self._b0plus(x).items():
                p2 = h.pivot[2][w]
                if p2 < 0:
                    continue
                val = dw + h.radius[2][w] + T[p2][p1] + h1
                if val < best:
                    best, rec = val, ("sweep", x, y, w)
        if best == INF:
            return INF, []
        legs = self._generic_legs(u, v, rec)
        if legs is None and rec[0] == "uint":
            _, kind, z, wu, wv = rec
            legs = (self._bun_legs(0, u, wu) + self._member_legs(kind, wu, z)
                    + reverse_legs(self._member_legs(kind, wv, z)) + self._bun_legs(0, v, wv, forward=False))
        elif legs is None:
            _, x, y, w = rec
            p2 = h.pivot[2][w]
            legs = (self._bun_legs(0, x, w) + [("piv", 2, w), ("row", "a2a1", p2, h.pivot[1][y]),
                                               ("pivr", 1, y)])
            if x != u:
                legs = reverse_legs(legs)
        return best, legs

    def _member_legs(self, kind, w, z):
        if kind == "C":
            return self._cl_legs(w, z)
        return self._bun_legs(1, w, z)

    # -- Q2k5 -----------------------------------------------------------------

    def _q_q2k5(self, u, v):
        h = self.h
        k = self.params["k"]
        best, rec = self._common(u, v, (INF, None))
        best, rec = self._bint(1, u, v, best, rec)
        mtz = self.mtz_query
        for x, y in ((u, v), (v, u)):
            for x2, dx in self.cplus[x].items():
                if dx >= best:
                    continue
                val, tr = mtz(x2, y, 1)
                if dx + val < best:
                    best, rec = dx + val, ("sweep", x, y, x2, tr)
        T = self.tables["bridge"].dist
        lo, hi = 2, k - 3
        for x, y in ((u, v), (v, u)):
            pa, pb = h.pivot[lo][x], h.pivot[hi][y]
            if pa < 0 or pb < 0:
                continue
            val = h.radius[lo][x] + T[pb][pa] + h.radius[hi][y]
            if val < best:
                best, rec = val, ("bridge", x, y)
        if best == INF:
            return INF, []
        legs = self._generic_legs(u, v, rec)
        if legs is None:
            x, y = rec[1], rec[2]
            if rec[0] == "sweep":
                x2, tr = rec[3], rec[4]
                tl = self.tz_legs(tr)
                if tr[0] != x2:
                    tl = reverse_legs(tl)
                legs = self._cl_legs(x, x2) + tl
            else:
                pa, pb = h.pivot[lo][x], h.pivot[hi][y]
                legs = [("piv", lo, x), ("rowr", "bridge", pb, pa), ("pivr", hi, y)]
            if x != u:
                legs = reverse_legs(legs)
        return best, legs


def build_midpoint(g: Graph, variant: str, k: Optional[int] = None, seed=0) -> MidpointOracle:
    if g.weighted:
        raise ParameterError("midpoint oracles need an unweighted graph")
    names = {v.lower(): v for v in VARIANTS}
    if variant.lower() not in names:
        raise ParameterError(f"unknown midpoint variant {variant!r}")
    variant = names[variant.lower()]
    n = max(g.n, 2)
    if variant == "Q2k5":
        if k is None or k < 5:
            raise ParameterError("Q2k5 needs k >= 5")
        q = n ** (-1.0 / k)
        plan = [("center", q)] + [("geom", q)] * (k - 2)
        levels = range(k)
    else:
        e = 3 if variant == "Q3" else 4
        q = n ** (-1.0 / e)
        plan = [("center", q), ("geom", q)]
        levels = range(3)
        k = None
    params = {"variant": variant, "seed": seed}
    if k is not None:
        params["k"] = k
    o = MidpointOracle(g, g, params)
    o.h = h = build_hierarchy(g, plan, seed)
    o.bt = compute_bunches(g, h, levels)
    if variant in ("Q4", "Q4wide"):
        o.tables["a2a1"] = DenseTable.build(g, "a2a1", h.levels[2], h.levels[1])
    elif variant == "Q2k5":
        o.tables["bridge"] = DenseTable.build(g, "bridge", h.levels[k - 3], h.levels[2])
    o._derive()
    return o
