"""Weighted oracles built on one-hop-augmented clusters around level A_c.

Three variants share the query skeleton and differ in the dense pivot table:

    A   stretch 2k-1-4c, table A_{k-c-2} x A_{c+1}
    B   stretch 2k-4c,   table A_{k-c-1} x A_c, plus an augmented-ball intersection
    C   stretch 2k-3,    table A_{k-1} x V (c = 1)
"""
from __future__ import annotations

from .graph import INF, Graph, degree_reduce
from .hierarchy import build_hierarchy, compute_bunches
from .tz import DenseTable, Oracle, ParameterError, intersection, reverse_legs

STRETCH = {
    "A": lambda k, c: 2 * k - 1 - 4 * c,
    "B": lambda k, c: 2 * k - 4 * c,
    "C": lambda k, c: 2 * k - 3,
}


def check_params(variant: str, k: int, c: int) -> None:
    if variant not in STRETCH:
        raise ParameterError(f"unknown borderline variant {variant!r}")
    if variant == "C":
        if k < 3:
            raise ParameterError("variant C needs k >= 3")
        if c != 1:
            raise ParameterError("variant C needs c = 1")
        return
    if int(c) != c or c <= 0:
        raise ParameterError("c must be a positive integer")
    # the c range already forces k >= 5 (A) and k >= 4 (B)
    if variant == "A" and not c < k / 2 - 1:
        raise ParameterError(f"constraint c < k/2-1 violated (k={k}, c={c})")
    # k=4, c=1 must be legal for B (the 4-stretch case), so its range is closed
    if variant == "B" and not c <= k / 2 - 1:
        raise ParameterError(f"constraint c <= k/2-1 violated (k={k}, c={c})")


def augment(g: Graph, members: dict, root: int):
    """One-hop closure of ``members`` (exact distances from ``root``).

    Returns ``(dist, via)``: members keep their distance and ``via[x] = x``;
    new neighbours get ``min d(root,y) + w(y,x)`` over adjacent members y.
    ``root`` is always included at distance 0.
    """
    dist = dict(members)
    via = {x: x for x in members}
    if root not in dist:
        dist[root] = 0
        via[root] = root
    adj = g.adj
    for y in sorted(members):
        dy = members[y]
        for x, w in adj[y]:
            if x in members:
                continue
            nd = dy + w
            old = dist.get(x)
            if old is None or nd < old:
                dist[x] = nd
                via[x] = y
    return dist, via


class BorderlineOracle(Oracle):

    def __init__(self, base, g, red, params):
        super().__init__(base, g, red, params)
        self.variant = "borderline-" + params["variant"].lower()
        self.cstar: list[dict] = []
        self.cvia: list[dict] = []
        self.bstar: list[dict] = []
        self.bvia: list[dict] = []

    @property
    def k(self):
        return self.params["k"]

    @property
    def c(self):
        return self.params["c"]

    def bridge_levels(self):
        k, c, var = self.k, self.c, self.params["variant"]
        if var == "A":
            return c + 1, k - c - 2
        if var == "B":
            return c, k - c - 1
        return 0, k - 1

    def _derive(self):
        """Augmented clusters (and balls for B) from the stored level-(c-1) clusters."""
        w = self.g
        L = self.c - 1
        clusters = self.bt.clusters[L].dist
        self.cstar, self.cvia = [], []
        for u in range(w.n):
            d, via = augment(w, clusters.get(u, {}), u)
            self.cstar.append(d)
            self.cvia.append(via)
        self.bstar, self.bvia = [], []
        if self.params["variant"] == "B":
            ball = self.bt.bunch[L]
            for u in range(w.n):
                d, via = augment(w, ball[u], u)
                self.bstar.append(d)
                self.bvia.append(via)

    def stretch(self) -> int:
        return STRETCH[self.params["variant"]](self.k, self.c)

    # legs from the root of an augmented set to one of its members
    def _aug_legs(self, via, level, u, x, forward=True, ball=False):
        if x == u:
            return []
        y = via[u][x]
        if ball:
            to_y = ("bun", level, u, y)
            from_y = ("bunr", level, u, y)
        else:
            to_y = ("bunr", level, y, u)
            from_y = ("bun", level, y, u)
        if forward:
            return [to_y] if y == x else [to_y, ("edge", y, x)]
        return [from_y] if y == x else [("edge", x, y), from_y]

    def _query(self, u, v):
        c = self.c
        h = self.h
        cu, cv = self.cstar[u], self.cstar[v]
        best, bx = intersection(cu, cv)
        self.probes += min(len(cu), len(cv))
        rec = ("int", bx)
        mtz = self.mtz_query
        for u2, du2 in cu.items():
            if du2 >= best:
                continue
            val, tr = mtz(u2, v, c)
            if du2 + val < best:
                best = du2 + val
                rec = ("swu", u2, tr)
        for v2, dv2 in cv.items():
            if dv2 >= best:
                continue
            val, tr = mtz(u, v2, c)
            if dv2 + val < best:
                best = dv2 + val
                rec = ("swv", v2, tr)
        a, b = self.bridge_levels()
        tab = self.tables["bridge"].dist
        for x, y in ((u, v), (v, u)):
            pa, pb = h.pivot[a][x], h.pivot[b][y]
            if pa < 0 or pb < 0:
                continue
            val = h.radius[a][x] + tab[pb][pa] + h.radius[b][y]
            if val < best:
                best = val
                rec = ("bridge", x, y)
        if self.params["variant"] == "B":
            val, z = intersection(self.bstar[u], self.bstar[v])
            if val < best:
                best = val
                rec = ("bint", z)
        if best == INF:
            return INF, []
        return best, self._legs(u, v, rec)

    def _legs(self, u, v, rec):
        L = self.c - 1
        kind = rec[0]
        if kind == "int":
            x = rec[1]
            return (self._aug_legs(self.cvia, L, u, x)
                    + self._aug_legs(self.cvia, L, v, x, forward=False))
        if kind == "bint":
            x = rec[1]
            return (self._aug_legs(self.bvia, L, u, x, ball=True)
                    + self._aug_legs(self.bvia, L, v, x, forward=False, ball=True))
        if kind == "swu":
            u2, tr = rec[1], rec[2]
            return self._aug_legs(self.cvia, L, u, u2) + self._oriented(tr, u2, v)
        if kind == "swv":
            v2, tr = rec[1], rec[2]
            return self._oriented(tr, u, v2) + self._aug_legs(self.cvia, L, v, v2, forward=False)
        if kind == "bridge":
            x, y = rec[1], rec[2]
            a, b = self.bridge_levels()
            pa, pb = self.h.pivot[a][x], self.h.pivot[b][y]
            legs = [("piv", a, x), ("rowr", "bridge", pb, pa), ("pivr", b, y)]
            if x != u:
                legs = reverse_legs(legs)
            return legs
        raise ValueError(kind)

    def _oriented(self, trace, src, dst):
        """TZ legs running from ``src`` to ``dst``."""
        legs = self.tz_legs(trace)
        if trace[0] == src:
            return legs
        return reverse_legs(legs)


def build_borderline(g: Graph, k: int, c: int = 1, variant: str = "A", seed=0) -> BorderlineOracle:
    variant = variant.upper()
    check_params(variant, k, c)
    red = degree_reduce(g)
    w = red.graph
    n = max(w.n, 2)
    plan = [("all",)] * (c - 1) + [("center", n ** (-c / k))] + [("geom", n ** (-1.0 / k))] * (k - c - 1)
    o = BorderlineOracle(g, w, red, {"k": k, "c": c, "variant": variant, "seed": seed})
    o.h = h = build_hierarchy(w, plan, seed)
    o.bt = compute_bunches(w, h, range(c - 1, k))
    a, b = o.bridge_levels()
    cols = None if a == 0 else h.levels[a]
    o.tables["bridge"] = DenseTable.build(w, "bridge", h.levels[b], cols)
    o._derive()
    return o
