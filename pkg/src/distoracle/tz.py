"""Intersection, the Thorup-Zwick query and the shared oracle plumbing.

Query code tracks the best candidate as a short recipe of legs; the full
witness walk is only expanded when asked for. A leg is a tuple:

    ("piv", i, u)        u -> p_i(u) along the level-i pivot forest
    ("pivr", i, u)       p_i(u) -> u
    ("bun", i, u, x)     u -> x for x in B_i(u)
    ("bunr", i, u, x)    x -> u
    ("row", t, a, b)     a -> b in dense table t (a is a row vertex)
    ("rowr", t, a, b)    b -> a
    ("edge", x, y)       a single edge
    ("tow", tower, i, x)   tower root -> x in S_i along the relaxation chain
    ("towr", tower, i, x)  x -> tower root
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .graph import INF, Graph, GraphError, ReducedGraph, sssp, walk_length
from .hierarchy import BunchTable, Hierarchy, compute_bunches, sample_hierarchy


class ParameterError(ValueError):
    pass


def intersection(du: dict, dw: dict):
    """``min over x in U & W of du[x] + dw[x]`` as ``(value, x)``; ``(inf, -1)`` if disjoint.

    Iterates the smaller map and probes the larger; ties go to the smaller x.
    """
    if len(du) > len(dw):
        du, dw = dw, du
    best = INF
    bx = -1
    get = dw.get
    for x, a in du.items():
        b = get(x)
        if b is not None:
            s = a + b
            if s < best or (s == best and x < bx):
                best = s
                bx = x
    return best, bx


_REV = {"piv": "pivr", "pivr": "piv", "bun": "bunr", "bunr": "bun",
        "row": "rowr", "rowr": "row", "tow": "towr", "towr": "tow"}


def reverse_legs(legs):
    out = []
    for leg in reversed(legs):
        if leg[0] == "edge":
            out.append(("edge", leg[2], leg[1]))
        elif leg[0] == "walk":
            out.append(("walk", tuple(reversed(leg[1]))))
        else:
            out.append((_REV[leg[0]],) + leg[1:])
    return out


class DenseTable:
    """Exact distances from each row vertex to a column set (all of V when ``cols`` is None).

    Full parent rows are kept for every row vertex so witnesses can be expanded.
    """

    def __init__(self, name: str, n: int, rows, cols=None, dist=None, parent=None):
        self.name = name
        self.n = n
        self.rows = sorted(rows)
        self.cols = None if cols is None else sorted(cols)
        self.dist = dist if dist is not None else {}
        self.parent = parent if parent is not None else {}

    @classmethod
    def build(cls, g: Graph, name: str, rows, cols=None) -> "DenseTable":
        t = cls(name, g.n, rows, cols)
        for a in t.rows:
            r = sssp(g, a)
            t.dist[a] = r.dist if t.cols is None else {b: r.dist[b] for b in t.cols}
            t.parent[a] = r.parent
        return t

    @property
    def cardinality(self) -> int:
        ncols = self.n if self.cols is None else len(self.cols)
        return len(self.rows) * ncols

    def lookup(self, x: int, y: int):
        """``d(x, y)`` with either argument a row vertex."""
        row = self.dist.get(x)
        if row is not None:
            return row[y]
        return self.dist[y][x]

    def path(self, a: int, b: int) -> list[int]:
        par = self.parent[a]
        out = [b]
        while out[-1] != a:
            out.append(par[out[-1]])
        out.reverse()
        return out

    def matrix(self, cols: Optional[list] = None) -> np.ndarray:
        cols = self.cols if cols is None else cols
        m = np.empty((len(self.rows), len(cols)))
        for i, a in enumerate(self.rows):
            row = self.dist[a]
            m[i] = [row[b] for b in cols]
        return m


class EstimateReport:
    """Estimate plus the recipe needed to rebuild its witness walk."""

    __slots__ = ("u", "v", "value", "legs", "_oracle", "_walk")

    def __init__(self, u, v, value, legs, oracle):
        self.u = u
        self.v = v
        self.value = int(value) if value != INF else INF
        self.legs = legs
        self._oracle = oracle
        self._walk = None

    @property
    def witness(self) -> Optional[list[int]]:
        """Vertex walk in the original graph, ``None`` for an infinite estimate."""
        if self.value == INF:
            return None
        if not self.legs:
            return [self.u]
        if self._walk is None:
            self._walk = self._oracle.lift(self._oracle.expand(self.legs))
        return self._walk

    def witness_length(self):
        w = self.witness
        return INF if w is None else walk_length(self._oracle.base, w)

    def __repr__(self):
        return f"EstimateReport({self.u}, {self.v}, value={self.value})"


class Oracle:
    """Common state: working graph, hierarchy, bunches, dense tables."""

    variant = "?"

    def __init__(self, base: Graph, g: Graph, red: Optional[ReducedGraph], params: dict):
        self.base = base
        self.g = g
        self.red = red
        self.params = dict(params)
        self.h: Optional[Hierarchy] = None
        self.bt: Optional[BunchTable] = None
        self.tables: dict[str, DenseTable] = {}
        self.probes = 0

    # the working graph may be a degree-reduced copy of the base graph
    def to_work(self, u: int) -> int:
        return u if self.red is None else self.red.vertex_map[u]

    def lift(self, walk: list[int]) -> list[int]:
        return walk if self.red is None else self.red.lift_walk(walk)

    def _check(self, u, v):
        n = self.base.n
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"query vertex out of range: ({u}, {v})")

    def query(self, u: int, v: int) -> EstimateReport:
        self._check(u, v)
        a, b = self.to_work(u), self.to_work(v)
        if a == b:
            return EstimateReport(u, v, 0, [], self)
        val, legs = self._query(a, b)
        return EstimateReport(u, v, val, legs, self)

    def estimate(self, u: int, v: int):
        return self.query(u, v).value

    def _query(self, u, v):
        raise NotImplementedError

    # -- witness expansion -------------------------------------------------

    def leg_walk(self, leg) -> list[int]:
        kind = leg[0]
        if kind == "piv":
            return self.h.pivot_path(leg[1], leg[2])
        if kind == "pivr":
            return self.h.pivot_path(leg[1], leg[2])[::-1]
        if kind == "bun":
            return self.bt.path(leg[1], leg[2], leg[3])
        if kind == "bunr":
            return self.bt.path(leg[1], leg[2], leg[3])[::-1]
        if kind == "row":
            return self.tables[leg[1]].path(leg[2], leg[3])
        if kind == "rowr":
            return self.tables[leg[1]].path(leg[2], leg[3])[::-1]
        if kind == "edge":
            return [leg[1], leg[2]]
        if kind == "walk":
            return list(leg[1])
        if kind == "tow":
            return leg[1].path(leg[2], leg[3])
        if kind == "towr":
            return leg[1].path(leg[2], leg[3])[::-1]
        raise ValueError(f"unknown leg {kind!r}")

    def expand(self, legs) -> list[int]:
        walk: list[int] = []
        for leg in legs:
            part = self.leg_walk(leg)
            if walk:
                if walk[-1] != part[0]:
                    raise AssertionError(f"legs do not join: {walk[-1]} vs {part[0]} at {leg[0]}")
                walk.extend(part[1:])
            else:
                walk.extend(part)
        return walk

    # -- shared query pieces -------------------------------------------------

    def tz_query(self, u: int, v: int, start: int = 0):
        """Thorup-Zwick query from level ``start``; returns ``(value, (x, y, j))``.

        The value is ``h_j(x) + d(p_j(x), y)`` with ``p_j(x)`` in ``B_j(y)``.
        """
        h = self.h
        bunch = self.bt.bunch
        for i in range(start + 1, h.k + 1):
            j = i - 1
            p = h.pivot[j][u]
            d = bunch[j][v].get(p)
            self.probes += 1
            if d is not None:
                return h.radius[j][u] + d, (u, v, j)
            u, v = v, u
        return INF, None

    def mtz_query(self, u: int, v: int, start: int = 0):
        a, ta = self.tz_query(u, v, start)
        b, tb = self.tz_query(v, u, start)
        if b < a:
            return b, tb
        return a, ta

    def tz_legs(self, trace):
        x, y, j = trace
        p = self.h.pivot[j][x]
        return [("piv", j, x), ("bunr", j, y, p)]

    def size_report(self) -> dict:
        out = {"n": self.g.n, "m": self.g.m}
        if self.h is not None:
            out["levels"] = [len(a) for a in self.h.levels]
        if self.bt is not None:
            out["mean_bunch"] = {i: sum(self.bt.sizes(i)) / max(1, self.g.n) for i in self.bt.levels}
        out["tables"] = {name: t.cardinality for name, t in self.tables.items()}
        return out


class TZOracle(Oracle):
    """Classical (2k-1)-stretch oracle: bunches on every level, MTZ query."""

    variant = "tz"

    def _query(self, u, v):
        val, trace = self.mtz_query(u, v, 0)
        if trace is None:
            return INF, []
        legs = self.tz_legs(trace)
        return val, legs if trace[0] == u else reverse_legs(legs)

    def trace(self, u: int, v: int):
        """States ``(i, x, y)`` visited by the forward TZ query, for instrumentation."""
        h = self.h
        out = []
        x, y = self.to_work(u), self.to_work(v)
        for i in range(1, h.k + 1):
            out.append((i, x, y))
            if h.pivot[i - 1][x] in self.bt.bunch[i - 1][y]:
                break
            x, y = y, x
        return out


def build_tz(g: Graph, k: int, seed=0, mode: str = "geometric") -> TZOracle:
    if k < 1:
        raise ParameterError("k must be at least 1")
    o = TZOracle(g, g, None, {"k": k, "seed": seed, "mode": mode})
    o.h = sample_hierarchy(g, k, mode, seed)
    o.bt = compute_bunches(g, o.h)
    return o
