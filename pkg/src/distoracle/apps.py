"""n-pairs shortest paths and all-nodes shortest cycles on top of the oracles."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .balls import build_near, default_c
from .borderline import build_borderline
from .graph import INF, Graph, GraphError
from .tz import ParameterError


def npsp_c(n: int, m: int, k: int) -> float:
    """``log_n(m) / (k+1)`` clamped into the open interval (0, 1/2)."""
    if n < 2 or m < 2:
        return 0.25
    c = math.log(m) / math.log(n) / (k + 1)
    return min(max(c, 0.01), 0.49)


def npsp_additive(g: Graph, batch, k: int = 2, seed=0):
    """Additive ``d + 2*ceil(d/2k)`` estimates for each pair in ``batch``."""
    if g.weighted:
        raise ParameterError("npsp_additive needs an unweighted graph")
    if k < 2:
        raise ParameterError("k must be at least 2")
    o = build_near(g, "U-AV", npsp_c(g.n, g.m, k), t=k, seed=seed)
    o.cache_towers = True
    return [o.query(s, t) for s, t in batch]


def build_spanner(g: Graph, k: int, seed=0) -> Graph:
    """Randomised cluster-growing (2k-1)-spanner.

    Clusters grow for k-1 rounds; each round keeps a sampled subset of the
    clusters and every vertex of a dropped cluster either joins the nearest
    sampled neighbour cluster or, failing that, keeps one lightest edge to every
    adjacent cluster. A final round links every vertex to each adjacent
    surviving cluster.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    if k == 1:
        return g
    n = g.n
    rng = random.Random(seed)
    prob = max(n, 2) ** (-1.0 / k)
    remaining = [dict(row) for row in g.adj]  # v -> {x: w} still unresolved
    cluster = list(range(n))                   # center of v's cluster or -1
    kept: set = set()

    def drop(v, x):
        remaining[v].pop(x, None)
        remaining[x].pop(v, None)

    def keep(v, x):
        kept.add((v, x) if v < x else (x, v))

    def lightest_by_cluster(v):
        best = {}
        for x, w in remaining[v].items():
            c = cluster[x]
            if c < 0:
                continue
            cand = (w, x)
            if c not in best or cand < best[c]:
                best[c] = cand
        return best

    for _ in range(k - 1):
        centers = sorted({c for c in cluster if c >= 0})
        sampled = {c for c in centers if rng.random() < prob}
        new_cluster = [cluster[v] if cluster[v] in sampled else -1 for v in range(n)]
        for v in range(n):
            if cluster[v] < 0 or cluster[v] in sampled:
                continue
            adj = lightest_by_cluster(v)
            near = [(wx, c) for c, wx in adj.items() if c in sampled]
            if not near:
                for c, (w, x) in sorted(adj.items()):
                    keep(v, x)
                    for y in [y for y in remaining[v] if cluster[y] == c]:
                        drop(v, y)
                continue
            (w_star, x_star), c_star = min(near)
            keep(v, x_star)
            new_cluster[v] = c_star
            for c, (w, x) in sorted(adj.items()):
                if c != c_star and (w, x) < (w_star, x_star):
                    keep(v, x)
                    for y in [y for y in remaining[v] if cluster[y] == c]:
                        drop(v, y)
            for y in [y for y in remaining[v] if cluster[y] == c_star]:
                drop(v, y)
        cluster = new_cluster
        for v in range(n):
            if cluster[v] < 0:
                for y in list(remaining[v]):
                    drop(v, y)
                continue
            for y in [y for y in remaining[v] if cluster[y] == cluster[v]]:
                drop(v, y)
    for v in range(n):
        for c, (w, x) in sorted(lightest_by_cluster(v).items()):
            keep(v, x)
    return Graph(n, [(u, v, g.weight(u, v)) for u, v in sorted(kept)], weighted=g.weighted)


def npsp_spanner(g: Graph, batch, k: int = 3, seed=0):
    """``(2k-1)(2k-3)``-stretch estimates: spanner first, then the (2k-3) oracle on it."""
    if k < 3:
        raise ParameterError("npsp_spanner needs k >= 3")
    h = build_spanner(g, k, seed)
    o = build_borderline(h, k, 1, "C", seed)
    return [o.query(s, t) for s, t in batch]


@dataclass
class CycleEstimates:
    values: list
    source: list = field(default_factory=list)  # (u, v, report) behind each value

    def cycle(self, x: int) -> Optional[list[int]]:
        """Closed walk through ``x`` of length ``values[x]``."""
        if self.values[x] == INF:
            return None
        u, v, rep = self.source[x]
        walk = rep.witness  # u -> ... -> v avoiding the edge (u, v)
        # close it with the edge itself, starting and ending at x
        if x == u:
            return walk + [u]
        return walk[::-1] + [v]


def ansc(g: Graph, k: int = 3, mode: Optional[str] = None, seed=0) -> CycleEstimates:
    """Approximate shortest cycle through every vertex."""
    if k < 2:
        raise ParameterError("k must be at least 2")
    if mode is None:
        mode = "weighted-multiplicative" if g.weighted else "unweighted-additive"
    if mode == "unweighted-additive":
        if g.weighted:
            raise ParameterError("unweighted-additive mode needs an unweighted graph")
        t = k - 1
        o = build_near(g, "U-AV", default_c("U-AV", t), t=t, seed=seed)
    elif mode == "weighted-multiplicative":
        # landmark-to-all rows: the edge-avoiding query needs d(a, x) in G - e
        t = k - 1
        o = build_near(g, "W-AV", default_c("W-AV", t), t=t, seed=seed)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    vals = [INF] * g.n
    src: list = [None] * g.n
    for u, v, w in g.edges:
        rep = o.query_avoiding(u, v)
        if rep.value == INF:
            continue
        val = rep.value + w
        for x in (u, v):
            if val < vals[x]:
                vals[x] = val
                src[x] = (u, v, rep)
    return CycleEstimates(vals, src)


def query_gt1(o, u: int, v: int):
    """Oracle estimate of the shortest u-v walk avoiding the edge (u, v)."""
    if not o.base.has_edge(u, v):
        raise GraphError(f"({u}, {v}) is not an edge")
    return o.query_avoiding(u, v)
