"""Brute-force ground truth: all-pairs distances and shortest cycles."""
from __future__ import annotations

import numpy as np

from .graph import INF, Graph, sssp


class ApspTable:
    """Dense n x n exact distance matrix (float64, ``inf`` across components)."""

    def __init__(self, dist: np.ndarray, parents: list[list[int]] | None = None):
        self.dist = dist
        self.parents = parents

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def __getitem__(self, key):
        val = self.dist[key]
        if np.ndim(val) == 0:
            return int(val) if val != np.inf else INF
        return val

    def path(self, u: int, v: int) -> list[int]:
        """A shortest path from ``u`` to ``v`` from the stored sssp trees."""
        if self.parents is None:
            raise ValueError("table built without parents")
        if self.dist[u, v] == np.inf:
            raise ValueError(f"{v} unreachable from {u}")
        par = self.parents[u]
        out = [v]
        while v != u:
            v = par[v]
            out.append(v)
        out.reverse()
        return out


def apsp(g: Graph, keep_parents: bool = False) -> ApspTable:
    n = g.n
    mat = np.full((n, n), np.inf)
    parents = [] if keep_parents else None
    for s in range(n):
        row = sssp(g, s)
        mat[s] = row.dist
        if keep_parents:
            parents.append(row.parent)
    return ApspTable(mat, parents)


def exact_shortest_cycle(g: Graph, u: int):
    """SC(u) by removing each incident edge in turn; returns ``(value, cycle)``.

    The cycle is a closed vertex sequence starting and ending at ``u``.
    """
    best = INF
    best_cycle = None
    for v, w in g.adj[u]:
        row = sssp(g, v, forbidden_edge=(u, v))
        back = row.dist[u]
        if back + w < best:
            best = back + w
            # path_to(u) runs v..u, so the cycle reads u, v, ..., u
            best_cycle = [u] + row.path_to(u)
    return best, best_cycle


def shortest_cycles(g: Graph) -> list:
    """SC(u) for every vertex with one forbidden-edge search per edge."""
    sc = [INF] * g.n
    for u, v, w in g.edges:
        val = sssp(g, v, forbidden_edge=(u, v)).dist[u] + w
        if val < sc[u]:
            sc[u] = val
        if val < sc[v]:
            sc[v] = val
    return sc
