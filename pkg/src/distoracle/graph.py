"""Undirected graphs with non-negative integer weights.

Everything else in the package runs on top of :class:`Graph`: file I/O,
seeded random generation, exact single-source shortest paths and the
max-degree reduction used by the weighted oracles.
"""
from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, Optional, Sequence

INF = math.inf

# Dense tables hold distances as float64; integers stay exact below this.
MAX_EXACT = 2 ** 53


class GraphError(ValueError):
    pass


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "weighted", "adj", "nbrs", "_w", "_edges")

    def __init__(self, n: int, edges: Iterable[tuple], weighted: bool = True):
        if n < 0:
            raise GraphError("negative vertex count")
        self.n = n
        self.weighted = weighted
        best: dict[tuple[int, int], int] = {}
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = 1
            else:
                u, v, w = e
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"vertex id out of range in edge ({u}, {v})")
            if w < 0:
                raise GraphError(f"negative weight on edge ({u}, {v})")
            if u == v:
                continue
            if not weighted:
                w = 1
            key = (u, v) if u < v else (v, u)
            old = best.get(key)
            if old is None or w < old:
                best[key] = int(w)
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for (u, v), w in best.items():
            adj[u].append((v, w))
            adj[v].append((u, w))
        for row in adj:
            row.sort()
        self.adj = adj
        self.nbrs = [[v for v, _ in row] for row in adj]
        self._w = best
        self._edges = sorted((u, v, w) for (u, v), w in best.items())
        total = sum(best.values())
        if total >= MAX_EXACT:
            raise GraphError("total edge weight too large for exact distance tables")

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        """Canonical edge list, ``u < v``, sorted."""
        return list(self._edges)

    @property
    def avg_degree(self) -> float:
        return self.m / self.n if self.n else 0.0

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def max_degree(self) -> int:
        return max((len(r) for r in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._w

    def weight(self, u: int, v: int) -> int:
        w = self._w.get((u, v) if u < v else (v, u))
        if w is None:
            raise KeyError((u, v))
        return w

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and self.weighted == other.weighted and self._edges == other._edges)

    def __hash__(self):
        return hash((self.n, tuple(self._edges)))

    def __repr__(self) -> str:
        kind = "weighted" if self.weighted else "unweighted"
        return f"Graph(n={self.n}, m={self.m}, {kind})"


def digest(g: Graph) -> str:
    """FNV-1a 64-bit hash over the canonical sorted edge list."""
    h = 0xCBF29CE484222325
    prime = 0x100000001B3
    mask = 0xFFFFFFFFFFFFFFFF
    parts = [f"{g.n} {int(g.weighted)}\n".encode()]
    parts.extend(f"{u} {v} {w}\n".encode() for u, v, w in g._edges)
    for chunk in parts:
        for byte in chunk:
            h ^= byte
            h = (h * prime) & mask
    return f"{h:016x}"


def walk_length(g: Graph, walk: Sequence[int]) -> int:
    """Sum of edge weights along ``walk``; raises if a hop is not an edge."""
    total = 0
    for a, b in zip(walk, walk[1:]):
        total += g.weight(a, b)
    return total


# ---------------------------------------------------------------------------
# file formats


def _parse_weight(tok: str, scale: int, lineno: int) -> int:
    try:
        val = Decimal(tok) * scale
    except InvalidOperation:
        raise GraphError(f"line {lineno}: bad weight {tok!r}") from None
    if val < 0:
        raise GraphError(f"line {lineno}: negative weight {tok}")
    if val != val.to_integral_value():
        raise GraphError(f"line {lineno}: weight {tok} is not integral after scaling by {scale}")
    return int(val)


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphError(f"line {lineno}: expected integer, got {tok!r}") from None


def parse_edge_list(text: str, scale: int = 1) -> Graph:
    n = None
    edges = []
    weighted = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if n is None:
            if len(toks) != 1:
                raise GraphError(f"line {lineno}: first line must hold the vertex count")
            n = _parse_int(toks[0], lineno)
            continue
        if len(toks) not in (2, 3):
            raise GraphError(f"line {lineno}: expected 'u v [w]'")
        u, v = _parse_int(toks[0], lineno), _parse_int(toks[1], lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"line {lineno}: vertex id out of range")
        if len(toks) == 3:
            weighted = True
            w = _parse_weight(toks[2], scale, lineno)
        else:
            w = scale
        edges.append((u, v, w))
    if n is None:
        raise GraphError("empty file: missing vertex count")
    return Graph(n, edges, weighted=weighted)


def parse_dimacs(text: str, scale: int = 1) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks or toks[0] == "c":
            continue
        if toks[0] == "p":
            if len(toks) < 3:
                raise GraphError(f"line {lineno}: malformed problem line")
            n = _parse_int(toks[2], lineno)
        elif toks[0] == "a":
            if n is None:
                raise GraphError(f"line {lineno}: arc before problem line")
            if len(toks) != 4:
                raise GraphError(f"line {lineno}: expected 'a u v w'")
            u, v = _parse_int(toks[1], lineno) - 1, _parse_int(toks[2], lineno) - 1
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"line {lineno}: vertex id out of range")
            edges.append((u, v, _parse_weight(toks[3], scale, lineno)))
        else:
            raise GraphError(f"line {lineno}: unknown record {toks[0]!r}")
    if n is None:
        raise GraphError("missing problem line")
    return Graph(n, edges, weighted=True)


def load_graph(path, format: str = "edge-list", scale: int = 1) -> Graph:
    with open(path) as fh:
        text = fh.read()
    if format == "edge-list":
        return parse_edge_list(text, scale)
    if format == "dimacs":
        return parse_dimacs(text, scale)
    raise GraphError(f"unknown format {format!r}")


def format_edge_list(g: Graph) -> str:
    lines = [str(g.n)]
    for u, v, w in g._edges:
        lines.append(f"{u} {v} {w}" if g.weighted else f"{u} {v}")
    return "\n".join(lines) + "\n"


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))


# ---------------------------------------------------------------------------
# generation


def _pair_from_index(idx: int, n: int) -> tuple[int, int]:
    # row-major over pairs u < v; start(r) counts pairs whose first index is < r
    def start(r):
        return r * (2 * n - r - 1) // 2
    u = int((2 * n - 1 - math.sqrt((2 * n - 1) ** 2 - 8 * idx)) / 2)
    u = min(max(u, 0), n - 2)
    while u > 0 and start(u) > idx:
        u -= 1
    while start(u + 1) <= idx:
        u += 1
    return u, u + 1 + idx - start(u)


def random_graph(n: int, m: int, weight_max: int = 1, seed: int = 0) -> Graph:
    """Uniform simple graph with exactly ``m`` edges; ``weight_max == 1`` means unweighted."""
    total = n * (n - 1) // 2
    if m > total:
        raise GraphError(f"m={m} exceeds n(n-1)/2={total}")
    if weight_max < 1:
        raise GraphError("weight_max must be positive")
    rng = random.Random(seed)
    picks = sorted(rng.sample(range(total), m))
    weighted = weight_max > 1
    edges = []
    for idx in picks:
        u, v = _pair_from_index(idx, n)
        w = rng.randint(1, weight_max) if weighted else 1
        edges.append((u, v, w))
    return Graph(n, edges, weighted=weighted)


# ---------------------------------------------------------------------------
# shortest paths


@dataclass
class DistanceRow:
    source: int
    dist: list
    parent: list  # predecessor toward the source, -1 for none

    def path_to(self, v: int) -> list[int]:
        """Vertex sequence from the source to ``v``."""
        if self.dist[v] == INF:
            raise ValueError(f"{v} unreachable from {self.source}")
        out = [v]
        while v != self.source:
            v = self.parent[v]
            out.append(v)
        out.reverse()
        return out


def sssp(g: Graph, source: int, forbidden_edge: Optional[tuple[int, int]] = None) -> DistanceRow:
    """Exact distances from ``source``; BFS on unweighted graphs, heap Dijkstra otherwise."""
    n = g.n
    if not 0 <= source < n:
        raise GraphError(f"source {source} out of range")
    fa = fb = -1
    if forbidden_edge is not None:
        fa, fb = forbidden_edge
        if not g.has_edge(fa, fb):
            raise GraphError(f"forbidden edge {forbidden_edge} is not in the graph")
    dist = [INF] * n
    parent = [-1] * n
    dist[source] = 0
    if not g.weighted:
        nbrs = g.nbrs
        q = deque([source])
        while q:
            x = q.popleft()
            dx = dist[x] + 1
            for y in nbrs[x]:
                if dist[y] == INF:
                    if (x == fa and y == fb) or (x == fb and y == fa):
                        continue
                    dist[y] = dx
                    parent[y] = x
                    q.append(y)
        return DistanceRow(source, dist, parent)
    adj = g.adj
    done = [False] * n
    heap = [(0, source)]
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w in adj[x]:
            nd = d + w
            if nd < dist[y]:
                if (x == fa and y == fb) or (x == fb and y == fa):
                    continue
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return DistanceRow(source, dist, parent)


def _tree_path(parent, x) -> list[int]:
    out = [x]
    while parent[out[-1]] != -1:
        out.append(parent[out[-1]])
    out.reverse()
    return out


def _crosses(walk, a, b) -> bool:
    return any((x == a and y == b) or (x == b and y == a) for x, y in zip(walk, walk[1:]))


def avoiding_path(g: Graph, dist, parent, x: int, e: tuple) -> Optional[list[int]]:
    """A shortest path to ``x`` in the shortest-path DAG of ``dist`` that avoids edge ``e``.

    ``dist``/``parent`` describe a single- or multi-source shortest-path forest
    (parent -1 at the roots). Returns the vertex list from a root to ``x``, or
    None when every shortest path to ``x`` uses ``e``.
    """
    if dist[x] == INF:
        return None
    a, b = e
    tree = _tree_path(parent, x)
    if not _crosses(tree, a, b):
        return tree
    w = g.weight(a, b)
    head = b if dist[a] + w == dist[b] else a
    cut = dist[head]
    # walk the DAG backwards from x until a vertex strictly closer than the head
    nxt = {x: -1}
    stack = [x]
    adj = g.adj
    while stack:
        y = stack.pop()
        dy = dist[y]
        for z, wz in adj[y]:
            if z in nxt or dist[z] + wz != dy or (y == a and z == b) or (y == b and z == a):
                continue
            nxt[z] = y
            if dist[z] < cut:
                out = _tree_path(parent, z)
                while nxt[out[-1]] != -1:
                    out.append(nxt[out[-1]])
                return out
            stack.append(z)
    return None


# ---------------------------------------------------------------------------
# degree reduction


@dataclass
class ReducedGraph:
    graph: Graph
    vertex_map: list[int]  # original vertex -> canonical copy
    origin: list[int]      # reduced vertex -> original vertex
    holder: Optional[dict] = None  # (vertex, neighbour) -> copy holding that edge

    def edge_image(self, u: int, v: int) -> tuple[int, int]:
        """The reduced edge standing for original edge (u, v)."""
        if self.holder is None:
            return (u, v)
        return self.holder[(u, v)], self.holder[(v, u)]

    def lift_walk(self, walk: Sequence[int]) -> list[int]:
        """Map a walk in the reduced graph back to the original graph."""
        out: list[int] = []
        for x in walk:
            o = self.origin[x]
            if not out or out[-1] != o:
                out.append(o)
        return out


def degree_reduce(g: Graph) -> ReducedGraph:
    """Split high-degree vertices into zero-weight chains of copies.

    Every vertex of degree above ceil(mu)+2 becomes a path of copies joined by
    weight-0 edges; each copy keeps at most ceil(mu) original edges, so the
    result has max degree at most ceil(mu)+2 and identical distances between
    canonical copies.
    """
    n = g.n
    cap = max(1, math.ceil(g.avg_degree))
    limit = cap + 2
    if g.max_degree() <= limit:
        ident = list(range(n))
        return ReducedGraph(g, ident, list(ident))
    origin = list(range(n))
    holder: dict[tuple[int, int], int] = {}  # (vertex, neighbor) -> copy id holding that edge
    chain_edges = []
    for u in range(n):
        row = g.adj[u]
        if len(row) <= limit:
            for v, _ in row:
                holder[(u, v)] = u
            continue
        copies = [u]
        for start in range(cap, len(row), cap):
            c = len(origin)
            origin.append(u)
            chain_edges.append((copies[-1], c, 0))
            copies.append(c)
        for j, (v, _) in enumerate(row):
            holder[(u, v)] = copies[j // cap]
    edges = list(chain_edges)
    for u, v, w in g._edges:
        edges.append((holder[(u, v)], holder[(v, u)], w))
    h = Graph(len(origin), edges, weighted=True)
    return ReducedGraph(h, list(range(n)), origin, holder)
