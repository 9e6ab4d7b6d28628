"""Sampled level sets A_0 > A_1 > ... > A_k, pivots, radii, bunches and clusters."""
from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .graph import INF, Graph

RESAMPLE_ATTEMPTS = 32
CENTER_CAP = 4.0


@dataclass
class Hierarchy:
    k: int
    levels: list            # frozensets A_0..A_k
    pivot: list = field(default_factory=list)         # pivot[i][u], -1 when A_i is unreachable
    radius: list = field(default_factory=list)        # radius[i][u]
    pivot_parent: list = field(default_factory=list)  # forest toward the pivot at each level

    @property
    def n(self) -> int:
        return len(self.pivot[0]) if self.pivot else len(self.levels[0])

    def pivot_path(self, i: int, u: int) -> list[int]:
        """Vertex walk from ``u`` to ``p_i(u)`` of length ``h_i(u)``."""
        par = self.pivot_parent[i]
        out = [u]
        while par[out[-1]] != -1:
            out.append(par[out[-1]])
        return out


def multi_source(g: Graph, sources):
    """Distance to the nearest source, ties toward the smaller source id.

    Returns ``(dist, src, parent)`` lists; parent points one hop toward src.
    """
    n = g.n
    dist = [INF] * n
    src = [-1] * n
    parent = [-1] * n
    heap = []
    for s in sorted(sources):
        dist[s] = 0
        src[s] = s
        heap.append((0, s, s))
    heapq.heapify(heap)
    done = [False] * n
    adj = g.adj
    while heap:
        d, s, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w in adj[x]:
            if done[y]:
                continue
            nd = d + w
            dy = dist[y]
            if nd < dy or (nd == dy and s < src[y]):
                dist[y] = nd
                src[y] = s
                parent[y] = x
                heapq.heappush(heap, (nd, s, y))
    return dist, src, parent


def truncated_cluster(g: Graph, w: int, radius: Sequence, limit: Optional[int] = None):
    """Shortest-path ball ``{v : d(w,v) < radius[v]}`` grown from ``w``.

    Returns ``(dist, parent)`` dicts, parent pointing toward ``w``. With
    ``limit`` set, gives up and returns ``None`` once the cluster would grow
    past ``limit`` members.
    """
    if not 0 < radius[w]:
        return {}, {}
    dist = {w: 0}
    parent = {w: -1}
    if not g.weighted:
        nbrs = g.nbrs
        q = deque([w])
        while q:
            x = q.popleft()
            dx = dist[x] + 1
            for y in nbrs[x]:
                if y not in dist and dx < radius[y]:
                    dist[y] = dx
                    parent[y] = x
                    if limit is not None and len(dist) > limit:
                        return None
                    q.append(y)
        return dist, parent
    adj = g.adj
    heap = [(0, w)]
    done = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if limit is not None and len(done) > limit:
            return None
        for y, wt in adj[x]:
            nd = d + wt
            if nd < radius[y] and nd < dist.get(y, INF):
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, y))
    return dist, parent


# ---------------------------------------------------------------------------
# sampling


def _geometric(members, prob, rng):
    return [x for x in members if rng.random() < prob]


def center_sample(g: Graph, p: float, rng: random.Random, cap: float = CENTER_CAP):
    """Landmark set whose every cluster ``C(w, A)`` has at most ``cap/p`` members.

    Repeatedly samples the set W of vertices whose cluster is still too big,
    at rate ``n*p/|W|``, until W empties.
    """
    n = g.n
    s = max(1.0, n * p)
    limit = int(cap / p)
    chosen: set[int] = set()
    heavy = list(range(n))
    while heavy:
        prob = min(1.0, s / len(heavy))
        chosen.update(_geometric(heavy, prob, rng))
        if not chosen:
            continue
        radius = multi_source(g, chosen)[0]
        heavy = [w for w in range(n)
                 if w not in chosen and truncated_cluster(g, w, radius, limit) is None]
    return chosen


def _draw_level(g, prev, spec, rng):
    kind = spec[0]
    if kind == "all":
        return set(prev)
    if kind == "geom":
        return set(_geometric(sorted(prev), spec[1], rng))
    if kind == "center":
        if len(prev) != g.n:
            raise ValueError("center-capped level must be drawn from the full vertex set")
        return center_sample(g, spec[1], rng)
    raise ValueError(f"unknown level spec {spec!r}")


def build_hierarchy(g: Graph, plan: Sequence[tuple], seed=0) -> Hierarchy:
    """Hierarchy with ``len(plan)+1`` nonempty levels followed by an empty A_k.

    ``plan[i-1]`` says how A_i is drawn from A_{i-1}: ``("all",)``,
    ``("geom", prob)`` or ``("center", p)``.
    """
    rng = random.Random(seed)
    k = len(plan) + 1
    levels = [frozenset(range(g.n))]
    for spec in plan:
        prev = levels[-1]
        cur = set()
        for _ in range(RESAMPLE_ATTEMPTS):
            cur = _draw_level(g, prev, spec, rng)
            if cur or not prev:
                break
        if not cur and prev:
            cur = {min(prev)}
        levels.append(frozenset(cur))
    levels.append(frozenset())
    h = Hierarchy(k, levels)
    compute_pivots_radii(g, h)
    return h


def sample_hierarchy(g: Graph, k: int, mode: str = "geometric", seed=0,
                     p: Optional[float] = None) -> Hierarchy:
    if k < 1:
        raise ValueError("k must be at least 1")
    n = max(g.n, 2)
    q = n ** (-1.0 / k)
    if mode == "geometric":
        plan = [("geom", q)] * (k - 1)
    elif mode == "center-capped":
        plan = [("center", q if p is None else p)] + [("geom", q)] * (k - 2) if k > 1 else []
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return build_hierarchy(g, plan, seed)


def compute_pivots_radii(g: Graph, h: Hierarchy) -> Hierarchy:
    n = g.n
    h.pivot, h.radius, h.pivot_parent = [], [], []
    for i, level in enumerate(h.levels):
        if i == 0:
            h.pivot.append(list(range(n)))
            h.radius.append([0] * n)
            h.pivot_parent.append([-1] * n)
        elif not level:
            h.pivot.append([-1] * n)
            h.radius.append([INF] * n)
            h.pivot_parent.append([-1] * n)
        else:
            dist, src, par = multi_source(g, level)
            h.pivot.append(src)
            h.radius.append(dist)
            h.pivot_parent.append(par)
    return h


# ---------------------------------------------------------------------------
# bunches and clusters


class ClusterTable:
    """``C(w) = {v : d(w,v) < h_{i+1}(v)}`` for every ``w`` in A_i minus A_{i+1}."""

    def __init__(self, level: int, dist: dict, parent: dict):
        self.level = level
        self.dist = dist      # w -> {v: d(w,v)}
        self.parent = parent  # w -> {v: next hop toward w}

    def __getitem__(self, w):
        return self.dist[w]

    def path(self, w: int, v: int) -> list[int]:
        """Walk from ``w`` to cluster member ``v``."""
        par = self.parent[w]
        out = [v]
        while out[-1] != w:
            out.append(par[out[-1]])
        out.reverse()
        return out


def compute_clusters(g: Graph, h: Hierarchy, i: int, owners=None) -> ClusterTable:
    radius = h.radius[i + 1]
    if owners is None:
        owners = sorted(h.levels[i] - h.levels[i + 1])
    dist, parent = {}, {}
    for w in owners:
        dist[w], parent[w] = truncated_cluster(g, w, radius)
    return ClusterTable(i, dist, parent)


class BunchTable:
    """``B_i(u) = {x in A_i : d(u,x) < h_{i+1}(u)}``, built by inverting clusters."""

    def __init__(self, n: int):
        self.n = n
        self.bunch: dict[int, list[dict]] = {}
        self.clusters: dict[int, ClusterTable] = {}

    @property
    def levels(self):
        return sorted(self.bunch)

    def add_level(self, ct: ClusterTable):
        rows = [dict() for _ in range(self.n)]
        for w in sorted(ct.dist):
            for v, d in ct.dist[w].items():
                rows[v][w] = d
        self.bunch[ct.level] = rows
        self.clusters[ct.level] = ct

    def __getitem__(self, i):
        return self.bunch[i]

    def path(self, i: int, u: int, x: int) -> list[int]:
        """Walk from ``u`` to bunch member ``x`` (reverse of the cluster path)."""
        par = self.clusters[i].parent[x]
        out = [u]
        while out[-1] != x:
            out.append(par[out[-1]])
        return out

    def sizes(self, i: int) -> list[int]:
        return [len(r) for r in self.bunch[i]]


def compute_bunches(g: Graph, h: Hierarchy, levels=None) -> BunchTable:
    bt = BunchTable(g.n)
    if levels is None:
        levels = range(h.k)
    for i in levels:
        bt.add_level(compute_clusters(g, h, i))
    return bt


def expected_bunch_bound(n: int, k: int) -> float:
    return 5 * n ** (1.0 / k)


def level_probability(n: int, k: int) -> float:
    return max(n, 2) ** (-1.0 / k)


def clamp(x, lo, hi):
    return max(lo, min(hi, x))


def log_n(n: int, x: float) -> float:
    return math.log(x) / math.log(n) if n > 1 else 0.0
