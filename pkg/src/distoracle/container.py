"""Oracle container: 8-byte magic, JSON header, then length-prefixed binary sections.

Layout::

    MAGIC                      8 bytes
    header length              uint32 little endian
    header                     UTF-8 JSON (sorted keys)
    per section: byte length   uint64 little endian, then raw little-endian array data

The header lists every section with its dtype and shape, so the file can be
inspected without this module. Only the sampled structure is stored (levels,
pivots, radii, pivot forests, clusters, dense tables with parent rows); sets
derived from it are recomputed on load.
"""
from __future__ import annotations

import io
import json
import struct
from typing import Optional

import numpy as np

from .balls import NearOracle
from .borderline import BorderlineOracle
from .graph import INF, Graph, degree_reduce, digest
from .hierarchy import BunchTable, ClusterTable, Hierarchy
from .midpoint import MidpointOracle
from .tz import DenseTable, TZOracle

MAGIC = b"DSTORCL1"
VERSION = 1

MIDPOINT_TAGS = ("q3", "q4", "q4wide", "q2k5")
NEAR_TAGS = ("u-av", "u-aa", "w-aa", "w-av")
BORDERLINE_TAGS = ("borderline-a", "borderline-b", "borderline-c")
ALL_TAGS = ("tz",) + BORDERLINE_TAGS + MIDPOINT_TAGS + NEAR_TAGS


class ContainerError(ValueError):
    pass


def variant_tag(o) -> str:
    return o.variant.lower()


# ---------------------------------------------------------------------------
# value conversion


def _dist_array(values) -> np.ndarray:
    return np.asarray(values, dtype="<f8")


def _restore(values) -> list:
    """float64 distances back to Python ints, keeping inf."""
    return [INF if x == INF else int(x) for x in values]


def _ints(values) -> np.ndarray:
    return np.asarray(values, dtype="<i8")


# ---------------------------------------------------------------------------
# save


def _cluster_sections(ct: ClusterTable):
    owners = sorted(ct.dist)
    offsets = [0]
    members, dists, parents = [], [], []
    for w in owners:
        row = ct.dist[w]
        par = ct.parent[w]
        for v, d in row.items():   # insertion order is kept on purpose
            members.append(v)
            dists.append(d)
            parents.append(par[v])
        offsets.append(len(members))
    return [("owners", _ints(owners)), ("offsets", _ints(offsets)),
            ("members", _ints(members)), ("dist", _dist_array(dists)),
            ("parent", _ints(parents))]


def _table_sections(t: DenseTable):
    out = [("rows", _ints(t.rows))]
    if t.cols is not None:
        out.append(("cols", _ints(t.cols)))
        ncols = len(t.cols)
        dist = np.empty((len(t.rows), ncols), dtype="<f8")
        for i, a in enumerate(t.rows):
            row = t.dist[a]
            dist[i] = [row[b] for b in t.cols]
    else:
        dist = np.empty((len(t.rows), t.n), dtype="<f8")
        for i, a in enumerate(t.rows):
            dist[i] = t.dist[a]
    parent = np.empty((len(t.rows), t.n), dtype="<i8")
    for i, a in enumerate(t.rows):
        parent[i] = t.parent[a]
    out += [("dist", dist), ("parent", parent)]
    return out


def serialize(o) -> bytes:
    h = o.h
    sections = []
    offsets = [0]
    members = []
    for level in h.levels:
        members.extend(sorted(level))
        offsets.append(len(members))
    sections.append(("levels.offsets", _ints(offsets)))
    sections.append(("levels.members", _ints(members)))
    sections.append(("pivot", _ints(h.pivot)))
    sections.append(("radius", _dist_array(h.radius)))
    sections.append(("pivot_parent", _ints(h.pivot_parent)))
    for i in o.bt.levels:
        for name, arr in _cluster_sections(o.bt.clusters[i]):
            sections.append((f"cluster.{i}.{name}", arr))
    tables = sorted(o.tables)
    for name in tables:
        for part, arr in _table_sections(o.tables[name]):
            sections.append((f"table.{name}.{part}", arr))

    header = {
        "magic": MAGIC.decode(),
        "version": VERSION,
        "variant": variant_tag(o),
        "params": o.params,
        "seed": o.params.get("seed", 0),
        "k": h.k,
        "n": o.g.n,
        "base_n": o.base.n,
        "digest": digest(o.base),
        "bunch_levels": list(o.bt.levels),
        "tables": {name: {"full": o.tables[name].cols is None} for name in tables},
        "sections": [{"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape)}
                     for name, arr in sections],
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<I", len(head)))
    buf.write(head)
    for _, arr in sections:
        data = np.ascontiguousarray(arr).tobytes()
        buf.write(struct.pack("<Q", len(data)))
        buf.write(data)
    return buf.getvalue()


def save_oracle(o, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(o))


# ---------------------------------------------------------------------------
# load


def read_header(data: bytes) -> dict:
    if data[:8] != MAGIC:
        raise ContainerError("not an oracle container (bad magic)")
    (hlen,) = struct.unpack_from("<I", data, 8)
    header = json.loads(data[12:12 + hlen].decode())
    if header.get("version") != VERSION:
        raise ContainerError(f"unsupported container version {header.get('version')}")
    return header


def _read_sections(data: bytes, header: dict) -> dict:
    (hlen,) = struct.unpack_from("<I", data, 8)
    pos = 12 + hlen
    out = {}
    for desc in header["sections"]:
        (size,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        arr = np.frombuffer(data, dtype=np.dtype(desc["dtype"]), count=size // np.dtype(desc["dtype"]).itemsize,
                            offset=pos)
        out[desc["name"]] = arr.reshape(desc["shape"])
        pos += size
    if pos != len(data):
        raise ContainerError("trailing bytes after the last section")
    return out


def _load_hierarchy(sec: dict, k: int) -> Hierarchy:
    offsets = sec["levels.offsets"].tolist()
    members = sec["levels.members"].tolist()
    levels = [frozenset(members[offsets[i]:offsets[i + 1]]) for i in range(len(offsets) - 1)]
    h = Hierarchy(k, levels)
    h.pivot = sec["pivot"].tolist()
    h.radius = [_restore(row) for row in sec["radius"].tolist()]
    h.pivot_parent = sec["pivot_parent"].tolist()
    return h


def _load_clusters(sec: dict, i: int) -> ClusterTable:
    p = f"cluster.{i}."
    owners = sec[p + "owners"].tolist()
    offsets = sec[p + "offsets"].tolist()
    members = sec[p + "members"].tolist()
    dists = _restore(sec[p + "dist"].tolist())
    parents = sec[p + "parent"].tolist()
    dist, parent = {}, {}
    for j, w in enumerate(owners):
        lo, hi = offsets[j], offsets[j + 1]
        dist[w] = dict(zip(members[lo:hi], dists[lo:hi]))
        parent[w] = dict(zip(members[lo:hi], parents[lo:hi]))
    return ClusterTable(i, dist, parent)


def _load_table(sec: dict, name: str, n: int, full: bool) -> DenseTable:
    p = f"table.{name}."
    rows = sec[p + "rows"].tolist()
    cols = None if full else sec[p + "cols"].tolist()
    t = DenseTable(name, n, rows, cols)
    for a, drow, prow in zip(rows, sec[p + "dist"].tolist(), sec[p + "parent"].tolist()):
        vals = _restore(drow)
        t.dist[a] = vals if cols is None else dict(zip(cols, vals))
        t.parent[a] = prow
    return t


def _shell(tag: str, g: Graph, params: dict):
    """Empty oracle object of the right class over the right working graph."""
    if tag == "tz":
        return TZOracle(g, g, None, params)
    if tag in BORDERLINE_TAGS:
        red = degree_reduce(g)
        return BorderlineOracle(g, red.graph, red, params)
    if tag in MIDPOINT_TAGS:
        return MidpointOracle(g, g, params)
    if tag in NEAR_TAGS:
        if tag.startswith("w-"):
            red = degree_reduce(g)
            return NearOracle(g, red.graph, red, params)
        return NearOracle(g, g, None, params)
    raise ContainerError(f"unknown variant tag {tag!r}")


def deserialize(data: bytes, g: Graph):
    header = read_header(data)
    got = digest(g)
    if got != header["digest"]:
        raise ContainerError(f"graph digest mismatch: container {header['digest']}, graph {got}")
    sec = _read_sections(data, header)
    o = _shell(header["variant"], g, header["params"])
    if o.g.n != header["n"]:
        raise ContainerError("working graph size does not match the container")
    o.h = _load_hierarchy(sec, header["k"])
    o.bt = BunchTable(o.g.n)
    for i in header["bunch_levels"]:
        o.bt.add_level(_load_clusters(sec, i))
    for name, info in header["tables"].items():
        o.tables[name] = _load_table(sec, name, o.g.n, info["full"])
    derive = getattr(o, "_derive", None)
    if derive is not None:
        derive()
    return o


def load_oracle(path, g: Graph):
    with open(path, "rb") as fh:
        return deserialize(fh.read(), g)


def peek(path) -> dict:
    """Header of a container file without loading its sections."""
    with open(path, "rb") as fh:
        start = fh.read(12)
        if start[:8] != MAGIC:
            raise ContainerError("not an oracle container (bad magic)")
        (hlen,) = struct.unpack("<I", start[8:])
        return read_header(start + fh.read(hlen))


def build_oracle(g: Graph, tag: str, k: Optional[int] = None, c=None, t: Optional[int] = None, seed=0,
                 mode: str = "geometric"):
    """Dispatch a variant tag to its builder."""
    from .balls import build_near, default_c
    from .borderline import build_borderline
    from .midpoint import build_midpoint
    from .tz import ParameterError, build_tz

    tag = tag.lower()
    if tag == "tz":
        return build_tz(g, 3 if k is None else k, seed, mode)
    if tag in BORDERLINE_TAGS:
        var = tag[-1].upper()
        if k is None:
            k = {"A": 5, "B": 4, "C": 3}[var]
        return build_borderline(g, k, 1 if c is None else int(c), var, seed)
    if tag in MIDPOINT_TAGS:
        return build_midpoint(g, tag, k, seed)
    if tag in NEAR_TAGS:
        t = 2 if t is None else t
        c = default_c(tag, t) if c is None else float(c)
        return build_near(g, tag, c, t=t, seed=seed)
    raise ParameterError(f"unknown variant {tag!r}; expected one of {', '.join(ALL_TAGS)}")
