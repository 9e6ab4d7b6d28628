"""Command-line front end: gen, build, query, verify, npsp, ansc, stats."""
from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from . import apps
from .balls import NearOracle, ceil_div
from .borderline import BorderlineOracle
from .container import ALL_TAGS, ContainerError, build_oracle, load_oracle, peek, save_oracle
from .exact import apsp, shortest_cycles
from .graph import INF, GraphError, format_edge_list, load_graph, random_graph, walk_length
from .midpoint import MidpointOracle
from .tz import ParameterError, TZOracle


# ---------------------------------------------------------------------------
# bounds


def bound_function(o, t=None):
    """``(label, f)`` where ``f(d)`` is the variant's guaranteed upper bound."""
    if isinstance(o, TZOracle):
        s = 2 * o.params["k"] - 1
        return f"{s}d", lambda d: s * d
    if isinstance(o, BorderlineOracle):
        s = o.stretch()
        return f"{s}d", lambda d: s * d
    if isinstance(o, MidpointOracle):
        labels = {"Q3": "3d+2_ODD", "Q4": "4d+3_ODD", "Q4wide": "3d+2+2_ODD"}
        label = labels.get(o.variant) or f"{2 * o.params['k'] - 5}d+4+2_ODD"
        return label, o.bound
    if isinstance(o, NearOracle):
        t = o.params["t"] if t is None else t
        labels = {"U-AV": f"d+2ceil(d/{2 * t})", "U-AA": f"d+2ceil(d/{t})+2",
                  "W-AA": f"(1+2/{t})d", "W-AV": f"(1+1/{t})d"}
        return labels[o.variant], lambda d: o.bound(d, t)
    raise TypeError(type(o).__name__)


def size_references(o) -> dict:
    """Theoretical size scales for the built parameters."""
    n = o.base.n
    out = {}
    k = o.params.get("k")
    if k:
        out["n^(1+1/k)"] = n ** (1 + 1 / k)
    c = o.params.get("c")
    if isinstance(o, NearOracle):
        key = "n^(2-c)" if o.variant.endswith("AV") else "n^(2-2c)"
        out[key] = n ** (2 - c) if o.variant.endswith("AV") else n ** (2 - 2 * c)
    return out


# ---------------------------------------------------------------------------
# verify


@dataclass
class VerifyReport:
    variant: str
    bound: str
    pairs: int = 0
    violations: int = 0
    below_exact: int = 0
    witness_mismatches: int = 0
    max_stretch: float = 1.0
    max_additive: float = 0.0
    max_slack: float = -INF  # estimate minus bound, <= 0 on passing runs
    load_seconds: float = 0.0
    exact_seconds: float = 0.0
    query_seconds: float = 0.0
    sizes: dict = field(default_factory=dict)
    references: dict = field(default_factory=dict)
    examples: list = field(default_factory=list)  # first few violating pairs

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.below_exact == 0 and self.witness_mismatches == 0

    def as_dict(self) -> dict:
        out = asdict(self)
        out["ok"] = self.ok
        if out["max_slack"] == -INF:
            out["max_slack"] = None
        return out

    def text(self) -> str:
        rows = [("variant", self.variant), ("bound", self.bound), ("pairs", self.pairs),
                ("violations", self.violations), ("below exact", self.below_exact),
                ("witness mismatches", self.witness_mismatches),
                ("max stretch", f"{self.max_stretch:.4f}"), ("max additive", self.max_additive),
                ("max slack vs bound", "n/a" if self.max_slack == -INF else f"{self.max_slack:.4g}"),
                ("load s", f"{self.load_seconds:.3f}"), ("exact s", f"{self.exact_seconds:.3f}"),
                ("query s", f"{self.query_seconds:.3f}")]
        for key, val in self.sizes.items():
            rows.append((f"size {key}", val))
        for key, val in self.references.items():
            rows.append((f"ref {key}", f"{val:.0f}"))
        lines = [f"{k:<20}{v}" for k, v in rows]
        for u, v, d, est in self.examples:
            lines.append(f"VIOLATION {u} {v} exact={d} estimate={est}")
        lines.append("PASS" if self.ok else "FAIL")
        return "\n".join(lines)


def _evaluate(o, pairs, exact, f, t, check_witness):
    """Per pair ``(u, v, d, estimate, witness_ok)``."""
    out = []
    for u, v in pairs:
        rep = o.query(u, v) if t is None else o.query(u, v, t)
        d = exact[u, v]
        wok = True
        if check_witness and rep.value != INF:
            wok = walk_length(o.base, rep.witness) == rep.value and rep.witness[0] == u and rep.witness[-1] == v
        out.append((u, v, d, rep.value, wok))
    return out


def verify(o, pairs, threads: int = 1, t=None, check_witness: bool = True, exact=None) -> tuple:
    """Check every pair against exact distances; returns ``(report, rows)``."""
    label, f = bound_function(o, t)
    rep = VerifyReport(o.variant, label, sizes=o.size_report()["tables"], references=size_references(o))
    t0 = time.perf_counter()
    if exact is None:
        exact = apsp(o.base)
    rep.exact_seconds = time.perf_counter() - t0
    qt = t if isinstance(o, NearOracle) else None
    t0 = time.perf_counter()
    threads = max(1, threads)
    if threads == 1:
        rows = _evaluate(o, pairs, exact, f, qt, check_witness)
    else:
        size = max(1, math.ceil(len(pairs) / threads))
        chunks = [pairs[i:i + size] for i in range(0, len(pairs), size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = [r for part in pool.map(lambda c: _evaluate(o, c, exact, f, qt, check_witness), chunks)
                    for r in part]
    rep.query_seconds = time.perf_counter() - t0
    rep.pairs = len(rows)
    for u, v, d, est, wok in rows:
        if not wok:
            rep.witness_mismatches += 1
        if est < d:
            rep.below_exact += 1
        if d == INF:
            if est != INF:
                rep.below_exact += 1
            continue
        b = f(d)
        if est > b:
            rep.violations += 1
            if len(rep.examples) < 10:
                rep.examples.append((u, v, d, est))
        rep.max_slack = max(rep.max_slack, est - b)
        rep.max_additive = max(rep.max_additive, est - d)
        if d > 0:
            rep.max_stretch = max(rep.max_stretch, est / d)
    return rep, rows


# ---------------------------------------------------------------------------
# figures


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_verify(rows, report: VerifyReport, outdir: str) -> list[str]:
    plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    fin = [(d, est) for _, _, d, est, _ in rows if d != INF and d > 0]
    files = []
    fig, ax = plt.subplots(figsize=(5, 4))
    if fin:
        ds = [d for d, _ in fin]
        ax.scatter(ds, [e for _, e in fin], s=6, alpha=0.4, label="estimate")
        top = max(ds)
        ax.plot([0, top], [0, top], color="black", lw=1, label="exact")
    ax.set_xlabel("exact distance")
    ax.set_ylabel("estimate")
    ax.set_title(f"{report.variant}: bound {report.bound}")
    ax.legend()
    path = os.path.join(outdir, "estimate_vs_exact.png")
    fig.savefig(path, dpi=100, bbox_inches="tight")
    plt.close(fig)
    files.append(path)
    fig, ax = plt.subplots(figsize=(5, 4))
    if fin:
        ax.hist([e / d for d, e in fin], bins=30)
    ax.set_xlabel("estimate / exact")
    ax.set_ylabel("pairs")
    path = os.path.join(outdir, "stretch_hist.png")
    fig.savefig(path, dpi=100, bbox_inches="tight")
    plt.close(fig)
    files.append(path)
    return files


def plot_stats(o, outdir: str) -> list[str]:
    plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 4))
    for i in o.bt.levels:
        ax.hist(o.bt.sizes(i), bins=30, alpha=0.5, label=f"level {i}")
    ax.set_xlabel("bunch size")
    ax.set_ylabel("vertices")
    ax.legend()
    path = os.path.join(outdir, "bunch_sizes.png")
    fig.savefig(path, dpi=100, bbox_inches="tight")
    plt.close(fig)
    return [path]


# ---------------------------------------------------------------------------
# io helpers


def read_pairs(path) -> list[tuple[int, int]]:
    out = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if len(toks) != 2:
                raise GraphError(f"{path}:{lineno}: expected 's t'")
            try:
                out.append((int(toks[0]), int(toks[1])))
            except ValueError:
                raise GraphError(f"{path}:{lineno}: expected integers") from None
    return out


def fmt(x) -> str:
    return "inf" if x == INF else str(x)


def _write(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _graph(args):
    return load_graph(args.graph, args.format, args.scale)


def _pair_list(spec: str, n: int, seed: int) -> list[tuple[int, int]]:
    """``all``, ``sample:N`` / a bare integer N, or a pair file."""
    if spec == "all":
        return [(u, v) for u in range(n) for v in range(u + 1, n)]
    num = spec.split(":", 1)[1] if spec.startswith("sample:") else spec
    if num.isdigit():
        rng = random.Random(seed)
        return [(rng.randrange(n), rng.randrange(n)) for _ in range(int(num))]
    return read_pairs(spec)


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args):
    g = random_graph(args.n, args.m, args.wmax, args.seed)
    _write(format_edge_list(g), args.out)
    return 0


def cmd_build(args):
    g = _graph(args)
    o = build_oracle(g, args.variant, args.k, args.c, args.t, args.seed, args.mode)
    save_oracle(o, args.out)
    info = {"variant": o.variant, "params": o.params, "out": args.out}
    if args.json:
        print(json.dumps(info, sort_keys=True))
    else:
        print(f"wrote {args.out} ({o.variant})")
    return 0


def cmd_query(args):
    g = _graph(args)
    o = load_oracle(args.oracle, g)
    if args.pairs:
        pairs = read_pairs(args.pairs)
    elif args.u is not None and args.v is not None:
        pairs = [(args.u, args.v)]
    else:
        raise GraphError("give --pairs FILE or both endpoints")
    rows = []
    for u, v in pairs:
        rep = o.query(u, v)
        rows.append({"u": u, "v": v, "estimate": fmt(rep.value),
                     "witness": rep.witness if args.witness else None})
    if args.json:
        print(json.dumps(rows))
    else:
        for r in rows:
            line = f"{r['u']} {r['v']} {r['estimate']}"
            if args.witness and r["witness"] is not None:
                line += " " + " ".join(map(str, r["witness"]))
            print(line)
    return 0


def cmd_verify(args):
    g = _graph(args)
    t0 = time.perf_counter()
    o = load_oracle(args.oracle, g)
    load = time.perf_counter() - t0
    pairs = _pair_list(args.pairs, g.n, args.seed)
    report, rows = verify(o, pairs, args.threads, args.t, not args.no_witness)
    report.load_seconds = load
    if args.bound_mode == "sound":
        report.violations = 0
        report.examples = []
    text = report.text()
    if args.json:
        print(json.dumps(report.as_dict(), sort_keys=True))
    else:
        print(text)
    if args.report:
        os.makedirs(args.report, exist_ok=True)
        with open(os.path.join(args.report, "verify.json"), "w") as fh:
            json.dump(report.as_dict(), fh, sort_keys=True, indent=1)
        with open(os.path.join(args.report, "verify.txt"), "w") as fh:
            fh.write(text + "\n")
        plot_verify(rows, report, args.report)
    return 0 if report.ok else 1


def cmd_npsp(args):
    g = _graph(args)
    pairs = read_pairs(args.pairs)
    if args.mode == "additive":
        reps = apps.npsp_additive(g, pairs, args.k, args.seed)
    else:
        reps = apps.npsp_spanner(g, pairs, args.k, args.seed)
    if args.json:
        text = json.dumps([{"u": u, "v": v, "estimate": fmt(r.value)} for (u, v), r in zip(pairs, reps)]) + "\n"
    else:
        text = "".join(f"{fmt(r.value)}\n" for r in reps)
    _write(text, args.out)
    return 0


def ansc_bound(sc, k: int, weighted: bool):
    if sc == INF:
        return INF
    if weighted:
        return sc + sc / (k - 1)
    return sc + 2 * ceil_div(sc, 2 * (k - 1))


def cmd_ansc(args):
    g = _graph(args)
    est = apps.ansc(g, args.k, args.mode, args.seed)
    rows = []
    ok = True
    sc = shortest_cycles(g) if args.exact else None
    for u, val in enumerate(est.values):
        row = {"u": u, "value": fmt(val)}
        if sc is not None:
            b = ansc_bound(sc[u], args.k, g.weighted)
            good = (sc[u] == INF and val == INF) or (sc[u] <= val <= b)
            ok &= good
            row.update(exact=fmt(sc[u]), bound=fmt(b), ok=good)
        rows.append(row)
    if args.json:
        text = json.dumps(rows) + "\n"
    elif sc is None:
        text = "".join(f"{r['u']} {r['value']}\n" for r in rows)
    else:
        text = "".join(f"{r['u']} {r['exact']} ≤ {r['value']} ≤ {r['bound']} {'pass' if r['ok'] else 'FAIL'}\n"
                       for r in rows)
    _write(text, args.out)
    return 0 if ok else 1


def cmd_stats(args):
    g = _graph(args)
    if args.oracle:
        o = load_oracle(args.oracle, g)
    else:
        o = build_oracle(g, args.variant, args.k, args.c, args.t, args.seed, args.mode)
    info = o.size_report()
    info["variant"] = o.variant
    info["params"] = o.params
    info["references"] = size_references(o)
    if args.oracle:
        info["header"] = {k: v for k, v in peek(args.oracle).items() if k != "sections"}
    if args.json:
        print(json.dumps(info, sort_keys=True, default=str))
    else:
        for key in sorted(info):
            print(f"{key:<12}{info[key]}")
    if args.report:
        os.makedirs(args.report, exist_ok=True)
        with open(os.path.join(args.report, "stats.json"), "w") as fh:
            json.dump(info, fh, sort_keys=True, indent=1, default=str)
        plot_stats(o, args.report)
    return 0


# ---------------------------------------------------------------------------
# parser


def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--threads", type=int, default=1)


def _graph_args(p):
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=("edge-list", "dimacs"), default="edge-list")
    p.add_argument("--scale", type=int, default=1, help="multiply weights by this before rounding check")


def _variant_args(p, required):
    p.add_argument("--variant", required=required, choices=ALL_TAGS, type=str.lower)
    p.add_argument("--k", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--t", type=int)
    p.add_argument("--mode", choices=("geometric", "center-capped"), default="geometric",
                   help="level sampling for tz")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="distoracle", description="approximate distance oracles")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="random simple graph in edge-list format")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--wmax", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build an oracle and write its container")
    _common(p)
    _graph_args(p)
    _variant_args(p, True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="estimates from a stored oracle")
    _common(p)
    _graph_args(p)
    p.add_argument("--oracle", required=True)
    p.add_argument("--pairs")
    p.add_argument("u", type=int, nargs="?")
    p.add_argument("v", type=int, nargs="?")
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("verify", help="check a stored oracle against exact distances")
    _common(p)
    _graph_args(p)
    p.add_argument("--oracle", required=True)
    p.add_argument("--pairs", default="all", help="all, sample:N, N, or a pair file")
    p.add_argument("--bound-mode", choices=("variant", "sound"), default="variant",
                   help="variant: the variant's upper bound; sound: only d <= estimate")
    p.add_argument("--t", type=int, help="query depth for ball-expansion oracles")
    p.add_argument("--no-witness", action="store_true", help="skip witness re-summing")
    p.add_argument("--report", help="directory for verify.json, verify.txt and figures")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("npsp", help="batch of pair distances")
    _common(p)
    _graph_args(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--mode", choices=("additive", "spanner"), default="additive")
    p.add_argument("--out")
    p.set_defaults(func=cmd_npsp)

    p = sub.add_parser("ansc", help="approximate shortest cycle through every vertex")
    _common(p)
    _graph_args(p)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--mode", choices=("unweighted-additive", "weighted-multiplicative"))
    p.add_argument("--exact", action="store_true", help="cross-check against exact cycles")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ansc)

    p = sub.add_parser("stats", help="size report for a stored or freshly built oracle")
    _common(p)
    _graph_args(p)
    p.add_argument("--oracle")
    _variant_args(p, False)
    p.add_argument("--report", help="directory for stats.json and figures")
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    if args.cmd == "stats" and not args.oracle and not args.variant:
        ap.error("stats needs --oracle or --variant")
    try:
        return args.func(args)
    except (GraphError, ParameterError, ContainerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
