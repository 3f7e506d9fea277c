"""Command line front end.  Every command prints key=value report lines; exit 0 iff all checks verified."""

from __future__ import annotations

import argparse
import hashlib
import os
import statistics
import sys
import time
from typing import Optional

from .decomposition import build_tree_decomposition, read_decomposition, validate_decomposition, write_decomposition
from .errors import EhkError, ParseError
from .generators import GenSpec, generate
from .graph import Graph, read_graph, separates, write_graph
from .solvers import WeightedGraph, k_coloring, max_weight_clique, mwis, read_weights
from .structures import (detect_c4, detect_loaded_pyramid, detect_prism, detect_pyramid, detect_theta,
                         enumerate_wheels, find_even_hole, hubs, in_class_C)


class UsageError(Exception):
    pass


class Report:
    def __init__(self, argv, out):
        self.out = out
        self.ok = True
        self.t0 = time.perf_counter()
        self.line("command", " ".join(argv))

    def line(self, key, value):
        if isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, dict):
            value = ",".join(f"{k}:{v}" for k, v in value.items())
        print(f"{key}={value}", file=self.out)

    def fields(self, d: dict, prefix: str = ""):
        for k, v in d.items():
            self.line(prefix + k, v)

    def check(self, key, value: bool):
        self.line(key, bool(value))
        self.ok = self.ok and bool(value)

    def timing(self, stage, start):
        self.line(f"time_{stage}", f"{time.perf_counter() - start:.3f}")


def _hash(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:16]


def _load(rep: Report, path) -> Graph:
    G = read_graph(path)
    rep.line("input_hash", _hash(path))
    rep.line("n", G.n)
    rep.line("m", G.m)
    return G


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args, rep: Report):
    params = dict(p.split("=", 1) for p in args.param)
    if args.p is not None:
        params["p"] = args.p
    text = ",".join([f"family={args.family}", f"n={args.n}", f"seed={args.seed}"] +
                    [f"{k}={v}" for k, v in sorted(params.items())])
    spec = GenSpec.parse(text)
    rep.line("seed", args.seed)
    rep.line("spec", spec.encode())
    G = generate(spec)
    write_graph(G, args.output)
    rep.line("output", args.output)
    rep.line("n", G.n)
    rep.line("m", G.m)
    rep.line("output_hash", _hash(args.output))


DETECTORS = {
    "c4": lambda G: detect_c4(G),
    "even-hole": lambda G: find_even_hole(G),
    "theta": lambda G: detect_theta(G),
    "prism": lambda G: detect_prism(G),
    "pyramid": lambda G: detect_pyramid(G),
    "loaded-pyramid": lambda G: detect_loaded_pyramid(G),
}


def cmd_detect(args, rep: Report):
    G = _load(rep, args.graph)
    kinds = list(DETECTORS) + ["wheel", "hubs"] if args.what == "all" else [args.what]
    for kind in kinds:
        start = time.perf_counter()
        try:
            if kind == "wheel":
                ws = enumerate_wheels(G)
                rep.line("wheel", len(ws) > 0)
                for i, (w, c) in enumerate(ws[:args.max_witnesses]):
                    rep.line(f"wheel_{i}", f"{w.describe()} proper={c.is_proper} universal={c.is_universal} "
                                           f"even={c.is_even}".replace("True", "true").replace("False", "false"))
            elif kind == "hubs":
                rep.line("hubs", " ".join(map(str, sorted(hubs(G)))))
            else:
                w = DETECTORS[kind](G)
                rep.line(kind, w is not None)
                if w is not None:
                    rep.line(f"{kind}_witness", w.describe())
        except EhkError as e:
            rep.line(kind, "unknown")
            rep.line(f"{kind}_error", f"{type(e).__name__}: {e}")
        rep.timing(kind, start)


def cmd_class(args, rep: Report):
    G = _load(rep, args.graph)
    start = time.perf_counter()
    w = find_even_hole(G)
    rep.line("EHF", w is None)
    if w is not None:
        rep.line("even_hole", w.describe())
    inc, wit = in_class_C(G)
    rep.line("class_C", inc)
    if wit is not None:
        rep.line("class_C_witness", wit.describe())
    rep.timing("class", start)


def _pair(args, G: Graph):
    if args.a is None or args.b is None:
        raise UsageError("--a and --b are required")
    for v in (args.a, args.b):
        if v not in G:
            raise UsageError(f"{v} is not a vertex")
    return args.a, args.b


def _emit_separator(rep: Report, G: Graph, res, report_path: Optional[str]):
    rec = res.record()
    rep.fields({k: v for k, v in rec.items() if k != "verified"})
    rep.check("verified", res.verified and separates(G, res.vertices, res.a, res.b))
    if res.trace:
        rep.line("trace", ";".join(",".join(f"{k}:{v}" for k, v in e.items()) for e in res.trace))
    if report_path:
        with open(report_path, "w") as fh:
            for k, v in rec.items():
                fh.write(f"{k}={str(v).lower() if isinstance(v, bool) else v}\n")
            for i, e in enumerate(res.trace):
                fh.write(f"trace_{i}=" + ",".join(f"{k}:{v}" for k, v in e.items()) + "\n")


def cmd_separate(args, rep: Report):
    from .separation.banana import ab_separator
    G = _load(rep, args.graph)
    a, b = _pair(args, G)
    start = time.perf_counter()
    res = ab_separator(G, a, b, f=args.f, eps=args.eps, route=args.route)
    rep.timing("separate", start)
    _emit_separator(rep, G, res, args.report)


def cmd_hubfree(args, rep: Report):
    from .separation.hubfree import ab_separator_hubfree
    G = _load(rep, args.graph)
    a, b = _pair(args, G)
    start = time.perf_counter()
    res = ab_separator_hubfree(G, a, b, eps=args.eps)
    rep.timing("separate", start)
    _emit_separator(rep, G, res, args.report)


def cmd_decompose(args, rep: Report):
    G = _load(rep, args.graph)
    start = time.perf_counter()
    T, info = build_tree_decomposition(G, refine=not args.raw)
    rep.timing("decompose", start)
    v = validate_decomposition(G, T)
    write_decomposition(T, args.output)
    rep.line("output", args.output)
    rep.line("bags", len(T.bags))
    rep.line("width", T.width)
    rep.line("max_bag_alpha", T.max_alpha)
    rep.line("raw_max_bag_alpha", info.raw_max_alpha)
    rep.line("max_separator_alpha", info.max_separator_alpha)
    rep.line("lemma_bound", info.lemma_bound)
    rep.check("lemma_holds", info.lemma_holds)
    rep.check("valid", v.ok)


def cmd_validate(args, rep: Report):
    G = _load(rep, args.graph)
    T = read_decomposition(args.decomposition)
    v = validate_decomposition(G, T)
    rep.line("bags", len(T.bags))
    rep.line("width", v.width)
    if v.ok:
        rep.line("max_bag_alpha", v.max_alpha)
    else:
        rep.line("violation", v.violation)
    rep.check("valid", v.ok)


def cmd_solve(args, rep: Report):
    G = _load(rep, args.graph)
    weights = read_weights(args.weights) if args.weights else {}
    WG = WeightedGraph(G, weights)
    rep.line("problem", args.problem)
    start = time.perf_counter()
    if args.problem == "maxclique":
        val, C = max_weight_clique(WG)
        rep.line("weight", val)
        rep.line("clique", " ".join(map(str, sorted(C))))
        rep.check("verified", G.is_clique_mask(G.mask(C)) and WG.total(C) == val)
        rep.timing("solve", start)
        return
    T = read_decomposition(args.decomposition) if args.decomposition else build_tree_decomposition(G)[0]
    if args.problem == "mwis":
        val, S = mwis(WG, T)
        rep.line("weight", val)
        rep.line("set", " ".join(map(str, sorted(S))))
        rep.check("verified", G.is_stable_mask(G.mask(S)) and WG.total(S) == val)
    else:
        if args.k is None:
            raise UsageError("kcolor needs --k")
        col = k_coloring(G, args.k, T)
        rep.line("colourable", col is not None)
        if col is not None:
            rep.line("colouring", " ".join(f"{v}:{c}" for v, c in sorted(col.items())))
            rep.check("verified", all(col[u] != col[v] for u, v in G.edges()))
    rep.timing("solve", start)


# ---------------------------------------------------------------------------
# sweep


SWEEP_FIELDS = ("family", "n", "seed", "m", "ehf", "a", "b", "kappa", "exact_kappa", "ratio", "separates",
                "hubfree", "hubfree_kappa", "valid", "max_bag_alpha", "lemma", "mwis_ok")


def _sweep_instance(family: str, n: int, seed: int) -> dict:
    import random
    from .separation.banana import ab_separator
    from .separation.hubfree import ab_separator_hubfree
    from .separation.separators import exact_min_clique_separator
    from .errors import HubPrecondition
    G = generate(GenSpec.parse(f"family={family},n={n},seed={seed}"))
    row = {"family": family, "n": G.n, "seed": seed, "m": G.m}
    try:
        row["ehf"] = find_even_hole(G) is None
    except EhkError:
        row["ehf"] = "unknown"
    rng = random.Random(seed)
    pairs = [(u, v) for u in G.vertices for v in G.vertices if u < v and not G.has_edge(u, v)]
    if pairs:
        a, b = rng.choice(pairs)
        res = ab_separator(G, a, b)
        row.update(a=a, b=b, kappa=res.kappa, separates=res.verified and separates(G, res.vertices, a, b))
        if G.n <= 18:
            ex = exact_min_clique_separator(G, a, b).separator.kappa_certified
            row["exact_kappa"] = ex
            row["ratio"] = round(res.kappa / ex, 3) if ex else 1.0
        try:
            hf = ab_separator_hubfree(G, a, b)
            row["hubfree"] = hf.verified and separates(G, hf.vertices, a, b)
            row["hubfree_kappa"] = hf.kappa
        except HubPrecondition:
            row["hubfree"] = "n/a"
    T, info = build_tree_decomposition(G)
    row["valid"] = validate_decomposition(G, T).ok
    row["max_bag_alpha"] = T.max_alpha
    row["lemma"] = info.lemma_holds
    if G.n <= 18:
        WG = WeightedGraph(G, {v: (v * 7 + seed) % 5 for v in G.vertices})
        val, S = mwis(WG, T)
        best = 0
        for m in range(1 << G.n):
            if G.is_stable_mask(m):
                best = max(best, WG.total(v for v in G.vertices if (m >> v) & 1))
        row["mwis_ok"] = best == val
    return row


def _row_ok(row: dict) -> bool:
    return all(row.get(k) is not False for k in ("separates", "hubfree", "valid", "lemma", "mwis_ok"))


def _figures(rows: list, out_dir: str, prefix: str) -> list:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from .separation.constants import THEORY

    os.makedirs(out_dir, exist_ok=True)
    sizes = sorted({r["n"] for r in rows})
    paths = []
    fig, ax = plt.subplots(figsize=(5, 3.5))
    med = [statistics.median(r["max_bag_alpha"] for r in rows if r["n"] == n) for n in sizes]
    ax.scatter([r["n"] for r in rows], [r["max_bag_alpha"] for r in rows], s=12, alpha=0.5, label="instances")
    ax.plot(sizes, med, marker="o", label="median")
    ax.set_xlabel("n")
    ax.set_ylabel("max bag alpha")
    ax.legend()
    fig.tight_layout()
    p = os.path.join(out_dir, f"{prefix}alpha.png")
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ks = [(r["n"], r["kappa"]) for r in rows if "kappa" in r]
    if ks:
        ax.scatter(*zip(*ks), s=12, alpha=0.5, label="kappa(Z)")
    ax.plot(sizes, [THEORY.hubfree_bound(n) for n in sizes], linestyle="--", label="D log n")
    ax.set_yscale("symlog", linthresh=1)
    ax.set_xlabel("n")
    ax.set_ylabel("separator kappa")
    ax.legend()
    fig.tight_layout()
    p = os.path.join(out_dir, f"{prefix}kappa.png")
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)
    return paths


def cmd_sweep(args, rep: Report):
    sizes = [int(x) for x in args.sizes.split(",") if x]
    rep.line("seed", args.seed)
    rows = []
    start = time.perf_counter()
    for n in sizes:
        for s in range(args.seed, args.seed + args.count):
            rows.append(_sweep_instance(args.family, n, s))
    rep.timing("sweep", start)
    sep = "\t" if args.delimiter == "tab" else ","
    table = [sep.join(SWEEP_FIELDS)]
    for r in rows:
        table.append(sep.join(str(r.get(k, "")).lower() if isinstance(r.get(k), bool) else str(r.get(k, ""))
                              for k in SWEEP_FIELDS))
    if args.table:
        with open(args.table, "w") as fh:
            fh.write("\n".join(table) + "\n")
        rep.line("table", args.table)
    else:
        for line in table:
            print(line, file=rep.out)
    for n in sizes:
        sub = [r for r in rows if r["n"] == n]
        if not sub:
            continue
        rep.line(f"n{n}_instances", len(sub))
        rep.line(f"n{n}_median_max_bag_alpha", statistics.median(r["max_bag_alpha"] for r in sub))
        rep.line(f"n{n}_separation_rate", f"{sum(r.get('separates') is True for r in sub)}/{len(sub)}")
        ratios = [r["ratio"] for r in sub if "ratio" in r]
        if ratios:
            rep.line(f"n{n}_max_kappa_ratio", max(ratios))
    if args.figures:
        for p in _figures(rows, args.figures, f"{args.family}_"):
            rep.line("figure", p)
    rep.check("verified", all(_row_ok(r) for r in rows))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ehk", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="write a generated graph")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float)
    p.add_argument("--param", action="append", default=[], help="extra key=value generator parameter")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("detect", help="look for forbidden structures")
    p.add_argument("graph")
    p.add_argument("--what", default="all", choices=["all", "wheel", "hubs"] + list(DETECTORS))
    p.add_argument("--max-witnesses", type=int, default=5)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("class", help="even-hole-freeness and membership in the C4/theta/prism/even-wheel-free class")
    p.add_argument("graph")
    p.set_defaults(func=cmd_class)

    for name, func, help_ in (("separate", cmd_separate, "a-b separator for even-hole-free graphs"),
                              ("hubfree-separate", cmd_hubfree, "a-b separator when N(a) has no hubs")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("graph")
        p.add_argument("--a", type=int)
        p.add_argument("--b", type=int)
        p.add_argument("--eps", type=str, default=None, help="kill fraction, e.g. 1/5 (default: pipeline constant)")
        p.add_argument("--report", help="also write the report record to this file")
        if name == "separate":
            p.add_argument("--route", choices=["menger", "induction"], default="menger")
            p.add_argument("--f", type=float, default=None, help="path target factor for the Menger step")
        p.set_defaults(func=func)

    p = sub.add_parser("decompose", help="build a tree decomposition")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--raw", action="store_true", help="skip the triangulation refinement")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("validate", help="check a decomposition against a graph")
    p.add_argument("graph")
    p.add_argument("decomposition")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="exact solvers")
    p.add_argument("problem", choices=["mwis", "kcolor", "maxclique"])
    p.add_argument("graph")
    p.add_argument("decomposition", nargs="?")
    p.add_argument("--weights")
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="seeded corpus run with aggregate table and figures")
    p.add_argument("--family", default="gadget")
    p.add_argument("--sizes", default="12,16,20")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delimiter", choices=["tab", "comma"], default="tab")
    p.add_argument("--table", help="write the per-instance table here instead of stdout")
    p.add_argument("--figures", help="directory for PNG figures")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    rep = Report(argv, out)
    try:
        args.func(args, rep)
    except (UsageError, OSError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EhkError as e:
        rep.line("error", f"{type(e).__name__}: {e}")
        rep.check("verified", False)
        return 1
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
