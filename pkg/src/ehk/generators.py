"""Seeded graph families: random even-hole-free, chordal, named structures, gadgets."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .errors import InvalidParams
from .graph import Graph, is_chordal
from .structures import detect_c4, find_even_hole, hubs

FAMILIES = ("RandomEHF", "RandomChordal", "NamedStructure", "RandomGraph", "GridOfCliques", "GadgetEHF")

_ALIASES = {
    "ehf": "RandomEHF", "chordal": "RandomChordal", "named": "NamedStructure",
    "random": "RandomGraph", "grid": "GridOfCliques", "gadget": "GadgetEHF",
}


@dataclass(frozen=True)
class GenSpec:
    """Everything needed to reproduce one generated graph."""

    family: str
    n: int = 0
    seed: int = 0
    params: dict = field(default_factory=dict, hash=False)

    def encode(self) -> str:
        items = [f"family={self.family}", f"n={self.n}", f"seed={self.seed}"]
        items += [f"{k}={v}" for k, v in sorted(self.params.items())]
        return ",".join(items)

    @classmethod
    def parse(cls, text: str) -> "GenSpec":
        fields = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise InvalidParams(f"bad GenSpec item {item!r}")
            k, v = item.split("=", 1)
            fields[k.strip()] = v.strip()
        family = fields.pop("family", "")
        family = _ALIASES.get(family, family)
        if family not in FAMILIES:
            raise InvalidParams(f"unknown family in {text!r}")
        n = int(fields.pop("n", 0))
        seed = int(fields.pop("seed", 0))
        params = {k: _number(v) for k, v in fields.items()}
        return cls(family, n, seed, params)


def _number(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def generate(spec: GenSpec) -> Graph:
    p = dict(spec.params)
    fam = _ALIASES.get(spec.family, spec.family)
    if fam == "RandomEHF":
        return gen_random_ehf(spec.n, p.get("p", 0.2), spec.seed)
    if fam == "RandomChordal":
        return gen_random_chordal(spec.n, p.get("density", 0.5), spec.seed, p.get("max_clique"))
    if fam == "RandomGraph":
        return gen_random_graph(spec.n, p.get("p", 0.2), spec.seed)
    if fam == "GridOfCliques":
        return gen_grid_of_cliques(int(p.get("rows", 2)), int(p.get("cols", 2)), int(p.get("size", 2)))
    if fam == "GadgetEHF":
        return gen_ehf_with_gadgets(spec.n, p.get("p", 0.1), spec.seed)
    if fam == "NamedStructure":
        kind = p.pop("kind", "theta")
        return gen_named(kind, **p)
    raise InvalidParams(f"unknown family {spec.family}")


# ---------------------------------------------------------------------------
# random families


def gen_random_graph(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    edges = [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p]
    return Graph(n, edges)


def _repair(n: int, edges: set, rng: random.Random, frozen: frozenset = frozenset()) -> Graph:
    """Delete hole edges until no even hole remains; ``frozen`` edges are kept when possible."""
    while True:
        G = Graph(n, edges)
        w = find_even_hole(G)
        if w is None:
            return G
        h = w.parts["H"]
        ring = [tuple(sorted((h[i], h[(i + 1) % len(h)]))) for i in range(len(h))]
        free = [e for e in ring if e not in frozen]
        edges.discard(rng.choice(free or ring))


def gen_random_ehf(n: int, p: float, seed: int) -> Graph:
    """G(n, p) repaired into an even-hole-free graph by deleting uniformly chosen hole edges."""
    if n > 60:
        raise InvalidParams("gen_random_ehf supports n <= 60")
    rng = random.Random(seed)
    edges = {(u, v) for u, v in combinations(range(n), 2) if rng.random() < p}
    return _repair(n, edges, rng)


def gen_random_chordal(n: int, density: float, seed: int, max_clique: Optional[int] = None) -> Graph:
    """Chordal graph grown by attaching each new vertex to a clique of the current graph.

    The new vertex picks a random anchor and a random sub-clique of the anchor's
    neighbourhood (each candidate kept with probability ``density``), so the
    reverse insertion order is a perfect elimination ordering.  ``density=0``
    gives a tree.
    """
    rng = random.Random(seed)
    adj = [set() for _ in range(n)]
    order = list(range(n))
    rng.shuffle(order)
    for idx in range(1, n):
        v = order[idx]
        u = order[rng.randrange(idx)]
        K = [u]
        cand = sorted(adj[u])
        rng.shuffle(cand)
        for c in cand:
            if max_clique is not None and len(K) + 1 >= max_clique:
                break
            if rng.random() < density and all(c in adj[k] for k in K):
                K.append(c)
        for k in K:
            adj[v].add(k)
            adj[k].add(v)
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    G = Graph(n, edges)
    assert is_chordal(G)
    return G


def gen_grid_of_cliques(rows: int, cols: int, size: int) -> Graph:
    """A rows x cols grid whose cells are cliques of ``size``; neighbouring cells are complete to each other."""
    if min(rows, cols, size) < 1:
        raise InvalidParams("grid dimensions must be positive")
    cell = {}
    nxt = 0
    for r in range(rows):
        for c in range(cols):
            cell[r, c] = list(range(nxt, nxt + size))
            nxt += size
    edges = set()
    for (r, c), vs in cell.items():
        edges.update(combinations(vs, 2))
        for rr, cc in ((r + 1, c), (r, c + 1)):
            if (rr, cc) in cell:
                edges.update((u, v) for u in vs for v in cell[rr, cc])
    return Graph(nxt, edges)


# ---------------------------------------------------------------------------
# named structures


class _Builder:
    def __init__(self):
        self.n = 0
        self.edges = set()

    def new(self) -> int:
        self.n += 1
        return self.n - 1

    def edge(self, u, v):
        self.edges.add((min(u, v), max(u, v)))

    def path(self, start, end, length):
        """Join start to end by a path of ``length`` edges; returns its vertices."""
        vs = [start] + [self.new() for _ in range(length - 1)] + [end]
        for a, b in zip(vs, vs[1:]):
            self.edge(a, b)
        return vs

    def graph(self) -> Graph:
        return Graph(self.n, self.edges)


def _lengths(params, default):
    raw = params.get("lengths", default)
    if isinstance(raw, str):
        raw = raw.replace("/", "-").split("-")
    ls = tuple(int(x) for x in raw)
    if len(ls) != 3:
        raise InvalidParams("three path lengths required")
    return ls


def _theta(lengths):
    if min(lengths) < 2:
        raise InvalidParams("theta paths need length at least 2")
    B = _Builder()
    a, b = B.new(), B.new()
    for l in lengths:
        B.path(a, b, l)
    return B


def _prism(lengths):
    """Two triangles joined by three paths; lengths[0] == 0 makes the triangles share a vertex."""
    l1, l2, l3 = lengths
    B = _Builder()
    if l1 == 0:
        if min(l2, l3) < 2:
            raise InvalidParams("near-prism paths next to the shared vertex need length at least 2")
        c = B.new()
        a2, a3, b2, b3 = B.new(), B.new(), B.new(), B.new()
        for x, y in ((c, a2), (c, a3), (a2, a3), (c, b2), (c, b3), (b2, b3)):
            B.edge(x, y)
        paths = [[c], B.path(a2, b2, l2), B.path(a3, b3, l3)]
        return B, paths
    if min(lengths) < 1:
        raise InvalidParams("prism paths need length at least 1")
    A = [B.new() for _ in range(3)]
    C = [B.new() for _ in range(3)]
    for T in (A, C):
        for x, y in combinations(T, 2):
            B.edge(x, y)
    paths = [B.path(A[i], C[i], lengths[i]) for i in range(3)]
    return B, paths


def _pyramid(lengths):
    if min(lengths) < 1 or sum(1 for l in lengths if l == 1) > 1:
        raise InvalidParams("pyramid paths need length >= 1 with at most one of length 1")
    B = _Builder()
    a = B.new()
    base = [B.new() for _ in range(3)]
    for x, y in combinations(base, 2):
        B.edge(x, y)
    paths = [B.path(a, base[i], lengths[i]) for i in range(3)]
    return B, a, base, paths


def gen_named(kind: str, **params) -> Graph:
    """Build a named structure.

    kinds and parameters:
      theta(lengths=(l1,l2,l3))            each length >= 2
      prism(lengths)                        each >= 1
      near_prism(lengths=(0,l2,l3))         shared triangle vertex; l2,l3 >= 2
      pyramid(lengths)                      >= 1, at most one equal to 1
      hole(length)                          >= 4
      wheel(length, neighbors)              centre adjacent to the listed hole positions
      loaded_pyramid(l1, l3, k, attach)     P2 = apex-b2 edge, attachment path of k vertices
                                            whose last vertex sees the P1 positions in ``attach``
      extended_near_prism(lengths, cross=((i, s), (j, t)))
                                            prism or near-prism plus an edge between the s-th
                                            vertex of path i and the t-th vertex of path j
    """
    kind = kind.lower().replace("-", "_")
    if kind == "theta":
        return _theta(_lengths(params, (2, 2, 2))).graph()
    if kind == "prism":
        B, _ = _prism(_lengths(params, (1, 1, 1)))
        return B.graph()
    if kind == "near_prism":
        ls = _lengths(params, (0, 2, 2))
        B, _ = _prism(ls)
        return B.graph()
    if kind == "pyramid":
        B, *_ = _pyramid(_lengths(params, (1, 2, 2)))
        return B.graph()
    if kind == "hole":
        L = int(params.get("length", 5))
        if L < 4:
            raise InvalidParams("hole length must be at least 4")
        return Graph(L, [(i, (i + 1) % L) for i in range(L)])
    if kind == "wheel":
        L = int(params.get("length", 7))
        nb = sorted(set(int(v) for v in params.get("neighbors", (0, 2, 4))))
        if L < 4 or len(nb) < 3 or nb[0] < 0 or nb[-1] >= L:
            raise InvalidParams("wheel needs a hole of length >= 4 and >= 3 valid neighbours")
        edges = [(i, (i + 1) % L) for i in range(L)] + [(L, v) for v in nb]
        return Graph(L + 1, edges)
    if kind == "loaded_pyramid":
        attach = params.get("attach", 1)
        attach = (attach,) if isinstance(attach, int) else tuple(attach)
        return _loaded(int(params.get("l1", 3)), int(params.get("l3", 3)),
                       int(params.get("k", 1)), attach).graph()
    if kind == "extended_near_prism":
        ls = _lengths(params, (3, 3, 3))
        (i, s), (j, t) = params.get("cross", ((0, 1), (1, 1)))
        B, paths = _prism(ls)
        if i == j or not (0 < s < len(paths[i]) - 1) or not (0 < t < len(paths[j]) - 1):
            raise InvalidParams("cross-edge must join interior vertices of two different paths")
        B.edge(paths[i][s], paths[j][t])
        return B.graph()
    raise InvalidParams(f"unknown structure kind {kind!r}")


def _loaded(l1, l3, k, attach):
    if l1 < 2 or l3 < 2 or k < 1 or not attach or not all(1 <= t < l1 for t in attach):
        raise InvalidParams("loaded pyramid needs l1, l3 >= 2, k >= 1 and attachments inside P1")
    B, a, base, paths = _pyramid((l1, 1, l3))
    P1 = paths[0]
    P = [B.new() for _ in range(k)]
    for x, y in zip(P, P[1:]):
        B.edge(x, y)
    B.edge(P[0], base[1])
    for t in attach:
        B.edge(P[-1], P1[t])
    return B


# ---------------------------------------------------------------------------
# gadget-seeded even-hole-free graphs


def _odd_wheel_gadget():
    """C9 with a centre on positions 0, 3, 6: a proper wheel whose holes are all odd."""
    return gen_named("wheel", length=9, neighbors=(0, 3, 6)), 9


def _loaded_gadget():
    """An even-hole-free loaded pyramid.

    A single attachment on P1 always closes one even hole through b2 (the two
    holes it creates have lengths summing to l1 plus an even number), so the
    last path vertex sees two consecutive vertices of P1.
    """
    G = gen_named("loaded_pyramid", l1=3, l3=3, k=2, attach=(1, 2))
    assert find_even_hole(G) is None
    return G, 2   # b2 is vertex 2


def gen_ehf_with_gadgets(n: int, p: float, seed: int, gadgets: int = 2) -> Graph:
    """Even-hole-free graph seeded with hub gadgets (odd proper wheels, loaded pyramids).

    Gadgets are kept induced; random edges are added between gadgets and the
    remaining vertices, and even holes are repaired by deleting non-gadget edges.
    """
    rng = random.Random(seed)
    choices = [_odd_wheel_gadget(), _loaded_gadget()]
    edges = set()
    frozen = set()
    inside = {}
    nxt = 0
    offset = rng.randrange(len(choices))
    for g in range(gadgets):
        H, _ = choices[(g + offset) % len(choices)]
        if nxt + H.n > n:
            break
        for u, v in H.edges():
            e = (u + nxt, v + nxt)
            edges.add(e)
            frozen.add(e)
        for v in H.vertices:
            inside[v + nxt] = g
        nxt += H.n
    for u, v in combinations(range(n), 2):
        if u in inside and v in inside and inside[u] == inside[v]:
            continue
        if rng.random() < p:
            edges.add((u, v))
    return _repair(n, edges, rng, frozenset(frozen))


# ---------------------------------------------------------------------------
# breaker instances


@dataclass
class BreakerInstance:
    G: Graph
    X: frozenset
    parts: tuple
    b: int
    cut: frozenset


def gen_breaker_instance(seed: int, max_n: int = 40) -> BreakerInstance:
    """A C4-free graph where one clique separates b from every attachment branch.

    b sits on a random tree; a clique K is attached to it; every x in X hangs
    off its own branch behind K, so every partitioned triple is b-separated by
    K (type 1).
    """
    rng = random.Random(seed)
    while True:
        B = _Builder()
        b = B.new()
        tree = [b]
        for _ in range(rng.randint(0, 5)):
            v = B.new()
            B.edge(v, rng.choice(tree))
            tree.append(v)
        c = rng.choice(tree)
        K = [B.new() for _ in range(rng.randint(1, 3))]
        for x, y in combinations(K, 2):
            B.edge(x, y)
        hub = rng.choice(K)
        B.path(c, hub, rng.randint(1, 3))
        m = rng.randint(1, 3)
        parts = ([], [], [])
        for i in range(3):
            for _ in range(m):
                root = rng.choice(K)
                branch = [root]
                for _ in range(rng.randint(0, 3)):
                    v = B.new()
                    B.edge(v, branch[-1])
                    branch.append(v)
                x = B.new()
                B.edge(x, branch[-1])
                # an occasional chord back along the branch makes an odd hole
                if len(branch) >= 4 and rng.random() < 0.3:
                    B.edge(x, branch[-4])
                parts[i].append(x)
        if B.n > max_n:
            continue
        G = B.graph()
        if detect_c4(G) is not None:
            continue
        X = frozenset(v for part in parts for v in part)
        return BreakerInstance(G, X, tuple(tuple(p) for p in parts), b, frozenset(K))


@dataclass(frozen=True)
class FanInstance:
    G: Graph
    a: int
    b: int


def gen_fan_instance(seed: int, n_attach: int = 12, tree_size: int = 20, max_n: int = 40) -> FanInstance:
    """A C4-free graph where a sees many hub-free attachments of a tree holding b.

    D is a random tree containing b; every neighbour of a hangs off its own
    vertex of D (never b or a neighbour of b), occasionally also seeing a
    second, adjacent tree vertex.  N(a) is stable, so no neighbour of a is
    a hub and the neighbourhood is too spread out for a single clique.
    """
    rng = random.Random(seed)
    if n_attach + tree_size + 1 > max_n:
        raise InvalidParams("instance would exceed max_n")
    while True:
        B = _Builder()
        b = B.new()
        tree = [b]
        parent = {b: None}
        for _ in range(tree_size - 1):
            v = B.new()
            p = rng.choice(tree)
            B.edge(v, p)
            parent[v] = p
            tree.append(v)
        hosts = [v for v in tree if v != b and parent[v] != b]
        if len(hosts) < n_attach:
            continue
        a = B.new()
        for h in rng.sample(hosts, n_attach):
            x = B.new()
            B.edge(a, x)
            B.edge(x, h)
            if rng.random() < 0.25 and parent[h] not in (None, b):
                B.edge(x, parent[h])
        G = B.graph()
        if detect_c4(G) is None and not (G.neighbors(a) & hubs(G)):
            return FanInstance(G, a, b)
