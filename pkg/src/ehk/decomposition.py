"""Balanced separators of small independence number and the tree decompositions built from them."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

from .errors import LimitExceeded, ParseError
from .graph import (Graph, bits, component_masks, independence_number, maximal_clique_masks,
                    maximum_stable_set, perfect_elimination_order, popcount, separates, to_set)
from .separation.separators import minimal_separators, peel_minimal_separator

BAG_ALPHA_LIMIT = 40


# ---------------------------------------------------------------------------
# weights and balance


def uniform_weight(vertices: Iterable[int]) -> dict:
    vs = sorted(vertices)
    if not vs:
        return {}
    share = Fraction(1, len(vs))
    return {v: share for v in vs}


def is_normal(w: dict) -> bool:
    return all(x >= 0 for x in w.values()) and sum(w.values(), Fraction(0)) == 1


class _Balance:
    """Integer-scaled weights so the balance test avoids Fractions in the inner loop."""

    def __init__(self, G: Graph, w: dict):
        w = {v: Fraction(x) for v, x in w.items() if v in G and x}
        den = math.lcm(*(x.denominator for x in w.values())) if w else 1
        self.G = G
        self.iw = {v: int(x * den) for v, x in w.items()}
        self.total = sum(self.iw.values())
        self.support = G.mask(self.iw)

    def weight(self, m: int) -> int:
        iw = self.iw
        return sum(iw[v] for v in bits(m & self.support))

    def heaviest(self, X: int) -> int:
        best = 0
        for c in component_masks(self.G, self.G.all_mask & ~X):
            if c & self.support:
                best = max(best, self.weight(c))
        return best

    def ok(self, X: int) -> bool:
        return 2 * self.heaviest(X) <= self.total


def is_balanced(G: Graph, X: Iterable[int], w: dict) -> bool:
    """Every component of G - X has weight at most 1/2."""
    return _Balance(G, w).ok(G.mask(X))


def dominated_balanced_separator(G: Graph, w: dict, d_max: int = 3, within: Optional[Iterable[int]] = None):
    """The smallest Y (then lexicographically first) with N[Y] balanced, or None if |Y| would exceed d_max.

    With ``within`` both Y and the separator N[Y] are restricted to that set.
    """
    bal = _Balance(G, w)
    allowed = G.all_mask if within is None else G.mask(within)
    cand = list(bits(allowed))
    for k in range(0, d_max + 1):
        for Y in combinations(cand, k):
            ym = G.mask(Y)
            X = (ym | G.nbhd_mask(ym)) & allowed
            if bal.ok(X):
                return frozenset(Y)
    return None


@dataclass
class BalancedSeparator:
    X: frozenset
    alpha: int
    Y: Optional[frozenset]        # dominating set the search started from (None: started from everything allowed)
    bag_alpha: int = 0            # alpha of X together with the counted boundary
    peel_bag_alpha: int = 0       # the same for the greedy peel alone
    oracle_alpha: Optional[int] = None


def _exact_min_alpha(bal: _Balance, allowed: int, best_alpha: int, best: int, counted: int = 0) -> tuple:
    """Branch and bound for the balanced X inside ``allowed`` minimising alpha(X + counted).

    Supersets of balanced sets stay balanced, so a branch dies as soon as
    taking every undecided vertex is not balanced, or alpha of what is
    already taken reaches the best found.
    """
    G = bal.G
    order = sorted(bits(allowed), key=lambda v: (-popcount(G.nbr_mask(v) & allowed), v))
    state = [best_alpha, best]

    def rec(i: int, taken: int):
        if not bal.ok(taken | _rest_mask(order, i)):
            return
        a = independence_number(G, to_set(taken | counted)) if taken | counted else 0
        if a >= state[0]:
            return
        if i == len(order) or bal.ok(taken):
            state[0], state[1] = a, taken
            return
        v = order[i]
        rec(i + 1, taken)
        rec(i + 1, taken | (1 << v))

    rec(0, 0)
    return state[0], state[1]


def _rest_mask(order, i):
    m = 0
    for v in order[i:]:
        m |= 1 << v
    return m


def _alpha(G: Graph, m: int) -> int:
    return independence_number(G, to_set(m)) if m else 0


def balanced_separator_small_alpha(G: Graph, w: dict, within: Optional[Iterable[int]] = None, d_max: int = 3,
                                   oracle_limit: int = 20, counted: Iterable[int] = ()) -> Optional[BalancedSeparator]:
    """A balanced separator with small exact alpha.

    Starts from N[Y] for the dominating Y found by
    ``dominated_balanced_separator`` (or from all of ``within`` when no
    small Y exists), then drops vertices, fewest neighbours first, while
    the set stays balanced.  When the allowed set has at most
    ``oracle_limit`` vertices the exact minimum-alpha balanced set is also
    found; the one with smaller alpha is returned and both values are
    recorded.  None when not even the whole allowed set is balanced.
    Vertices in ``counted`` (a boundary that will share the bag) enter
    every alpha and are preferred as neighbours when dropping vertices.
    """
    bal = _Balance(G, w)
    allowed = G.all_mask if within is None else G.mask(within)
    if not bal.ok(allowed):
        return None
    Y = dominated_balanced_separator(G, w, d_max, to_set(allowed))
    if Y is not None:
        ym = G.mask(Y)
        X = (ym | G.nbhd_mask(ym)) & allowed
    else:
        X = allowed
    cm = G.mask(counted)
    for v in sorted(bits(X), key=lambda u: (popcount(G.nbr_mask(u) & (X | cm)), u)):
        T = X & ~(1 << v)
        if bal.ok(T):
            X = T
    bag_alpha = _alpha(G, X | cm)
    res = BalancedSeparator(to_set(X), _alpha(G, X), Y, bag_alpha, bag_alpha)
    if popcount(allowed) <= oracle_limit:
        oa, om = _exact_min_alpha(bal, allowed, bag_alpha, X, cm)
        res.oracle_alpha = oa
        if oa < bag_alpha:
            res = BalancedSeparator(to_set(om), _alpha(G, om), Y, oa, bag_alpha, oa)
    if not bal.ok(G.mask(res.X)):
        raise AssertionError("balanced separator lost its balance")
    return res


# ---------------------------------------------------------------------------
# tree decompositions


@dataclass
class TreeDecomposition:
    bags: list                    # list of frozensets, node i has bag bags[i]
    edges: list                   # tree edges (i, j)
    alphas: list = field(default_factory=list)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def max_alpha(self) -> int:
        return max(self.alphas, default=0)

    def compute_alphas(self, G: Graph) -> "TreeDecomposition":
        out = []
        for b in self.bags:
            if len(b) > BAG_ALPHA_LIMIT:
                raise LimitExceeded(f"bag of size {len(b)} exceeds exact alpha limit {BAG_ALPHA_LIMIT}")
            out.append(independence_number(G, b) if b else 0)
        self.alphas = out
        return self


def format_decomposition(T: TreeDecomposition) -> str:
    lines = [f"td {len(T.bags)} {T.width} {T.max_alpha}"]
    for i, b in enumerate(T.bags):
        lines.append(" ".join(["b", str(i)] + [str(v) for v in sorted(b)]))
    for i, j in T.edges:
        lines.append(f"t {i} {j}")
    return "\n".join(lines) + "\n"


def parse_decomposition(text: str) -> TreeDecomposition:
    header = None
    bags = {}
    edges = []
    for no, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "td":
                header = tuple(int(x) for x in parts[1:4])
            elif parts[0] == "b":
                i = int(parts[1])
                if i in bags:
                    raise ParseError(f"line {no}: bag {i} given twice")
                bags[i] = frozenset(int(x) for x in parts[2:])
            elif parts[0] == "t":
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise ParseError(f"line {no}: unknown record {parts[0]!r}")
        except (ValueError, IndexError) as e:
            raise ParseError(f"line {no}: {e}") from None
    if header is None:
        raise ParseError("missing td header")
    if sorted(bags) != list(range(header[0])):
        raise ParseError(f"expected bags 0..{header[0] - 1}")
    return TreeDecomposition([bags[i] for i in range(header[0])], edges)


def read_decomposition(path) -> TreeDecomposition:
    with open(path) as fh:
        return parse_decomposition(fh.read())


def write_decomposition(T: TreeDecomposition, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_decomposition(T))


@dataclass
class ValidationReport:
    ok: bool
    violation: Optional[str]
    width: int
    alphas: list
    max_alpha: int


def validate_decomposition(G: Graph, T: TreeDecomposition) -> ValidationReport:
    """Tree shape, vertex and edge coverage, connected occurrence sets, exact bag alphas."""
    k = len(T.bags)

    def fail(msg):
        return ValidationReport(False, msg, T.width, [], 0)

    if k == 0:
        return fail("no bags") if G.n else ValidationReport(True, None, -1, [], 0)
    adj = {i: set() for i in range(k)}
    for i, j in T.edges:
        if i not in adj or j not in adj or i == j:
            return fail(f"tree edge ({i}, {j}) is not between two distinct bags")
        if j in adj[i]:
            return fail(f"tree edge ({i}, {j}) repeated")
        adj[i].add(j)
        adj[j].add(i)
    if len(T.edges) != k - 1 or len(_reach(adj, 0, set(range(k)))) != k:
        return fail("bags do not form a tree")
    for i, b in enumerate(T.bags):
        stray = [v for v in b if v not in G]
        if stray:
            return fail(f"bag {i} holds non-vertices {stray}")
    for v in G.vertices:
        nodes = {i for i, b in enumerate(T.bags) if v in b}
        if not nodes:
            return fail(f"vertex {v} is in no bag")
        if len(_reach(adj, min(nodes), nodes)) != len(nodes):
            return fail(f"bags holding vertex {v} are not connected")
    for u, v in G.edges():
        if not any(u in b and v in b for b in T.bags):
            return fail(f"edge ({u}, {v}) is in no bag")
    alphas = []
    for i, b in enumerate(T.bags):
        if len(b) > BAG_ALPHA_LIMIT:
            return fail(f"bag {i} has {len(b)} vertices, above the exact alpha limit")
        alphas.append(independence_number(G, b) if b else 0)
    if T.alphas and list(T.alphas) != alphas:
        return fail("stored bag alphas disagree with recomputed ones")
    return ValidationReport(True, None, T.width, alphas, max(alphas))


def _reach(adj: dict, start: int, allowed: set) -> set:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w in allowed and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


@dataclass
class BuildReport:
    raw_max_alpha: int
    max_alpha: int
    max_separator_alpha: int
    lemma_bound: int              # 5 * max separator alpha (c = 1/2)
    lemma_holds: bool
    separators: int
    boundary_weighted: int
    oracle_gaps: int              # separators where the exact search beat the greedy peel


def _pick_separator(G: Graph, C: int, W: int, stats: dict) -> frozenset:
    """Balanced X inside C for G[C + W]: weight on a maximum stable set of W when that can be split, else on C."""
    H = G.induced(to_set(C | W))
    if W and independence_number(G, to_set(W)) >= 2:
        I = maximum_stable_set(G, to_set(W))
        res = balanced_separator_small_alpha(H, uniform_weight(I), within=to_set(C), counted=to_set(W))
        if res is not None:
            stats["boundary"] += 1
            return _note(res, stats)
    res = balanced_separator_small_alpha(H, uniform_weight(to_set(C)), within=to_set(C), counted=to_set(W))
    return _note(res, stats)


def _note(res: BalancedSeparator, stats: dict) -> frozenset:
    stats["sep_alpha"] = max(stats["sep_alpha"], res.alpha)
    stats["count"] += 1
    if res.oracle_alpha is not None and res.oracle_alpha < res.peel_bag_alpha:
        stats["gaps"] += 1
    return res.X


def _raw_decomposition(G: Graph, stats: dict) -> TreeDecomposition:
    bags, edges = [], []

    def rec(C: int, W: int) -> int:
        node = len(bags)
        if popcount(C) <= 1:
            bags.append(to_set(C | W))
            return node
        X = G.mask(_pick_separator(G, C, W, stats))
        if not X & C:
            X = 1 << max(bits(C), key=lambda v: (popcount(G.nbr_mask(v) & C), -v))
        bags.append(to_set(W | X))
        for comp in component_masks(G, C & ~X):
            Wc = G.nbhd_mask(comp) & (W | X) & ~comp
            child = rec(comp, Wc)
            edges.append((node, child))
        return node

    roots = [rec(c, 0) for c in component_masks(G, G.all_mask)]
    if not roots:
        return TreeDecomposition([frozenset()], [])
    for r1, r2 in zip(roots, roots[1:]):
        edges.append((r1, r2))
    return TreeDecomposition(bags, edges)


def _sandwich_triangulation(G: Graph, T: TreeDecomposition) -> dict:
    """A minimal triangulation of G inside the chordal graph that turns every bag into a clique.

    Fill edges are dropped one at a time while the graph stays chordal; an
    edge can go exactly when the common neighbourhood of its ends is a
    clique.  When no fill edge can go, the triangulation is minimal.
    """
    nbr = {v: 0 for v in G.vertices}
    for b in T.bags:
        m = G.mask(b)
        for v in b:
            nbr[v] |= m & ~(1 << v)
    fill = sorted((u, v) for u in G.vertices for v in bits(nbr[u]) if u < v and not G.has_edge(u, v))
    changed = True
    while changed:
        changed = False
        for u, v in fill:
            if not (nbr[u] >> v) & 1:
                continue
            common = nbr[u] & nbr[v]
            if all(common & ~(1 << x) & ~nbr[x] == 0 for x in bits(common)):
                nbr[u] &= ~(1 << v)
                nbr[v] &= ~(1 << u)
                changed = True
    return nbr


def _clique_tree(G: Graph, nbr: dict) -> TreeDecomposition:
    H = Graph.from_adjacency({v: set(bits(nbr[v])) for v in G.vertices})
    peo = perfect_elimination_order(H)
    if peo is None:
        raise AssertionError("triangulation is not chordal")
    pos = {v: i for i, v in enumerate(peo)}
    cand = []
    for v in peo:
        cand.append((1 << v) | H.mask(u for u in bits(nbr[v]) if pos[u] > pos[v]))
    cliques = []
    for c in sorted(set(cand), key=lambda m: (-popcount(m), tuple(bits(m)))):
        if not any(c & ~d == 0 for d in cliques):
            cliques.append(c)
    cliques.sort(key=lambda m: tuple(bits(m)))
    pairs = sorted(((popcount(cliques[i] & cliques[j]), i, j) for i in range(len(cliques))
                    for j in range(i + 1, len(cliques))), key=lambda p: (-p[0], p[1], p[2]))
    parent = list(range(len(cliques)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for _, i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j))
    return TreeDecomposition([to_set(c) for c in cliques], edges)


def build_tree_decomposition(G: Graph, refine: bool = True) -> tuple:
    """Tree decomposition by recursive balanced separators, with exact bag alphas.

    A node handles a connected set C with boundary W (its neighbours in
    the ancestors' bags): its bag is W + X for a balanced separator X
    inside C, and each component of C - X becomes a child.  With
    ``refine`` the raw decomposition is replaced by the clique tree of a
    minimal triangulation sitting inside it; every new bag lies in an old
    one, so no bag alpha grows, and chordal inputs come back as their
    clique trees.  Returns (decomposition, BuildReport).
    """
    stats = {"sep_alpha": 0, "count": 0, "boundary": 0, "gaps": 0}
    raw = _raw_decomposition(G, stats).compute_alphas(G)
    T = raw
    if refine and G.n:
        T = _clique_tree(G, _sandwich_triangulation(G, raw)).compute_alphas(G)
        if T.max_alpha > raw.max_alpha:
            raise AssertionError("refinement increased a bag alpha")
    d = max(1, stats["sep_alpha"])
    rep = BuildReport(raw.max_alpha, T.max_alpha, stats["sep_alpha"], 5 * d, T.max_alpha <= 5 * d,
                      stats["count"], stats["boundary"], stats["gaps"])
    return T, rep


# ---------------------------------------------------------------------------
# breakability


@dataclass
class BreakabilityReport:
    pairs: int
    max_pair_alpha: int
    pairs_within_L: bool
    exact: bool
    subgraphs: int
    max_dominator: Optional[int]      # largest |Y| needed; None if some sample needed more than d
    subgraphs_within_d: bool
    profile: list = field(default_factory=list)

    @property
    def breakable(self) -> bool:
        return self.pairs_within_L and self.subgraphs_within_d


def min_alpha_separator(G: Graph, H1: Iterable[int], H2: Iterable[int], exact_limit: int = 20) -> tuple:
    """(alpha, X, exact) for a minimum-alpha X outside H1 + H2 separating H1 from H2.

    H1 and H2 are contracted to two new vertices; a minimum is attained at
    a minimal separator of those, all of which are enumerated when the
    graph has at most ``exact_limit`` vertices.  Larger graphs use the
    neighbourhood of H1 trimmed to a minimal separator.
    """
    H1, H2 = frozenset(H1), frozenset(H2)
    rest = [v for v in G.vertices if v not in H1 and v not in H2]
    s = max(G.vertices) + 1
    t = s + 1
    adj = {v: set(G.neighbors(v)) - H1 - H2 for v in rest}
    adj[s] = {v for v in rest if G.neighbors(v) & H1}
    adj[t] = {v for v in rest if G.neighbors(v) & H2}
    for v in adj[s]:
        adj[v].add(s)
    for v in adj[t]:
        adj[v].add(t)
    Gc = Graph.from_adjacency(adj)
    if separates(Gc, (), s, t):
        return 0, frozenset(), True
    if G.n <= exact_limit:
        best = None
        complete = True
        for m, done in minimal_separators(Gc, s, t):
            complete = complete and done
            a = independence_number(G, to_set(m))
            if best is None or (a, popcount(m)) < (best[0], len(best[1])):
                best = (a, to_set(m))
        return best[0], best[1], complete
    X = peel_minimal_separator(Gc, adj[s], s, t)
    return independence_number(G, X), X, False


def breakability_probe(G: Graph, L: int, d: int, r: int = 1, samples: int = 30, seed: int = 0,
                       exact_limit: int = 20) -> BreakabilityReport:
    """Empirical check of both breakability conditions on sampled clique pairs and induced subgraphs."""
    rng = random.Random(seed)
    cliques = [to_set(c) for c in maximal_clique_masks(G)]
    small = set()
    for c in cliques:
        for k in range(1, r + 1):
            for sub in combinations(sorted(c), k):
                small.add(frozenset(sub))
    small = sorted(small, key=lambda s: (len(s), sorted(s)))
    pairs = [(h1, h2) for i, h1 in enumerate(small) for h2 in small[i + 1:]
             if not h1 & h2 and not any(G.neighbors(v) & h2 for v in h1)]
    if len(pairs) > samples:
        pairs = rng.sample(pairs, samples)
    worst, exact, profile = 0, True, []
    for h1, h2 in pairs:
        a, X, ex = min_alpha_separator(G, h1, h2, exact_limit)
        worst = max(worst, a)
        exact = exact and ex
        profile.append((sorted(h1), sorted(h2), a))
    dom = 0
    within = True
    verts = list(G.vertices)
    n_sub = 0
    for _ in range(samples if G.n else 0):
        k = rng.randint(1, len(verts))
        S = sorted(rng.sample(verts, k))
        H = G.induced(S)
        n_sub += 1
        Y = dominated_balanced_separator(H, uniform_weight(S), d)
        if Y is None:
            within = False
        else:
            dom = max(dom, len(Y))
    return BreakabilityReport(len(pairs), worst, worst <= L, exact, n_sub, dom if within else None, within, profile)
