"""Exact solvers on top of tree decompositions: weighted independent set, k-colouring, weighted clique."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .decomposition import TreeDecomposition, validate_decomposition
from .errors import BudgetExceeded, InvalidDecomposition, ParseError
from .graph import Graph, bits, budget, has_induced_c4_mask, maximal_clique_masks, to_set

COLOURING_STATES = 1_000_000


@dataclass(frozen=True)
class WeightedGraph:
    G: Graph
    weights: dict                 # vertex -> non-negative int; missing vertices weigh 1

    def w(self, v: int) -> int:
        return self.weights.get(v, 1)

    def total(self, S) -> int:
        return sum(self.w(v) for v in S)


def parse_weights(text: str) -> dict:
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] != "w" or len(parts) != 3:
            raise ParseError(f"line {no}: expected 'w <v> <weight>'")
        try:
            v, x = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"line {no}: non-integer field") from None
        if x < 0:
            raise ParseError(f"line {no}: negative weight")
        if v in out:
            raise ParseError(f"line {no}: vertex {v} weighted twice")
        out[v] = x
    return out


def read_weights(path) -> dict:
    with open(path) as fh:
        return parse_weights(fh.read())


def _rooted(T: TreeDecomposition):
    """Post-order of the tree from node 0 with parents."""
    adj = {i: [] for i in range(len(T.bags))}
    for i, j in T.edges:
        adj[i].append(j)
        adj[j].append(i)
    parent = {0: None}
    order = [0]
    for u in order:
        for w in sorted(adj[u]):
            if w not in parent:
                parent[w] = u
                order.append(w)
    children = {i: [w for w in adj[i] if parent.get(w) == i] for i in adj}
    return order[::-1], children


def _check(G: Graph, T: TreeDecomposition) -> None:
    rep = validate_decomposition(G, T)
    if not rep.ok:
        raise InvalidDecomposition(rep.violation)


def independent_subsets(G: Graph, bag: int) -> list:
    """Every stable subset of ``bag`` (as masks), grown by increasing size."""
    verts = list(bits(bag))
    out = [0]
    frontier = [(0, -1)]
    while frontier:
        nxt = []
        for S, last in frontier:
            nb = 0
            for v in bits(S):
                nb |= G.nbr_mask(v)
            for i in range(last + 1, len(verts)):
                v = verts[i]
                if not (nb >> v) & 1:
                    T = S | (1 << v)
                    out.append(T)
                    nxt.append((T, i))
        frontier = nxt
    return out


def mwis(WG: WeightedGraph, T: TreeDecomposition, check: bool = True) -> tuple:
    """Maximum weight stable set by dynamic programming over the decomposition.

    The table of a node maps each stable subset S of its bag to the best
    weight of a stable set in its subtree meeting the bag in exactly S.  A
    child is joined through its intersection with the parent's bag; no
    edge can run between the two bags outside that intersection.
    """
    G = WG.G
    if check:
        _check(G, T)
    if G.n == 0:
        return 0, frozenset()
    post, children = _rooted(T)
    masks = [G.mask(b) for b in T.bags]
    w = {v: WG.w(v) for v in G.vertices}

    def weight(m):
        return sum(w[v] for v in bits(m))

    table, choice = {}, {}
    for t in post:
        states = independent_subsets(G, masks[t])
        best_child = []
        for c in children[t]:
            sep = masks[t] & masks[c]
            proj = {}
            for Sc, val in table[c].items():
                key = Sc & sep
                gain = val - weight(key)
                if key not in proj or gain > proj[key][0]:
                    proj[key] = (gain, Sc)
            best_child.append((c, sep, proj))
        tab, ch = {}, {}
        for S in states:
            total = weight(S)
            picks = []
            ok = True
            for c, sep, proj in best_child:
                hit = proj.get(S & sep)
                if hit is None:
                    ok = False
                    break
                total += hit[0]
                picks.append((c, hit[1]))
            if ok:
                tab[S] = total
                ch[S] = picks
        table[t], choice[t] = tab, ch
    root = post[-1]
    S0 = max(table[root], key=lambda S: (table[root][S], -S))
    best = table[root][S0]
    chosen = 0
    stack = [(root, S0)]
    while stack:
        t, S = stack.pop()
        chosen |= S
        stack.extend(choice[t][S])
    out = to_set(chosen)
    if not G.is_stable_mask(chosen) or WG.total(out) != best:
        raise AssertionError("reconstructed set does not match the optimum")
    return best, out


def _colourings(G: Graph, verts: list, k: int, fixed: dict, cap: list):
    """Proper colourings of ``verts`` extending ``fixed`` (symmetry not broken)."""
    col = dict(fixed)

    def rec(i):
        if i == len(verts):
            cap[0] -= 1
            if cap[0] < 0:
                raise BudgetExceeded("colouring state budget exhausted")
            yield dict(col)
            return
        v = verts[i]
        used = {col[u] for u in G.neighbors(v) if u in col}
        for c in range(k):
            if c not in used:
                col[v] = c
                yield from rec(i + 1)
                del col[v]

    yield from rec(0)


def k_coloring(G: Graph, k: int, T: TreeDecomposition, check: bool = True, state_budget: Optional[int] = None):
    """A proper k-colouring or None, by dynamic programming over bag colourings."""
    if check:
        _check(G, T)
    if G.n == 0:
        return {}
    if k <= 0:
        return None
    cap = [budget(state_budget or COLOURING_STATES)]
    post, children = _rooted(T)
    bags = [sorted(b) for b in T.bags]
    feasible = {}                 # node -> {projection onto parent bag: one full bag colouring}
    parent_of = {c: t for t in children for c in children[t]}
    tables = {}
    for t in post:
        child_proj = [feasible[c] for c in children[t]]
        ok_states = []
        for col in _colourings(G, bags[t], k, {}, cap):
            if all(_key(col, sep_vs) in proj for proj, sep_vs in child_proj):
                ok_states.append(col)
        tables[t] = ok_states
        if t in parent_of:
            sep_vs = sorted(set(bags[t]) & set(bags[parent_of[t]]))
            proj = {}
            for col in ok_states:
                proj.setdefault(_key(col, sep_vs), col)
            feasible[t] = (proj, sep_vs)
    root = post[-1]
    if not tables[root]:
        return None
    colour = {}
    stack = [(root, tables[root][0])]
    while stack:
        t, col = stack.pop()
        colour.update(col)
        for c in children[t]:
            proj, sep_vs = feasible[c]
            stack.append((c, proj[_key(col, sep_vs)]))
    if len(colour) != G.n or any(colour[u] == colour[v] for u, v in G.edges()):
        raise AssertionError("reconstructed colouring is not proper")
    return colour


def _key(col: dict, sep_vs: list) -> tuple:
    return tuple(col[v] for v in sep_vs)


def enumerate_maximal_cliques(G: Graph, check_bound: bool = True) -> list:
    """All maximal cliques; on C4-free graphs their number is checked against n^2."""
    cliques = [to_set(c) for c in maximal_clique_masks(G)]
    if check_bound and G.n and not has_induced_c4_mask(G, G.all_mask) and len(cliques) > G.n ** 2:
        raise AssertionError(f"{len(cliques)} maximal cliques on a C4-free graph with {G.n} vertices")
    return cliques


def max_weight_clique(WG: WeightedGraph) -> tuple:
    best, arg = 0, frozenset()
    for c in enumerate_maximal_cliques(WG.G):
        x = WG.total(c)
        if x > best or (x == best and sorted(c) < sorted(arg)):
            best, arg = x, c
    return best, arg
