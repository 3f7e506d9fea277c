"""Definition-level oracles for the separation machinery, written with networkx and plain loops."""

import itertools

import networkx as nx


def as_nx(G, S=None):
    H = nx.Graph()
    S = set(G.vertices if S is None else S)
    H.add_nodes_from(S)
    H.add_edges_from(e for e in G.edges() if e[0] in S and e[1] in S)
    return H


def cliques_of(H):
    out = set()
    for c in nx.find_cliques(H):
        for r in range(1, len(c) + 1):
            out.update(frozenset(s) for s in itertools.combinations(c, r))
    return out


def induced_paths(G, s, t, region):
    """Every induced s-t path whose interior lies in region, by exhaustive simple-path search."""
    S = set(region) | {s, t}
    H = as_nx(G, S)
    for p in nx.all_simple_paths(H, s, t):
        inner = set(p[1:-1])
        if not inner <= set(region):
            continue
        if H.subgraph(p).number_of_edges() == len(p) - 1:
            yield tuple(p)


def separated_triple_types(G, D, b, xs):
    """All (K, (i, j), type) making xs b-separated, straight from the definition.

    For type 2 every subset of D is tried as D_j'.
    """
    D = set(D)
    HD = as_nx(G, D)
    nb = {v: set(G.neighbors(v)) for v in G.vertices}
    found = set()
    if any(b in nb[x] for x in xs):
        return found
    paths = {j: list(induced_paths(G, b, xs[j - 1], D - {b})) for j in (1, 2, 3)}
    subsets = [frozenset(s) for r in range(2, len(D) + 1) for s in itertools.combinations(sorted(D), r)]
    for K in cliques_of(HD):
        comps = list(nx.connected_components(HD.subgraph(D - K)))
        att = {i: set().union(*[c for c in comps if c & nb[xs[i - 1]]] or [set()]) for i in (1, 2, 3)}
        for i, j in itertools.permutations((1, 2, 3), 2):
            if b not in K | att[i] | att[j]:
                found.add((K, (i, j), "1"))
            closed = att[i] | set().union(*[nb[v] for v in att[i]] or [set()])
            if b in closed:
                continue
            qs = []
            if b in K:
                qs.append(("2a", b))
            for k in (1, 2, 3):
                if k != i:
                    qs.append(("2b" if k == j else "2c", xs[k - 1]))
            for label, q in qs:
                P = paths[j]
                lasts = []
                ok = True
                for p in P:
                    hit = [v for v in p if v in nb[q]]
                    if not hit or not K <= nb[hit[-1]] | {hit[-1]}:
                        ok = False
                        break
                    lasts.append(hit[-1])
                if not ok:
                    continue
                for Dp in subsets:
                    if HD.subgraph(Dp).number_of_edges() == len(Dp) * (len(Dp) - 1) // 2:
                        continue
                    if not all(K <= nb[v] | {v} for v in Dp):
                        continue
                    if q != b and not (K | Dp) <= nb[q]:
                        continue
                    if not Dp <= set(lasts):
                        continue
                    found.add((K, (i, j), label))
                    break
    return found
