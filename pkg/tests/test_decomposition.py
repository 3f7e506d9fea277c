import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings

from ehk.decomposition import (TreeDecomposition, balanced_separator_small_alpha, breakability_probe,
                               build_tree_decomposition, dominated_balanced_separator, format_decomposition,
                               is_balanced, is_normal, min_alpha_separator, parse_decomposition,
                               uniform_weight, validate_decomposition)
from ehk.errors import ParseError
from ehk.generators import gen_ehf_with_gadgets, gen_random_chordal, gen_random_ehf
from ehk.graph import Graph
from separation_oracles import as_nx
from test_graph import graphs


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def nx_alpha(G, S):
    H = nx.complement(as_nx(G, S))
    return max((len(c) for c in nx.find_cliques(H)), default=0)


def nx_balanced(G, X, w):
    H = as_nx(G)
    H.remove_nodes_from(X)
    return all(sum(w.get(v, 0) for v in c) <= Fraction(1, 2) for c in nx.connected_components(H))


def nx_is_decomposition(G, T):
    """Independent check with networkx: tree, coverage, running intersection."""
    tree = nx.Graph()
    tree.add_nodes_from(range(len(T.bags)))
    tree.add_edges_from(T.edges)
    if len(T.edges) != len(T.bags) - 1 or not nx.is_tree(tree) or len(set(map(frozenset, T.edges))) != len(T.edges):
        return False
    if any(v not in G for b in T.bags for v in b):
        return False
    for v in G.vertices:
        nodes = [i for i, b in enumerate(T.bags) if v in b]
        if not nodes or not nx.is_connected(tree.subgraph(nodes)):
            return False
    return all(any(u in b and v in b for b in T.bags) for u, v in G.edges())


# ---------------------------------------------------------------------------
# weights and separators


def test_uniform_weight_is_normal():
    assert is_normal(uniform_weight(range(7)))
    assert uniform_weight([]) == {}


def test_dominated_separator_star():
    G = Graph(6, [(0, i) for i in range(1, 6)])
    assert dominated_balanced_separator(G, uniform_weight(G.vertices)) == {0}


def test_dominated_separator_path():
    G = Graph(9, [(i, i + 1) for i in range(8)])
    Y = dominated_balanced_separator(G, uniform_weight(G.vertices))
    assert len(Y) == 1
    X = set(Y) | set().union(*(G.neighbors(y) for y in Y))
    assert is_balanced(G, X, uniform_weight(G.vertices))


def brute_dominator_size(G, w, d_max):
    for k in range(d_max + 1):
        for Y in itertools.combinations(G.vertices, k):
            X = set(Y) | set().union(*(G.neighbors(y) for y in Y)) if Y else set()
            if nx_balanced(G, X, w):
                return k
    return None


@given(graphs(max_n=9))
@settings(max_examples=80, deadline=None)
def test_dominated_separator_is_smallest(G):
    w = uniform_weight(G.vertices)
    Y = dominated_balanced_separator(G, w, 2)
    k = brute_dominator_size(G, w, 2)
    assert (Y is None) == (k is None)
    if Y is not None:
        assert len(Y) == k


def brute_min_balanced_alpha(G, w):
    best = None
    for r in range(G.n + 1):
        for X in itertools.combinations(G.vertices, r):
            if nx_balanced(G, X, w):
                a = nx_alpha(G, X)
                best = a if best is None else min(best, a)
    return best


@given(graphs(max_n=9))
@settings(max_examples=60, deadline=None)
def test_balanced_separator_reaches_oracle(G):
    w = uniform_weight(G.vertices)
    res = balanced_separator_small_alpha(G, w)
    assert nx_balanced(G, res.X, w)
    assert res.alpha == nx_alpha(G, res.X)
    assert res.alpha == brute_min_balanced_alpha(G, w)


def test_balanced_separator_of_c8():
    G = cycle(8)
    res = balanced_separator_small_alpha(G, uniform_weight(G.vertices))
    # any clique leaves a path of six vertices, more than half
    assert res.alpha == 2 and len(res.X) == 2
    assert is_balanced(G, res.X, uniform_weight(G.vertices))


def test_balanced_separator_none_when_nothing_allowed_balances():
    G = Graph(4, [(0, 1), (1, 2), (2, 3)])
    assert balanced_separator_small_alpha(G, uniform_weight(G.vertices), within=[]) is None


# ---------------------------------------------------------------------------
# building decompositions


@pytest.mark.parametrize("n", range(4, 31))
def test_cycles_have_alpha_two(n):
    T, rep = build_tree_decomposition(cycle(n))
    v = validate_decomposition(cycle(n), T)
    assert v.ok and v.max_alpha == 2
    assert rep.lemma_holds


@pytest.mark.parametrize("seed", range(30))
def test_chordal_graphs_have_alpha_one(seed):
    G = gen_random_chordal(25, 0.3, seed)
    T, rep = build_tree_decomposition(G)
    v = validate_decomposition(G, T)
    assert v.ok and v.max_alpha == 1
    assert T.max_alpha == 1


def test_raw_decomposition_is_valid_too():
    G = gen_ehf_with_gadgets(30, 0.12, 4)
    T, rep = build_tree_decomposition(G, refine=False)
    assert validate_decomposition(G, T).ok
    T2, rep2 = build_tree_decomposition(G)
    assert rep2.max_alpha <= rep.max_alpha


@pytest.mark.parametrize("seed", range(15))
@pytest.mark.parametrize("n", [20, 40])
def test_ehf_decompositions(n, seed):
    G = gen_ehf_with_gadgets(n, 0.12, seed)
    T, rep = build_tree_decomposition(G)
    v = validate_decomposition(G, T)
    assert v.ok, v.violation
    assert nx_is_decomposition(G, T)
    assert v.alphas == [nx_alpha(G, b) for b in T.bags]
    assert rep.lemma_holds and rep.max_alpha <= rep.lemma_bound


def test_empty_and_single_vertex():
    T, _ = build_tree_decomposition(Graph(0))
    assert validate_decomposition(Graph(0), T).ok
    T, _ = build_tree_decomposition(Graph(1))
    assert validate_decomposition(Graph(1), T).ok and T.max_alpha == 1


def test_disconnected_graph():
    G = Graph(8, [(0, 1), (1, 2), (2, 3), (3, 0), (5, 6)])
    T, _ = build_tree_decomposition(G)
    assert validate_decomposition(G, T).ok


@given(graphs(max_n=11))
@settings(max_examples=80, deadline=None)
def test_built_decomposition_is_valid(G):
    T, rep = build_tree_decomposition(G)
    assert nx_is_decomposition(G, T)
    assert validate_decomposition(G, T).ok
    assert rep.max_alpha <= rep.raw_max_alpha


# ---------------------------------------------------------------------------
# validation against mutations


def mutate(T, rng, n):
    bags = [set(b) for b in T.bags]
    edges = list(T.edges)
    kind = rng.randrange(5)
    if kind == 0:
        i = rng.randrange(len(bags))
        if bags[i]:
            bags[i].discard(rng.choice(sorted(bags[i])))
    elif kind == 1 and edges:
        edges.pop(rng.randrange(len(edges)))
    elif kind == 2 and len(bags) > 1:
        i, j = rng.sample(range(len(bags)), 2)
        edges.append((i, j))
    elif kind == 3:
        bags[rng.randrange(len(bags))].add(rng.randrange(n + 2))
    elif kind == 4 and edges:
        k = rng.randrange(len(edges))
        i, _ = edges[k]
        edges[k] = (i, rng.randrange(len(bags)))
    return TreeDecomposition([frozenset(b) for b in bags], edges)


@pytest.mark.parametrize("seed", range(40))
def test_validator_agrees_with_networkx_under_mutation(seed):
    rng = random.Random(seed)
    G = gen_random_ehf(12, 0.3, seed)
    T, _ = build_tree_decomposition(G, refine=bool(seed % 2))
    for _ in range(10):
        M = mutate(T, rng, G.n)
        assert validate_decomposition(G, M).ok == nx_is_decomposition(G, M)


def test_validator_flags_stale_alphas():
    G = cycle(6)
    T, _ = build_tree_decomposition(G)
    T.alphas = [a + 1 for a in T.alphas]
    rep = validate_decomposition(G, T)
    assert not rep.ok and "alpha" in rep.violation


# ---------------------------------------------------------------------------
# file format


@pytest.mark.parametrize("seed", range(5))
def test_format_round_trip(seed):
    G = gen_ehf_with_gadgets(20, 0.15, seed)
    T, _ = build_tree_decomposition(G)
    back = parse_decomposition(format_decomposition(T))
    assert back.bags == T.bags and back.edges == T.edges
    assert validate_decomposition(G, back).ok


@pytest.mark.parametrize("text", ["b 0 1 2\n", "td 2 1 1\nb 0 1\n", "td 1 0 1\nb 0 1\nb 0 2\n",
                                  "td 1 0 1\nx 0\n", "td 1 0 1\nb zero\n"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ParseError):
        parse_decomposition(text)


# ---------------------------------------------------------------------------
# breakability


def test_min_alpha_separator_disconnected():
    G = Graph(4, [(0, 1), (2, 3)])
    a, X, exact = min_alpha_separator(G, {0}, {3})
    assert a == 0 and X == frozenset() and exact


def test_min_alpha_separator_against_brute_force():
    G = cycle(7)
    a, X, _ = min_alpha_separator(G, {0}, {3})
    assert a == 2
    H = as_nx(G)
    H.remove_nodes_from(X)
    assert not nx.has_path(H, 0, 3)


def complete_bipartite(t):
    return Graph(2 * t, [(i, t + j) for i in range(t) for j in range(t)])


def test_complete_bipartite_degrades_breakability():
    small = breakability_probe(complete_bipartite(2), L=1, d=3)
    big = breakability_probe(complete_bipartite(5), L=1, d=3)
    assert big.max_pair_alpha > small.max_pair_alpha
    assert not big.breakable


@pytest.mark.parametrize("seed", range(5))
def test_breakability_on_chordal(seed):
    G = gen_random_chordal(18, 0.3, seed)
    rep = breakability_probe(G, L=1, d=3, samples=15)
    assert rep.max_pair_alpha <= 1
