import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ehk.errors import EmptyIntersection, LimitExceeded, ParseError
from ehk.graph import (Graph, Path, bits, clique_cover_number, closed_neighborhood, components,
                       find_induced_path, format_graph, independence_number, is_chordal,
                       last_vertex_along, maximal_clique_masks, maximum_stable_set,
                       open_neighborhood, parse_graph, separates, shortcut)


def random_graph(n, p, seed):
    rng = random.Random(seed)
    return Graph(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p])


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, [e for e, keep in zip(pairs, chosen) if keep])


def naive_components(G, S):
    S = set(S)
    out = []
    while S:
        start = min(S)
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in G.neighbors(v):
                if u in S and u not in comp:
                    comp.add(u)
                    stack.append(u)
        out.append(frozenset(comp))
        S -= comp
    return out


def brute_alpha(G):
    nbr = [G.nbr_mask(v) for v in range(G.n)]
    stable = [True] * (1 << G.n)
    best = 0
    for mask in range(1, 1 << G.n):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        ok = stable[rest] and not (nbr[low] & rest)
        stable[mask] = ok
        if ok:
            best = max(best, bin(mask).count("1"))
    return best


def brute_kappa(G, S):
    S = sorted(S)
    cliques = [frozenset(c) for r in range(1, len(S) + 1) for c in itertools.combinations(S, r)
               if all(G.has_edge(u, v) for u, v in itertools.combinations(c, 2))]
    best = {frozenset(): 0}

    def solve(U):
        if U in best:
            return best[U]
        v = min(U)
        val = min(1 + solve(U - c) for c in cliques if v in c and c <= U)
        best[U] = val
        return val

    return solve(frozenset(S))


# --- components and neighbourhoods -----------------------------------------

def test_components_examples():
    P3 = Graph(3, [(0, 1), (1, 2)])
    assert components(P3, {0, 2}) == [frozenset({0}), frozenset({2})]
    K3 = Graph(3, [(0, 1), (1, 2), (0, 2)])
    assert components(K3) == [frozenset({0, 1, 2})]
    assert components(K3, []) == []


@given(graphs(), st.randoms(use_true_random=False))
def test_components_match_naive(G, rnd):
    S = {v for v in G.vertices if rnd.random() < 0.6}
    got = components(G, S)
    assert got == naive_components(G, S)
    for i, A in enumerate(got):
        for B in got[i + 1:]:
            assert not any(G.has_edge(u, v) for u in A for v in B)


def test_neighbourhood_examples():
    star = Graph(5, [(0, i) for i in range(1, 5)])
    assert open_neighborhood(star, {0}) == frozenset({1, 2, 3, 4})
    assert open_neighborhood(star, star.vertices) == frozenset()
    assert closed_neighborhood(star, {1}) == frozenset({0, 1})


@given(graphs(), st.randoms(use_true_random=False))
def test_neighbourhood_matches_scan(G, rnd):
    X = {v for v in G.vertices if rnd.random() < 0.3}
    N = {u for u in G.vertices if u not in X and any(G.has_edge(u, x) for x in X)}
    assert open_neighborhood(G, X) == N
    assert closed_neighborhood(G, X) == N | X


# --- stability number --------------------------------------------------------

def test_alpha_examples():
    C5 = Graph(5, [(i, (i + 1) % 5) for i in range(5)])
    assert independence_number(C5) == 2
    K6 = Graph(6, list(itertools.combinations(range(6), 2)))
    assert independence_number(K6) == 1
    with pytest.raises(LimitExceeded):
        independence_number(Graph(41), limit=40)
    assert independence_number(Graph(41), limit=40, exact=False) == 41


def test_alpha_matches_exhaustive_on_500_seeds():
    for seed in range(500):
        G = random_graph(16, random.Random(seed).choice([0.15, 0.3, 0.5]), seed)
        assert independence_number(G) == brute_alpha(G), seed


@given(graphs())
def test_maximum_stable_set_is_lexmin(G):
    S = maximum_stable_set(G)
    assert G.is_stable_mask(G.mask(S))
    k = len(S)
    assert k == brute_alpha(G)
    first = next(c for c in itertools.combinations(G.vertices, k)
                 if all(not G.has_edge(u, v) for u, v in itertools.combinations(c, 2)))
    assert tuple(sorted(S)) == first


# --- clique cover ------------------------------------------------------------

def test_kappa_examples():
    K4 = Graph(4, list(itertools.combinations(range(4), 2)))
    assert clique_cover_number(K4).kappa_certified == 1
    assert clique_cover_number(Graph(5)).kappa_certified == 5
    C5 = Graph(5, [(i, (i + 1) % 5) for i in range(5)])
    cov = clique_cover_number(C5)
    assert cov.kappa_certified == 3 and cov.exact and cov.validate(C5)


@settings(max_examples=150)
@given(graphs(max_n=10))
def test_kappa_exact_matches_brute_force(G):
    cov = clique_cover_number(G)
    assert cov.validate(G)
    assert cov.kappa_certified == brute_kappa(G, G.vertices)


def test_kappa_greedy_beyond_limit_is_certified():
    G = random_graph(30, 0.3, 4)
    cov = clique_cover_number(G, limit=10)
    assert not cov.exact and cov.validate(G)
    assert cov.kappa_certified >= clique_cover_number(G).kappa_certified


# --- paths -------------------------------------------------------------------

def test_find_induced_path_examples():
    P4 = Graph(4, [(0, 1), (1, 2), (2, 3)])
    assert tuple(find_induced_path(P4, 0, 3)) == (0, 1, 2, 3)
    assert find_induced_path(P4, 0, 3, forbidden={1}) is None


def test_find_induced_path_reachability_500_seeds():
    for seed in range(500):
        rng = random.Random(seed)
        G = random_graph(14, rng.choice([0.1, 0.2, 0.3]), seed)
        a, b = rng.sample(range(14), 2)
        forb = {v for v in range(14) if v not in (a, b) and rng.random() < 0.2}
        P = find_induced_path(G, a, b, forb)
        rest = set(range(14)) - forb
        same = any(a in c and b in c for c in naive_components(G, rest))
        assert (P is not None) == same
        if P is not None:
            assert P.is_induced(G) and P.ends == (a, b) and not (P.as_set & forb)


def test_shortcut_removes_chords():
    G = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 3)])
    walk = (0, 1, 2, 3, 4)
    assert shortcut(G, walk) == (0, 3, 4)
    assert Path(shortcut(G, walk)).is_induced(G)


def test_last_vertex_along():
    P = Path((1, 2, 3, 4, 5))
    assert last_vertex_along(P, 5, {2, 4}) == 4
    assert last_vertex_along(P, 1, {2, 4}) == 2
    assert last_vertex_along(P, 5, {5}) == 5
    with pytest.raises(EmptyIntersection):
        last_vertex_along(P, 5, {9})


@given(st.lists(st.integers(0, 50), min_size=1, max_size=12, unique=True), st.randoms(use_true_random=False))
def test_last_vertex_matches_scan(vs, rnd):
    A = {v for v in vs if rnd.random() < 0.4} or {vs[0]}
    y = vs[-1]
    expect = max((i for i, v in enumerate(vs) if v in A))
    assert last_vertex_along(vs, y, A) == vs[expect]


def test_separates():
    P5 = Graph(5, [(i, i + 1) for i in range(4)])
    assert separates(P5, {2}, 0, 4)
    assert not separates(P5, {1}, 2, 4)


# --- cliques, chordality, text format ------------------------------------------

@given(graphs(max_n=10))
def test_maximal_cliques_complete(G):
    got = {frozenset(bits(m)) for m in maximal_clique_masks(G)}
    expect = set()
    for r in range(1, G.n + 1):
        for c in itertools.combinations(G.vertices, r):
            if all(G.has_edge(u, v) for u, v in itertools.combinations(c, 2)):
                if not any(all(G.has_edge(w, u) for u in c) for w in G.vertices if w not in c):
                    expect.add(frozenset(c))
    assert got == expect


def test_chordality():
    assert not is_chordal(Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    assert is_chordal(Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]))


def test_parse_roundtrip_and_errors():
    G = random_graph(9, 0.4, 2)
    assert parse_graph(format_graph(G)) == G
    with pytest.raises(ParseError):
        parse_graph("p 3 2\ne 0 1\ne 1 0\n")
    with pytest.raises(ParseError):
        parse_graph("p 3 1\ne 1 1\n")
    with pytest.raises(ParseError):
        parse_graph("p 3 2\ne 0 1\n")
    with pytest.raises(ParseError):
        parse_graph("e 0 1\n")


def test_induced_keeps_identities():
    G = random_graph(10, 0.5, 1)
    H = G.induced({2, 5, 7, 9})
    assert H.vertices == (2, 5, 7, 9)
    assert all(H.has_edge(u, v) == G.has_edge(u, v) for u, v in itertools.combinations(H.vertices, 2))
    assert H.parent is G
