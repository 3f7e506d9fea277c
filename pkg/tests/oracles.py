"""Definition-level brute-force oracles, independent of the package's detectors.

Structures are recognised by enumerating vertex subsets and testing the
induced subgraph for isomorphism against templates built straight from the
definitions (networkx VF2).  Nothing here reuses package code beyond the
Graph container.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher


def _path_nodes(G, prefix, length, start, end):
    """Add a path of ``length`` edges from ``start`` to ``end`` with fresh interior nodes."""
    nodes = [start] + [(prefix, t) for t in range(1, length)] + [end]
    nx.add_path(G, nodes)
    return nodes


def theta_template(l1, l2, l3):
    G = nx.Graph()
    G.add_nodes_from(["a", "b"])
    roles = {}
    for i, l in enumerate((l1, l2, l3), 1):
        roles[f"P{i}"] = _path_nodes(G, f"p{i}", l, "a", "b")
    return G, roles


def prism_template(l1, l2, l3):
    G = nx.Graph()
    A = [("a", 1), ("a", 2), ("a", 3)]
    B = [("b", 1), ("b", 2), ("b", 3)]
    G.add_edges_from(itertools.combinations(A, 2))
    G.add_edges_from(itertools.combinations(B, 2))
    roles = {}
    for i, l in enumerate((l1, l2, l3)):
        roles[f"P{i + 1}"] = _path_nodes(G, f"p{i + 1}", l, A[i], B[i])
    return G, roles


def shared_near_prism_template(l2, l3):
    G = nx.Graph()
    c = "c"
    roles = {"P1": [c]}
    for i, l in ((2, l2), (3, l3)):
        roles[f"P{i}"] = _path_nodes(G, f"p{i}", l, ("a", i), ("b", i))
    G.add_edges_from([(c, ("a", 2)), (c, ("a", 3)), (("a", 2), ("a", 3)),
                      (c, ("b", 2)), (c, ("b", 3)), (("b", 2), ("b", 3))])
    return G, roles


def pyramid_template(l1, l2, l3):
    G = nx.Graph()
    B = [("b", 1), ("b", 2), ("b", 3)]
    G.add_edges_from(itertools.combinations(B, 2))
    roles = {"apex": "a", "base": B}
    for i, l in enumerate((l1, l2, l3)):
        roles[f"P{i + 1}"] = _path_nodes(G, f"p{i + 1}", l, "a", B[i])
    return G, roles


@lru_cache(maxsize=None)
def templates(max_n: int):
    """Map (n, m, degree sequence) -> list of (kind, template graph, roles)."""
    table = {}

    def add(kind, G, roles):
        if G.number_of_nodes() > max_n:
            return
        key = (G.number_of_nodes(), G.number_of_edges(), tuple(sorted(d for _, d in G.degree())))
        table.setdefault(key, []).append((kind, G, roles))

    r = range(1, max_n + 1)
    for l1, l2, l3 in itertools.combinations_with_replacement(r, 3):
        if min(l1, l2, l3) >= 2 and 2 + l1 + l2 + l3 - 3 <= max_n:
            add("theta", *theta_template(l1, l2, l3))
        if l1 + l2 + l3 + 3 <= max_n:
            add("prism", *prism_template(l1, l2, l3))
    for l2, l3 in itertools.combinations_with_replacement(r, 2):
        if min(l2, l3) >= 2 and l2 + l3 + 3 <= max_n:
            add("shared", *shared_near_prism_template(l2, l3))
    for l1, l2, l3 in itertools.product(r, repeat=3):
        if [l1, l2, l3].count(1) <= 1 and 1 + l1 + l2 + l3 <= max_n:
            add("pyramid", *pyramid_template(l1, l2, l3))
    return table


def _subgraph(G, S):
    H = nx.Graph()
    H.add_nodes_from(S)
    H.add_edges_from((u, v) for u, v in itertools.combinations(S, 2) if G.has_edge(u, v))
    return H


def _key(H):
    return (H.number_of_nodes(), H.number_of_edges(), tuple(sorted(d for _, d in H.degree())))


def _brute_alpha(G, S):
    S = list(S)
    for r in range(len(S), 0, -1):
        for c in itertools.combinations(S, r):
            if all(not G.has_edge(u, v) for u, v in itertools.combinations(c, 2)):
                return r
    return 0


def _induced_paths(G, vertices):
    """All induced paths (as ordered tuples, both orientations) inside ``vertices``."""
    vertices = list(vertices)
    out = []

    def rec(path):
        out.append(tuple(path))
        last = path[-1]
        for w in vertices:
            if w in path or not G.has_edge(last, w):
                continue
            if any(G.has_edge(w, u) for u in path[:-1]):
                continue
            path.append(w)
            rec(path)
            path.pop()

    for v in vertices:
        rec([v])
    return out


class Oracle:
    """Everything the detectors are expected to report, by subset enumeration."""

    def __init__(self, G):
        self.G = G
        verts = list(G.vertices)
        self.vertices = verts
        n = len(verts)
        self.holes = set()
        self.c4 = False
        self.theta = self.prism = self.near_prism = self.pyramid = False
        self.pyramids = []          # (roles dict in G labels)
        self.near_prism_subsets = []
        self.cross_edges = set()
        table = templates(max(n, 4))
        for r in range(4, n + 1):
            for S in itertools.combinations(verts, r):
                H = _subgraph(G, S)
                degs = [d for _, d in H.degree()]
                if all(d == 2 for d in degs) and nx.is_connected(H):
                    self.holes.add(frozenset(S))
                    if r == 4:
                        self.c4 = True
                for kind, T, roles in table.get(_key(H), ()):
                    gm = GraphMatcher(T, H)
                    if not gm.is_isomorphic():
                        continue
                    if kind == "theta":
                        self.theta = True
                    elif kind == "prism":
                        self.prism = True
                        self.near_prism = True
                    elif kind == "shared":
                        self.near_prism = True
                    elif kind == "pyramid":
                        self.pyramid = True
                        for iso in GraphMatcher(T, H).isomorphisms_iter():
                            self.pyramids.append({k: ([iso[x] for x in v] if isinstance(v, list) else iso[v])
                                                  for k, v in roles.items()})
                # extended near-prisms: remove one edge between degree-3 vertices
                m = H.number_of_edges()
                if m >= r + 4 and max(degs) <= 4:
                    self._extended(H, S, table)
        self._wheels()
        self._loaded()

    def _extended(self, H, S, table):
        for u, v in list(H.edges()):
            if H.degree(u) != 3 or H.degree(v) != 3:
                continue
            K = H.copy()
            K.remove_edge(u, v)
            for kind, T, roles in table.get(_key(K), ()):
                if kind not in ("prism", "shared"):
                    continue
                gm = GraphMatcher(T, K)
                for iso in gm.isomorphisms_iter():
                    inv = {iso[t]: t for t in iso}
                    where = {}
                    for name in ("P1", "P2", "P3"):
                        for t in roles[name][1:-1]:
                            where[t] = name
                    pu, pv = where.get(inv[u]), where.get(inv[v])
                    if pu and pv and pu != pv:
                        self.cross_edges.add(frozenset((u, v)))
                        break

    def _wheels(self):
        G = self.G
        self.wheels = {}
        for H in self.holes:
            for x in self.vertices:
                if x in H:
                    continue
                nb = [h for h in H if G.has_edge(x, h)]
                if len(nb) >= 3:
                    self.wheels[(H, x)] = (
                        _brute_alpha(G, nb) >= 3,
                        len(nb) % 2 == 0,
                        len(nb) == len(H),
                    )
        self.even_wheel = any(c[1] for c in self.wheels.values())
        self.proper_centers = {x for (H, x), c in self.wheels.items() if c[0]}

    def _loaded(self):
        G = self.G
        self.loaded_corners = set()
        for roles in self.pyramids:
            P1, P2, P3 = roles["P1"], roles["P2"], roles["P3"]
            a = roles["apex"]
            b1, b2, b3 = roles["base"]
            if len(P2) != 2 or b2 in self.loaded_corners:
                continue
            sigma = set(P1) | set(P2) | set(P3)
            rest = [v for v in self.vertices if v not in sigma]
            for P in _induced_paths(G, rest):
                p1, pk = P[0], P[-1]
                if not G.has_edge(p1, b2):
                    continue
                if not any(G.has_edge(pk, v) for v in P1[1:-1]):
                    continue
                if any(G.has_edge(u, v) for u in P3 for v in P):
                    continue
                if any(G.has_edge(b2, v) for v in P[1:]):
                    continue
                if any(G.has_edge(u, v) for u in P1[:-1] for v in P[:-1]):
                    continue
                self.loaded_corners.add(b2)
                break

    @property
    def even_hole(self):
        return any(len(h) % 2 == 0 for h in self.holes)

    @property
    def hubs(self):
        return self.proper_centers | self.loaded_corners

    @property
    def in_class_C(self):
        return not (self.c4 or self.theta or self.prism or self.even_wheel)
