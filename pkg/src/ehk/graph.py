"""Core graph type, neighbourhood algebra and exact small-scale invariants.

Vertex identities are arbitrary non-negative integers.  A graph built with
``Graph(n, edges)`` uses ``0..n-1``; induced subgraphs keep the identities
of their parent, so sets computed in a subgraph can be used in the parent
without translation.  Internally every vertex set is also available as an
integer bitmask (bit ``v`` set iff ``v`` is a member), which is what the
exact routines work on.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import EmptyIntersection, LimitExceeded, ParseError

ALPHA_EXACT_LIMIT = 40
KAPPA_EXACT_LIMIT = 24


def budget(default: int) -> int:
    """Return ``default`` unless the ``EHK_BUDGET`` environment variable overrides it."""
    raw = os.environ.get("EHK_BUDGET")
    if raw:
        try:
            return max(1, int(float(raw)))
        except ValueError:
            pass
    return default


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def to_set(mask: int) -> frozenset:
    return frozenset(bits(mask))


class Graph:
    """Immutable simple undirected graph.

    Parameters
    ----------
    n : int or iterable of int
        Either a vertex count (vertices ``0..n-1``) or an explicit vertex set.
    edges : iterable of pairs
        Edges; self-loops are rejected, repeated edges are ignored.
    """

    __slots__ = ("_vertices", "_adj", "_nbr", "_all", "_edges", "_cache", "parent")

    def __init__(self, n=0, edges: Iterable[Sequence[int]] = (), parent: Optional["Graph"] = None):
        if isinstance(n, int):
            vertices = range(n)
        else:
            vertices = n
        adj = {int(v): set() for v in vertices}
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u not in adj or v not in adj:
                raise ValueError(f"edge {u}-{v} uses an unknown vertex")
            adj[u].add(v)
            adj[v].add(u)
        self._init(adj, parent)

    def _init(self, adj, parent):
        self._vertices = tuple(sorted(adj))
        self._adj = {v: frozenset(adj[v]) for v in self._vertices}
        self._nbr = {v: to_mask(self._adj[v]) for v in self._vertices}
        self._all = to_mask(self._vertices)
        self._edges = None
        self._cache = {}
        self.parent = parent

    @classmethod
    def from_adjacency(cls, adj, parent=None) -> "Graph":
        g = cls.__new__(cls)
        g._init(adj, parent)
        return g

    # basic queries -------------------------------------------------------
    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self.edges())

    @property
    def all_mask(self) -> int:
        return self._all

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._vertices)

    def __iter__(self):
        return iter(self._vertices)

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]

    def nbr_mask(self, v: int) -> int:
        return self._nbr[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> list:
        if self._edges is None:
            self._edges = [(u, v) for u in self._vertices for v in sorted(self._adj[u]) if u < v]
        return self._edges

    def mask(self, vertices: Iterable[int]) -> int:
        return to_mask(vertices) & self._all

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._vertices, tuple(self.edges())))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # subgraphs -----------------------------------------------------------
    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph on ``vertices``; identities are preserved."""
        keep = set(vertices)
        missing = keep - set(self._adj)
        if missing:
            raise ValueError(f"vertices {sorted(missing)} not in graph")
        adj = {v: self._adj[v] & keep for v in keep}
        return Graph.from_adjacency(adj, parent=self)

    def without(self, vertices: Iterable[int]) -> "Graph":
        drop = set(vertices)
        return self.induced(v for v in self._vertices if v not in drop)

    def with_edges(self, add=(), remove=()) -> "Graph":
        adj = {v: set(self._adj[v]) for v in self._vertices}
        for u, v in remove:
            adj[u].discard(v)
            adj[v].discard(u)
        for u, v in add:
            if u == v:
                raise ValueError("self-loop")
            adj[u].add(v)
            adj[v].add(u)
        return Graph.from_adjacency(adj)

    def relabeled(self) -> tuple:
        """Return ``(H, labels)`` where ``H`` uses ``0..n-1`` and ``labels[i]`` is the original id."""
        labels = self._vertices
        index = {v: i for i, v in enumerate(labels)}
        h = Graph(len(labels), [(index[u], index[v]) for u, v in self.edges()])
        return h, labels

    # mask helpers ---------------------------------------------------------
    def nbhd_mask(self, mask: int) -> int:
        """Open neighbourhood of a vertex mask."""
        out = 0
        for v in bits(mask):
            out |= self._nbr[v]
        return out & ~mask

    def is_clique_mask(self, mask: int) -> bool:
        for v in bits(mask):
            if (mask & ~(1 << v)) & ~self._nbr[v]:
                return False
        return True

    def is_stable_mask(self, mask: int) -> bool:
        for v in bits(mask):
            if self._nbr[v] & mask:
                return False
        return True


# ---------------------------------------------------------------------------
# neighbourhoods and connectivity


def _mask_of(G: Graph, S) -> int:
    if S is None:
        return G.all_mask
    if isinstance(S, int):
        return S
    return G.mask(S)


def open_neighborhood(G: Graph, X: Iterable[int]) -> frozenset:
    """Vertices outside ``X`` with a neighbour in ``X``."""
    return to_set(G.nbhd_mask(_mask_of(G, X)) & G.all_mask)


def closed_neighborhood(G: Graph, X: Iterable[int]) -> frozenset:
    m = _mask_of(G, X)
    return to_set((G.nbhd_mask(m) | m) & G.all_mask)


def component_masks(G: Graph, S: int) -> list:
    """Connected components of ``G[S]`` as masks, ordered by minimum vertex."""
    comps = []
    rest = S
    nbr = G._nbr
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            new = 0
            for v in bits(frontier):
                new |= nbr[v]
            new &= rest & ~comp
            comp |= new
            frontier = new
        comps.append(comp)
        rest &= ~comp
    return comps


def components(G: Graph, S: Optional[Iterable[int]] = None) -> list:
    """Partition ``S`` (default: all vertices) into components of ``G[S]``."""
    return [to_set(c) for c in component_masks(G, _mask_of(G, S))]


def component_containing(G: Graph, S: int, v: int) -> int:
    """Mask of the component of ``G[S]`` containing ``v`` (0 if ``v`` not in ``S``)."""
    if not (S >> v) & 1:
        return 0
    nbr = G._nbr
    comp = 1 << v
    frontier = comp
    while frontier:
        new = 0
        for u in bits(frontier):
            new |= nbr[u]
        new &= S & ~comp
        comp |= new
        frontier = new
    return comp


def separates(G: Graph, Z: Iterable[int], a: int, b: int) -> bool:
    """True iff ``a`` and ``b`` lie in different components of ``G - Z`` (and neither is in ``Z``)."""
    zm = _mask_of(G, Z)
    if (zm >> a) & 1 or (zm >> b) & 1:
        return False
    comp = component_containing(G, G.all_mask & ~zm, a)
    return not (comp >> b) & 1


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Path:
    """An ordered vertex sequence; see :meth:`is_induced`."""

    vertices: tuple

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def ends(self) -> tuple:
        return self.vertices[0], self.vertices[-1]

    def interior(self) -> tuple:
        return self.vertices[1:-1]

    @property
    def as_set(self) -> frozenset:
        return frozenset(self.vertices)

    def is_path(self, G: Graph) -> bool:
        vs = self.vertices
        if len(set(vs)) != len(vs):
            return False
        return all(G.has_edge(vs[i], vs[i + 1]) for i in range(len(vs) - 1))

    def is_induced(self, G: Graph) -> bool:
        if not self.is_path(G):
            return False
        vs = self.vertices
        for i in range(len(vs)):
            for j in range(i + 2, len(vs)):
                if G.has_edge(vs[i], vs[j]):
                    return False
        return True


def shortcut(G: Graph, walk: Sequence[int]) -> tuple:
    """Turn an a-b path into an induced a-b path on a subset of its vertices."""
    out = []
    i = 0
    walk = list(walk)
    while i < len(walk):
        v = walk[i]
        out.append(v)
        nxt = i + 1
        # jump to the furthest later vertex adjacent to v
        for j in range(len(walk) - 1, i + 1, -1):
            if G.has_edge(v, walk[j]):
                nxt = j
                break
        i = nxt
    return tuple(out)


def bfs_path(G: Graph, sources: int, targets: int, allowed: int) -> Optional[tuple]:
    """Shortest path from a vertex of ``sources`` to a vertex of ``targets``.

    Interior vertices are drawn from ``allowed``; all arguments are masks.
    Shortest set-to-set paths are chordless, so the result is induced.
    """
    if sources & targets:
        return (next(bits(sources & targets)),)
    parent = {}
    frontier = list(bits(sources))
    for s in frontier:
        parent[s] = None
    seen = sources
    nbr = G._nbr
    while frontier:
        nxt = []
        for u in frontier:
            step = nbr[u]
            hit = step & targets & ~seen
            if hit:
                t = next(bits(hit))
                path = [t, u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return tuple(reversed(path))
            for w in bits(step & allowed & ~seen):
                seen |= 1 << w
                parent[w] = u
                nxt.append(w)
        frontier = nxt
    return None


def find_induced_path(G: Graph, a: int, b: int, forbidden: Iterable[int] = ()) -> Optional[Path]:
    """Some induced a-b path in ``G - forbidden``, or None if a and b are disconnected there."""
    if a == b:
        raise ValueError("a and b must differ")
    fm = G.mask(forbidden)
    if (fm >> a) & 1 or (fm >> b) & 1:
        raise ValueError("ends must not be forbidden")
    walk = bfs_path(G, 1 << a, 1 << b, G.all_mask & ~fm & ~(1 << a) & ~(1 << b))
    if walk is None:
        return None
    return Path(shortcut(G, walk))


def last_vertex_along(P: Path | Sequence[int], y: int, A: Iterable[int]) -> int:
    """The vertex of ``A`` closest to the end ``y`` along ``P``."""
    vs = tuple(P)
    if vs and vs[0] == y:
        vs = tuple(reversed(vs))
    elif not vs or vs[-1] != y:
        raise ValueError("y must be an end of P")
    A = set(A)
    for v in reversed(vs):
        if v in A:
            return v
    raise EmptyIntersection("path misses the target set")


# ---------------------------------------------------------------------------
# independence number


class _StableSolver:
    """Branch and bound maximum stable set on bitmasks, memoised per subproblem."""

    def __init__(self, G: Graph):
        self.nbr = G._nbr
        self.memo = {}

    def size(self, P: int) -> int:
        if not P:
            return 0
        hit = self.memo.get(P)
        if hit is not None:
            return hit
        nbr = self.nbr
        best_v = -1
        best_d = 1 << 30
        max_v = -1
        max_d = -1
        for v in bits(P):
            d = popcount(nbr[v] & P)
            if d < best_d:
                best_d, best_v = d, v
                if d == 0:
                    break
            if d > max_d:
                max_d, max_v = d, v
        if best_d <= 1:
            res = 1 + self.size(P & ~(nbr[best_v] | (1 << best_v)))
        else:
            comps = _split(nbr, P) if max_d <= 3 or popcount(P) > 12 else [P]
            if len(comps) > 1:
                res = sum(self.size(c) for c in comps)
            else:
                take = 1 + self.size(P & ~(nbr[max_v] | (1 << max_v)))
                # excluding max_v can only help if the rest can beat take
                rest = P & ~(1 << max_v)
                res = take
                if popcount(rest) > take:
                    res = max(take, self.size(rest))
        self.memo[P] = res
        return res

    def lexmin_set(self, P: int) -> int:
        """Lexicographically smallest maximum stable set of ``G[P]`` (as a mask)."""
        need = self.size(P)
        chosen = 0
        nbr = self.nbr
        for v in bits(P):
            if need == 0:
                break
            if not (P >> v) & 1:
                continue
            after = P & ~(nbr[v] | (1 << v))
            if 1 + self.size(after) == need:
                chosen |= 1 << v
                need -= 1
                P = after
            else:
                P &= ~(1 << v)
        return chosen


def _split(nbr, P: int) -> list:
    comps = []
    rest = P
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            new = 0
            for v in bits(frontier):
                new |= nbr[v]
            new &= rest & ~comp
            comp |= new
            frontier = new
        comps.append(comp)
        rest &= ~comp
    return comps


def _greedy_stable(nbr, P: int) -> int:
    chosen = 0
    while P:
        v = min(bits(P), key=lambda u: (popcount(nbr[u] & P), u))
        chosen |= 1 << v
        P &= ~(nbr[v] | (1 << v))
    return chosen


def independence_number(G: Graph, S: Optional[Iterable[int]] = None, limit: int = ALPHA_EXACT_LIMIT,
                        exact: bool = True) -> int:
    """Exact stability number of ``G[S]``.

    Raises LimitExceeded when ``|S| > limit`` and ``exact`` is set; with
    ``exact=False`` a greedy lower bound is returned instead.
    """
    P = _mask_of(G, S)
    if popcount(P) > limit:
        if exact:
            raise LimitExceeded(f"|S|={popcount(P)} exceeds exact alpha limit {limit}")
        return popcount(_greedy_stable(G._nbr, P))
    return _StableSolver(G).size(P)


def maximum_stable_set(G: Graph, S: Optional[Iterable[int]] = None, limit: int = ALPHA_EXACT_LIMIT) -> frozenset:
    """The lexicographically smallest maximum stable set of ``G[S]``."""
    P = _mask_of(G, S)
    if popcount(P) > limit:
        raise LimitExceeded(f"|S|={popcount(P)} exceeds exact alpha limit {limit}")
    return to_set(_StableSolver(G).lexmin_set(P))


# ---------------------------------------------------------------------------
# cliques and clique covers


def maximal_clique_masks(G: Graph, S: Optional[int] = None) -> list:
    """All maximal cliques of ``G[S]`` (Bron-Kerbosch with Tomita pivoting), sorted."""
    P0 = G.all_mask if S is None else S
    nbr = G._nbr
    out = []

    def expand(R, P, X):
        if not P and not X:
            out.append(R)
            return
        PX = P | X
        pivot = max(bits(PX), key=lambda u: popcount(nbr[u] & P))
        for v in bits(P & ~nbr[pivot]):
            bit = 1 << v
            expand(R | bit, P & nbr[v], X & nbr[v])
            P &= ~bit
            X |= bit

    if P0:
        expand(0, P0, 0)
    out.sort(key=lambda m: tuple(bits(m)))
    return out


@dataclass(frozen=True)
class CliqueCoverSet:
    """A vertex set with a certifying partition into cliques."""

    members: frozenset
    cover: tuple
    kappa_certified: int
    exact: bool = False

    def validate(self, G: Graph) -> bool:
        seen = set()
        for part in self.cover:
            if not part or seen & part:
                return False
            if not G.is_clique_mask(G.mask(part)):
                return False
            seen |= part
        return seen == set(self.members) and self.kappa_certified == len(self.cover)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))


def cover_from_cliques(G: Graph, members: Iterable[int], cliques: Iterable[Iterable[int]],
                       exact: bool = False) -> CliqueCoverSet:
    """Build a partition from covering cliques (first clique wins); uncovered members become singletons."""
    members = frozenset(members)
    left = set(members)
    parts = []
    for c in cliques:
        part = frozenset(v for v in c if v in left)
        if part:
            parts.append(part)
            left -= part
    for v in sorted(left):
        parts.append(frozenset([v]))
    return CliqueCoverSet(members, tuple(parts), len(parts), exact)


def _greedy_cover(G: Graph, P: int) -> list:
    nbr = G._nbr
    parts = []
    while P:
        v = min(bits(P), key=lambda u: (popcount(nbr[u] & P), u))
        clique = 1 << v
        cand = nbr[v] & P
        while cand:
            u = max(bits(cand), key=lambda w: (popcount(nbr[w] & cand), -w))
            clique |= 1 << u
            cand &= nbr[u]
        parts.append(clique)
        P &= ~clique
    return parts


def _exact_cover(G: Graph, P: int) -> list:
    nbr = G._nbr
    cliques = maximal_clique_masks(G, P)
    containing = {v: [c for c in cliques if (c >> v) & 1] for v in bits(P)}
    for v in containing:
        containing[v].sort(key=lambda c: -popcount(c))
    best = [_greedy_cover(G, P)]

    def lower(U):
        return popcount(_greedy_stable(nbr, U))

    def rec(U, chosen):
        if not U:
            if len(chosen) < len(best[0]):
                best[0] = list(chosen)
            return
        if len(chosen) + lower(U) >= len(best[0]):
            return
        v = min(bits(U), key=lambda u: (len(containing[u]), u))
        tried = set()
        for c in containing[v]:
            part = c & U
            if part in tried:
                continue
            tried.add(part)
            chosen.append(c)
            rec(U & ~c, chosen)
            chosen.pop()

    rec(P, [])
    # turn the cover into a partition
    parts = []
    left = P
    for c in best[0]:
        part = c & left
        if part:
            parts.append(part)
            left &= ~part
    return parts


def has_induced_c4_mask(G: Graph, P: int) -> bool:
    nbr = G._nbr
    for u in bits(P):
        for v in bits(P & ~nbr[u] & ~((1 << (u + 1)) - 1)):
            common = nbr[u] & nbr[v] & P
            for w in bits(common):
                if common & ~nbr[w] & ~(1 << w):
                    return True
    return False


def clique_cover_number(G: Graph, S: Optional[Iterable[int]] = None, limit: int = KAPPA_EXACT_LIMIT) -> CliqueCoverSet:
    """Clique cover of ``G[S]``: exact up to ``limit`` vertices, greedy (certified upper bound) beyond."""
    P = _mask_of(G, S)
    exact = popcount(P) <= limit
    parts = _exact_cover(G, P) if exact else _greedy_cover(G, P)
    cover = tuple(sorted((to_set(p) for p in parts), key=lambda s: min(s)))
    result = CliqueCoverSet(to_set(P), cover, len(cover), exact)
    if exact and P and not has_induced_c4_mask(G, P):
        a = _StableSolver(G).size(P)
        # complements of C4-free graphs are 2K2-free, so chi <= C(omega+1, 2)
        if result.kappa_certified > a * (a + 1) // 2:
            raise AssertionError("clique cover exceeds the binomial bound on a C4-free set")
    return result


def kappa(G: Graph, S: Optional[Iterable[int]] = None, limit: int = KAPPA_EXACT_LIMIT) -> int:
    return clique_cover_number(G, S, limit).kappa_certified


def best_cover(G: Graph, S: Iterable[int], candidates: Iterable[CliqueCoverSet] = (),
               limit: int = KAPPA_EXACT_LIMIT) -> CliqueCoverSet:
    """The smallest certified cover among the computed one and any supplied candidates."""
    S = frozenset(S)
    best = clique_cover_number(G, S, limit)
    for c in candidates:
        if c.members == S and c.kappa_certified < best.kappa_certified and c.validate(G):
            best = c
    return best


# ---------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> Graph:
    """Parse ``p <n> <m>`` / ``e <u> <v>`` text; ``c`` lines are comments."""
    n = None
    m_declared = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "p":
                if n is not None:
                    raise ParseError(f"line {lineno}: second header")
                # tolerate a DIMACS-style 'p edge n m'
                nums = [int(x) for x in parts[1:] if x.lstrip("-").isdigit()]
                n, m_declared = nums[0], nums[1]
                if n < 0 or m_declared < 0:
                    raise ParseError(f"line {lineno}: negative size")
            elif tag == "e":
                if n is None:
                    raise ParseError(f"line {lineno}: edge before header")
                u, v = int(parts[1]), int(parts[2])
                if u == v:
                    raise ParseError(f"line {lineno}: self-loop at {u}")
                if not (0 <= u < n and 0 <= v < n):
                    raise ParseError(f"line {lineno}: vertex out of range")
                key = (min(u, v), max(u, v))
                if key in seen:
                    raise ParseError(f"line {lineno}: duplicate edge {key}")
                seen.add(key)
                edges.append(key)
            else:
                raise ParseError(f"line {lineno}: unknown record '{tag}'")
        except (IndexError, ValueError) as exc:
            raise ParseError(f"line {lineno}: malformed record") from exc
    if n is None:
        raise ParseError("missing 'p' header")
    if m_declared != len(edges):
        raise ParseError(f"header declares {m_declared} edges, found {len(edges)}")
    return Graph(n, edges)


def format_graph(G: Graph) -> str:
    H = G
    if G.vertices != tuple(range(G.n)):
        H, _ = G.relabeled()
    lines = [f"p {H.n} {H.m}"]
    lines.extend(f"e {u} {v}" for u, v in H.edges())
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(G: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(G))


def is_chordal(G: Graph, S: Optional[Iterable[int]] = None) -> bool:
    """Chordality of ``G[S]`` via maximum cardinality search and a PEO check."""
    return perfect_elimination_order(G, S) is not None


def perfect_elimination_order(G: Graph, S: Optional[Iterable[int]] = None) -> Optional[list]:
    """A perfect elimination ordering of ``G[S]`` or None if it is not chordal."""
    P = _mask_of(G, S)
    nbr = G._nbr
    weight = {v: 0 for v in bits(P)}
    order = []
    left = P
    while left:
        v = max(bits(left), key=lambda u: (weight[u], -u))
        order.append(v)
        left &= ~(1 << v)
        for u in bits(nbr[v] & left):
            weight[u] += 1
    peo = order[::-1]
    pos = {v: i for i, v in enumerate(peo)}
    for v in peo:
        later = [u for u in bits(nbr[v] & P) if pos[u] > pos[v]]
        if not later:
            continue
        parent = min(later, key=lambda u: pos[u])
        need = to_mask(u for u in later if u != parent)
        if need & ~nbr[parent]:
            return None
    return peo
