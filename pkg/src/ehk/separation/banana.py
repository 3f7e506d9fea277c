"""Separators for general even-hole-free graphs: hub partitions, the clique Menger step and the hub induction."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..errors import (Adjacent, BisimplicialMissing, CliqueTooLarge, EhkError, LimitExceeded, NotCooperative,
                      PostconditionFailed, PreconditionFailed)
from ..graph import (CliqueCoverSet, Graph, best_cover, bits, component_containing, cover_from_cliques,
                     maximal_clique_masks, maximum_stable_set, popcount, separates, shortcut, to_set)
from ..structures import hubs
from .constants import THEORY, log2
from .hubfree import ab_separator_hubfree
from .rebalance import rebalance_separator
from .separators import SeparatorReport, exact_min_clique_separator, finish
from .stars import cooperative_check, lift_separator, star_separations_and_core


def clique_number(G: Graph, S: Optional[Iterable[int]] = None) -> int:
    m = G.all_mask if S is None else G.mask(S)
    return max((popcount(c) for c in maximal_clique_masks(G, m)), default=0)


def _cover_at_most_two(G: Graph, m: int) -> bool:
    """kappa(G[m]) <= 2, i.e. the complement of G[m] is bipartite."""
    colour = {}
    for s in bits(m):
        if s in colour:
            continue
        colour[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in bits(m & ~G.nbr_mask(u) & ~(1 << u)):
                if w not in colour:
                    colour[w] = 1 - colour[u]
                    stack.append(w)
                elif colour[w] == colour[u]:
                    return False
    return True


def bisimplicial_vertex(G: Graph, m: int) -> Optional[int]:
    """A vertex v of G[m] whose neighbourhood in G[m] is covered by two cliques."""
    for v in sorted(bits(m), key=lambda u: (popcount(G.nbr_mask(u) & m), u)):
        if _cover_at_most_two(G, G.nbr_mask(v) & m):
            return v
    return None


@dataclass
class HubPartition:
    layers: list                  # list of frozensets S_1..S_k
    t: int
    degree_bound: int             # 8t
    log_bound: float              # 2t log n
    within_bound: bool
    witnesses: list = field(default_factory=list)   # a bisimplicial vertex per round

    @property
    def order(self) -> int:
        return len(self.layers)


def hub_partition(G: Graph, t: Optional[int] = None, limit: int = 40) -> HubPartition:
    """Peel G into stable layers whose vertices have degree <= 8t in what is left.

    Each layer is a maximum stable set of the residual vertices of degree
    at most 8t (greedy maximal once that set passes ``limit``).  Every
    residual graph is checked for a vertex whose neighbourhood is covered
    by two cliques.
    """
    w = clique_number(G)
    if t is None:
        t = max(1, w - 1)
    if w > t + 1:
        raise CliqueTooLarge(f"clique of size {w} but t = {t}")
    bound = 8 * t
    rest = G.all_mask
    layers = []
    witnesses = []
    while rest:
        v = bisimplicial_vertex(G, rest)
        if v is None:
            raise BisimplicialMissing(f"no vertex with a neighbourhood covered by two cliques among {popcount(rest)}")
        witnesses.append(v)
        low = [u for u in bits(rest) if popcount(G.nbr_mask(u) & rest) <= bound]
        if not low:
            raise PostconditionFailed("no low-degree vertex left")
        try:
            layer = maximum_stable_set(G, low, limit)
        except LimitExceeded:
            layer = set()
            for u in sorted(low, key=lambda u: (popcount(G.nbr_mask(u) & rest), u)):
                if not G.neighbors(u) & layer:
                    layer.add(u)
            layer = frozenset(layer)
        for u in layer:
            if popcount(G.nbr_mask(u) & rest) > bound:
                raise PostconditionFailed(f"{u} has degree above {bound}")
        if not G.is_stable_mask(G.mask(layer)):
            raise PostconditionFailed("layer is not stable")
        layers.append(layer)
        rest &= ~G.mask(layer)
    log_bound = 2 * t * log2(G.n)
    return HubPartition(layers, t, bound, log_bound, len(layers) <= log_bound, witnesses)


# ---------------------------------------------------------------------------
# clique Menger


@dataclass
class MengerResult:
    arm: str                      # "separator" or "paths"
    separator: Optional[CliqueCoverSet]
    paths: list
    hits: dict                    # clique (frozenset) -> number of paths meeting it
    t: int
    f: float
    cliques: int
    frozen: int
    bound: float
    verified: bool


def _lightest_path(G: Graph, A: int, B: int, allowed: int, weight) -> Optional[tuple]:
    """A path from A to B through ``allowed`` minimising the summed vertex weights."""
    dist = {}
    parent = {}
    heap = []
    for s in bits(A & allowed):
        dist[s] = weight(s)
        parent[s] = None
        heap.append((dist[s], s))
    heapq.heapify(heap)
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if (B >> u) & 1:
            path = [u]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return tuple(reversed(path))
        for w in bits(G.nbr_mask(u) & allowed):
            nd = d + weight(w)
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                parent[w] = u
                heapq.heappush(heap, (nd, w))
    return None


def _minimal_set_separator(G: Graph, S: int, A: int, B: int) -> int:
    """Drop vertices of S (highest id first) while S still separates A from B."""
    for v in sorted(bits(S), reverse=True):
        T = S & ~(1 << v)
        if not _joined(G, T, A, B):
            S = T
    return S


def _joined(G: Graph, S: int, A: int, B: int) -> bool:
    free = G.all_mask & ~S
    seen = A & free
    frontier = seen
    while frontier:
        if seen & B:
            return True
        frontier = G.nbhd_mask(frontier) & free & ~seen
        seen |= frontier
    return bool(seen & B)


def clique_menger(G: Graph, A: Iterable[int], B: Iterable[int], f, cliques: Optional[list] = None) -> MengerResult:
    """Either many A-B paths that every maximal clique meets fewer than 4t times, or a clique-covered cut.

    Paths are packed greedily (lightest by current hit counts, then
    shortcut to induced).  A clique that has met 4t - 1 paths is frozen
    and its vertices are avoided.  Reaching t*f paths gives the path arm;
    running out of paths means the frozen cliques separate A from B, and
    the separator arm returns a minimal subset of them with a cover.
    """
    Am, Bm = G.mask(A), G.mask(B)
    if Am & Bm:
        raise PreconditionFailed("A and B must be disjoint")
    cl = [c for c in (cliques if cliques is not None else maximal_clique_masks(G))]
    t = max(1, math.ceil(2 * log2(max(1, len(cl)))))
    target = t * f
    cap = 4 * t - 1
    L = max(1.0, log2(G.n))
    bound = float(f) * L * L
    owners = {v: [i for i, c in enumerate(cl) if (c >> v) & 1] for v in G.vertices}
    hits = [0] * len(cl)
    frozen = 0
    frozen_idx = []
    paths = []
    while len(paths) < target:
        allowed = G.all_mask & ~frozen
        path = _lightest_path(G, Am, Bm, allowed, lambda v: 1 + max((hits[i] for i in owners[v]), default=0))
        if path is None:
            break
        path = shortcut(G, path)
        paths.append(path)
        met = set()
        for v in path:
            met.update(owners[v])
        for i in met:
            hits[i] += 1
            if hits[i] >= cap:
                frozen |= cl[i]
                frozen_idx.append(i)
    hit_map = {to_set(cl[i]): hits[i] for i in range(len(cl)) if hits[i]}
    if len(paths) >= target:
        ok = all(_is_induced(G, p) and (Am >> p[0]) & 1 and (Bm >> p[-1]) & 1 for p in paths)
        for i, c in enumerate(cl):
            n_hit = sum(1 for p in paths if any((c >> v) & 1 for v in p))
            ok = ok and n_hit < 4 * t
        return MengerResult("paths", None, paths, hit_map, t, f, len(cl), len(frozen_idx), bound, ok)
    S = _minimal_set_separator(G, frozen, Am, Bm)
    cand = cover_from_cliques(G, to_set(S), [to_set(cl[i]) for i in frozen_idx])
    cover = best_cover(G, to_set(S), [cand])
    ok = not _joined(G, S, Am, Bm) and cover.validate(G)
    return MengerResult("separator", cover, paths, hit_map, t, f, len(cl), len(frozen_idx), bound, ok)


def _is_induced(G: Graph, p) -> bool:
    for i, u in enumerate(p):
        for j in range(i + 1, len(p)):
            if G.has_edge(u, p[j]) != (j == i + 1):
                return False
    return True


# ---------------------------------------------------------------------------
# induction on hubs


@dataclass
class InductionStats:
    depth: int = 0
    fallbacks: int = 0
    direct: int = 0               # separators taken from a non-cooperative vertex
    trace: list = field(default_factory=list)


def _exact(G: Graph, a: int, b: int) -> frozenset:
    return exact_min_clique_separator(G, a, b).separator.members


def _noncooperative_cut(G: Graph, v: int, a: int, b: int, H: frozenset, eps) -> frozenset:
    """hub-free separator of v from the far end inside its component, plus the hubs around v."""
    far = b if not G.has_edge(v, b) else a
    closed = G.nbr_mask(v) | (1 << v)
    D = component_containing(G, G.all_mask & ~closed, far)
    X = to_set(G.nbhd_mask(D) & G.all_mask & ~D) - H
    Gp = G.induced(to_set(D) | X | {v})
    rep = ab_separator_hubfree(Gp, v, far, eps=eps, check_hubs=False)
    return rep.vertices | ((G.neighbors(v) & H) - {a, b})


def diminduction(G: Graph, a: int, b: int, t: Optional[int] = None, eps=None, stats: Optional[InductionStats] = None,
                 depth: int = 0) -> frozenset:
    """An a-b separator by induction on the hubs outside {a, b}.

    With no such hubs the hub-free routine applies.  Otherwise S1, the
    first layer of a hub partition of those hubs, cuts out the star bag;
    the bag has fewer hubs, so the recursion ends.  The bag separator is
    trimmed to a minimal one, rebalanced against S1 and lifted back.
    """
    stats = stats if stats is not None else InductionStats()
    stats.depth = max(stats.depth, depth)
    H = hubs(G)
    rest = H - {a, b}
    if not rest:
        rep = ab_separator_hubfree(G, a, b, eps=eps, check_hubs=False)
        stats.fallbacks += rep.fallbacks
        stats.trace.append({"depth": depth, "step": "hub-free", "kappa": rep.kappa, "n": G.n})
        return rep.vertices
    part = hub_partition(G.induced(rest), t)
    S1 = part.layers[0]
    hm = G.mask(H)
    d = max(popcount(G.nbr_mask(v) & hm) for v in S1)
    for v in sorted(S1):
        if not cooperative_check(G, v, a, b) and not (G.has_edge(v, a) and G.has_edge(v, b)):
            stats.direct += 1
            try:
                Z = _noncooperative_cut(G, v, a, b, H, eps)
            except EhkError as e:
                stats.fallbacks += 1
                stats.trace.append({"depth": depth, "step": "exact-fallback", "reason": f"{type(e).__name__}: {e}"})
                return _exact(G, a, b)
            if separates(G, Z, a, b):
                stats.trace.append({"depth": depth, "step": "non-cooperative", "v": v})
                return Z
    try:
        sc = star_separations_and_core(G, S1, a, b, d=d, hub_set=H)
    except (EhkError, NotCooperative) as e:
        stats.fallbacks += 1
        stats.trace.append({"depth": depth, "step": "exact-fallback", "reason": f"{type(e).__name__}: {e}"})
        return _exact(G, a, b)
    bag = G.induced(sc.beta)
    stats.trace.append({"depth": depth, "step": "star-bag", "S1": len(S1), "core": len(sc.core), "bag": bag.n,
                        "n": G.n})
    Y1 = diminduction(bag, a, b, t, eps, stats, depth + 1)
    cb = component_containing(bag, bag.all_mask & ~bag.mask(Y1), b)
    y_b = bag.nbhd_mask(cb) & bag.all_mask & ~cb
    ca = component_containing(bag, bag.all_mask & ~y_b, a)
    Y2 = to_set(bag.nbhd_mask(ca) & bag.all_mask & ~ca)
    Y = Y2
    S1_bag = S1 & sc.beta
    if Y2 & S1_bag:
        try:
            rb = rebalance_separator(bag, a, b, Y2, S1_bag, eps=eps)
            stats.fallbacks += rb.fallbacks
            if rb.verified:
                Y = rb.cover.members
            stats.trace.append({"depth": depth, "step": "rebalance", "mu_before": rb.mu_before,
                                "mu_after": rb.mu_after})
        except EhkError as e:
            stats.fallbacks += 1
            stats.trace.append({"depth": depth, "step": "rebalance-skipped", "reason": f"{type(e).__name__}: {e}"})
    lift = lift_separator(G, sc, Y, d=d, hub_set=H, eps=eps)
    stats.fallbacks += lift.fallbacks
    if not lift.verified:
        stats.fallbacks += 1
        stats.trace.append({"depth": depth, "step": "exact-fallback", "reason": "lift did not separate"})
        return _exact(G, a, b)
    stats.trace.append({"depth": depth, "step": "lift", "kappa": lift.cover.kappa_certified})
    return lift.cover.members


def ab_separator(G: Graph, a: int, b: int, f=None, eps=None, route: str = "menger") -> SeparatorReport:
    """Separate non-adjacent a and b in an even-hole-free graph.

    ``route="menger"`` first runs the clique Menger step between N(a) and
    N(b) in G - {a, b} (``f`` defaults to the pipeline constant, which always
    lands in the separator arm).  On the path arm the hub induction runs on
    the union of the paths, its separator is checked against the counting
    argument (it must meet every path, so some clique meets at least
    t*f / kappa of them), and the returned separator comes from the hub
    induction on G itself.  ``route="induction"`` skips the Menger step.
    """
    if a == b or G.has_edge(a, b):
        raise Adjacent(f"{a} and {b} are adjacent")
    stats = InductionStats()
    extras = {"route": route}
    n = G.n
    if route == "menger":
        f = THEORY.menger_f(n) if f is None else f
        # common neighbours are in every separator; in a C4-free graph they form one clique
        common = G.neighbors(a) & G.neighbors(b)
        Gp = G.without({a, b} | common)
        res = clique_menger(Gp, G.neighbors(a) - common, G.neighbors(b) - common, f)
        extras.update({"arm": res.arm, "menger_t": res.t, "paths": len(res.paths), "frozen": res.frozen,
                       "menger_verified": res.verified})
        bound = THEORY.banana_bound(n)
        if res.arm == "separator":
            cover, ok = finish(G, a, b, res.separator.members | common)
            return SeparatorReport(a, b, cover, ok, bound, 0, [], extras)
        keep = {a, b}
        for p in res.paths:
            keep.update(p)
        G2 = G.induced(keep)
        Z2 = diminduction(G2, a, b, None, eps, stats)
        c2 = finish(G2, a, b, Z2)[0]
        worst = max((sum(1 for p in res.paths if c & set(p)) for c in c2.cover), default=0)
        extras.update({"union_n": G2.n, "union_kappa": c2.kappa_certified, "union_separates": separates(G2, Z2, a, b),
                       "max_paths_per_clique": worst, "counting_holds": worst * c2.kappa_certified >= len(res.paths)})
        stats = InductionStats()
    elif route != "induction":
        raise PreconditionFailed(f"unknown route {route!r}")
    t = max(1, clique_number(G) - 1)
    bound = THEORY.clique_bound(n, t)
    Z = diminduction(G, a, b, t, eps, stats)
    cover, ok = finish(G, a, b, Z)
    extras.update({"depth": stats.depth, "direct": stats.direct})
    return SeparatorReport(a, b, cover, ok, bound, stats.fallbacks, stats.trace, extras)
