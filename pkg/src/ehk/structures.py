"""Detectors and classifiers for holes, thetas, prisms, pyramids, wheels and their relatives.

Every detector is built on one primitive: enumeration of holes (induced
cycles of length at least four).  Each structure contains a hole made of
two of its paths, so it can be found by enumerating holes and then
completing the structure with a shortest-path search in the region that
the remaining part is allowed to use.  Shortest set-to-set paths have no
chords, which gives the inducedness conditions for free.

Results are exact unless a budget runs out, in which case BudgetExceeded
is raised (with any partial results attached).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Optional

from .errors import BudgetExceeded, LimitExceeded
from .graph import (Graph, bfs_path, bits, budget, component_masks, components, independence_number,
                    popcount, to_mask, to_set)

HOLE_LIMIT = 64
DETECT_LIMIT = 30
DEFAULT_STEPS = 2_000_000
DEFAULT_PATHS = 100_000

KINDS = ("Hole", "Theta", "Prism", "NearPrism", "Pyramid", "Wheel",
         "ExtendedNearPrism", "LoadedPyramid", "C4")


@dataclass(frozen=True)
class StructureWitness:
    """A detected configuration; ``parts`` maps part names to vertices or vertex tuples."""

    kind: str
    parts: dict = field(hash=False)

    def vertices(self) -> frozenset:
        out = set()
        for value in self.parts.values():
            if isinstance(value, int):
                out.add(value)
            elif isinstance(value, StructureWitness):
                out |= value.vertices()
            else:
                out.update(value)
        return frozenset(out)

    def describe(self) -> str:
        items = []
        for key, value in self.parts.items():
            if isinstance(value, StructureWitness):
                value = value.describe()
            elif not isinstance(value, int):
                value = " ".join(str(v) for v in value)
            items.append(f"{key}=[{value}]")
        return f"{self.kind} " + " ".join(items)


@dataclass
class WheelClassification:
    is_proper: bool
    is_even: bool
    is_universal: bool
    sectors: list
    long_sectors: list


class _Counter:
    def __init__(self, limit: int, what: str):
        self.left = limit
        self.what = what

    def tick(self, partial=None):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded(f"{self.what} budget exhausted", partial)


# ---------------------------------------------------------------------------
# holes


def _holes_from(G: Graph, s: int, allowed: int, counter: _Counter) -> Iterator[tuple]:
    """Holes through ``s`` with all other vertices in ``allowed``.

    Each hole is reported once, oriented so that the vertex after ``s`` is
    smaller than the vertex before it.
    """
    nbr = G._nbr
    Ns = nbr[s] & allowed

    def reach_closer(last, forbid, closers):
        region = allowed & ~forbid & ~Ns
        seen = 1 << last
        frontier = seen
        while frontier:
            step = 0
            for v in bits(frontier):
                step |= nbr[v]
            if step & closers:
                return True
            frontier = step & region & ~seen
            seen |= frontier
        return False

    def rec(path, forbid):
        counter.tick()
        last = path[-1]
        p1 = path[1]
        cand = nbr[last] & allowed & ~forbid
        if len(path) >= 3:
            for w in bits(cand & Ns & ~((1 << (p1 + 1)) - 1)):
                yield tuple(path) + (w,)
        ext = cand & ~Ns
        if not ext:
            return
        new_forbid = forbid | nbr[last] | (1 << last)
        closers = Ns & ~new_forbid & ~((1 << (p1 + 1)) - 1)
        for w in bits(ext):
            # a closer must remain reachable from w without touching the path
            if not (nbr[w] & closers) and not reach_closer(w, new_forbid, closers):
                continue
            path.append(w)
            yield from rec(path, new_forbid)
            path.pop()

    for p1 in bits(Ns):
        yield from rec([s, p1], 0)


def iter_holes(G: Graph, S: Optional[Iterable[int]] = None, steps: Optional[int] = None,
               limit: int = HOLE_LIMIT) -> Iterator[tuple]:
    """All holes of ``G[S]``, each once, starting at its smallest vertex."""
    P = G.all_mask if S is None else G.mask(S)
    if popcount(P) > limit:
        raise LimitExceeded(f"hole enumeration limited to {limit} vertices")
    counter = _Counter(budget(steps or DEFAULT_STEPS), "hole search")
    for s in bits(P):
        allowed = P & ~((1 << (s + 1)) - 1)
        yield from _holes_from(G, s, allowed, counter)


def all_holes(G: Graph, max_holes: Optional[int] = None, steps: Optional[int] = None) -> list:
    """Cached list of all holes of ``G``; BudgetExceeded carries the partial list."""
    key = ("holes", max_holes, steps)
    if key in G._cache:
        return G._cache[key]
    cap = budget(max_holes) if max_holes else None
    out = []
    try:
        for h in iter_holes(G, steps=steps):
            out.append(h)
            if cap is not None and len(out) > cap:
                raise BudgetExceeded("max_holes exceeded", out)
    except BudgetExceeded as exc:
        raise BudgetExceeded(str(exc), out) from None
    G._cache[key] = out
    return out


def is_hole(G: Graph, cycle) -> bool:
    cyc = list(cycle)
    L = len(cyc)
    if L < 4 or len(set(cyc)) != L:
        return False
    for i in range(L):
        for j in range(i + 1, L):
            adjacent = j == i + 1 or (i == 0 and j == L - 1)
            if G.has_edge(cyc[i], cyc[j]) != adjacent:
                return False
    return True


def find_even_hole(G: Graph, limit: int = HOLE_LIMIT, steps: Optional[int] = None) -> Optional[StructureWitness]:
    """An even hole of ``G`` or None (certified absence)."""
    if G.n > limit:
        raise LimitExceeded(f"n={G.n} exceeds even-hole limit {limit}")
    for h in iter_holes(G, steps=steps, limit=limit):
        if len(h) % 2 == 0:
            return StructureWitness("Hole", {"H": h})
    return None


def find_hole_through(G: Graph, must_contain: Iterable[int], S: Optional[Iterable[int]] = None,
                      steps: Optional[int] = None) -> Optional[StructureWitness]:
    """Any hole of ``G[S]`` containing every vertex of ``must_contain``."""
    must = sorted(set(must_contain))
    P = G.all_mask if S is None else G.mask(S)
    if not must:
        for h in iter_holes(G, S, steps=steps):
            return StructureWitness("Hole", {"H": h})
        return None
    mm = to_mask(must)
    if mm & ~P:
        return None
    s = must[0]
    counter = _Counter(budget(steps or DEFAULT_STEPS), "hole search")
    for h in _holes_from(G, s, P & ~(1 << s), counter):
        if mm & ~to_mask(h) == 0:
            return StructureWitness("Hole", {"H": h})
    return None


def detect_c4(G: Graph) -> Optional[StructureWitness]:
    nbr = G._nbr
    for u in G.vertices:
        for v in bits(G.all_mask & ~nbr[u] & ~((1 << (u + 1)) - 1)):
            common = nbr[u] & nbr[v]
            for w in bits(common):
                rest = common & ~nbr[w] & ~((1 << (w + 1)) - 1)
                if rest:
                    x = next(bits(rest))
                    return StructureWitness("C4", {"H": (u, w, v, x)})
    return None


# ---------------------------------------------------------------------------
# helpers on holes


def _arc(cyc, i, j):
    """Vertices of the cycle from position i forward to position j inclusive."""
    L = len(cyc)
    out = [cyc[i]]
    while i != j:
        i = (i + 1) % L
        out.append(cyc[i])
    return tuple(out)


def _closed(G: Graph, mask: int) -> int:
    out = mask
    for v in bits(mask):
        out |= G._nbr[v]
    return out


def _attach_classes(G: Graph, hm: int, P: int) -> dict:
    """Map each vertex of ``P`` outside the hole to its neighbour mask on the hole."""
    nbr = G._nbr
    return {v: nbr[v] & hm for v in bits(P & ~hm)}


# ---------------------------------------------------------------------------
# theta


def _theta_on_hole(G: Graph, cyc, P: int) -> Optional[StructureWitness]:
    L = len(cyc)
    hm = to_mask(cyc)
    nbr = G._nbr
    cl = [nbr[v] | (1 << v) for v in cyc]
    for i in range(L):
        for j in range(i + 2, L):
            if i == 0 and j == L - 1:
                continue
            a, b = cyc[i], cyc[j]
            rest = 0
            for k in range(L):
                if k != i and k != j:
                    rest |= cl[k]
            M = P & ~rest & ~hm
            path = bfs_path(G, nbr[a] & M, nbr[b] & M, M)
            if path is None:
                continue
            return StructureWitness("Theta", {
                "a": a, "b": b,
                "P1": _arc(cyc, i, j),
                "P2": tuple(reversed(_arc(cyc, j, i))),
                "P3": (a,) + path + (b,),
            })
    return None


def detect_theta(G: Graph, limit: int = DETECT_LIMIT, steps: Optional[int] = None) -> Optional[StructureWitness]:
    _check_limit(G, limit)
    P = G.all_mask
    for cyc in iter_holes(G, steps=steps):
        w = _theta_on_hole(G, cyc, P)
        if w is not None:
            return w
    return None


def _check_limit(G: Graph, limit: int) -> None:
    if G.n > limit:
        raise LimitExceeded(f"n={G.n} exceeds detector limit {limit}")


# ---------------------------------------------------------------------------
# prisms and near-prisms


def _edge_pairs(L):
    """Pairs of hole positions (i, j) such that edges (i,i+1) and (j,j+1) are disjoint."""
    for i in range(L):
        for j in range(i + 2, L):
            if (j + 1) % L == i:
                continue
            yield i, j


def _prism_on_hole(G: Graph, cyc, P: int, allow_shared: bool, allow_disjoint: bool):
    L = len(cyc)
    hm = to_mask(cyc)
    nbr = G._nbr
    attach = _attach_classes(G, hm, P)
    M = P & ~_closed(G, hm)
    for i, j in _edge_pairs(L):
        u1, u2 = cyc[(i + 1) % L], cyc[i]
        w1, w2 = cyc[j], cyc[(j + 1) % L]
        e = (1 << u1) | (1 << u2)
        f = (1 << w1) | (1 << w2)
        # P1 runs u1..w1 forward, P2 runs u2..w2 backward
        P1 = _arc(cyc, (i + 1) % L, j)
        P2 = tuple(reversed(_arc(cyc, (j + 1) % L, i)))
        if allow_shared and len(P1) >= 3 and len(P2) >= 3:
            for v, att in attach.items():
                if att == e | f:
                    return StructureWitness("NearPrism", {
                        "A": (v, u1, u2), "B": (v, w1, w2),
                        "P1": P1, "P2": P2, "P3": (v,)})
        if allow_disjoint:
            A = to_mask(v for v, att in attach.items() if att == e)
            if not A:
                continue
            B = to_mask(v for v, att in attach.items() if att == f)
            if not B:
                continue
            path = bfs_path(G, A, B, M)
            if path is None:
                continue
            kind = "Prism"
            return StructureWitness(kind, {
                "A": (u1, u2, path[0]), "B": (w1, w2, path[-1]),
                "P1": P1, "P2": P2, "P3": path})
    return None


def detect_prism(G: Graph, limit: int = DETECT_LIMIT, steps: Optional[int] = None) -> Optional[StructureWitness]:
    _check_limit(G, limit)
    for cyc in iter_holes(G, steps=steps):
        w = _prism_on_hole(G, cyc, G.all_mask, False, True)
        if w is not None:
            return w
    return None


def detect_near_prism(G: Graph, limit: int = DETECT_LIMIT, steps: Optional[int] = None) -> Optional[StructureWitness]:
    """A near-prism (triangles sharing at most one vertex); prisms qualify."""
    _check_limit(G, limit)
    for cyc in iter_holes(G, steps=steps):
        w = _prism_on_hole(G, cyc, G.all_mask, True, True)
        if w is not None:
            return w
    return None


# ---------------------------------------------------------------------------
# pyramids


def _pyramids_on_hole(G: Graph, cyc, P: int) -> Iterator[StructureWitness]:
    """Pyramids whose paths P1, P2 form ``cyc`` (one per apex/base-edge choice)."""
    L = len(cyc)
    hm = to_mask(cyc)
    nbr = G._nbr
    attach = _attach_classes(G, hm, P)
    cl = [nbr[v] | (1 << v) for v in cyc]
    for i in range(L):
        b1, b2 = cyc[i], cyc[(i + 1) % L]
        base = (1 << b1) | (1 << b2)
        for k in range(L):
            if k == i or k == (i + 1) % L:
                continue
            a = cyc[k]
            P1 = _arc(cyc, k, i)                              # a .. b1
            P2 = tuple(reversed(_arc(cyc, (i + 1) % L, k)))   # a .. b2
            short = len(P1) == 2 or len(P2) == 2
            # P3 of length one: b3 adjacent to a, b1, b2 only
            if not short:
                for v, att in attach.items():
                    if att == base | (1 << a):
                        yield StructureWitness("Pyramid", {
                            "apex": a, "base": (b1, b2, v),
                            "P1": P1, "P2": P2, "P3": (a, v)})
                        break
            B = to_mask(v for v, att in attach.items() if att == base)
            if not B:
                continue
            rest = 0
            for t in range(L):
                if t != k:
                    rest |= cl[t]
            M = P & ~rest & ~hm
            path = bfs_path(G, nbr[a] & M, B, M)
            if path is None:
                continue
            yield StructureWitness("Pyramid", {
                "apex": a, "base": (b1, b2, path[-1]),
                "P1": P1, "P2": P2, "P3": (a,) + path})


def detect_pyramid(G: Graph, limit: int = DETECT_LIMIT, steps: Optional[int] = None) -> Optional[StructureWitness]:
    _check_limit(G, limit)
    for cyc in iter_holes(G, steps=steps):
        for w in _pyramids_on_hole(G, cyc, G.all_mask):
            if validate_witness(G, w):
                return w
    return None


# ---------------------------------------------------------------------------
# wheels


def classify_wheel(G: Graph, hole, x: int) -> WheelClassification:
    cyc = list(hole)
    L = len(cyc)
    nx = [i for i, v in enumerate(cyc) if G.has_edge(x, v)]
    nset = [cyc[i] for i in nx]
    alpha = independence_number(G, nset) if nset else 0
    sectors = []
    for t, i in enumerate(nx):
        j = nx[(t + 1) % len(nx)]
        sectors.append(_arc(cyc, i, j))
    long_sectors = [s for s in sectors if len(s) > 2]
    return WheelClassification(
        is_proper=alpha >= 3,
        is_even=len(nx) % 2 == 0,
        is_universal=len(nx) == L,
        sectors=sectors,
        long_sectors=long_sectors,
    )


def enumerate_wheels(G: Graph, max_holes: Optional[int] = None, steps: Optional[int] = None) -> list:
    """All wheels ``(H, x)`` over all holes, each with its classification."""
    try:
        holes = all_holes(G, max_holes=max_holes, steps=steps)
    except BudgetExceeded as exc:
        partial = _wheels_over(G, exc.partial or [])
        raise BudgetExceeded(str(exc), partial) from None
    return _wheels_over(G, holes)


def _wheels_over(G: Graph, holes) -> list:
    nbr = G._nbr
    out = []
    for cyc in holes:
        hm = to_mask(cyc)
        for x in bits(G.all_mask & ~hm):
            if popcount(nbr[x] & hm) >= 3:
                w = StructureWitness("Wheel", {"H": cyc, "x": x})
                out.append((w, classify_wheel(G, cyc, x)))
    return out


# ---------------------------------------------------------------------------
# extended near-prisms


def _induced_paths_from(G: Graph, start: int, region: int, targets: int, counter: _Counter,
                        avoid_after_first: int = 0) -> Iterator[tuple]:
    """Induced paths start, q1, ..., qr ending in ``targets`` with q's drawn from ``region``.

    Targets are final vertices only; ``avoid_after_first`` vertices may not be
    adjacent to q2, q3, ... (they may be adjacent to q1).
    """
    nbr = G._nbr

    def rec(path, forbid):
        counter.tick()
        last = path[-1]
        cand = nbr[last] & ~forbid
        for t in bits(cand & targets):
            yield tuple(path) + (t,)
        nxt_forbid = forbid | nbr[last] | (1 << last)
        for w in bits(cand & region & ~targets):
            if len(path) >= 2 and nbr[w] & avoid_after_first:
                continue
            path.append(w)
            yield from rec(path, nxt_forbid)
            path.pop()

    yield from rec([start], ~(region | targets))


def _extended_on_hole(G: Graph, cyc, y: int, P: int, counter: _Counter) -> Optional[StructureWitness]:
    """Hole ``cyc`` (starting at x) is P1 u P3; complete P2 through y."""
    L = len(cyc)
    x = cyc[0]
    hm = to_mask(cyc)
    nbr = G._nbr
    attach = _attach_classes(G, hm, P & ~(1 << y))
    M = P & ~_closed(G, hm)
    for i in range(1, L - 1):
        for j in range(i + 1, L - 1):
            u_in, u_out = cyc[i], cyc[i + 1]        # u_in on P1, u_out on P3
            w_out, w_in = cyc[j], cyc[j + 1]        # w_out on P3, w_in on P1
            e = (1 << u_in) | (1 << u_out)
            f = (1 << w_out) | (1 << w_in)
            A = to_mask(v for v, att in attach.items() if att == e)
            if not A:
                continue
            B = to_mask(v for v, att in attach.items() if att == f)
            if not B:
                continue
            # first half: y .. a2 through M; second half: y .. b2 avoiding it
            for q in _induced_paths_from(G, y, M & ~A & ~B, A, counter):
                qm = to_mask(q[1:])
                block = _closed(G, qm)
                M2 = M & ~block & ~(1 << y)
                direct = nbr[y] & B & ~block
                if direct:
                    tail = (next(bits(direct)),)
                else:
                    tail = bfs_path(G, nbr[y] & M2 & ~B, B & ~block, M2 & ~A & ~B)
                    if tail is None:
                        continue
                P1 = _arc(cyc, j + 1, i)          # w_in .. x .. u_in
                P3 = _arc(cyc, i + 1, j)          # u_out .. w_out
                P2 = tuple(reversed(q)) + tail    # a2 .. y .. b2
                near = StructureWitness("NearPrism", {
                    "A": (u_in, P2[0], u_out), "B": (w_in, P2[-1], w_out),
                    "P1": tuple(reversed(P1)), "P2": P2, "P3": P3})
                w = StructureWitness("ExtendedNearPrism", {
                    "near_prism": near, "cross_edge": (x, y)})
                if validate_witness(G, w):
                    return w
    return None


def detect_extended_near_prism_with_cross_edge(G: Graph, a: int, b: int, limit: int = DETECT_LIMIT,
                                               steps: Optional[int] = None) -> Optional[StructureWitness]:
    """An extended near-prism whose cross-edge is ``ab`` (a in P1*, b in P2*), or None."""
    if not G.has_edge(a, b):
        raise ValueError("ab must be an edge")
    _check_limit(G, limit)
    counter = _Counter(budget(steps or DEFAULT_STEPS), "extended near-prism search")
    nbr = G._nbr
    for x, y in ((a, b), (b, a)):
        # the hole P1 u P3 meets N[y] only in x
        allowed = (G.all_mask & ~nbr[y] & ~(1 << y)) & ~(1 << x)
        for cyc in _holes_from(G, x, allowed, counter):
            w = _extended_on_hole(G, cyc, y, G.all_mask, counter)
            if w is not None:
                if x != a:
                    w = StructureWitness("ExtendedNearPrism", {
                        "near_prism": w.parts["near_prism"], "cross_edge": (a, b)})
                return w
    return None


# ---------------------------------------------------------------------------
# loaded pyramids and hubs


def _loaded_on_hole(G: Graph, cyc, b2_filter: Optional[int], counter: _Counter,
                    first_only: bool = True) -> Iterator[StructureWitness]:
    """Loaded pyramids whose P1 u P2 is ``cyc`` with P2 the single edge a-b2."""
    L = len(cyc)
    hm = to_mask(cyc)
    nbr = G._nbr
    P = G.all_mask
    attach = _attach_classes(G, hm, P)
    for pos in range(L):
        b2 = cyc[pos]
        if b2_filter is not None and b2 != b2_filter:
            continue
        for step in (1, -1):
            a = cyc[(pos - step) % L]
            b1 = cyc[(pos + step) % L]
            # P1 runs from a away from b2 around to b1
            P1 = tuple(cyc[(pos - step * t) % L] for t in range(1, L))
            B = to_mask(v for v, att in attach.items() if att == (1 << b1) | (1 << b2))
            if not B:
                continue
            rest = _closed(G, hm & ~(1 << a))
            M = P & ~rest & ~hm
            p1_int = to_mask(P1[1:-1])
            p1_minus_b1 = to_mask(P1[:-1])
            for tail in _induced_paths_from(G, a, M, B, counter, avoid_after_first=1 << a):
                P3 = tail
                if len(P3) < 3:
                    continue
                sigma = hm | to_mask(P3)
                U = P & ~sigma & ~_closed(G, to_mask(P3))
                nb2 = nbr[b2]
                near_p1 = 0
                for v in bits(p1_minus_b1):
                    near_p1 |= nbr[v]
                near_int = 0
                for v in bits(p1_int):
                    near_int |= nbr[v]
                single = U & nb2 & near_int
                if single:
                    path = (next(bits(single)),)
                else:
                    S1 = U & nb2 & ~near_p1
                    T = U & ~nb2 & near_int
                    Mid = U & ~nb2 & ~near_p1
                    path = bfs_path(G, S1, T, Mid) if S1 and T else None
                if path is None:
                    continue
                pyr = StructureWitness("Pyramid", {
                    "apex": a, "base": (b1, b2, P3[-1]), "P1": P1, "P2": (a, b2), "P3": P3})
                yield StructureWitness("LoadedPyramid", {"pyramid": pyr, "P": path, "corner": b2})
                if first_only:
                    break


def detect_loaded_pyramid(G: Graph, max_holes: Optional[int] = None, steps: Optional[int] = None) -> Optional[StructureWitness]:
    counter = _Counter(budget(steps or DEFAULT_STEPS), "loaded pyramid search")
    for cyc in all_holes(G, max_holes=max_holes, steps=steps):
        for w in _loaded_on_hole(G, cyc, None, counter):
            return w
    return None


def loaded_pyramid_corners(G: Graph, max_holes: Optional[int] = None, steps: Optional[int] = None) -> dict:
    """Map each loaded pyramid corner to one witness."""
    key = ("loaded", max_holes, steps)
    if key in G._cache:
        return G._cache[key]
    counter = _Counter(budget(steps or DEFAULT_STEPS), "loaded pyramid search")
    found = {}
    try:
        for cyc in all_holes(G, max_holes=max_holes, steps=steps):
            for b2 in cyc:
                if b2 in found:
                    continue
                for w in _loaded_on_hole(G, cyc, b2, counter):
                    found[b2] = w
                    break
    except BudgetExceeded as exc:
        raise BudgetExceeded(str(exc), dict(found)) from None
    G._cache[key] = found
    return found


def proper_wheel_centers(G: Graph, max_holes: Optional[int] = None, steps: Optional[int] = None) -> dict:
    """Map each proper wheel centre to one proper wheel hole."""
    key = ("proper", max_holes, steps)
    if key in G._cache:
        return G._cache[key]
    nbr = G._nbr
    found = {}
    try:
        holes = all_holes(G, max_holes=max_holes, steps=steps)
    except BudgetExceeded as exc:
        holes = exc.partial or []
        partial = _proper_over(G, holes, nbr, found)
        raise BudgetExceeded(str(exc), partial) from None
    _proper_over(G, holes, nbr, found)
    G._cache[key] = found
    return found


def _proper_over(G, holes, nbr, found):
    for cyc in holes:
        hm = to_mask(cyc)
        for x in bits(G.all_mask & ~hm):
            if x in found:
                continue
            att = nbr[x] & hm
            if popcount(att) >= 3 and independence_number(G, att) >= 3:
                found[x] = cyc
    return found


def hubs(G: Graph, max_holes: Optional[int] = None, steps: Optional[int] = None) -> frozenset:
    """Proper wheel centres together with loaded pyramid corners."""
    key = ("hubs", max_holes, steps)
    if key in G._cache:
        return G._cache[key]
    try:
        wheels = proper_wheel_centers(G, max_holes, steps)
        loaded = loaded_pyramid_corners(G, max_holes, steps)
    except BudgetExceeded as exc:
        raise BudgetExceeded(str(exc), frozenset(exc.partial or ())) from None
    out = frozenset(wheels) | frozenset(loaded)
    G._cache[key] = out
    return out


# ---------------------------------------------------------------------------
# class membership


def in_class_C(G: Graph, steps: Optional[int] = None) -> tuple:
    """``(True, None)`` if G has no C4, theta, prism or even wheel, else ``(False, witness)``."""
    w = detect_c4(G)
    if w is not None:
        return False, w
    holes = all_holes(G, steps=steps)
    nbr = G._nbr
    for cyc in holes:
        hm = to_mask(cyc)
        for x in bits(G.all_mask & ~hm):
            k = popcount(nbr[x] & hm)
            if k >= 4 and k % 2 == 0:
                return False, StructureWitness("Wheel", {"H": cyc, "x": x})
    for cyc in holes:
        w = _theta_on_hole(G, cyc, G.all_mask)
        if w is not None:
            return False, w
        w = _prism_on_hole(G, cyc, G.all_mask, False, True)
        if w is not None:
            return False, w
    return True, None


def is_even_hole_free(G: Graph) -> bool:
    return find_even_hole(G) is None


# ---------------------------------------------------------------------------
# pyramid-relative classification


def _pyramid_paths(pyr: StructureWitness):
    return [tuple(pyr.parts["P1"]), tuple(pyr.parts["P2"]), tuple(pyr.parts["P3"])]


def is_local(pyr: StructureWitness, X: Iterable[int]) -> bool:
    X = set(X)
    if X <= set(pyr.parts["base"]):
        return True
    return any(X <= set(p) for p in _pyramid_paths(pyr))


def _order_path(G: Graph, X) -> Optional[tuple]:
    """Order X as an induced path, or None if it does not induce one."""
    X = list(X)
    if len(X) == 1:
        return (X[0],)
    deg = {v: sum(1 for u in X if G.has_edge(u, v)) for v in X}
    ends = sorted(v for v in X if deg[v] == 1)
    if len(ends) != 2 or any(d > 2 for d in deg.values()):
        return None
    order = [ends[0]]
    seen = {ends[0]}
    while len(order) < len(X):
        nxt = [u for u in X if u not in seen and G.has_edge(order[-1], u)]
        if len(nxt) != 1:
            return None
        order.append(nxt[0])
        seen.add(nxt[0])
    return tuple(order)


def is_corner_path(G: Graph, pyr: StructureWitness, path, i: int) -> bool:
    """Whether ``path`` (in the given orientation) is a corner path for base vertex ``i`` (0-based)."""
    base = pyr.parts["base"]
    paths = _pyramid_paths(pyr)
    bi = base[i]
    others = [base[t] for t in range(3) if t != i]
    sigma = set().union(*map(set, paths)) | set(base)
    Pi_minus = set(paths[i]) - {bi}
    p1, pk = path[0], path[-1]
    if not all(G.has_edge(p1, o) for o in others):
        return False
    if not any(G.has_edge(pk, v) for v in Pi_minus):
        return False
    for p in path:
        for s in sigma - {bi}:
            if not G.has_edge(p, s):
                continue
            if p == p1 and s in others:
                continue
            if p == pk and s in Pi_minus:
                continue
            return False
    return True


def classify_against_pyramid(G: Graph, pyr: StructureWitness, X: Iterable[int]) -> tuple:
    """Return ``("Local",)``, ``("CornerPath", b_i)``, ``("Major", v)`` or ``("Other",)``."""
    X = frozenset(X)
    sigma = pyr.vertices()
    if X <= sigma:
        return ("Local",) if is_local(pyr, X) else ("Other",)
    if X & sigma:
        return ("Other",)
    order = _order_path(G, X)
    if order is not None:
        for orient in (order, tuple(reversed(order))):
            for i in range(3):
                if is_corner_path(G, pyr, orient, i):
                    return ("CornerPath", pyr.parts["base"][i])
    if len(X) == 1:
        v = next(iter(X))
        attach = G.neighbors(v) & sigma
        if not is_local(pyr, attach):
            return ("Major", v)
    return ("Other",)


# ---------------------------------------------------------------------------
# witness validation (definition predicates)


def _is_induced_path(G: Graph, vs) -> bool:
    vs = list(vs)
    if len(set(vs)) != len(vs):
        return False
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            if G.has_edge(vs[i], vs[j]) != (j == i + 1):
                return False
    return True


def _anticomplete(G: Graph, X, Y) -> bool:
    return not any(G.has_edge(u, v) for u in X for v in Y)


def _hole_of_paths(G: Graph, P, Q) -> bool:
    """Whether P u Q is a hole, P and Q having their ends matched by edges."""
    cyc = list(P) + list(reversed(Q))
    if len(set(cyc)) != len(cyc):
        return False
    return is_hole(G, cyc)


def _check_pyramid(G: Graph, parts) -> bool:
    a = parts["apex"]
    b = parts["base"]
    paths = [tuple(parts["P1"]), tuple(parts["P2"]), tuple(parts["P3"])]
    if len(set(b)) != 3 or not all(G.has_edge(x, y) for x, y in combinations(b, 2)):
        return False
    for i, p in enumerate(paths):
        if p[0] != a or p[-1] != b[i] or not _is_induced_path(G, p):
            return False
    if sum(1 for p in paths if len(p) == 2) > 1:
        return False
    for i, j in combinations(range(3), 2):
        if set(paths[i][1:]) & set(paths[j][1:]):
            return False
        cyc = list(paths[i]) + list(reversed(paths[j][1:]))
        if not is_hole(G, cyc):
            return False
    return True


def _check_near_prism(G: Graph, parts, need_disjoint: bool) -> bool:
    A, B = tuple(parts["A"]), tuple(parts["B"])
    paths = [tuple(parts["P1"]), tuple(parts["P2"]), tuple(parts["P3"])]
    for tri in (A, B):
        if len(set(tri)) != 3 or not all(G.has_edge(x, y) for x, y in combinations(tri, 2)):
            return False
    shared = set(A) & set(B)
    if len(shared) > 1 or (need_disjoint and shared):
        return False
    # match path ends to triangle vertices
    for p in paths:
        if not _is_induced_path(G, p):
            return False
    ends_a = [p[0] for p in paths]
    ends_b = [p[-1] for p in paths]
    if set(ends_a) != set(A) or set(ends_b) != set(B):
        return False
    for i, j in combinations(range(3), 2):
        if set(paths[i]) & set(paths[j]):
            return False
        if not _hole_of_paths(G, paths[i], paths[j]):
            return False
    return True


def validate_witness(G: Graph, w: StructureWitness) -> bool:
    """Re-check a witness against the definition of its kind."""
    p = w.parts
    kind = w.kind
    if kind in ("Hole", "C4"):
        ok = is_hole(G, p["H"])
        return ok and (kind == "Hole" or len(p["H"]) == 4)
    if kind == "Theta":
        a, b = p["a"], p["b"]
        paths = [tuple(p["P1"]), tuple(p["P2"]), tuple(p["P3"])]
        if G.has_edge(a, b):
            return False
        for q in paths:
            if q[0] != a or q[-1] != b or len(q) < 3 or not _is_induced_path(G, q):
                return False
        for i, j in combinations(range(3), 2):
            si, sj = set(paths[i][1:-1]), set(paths[j][1:-1])
            if si & sj or not _anticomplete(G, si, sj):
                return False
        return True
    if kind == "Pyramid":
        return _check_pyramid(G, p)
    if kind == "Prism":
        return _check_near_prism(G, p, True)
    if kind == "NearPrism":
        return _check_near_prism(G, p, False)
    if kind == "Wheel":
        H, x = p["H"], p["x"]
        return is_hole(G, H) and x not in H and sum(1 for v in H if G.has_edge(x, v)) >= 3
    if kind == "ExtendedNearPrism":
        near = p["near_prism"]
        x, y = p["cross_edge"]
        if not G.has_edge(x, y):
            return False
        H = G.with_edges(remove=[(x, y)])
        if not _check_near_prism(H, near.parts, False):
            return False
        paths = [tuple(near.parts[k]) for k in ("P1", "P2", "P3")]
        tri = set(near.parts["A"]) | set(near.parts["B"])
        if x in tri or y in tri:
            return False
        inx = [i for i, q in enumerate(paths) if x in q[1:-1]]
        iny = [i for i, q in enumerate(paths) if y in q[1:-1]]
        return bool(inx) and bool(iny) and inx[0] != iny[0]
    if kind == "LoadedPyramid":
        return validate_loaded_pyramid(G, p["pyramid"], p["P"])
    return False


def validate_loaded_pyramid(G: Graph, pyr: StructureWitness, path) -> bool:
    """All five conditions of a loaded pyramid with the given labelling."""
    if not _check_pyramid(G, pyr.parts):
        return False
    a = pyr.parts["apex"]
    b1, b2, b3 = pyr.parts["base"]
    P1, P2, P3 = (tuple(pyr.parts[k]) for k in ("P1", "P2", "P3"))
    path = tuple(path)
    if not G.has_edge(a, b2) or len(P2) != 2:
        return False
    if not path or not _is_induced_path(G, path):
        return False
    sigma = set(P1) | set(P2) | set(P3)
    if sigma & set(path):
        return False
    p1, pk = path[0], path[-1]
    if not G.has_edge(p1, b2):
        return False
    if not any(G.has_edge(pk, v) for v in P1[1:-1]):
        return False
    if not _anticomplete(G, P3, path):
        return False
    if not _anticomplete(G, [b2], path[1:]):
        return False
    if not _anticomplete(G, P1[:-1], path[:-1]):
        return False
    return True


def _is_prism_graph(H: Graph) -> Optional[list]:
    """If ``H`` (all of it) is a prism, return its three paths, else None."""
    deg3 = [v for v in H.vertices if H.degree(v) == 3]
    if len(deg3) != 6 or any(H.degree(v) not in (2, 3) for v in H.vertices):
        return None
    tris = [t for t in combinations(deg3, 3) if all(H.has_edge(x, y) for x, y in combinations(t, 2))]
    for T1, T2 in combinations(tris, 2):
        if set(T1) & set(T2):
            continue
        tri_edges = {frozenset(e) for T in (T1, T2) for e in combinations(T, 2)}
        K = Graph(H.vertices, [e for e in H.edges() if frozenset(e) not in tri_edges])
        comps = components(K)
        if len(comps) != 3:
            continue
        ends_ok = True
        paths = []
        for c in comps:
            order = _order_path(K, c)
            if order is None:
                ends_ok = False
                break
            hit = set(order) & (set(T1) | set(T2))
            if len(hit & set(T1)) != 1 or len(hit & set(T2)) != 1 or hit != {order[0], order[-1]}:
                ends_ok = False
                break
            paths.append(order)
        if ends_ok:
            return paths
    return None


def is_extended_prism_on(G: Graph, vertices: Iterable[int], cross_edge) -> bool:
    """Whether ``G[vertices]`` is an extended prism with the given cross-edge."""
    vs = frozenset(vertices)
    x, y = cross_edge
    if x not in vs or y not in vs or not G.has_edge(x, y):
        return False
    H = G.induced(vs).with_edges(remove=[(x, y)])
    paths = _is_prism_graph(H)
    if paths is None:
        return False
    where = {v: i for i, p in enumerate(paths) for v in p[1:-1]}
    return x in where and y in where and where[x] != where[y]


# ---------------------------------------------------------------------------
# cutset laws for graphs in the class


def no_star_component_covers(G: Graph, v: int, vertices: Iterable[int]) -> bool:
    """True iff no component D of G - N[v] has ``vertices`` inside N[D]."""
    want = to_mask(vertices)
    rest = G.all_mask & ~(G._nbr[v] | (1 << v))
    for D in component_masks(G, rest):
        if want & ~_closed(G, D) == 0:
            return False
    return True


def wheel_sector_cutset(G: Graph, hole, x: int, sector) -> tuple:
    """For a long sector Q of (H, x): return (N' + x, Q*, W + Z) as vertex sets.

    W holds the neighbours h of x on H for which the subpath of H - x1 from x2
    to h contains an even number of neighbours of x; Z = H - (Q + N(x)).
    """
    cyc = list(hole)
    Q = list(sector)
    x1, x2 = Q[0], Q[-1]
    L = len(cyc)
    nb = {v for v in cyc if G.has_edge(x, v)}
    # walk H - x1 starting from x2 in the direction away from Q
    i2 = cyc.index(x2)
    step = 1 if cyc[(i2 - 1) % L] in Q else -1
    W = set()
    count = 0
    t = i2
    while cyc[t] != x1:
        h = cyc[t]
        if h in nb:
            count += 1
            if count % 2 == 0:
                W.add(h)
        t = (t + step) % L
    Z = set(cyc) - set(Q) - nb
    Nx = set(G.neighbors(x))
    cut = (Nx - W) | {x}
    return frozenset(cut), frozenset(Q[1:-1]), frozenset(W | Z)


def check_wheel_forcer(G: Graph, hole, x: int) -> list:
    """Long sectors of the proper non-universal wheel (H, x) whose cutset fails to separate."""
    cls = classify_wheel(G, hole, x)
    if not cls.is_proper or cls.is_universal:
        return []
    bad = []
    for Q in cls.long_sectors:
        cut, inner, outer = wheel_sector_cutset(G, hole, x, Q)
        rest = G.all_mask & ~to_mask(cut)
        for D in component_masks(G, rest):
            if D & to_mask(inner) and D & to_mask(outer):
                bad.append(Q)
                break
    return bad


def iter_loaded_pyramids(G: Graph, max_holes: Optional[int] = None, steps: Optional[int] = None):
    """Every loaded pyramid the corner search meets (one per hole, corner, side and P3)."""
    counter = _Counter(budget(steps or DEFAULT_STEPS), "loaded pyramid search")
    for cyc in all_holes(G, max_holes=max_holes, steps=steps):
        yield from _loaded_on_hole(G, cyc, None, counter, first_only=False)


def iter_pyramids(G: Graph, max_holes: Optional[int] = None, steps: Optional[int] = None):
    for cyc in all_holes(G, max_holes=max_holes, steps=steps):
        for w in _pyramids_on_hole(G, cyc, G.all_mask):
            if validate_witness(G, w):
                yield w


def major_vertices(G: Graph, pyr: StructureWitness) -> list:
    sigma = pyr.vertices()
    return [v for v in G.vertices if v not in sigma
            and classify_against_pyramid(G, pyr, {v})[0] == "Major"]


def _relabel_p2(pyr: StructureWitness):
    """Relabellings of a pyramid with the length-one path in position 2."""
    a = pyr.parts["apex"]
    base = pyr.parts["base"]
    paths = _pyramid_paths(pyr)
    for i in range(3):
        if len(paths[i]) != 2:
            continue
        j, k = [t for t in range(3) if t != i]
        for p1, p3 in ((j, k), (k, j)):
            yield StructureWitness("Pyramid", {
                "apex": a, "base": (base[p1], base[i], base[p3]),
                "P1": paths[p1], "P2": paths[i], "P3": paths[p3]})


def major_outcomes(G: Graph, pyr: StructureWitness, p: int, hub_set=None) -> list:
    """Which of the four allowed outcomes hold for a major vertex p of the pyramid."""
    a = pyr.parts["apex"]
    sigma = pyr.vertices()
    out = []
    if G.has_edge(p, a):
        na = G.neighbors(a) & sigma
        if len(G.neighbors(p) & na) >= 2:
            out.append(1)
        if hub_set is None:
            hub_set = hubs(G)
        if p in hub_set:
            out.append(2)
    vs = sigma | {p}
    if any(is_extended_prism_on(G, vs, (a, u)) for u in G.neighbors(a) & vs):
        out.append(3)
    if any(validate_loaded_pyramid(G, rel, (p,)) for rel in _relabel_p2(pyr)):
        out.append(4)
    return out
