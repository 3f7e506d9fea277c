"""Rebalancing a minimal a-b separator so that few of its vertices lie in a given stable set S1."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional

from ..errors import (BudgetExceeded, EhkError, NotMinimalSeparator, NotStable, PreconditionFailed)
from ..graph import Graph, bits, component_containing, popcount, separates, to_set
from ..structures import find_even_hole, hubs
from .constants import DELTA_REBALANCE, THEORY
from .separators import finish, is_minimal_separator
from .triples import Census, _Ctx, classify_minimal_connected, find_triple_witness, local_to_global


@dataclass
class RebalanceResult:
    Y: frozenset
    cover: object
    verified: bool
    mu_before: int
    mu_after: int
    bound: float
    fallbacks: int
    trace: list = field(default_factory=list)


def _nbhd(G: Graph, m: int) -> int:
    return G.nbhd_mask(m) & G.all_mask & ~m


def _hubfree(G: Graph, s: int, t: int, eps):
    from .hubfree import ab_separator_hubfree
    rep = ab_separator_hubfree(G, s, t, eps=eps, check_hubs=False)
    if not rep.verified:
        raise PreconditionFailed("inner separator not verified")
    return rep


def parity_gadget(G: Graph, D2: Iterable[int], triple, mc) -> Graph:
    """D2 + triple plus a new vertex joined to each x_i by a path whose length fixes its parity.

    The path to x_i has length 2 when the leg of the triangle-shaped subgraph
    reaching x_i has even length and 3 otherwise.
    """
    legs = _legs_of(G, mc, triple)
    keep = set(D2) | set(triple)
    H = G.induced(keep)
    nxt = max(G.vertices) + 1
    v = nxt
    nxt += 1
    edges = list(H.edges())
    verts = list(H.vertices) + [v]
    for x, leg in zip(triple, legs):
        q = 2 if (len(leg) - 1) % 2 == 0 else 3
        prev = v
        for _ in range(q - 1):
            verts.append(nxt)
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, x))
    return Graph.from_adjacency(_adj(verts, edges))


def _adj(verts, edges):
    adj = {u: set() for u in verts}
    for u, w in edges:
        adj[u].add(w)
        adj[w].add(u)
    return adj


def _legs_of(G: Graph, mc, triple):
    """Paths from each x_i to its triangle vertex (x_i included)."""
    if mc.outcome == "triangle-spider":
        return [tuple(l) for l in mc.parts["legs"]]
    # path x_i .. x_j with x_k seeing two adjacent vertices h, h' of it: the triangle is x_k h h'
    path = list(mc.parts["path"])
    xk = mc.parts["attached"]
    inner = [u for u in path if G.has_edge(u, xk) and u not in triple]
    h1, h2 = inner[0], inner[1]
    i1, i2 = path.index(h1), path.index(h2)
    lo, hi = min(i1, i2), max(i1, i2)
    legs = {path[0]: tuple(path[:lo + 1]), path[-1]: tuple(path[hi:]), xk: (xk,)}
    return [legs[x] for x in triple]


def _census_direct(G: Graph, X: frozenset, parts, b: int, D: frozenset, triples) -> Census:
    ctx = _Ctx(G, D, b)
    found = {}
    unknown = 0
    for t in triples:
        try:
            w = find_triple_witness(G, D, b, *t, _ctx=ctx)
        except (BudgetExceeded, EhkError):
            unknown += 1
            continue
        if w is not None:
            found[t] = w
    total = len(parts[0]) ** 3
    return Census(len(found), total, total, True, unknown, found, len(X))


def onestep(G: Graph, D1: int, D2: int, X: frozenset, a: int, b: int, eps, hub_set: frozenset,
            delta=DELTA_REBALANCE, gadget_checks: int = 3) -> dict:
    """One shrinking step: a set Z and the side ('a' or 'b') whose attachments it cuts down."""
    nX = len(X)
    need = max(1, math.ceil(eps * nX))
    xm = G.mask(X)
    # one vertex seeing many attachments
    for side, other, root, far in ((D1, D2, b, "b"), (D2, D1, a, "a")):
        for v in sorted(bits(side)):
            if popcount(G.nbr_mask(v) & xm) >= need:
                keep = to_set(other | G.nbr_mask(v) | (1 << v))
                rep = _hubfree(G.induced(keep), v, root, eps)
                return {"case": "one-vertex", "side": far, "Z": rep.vertices, "inner_fallbacks": rep.fallbacks}
    # one attachment whose neighbourhood cuts many others off
    for side, root, label in ((D1, a, "a"), (D2, b, "b")):
        for x in sorted(X):
            if G.has_edge(x, root):
                continue
            comp = component_containing(G, side & ~G.nbr_mask(x), root)
            cut_off = [y for y in X if not G.nbr_mask(y) & comp]
            if len(cut_off) >= need:
                Xp = to_set(G.nbr_mask(x) & _nbhd(G, comp)) - hub_set
                keep = to_set(comp) | Xp | {x}
                rep = _hubfree(G.induced(keep), x, root, eps)
                Z = rep.vertices | ((G.neighbors(x) & hub_set) - {a, b})
                return {"case": "neighbours-of-one", "side": label, "Z": Z, "inner_fallbacks": rep.fallbacks}
    # triangular triples
    Xp = sorted(x for x in X if not G.has_edge(x, a) and not G.has_edge(x, b))
    s = math.ceil(nX / 4)
    if len(Xp) < 3 * s:
        raise PreconditionFailed(f"only {len(Xp)} attachments away from a and b, need {3 * s}")
    parts = (tuple(Xp[:s]), tuple(Xp[s:2 * s]), tuple(Xp[2 * s:3 * s]))
    triples = list(product(*parts))
    tri = {"a": [], "b": []}
    for t in triples:
        for label, side in (("a", D1), ("b", D2)):
            try:
                mc = classify_minimal_connected(G, to_set(side), *t)
            except EhkError:
                continue
            if mc.outcome == "triangle-spider" or (mc.outcome == "path+attachment" and _adjacent_pair(G, mc)):
                tri[label].append((t, mc))
    label = "b" if len(tri["b"]) >= len(tri["a"]) else "a"
    side, root = (D2, b) if label == "b" else (D1, a)
    gadgets = []
    for t, mc in tri[label][:gadget_checks]:
        try:
            gadgets.append(find_even_hole(parity_gadget(G, to_set(side), t, mc)) is None)
        except EhkError:
            gadgets.append(None)
    Gp = G.induced(to_set(side) | X)
    census = _census_direct(Gp, X, parts, root, to_set(side), triples)
    res = local_to_global(Gp, X, parts, root, delta, census=census, D=to_set(side))
    return {"case": "triangular", "side": label, "Z": res.S.members, "triangular": {k: len(v) for k, v in tri.items()},
            "gadget_ehf": gadgets, "census": census.count}


def _adjacent_pair(G: Graph, mc) -> bool:
    xk = mc.parts["attached"]
    att = [u for u in mc.H if G.has_edge(u, xk)]
    return len(att) == 2 and G.has_edge(*att)


def rebalance_separator(G: Graph, a: int, b: int, Y: Iterable[int], S1: Iterable[int], d: Optional[int] = None,
                        eps=None, hub_set=None, stop_at: int = 1, max_rounds: int = 64) -> RebalanceResult:
    """Shrink the S1-part of a minimal a-b separator, one attachment-cutting step at a time.

    Each round works in the graph spanned by the two full components and
    X = Y & S1, finds Z by the one-step case split, removes it, and re-peels
    the separator from the side that was cut down.  Rounds stop once at
    most ``stop_at`` vertices of S1 remain in the separator; a round that
    fails or makes no progress ends the loop and is counted.  The returned
    set (final separator plus every Z) is verified in G; if that check
    fails the input Y is returned instead, also counted.
    """
    Y = frozenset(Y)
    S1 = frozenset(S1)
    eps = THEORY.eps if eps is None else Fraction(eps)
    H = hubs(G) if hub_set is None else frozenset(hub_set)
    if not is_minimal_separator(G, Y, a, b):
        raise NotMinimalSeparator("Y is not a minimal a-b separator")
    if not G.is_stable_mask(G.mask(S1)):
        raise NotStable("S1 must be stable")
    if S1 & H:
        raise PreconditionFailed(f"S1 contains hubs: {sorted(S1 & H)}")
    if d is not None:
        hm = G.mask(H)
        if any(popcount(G.nbr_mask(v) & hm) > d for v in S1):
            raise PreconditionFailed(f"S1 has vertices that are not {d}-safe")
    mu0 = len(Y & S1)
    bound = THEORY.rebalance_bound(G.n, d or 0)
    cur = G
    Ycur = Y
    added = set()
    trace = []
    fallbacks = 0
    for _ in range(max_rounds):
        X = Ycur & S1
        if len(X) <= stop_at:
            break
        rest = cur.all_mask & ~cur.mask(Ycur)
        D1 = component_containing(cur, rest, a)
        D2 = component_containing(cur, rest, b)
        Hs = cur.induced(to_set(D1 | D2) | X)
        try:
            step = onestep(Hs, Hs.mask(to_set(D1)), Hs.mask(to_set(D2)), X, a, b, eps, H)
        except (EhkError, BudgetExceeded) as e:
            fallbacks += 1
            trace.append({"mu": len(X), "case": "stopped", "reason": f"{type(e).__name__}: {e}"})
            break
        Z = frozenset(step["Z"]) - {a, b}
        nxt = cur.without(Z)
        first, second = (b, a) if step["side"] == "b" else (a, b)
        region = (D2 if first == b else D1) & ~cur.mask(Z)
        c1 = component_containing(nxt, region & nxt.all_mask, first)
        y1 = _nbhd(nxt, c1)
        c2 = component_containing(nxt, nxt.all_mask & ~y1, second)
        y2 = _nbhd(nxt, c2)
        keep = to_set(c1 | c2 | y2)
        new_y = to_set(y2)
        if len(new_y & S1) >= len(X):
            fallbacks += 1
            trace.append({"mu": len(X), "case": step["case"], "reason": "no progress"})
            break
        trace.append({"mu": len(X), "case": step["case"], "side": step["side"], "Z": len(Z),
                      "mu_next": len(new_y & S1)})
        added |= Z
        cur = nxt.induced(keep)
        Ycur = new_y
    Yp = frozenset(Ycur) | frozenset(added)
    if not separates(G, Yp, a, b):
        fallbacks += 1
        trace.append({"case": "lift-failed"})
        Yp = Y
    cover, ok = finish(G, a, b, Yp)
    return RebalanceResult(Yp, cover, ok, mu0, len(cover.members & S1), bound, fallbacks, trace)
