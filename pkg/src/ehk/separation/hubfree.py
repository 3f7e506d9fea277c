"""a-b separators when N(a) carries no hubs: the shrinking-neighbourhood loop and its pieces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Optional

from ..errors import (Adjacent, BudgetExceeded, EhkError, HubPrecondition, LimitExceeded,
                      PreconditionFailed)
from ..graph import (CliqueCoverSet, Graph, bits, clique_cover_number, component_containing,
                     component_masks, cover_from_cliques, is_chordal, maximal_clique_masks, popcount,
                     to_mask, to_set)
from ..structures import detect_extended_near_prism_with_cross_edge, find_hole_through, hubs
from .constants import DELTA_DANGEROUS, DELTA_HUBFREE, THEORY
from .separators import SeparatorReport, exact_min_clique_separator, finish
from .triples import killed_set, local_to_global

DANGER_LIMIT = 64


# ---------------------------------------------------------------------------
# chordal partition


@dataclass
class ChordalPartition:
    Z: CliqueCoverSet
    parts: tuple                  # three pairwise anticomplete frozensets of equal size
    size: int
    route: str                    # "centroid" or "search"


def _largest_component(G: Graph, m: int) -> int:
    comps = component_masks(G, m)
    return max((popcount(c) for c in comps), default=0)


def _centroid_clique(G: Graph, m: int) -> int:
    """A maximal clique of chordal G[m] whose removal leaves components of size <= |m|/2."""
    cliques = maximal_clique_masks(G, m)
    if not cliques:
        return 0
    return min(cliques, key=lambda c: (_largest_component(G, m & ~c), tuple(bits(c))))


def _pack(sizes, s):
    """Assign components to three bins each reaching s; returns bin index per component or None."""
    order = sorted(range(len(sizes)), key=lambda i: -sizes[i])
    fill = [0, 0, 0]
    assign = [0] * len(sizes)
    for i in order:
        k = min(range(3), key=lambda j: (fill[j] >= s, fill[j]))
        assign[i] = k
        fill[k] += sizes[i]
    if min(fill) >= s:
        return assign
    if len(sizes) <= 10:
        for combo in product(range(3), repeat=len(sizes)):
            f = [0, 0, 0]
            for i, k in enumerate(combo):
                f[k] += sizes[i]
            if min(f) >= s:
                return list(combo)
    return None


def _split(G: Graph, m: int, zm: int, s: int):
    comps = component_masks(G, m & ~zm)
    assign = _pack([popcount(c) for c in comps], s)
    if assign is None:
        return None
    bins = [0, 0, 0]
    for c, k in zip(comps, assign):
        bins[k] |= c
    return tuple(frozenset(sorted(bits(x))[:s]) for x in bins)


def chordal_partition(G: Graph, X: Optional[Iterable[int]] = None, n_ambient: Optional[int] = None,
                      eps=None) -> ChordalPartition:
    """Two cliques whose removal leaves three anticomplete sets of size ceil(n_ambient/17).

    The first attempt follows the clique-tree argument: remove a centroid
    maximal clique, and if the pieces cannot be packed into three bins,
    remove a centroid clique of the largest piece as well.  If that fails
    every pair of maximal cliques (or none) is tried.
    """
    m = G.all_mask if X is None else G.mask(X)
    n_amb = popcount(m) if n_ambient is None else n_ambient
    if not is_chordal(G, to_set(m)):
        raise PreconditionFailed("chordal_partition needs a chordal graph")
    cliques = maximal_clique_masks(G, m)
    if eps is not None and cliques:
        omega = max(popcount(c) for c in cliques)
        if omega >= math.ceil(Fraction(eps) * n_amb):
            raise PreconditionFailed(f"clique of size {omega} >= eps * n")
    s = max(1, math.ceil(n_amb / 17))

    def result(z1, z2, route, parts):
        zs = [c for c in (z1, z2) if c]
        Z = cover_from_cliques(G, to_set(z1 | z2), [to_set(c) for c in zs])
        return ChordalPartition(Z, parts, s, route)

    z1 = _centroid_clique(G, m)
    parts = _split(G, m, z1, s)
    if parts is not None:
        return result(z1, 0, "centroid", parts)
    rest = m & ~z1
    comps = component_masks(G, rest)
    if comps:
        big = max(comps, key=popcount)
        z2 = _centroid_clique(G, big)
        parts = _split(G, m, z1 | z2, s)
        if parts is not None:
            return result(z1, z2, "centroid", parts)
    options = [0] + cliques
    for c1, c2 in combinations(options, 2):
        parts = _split(G, m, c1 | c2, s)
        if parts is not None:
            return result(c1, c2, "search", parts)
    parts = _split(G, m, 0, s)
    if parts is not None:
        return result(0, 0, "search", parts)
    raise PreconditionFailed(f"no two cliques split {popcount(m)} vertices into three sets of size {s}")


# ---------------------------------------------------------------------------
# dangerous triples and purity


def dangerous_triple_check(G: Graph, a: int, triple, D: Iterable[int], limit: int = DANGER_LIMIT) -> bool:
    """Is ``a x2`` a cross-edge of an extended near-prism in G[D + triple + a]?  (x2 = triple[1])"""
    x1, x2, x3 = triple
    H = G.induced(set(D) | {x1, x2, x3, a})
    return detect_extended_near_prism_with_cross_edge(H, a, x2, limit=limit) is not None


def purity_check(G: Graph, D: Iterable[int], Xp: Iterable[int], a: int, b: int) -> bool:
    """True iff no hole inside D + X' + a passes through both a and b."""
    S = set(D) | set(Xp) | {a}
    return find_hole_through(G, (a, b), S) is None


def dangerous_centres(G: Graph, a: int, parts, D: Iterable[int], threshold) -> list:
    """(centre, count, unknown) for every vertex of the parts, most dangerous first.

    Triples the detector cannot decide are counted as dangerous.
    """
    D = frozenset(D)
    out = []
    for i in range(3):
        others = [parts[k] for k in range(3) if k != i]
        for x in sorted(parts[i]):
            count = unknown = 0
            for u, w in product(sorted(others[0]), sorted(others[1])):
                try:
                    if dangerous_triple_check(G, a, (u, x, w), D):
                        count += 1
                except LimitExceeded:
                    count += 1
                    unknown += 1
                if count >= threshold:
                    break
            out.append((x, count, unknown))
    out.sort(key=lambda t: (-t[1], t[0]))
    return out


def _local_cut(G: Graph, D1: int, X: frozenset, b: int, centre: int, need: int):
    """A kappa <= 4 cut inside D1 - b that cuts b off from at least ``need`` neighbourhoods, or None.

    Tried: the centre's neighbourhood in D1, single maximal cliques and
    pairs of them.  The best cut by kill count wins.
    """
    avail = D1 & ~(1 << b)
    cands = []
    nc = G.nbr_mask(centre) & avail
    if nc and not (G.nbr_mask(centre) >> b) & 1:
        cands.append(nc)
    cliques = [c & avail for c in maximal_clique_masks(G, D1)]
    cliques = sorted({c for c in cliques if c}, key=lambda c: tuple(bits(c)))
    cands.extend(cliques)
    cands.extend(c1 | c2 for c1, c2 in combinations(cliques, 2))
    Dset = to_set(D1)
    best = None
    for S in cands:
        killed = killed_set(G, Dset, X, b, to_set(S))
        if len(killed) >= need and (best is None or len(killed) > len(best[1])):
            cover = clique_cover_number(G, to_set(S))
            if cover.kappa_certified <= 4:
                best = (cover, killed)
    return best


# ---------------------------------------------------------------------------
# the loop


@dataclass
class StepOutcome:
    S: frozenset
    branch: str
    kappa: int
    killed: int


def _one_step(W: Graph, a: int, b: int, D1: int, X: frozenset, eps, delta, lg_eps, d_delta) -> StepOutcome:
    xm = W.mask(X)
    if not is_chordal(W, X):
        raise PreconditionFailed("N(a) restricted to the attachments is not chordal")
    cliques = maximal_clique_masks(W, xm)
    big = max(cliques, key=lambda c: (popcount(c), [-v for v in bits(c)]))
    if popcount(big) >= eps * len(X):
        return StepOutcome(to_set(big), "clique", 1, popcount(big))
    zp = W.nbr_mask(b) & xm
    cp = chordal_partition(W, to_set(xm & ~zp), n_ambient=len(X), eps=eps)
    need = max(1, math.ceil(eps * len(X)))
    threshold = max(1, math.ceil(d_delta * len(X) ** 2))
    Dset = to_set(D1)
    centres = dangerous_centres(W, a, cp.parts, Dset, threshold)
    if centres and centres[0][1] >= threshold:
        centre = centres[0][0]
        cut = _local_cut(W, D1, X, b, centre, need)
        if cut is None:
            pure = purity_check(W, Dset, X, a, b)
            raise PreconditionFailed(f"dangerous centre {centre} without a small local cut (X pure: {pure})")
        cover, killed = cut
        S = cover.members | to_set(zp)
        return StepOutcome(S, "dangerous-cut", cover.kappa_certified + (1 if zp else 0), len(killed))
    H = W.induced(Dset | X)
    res = local_to_global(H, X, cp.parts, b, delta, eps=lg_eps, D=Dset)
    S = res.S.members | to_set(zp)
    return StepOutcome(S, "local-global", res.S.kappa_certified + (1 if zp else 0), len(res.killed))


def ab_separator_hubfree(G: Graph, a: int, b: int, eps=None, delta=DELTA_HUBFREE, lg_eps=None,
                         dangerous_delta=DELTA_DANGEROUS, check_hubs: bool = True,
                         exact_limit: Optional[int] = None) -> SeparatorReport:
    """Separate a from b when no neighbour of a is a hub.

    Let D be the component of G - N[a] holding b and X = N(D).  Each round
    picks a set S (a big clique of X, a small local cut around a dangerous
    centre, or the local-to-global cutset of the breaker X) that cuts b off
    from part of X, adds it to Z and shrinks D to the b-component of D - S.
    It stops once X is a clique.  A round that cannot make progress hands
    the rest to the exact minimum clique-cover separator and is counted as
    a fallback.  The result is peeled to a minimal separator and checked.
    """
    if a == b or G.has_edge(a, b):
        raise Adjacent(f"{a} and {b} are adjacent")
    eps = THEORY.eps if eps is None else Fraction(eps)
    na = G.nbr_mask(a)
    if check_hubs:
        bad = to_set(na) & hubs(G)
        if bad:
            raise HubPrecondition(f"hubs in N(a): {sorted(bad)}")
    bound = THEORY.hubfree_bound(G.n)
    closed_a = na | (1 << a)
    D = component_containing(G, G.all_mask & ~closed_a, b)
    X0 = G.nbhd_mask(D) & G.all_mask & ~D
    if not X0:
        return SeparatorReport(a, b, CliqueCoverSet(frozenset(), (), 0, True), True, bound,
                               extras={"steps": 0, "branches": {}})
    W = G.induced(to_set(D | X0 | (1 << a)))
    Z = 0
    D1 = D
    X = to_set(X0)
    trace = []
    fallbacks = 0
    branches = {}
    while True:
        xm = W.mask(X)
        if W.is_clique_mask(xm):
            Z |= xm
            trace.append({"X": len(X), "branch": "final-clique"})
            break
        try:
            step = _one_step(W, a, b, D1, X, eps, Fraction(delta), lg_eps, Fraction(dangerous_delta))
        except (EhkError, BudgetExceeded) as e:
            step = None
            reason = f"{type(e).__name__}: {e}"
        if step is not None:
            sm = W.mask(step.S)
            nd = component_containing(W, D1 & ~sm, b)
            nx_ = to_set(W.nbhd_mask(nd) & W.all_mask & ~nd & ~(Z | sm))
            if len(nx_) < len(X):
                trace.append({"X": len(X), "branch": step.branch, "kappa": step.kappa, "killed": step.killed})
                branches[step.branch] = branches.get(step.branch, 0) + 1
                Z |= sm
                D1 = nd
                X = nx_
                continue
            reason = f"{step.branch} step did not shrink X"
        fallbacks += 1
        R = W.without(to_set(Z))
        ms = exact_min_clique_separator(R, a, b, exact_limit)
        trace.append({"X": len(X), "branch": "exact-fallback", "kappa": ms.separator.kappa_certified,
                      "reason": reason})
        Z |= W.mask(ms.separator.members)
        break
    cover, verified = finish(G, a, b, to_set(Z))
    return SeparatorReport(a, b, cover, verified, bound, fallbacks, trace,
                           {"steps": len(trace), "branches": branches})
