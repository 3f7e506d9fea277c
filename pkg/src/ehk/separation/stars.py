"""Canonical star separations around a stable set of safe hubs, their core, and lifting separators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..errors import (EhkError, HubPrecondition, NotCooperative, NotStable, PostconditionFailed,
                      PreconditionFailed)
from ..graph import Graph, bits, component_masks, separates, to_set
from ..structures import hubs
from .canonical import Separation
from .constants import THEORY
from .separators import exact_min_clique_separator, finish


def safe_vertices(G: Graph, d: int, hub_set=None) -> frozenset:
    """Vertices with at most d hub neighbours."""
    H = hubs(G) if hub_set is None else frozenset(hub_set)
    hm = G.mask(H)
    return frozenset(v for v in G.vertices if bin(G.nbr_mask(v) & hm).count("1") <= d)


def _touching(G: Graph, v: int, a: int, b: int) -> list:
    """Components D of G - N[v] with a, b in N[D]."""
    closed = G.nbr_mask(v) | (1 << v)
    out = []
    for D in component_masks(G, G.all_mask & ~closed):
        reach = D | G.nbhd_mask(D)
        if (reach >> a) & 1 and (reach >> b) & 1:
            out.append(D)
    return out


def cooperative_check(G: Graph, v: int, a: int, b: int) -> bool:
    """Is there a component of G - N[v] whose closed neighbourhood holds both a and b?"""
    return bool(_touching(G, v, a, b))


@dataclass(frozen=True)
class StarSeparation:
    v: int
    sep: Separation

    @property
    def A(self):
        return self.sep.A

    @property
    def C(self):
        return self.sep.C

    @property
    def B(self):
        return self.sep.B


def star_separation(G: Graph, v: int, a: int, b: int) -> StarSeparation:
    """The canonical star separation for a cooperative v not complete to {a, b}."""
    comps = _touching(G, v, a, b)
    if not comps:
        raise NotCooperative(f"{v} is not ab-cooperative")
    hit = [D for D in comps if (D >> a) & 1 or (D >> b) & 1]
    if len(hit) != 1:
        raise PreconditionFailed(f"no unique a,b-component for {v}")
    B = hit[0]
    C = (G.nbhd_mask(B) & G.all_mask & ~B) | (1 << v)
    A = G.all_mask & ~(B | C)
    return StarSeparation(v, Separation(to_set(A), to_set(C), to_set(B)))


def star_twins(s: StarSeparation, t: StarSeparation) -> bool:
    u, v = s.v, t.v
    return (s.B == t.B and s.C - {u} == t.C - {v} and s.A | {u} == t.A | {v})


@dataclass
class StarCore:
    a: int
    b: int
    S_prime: frozenset
    S_bad: frozenset
    separations: dict             # v -> StarSeparation for v in S' - S_bad
    core: tuple
    beta: frozenset
    twins: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    def outside_components(self, G: Graph) -> list:
        m = G.all_mask & ~G.mask(self.beta | self.S_bad)
        return [to_set(c) for c in component_masks(G, m)]


def star_separations_and_core(G: Graph, S_prime: Iterable[int], a: int, b: int, d: Optional[int] = None,
                              order=None, hub_set=None, check: bool = True) -> StarCore:
    """Star separations for S' - S'_bad, the <=_A-minimal core, and the central bag they cut out.

    ``order`` ranks star twins (ascending vertex id by default).  With
    ``check`` the bag properties are verified: C(v) inside the bag for
    every core vertex, every outside component inside some A(v) with its
    boundary in C(v) + S'_bad, a and b in the bag, and no vertex of S' a
    hub of the bag.
    """
    S_prime = frozenset(S_prime)
    H = hubs(G) if hub_set is None else frozenset(hub_set)
    if not G.is_stable_mask(G.mask(S_prime)):
        raise NotStable("S' must be stable")
    if S_prime & {a, b}:
        raise PreconditionFailed("S' must avoid a and b")
    if S_prime - H:
        raise PreconditionFailed(f"non-hubs in S': {sorted(S_prime - H)}")
    if d is not None:
        unsafe = S_prime - safe_vertices(G, d, H)
        if unsafe:
            raise PreconditionFailed(f"vertices of S' that are not {d}-safe: {sorted(unsafe)}")
    S_bad = frozenset(v for v in S_prime if G.has_edge(v, a) and G.has_edge(v, b))
    if len(S_bad) > 1:
        raise PreconditionFailed("two vertices of S' see both a and b (the graph has a C4)")
    rank = order or (lambda v: v)
    seps = {v: star_separation(G, v, a, b) for v in sorted(S_prime - S_bad)}
    S = sorted(seps)
    twins = [(u, v) for i, u in enumerate(S) for v in S[i + 1:] if star_twins(seps[u], seps[v])]
    twin_set = {frozenset(p) for p in twins}

    def below(y, x):
        """y <=_A x with y != x."""
        if frozenset((x, y)) in twin_set:
            return rank(y) < rank(x)
        return x in seps[y].A

    core = tuple(x for x in S if not any(below(y, x) for y in S if y != x))
    beta = frozenset(G.vertices)
    for v in core:
        beta &= seps[v].B | seps[v].C
    beta -= S_bad
    sc = StarCore(a, b, S_prime, S_bad, seps, core, beta, twins)
    if check:
        sc.checks = check_star_core(G, sc)
        bad = [k for k, v in sc.checks.items() if v is False]
        if bad:
            raise PostconditionFailed(f"star central bag properties failed: {bad}", sc.checks)
    return sc


def check_star_core(G: Graph, sc: StarCore) -> dict:
    out = {"a_b_in_bag": sc.a in sc.beta and sc.b in sc.beta}
    out["C_inside_bag"] = all(sc.separations[v].C <= sc.beta for v in sc.core)
    ok = True
    for D in sc.outside_components(G):
        nd = to_set(G.nbhd_mask(G.mask(D)) & G.all_mask & ~G.mask(D))
        homes = [v for v in sc.core if D <= sc.separations[v].A]
        if not homes or not all(nd <= sc.separations[v].C | sc.S_bad for v in homes):
            ok = False
    out["outside_in_some_A"] = ok
    out["S_prime_not_hubs_of_bag"] = not (hubs(G.induced(sc.beta)) & sc.S_prime)
    laminar = all(not (sc.separations[u].A & sc.separations[v].C)
                  for u in sc.core for v in sc.core if u != v)
    out["core_laminar"] = laminar
    return out


# ---------------------------------------------------------------------------
# lifting


@dataclass
class LiftResult:
    Y: frozenset
    cover: object                 # CliqueCoverSet of the peeled lifted separator
    Z: dict                       # s -> separator used around s
    verified: bool
    bound: float
    fallbacks: int


def lift_separator(G: Graph, sc: StarCore, Y: Iterable[int], d: int = 0, hub_set=None,
                   eps=None) -> LiftResult:
    """Turn an a-b separator of the star bag into one of G.

    For each core vertex s inside Y a separator Z(s) is found between s
    and b (or a, when s sees b) inside B(s) + (C(s) - hubs) + s, and Y is
    extended by the Z(s), the hub neighbours of those s, and S'_bad.  a and
    b are never added: Z(s) is computed with the unused end removed, and
    a, b are dropped from the hub neighbourhoods.
    """
    from .hubfree import ab_separator_hubfree

    a, b = sc.a, sc.b
    Y = frozenset(Y)
    H = hubs(G) if hub_set is None else frozenset(hub_set)
    bag = G.induced(sc.beta)
    if not separates(bag, Y, a, b):
        raise PreconditionFailed("Y does not separate a from b inside the bag")
    Zs = {}
    fallbacks = 0
    extra = set(sc.S_bad)
    for s in sorted(Y & set(sc.core)):
        st = sc.separations[s]
        other, spare = (a, b) if G.has_edge(s, b) else (b, a)
        Gs = G.induced((st.B | (st.C - H) | {s}) - {spare})
        try:
            rep = ab_separator_hubfree(Gs, s, other, eps=eps)
            Z = rep.vertices
            fallbacks += rep.fallbacks
            if not rep.verified:
                raise PostconditionFailed("inner separator not verified")
        except (HubPrecondition, EhkError):
            fallbacks += 1
            Z = exact_min_clique_separator(Gs, s, other).separator.members
        Zs[s] = frozenset(Z)
        extra |= Z
        extra |= (G.neighbors(s) & H) - {a, b}
    Yp = Y | frozenset(extra)
    kappa_y = finish(bag, a, b, Y)[0].kappa_certified
    bound = THEORY.lift_bound(G.n, kappa_y, len(Zs), d)
    if not separates(G, Yp, a, b):
        return LiftResult(Yp, None, Zs, False, bound, fallbacks)
    cover, ok = finish(G, a, b, Yp)
    return LiftResult(Yp, cover, Zs, ok, bound, fallbacks)
