"""Canonical separations of a connected graph around a clique, and the central bag they cut out."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import NotAClique, PostconditionFailed
from ..graph import Graph, bits, component_containing, component_masks, maximal_clique_masks, to_set


@dataclass(frozen=True)
class Separation:
    A: frozenset
    C: frozenset
    B: frozenset

    def is_valid(self, G: Graph, ambient: Iterable[int] = None) -> bool:
        ambient = frozenset(G.vertices if ambient is None else ambient)
        if self.A & self.C or self.A & self.B or self.B & self.C:
            return False
        if self.A | self.B | self.C != ambient:
            return False
        return not (G.nbhd_mask(G.mask(self.A)) & G.mask(self.B))


@dataclass(frozen=True)
class CanonicalSeparation:
    K: frozenset
    sep: Separation
    b: int

    @property
    def A(self):
        return self.sep.A

    @property
    def C(self):
        return self.sep.C

    @property
    def B(self):
        return self.sep.B


def _masks_without_b(D: Graph, b: int, km: int):
    """(A, C, B) masks for a clique not containing b."""
    rest = D.all_mask & ~km
    B = component_containing(D, rest, b)
    C = D.nbhd_mask(B) & D.all_mask
    A = D.all_mask & ~(B | C)
    return A, C, B


def canonical_separation(D: Graph, b: int, K: Iterable[int]) -> CanonicalSeparation:
    """The b-canonical separation of ``D`` for the clique ``K``.

    When b is in K the separation is computed through ``K - b``, shifting b
    from B to C.  Reading the definition literally instead (B = components
    of D - K touching N[b], C = N(B)) drops from C any vertex of K without
    a neighbour in B, and then A, C, B no longer cover D; the shifted form
    always partitions D.
    """
    K = frozenset(K)
    km = D.mask(K)
    if not D.is_clique_mask(km):
        raise NotAClique(f"{sorted(K)} is not a clique")
    if b not in D:
        raise ValueError("b must be a vertex of D")
    bit = 1 << b
    if km & bit:
        A, C, B = _masks_without_b(D, b, km & ~bit)
        C |= bit
        B &= ~bit
    else:
        A, C, B = _masks_without_b(D, b, km)
    sep = Separation(to_set(A), to_set(C), to_set(B))
    return CanonicalSeparation(K, sep, b)


def literal_canonical_separation(D: Graph, b: int, K: Iterable[int]) -> Separation:
    """The b-in-K case read word for word; only used to show where it diverges."""
    km = D.mask(K)
    rest = D.all_mask & ~km
    B = 0
    closed_b = D.nbr_mask(b) | (1 << b)
    for comp in component_masks(D, rest):
        if comp & closed_b:
            B |= comp
    C = D.nbhd_mask(B) & D.all_mask
    A = D.all_mask & ~(B | C)
    return Separation(to_set(A), to_set(C), to_set(B))


@dataclass
class CentralBag:
    beta: frozenset
    cliques: list                       # the cliques with inclusion-maximal A(K)
    separations: dict                   # maximal clique -> CanonicalSeparation
    outside: list                       # (F, N(F), index into cliques of some K with F in A(K))
    checks: dict = field(default_factory=dict)

    def component_of(self, v: int):
        for F, NF, k in self.outside:
            if v in F:
                return F
        return None


def central_bag(D: Graph, b: int, check: bool = True, cutset_limit: int = 20000) -> CentralBag:
    """The central bag of the canonical separations of ``D`` around ``b``.

    A(K) only grows when K grows, so it is enough to look at maximal
    cliques: every inclusion-maximal A(K) is attained by one, and the bag
    is D minus the union of all A(K).  With ``check`` the laminarity and
    cut-point properties are verified and a violation raises
    PostconditionFailed.
    """
    if b not in D:
        raise ValueError("b must be a vertex of D")
    if len(component_masks(D, D.all_mask)) != 1:
        raise ValueError("D must be connected")
    seps = {}
    for m in maximal_clique_masks(D):
        K = to_set(m)
        seps[K] = canonical_separation(D, b, K)
    amask = {K: D.mask(s.A) for K, s in seps.items()}
    top = []
    for K, a in amask.items():
        if not any(a != o and (a & ~o) == 0 for o in amask.values()):
            top.append(K)
    top.sort(key=lambda K: tuple(sorted(K)))
    union_a = 0
    for K in top:
        union_a |= amask[K]
    beta_mask = D.all_mask & ~union_a
    outside = []
    for F in component_masks(D, union_a):
        NF = D.nbhd_mask(F) & D.all_mask
        home = next((i for i, K in enumerate(top) if F & ~amask[K] == 0), None)
        outside.append((to_set(F), to_set(NF), home))
    bag = CentralBag(to_set(beta_mask), top, seps, outside)
    if check:
        bag.checks = check_central_bag(D, b, bag, cutset_limit)
        bad = [k for k, v in bag.checks.items() if v is False]
        if bad:
            raise PostconditionFailed(f"central bag properties failed: {bad}", bag.checks)
    return bag


def _all_cliques(D: Graph, S: int, limit: int):
    """Every nonempty clique inside ``S`` (as masks), deduplicated."""
    seen = set()
    for m in maximal_clique_masks(D, S):
        members = list(bits(m))
        # subsets of a maximal clique, enumerated by mask over its members
        for sub in range(1, 1 << len(members)):
            c = 0
            for i, v in enumerate(members):
                if (sub >> i) & 1:
                    c |= 1 << v
            if c not in seen:
                seen.add(c)
                if len(seen) > limit:
                    return seen, False
    return seen, True


def check_central_bag(D: Graph, b: int, bag: CentralBag, cutset_limit: int = 20000) -> dict:
    out = {}
    out["b_in_beta"] = b in bag.beta
    ok = True
    for K1 in bag.cliques:
        s1 = bag.separations[K1]
        for K2 in bag.cliques:
            if K1 is K2:
                continue
            if s1.C & bag.separations[K2].A:
                ok = False
    out["laminar"] = ok
    out["outside_in_some_A"] = all(home is not None for _, _, home in bag.outside)
    out["outside_boundary_clique"] = all(D.is_clique_mask(D.mask(NF)) for _, NF, _ in bag.outside)
    # every clique cutset of the bag contains b
    bm = D.mask(bag.beta)
    cliques, complete = _all_cliques(D, bm & ~(1 << b), cutset_limit)
    cut = True
    for c in cliques:
        if len(component_masks(D, bm & ~c)) > 1:
            cut = False
            break
    out["clique_cutsets_contain_b"] = cut
    out["cutset_cliques_checked"] = len(cliques) if complete else -len(cliques)
    return out
