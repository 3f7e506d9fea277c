"""Exact minimum clique-cover a-b separators, minimal-separator peeling and separator reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..errors import Adjacent
from ..graph import (CliqueCoverSet, Graph, best_cover, bits, budget, clique_cover_number,
                     component_containing, popcount, separates, to_set)


def _neighbourhood(G: Graph, m: int) -> int:
    return G.nbhd_mask(m) & G.all_mask & ~m


def peel_minimal_separator(G: Graph, Z: Iterable[int], a: int, b: int) -> frozenset:
    """A minimal a-b separator inside the separator ``Z``.

    Y1 = N(component of b in G - Z), then Y2 = N(component of a in G - Y1);
    both a- and b-components of G - Y2 are full.
    """
    zm = G.mask(Z)
    if not separates(G, Z, a, b):
        raise ValueError("Z does not separate a from b")
    cb = component_containing(G, G.all_mask & ~zm, b)
    y1 = _neighbourhood(G, cb)
    ca = component_containing(G, G.all_mask & ~y1, a)
    return to_set(_neighbourhood(G, ca))


def is_minimal_separator(G: Graph, Y: Iterable[int], a: int, b: int) -> bool:
    """Y separates a from b and every vertex of Y has neighbours in both full components."""
    ym = G.mask(Y)
    if not separates(G, Y, a, b):
        return False
    rest = G.all_mask & ~ym
    ca = component_containing(G, rest, a)
    cb = component_containing(G, rest, b)
    return all(G.nbr_mask(y) & ca and G.nbr_mask(y) & cb for y in bits(ym))


def minimal_separators(G: Graph, a: int, b: int, limit: Optional[int] = None):
    """All minimal a-b separators (as masks) by closing under the standard one-vertex moves.

    Yields (mask, complete) pairs; ``complete`` turns False on the last
    yield if the limit was reached before the closure finished.
    """
    if G.has_edge(a, b):
        raise Adjacent(f"{a} and {b} are adjacent")
    cap = budget(limit or 20_000)
    allm = G.all_mask

    def sep_from(R: int) -> Optional[int]:
        closed = R | G.nbhd_mask(R)
        if (closed >> b) & 1:
            return None
        cb = component_containing(G, allm & ~closed, b)
        return _neighbourhood(G, cb)

    start = sep_from(1 << a)
    seen = {start}
    queue = [start]
    while queue:
        S = queue.pop(0)
        for x in bits(S & ~G.nbr_mask(b)):
            ca = component_containing(G, allm & ~S, a)
            T = sep_from(ca | (1 << x))
            if T is None or T in seen:
                continue
            if len(seen) >= cap:
                for m in sorted(seen, key=lambda m: tuple(bits(m))):
                    yield m, False
                return
            seen.add(T)
            queue.append(T)
    for m in sorted(seen, key=lambda m: tuple(bits(m))):
        yield m, True


@dataclass
class MinSeparator:
    separator: CliqueCoverSet
    exact: bool                   # optimal over all a-b separators
    examined: int


def exact_min_clique_separator(G: Graph, a: int, b: int, limit: Optional[int] = None) -> MinSeparator:
    """Minimum-kappa a-b separator.

    kappa only drops on subsets, so a minimal separator attains the
    optimum; every minimal separator is enumerated and covered exactly.
    """
    if a == b or G.has_edge(a, b):
        raise Adjacent(f"{a} and {b} are adjacent")
    if not (component_containing(G, G.all_mask, a) >> b) & 1:
        return MinSeparator(CliqueCoverSet(frozenset(), (), 0, True), True, 0)
    best = None
    exact = True
    count = 0
    for m, complete in minimal_separators(G, a, b, limit):
        count += 1
        exact = exact and complete
        if best is not None and best.kappa_certified == 1:
            break               # nothing beats a single clique once a and b are connected
        c = clique_cover_number(G, to_set(m))
        exact = exact and c.exact
        if best is None or (c.kappa_certified, len(c.members)) < (best.kappa_certified, len(best.members)):
            best = c
    return MinSeparator(best, exact, count)


@dataclass
class SeparatorReport:
    """Outcome of a separator pipeline: the set, its certified cover and what it cost."""

    a: int
    b: int
    separator: CliqueCoverSet
    verified: bool
    bound: float
    fallbacks: int = 0
    trace: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def kappa(self) -> int:
        return self.separator.kappa_certified

    @property
    def vertices(self) -> frozenset:
        return self.separator.members

    def record(self) -> dict:
        out = {
            "a": self.a, "b": self.b,
            "separator": " ".join(map(str, sorted(self.vertices))),
            "cover": "|".join(" ".join(map(str, sorted(c))) for c in self.separator.cover),
            "kappa": self.kappa, "verified": self.verified,
            "bound": round(self.bound, 3), "fallbacks": self.fallbacks,
        }
        for k, v in self.extras.items():
            out[k] = v
        return out


def finish(G: Graph, a: int, b: int, Z: Iterable[int], candidates=()) -> tuple:
    """Peel ``Z`` to a minimal separator, certify a cover and check the separation."""
    Z = frozenset(Z)
    if not Z and not separates(G, Z, a, b):
        return CliqueCoverSet(frozenset(), (), 0, True), False
    try:
        Y = peel_minimal_separator(G, Z, a, b)
    except ValueError:
        return clique_cover_number(G, Z), False
    cover = best_cover(G, Y, [c for c in candidates if c.members == Y])
    return cover, separates(G, Y, a, b)
