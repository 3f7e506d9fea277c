"""Separated triples: witnesses, minimal connected attachments, breaker census, local-to-global cutsets.

Setting: ``G`` is split into ``D`` (connected, contains ``b``) and
``X = N(D)``; ``X`` carries three pairwise anticomplete parts of equal size.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Iterable, Optional

from ..errors import (BudgetExceeded, NoAttachment, NotABreaker, PostconditionFailed,
                      PreconditionFailed)
from ..graph import (CliqueCoverSet, Graph, bfs_path, bits, budget, clique_cover_number,
                     component_containing, component_masks, independence_number,
                     maximal_clique_masks, popcount, to_mask, to_set)
from .canonical import central_bag
from .constants import local_global_eps

PAIRS = ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))
TYPES = ("1", "2a", "2b", "2c")
DEFAULT_SUFFIXES = 100_000


@dataclass(frozen=True)
class TripleWitness:
    triple: tuple                 # (x1, x2, x3)
    active_pair: tuple            # (i, j), 1-based
    K: frozenset
    triple_type: str              # "1", "2a", "2b" or "2c"
    D_prime: frozenset = frozenset()
    q: Optional[int] = None

    def describe(self) -> str:
        s = f"type={self.triple_type} pair={self.active_pair} K={sorted(self.K)}"
        if self.triple_type != "1":
            s += f" q={self.q} Dj'={sorted(self.D_prime)}"
        return s


# ---------------------------------------------------------------------------
# witness search


class _Ctx:
    """Shared per-(G, D, b) data for witness searches."""

    def __init__(self, G: Graph, D: Iterable[int], b: int, suffix_budget: Optional[int] = None):
        self.G = G
        self.dm = G.mask(D)
        self.b = b
        if not (self.dm >> b) & 1:
            raise PreconditionFailed("b must lie in D")
        self.nbr = G._nbr
        self.budget = budget(suffix_budget or DEFAULT_SUFFIXES)
        self.cliques = self._cliques()
        self._last = {}
        self._split = {}

    def _cliques(self):
        seen = set()
        for m in maximal_clique_masks(self.G, self.dm):
            members = list(bits(m))
            for r in range(1, len(members) + 1):
                for sub in combinations(members, r):
                    seen.add(to_mask(sub))
        return sorted(seen, key=lambda c: (popcount(c), tuple(bits(c))))

    def split(self, km: int):
        """Components of D - K as masks."""
        if km not in self._split:
            self._split[km] = component_masks(self.G, self.dm & ~km)
        return self._split[km]

    def attach(self, km: int, x: int) -> int:
        nx = self.nbr[x]
        out = 0
        for comp in self.split(km):
            if comp & nx:
                out |= comp
        return out

    def last_vertices(self, xj: int, q: int):
        """(L, avoidable) for induced b-xj paths in D + xj.

        L is the set of vertices that occur as the last vertex of N(q) along
        some induced path from b to xj; ``avoidable`` is True when some
        induced b-xj path misses N(q) entirely.  Found by growing induced
        suffixes backwards from xj through D - N(q) and closing each one
        with a shortest compatible prefix from b.
        """
        key = (xj, q)
        if key in self._last:
            return self._last[key]
        G, nbr, b = self.G, self.nbr, self.b
        nq = nbr[q] & self.dm & ~(1 << q)
        free = self.dm & ~nq & ~(1 << q)
        allowed = free & ~(1 << b)
        avoid = bfs_path(G, 1 << b, nbr[xj] & free, allowed) is not None
        L = 0
        count = 0
        # stack of (suffix tuple from xj, mask, closed neighbourhood of suffix minus its last vertex)
        stack = [((xj,), 1 << xj, 0)]
        while stack:
            suffix, sm, block = stack.pop()
            tail = suffix[-1]
            # vertices that may extend the suffix: neighbours of tail in D, not adjacent to the
            # earlier suffix vertices, not already used
            cand = nbr[tail] & self.dm & ~sm & ~block
            new_block = block | nbr[tail] | (1 << tail)
            for v in bits(cand):
                count += 1
                if count > self.budget:
                    raise BudgetExceeded("witness suffix enumeration", partial=to_set(L))
                if (nq >> v) & 1:
                    if (L >> v) & 1:
                        continue
                    if v == b:
                        continue
                    # prefix b .. v with every vertex but v outside N[suffix]
                    region = self.dm & ~new_block & ~(1 << v)
                    if (new_block >> b) & 1:
                        continue
                    if bfs_path(G, 1 << b, 1 << v, region) is not None or G.has_edge(b, v):
                        L |= 1 << v
                elif v != b:
                    stack.append((suffix + (v,), sm | (1 << v), new_block))
        out = (to_set(L), avoid)
        self._last[key] = out
        return out


def _check_pre(ctx: _Ctx, xs):
    G = ctx.G
    for u, v in combinations(xs, 2):
        if u == v or G.has_edge(u, v):
            raise PreconditionFailed("x1, x2, x3 must be distinct and pairwise non-adjacent")
    for x in xs:
        if (ctx.dm >> x) & 1:
            raise PreconditionFailed("triple vertices must lie outside D")
        if not ctx.nbr[x] & ctx.dm:
            raise NoAttachment(f"{x} has no neighbour in D")


def _type1(ctx: _Ctx, xs, km: int, i: int, j: int) -> bool:
    bit = 1 << ctx.b
    if km & bit:
        return False
    return not ((ctx.attach(km, xs[i - 1]) | ctx.attach(km, xs[j - 1])) & bit)


def _type2(ctx: _Ctx, xs, km: int, i: int, j: int):
    G, b, nbr = ctx.G, ctx.b, ctx.nbr
    Di = ctx.attach(km, xs[i - 1])
    if (Di | G.nbhd_mask(Di)) >> b & 1:
        return None
    xj = xs[j - 1]
    options = []
    if (km >> b) & 1:
        options.append(("2a", b))
    for k in (1, 2, 3):
        if k == i:
            continue
        xk = xs[k - 1]
        if km & ~nbr[xk] == 0:
            options.append(("2b" if k == j else "2c", xk))
    for label, q in options:
        L, avoid = ctx.last_vertices(xj, q)
        if avoid or not L:
            continue
        lm = G.mask(L)
        if G.is_clique_mask(lm):
            continue
        if any(km & ~(nbr[v] | (1 << v)) for v in L):
            continue
        if q != b and lm & ~nbr[q]:
            continue
        return TripleWitness(tuple(xs), (i, j), to_set(km), label, L, q)
    return None


def find_triple_witness(G: Graph, D: Iterable[int], b: int, x1: int, x2: int, x3: int,
                        suffix_budget: Optional[int] = None, _ctx: Optional[_Ctx] = None) -> Optional[TripleWitness]:
    """A witness clique making ``x1 x2 x3`` b-separated, or None.

    Every nonempty clique of D is tried in (size, vertex) order and a type 1
    witness is preferred over a type 2 one.  The path conditions of type 2
    are decided exactly by enumerating induced suffixes; if that exceeds the
    budget BudgetExceeded is raised, which callers must treat as "unknown"
    rather than "no witness".
    """
    ctx = _ctx or _Ctx(G, D, b, suffix_budget)
    xs = (x1, x2, x3)
    _check_pre(ctx, xs)
    if any(G.has_edge(b, x) for x in xs):
        return None
    for km in ctx.cliques:
        for i, j in PAIRS:
            if _type1(ctx, xs, km, i, j):
                return TripleWitness(xs, (i, j), to_set(km), "1")
    for km in ctx.cliques:
        for i, j in PAIRS:
            w = _type2(ctx, xs, km, i, j)
            if w is not None:
                return w
    return None


def induced_paths(G: Graph, start: int, end: int, region: int, limit: int = 200_000):
    """All induced paths from start to end with interior in ``region`` (a mask)."""
    nbr = G._nbr
    out = []
    count = [0]

    def grow(path, pm, block):
        tail = path[-1]
        if nbr[tail] >> end & 1:
            if len(path) == 1 or not (block & (1 << end)):
                out.append(path + (end,))
            return
        for v in bits(nbr[tail] & region & ~pm & ~block):
            count[0] += 1
            if count[0] > limit:
                raise BudgetExceeded("induced path enumeration")
            grow(path + (v,), pm | (1 << v), block | nbr[tail] | (1 << tail))

    if start == end:
        return [(start,)]
    grow((start,), 1 << start, 0)
    return out


def validate_triple_witness(G: Graph, D: Iterable[int], b: int, w: TripleWitness,
                            path_limit: int = 200_000) -> bool:
    """Recheck every bullet of the witness definition by brute force over induced paths."""
    dm = G.mask(D)
    nbr = G._nbr
    xs = w.triple
    km = G.mask(w.K)
    if not km or km & ~dm or not G.is_clique_mask(km):
        return False
    if any(G.has_edge(b, x) for x in xs):
        return False
    comps = component_masks(G, dm & ~km)

    def attach(x):
        return sum(c for c in comps if c & nbr[x])

    i, j = w.active_pair
    Di, Dj = attach(xs[i - 1]), attach(xs[j - 1])
    if w.triple_type == "1":
        return not ((km | Di | Dj) >> b & 1)
    if (Di | G.nbhd_mask(Di)) >> b & 1:
        return False
    Dp = G.mask(w.D_prime)
    if not Dp or G.is_clique_mask(Dp):
        return False
    if any(km & ~(nbr[v] | (1 << v)) for v in bits(Dp)):
        return False
    q = w.q
    if w.triple_type == "2a":
        if q != b or not (km >> b) & 1:
            return False
    else:
        k = xs.index(q) + 1 if q in xs else None
        if k is None or k == i:
            return False
        if w.triple_type == "2b" and k != j or w.triple_type == "2c" and k == j:
            return False
        if (km | Dp) & ~nbr[q]:
            return False
    xj = xs[j - 1]
    region = dm & ~(1 << b)
    lasts = set()
    for P in induced_paths(G, b, xj, region, path_limit):
        hits = [v for v in P if (nbr[q] >> v) & 1]
        if not hits:
            return False
        last = hits[-1]
        if km & ~(nbr[last] | (1 << last)):
            return False
        lasts.add(last)
    return set(bits(Dp)) <= lasts


# ---------------------------------------------------------------------------
# minimal connected subgraphs meeting three neighbourhoods


@dataclass(frozen=True)
class MinimalConnected:
    outcome: str                  # "path+attachment", "spider" or "triangle-spider"
    H: frozenset
    parts: dict = field(hash=False)


def minimal_connected_subgraph(G: Graph, D: Iterable[int], xs) -> int:
    """Inclusion-minimal connected H inside D meeting N(x) for each x in xs (mask).

    Dropping single vertices until none can go is enough: if a proper
    connected H' works, a spanning tree of H grown from one of H' has a leaf
    outside H', and that leaf can be dropped.
    """
    dm = G.mask(D)
    nbr = G._nbr
    for x in xs:
        if not nbr[x] & dm:
            raise NoAttachment(f"{x} has no neighbour in D")
    comp = next((c for c in component_masks(G, dm) if all(c & nbr[x] for x in xs)), None)
    if comp is None:
        raise NoAttachment("no component of D meets all three neighbourhoods")
    H = comp

    def ok(m):
        return all(m & nbr[x] for x in xs) and len(component_masks(G, m)) == 1

    changed = True
    while changed:
        changed = False
        for v in sorted(bits(H), reverse=True):
            m = H & ~(1 << v)
            if m and ok(m):
                H = m
                changed = True
    return H


def _is_path_between(G: Graph, vs: int, s: int, t: int, ignore=()) -> Optional[list]:
    """Order of ``vs`` as an induced s-t path (edges in ``ignore`` are skipped), or None."""
    nbr = G._nbr
    drop = {frozenset(e) for e in ignore}

    def nb(v):
        return [u for u in bits(nbr[v] & vs) if frozenset((u, v)) not in drop]

    order = [s]
    prev = None
    cur = s
    seen = {s}
    while cur != t:
        nxt = [u for u in nb(cur) if u != prev]
        if len(nxt) != 1 or nxt[0] in seen:
            return None
        prev, cur = cur, nxt[0]
        order.append(cur)
        seen.add(cur)
    if len(order) != popcount(vs):
        return None
    if len(nb(t)) != (1 if len(order) > 1 else 0):
        return None
    return order


def classify_minimal_connected(G: Graph, D: Iterable[int], x1: int, x2: int, x3: int) -> MinimalConnected:
    """Find a minimal connected H in D and sort it into path+attachment, spider or triangle-spider."""
    xs = (x1, x2, x3)
    H = minimal_connected_subgraph(G, D, xs)
    nbr = G._nbr
    xm = to_mask(xs)
    xx = [(u, v) for u, v in combinations(xs, 2) if G.has_edge(u, v)]
    for i, j, k in permutations(range(3)):
        if i > j:
            continue
        xi, xj, xk = xs[i], xs[j], xs[k]
        order = _is_path_between(G, H | (1 << xi) | (1 << xj), xi, xj, ignore=[(xi, xj)] if G.has_edge(xi, xj) else ())
        if order is None:
            continue
        att = nbr[xk] & H
        two_nonadj = any(not G.has_edge(u, v) for u, v in combinations(bits(att), 2))
        two_adj = popcount(att) == 2 and G.is_clique_mask(att)
        if two_nonadj or two_adj:
            return MinimalConnected("path+attachment", to_set(H),
                                    {"ends": (xi, xj), "path": tuple(order), "attached": xk})
    for centre in bits(H):
        rest = (H | xm) & ~(1 << centre)
        paths = _legs(G, rest, xs, xx, {xs[t]: centre for t in range(3)})
        if paths is not None:
            return MinimalConnected("spider", to_set(H), {"centre": centre, "legs": paths})
    for tri in combinations(bits(H), 3):
        if not G.is_clique_mask(to_mask(tri)):
            continue
        for perm in permutations(tri):
            ignore = list(combinations(tri, 2)) + xx
            paths = _legs(G, H | xm, xs, ignore, {xs[t]: perm[t] for t in range(3)}, own_root=True)
            if paths is not None:
                return MinimalConnected("triangle-spider", to_set(H), {"triangle": perm, "legs": paths})
    raise PostconditionFailed("minimal connected subgraph fits none of the three shapes",
                              {"H": sorted(bits(H)), "x": xs})


def _legs(G: Graph, vs: int, xs, ignore, roots: dict, own_root: bool = False):
    """Split ``vs`` into three induced legs, one per x, each ending at its root.

    Edges in ``ignore`` are disregarded.  With ``own_root`` the roots are
    part of ``vs`` and of their legs; otherwise the shared root is outside
    ``vs`` and each leg must touch it exactly at its far end.
    """
    nbr = G._nbr
    drop = {frozenset(e) for e in ignore}
    adj = {v: [u for u in bits(nbr[v] & vs) if frozenset((u, v)) not in drop] for v in bits(vs)}
    # components under the reduced adjacency
    seen = set()
    comps = []
    for v in bits(vs):
        if v in seen:
            continue
        comp, stack = {v}, [v]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(comp)
    if len(comps) != 3:
        return None
    legs = []
    for x in xs:
        comp = next(c for c in comps if x in c)
        root = roots[x]
        if own_root:
            if root not in comp:
                return None
            order = _is_path_between(G, to_mask(comp), x, root, ignore)
            if order is None:
                return None
        else:
            # the leg is x .. u where u is the unique vertex of comp adjacent to the centre
            touch = [u for u in comp if G.has_edge(u, root)]
            if len(touch) != 1:
                return None
            order = _is_path_between(G, to_mask(comp), x, touch[0], ignore)
            if order is None:
                return None
            order = order + [root]
        legs.append(tuple(order))
    if sum(1 for c in comps if sum(1 for x in xs if x in c) == 1) != 3:
        return None
    return tuple(legs)


# ---------------------------------------------------------------------------
# census


@dataclass
class Census:
    count: int                    # b-separated triples found (or estimated)
    total: int                    # number of partitioned triples
    examined: int
    exact: bool
    unknown: int
    witnesses: dict               # triple -> TripleWitness
    x_size: int

    def is_breaker(self, delta) -> bool:
        return self.count >= Fraction(delta) * self.x_size ** 3


def breaker_census(G: Graph, X: Iterable[int], parts, b: int, D: Optional[Iterable[int]] = None,
                   triple_budget: Optional[int] = None, seed: int = 0,
                   suffix_budget: Optional[int] = None) -> Census:
    """Count partitioned b-separated triples, exactly when affordable.

    Beyond ``triple_budget`` triples a seeded sample of that many is
    examined and the count is scaled up (``exact`` is then False).
    """
    X = frozenset(X)
    parts = [tuple(sorted(p)) for p in parts]
    if len(parts) != 3 or len({len(p) for p in parts}) != 1:
        raise PreconditionFailed("three parts of equal size are required")
    for p, q in combinations(parts, 2):
        if set(p) & set(q) or any(G.has_edge(u, v) for u in p for v in q):
            raise PreconditionFailed("parts must be disjoint and anticomplete")
    if D is None:
        D = [v for v in G.vertices if v not in X]
    ctx = _Ctx(G, D, b, suffix_budget)
    total = len(parts[0]) ** 3
    cap = budget(triple_budget or 20_000)
    triples = list(product(*parts))
    exact = total <= cap
    if not exact:
        triples = random.Random(seed).sample(triples, cap)
    found = {}
    unknown = 0
    for t in triples:
        try:
            w = find_triple_witness(G, D, b, *t, _ctx=ctx)
        except BudgetExceeded:
            unknown += 1
            continue
        if w is not None:
            found[t] = w
    count = len(found) if exact else round(len(found) * total / len(triples))
    return Census(count, total, len(triples), exact, unknown, found, len(X))


# ---------------------------------------------------------------------------
# local to global


@dataclass
class LocalGlobalResult:
    S: CliqueCoverSet
    killed: frozenset             # x in X whose neighbourhood misses the b-component of D - S
    active_pair: tuple
    manageable_type: str
    Z1: frozenset
    W1: frozenset
    alpha: int
    branch: str                   # "minimal-W1" or "all-Z1"
    eps: Fraction
    report: dict = field(default_factory=dict)


def killed_set(G: Graph, D: Iterable[int], X: Iterable[int], b: int, S: Iterable[int]) -> frozenset:
    """Vertices x of X with no neighbour in the component of D - S containing b."""
    dm = G.mask(D) & ~G.mask(S)
    comp = component_containing(G, dm, b)
    return frozenset(x for x in X if not G.nbr_mask(x) & comp)


def local_to_global(G: Graph, X: Iterable[int], parts, b: int, delta, eps=None,
                    census: Optional[Census] = None, D: Optional[Iterable[int]] = None) -> LocalGlobalResult:
    """One bounded-kappa cutset cutting b off from many neighbourhoods of a breaker.

    Follows the counting construction: fix witnesses (type 1 preferred), take
    the central bag of (D, b), project each x onto it, pick the dominant
    ordered active pair and the first witness type holding a delta/24
    share, keep the x_i with many manageable triples (Z1), and output the
    union of their projections, shrunk to a minimal W1 once the union's
    stability number reaches 96/delta.  Both postconditions are verified.
    """
    delta = Fraction(delta)
    eps = local_global_eps(delta) if eps is None else Fraction(eps)
    X = frozenset(X)
    parts = [tuple(sorted(p)) for p in parts]
    if D is None:
        D = [v for v in G.vertices if v not in X]
    D = frozenset(D)
    if G.nbhd_mask(G.mask(D)) & G.all_mask & ~G.mask(X):
        raise PreconditionFailed("N(D) must lie inside X")
    if census is None:
        census = breaker_census(G, X, parts, b, D)
    nX = len(X)
    if not census.is_breaker(delta):
        raise NotABreaker(f"{census.count} separated triples < delta |X|^3 = {float(delta * nX ** 3):.3f}")
    Dg = G.induced(D)
    bag = central_bag(Dg, b)
    beta = bag.beta
    proj = {}
    for x in X:
        nx_ = G.neighbors(x)
        p = set(nx_ & beta)
        for F, NF, _ in bag.outside:
            if nx_ & F:
                p |= NF
        proj[x] = frozenset(p)
    # dominant ordered pair, then the first type with a delta/24 share
    by_pair = {}
    for t, w in census.witnesses.items():
        by_pair.setdefault(w.active_pair, []).append((t, w))
    pair = max(sorted(by_pair), key=lambda p: len(by_pair[p]))
    i, j = pair
    scale = census.total / max(1, census.examined)
    counts = {ty: sum(1 for _, w in by_pair[pair] if w.triple_type == ty) for ty in TYPES}
    need = delta / 24 * nX ** 3
    ty = next((ty for ty in TYPES if counts[ty] * scale >= need), None)
    if ty is None:
        ty = max(TYPES, key=lambda s: counts[s])
    manageable = [t for t, w in by_pair[pair] if w.triple_type == ty]
    per_x = {}
    for t in manageable:
        per_x[t[i - 1]] = per_x.get(t[i - 1], 0) + 1
    z_need = delta / 48 * nX ** 2
    Z1 = sorted(x for x, c in per_x.items() if c * scale >= z_need)
    if not Z1:
        Z1 = sorted(per_x, key=lambda x: (-per_x[x], x))[:1]
    target = math.ceil(96 / delta)

    def alpha_of(ws):
        S = set().union(*(proj[w] for w in ws)) if ws else set()
        return independence_number(G, S, exact=len(S) <= 40) if S else 0

    W = list(Z1)
    branch = "all-Z1"
    if alpha_of(W) >= target:
        branch = "minimal-W1"
        prefix = []
        for w in W:
            prefix.append(w)
            if alpha_of(prefix) >= target:
                break
        for w in list(prefix):
            trial = [u for u in prefix if u != w]
            if alpha_of(trial) >= target:
                prefix = trial
        W = prefix
    S = frozenset().union(*(proj[w] for w in W))
    if b in S:
        raise PostconditionFailed("projection union contains b", {"S": sorted(S)})
    cover = clique_cover_number(G, S)
    killed = killed_set(G, D, X, b, S)
    result = LocalGlobalResult(cover, killed, pair, ty, frozenset(Z1), frozenset(W), alpha_of(W), branch, eps)
    result.report = {
        "kappa": cover.kappa_certified, "kappa_bound": float((96 / delta) ** 2),
        "killed": len(killed), "kill_needed": float(eps * nX), "census": census.count,
        "type_counts": counts,
    }
    if cover.kappa_certified > (96 / delta) ** 2:
        raise PostconditionFailed("kappa(S) exceeds (96/delta)^2", result.report)
    if len(killed) < eps * nX:
        raise PostconditionFailed("too few neighbourhoods cut off", result.report)
    return result
