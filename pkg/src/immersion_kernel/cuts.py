"""Important edge cuts and splitter families."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import PreconditionError
from .flow import UnitFlow
from .multigraph import Multigraph


@dataclass(frozen=True)
class ImportantCut:
    cut: FrozenSet[int]
    reach: FrozenSet[int]


def _reach(G: Multigraph, S: Iterable[int], removed: FrozenSet[int]) -> Set[int]:
    seen = set(S)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for e in G.incident(x):
            if e in removed:
                continue
            y = G.other(e, x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def _check_terminals(G: Multigraph, S: FrozenSet[int], T: FrozenSet[int]) -> None:
    if S & T:
        raise PreconditionError(f"S and T intersect in {sorted(S & T)}")
    if not S or not T:
        raise PreconditionError("S and T must be non-empty")
    for v in S | T:
        if not G.has_vertex(v):
            raise PreconditionError(f"unknown vertex {v}")


def important_cut_verdict(G: Multigraph, S: Iterable[int], T: Iterable[int], cut: Iterable[int]) -> Tuple[bool, str]:
    """Decide importance using the furthest-minimum-cut characterization.

    delta is important iff it is a minimal (S,T)-cut and, with R its reach,
    R is the furthest minimum (R,T)-cut and lambda(R,T) = |delta|.
    """
    S, T, D = frozenset(S), frozenset(T), frozenset(cut)
    _check_terminals(G, S, T)
    R = _reach(G, S, D)
    if R & T:
        return False, "not a cut"
    for e in sorted(D):
        if not G.has_edge(e):
            return False, f"unknown edge {e}"
        if T & _reach(G, S, D - {e}) == set():
            return False, f"not minimal: edge {e} is redundant"
    fl = UnitFlow(G, R, T)
    val = fl.run(len(D) + 1)
    if val < len(D):
        return False, f"a cut of size {val} < {len(D)} reaches at least as far"
    tside = fl.sink_side()
    far_cut = frozenset(e for e, x, y in G.edges() if (x in tside) != (y in tside))
    if _reach(G, R, far_cut) != R:
        return False, "a cut of the same size has strictly larger reach"
    return True, "important"


def is_important_cut(G: Multigraph, S: Iterable[int], T: Iterable[int], cut: Iterable[int]) -> bool:
    return important_cut_verdict(G, S, T, cut)[0]


def furthest_min_cut(
    G: Multigraph, S: Iterable[int], T: Iterable[int], limit: int, deleted: FrozenSet[int] = frozenset()
) -> Tuple[int, FrozenSet[int]]:
    """(lambda, R) where R is the source side of the minimum cut closest to T.

    lambda is capped at limit+1; R is only meaningful when lambda <= limit.
    """
    fl = UnitFlow(G, S, T, deleted)
    lam = fl.run(limit + 1)
    if lam > limit:
        return lam, frozenset()
    return lam, frozenset(G.vertices) - fl.sink_side()


def cut_candidates(
    G: Multigraph, R: FrozenSet[int], T: FrozenSet[int], k: int, lam: Optional[int] = None
) -> Set[FrozenSet[int]]:
    """Raw (R,T)-cuts of size <= k from the branching search; a superset of
    the important cuts. Depends on the source only through its furthest
    minimum cut, so callers may memoize on R."""
    verts = frozenset(G.vertices)
    cands: Set[FrozenSet[int]] = set()

    def rec(src: FrozenSet[int], deleted: FrozenSet[int], budget: int, chosen: FrozenSet[int], lam=None) -> None:
        if lam is None:
            fl = UnitFlow(G, src, T, deleted)
            lam = fl.run(budget + 1)
            if lam > budget:
                return
            R = verts - fl.sink_side() if lam else src
        else:
            R = src
        if lam == 0:
            cands.add(chosen)
            return
        edge = None
        for x in sorted(R):
            for e in G.incident(x):
                if e not in deleted and G.other(e, x) not in R and (edge is None or e < edge[0]):
                    edge = (e, G.other(e, x))
        e, v = edge
        rec(frozenset(R), deleted | {e}, budget - 1, chosen | {e})
        if v not in T:
            rec(frozenset(R | {v}), deleted, budget, chosen)

    rec(frozenset(R), frozenset(), k, frozenset(), lam)
    return cands


def enumerate_important_cuts(G: Multigraph, S: Iterable[int], T: Iterable[int], k: int) -> List[ImportantCut]:
    """All important (S,T)-cuts of size at most k.

    Branches on the smallest-id edge leaving the furthest minimum cut: either
    the edge is in the cut (delete it, k-1) or its far endpoint joins S.
    Candidates are filtered by the importance test and deduplicated.
    """
    S, T = frozenset(S), frozenset(T)
    _check_terminals(G, S, T)
    if k < 0:
        return []
    out = []
    for D in cut_candidates(G, S, T, k):
        if is_important_cut(G, S, T, D):
            out.append(ImportantCut(D, frozenset(_reach(G, S, D))))
    out.sort(key=lambda c: (len(c.cut), sorted(c.cut)))
    return out


# ---- splitters


@dataclass(frozen=True)
class SplitterFamily:
    universe: Tuple[Hashable, ...]
    a: int
    b: int
    sets: Tuple[FrozenSet, ...]

    def __len__(self) -> int:
        return len(self.sets)

    def restrict(self, universe: Sequence[Hashable]) -> "SplitterFamily":
        """Family on a subset of the universe (coverage is inherited)."""
        U = frozenset(universe)
        return SplitterFamily(tuple(universe), self.a, self.b, tuple(frozenset(s & U) for s in self.sets))


def _member_masks(n: int, sets: Sequence[FrozenSet[int]]) -> List[int]:
    masks = [0] * n
    for j, s in enumerate(sets):
        for x in s:
            masks[x] |= 1 << j
    return masks


def _shapes(n: int, a: int, b: int) -> List[Tuple[int, int]]:
    """Maximal (|A|, |B|) size pairs; when n < a+b there are several."""
    if n >= a + b:
        return [(a, b)]
    return [(i, n - i) for i in range(max(0, n - b), min(a, n) + 1)]


def _demand_count(n: int, a: int, b: int) -> int:
    from math import comb

    return sum(comb(n, i) * comb(n - i, j) for i, j in _shapes(n, a, b))


def _first_uncovered(n: int, a: int, b: int, sets: Sequence[FrozenSet[int]]) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """An (A,B) demand on range(n) no set separates, or None.

    Only maximal demands are checked: covering those covers their subsets.
    """
    masks = _member_masks(n, sets)
    full = (1 << len(sets)) - 1
    for aa, bb in _shapes(n, a, b):
        for A in itertools.combinations(range(n), aa):
            inA = full
            for x in A:
                inA &= masks[x]
            if inA == 0:
                return A, tuple(y for y in range(n) if y not in A)[:bb]
            rest = [y for y in range(n) if y not in A]
            for B in itertools.combinations(rest, bb):
                m = inA
                for y in B:
                    m &= ~masks[y]
                if not m:
                    return A, B
    return None


def verify_splitter(fam: SplitterFamily) -> bool:
    idx = {x: i for i, x in enumerate(fam.universe)}
    sets = [frozenset(idx[x] for x in s if x in idx) for s in fam.sets]
    return _first_uncovered(len(fam.universe), fam.a, fam.b, sets) is None


_GREEDY_MAX = 8
_VERIFY_MAX_DEMANDS = 400_000
_CACHE: Dict[Tuple[int, int, int, int], Tuple[FrozenSet[int], ...]] = {}


def _greedy(n: int, a: int, b: int) -> List[FrozenSet[int]]:
    demands = []
    for aa, bb in _shapes(n, a, b):
        for A in itertools.combinations(range(n), aa):
            rest = [y for y in range(n) if y not in A]
            for B in itertools.combinations(rest, bb):
                demands.append((sum(1 << x for x in A), sum(1 << y for y in B)))
    open_ = set(range(len(demands)))
    cands = range(1 << n)
    out = []
    while open_:
        best, best_cov = None, None
        for c in cands:
            cov = [i for i in open_ if demands[i][0] & c == demands[i][0] and not demands[i][1] & c]
            if best_cov is None or len(cov) > len(best_cov):
                best, best_cov = c, cov
        out.append(frozenset(i for i in range(n) if best >> i & 1))
        open_ -= set(best_cov)
    return out


def _random_verified(n: int, a: int, b: int, seed: int) -> List[FrozenSet[int]]:
    rng = random.Random(f"splitter:{n}:{a}:{b}:{seed}")
    p = a / (a + b)
    sets: List[FrozenSet[int]] = []
    while True:
        hole = _first_uncovered(n, a, b, sets)
        if hole is None:
            return sets
        A, B = hole
        # add random sets until the hole is closed; each is biased by p
        while True:
            s = frozenset(i for i in range(n) if rng.random() < p)
            sets.append(s)
            if set(A) <= s and not set(B) & s:
                break


def _next_prime(x: int) -> int:
    def prime(q: int) -> bool:
        return q >= 2 and all(q % d for d in range(2, int(q ** 0.5) + 1))

    while not prime(x):
        x += 1
    return x


def _hashed(n: int, a: int, b: int, seed: int) -> List[FrozenSet[int]]:
    """Perfect hashing into [s^2] composed with a verified splitter there.

    For a prime p >= n and s = a+b, some alpha in [1,p) makes
    x -> (alpha*x mod p) mod s^2 injective on any s-subset (expected number
    of collisions below one), so the composition separates every demand.
    """
    s = a + b
    m = s * s
    p = _next_prime(max(n, 2))
    inner = _build(m, a, b, seed)
    out = []
    seen = set()
    for alpha in range(1, p):
        h = [(alpha * x % p) % m for x in range(n)]
        for Z in inner:
            fs = frozenset(x for x in range(n) if h[x] in Z)
            if fs not in seen:
                seen.add(fs)
                out.append(fs)
    return out


def _build(n: int, a: int, b: int, seed: int) -> Tuple[FrozenSet[int], ...]:
    key = (n, a, b, seed)
    if key in _CACHE:
        return _CACHE[key]
    if a == 0 or n == 0:
        sets = [frozenset()]
    elif b == 0:
        sets = [frozenset(range(n))]
    elif a == 1:
        # b >= n allows B = U, which only the empty set avoids
        sets = [frozenset([i]) for i in range(n)] + ([frozenset()] if b >= n else [])
    elif n <= _GREEDY_MAX:
        sets = _greedy(n, a, b)
    elif _demand_count(n, a, b) <= _VERIFY_MAX_DEMANDS:
        sets = _random_verified(n, a, b, seed)
    else:
        sets = _hashed(n, a, b, seed)
    _CACHE[key] = tuple(sets)
    return _CACHE[key]


def splitter_family(universe: Iterable[Hashable], a: int, b: int, seed: int = 0) -> SplitterFamily:
    """Sets T such that every disjoint A, B (|A| <= a, |B| <= b) has some
    A ⊆ T, B ∩ T = ∅.

    Small universes: greedy cover over all subsets. Medium: seeded random
    sets added until the exhaustive check passes. Large: modular perfect
    hashing composed with a small verified family (correct by construction).
    """
    U = tuple(sorted(set(universe)))
    if a < 0 or b < 0:
        raise PreconditionError("a and b must be non-negative")
    raw = _build(len(U), a, b, seed)
    return SplitterFamily(U, a, b, tuple(frozenset(U[i] for i in s) for s in raw))
