"""Bouquets and thetas, the approximation driver, bounding, kernelization
and exact solving."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import PreconditionError, ResourceLimitError
from .immersion import DEFAULT_LIMITS, GraphFamily, SearchLimits, graph_canonical, is_family_free, obstruction
from .multigraph import Multigraph
from .protrusion import (
    PruningRecord,
    ReductionTrace,
    ReplacementStats,
    ReplacementTable,
    default_table,
    exhaustive_replacement,
    lift_solution,
)
from .treecut import lca_closure, neat_decomposition


@dataclass(frozen=True)
class Theta:
    endpoints: Tuple[int, int]
    edges: Tuple[int, ...]


@dataclass(frozen=True)
class Bouquet:
    attachment: Tuple[int, ...]
    elements: Tuple[FrozenSet[int], ...]

    def vertices(self) -> FrozenSet[int]:
        return frozenset().union(*self.elements)

    def edge_set(self, G: Multigraph) -> FrozenSet[int]:
        """Edges incident to some element."""
        return frozenset(e for v in self.vertices() for e in G.incident(v))


@dataclass
class Solution:
    edges: FrozenSet[int]
    verified: bool
    # OPT is at least this (one per pruned component)
    lower_bound: int = 0
    stats: Dict[str, int] = field(default_factory=dict)


# ---- detection


def find_thetas(G: Multigraph, threshold: int) -> List[Theta]:
    """Maximal parallel classes with at least ``threshold`` edges."""
    classes: Dict[Tuple[int, int], List[int]] = {}
    for e, a, b in G.edges():
        classes.setdefault((min(a, b), max(a, b)), []).append(e)
    return [Theta(uv, tuple(sorted(es))) for uv, es in sorted(classes.items()) if len(es) >= threshold]


def _element_key(G: Multigraph, U: Tuple[int, ...], C: FrozenSet[int]) -> Tuple:
    cols = {v: (0,) for v in C}
    for i, u in enumerate(U):
        cols[u] = (1, i)
    H = G.induced(C | set(U))
    # edges inside U belong to thetas, not to the element
    H = H.delete_edges(H.induced_edges(U))
    return graph_canonical(H, cols)


def _attached_components(G: Multigraph, U: Tuple[int, ...], max_edges: int) -> List[FrozenSet[int]]:
    """Components C of G - U with N(C) = U, |δ(C)| <= 2 and ||G[C]|| <= max_edges."""
    out = []
    Uset = frozenset(U)
    for C in G.delete_vertices(Uset).components():
        bd = G.boundary(C)
        if len(bd) > 2:
            continue
        nb = {G.other(e, x) for x in C for e in G.incident(x) if G.other(e, x) not in C}
        if nb != Uset:
            continue
        if len(G.induced_edges(C)) > max_edges:
            continue
        out.append(frozenset(C))
    return out


def find_bouquets(
    G: Multigraph,
    family: GraphFamily,
    threshold: Optional[int] = None,
    max_element_edges: Optional[int] = None,
    check_disjoint: bool = False,
) -> List[Bouquet]:
    """All maximal bouquets: groups of >= threshold connected 2-protrusions
    with the same attachment U (|U| <= 2) and pairwise isomorphic G[U ∪ S]
    (isomorphism fixing U).

    Element sizes are capped by 2bF*cF, the most an element can have when
    G has no excessive protrusion.
    """
    threshold = family.dF if threshold is None else threshold
    cap = 2 * family.bF * family.cF if max_element_edges is None else max_element_edges
    # every element sends an edge to every attachment vertex
    hubs = sorted(v for v in G.vertices if G.degree(v) >= threshold)
    attachments = [(u,) for u in hubs] + list(itertools.combinations(hubs, 2))
    out = []
    for U in attachments:
        groups: Dict[Tuple, List[FrozenSet[int]]] = {}
        for C in _attached_components(G, U, cap):
            groups.setdefault(_element_key(G, U, C), []).append(C)
        for key in sorted(groups, key=lambda k: min(min(C) for C in groups[k])):
            els = groups[key]
            if len(els) >= threshold:
                out.append(Bouquet(U, tuple(sorted(els, key=min))))
    if check_disjoint:
        _assert_disjoint(G, out, find_thetas(G, threshold))
    return out


def _assert_disjoint(G: Multigraph, bouquets: Sequence[Bouquet], thetas: Sequence[Theta]) -> None:
    sets = [b.edge_set(G) for b in bouquets] + [frozenset(t.edges) for t in thetas]
    for i, j in itertools.combinations(range(len(sets)), 2):
        if sets[i] & sets[j]:
            raise AssertionError("bouquets/thetas share edges; the graph has an excessive protrusion")
    members = frozenset().union(*(b.vertices() for b in bouquets)) if bouquets else frozenset()
    for s in list(bouquets) + list(thetas):
        U = s.attachment if isinstance(s, Bouquet) else s.endpoints
        if set(U) & members:
            raise AssertionError("an attachment meets a bouquet element")


# ---- pruning and approximation


def prune_structures(G: Multigraph, family: GraphFamily, limits: SearchLimits = DEFAULT_LIMITS) -> FrozenSet[int]:
    """Edges left after cutting every theta and bouquet down to dF-1 members.

    Thetas first, then bouquets of the thinned graph. Removing the result
    strictly lowers OPT.
    """
    if not G.is_connected():
        raise PreconditionError("pruning needs a connected graph")
    if is_family_free(G, family, limits):
        raise PreconditionError("graph is already free of the family")
    keep = family.dF - 1
    drop = [e for th in find_thetas(G, family.dF) for e in th.edges[keep:]]
    G1 = G.delete_edges(drop)
    gone: set = set()
    for b in find_bouquets(G1, family, family.dF):
        for S in b.elements[keep:]:
            gone |= S
    core = G1.delete_vertices(gone)
    delta = frozenset(core.edge_ids)
    if not delta:
        raise AssertionError("pruned core has no edges")
    return delta


def _minimize(G: Multigraph, F: FrozenSet[int], family: GraphFamily, limits: SearchLimits) -> FrozenSet[int]:
    """Drop solution edges whose return keeps G - F free (largest id first)."""
    cur = set(F)
    for e in sorted(F, reverse=True):
        cur.discard(e)
        if not is_family_free(G.delete_edges(cur), family, limits):
            cur.add(e)
    return frozenset(cur)


def approximate(
    G: Multigraph,
    family: GraphFamily,
    table: Optional[ReplacementTable] = None,
    seed: int = 0,
    immersion_respecting: bool = False,
    limits: SearchLimits = DEFAULT_LIMITS,
    minimize: bool = True,
) -> Solution:
    """Verified solution within a constant factor of OPT.

    Alternates exhaustive protrusion replacement with pruning of every
    non-free component; each pruned component loses at least one from its
    OPT, so the number of prunings is a lower bound on OPT. Solutions are
    lifted back stage by stage.
    """
    table = table if table is not None else default_table(family, immersion_respecting, limits=limits)
    stats = ReplacementStats()
    stages: List[Tuple[Multigraph, ReductionTrace, FrozenSet[int]]] = []
    cur = G
    delta: FrozenSet[int] = frozenset()
    rounds = 0
    prunings = 0
    while True:
        H = cur.delete_edges(delta)
        nxt, tr = exhaustive_replacement(H, family, table, None, seed, immersion_respecting, stats)
        stages.append((H, tr, delta))
        bad = [C for C in nxt.components() if not is_family_free(nxt.induced(C), family, limits)]
        if not bad:
            break
        rounds += 1
        if rounds > G.num_edges:
            raise AssertionError("more pruning rounds than edges")
        parts = [prune_structures(nxt.induced(C), family, limits) for C in bad]
        prunings += len(parts)
        delta = frozenset().union(*parts)
        cur = nxt
    F: FrozenSet[int] = frozenset()
    for H, tr, d in reversed(stages):
        F = lift_solution(F, tr, H, family, limits) | d
    if minimize:
        F = _minimize(G, F, family, limits)
    ok = is_family_free(G.delete_edges(F), family, limits)
    if not ok:
        raise AssertionError("approximate solution does not verify")
    st = {"iterations": rounds + 1, "replacements": stats.replacements, "prunings": prunings}
    return Solution(F, ok, prunings, st)


# ---- bounding


def _isolated_region(G: Multigraph, delta: FrozenSet[int], seeds: Iterable[int], family: GraphFamily,
                     limits: SearchLimits) -> FrozenSet[int]:
    """Union of the components of G - delta meeting ``seeds``; each must be free."""
    H = G.delete_edges(delta)
    seeds = set(seeds)
    region: set = set()
    for C in H.components():
        if not C & seeds:
            continue
        if not is_family_free(H.induced(C), family, limits):
            raise PreconditionError(
                f"component of G - Δ through vertex {min(C)} ({len(C)} vertices) is not free of the family"
            )
        region |= C
    return frozenset(region)


def bound_bouquet(
    G: Multigraph,
    B: Bouquet,
    delta: Iterable[int],
    family: GraphFamily,
    trace: Optional[ReductionTrace] = None,
    limits: SearchLimits = DEFAULT_LIMITS,
) -> Multigraph:
    """Delete all but dF + |Δ| elements of a bouquet isolated by Δ."""
    delta = frozenset(delta)
    limit = family.dF + len(delta)
    if len(B.elements) <= limit:
        return G
    region = _isolated_region(G, delta, set(B.attachment) | B.vertices(), family, limits)
    gone = frozenset().union(*B.elements[limit:])
    edges = frozenset(e for v in gone for e in G.incident(v))
    local = frozenset(e for v in region for e in G.incident(v))
    if trace is not None:
        trace.records.append(PruningRecord("bound-bouquet", edges, gone, delta, local))
    return G.delete_vertices(gone)


def bound_theta(
    G: Multigraph,
    th: Theta,
    delta: Iterable[int],
    family: GraphFamily,
    trace: Optional[ReductionTrace] = None,
    limits: SearchLimits = DEFAULT_LIMITS,
) -> Multigraph:
    """Delete all but dF + |Δ| parallel edges of a theta isolated by Δ."""
    delta = frozenset(delta)
    limit = family.dF + len(delta)
    if len(th.edges) <= limit:
        return G
    region = _isolated_region(G, delta, th.endpoints, family, limits)
    gone = frozenset(th.edges[limit:])
    local = frozenset(e for v in region for e in G.incident(v))
    if trace is not None:
        trace.records.append(PruningRecord("bound-theta", gone, frozenset(), delta, local))
    return G.delete_edges(gone)


def _tree_component(D, start: int, cut: int) -> List[int]:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in D.tree_neighbors(x):
            if y != cut and y not in seen:
                seen.add(y)
                stack.append(y)
    return sorted(seen)


def reduce_from_approx(
    G: Multigraph,
    F_apx: Iterable[int],
    family: GraphFamily,
    trace: Optional[ReductionTrace] = None,
    limits: SearchLimits = DEFAULT_LIMITS,
    c: Optional[float] = None,
) -> Optional[Multigraph]:
    """Smaller OPT-equal subgraph of G, or None.

    None either certifies ||G|| <= c*|F_apx| or means no node of the
    decomposition carries a bouquet or theta above its allowance f(t).
    """
    F = frozenset(F_apx)
    if not G.is_connected():
        raise PreconditionError("reduction needs a connected graph")
    if not is_family_free(G.delete_edges(F), family, limits):
        raise PreconditionError("G - F_apx is not free of the family")
    c = family.c_ker / family.c_apx if c is None else c
    if G.num_edges <= c * len(F):
        return None
    D = neat_decomposition(G.delete_edges(F), family, strict=False)
    touched = {x for e in F for x in G.endpoints(e)}
    M = lca_closure(D, [t for t in D.nodes if D.bags[t] & touched])
    dF = family.dF
    for t in sorted(M):
        Xt = D.bags[t]
        Ft = frozenset(e for e in F if set(G.endpoints(e)) & Xt)
        heavy, light = [], []
        for s in D.tree_neighbors(t):
            comp = _tree_component(D, s, t)
            (heavy if any(x in M for x in comp) else light).append((s, comp))
        delta = Ft.union(*(D.adhesion(t, s) for s, _ in heavy))
        f_t = len(Ft) + family.bF * len(heavy) + dF
        allowance = max(f_t, dF + len(delta))
        groups: Dict[Tuple, List[FrozenSet[int]]] = {}
        for s, comp in light:
            X = frozenset().union(*(D.bags[x] for x in comp))
            if not X or len(G.boundary(X)) > 2:
                continue
            U = tuple(sorted({G.other(e, x) for x in X for e in G.incident(x) if G.other(e, x) not in X}))
            if not U or not set(U) <= Xt or not G.induced(X).is_connected():
                continue
            groups.setdefault((U, _element_key(G, U, X)), []).append(X)
        for (U, _), els in sorted(groups.items(), key=lambda kv: (kv[0][0], min(min(x) for x in kv[1]))):
            if len(els) > allowance:
                B = Bouquet(U, tuple(sorted(els, key=min)))
                return bound_bouquet(G, B, delta, family, trace, limits)
        for th in find_thetas(G.induced(Xt), allowance + 1):
            return bound_theta(G, th, delta, family, trace, limits)
    return None


# ---- kernelization


@dataclass
class KernelResult:
    no_instance: bool
    graph: Multigraph
    trace: ReductionTrace
    k: int
    # whether ||graph|| <= c_ker * k was reached
    within_bound: bool = True
    stats: Dict[str, int] = field(default_factory=dict)


def _drop_free_components(G: Multigraph, family: GraphFamily, trace: ReductionTrace,
                          limits: SearchLimits) -> Multigraph:
    for C in G.components():
        H = G.induced(C)
        if is_family_free(H, family, limits):
            es = frozenset(H.edge_ids)
            trace.records.append(PruningRecord("free-component", es, frozenset(C), frozenset(), es))
            G = G.delete_vertices(C)
    return G


def kernelize(
    G: Multigraph,
    k: int,
    family: GraphFamily,
    table: Optional[ReplacementTable] = None,
    seed: int = 0,
    immersion_respecting: bool = False,
    limits: SearchLimits = DEFAULT_LIMITS,
) -> KernelResult:
    """Equivalent instance with at most c_ker*k edges, or a NO verdict.

    NO is declared only when the approximation is above c_apx*k and its
    certified lower bound on OPT exceeds k, so the verdict is never wrong.
    OPT of the returned graph equals OPT(G).
    """
    if k < 0:
        raise PreconditionError("k must be non-negative")
    table = table if table is not None else default_table(family, immersion_respecting, limits=limits)
    trace = ReductionTrace()
    stats = ReplacementStats()
    cur = G
    iterations = 0

    def result(no: bool, within: bool) -> KernelResult:
        st = {"iterations": iterations, "replacements": trace.replacements(), "prunings": trace.prunings()}
        return KernelResult(no, cur, trace, k, within, st)

    while True:
        iterations += 1
        if iterations > G.num_edges + 2:
            raise AssertionError("kernelization did not shrink the graph")
        cur, _ = exhaustive_replacement(cur, family, table, trace, seed, immersion_respecting, stats)
        cur = _drop_free_components(cur, family, trace, limits)
        if cur.num_edges <= family.c_ker * k:
            return result(False, True)
        sol = approximate(cur, family, table, seed, immersion_respecting, limits)
        if len(sol.edges) > family.c_apx * k and max(sol.lower_bound, opt_lower_bound(cur, family, k, limits)) > k:
            return result(True, False)
        c = family.c_ker / family.c_apx
        comps = []
        for C in cur.components():
            H = cur.induced(C)
            FH = frozenset(e for e in sol.edges if H.has_edge(e))
            comps.append((-(H.num_edges / max(len(FH), 1)), min(C), H, FH))
        comps.sort(key=lambda x: (x[0], x[1]))
        reduced = False
        for _, _, H, FH in comps:
            if H.num_edges <= c * len(FH):
                continue
            out = reduce_from_approx(H, FH, family, trace, limits, c)
            if out is None:
                continue
            rec = trace.records[-1]
            cur = cur.delete_edges(rec.deleted_edges).delete_vertices(rec.deleted_vertices)
            reduced = True
            break
        if not reduced:
            return result(False, cur.num_edges <= family.c_ker * k)


# ---- exact solving


def _is_theta2(family: GraphFamily) -> bool:
    if len(family.members) != 1:
        return False
    H = family.members[0]
    return H.num_vertices == 2 and H.num_edges == 2


def min_deletion_set(
    G: Multigraph,
    family: GraphFamily,
    budget: int,
    limits: SearchLimits = DEFAULT_LIMITS,
) -> Optional[FrozenSet[int]]:
    """Smallest edge set (size <= budget) whose removal makes G free, or None.

    Iterative deepening; each level branches on the edges of one member
    model, which every solution must hit. Components are solved apart.
    """
    out: set = set()
    left = budget
    for C in G.components():
        found = _solve_component(G.induced(C), family, left, limits)
        if found is None:
            return None
        out |= found
        left -= len(found)
    return frozenset(out)


def _pair(G: Multigraph, e: int) -> Tuple[int, int]:
    a, b = G.endpoints(e)
    return (a, b) if a < b else (b, a)


def _branch(G: Multigraph, family: GraphFamily, L: FrozenSet[int], budget: int, limits: SearchLimits,
            failed: Dict[Tuple, int]) -> Optional[FrozenSet[int]]:
    # parallel edges are interchangeable, so states are keyed by per-pair counts
    key = tuple(sorted(_pair(G, e) for e in L))
    if failed.get(key, -1) >= budget:
        return None
    H = G.delete_edges(L)
    hit = obstruction(H, family, limits)
    if hit is None:
        return L
    used = hit[1].edges_used()
    if budget == 0 or _packing(H, family, used, budget, limits) > budget:
        failed[key] = budget
        return None
    seen = set()
    for e in sorted(used):
        pr = _pair(G, e)
        if pr in seen:
            continue
        seen.add(pr)
        got = _branch(G, family, L | {e}, budget - 1, limits, failed)
        if got is not None:
            return got
    failed[key] = budget
    return None


def _packing(H: Multigraph, family: GraphFamily, first: FrozenSet[int], budget: int, limits: SearchLimits) -> int:
    """Greedy count of edge-disjoint member models (stops past ``budget``)."""
    used = set(first)
    count = 1
    while count <= budget:
        hit = obstruction(H.delete_edges(used), family, limits)
        if hit is None:
            break
        used |= hit[1].edges_used()
        count += 1
    return count


def opt_lower_bound(G: Multigraph, family: GraphFamily, cap: int, limits: SearchLimits = DEFAULT_LIMITS) -> int:
    """A lower bound on OPT, exact for {theta2}; counting stops past ``cap``."""
    if _is_theta2(family):
        return G.cycle_rank()
    total = 0
    for C in G.components():
        H = G.induced(C)
        hit = obstruction(H, family, limits)
        if hit is not None:
            total += _packing(H, family, hit[1].edges_used(), cap - total, limits)
        if total > cap:
            break
    return total


def _solve_component(H: Multigraph, family: GraphFamily, top: int, limits: SearchLimits) -> Optional[FrozenSet[int]]:
    failed: Dict[Tuple, int] = {}
    for j in range(0, top + 1):
        found = _branch(H, family, frozenset(), j, limits, failed)
        if found is not None:
            return found
    return None


def opt_bruteforce(
    G: Multigraph,
    family: GraphFamily,
    max_edges: int = 25,
    max_answer: int = 8,
    limits: SearchLimits = DEFAULT_LIMITS,
) -> int:
    """Exact OPT. Uses the cycle rank when the family is {theta2}."""
    if _is_theta2(family):
        return G.cycle_rank()
    if G.num_edges > max_edges:
        raise ResourceLimitError(f"oracle limited to {max_edges} edges; got {G.num_edges}")
    total = 0
    for C in G.components():
        found = _solve_component(G.induced(C), family, max_answer - total, limits)
        if found is None:
            raise ResourceLimitError(f"OPT exceeds the oracle limit {max_answer}")
        total += len(found)
    return total


def solve_fpt(
    G: Multigraph,
    k: int,
    family: GraphFamily,
    table: Optional[ReplacementTable] = None,
    seed: int = 0,
    immersion_respecting: bool = False,
    limits: SearchLimits = DEFAULT_LIMITS,
    max_k: int = 12,
) -> Tuple[Optional[Solution], KernelResult]:
    """Solution of size <= k on G, or None; kernelizes first and lifts back."""
    if k > max_k:
        raise ResourceLimitError(f"exact search limited to k <= {max_k}")
    kr = kernelize(G, k, family, table, seed, immersion_respecting, limits)
    if kr.no_instance:
        return None, kr
    found = min_deletion_set(kr.graph, family, k, limits)
    if found is None:
        return None, kr
    F = lift_solution(found, kr.trace, G, family, limits)
    ok = is_family_free(G.delete_edges(F), family, limits)
    if not ok or len(F) > k:
        raise AssertionError("lifted exact solution does not verify")
    return Solution(F, ok, len(F), dict(kr.stats)), kr
