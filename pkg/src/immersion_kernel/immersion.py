"""Weak immersions: containment search, F-freeness, boundaried graphs and
phi-rooted pattern search in extended graphs."""
from __future__ import annotations

import hashlib
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .errors import FamilyInvalidError, GraphInputError, PreconditionError, ResourceLimitError
from .flow import UnitFlow, connectivity_table
from .multigraph import Multigraph, canonical_form, disjoint_union


@dataclass(frozen=True)
class SearchLimits:
    max_pattern_edges: int = 16
    max_host_edges: int = 4000
    max_steps: int = 3_000_000


DEFAULT_LIMITS = SearchLimits()


@dataclass
class ImmersionModel:
    vertex_map: Dict[int, int]
    edge_map: Dict[int, List[int]]

    def edges_used(self) -> FrozenSet[int]:
        return frozenset(e for p in self.edge_map.values() for e in p)

    def is_valid(self, H: Multigraph, G: Multigraph, forbidden: Iterable[int] = ()) -> bool:
        forb = frozenset(forbidden)
        vm = self.vertex_map
        if set(vm) != set(H.vertices) or len(set(vm.values())) != len(vm):
            return False
        if set(self.edge_map) != set(H.edge_ids):
            return False
        used: set = set()
        for e, path in self.edge_map.items():
            a, b = H.endpoints(e)
            x = vm[a]
            for f in path:
                if f in used or f in forb or not G.has_edge(f):
                    return False
                used.add(f)
                ends = G.endpoints(f)
                if x not in ends:
                    return False
                x = G.other(f, x)
            if x != vm[b]:
                return False
        return True


class _Search:
    """Backtracking over vertex maps, then edge-disjoint routing."""

    def __init__(
        self,
        H: Multigraph,
        G: Multigraph,
        fixed: Mapping[int, int],
        forbidden: FrozenSet[int],
        limits: SearchLimits,
        lam_G: Optional[Dict[Tuple[int, int], int]] = None,
    ) -> None:
        self.H, self.G, self.fixed, self.forb, self.limits = H, G, dict(fixed), forbidden, limits
        self.steps = 0
        self.deg = {v: sum(1 for e in G.incident(v) if e not in forbidden) for v in G.vertices}
        self.lam_H = connectivity_table(H) if H.num_vertices > 1 else {}
        self._lam_G = lam_G
        # pair -> (flow value found, cap it was computed with)
        self._lam_lazy: Dict[Tuple[int, int], Tuple[int, int]] = {}

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.limits.max_steps:
            raise ResourceLimitError(
                f"immersion search exceeded {self.limits.max_steps} steps "
                f"(|H|={self.H.num_vertices}, ||H||={self.H.num_edges}, ||G||={self.G.num_edges})"
            )

    def lam_at_least(self, x: int, y: int, k: int) -> bool:
        """Is the local edge-connectivity of x, y in G - forbidden >= k?"""
        key = (x, y) if x < y else (y, x)
        if self._lam_G is not None:
            return self._lam_G.get(key, 0) >= k
        val, cap = self._lam_lazy.get(key, (0, 0))
        if val >= k:
            return True
        if val < cap:
            return False
        val = UnitFlow(self.G, [x], [y], self.forb).run(k)
        self._lam_lazy[key] = (val, k)
        return val >= k

    def vertex_order(self) -> List[int]:
        H = self.H
        order: List[int] = [v for v in sorted(self.fixed)]
        rest = set(H.vertices) - set(order)
        while rest:
            # prefer vertices adjacent to the placed ones, then high degree
            def score(v: int) -> Tuple:
                links = sum(1 for e in H.incident(v) if H.other(e, v) in order)
                return (-links, -H.degree(v), v)

            v = min(rest, key=score)
            order.append(v)
            rest.discard(v)
        return order

    def run(self) -> Optional[ImmersionModel]:
        H, G = self.H, self.G
        if H.num_vertices > G.num_vertices:
            return None
        usable = G.num_edges - sum(1 for e in self.forb if G.has_edge(e))
        if H.num_edges > usable:
            return None
        hd = sorted((H.degree(v) for v in H.vertices), reverse=True)
        gd = sorted(self.deg.values(), reverse=True)
        if any(a > b for a, b in zip(hd, gd)):
            return None
        for h, g in self.fixed.items():
            if self.deg[g] < H.degree(h):
                return None
        if len(set(self.fixed.values())) != len(self.fixed):
            return None
        order = self.vertex_order()
        self.order = order
        mapping: Dict[int, int] = {}
        used: set = set()
        return self._place(0, mapping, used)

    def _place(self, i: int, mapping: Dict[int, int], used: set) -> Optional[ImmersionModel]:
        self.tick()
        H = self.H
        if i == len(self.order):
            paths = self._route(mapping)
            if paths is None:
                return None
            return ImmersionModel(dict(mapping), paths)
        h = self.order[i]
        if h in self.fixed:
            cands: Sequence[int] = [self.fixed[h]]
        else:
            need = H.degree(h)
            cands = [g for g in self.G.vertices if self.deg[g] >= need]
        fixed_targets = set(self.fixed.values())
        for g in cands:
            if g in used or (h not in self.fixed and g in fixed_targets):
                continue
            ok = True
            for h2, g2 in mapping.items():
                k = self.lam_H.get((h, h2) if h < h2 else (h2, h), 0)
                if k and not self.lam_at_least(g, g2, k):
                    ok = False
                    break
            if not ok:
                continue
            mapping[h] = g
            used.add(g)
            res = self._place(i + 1, mapping, used)
            if res is not None:
                return res
            del mapping[h]
            used.discard(g)
        return None

    # ---- routing

    def _route(self, mapping: Dict[int, int]) -> Optional[Dict[int, List[int]]]:
        H = self.H
        groups: Dict[Tuple[int, int], List[int]] = {}
        for e, a, b in H.edges():
            x, y = mapping[a], mapping[b]
            key = (x, y) if x < y else (y, x)
            groups.setdefault(key, []).append(e)
        pairs = sorted(groups, key=lambda p: (len(groups[p]), p))
        demands = [(p, len(groups[p])) for p in pairs]
        used: set = set(self.forb)
        found: List[Tuple[Tuple[int, int], List[int]]] = []
        if not self._route_rec(demands, 0, 0, used, found, None):
            return None
        out: Dict[int, List[int]] = {}
        per: Dict[Tuple[int, int], List[List[int]]] = {}
        for p, path in found:
            per.setdefault(p, []).append(path)
        for p, eids in groups.items():
            plist = per[p]
            for e, path in zip(eids, plist):
                a, _ = H.endpoints(e)
                # paths were built from min(x,y); orient from the image of a
                if mapping[a] != p[0]:
                    path = list(reversed(path))
                out[e] = path
        return out

    def _feasible(self, demands: List[Tuple[Tuple[int, int], int]], j: int, left: int, used: set) -> bool:
        load: Dict[int, int] = {}
        for idx in range(j, len(demands)):
            (x, y), d = demands[idx]
            if idx == j:
                d = left
            load[x] = load.get(x, 0) + d
            load[y] = load.get(y, 0) + d
        for v, d in load.items():
            if sum(1 for e in self.G.incident(v) if e not in used) < d:
                return False
        for idx in range(j, len(demands)):
            (x, y), d = demands[idx]
            if idx == j:
                d = left
            if d and UnitFlow(self.G, [x], [y], used).run(d) < d:
                return False
        return True

    def _route_rec(self, demands, j: int, done: int, used: set, found: list, last_key) -> bool:
        self.tick()
        if j == len(demands):
            return True
        (x, y), d = demands[j]
        left = d - done
        if left == 0:
            return self._route_rec(demands, j + 1, 0, used, found, None)
        if not self._feasible(demands, j, left, used):
            return False
        if j == len(demands) - 1:
            fl = UnitFlow(self.G, [x], [y], used)
            fl.run(left)
            for path in fl.paths():
                found.append(((x, y), path))
            return True
        for vseq, path in self._paths(x, y, used):
            key = (len(vseq), tuple(vseq))
            if last_key is not None and key < last_key:
                continue
            used.update(path)
            found.append(((x, y), path))
            if self._route_rec(demands, j, done + 1, used, found, key):
                return True
            found.pop()
            used.difference_update(path)
        return False

    def _paths(self, s: int, t: int, used: set):
        """Simple s-t paths avoiding `used`, shortest first.

        Among parallel edges the smallest free id is taken: any routing can be
        rearranged by swapping parallel edges so that this holds.
        """
        G = self.G
        dist = {t: 0}
        queue = deque([t])
        while queue:
            x = queue.popleft()
            for e in G.incident(x):
                if e in used:
                    continue
                y = G.other(e, x)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if s not in dist:
            return
        n = G.num_vertices
        # only vertices sharing a block with a virtual s-t edge lie on a simple s-t path
        aux = nx.Graph()
        aux.add_edges_from(G.endpoints(e) for e in G.edge_ids if e not in used)
        aux.add_edge(s, t)
        allowed = next(b for b in nx.biconnected_components(aux) if s in b and t in b)

        def step_edges(v: int) -> List[Tuple[int, int]]:
            best: Dict[int, int] = {}
            for e in G.incident(v):
                if e in used:
                    continue
                w = G.other(e, v)
                if w not in best and w in allowed:
                    best[w] = e
            return sorted((w, e) for w, e in best.items())

        for L in range(dist[s], len(allowed)):
            vseq = [s]
            eseq: List[int] = []
            onpath = {s}

            def dfs(v: int, budget: int):
                self.tick()
                if v == t:
                    if budget == 0:
                        yield list(vseq), list(eseq)
                    return
                for w, e in step_edges(v):
                    if w in onpath or dist.get(w, n + 1) > budget - 1:
                        continue
                    if w == t and budget - 1 != 0:
                        continue
                    vseq.append(w)
                    eseq.append(e)
                    onpath.add(w)
                    yield from dfs(w, budget - 1)
                    onpath.discard(w)
                    vseq.pop()
                    eseq.pop()

            yield from dfs(s, L)


def _check_sizes(H: Multigraph, G: Multigraph, limits: SearchLimits) -> None:
    if H.num_edges > limits.max_pattern_edges or G.num_edges > limits.max_host_edges:
        raise ResourceLimitError(
            f"immersion search limited to ||H|| <= {limits.max_pattern_edges} and "
            f"||G|| <= {limits.max_host_edges}; got ||H||={H.num_edges}, ||G||={G.num_edges}"
        )


def find_immersion(
    H: Multigraph,
    G: Multigraph,
    fixed: Optional[Mapping[int, int]] = None,
    forbidden: Iterable[int] = (),
    limits: SearchLimits = DEFAULT_LIMITS,
    _lam: Optional[Dict[Tuple[int, int], int]] = None,
) -> Optional[ImmersionModel]:
    """Return an immersion model of H in G - forbidden, or None.

    ``fixed`` pins some vertices of H to given vertices of G. The search is
    complete: None means no model exists.
    """
    _check_sizes(H, G, limits)
    fixed = dict(fixed or {})
    for h, g in fixed.items():
        if not H.has_vertex(h) or not G.has_vertex(g):
            raise GraphInputError(f"fixed pair {h}->{g} names an unknown vertex")
    return _Search(H, G, fixed, frozenset(forbidden), limits, _lam).run()


# ---- families


@dataclass
class GraphFamily:
    name: str
    members: List[Multigraph]
    bF: int
    cF: int
    # ratio constants, empirical defaults for built-ins
    c_struct: float = 0.0
    c_apx: float = 0.0
    c_ker: float = 0.0
    table_budget: int = 3
    # per-arity overrides of table_budget, and the largest arity whose
    # signatures are attempted at all
    table_budgets: Dict[int, int] = field(default_factory=dict)
    signature_r_max: int = 8

    def budget_for(self, r: int) -> int:
        return self.table_budgets.get(r, self.table_budget)

    @property
    def max_edges(self) -> int:
        return max(H.num_edges for H in self.members)

    @property
    def dF(self) -> int:
        return max(2 * self.bF * self.cF + 2 * self.bF, 3 * self.max_edges) + 1

    def digest(self) -> str:
        forms = sorted(repr(graph_canonical(H)) for H in self.members)
        blob = json.dumps({"members": forms}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def graph_canonical(G: Multigraph, colors: Optional[Mapping[int, Tuple]] = None) -> Tuple:
    return canonical_form(G.vertices, [(a, b) for _, a, b in G.edges()], colors)


def is_family_free(G: Multigraph, family: GraphFamily, limits: SearchLimits = DEFAULT_LIMITS) -> bool:
    if G.num_edges == 0:
        return True
    for H in family.members:
        _check_sizes(H, G, limits)
        if H.num_edges > G.num_edges or H.num_vertices > G.num_vertices:
            continue
        if _Search(H, G, {}, frozenset(), limits).run() is not None:
            return False
    return True


def obstruction(G: Multigraph, family: GraphFamily, limits: SearchLimits = DEFAULT_LIMITS):
    """First (member index, model) found in G, or None."""
    for i, H in enumerate(family.members):
        m = find_immersion(H, G, limits=limits)
        if m is not None:
            return i, m
    return None


@dataclass
class FamilyReport:
    valid: bool
    problems: List[str] = field(default_factory=list)
    max_edges: int = 0
    dF: int = 0
    planar_subcubic_member: Optional[int] = None


def _simple(G: Multigraph) -> Multigraph:
    seen = set()
    es = []
    for e, a, b in G.edges():
        if (a, b) not in seen:
            seen.add((a, b))
            es.append((e, a, b))
    return Multigraph(G.vertices, es)


def _has_topological_minor(H: Multigraph, G: Multigraph) -> bool:
    """Subdivision search with internally vertex-disjoint paths.

    H and G simple and tiny; used only for Kuratowski checks on members.
    """
    hv = list(H.vertices)
    hedges = [(a, b) for _, a, b in H.edges()]
    adj = {v: G.neighbors(v) for v in G.vertices}

    def route(k: int, busy: set, emap: Dict[int, int]) -> bool:
        if k == len(hedges):
            return True
        s, t = emap[hedges[k][0]], emap[hedges[k][1]]

        def dfs(v: int, path: List[int]) -> bool:
            for w in adj[v]:
                if w == t:
                    inner = path[1:]
                    busy.update(inner)
                    if route(k + 1, busy, emap):
                        return True
                    busy.difference_update(inner)
                elif w not in busy and w not in path:
                    path.append(w)
                    if dfs(w, path):
                        return True
                    path.pop()
            return False

        return dfs(s, [s])

    for img in itertools.permutations(G.vertices, len(hv)):
        emap = dict(zip(hv, img))
        if any(G.degree(emap[h]) < H.degree(h) for h in hv):
            continue
        if route(0, set(img), emap):
            return True
    return False


def is_planar_small(G: Multigraph) -> bool:
    """Kuratowski check by brute force; only for family members."""
    S = _simple(G)
    k5 = Multigraph.from_pairs(5, list(itertools.combinations(range(5), 2)))
    k33 = Multigraph.from_pairs(6, [(i, j) for i in range(3) for j in range(3, 6)])
    if S.num_vertices >= 5 and sum(1 for v in S.vertices if S.degree(v) >= 4) >= 5:
        if _has_topological_minor(k5, S):
            return False
    if S.num_vertices >= 6 and sum(1 for v in S.vertices if S.degree(v) >= 3) >= 6:
        if _has_topological_minor(k33, S):
            return False
    return True


def validate_family(family: GraphFamily) -> FamilyReport:
    problems = []
    if not family.members:
        problems.append("family has no members")
    ps = None
    for i, H in enumerate(family.members):
        if H.num_edges == 0:
            problems.append(f"member {i} has no edges")
        elif not H.is_connected():
            problems.append(f"member {i} is disconnected")
    if not problems:
        for i, H in enumerate(family.members):
            if H.max_degree() <= 3 and is_planar_small(H):
                ps = i
                break
        if ps is None:
            problems.append("no member is planar and subcubic")
    if family.bF < 1:
        problems.append("bF must be positive")
    if family.cF < 0:
        problems.append("cF must be non-negative")
    rep = FamilyReport(not problems, problems, planar_subcubic_member=ps)
    if family.members and not any("no edges" in p for p in problems):
        rep.max_edges = family.max_edges
        rep.dF = family.dF
    return rep


def require_valid(family: GraphFamily) -> GraphFamily:
    rep = validate_family(family)
    if not rep.valid:
        raise FamilyInvalidError("; ".join(rep.problems))
    return family


# ---- boundaried graphs


@dataclass(frozen=True)
class BoundariedGraph:
    graph: Multigraph
    boundary: Tuple[int, ...]

    def __post_init__(self) -> None:
        for v in self.boundary:
            if not self.graph.has_vertex(v):
                raise GraphInputError(f"boundary vertex {v} not in graph")

    @property
    def r(self) -> int:
        return len(self.boundary)

    def canonical(self) -> Tuple:
        cols: Dict[int, Tuple] = {v: () for v in self.graph.vertices}
        for i, v in enumerate(self.boundary):
            cols[v] = cols[v] + (i,)
        return (self.r, graph_canonical(self.graph, cols))

    def normalized(self) -> "BoundariedGraph":
        """Relabel vertices 0..n-1 and edges 0..m-1 in sorted order."""
        vm = {v: i for i, v in enumerate(self.graph.vertices)}
        es = [(i, vm[a], vm[b]) for i, (_, a, b) in enumerate(self.graph.edges())]
        return BoundariedGraph(Multigraph(range(len(vm)), es), tuple(vm[v] for v in self.boundary))


@dataclass(frozen=True)
class ExtendedGraph:
    base: BoundariedGraph
    graph: Multigraph
    copies: Tuple[int, ...]
    pendant: Tuple[int, ...]


def extended_graph(B: BoundariedGraph) -> ExtendedGraph:
    G = B.graph
    v0 = G.next_vertex_id()
    copies = tuple(range(v0, v0 + B.r))
    G2 = G.add_vertices(copies)
    G3, eids = G2.add_edges([(u, c) for u, c in zip(B.boundary, copies)])
    return ExtendedGraph(B, G3, copies, tuple(eids))


@dataclass(frozen=True)
class GlueRecord:
    b_vertices: Dict[int, int]
    b_edges: Dict[int, int]
    connectors: Tuple[int, ...]


def glue(A: BoundariedGraph, B: BoundariedGraph) -> Tuple[Multigraph, GlueRecord]:
    """A (+) B: disjoint union plus an edge between the i-th boundary vertices."""
    if A.r != B.r:
        raise PreconditionError(f"cannot glue r={A.r} with r={B.r}")
    U, vmap, emap = disjoint_union(A.graph, B.graph)
    U2, ids = U.add_edges([(a, vmap[b]) for a, b in zip(A.boundary, B.boundary)])
    return U2, GlueRecord(vmap, emap, tuple(ids))


# ---- relevant pairs


@dataclass(frozen=True)
class RelevantPair:
    pattern: Multigraph
    phi: Tuple[Tuple[int, int], ...]  # sorted (vertex, boundary index 1..r)

    def key(self) -> Tuple:
        cols: Dict[int, Tuple] = {v: (0,) for v in self.pattern.vertices}
        for v, i in self.phi:
            cols[v] = (1, i)
        return graph_canonical(self.pattern, cols)


def find_rooted_immersion(
    p: RelevantPair,
    X: ExtendedGraph,
    forbidden: Iterable[int] = (),
    limits: SearchLimits = DEFAULT_LIMITS,
    _lam: Optional[Dict[Tuple[int, int], int]] = None,
) -> Optional[ImmersionModel]:
    """Model of p.pattern in X - forbidden sending each rooted vertex v to the
    copy of boundary vertex phi(v).

    ``_lam`` may hold connectivities of any supergraph of X - forbidden; they
    only prune.
    """
    fixed = {}
    for v, i in p.phi:
        if not 1 <= i <= len(X.copies):
            return None
        fixed[v] = X.copies[i - 1]
    return find_immersion(p.pattern, X.graph, fixed, forbidden, limits, _lam)


def _connected_multigraphs(max_edges: int) -> Dict[int, List[Multigraph]]:
    """Connected loop-free multigraphs with 1..max_edges edges up to isomorphism."""
    levels: Dict[int, List[Multigraph]] = {0: [Multigraph([0])]}
    for m in range(1, max_edges + 1):
        seen = {}
        for G in levels[m - 1]:
            n = G.num_vertices
            cands = [(a, b) for a in range(n) for b in range(a + 1, n)]
            cands += [(a, n) for a in range(n)]
            for a, b in cands:
                H = Multigraph(range(max(n, b + 1)), list(G.edges()) + [(G.next_edge_id, a, b)])
                k = graph_canonical(H)
                if k not in seen:
                    seen[k] = Multigraph.from_pairs(
                        H.num_vertices, [(x, y) for _, x, y in H.edges()]
                    )
        levels[m] = [seen[k] for k in sorted(seen)]
    del levels[0]
    return levels


def enumerate_relevant_pairs(r: int, family: GraphFamily, max_pairs: int = 200_000) -> List[RelevantPair]:
    """All pairs (Q, phi) with ||Q|| <= (r+1)*MAX, no isolated vertex and
    non-empty partial phi into [r], up to phi-respecting isomorphism."""
    if r < 1:
        return []
    M = (r + 1) * family.max_edges
    if M > 6 or (M > 4 and r > 2):
        raise ResourceLimitError(f"full relevant-pair enumeration limited to (r+1)*MAX <= 6; got {M}")
    comps = _connected_multigraphs(M)
    colored: Dict[int, List[Tuple[Tuple, Multigraph, Tuple]]] = {}
    for m, graphs in comps.items():
        seen = {}
        for G in graphs:
            vs = G.vertices
            for labels in itertools.product(range(r + 1), repeat=len(vs)):
                cols = {v: ((0,) if l == 0 else (1, l)) for v, l in zip(vs, labels)}
                k = graph_canonical(G, cols)
                if k not in seen:
                    seen[k] = (G, tuple((v, l) for v, l in zip(vs, labels) if l))
                if len(seen) > max_pairs:
                    raise ResourceLimitError(f"more than {max_pairs} coloured components")
        colored[m] = [(k,) + seen[k] for k in sorted(seen)]
    items = [(m, c) for m in sorted(colored) for c in colored[m]]
    out: List[RelevantPair] = []

    def rec(start: int, budget: int, chosen: List[Tuple]) -> None:
        if chosen and any(c[1][2] for c in chosen):
            out.append(_union_pair([c[1] for c in chosen]))
            if len(out) > max_pairs:
                raise ResourceLimitError(f"more than {max_pairs} relevant pairs")
        for i in range(start, len(items)):
            m, c = items[i]
            if m <= budget:
                chosen.append(items[i])
                rec(i, budget - m, chosen)
                chosen.pop()

    rec(0, M, [])
    return out


def _union_pair(parts: List[Tuple]) -> RelevantPair:
    es: List[Tuple[int, int]] = []
    phi = []
    off = 0
    for _, G, ph in parts:
        es += [(a + off, b + off) for _, a, b in G.edges()]
        phi += [(v + off, l) for v, l in ph]
        off += G.num_vertices
    return RelevantPair(Multigraph.from_pairs(off, es), tuple(sorted(phi)))


def effective_pairs(r: int, family: GraphFamily, max_pairs: int = 20_000) -> List[RelevantPair]:
    """Relevant pairs that can arise as the trace of a member's model inside
    one side of a gluing.

    Such a trace keeps a set Y of member vertices at full degree, some member
    edges among Y, and replaces every other edge piece by an edge to a
    distinct boundary copy (roots have degree 1, phi is injective). Pieces
    that cross the side without touching Y become root-root edges.
    """
    found: Dict[Tuple, RelevantPair] = {}
    for H in family.members:
        hv = list(H.vertices)
        for ysize in range(len(hv) + 1):
            for Y in itertools.combinations(hv, ysize):
                ypairs = [(a, b) for a, b in itertools.combinations(Y, 2) if H.multiplicity(a, b)]
                ranges = [range(H.multiplicity(a, b) + 1) for a, b in ypairs]
                for mults in itertools.product(*ranges):
                    res = {y: H.degree(y) for y in Y}
                    for (a, b), m in zip(ypairs, mults):
                        res[a] -= m
                        res[b] -= m
                    p0 = sum(res.values())
                    # root-root pieces must come from a member edge not kept inside Y
                    spare = H.num_edges - sum(mults)
                    q = 0
                    while p0 + 2 * q <= r and (q == 0 or spare > 0):
                        p = p0 + 2 * q
                        if p >= 1:
                            _add_pattern(found, Y, ypairs, mults, res, q, r, max_pairs)
                        q += 1
    return [found[k] for k in sorted(found)]


def _add_pattern(found, Y, ypairs, mults, res, q, r, max_pairs) -> None:
    yi = {y: i for i, y in enumerate(Y)}
    es: List[Tuple[int, int]] = []
    for (a, b), m in zip(ypairs, mults):
        es += [(yi[a], yi[b])] * m
    n = len(Y)
    roots: List[int] = []
    for y in Y:
        for _ in range(res[y]):
            es.append((yi[y], n))
            roots.append(n)
            n += 1
    for _ in range(q):
        es.append((n, n + 1))
        roots += [n, n + 1]
        n += 2
    Q = Multigraph.from_pairs(n, es)
    for labels in itertools.permutations(range(1, r + 1), len(roots)):
        pair = RelevantPair(Q, tuple(sorted(zip(roots, labels))))
        k = pair.key()
        if k not in found:
            found[k] = pair
            if len(found) > max_pairs:
                raise ResourceLimitError(f"more than {max_pairs} effective relevant pairs for r={r}")
