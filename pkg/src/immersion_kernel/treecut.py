"""Tree-cut decompositions.

A decomposition is a rooted forest (``parent`` map, roots map to None) plus a
bag per node. Bags near-partition V(G) and every tree covers exactly one
connected component of G.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import ConfigurationError, PreconditionError, ResourceLimitError
from .multigraph import Multigraph


@dataclass(frozen=True)
class TreeCutDecomposition:
    graph: Multigraph
    parent: Mapping[int, Optional[int]]
    bags: Mapping[int, FrozenSet[int]]

    # ---- tree structure

    @cached_property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.parent))

    @cached_property
    def roots(self) -> Tuple[int, ...]:
        return tuple(t for t in self.nodes if self.parent[t] is None)

    @cached_property
    def _children(self) -> Dict[int, Tuple[int, ...]]:
        ch: Dict[int, List[int]] = {t: [] for t in self.nodes}
        for t in self.nodes:
            p = self.parent[t]
            if p is not None:
                ch[p].append(t)
        return {t: tuple(sorted(c)) for t, c in ch.items()}

    def children(self, t: int) -> Tuple[int, ...]:
        return self._children[t]

    def tree_neighbors(self, t: int) -> Tuple[int, ...]:
        p = self.parent[t]
        return tuple(sorted(self._children[t] + ((p,) if p is not None else ())))

    def tree_edges(self) -> List[Tuple[int, int]]:
        return [(t, self.parent[t]) for t in self.nodes if self.parent[t] is not None]

    @cached_property
    def _depth(self) -> Dict[int, int]:
        d: Dict[int, int] = {}
        for r in self.roots:
            d[r] = 0
            queue = deque([r])
            while queue:
                x = queue.popleft()
                for c in self._children[x]:
                    d[c] = d[x] + 1
                    queue.append(c)
        return d

    def depth(self, t: int) -> int:
        return self._depth[t]

    def root_of(self, t: int) -> int:
        while self.parent[t] is not None:
            t = self.parent[t]
        return t

    def subtree(self, t: int) -> List[int]:
        out = [t]
        i = 0
        while i < len(out):
            out.extend(self._children[out[i]])
            i += 1
        return out

    @cached_property
    def _below(self) -> Dict[int, FrozenSet[int]]:
        res: Dict[int, FrozenSet[int]] = {}
        order = sorted(self.nodes, key=lambda t: -self._depth.get(t, 0))
        for t in order:
            acc = set(self.bags[t])
            for c in self._children[t]:
                acc |= res[c]
            res[t] = frozenset(acc)
        return res

    def below(self, t: int) -> FrozenSet[int]:
        """Union of bags in the subtree rooted at t."""
        return self._below[t]

    def tree_vertices(self, t: int) -> FrozenSet[int]:
        return self._below[self.root_of(t)]

    def side(self, t: int, s: int) -> FrozenSet[int]:
        """Vertices of the component of T - t that contains the neighbour s."""
        if self.parent.get(s) == t:
            return self._below[s]
        if self.parent[t] == s:
            return self.tree_vertices(t) - self._below[t]
        raise PreconditionError(f"{s} is not a tree neighbour of {t}")

    # ---- adhesions

    @cached_property
    def _adh(self) -> Dict[int, FrozenSet[int]]:
        return {t: self.graph.boundary(self._below[t]) for t in self.nodes if self.parent[t] is not None}

    def adhesion(self, t: int, s: Optional[int] = None) -> FrozenSet[int]:
        """Adhesion of the tree edge between t and s (default: t's parent)."""
        if s is None or self.parent[t] == s:
            return self._adh[t]
        if self.parent.get(s) == t:
            return self._adh[s]
        raise PreconditionError(f"{t} and {s} are not adjacent")

    def adhesion_sizes(self) -> List[int]:
        return [len(a) for _, a in sorted(self._adh.items())]

    # ---- torsos

    def torso(self, t: int) -> Tuple[List[int], List[Tuple[int, int]], Dict[int, int]]:
        """Torso at t: (vertices, edges, peripheral vertex -> tree neighbour).

        Peripheral vertices get negative ids -(s+1).
        """
        G = self.graph
        where: Dict[int, int] = {v: v for v in self.bags[t]}
        periph: Dict[int, int] = {}
        for s in self.tree_neighbors(t):
            z = -(s + 1)
            periph[z] = s
            for v in self.side(t, s):
                where[v] = z
        es = []
        for _, a, b in G.edges():
            if a in where and b in where:
                x, y = where[a], where[b]
                if x != y:
                    es.append((x, y))
        verts = sorted(self.bags[t]) + sorted(periph)
        return verts, es, periph

    def three_center(self, t: int) -> Tuple[int, List[int]]:
        """Size of the 3-center at t and the suppression order used."""
        verts, es, periph = self.torso(t)
        remaining, order = suppress_peripherals(verts, es, periph)
        return len(remaining), order

    def w(self, t: int) -> int:
        return len(self.bags[t]) + sum(1 for s in self.tree_neighbors(t) if len(self.adhesion(t, s)) >= 3)

    def z(self, t: int) -> int:
        return len(self.bags[t]) + sum(
            len(self.adhesion(t, s)) for s in self.tree_neighbors(t) if len(self.adhesion(t, s)) >= 3
        )

    # ---- serialization helpers

    def to_dict(self) -> Dict:
        return {
            "nodes": [
                {"id": t, "parent": self.parent[t], "bag": sorted(self.bags[t])} for t in self.nodes
            ]
        }


def suppress_peripherals(
    verts: Sequence[int], edges: Sequence[Tuple[int, int]], periph: Mapping[int, int]
) -> Tuple[Set[int], List[int]]:
    """Suppress peripheral vertices of degree <= 2 until none is left.

    Degree 0/1: delete. Degree 2: replace by an edge between its neighbours,
    dropping it if it would be a loop. The smallest eligible id goes first.
    """
    es = [list(e) for e in edges]
    alive = [True] * len(es)
    inc: Dict[int, List[int]] = {v: [] for v in verts}
    for i, (a, b) in enumerate(es):
        inc[a].append(i)
        inc[b].append(i)
    remaining = set(verts)
    order: List[int] = []

    def deg(v: int) -> int:
        return sum(1 for i in inc[v] if alive[i])

    while True:
        elig = [z for z in periph if z in remaining and deg(z) <= 2]
        if not elig:
            break
        zz = max(elig)  # peripheral ids are -(node+1): max id = smallest node
        live = [i for i in inc[zz] if alive[i]]
        for i in live:
            alive[i] = False
        if len(live) == 2:
            ends = [es[i][0] if es[i][1] == zz else es[i][1] for i in live]
            if ends[0] != ends[1]:
                es.append([ends[0], ends[1]])
                alive.append(True)
                inc[ends[0]].append(len(es) - 1)
                inc[ends[1]].append(len(es) - 1)
        remaining.discard(zz)
        order.append(zz)
    return remaining, order


# ---- validation and widths


@dataclass
class DecompositionReport:
    valid: bool
    problems: List[str] = field(default_factory=list)


def verify(D: TreeCutDecomposition) -> DecompositionReport:
    G = D.graph
    problems = []
    seen: Dict[int, int] = {}
    for t in D.nodes:
        for v in D.bags[t]:
            if not G.has_vertex(v):
                problems.append(f"node {t} holds unknown vertex {v}")
            elif v in seen:
                problems.append(f"vertex {v} in bags {seen[v]} and {t}")
            else:
                seen[v] = t
        p = D.parent[t]
        if p is not None and p not in D.parent:
            problems.append(f"node {t} has unknown parent {p}")
    for v in G.vertices:
        if v not in seen:
            problems.append(f"vertex {v} is in no bag")
    # acyclicity
    for t in D.nodes:
        x, steps = t, 0
        while x is not None and steps <= len(D.nodes):
            x = D.parent.get(x)
            steps += 1
        if x is not None:
            problems.append(f"parent pointers from {t} cycle")
            break
    if not problems:
        comp_of = {}
        for i, C in enumerate(G.components()):
            for v in C:
                comp_of[v] = i
        covered = set()
        for r in D.roots:
            vs = D.below(r)
            cs = {comp_of[v] for v in vs}
            if len(cs) > 1:
                problems.append(f"tree rooted at {r} spans graph components {sorted(cs)}")
            elif len(cs) == 1:
                c = cs.pop()
                if c in covered:
                    problems.append(f"graph component {c} split over several trees")
                covered.add(c)
            else:
                problems.append(f"tree rooted at {r} has only empty bags")
    return DecompositionReport(not problems, problems)


def _require_valid(D: TreeCutDecomposition) -> None:
    rep = verify(D)
    if not rep.valid:
        raise PreconditionError("invalid decomposition: " + "; ".join(rep.problems))


def width(D: TreeCutDecomposition) -> int:
    _require_valid(D)
    vals = D.adhesion_sizes() + [D.three_center(t)[0] for t in D.nodes]
    return max(vals, default=0)


def width_prime(D: TreeCutDecomposition) -> int:
    _require_valid(D)
    return max(D.adhesion_sizes() + [D.w(t) for t in D.nodes], default=0)


def width_doubleprime(D: TreeCutDecomposition) -> int:
    _require_valid(D)
    return max((D.z(t) for t in D.nodes), default=0)


# ---- surgery helpers


def _reroot(
    G: Multigraph,
    edges: Iterable[Tuple[int, int]],
    bags: Mapping[int, FrozenSet[int]],
    prefer: Optional[Mapping[int, int]] = None,
) -> TreeCutDecomposition:
    """Build a decomposition from an undirected tree edge set.

    Each tree is rooted at ``prefer``'s choice if present, else at the node
    holding the smallest vertex of the tree (ties: smallest node id).
    """
    adj: Dict[int, List[int]] = {t: [] for t in bags}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent: Dict[int, Optional[int]] = {}
    for start in sorted(bags):
        if start in parent:
            continue
        comp = [start]
        seen = {start}
        i = 0
        while i < len(comp):
            for y in adj[comp[i]]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
            i += 1
        root = None
        if prefer:
            cand = [t for t in comp if t in prefer]
            if cand:
                root = min(cand)
        if root is None:
            root = min(comp, key=lambda t: (min(bags[t]) if bags[t] else float("inf"), t))
        parent[root] = None
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in sorted(adj[x]):
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
    return TreeCutDecomposition(G, parent, dict(bags))


def _undirected(D: TreeCutDecomposition) -> Set[Tuple[int, int]]:
    return {(min(a, b), max(a, b)) for a, b in D.tree_edges()}


def adhesion_sum(D: TreeCutDecomposition, power: int = 1) -> int:
    return sum(s ** power for s in D.adhesion_sizes())


# ---- width equalization


def improve_to_width_prime(D: TreeCutDecomposition) -> TreeCutDecomposition:
    """Rewire subtrees until every node has 3-center size equal to w(t).

    Each step moves the subtrees of one suppressed peripheral path C (whose
    only torso neighbour outside C is z_p) from t to t_p, which strictly
    shrinks adh(t t_p) and keeps every other adhesion.
    """
    _require_valid(D)
    roots = {r: r for r in D.roots}
    while True:
        step = _width_prime_step(D)
        if step is None:
            return D
        before = adhesion_sum(D)
        D = _reroot(D.graph, step, D.bags, roots)
        if adhesion_sum(D) >= before:
            raise RuntimeError("width-equalization step did not shrink the adhesion sum")


def _width_prime_step(D: TreeCutDecomposition) -> Optional[Set[Tuple[int, int]]]:
    for t in D.nodes:
        verts, es, periph = D.torso(t)
        remaining, order = suppress_peripherals(verts, es, periph)
        if len(remaining) >= D.w(t):
            continue
        deg: Dict[int, int] = {v: 0 for v in verts}
        nb: Dict[int, Set[int]] = {v: set() for v in verts}
        for a, b in es:
            deg[a] += 1
            deg[b] += 1
            nb[a].add(b)
            nb[b].add(a)
        p_idx = next(i for i, zz in enumerate(order) if deg[zz] >= 3)
        zp = order[p_idx]
        prefix = set(order[:p_idx])
        comps = []
        seen: Set[int] = set()
        for s in sorted(prefix, reverse=True):
            if s in seen:
                continue
            comp = {s}
            queue = [s]
            while queue:
                x = queue.pop()
                for y in nb[x]:
                    if y in prefix and y not in comp:
                        comp.add(y)
                        queue.append(y)
            seen |= comp
            comps.append(comp)
        good = []
        for comp in comps:
            outside = set().union(*(nb[x] for x in comp)) - comp
            if zp in outside and outside <= {zp}:
                good.append(tuple(sorted(periph[x] for x in comp)))
        if not good:
            raise RuntimeError(f"no reattachable component at node {t}")
        moved = min(good)
        tp = periph[zp]
        edges = _undirected(D)
        for q in moved:
            edges.discard((min(t, q), max(t, q)))
            edges.add((min(tp, q), max(tp, q)))
        return edges
    return None


# ---- connectification


def _prune_empty(D: TreeCutDecomposition) -> TreeCutDecomposition:
    edges = _undirected(D)
    bags = dict(D.bags)
    changed = True
    while changed:
        changed = False
        deg: Dict[int, int] = {t: 0 for t in bags}
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        for t in sorted(bags):
            if not bags[t] and deg[t] <= 1:
                edges = {e for e in edges if t not in e}
                del bags[t]
                changed = True
                break
    return _reroot(D.graph, edges, bags)


def is_connected_decomposition(D: TreeCutDecomposition) -> bool:
    return _disconnected_side(D) is None


def _disconnected_side(D: TreeCutDecomposition) -> Optional[Tuple[int, int]]:
    """First tree edge (u, v) whose u-side induces a disconnected graph."""
    G = D.graph
    for a, b in sorted(_undirected(D)):
        for u, v in ((a, b), (b, a)):
            side = D.side(v, u)
            if side and len(G.induced(side).components()) > 1:
                return u, v
    return None


def make_connected(D: TreeCutDecomposition) -> TreeCutDecomposition:
    """Split every subtree whose side is disconnected into one copy per component."""
    _require_valid(D)
    D = _prune_empty(D)
    G = D.graph
    while True:
        hit = _disconnected_side(D)
        if hit is None:
            return D
        u, v = hit
        before = adhesion_sum(D, 2)
        side = D.side(v, u)
        comps = sorted(G.induced(side).components(), key=min)
        # nodes of T_uv: component of T - uv containing u
        edges = _undirected(D)
        sub = {u}
        queue = [u]
        while queue:
            x = queue.pop()
            for y in D.tree_neighbors(x):
                if y != v and y not in sub and not (x == u and y == v):
                    sub.add(y)
                    queue.append(y)
        sub_edges = [e for e in edges if e[0] in sub and e[1] in sub]
        edges = {e for e in edges if e[0] not in sub and e[1] not in sub}
        bags = {t: b for t, b in D.bags.items() if t not in sub}
        nxt = max(D.nodes) + 1
        for comp in comps:
            ren = {}
            for t in sorted(sub):
                ren[t] = nxt
                bags[nxt] = frozenset(D.bags[t] & comp)
                nxt += 1
            for a, b in sub_edges:
                edges.add((ren[a], ren[b]))
            edges.add((min(ren[u], v), max(ren[u], v)))
        D = _prune_empty(_reroot(G, edges, bags))
        if adhesion_sum(D, 2) >= before:
            raise RuntimeError("connectification step did not shrink the squared adhesion sum")


# ---- neatness


def bad_nodes(D: TreeCutDecomposition) -> List[int]:
    G = D.graph
    out = []
    for t in D.nodes:
        p = D.parent[t]
        if p is None or len(D.adhesion(t)) > 2:
            continue
        mine = D.below(t)
        for s in D.children(p):
            if s != t and G.edges_between(mine, D.below(s)):
                out.append(t)
                break
    return out


def is_neat(D: TreeCutDecomposition) -> bool:
    return is_connected_decomposition(D) and not bad_nodes(D)


def top_down_rerouting(D: TreeCutDecomposition) -> Tuple[TreeCutDecomposition, int]:
    """Neaten a connected decomposition; returns it with the number of reroutings."""
    _require_valid(D)
    if not is_connected_decomposition(D):
        raise PreconditionError("make_neat needs a connected decomposition")
    G = D.graph
    D = _reroot(G, _undirected(D), D.bags)
    limit = len(D.nodes) ** 2
    steps = 0
    while True:
        bad = bad_nodes(D)
        if not bad:
            return D, steps
        t = min(bad, key=lambda x: (D.depth(x), x))
        p = D.parent[t]
        mine = D.below(t)
        cands = []
        for s in D.children(p):
            if s == t:
                continue
            for b in D.subtree(s):
                if G.edges_between(D.bags[b], mine):
                    cands.append(b)
        b = max(cands, key=lambda x: (D.depth(x), -x))
        parent = dict(D.parent)
        parent[t] = b
        D = TreeCutDecomposition(G, parent, D.bags)
        steps += 1
        if steps > limit:
            raise RuntimeError(f"rerouting exceeded |T|^2 = {limit} steps")


def make_neat(D: TreeCutDecomposition) -> TreeCutDecomposition:
    return top_down_rerouting(D)[0]


def neat_adhesion_classification(D: TreeCutDecomposition, p: int) -> Dict[int, bool]:
    """For each tree neighbour s of p: is the component of T - p through s
    attached by a neat adhesion (thin, every edge touching X_p)?"""
    if not is_neat(D):
        raise PreconditionError("decomposition is not neat")
    out = {}
    Xp = D.bags[p]
    for s in D.tree_neighbors(p):
        adh = D.adhesion(p, s)
        ok = len(adh) <= 2 and all(set(D.graph.endpoints(e)) & Xp for e in adh)
        out[s] = ok
    return out


# ---- least common ancestors


def lca(D: TreeCutDecomposition, a: int, b: int) -> Optional[int]:
    anc = set()
    x: Optional[int] = a
    while x is not None:
        anc.add(x)
        x = D.parent[x]
    x = b
    while x is not None:
        if x in anc:
            return x
        x = D.parent[x]
    return None


def lca_closure(D: TreeCutDecomposition, M: Iterable[int]) -> FrozenSet[int]:
    out = set(M)
    for t in out:
        if t not in D.parent:
            raise PreconditionError(f"unknown node {t}")
    changed = True
    while changed:
        changed = False
        cur = sorted(out)
        for a, b in itertools.combinations(cur, 2):
            c = lca(D, a, b)
            if c is not None and c not in out:
                out.add(c)
                changed = True
    return frozenset(out)


# ---- constructions


def single_node(G: Multigraph) -> TreeCutDecomposition:
    """One node per component, holding the whole component."""
    parent = {}
    bags = {}
    for i, C in enumerate(G.components()):
        parent[i] = None
        bags[i] = frozenset(C)
    return TreeCutDecomposition(G, parent, bags)


def dfs_decomposition(G: Multigraph) -> TreeCutDecomposition:
    """Singleton bags arranged along a DFS forest.

    Undirected DFS has no cross edges, so the result is connected and has no
    edges between sibling subtrees.
    """
    parent: Dict[int, Optional[int]] = {}
    for s in G.vertices:
        if s in parent:
            continue
        parent[s] = None
        stack = [(s, iter(G.neighbors(s)))]
        while stack:
            x, it = stack[-1]
            nxt = next((y for y in it if y not in parent), None)
            if nxt is None:
                stack.pop()
            else:
                parent[nxt] = x
                stack.append((nxt, iter(G.neighbors(nxt))))
    return TreeCutDecomposition(G, parent, {v: frozenset([v]) for v in G.vertices})


def bisection_decomposition(G: Multigraph) -> TreeCutDecomposition:
    """Recursive minimum edge-cut splitting; leaves hold single vertices."""
    from .flow import UnitFlow

    parent: Dict[int, Optional[int]] = {}
    bags: Dict[int, FrozenSet[int]] = {}
    counter = [0]

    def new_node(p: Optional[int], bag: Iterable[int]) -> int:
        t = counter[0]
        counter[0] += 1
        parent[t] = p
        bags[t] = frozenset(bag)
        return t

    def build(W: FrozenSet[int], p: Optional[int]) -> None:
        if len(W) == 1:
            new_node(p, W)
            return
        H = G.induced(W)
        vs = sorted(W)
        best = None
        for y in vs[1:]:
            f = UnitFlow(H, [vs[0]], [y])
            val = f.run()
            side = frozenset(W - f.source_side())
            key = (val, abs(len(W) - 2 * len(side)), sorted(side))
            if best is None or key < best[0]:
                best = (key, side)
        A = best[1]
        t = new_node(p, ())
        for part in sorted((A, W - A), key=min):
            build(frozenset(part), t)

    for C in G.components():
        build(frozenset(C), None)
    return TreeCutDecomposition(G, parent, bags)


# ---- exact tree-cut width


MAX_EXACT_VERTICES = 8


def _subsets_of(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def exact_tctw(G: Multigraph, measure: str = "width_prime") -> Tuple[int, TreeCutDecomposition]:
    """Minimum width over all tree-cut decompositions, with a witness.

    Dynamic programming over the vertex set Y of a subtree: the best rooted
    sub-decomposition of Y depends only on Y (the parent side is V - Y). With
    ``measure="width"`` the node cost is the 3-center size (|G| <= 6),
    otherwise w(t); both give tctw.
    """
    if G.num_vertices > MAX_EXACT_VERTICES or (measure == "width" and G.num_vertices > 6):
        raise ResourceLimitError(
            f"exact tree-cut width limited to |G| <= {MAX_EXACT_VERTICES} (6 for measure=width); "
            f"got |G|={G.num_vertices}"
        )
    best_total = 0
    parent: Dict[int, Optional[int]] = {}
    bags: Dict[int, FrozenSet[int]] = {}
    for C in G.components():
        val, sub_parent, sub_bags = _exact_component(G, sorted(C), measure, len(parent))
        best_total = max(best_total, val)
        parent.update(sub_parent)
        bags.update(sub_bags)
    return best_total, TreeCutDecomposition(G, parent, bags)


def _exact_component(G: Multigraph, vs: List[int], measure: str, node_offset: int):
    n = len(vs)
    full = (1 << n) - 1
    idx = {v: i for i, v in enumerate(vs)}
    ends = []
    for _, a, b in G.edges():
        if a in idx:
            ends.append((1 << idx[a], 1 << idx[b]))

    bsize: Dict[int, int] = {}

    def bnd(mask: int) -> int:
        if mask not in bsize:
            bsize[mask] = sum(1 for a, b in ends if bool(a & mask) != bool(b & mask))
        return bsize[mask]

    def members(mask: int) -> List[int]:
        return [vs[i] for i in range(n) if mask >> i & 1]

    def node_cost(Y: int, X: int, blocks: Sequence[int], has_parent: bool) -> int:
        if measure == "width_prime":
            bold = sum(1 for B in blocks if bnd(B) >= 3)
            return bin(X).count("1") + bold + (1 if has_parent and bnd(Y) >= 3 else 0)
        where = {}
        for v in members(X):
            where[v] = v
        periph = {}
        for i, B in enumerate(blocks):
            z = -(i + 2)
            periph[z] = i
            for v in members(B):
                where[v] = z
        if has_parent:
            periph[-1] = -1
            for v in members(full & ~Y):
                where[v] = -1
        es = []
        for _, a, b in G.edges():
            if a in where and b in where and where[a] != where[b]:
                es.append((where[a], where[b]))
        verts = members(X) + sorted(periph)
        remaining, _ = suppress_peripherals(verts, es, periph)
        return len(remaining)

    memo: Dict[Tuple[int, bool], Tuple[int, int, Tuple[int, ...]]] = {}

    def partitions(W: int):
        if W == 0:
            yield ()
            return
        low = W & -W
        rest = W & ~low
        for sub in _subsets_of(rest):
            block = sub | low
            for tail in partitions(W & ~block):
                yield (block,) + tail

    def solve(Y: int, has_parent: bool) -> Tuple[int, int, Tuple[int, ...]]:
        key = (Y, has_parent)
        if key in memo:
            return memo[key]
        best = (1 << 30, 0, ())
        own = bnd(Y) if has_parent else 0
        for X in _subsets_of(Y):
            W = Y & ~X
            if measure == "width_prime":
                res = _best_partition_prime(W, Y, X, has_parent, own, best[0], bnd, solve)
                if res is not None and res[0] < best[0]:
                    best = res
                continue
            for blocks in partitions(W):
                if X == 0 and len(blocks) == 1:
                    continue
                val = own
                for B in blocks:
                    val = max(val, bnd(B))
                    if val >= best[0]:
                        break
                if val >= best[0]:
                    continue
                val = max(val, node_cost(Y, X, blocks, has_parent))
                if val >= best[0]:
                    continue
                for B in blocks:
                    val = max(val, solve(B, True)[0])
                    if val >= best[0]:
                        break
                if val < best[0]:
                    best = (val, X, blocks)
        memo[key] = best
        return best

    val, _, _ = solve(full, False)
    parent: Dict[int, Optional[int]] = {}
    bags: Dict[int, FrozenSet[int]] = {}
    counter = [node_offset]

    def build(Y: int, has_parent: bool, p: Optional[int]) -> None:
        _, X, blocks = solve(Y, has_parent)
        t = counter[0]
        counter[0] += 1
        parent[t] = p
        bags[t] = frozenset(members(X))
        for B in blocks:
            build(B, True, t)

    build(full, False, None)
    return val, parent, bags


def _best_partition_prime(W, Y, X, has_parent, own, bound, bnd, solve):
    """Best split of W into child blocks for the w(t) cost.

    The node cost only depends on the number of bold blocks, so a subset DP
    minimizing (bold count) under a width cap k is run for increasing k.
    """
    nX = bin(X).count("1")
    top = nX + (1 if has_parent and bnd(Y) >= 3 else 0)
    base = max(own, top)
    if base >= bound:
        return None
    if W == 0:
        if X == 0:
            return None
        return (base, X, ())
    for k in range(base, bound):
        # blocks allowed: every block B with bnd(B) <= k and solve(B) <= k
        memo: Dict[int, Optional[Tuple[int, Tuple[int, ...]]]] = {}

        def mb(R: int) -> Optional[Tuple[int, Tuple[int, ...]]]:
            if R == 0:
                return (0, ())
            if R in memo:
                return memo[R]
            low = R & -R
            rest = R & ~low
            best = None
            for sub in _subsets_of(rest):
                B = sub | low
                if B == Y:
                    continue
                if bnd(B) > k or solve(B, True)[0] > k:
                    continue
                tail = mb(R & ~B)
                if tail is None:
                    continue
                cnt = tail[0] + (1 if bnd(B) >= 3 else 0)
                if best is None or cnt < best[0]:
                    best = (cnt, (B,) + tail[1])
            memo[R] = best
            return best

        got = mb(W)
        if got is not None and top + got[0] <= k:
            if X == 0 and len(got[1]) == 1:
                continue
            return (k, X, got[1])
    return None


# ---- neat decompositions of F-free graphs


def _pipeline(D: TreeCutDecomposition) -> TreeCutDecomposition:
    D = improve_to_width_prime(D)
    D = make_connected(D)
    return make_neat(D)


def neat_decomposition(G: Multigraph, family, strict: bool = True) -> TreeCutDecomposition:
    """Neat decomposition of an F-free graph with width' at most bF.

    With ``strict=False`` the narrowest neat candidate is returned even if
    it exceeds bF.
    """
    from .immersion import is_family_free

    if not is_family_free(G, family):
        raise PreconditionError("graph is not free of the family")
    cands: List[TreeCutDecomposition] = []
    if G.num_vertices <= MAX_EXACT_VERTICES:
        cands.append(exact_tctw(G)[1])
    cands.append(dfs_decomposition(G))
    if G.num_vertices <= 40:
        cands.append(bisection_decomposition(G))
    best = None
    for D in cands:
        N = _pipeline(D)
        wp = width_prime(N)
        if best is None or wp < best[0]:
            best = (wp, N)
        if wp <= family.bF:
            return N
    if not strict:
        return best[1]
    raise ConfigurationError(
        f"best neat decomposition found has width' {best[0]} > bF={family.bF} for family {family.name}"
    )
