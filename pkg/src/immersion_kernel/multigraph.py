"""Loop-free multigraphs with stable edge identifiers.

Vertices are integers. Every edge carries an integer id that is assigned once
and survives deletions and contractions, so a deletion set computed on a
reduced graph can always be named in terms of the graph it came from.
"""
from __future__ import annotations

from collections import deque
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import GraphInputError

Edge = Tuple[int, int, int]


class Multigraph:
    """Immutable loop-free multigraph.

    ``edges`` maps edge id -> (u, v) with u < v. ``next_edge_id`` is never
    below max(id)+1, so fresh ids handed out by :meth:`add_edges` never
    collide with ids that existed in any ancestor graph.
    """

    __slots__ = ("_verts", "_ends", "_inc", "_next_eid", "_key")

    def __init__(
        self,
        vertices: Iterable[int] = (),
        edges: Iterable[Edge] = (),
        next_edge_id: Optional[int] = None,
    ) -> None:
        verts = set(vertices)
        ends: Dict[int, Tuple[int, int]] = {}
        inc: Dict[int, List[int]] = {v: [] for v in verts}
        for eid, u, v in edges:
            if u == v:
                raise GraphInputError(f"edge {eid} is a loop at {u}")
            if eid in ends:
                raise GraphInputError(f"duplicate edge id {eid}")
            if u not in inc or v not in inc:
                raise GraphInputError(f"edge {eid} has unknown endpoint")
            a, b = (u, v) if u < v else (v, u)
            ends[eid] = (a, b)
            inc[a].append(eid)
            inc[b].append(eid)
        top = max(ends) + 1 if ends else 0
        self._verts: Tuple[int, ...] = tuple(sorted(verts))
        self._ends = ends
        self._inc = {v: tuple(sorted(es)) for v, es in inc.items()}
        self._next_eid = top if next_edge_id is None else max(top, next_edge_id)
        self._key = None

    # ---- construction helpers

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[Tuple[int, int]]) -> "Multigraph":
        """Vertices 0..n-1, edge i joins pairs[i]."""
        return cls(range(n), ((i, u, v) for i, (u, v) in enumerate(pairs)))

    def add_vertices(self, vs: Iterable[int]) -> "Multigraph":
        return Multigraph(set(self._verts) | set(vs), self.edges(), self._next_eid)

    def add_edges(self, pairs: Sequence[Tuple[int, int]]) -> Tuple["Multigraph", List[int]]:
        """Add edges with fresh ids; returns the new graph and the ids used."""
        ids = list(range(self._next_eid, self._next_eid + len(pairs)))
        new = [(i, u, v) for i, (u, v) in zip(ids, pairs)]
        return Multigraph(self._verts, list(self.edges()) + new), ids

    def with_edges(self, extra: Iterable[Edge]) -> "Multigraph":
        """Add edges with caller-chosen ids (used to re-attach boundary edges)."""
        return Multigraph(self._verts, list(self.edges()) + list(extra), self._next_eid)

    # ---- accessors

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self._verts

    @property
    def edge_ids(self) -> Tuple[int, ...]:
        return tuple(sorted(self._ends))

    @property
    def next_edge_id(self) -> int:
        return self._next_eid

    def next_vertex_id(self) -> int:
        return self._verts[-1] + 1 if self._verts else 0

    def __len__(self) -> int:
        return len(self._verts)

    @property
    def num_vertices(self) -> int:
        return len(self._verts)

    @property
    def num_edges(self) -> int:
        return len(self._ends)

    def has_vertex(self, v: int) -> bool:
        return v in self._inc

    def has_edge(self, eid: int) -> bool:
        return eid in self._ends

    def endpoints(self, eid: int) -> Tuple[int, int]:
        try:
            return self._ends[eid]
        except KeyError:
            raise GraphInputError(f"unknown edge id {eid}") from None

    def other(self, eid: int, v: int) -> int:
        a, b = self._ends[eid]
        return b if a == v else a

    def edges(self) -> Iterator[Edge]:
        for eid in sorted(self._ends):
            a, b = self._ends[eid]
            yield eid, a, b

    def incident(self, v: int) -> Tuple[int, ...]:
        try:
            return self._inc[v]
        except KeyError:
            raise GraphInputError(f"unknown vertex {v}") from None

    def degree(self, v: int) -> int:
        return len(self.incident(v))

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return tuple(sorted({self.other(e, v) for e in self.incident(v)}))

    def parallel(self, u: int, v: int) -> Tuple[int, ...]:
        """Ids of all edges joining u and v."""
        return tuple(e for e in self.incident(u) if self.other(e, u) == v)

    def multiplicity(self, u: int, v: int) -> int:
        return len(self.parallel(u, v))

    def max_degree(self) -> int:
        return max((len(es) for es in self._inc.values()), default=0)

    def key(self) -> Tuple:
        """Exact (labelled) identity: vertex tuple plus sorted edge triples."""
        if self._key is None:
            self._key = (self._verts, tuple(self.edges()))
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Multigraph) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Multigraph(|V|={self.num_vertices}, |E|={self.num_edges})"

    def _check_vertices(self, X: Iterable[int]) -> FrozenSet[int]:
        xs = frozenset(X)
        bad = [v for v in xs if v not in self._inc]
        if bad:
            raise GraphInputError(f"unknown vertex ids {sorted(bad)}")
        return xs

    def _check_edges(self, F: Iterable[int]) -> FrozenSet[int]:
        fs = frozenset(F)
        bad = [e for e in fs if e not in self._ends]
        if bad:
            raise GraphInputError(f"unknown edge ids {sorted(bad)}")
        return fs

    # ---- cuts and components

    def boundary(self, X: Iterable[int]) -> FrozenSet[int]:
        xs = self._check_vertices(X)
        out = set()
        for v in xs:
            for e in self._inc[v]:
                if self.other(e, v) not in xs:
                    out.add(e)
        return frozenset(out)

    def edges_between(self, X: Iterable[int], Y: Iterable[int]) -> FrozenSet[int]:
        xs, ys = self._check_vertices(X), self._check_vertices(Y)
        out = set()
        for v in xs:
            for e in self._inc[v]:
                w = self.other(e, v)
                if w in ys:
                    out.add(e)
        return frozenset(out)

    def induced_edges(self, X: Iterable[int]) -> FrozenSet[int]:
        xs = self._check_vertices(X)
        return frozenset(e for v in xs for e in self._inc[v] if self.other(e, v) in xs)

    def components(self) -> List[FrozenSet[int]]:
        seen: set = set()
        out = []
        for s in self._verts:
            if s in seen:
                continue
            comp = {s}
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for e in self._inc[x]:
                    y = self.other(e, x)
                    if y not in comp:
                        comp.add(y)
                        queue.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    # ---- derived graphs

    def induced(self, X: Iterable[int]) -> "Multigraph":
        xs = self._check_vertices(X)
        es = [(e, a, b) for e, a, b in self.edges() if a in xs and b in xs]
        return Multigraph(xs, es, self._next_eid)

    def delete_edges(self, F: Iterable[int]) -> "Multigraph":
        fs = self._check_edges(F)
        return Multigraph(self._verts, (t for t in self.edges() if t[0] not in fs), self._next_eid)

    def delete_vertices(self, X: Iterable[int]) -> "Multigraph":
        xs = self._check_vertices(X)
        keep = [v for v in self._verts if v not in xs]
        es = [(e, a, b) for e, a, b in self.edges() if a not in xs and b not in xs]
        return Multigraph(keep, es, self._next_eid)

    def edge_subgraph(self, F: Iterable[int]) -> "Multigraph":
        """Same vertex set, only the edges in F."""
        fs = self._check_edges(F)
        return Multigraph(self._verts, (t for t in self.edges() if t[0] in fs), self._next_eid)

    def contract_edges(self, F: Iterable[int]) -> Tuple["Multigraph", Dict[int, int]]:
        """Contract every edge of F.

        Each class of vertices joined by F collapses onto its smallest member.
        Loops created by the contraction are dropped, parallel edges kept.
        Returns the graph and the map old vertex -> representative.
        """
        fs = self._check_edges(F)
        parent = {v: v for v in self._verts}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in sorted(fs):
            a, b = (find(x) for x in self._ends[e])
            if a != b:
                lo, hi = (a, b) if a < b else (b, a)
                parent[hi] = lo
        rep = {v: find(v) for v in self._verts}
        es = []
        for e, a, b in self.edges():
            ra, rb = rep[a], rep[b]
            if ra != rb:
                es.append((e, ra, rb))
        return Multigraph(set(rep.values()), es, self._next_eid), rep

    def relabel(self, mapping: Mapping[int, int]) -> "Multigraph":
        """Injective vertex renaming; edge ids unchanged."""
        es = [(e, mapping[a], mapping[b]) for e, a, b in self.edges()]
        return Multigraph((mapping[v] for v in self._verts), es, self._next_eid)

    def cycle_rank(self) -> int:
        return self.num_edges - self.num_vertices + len(self.components())


# ---- functional aliases


def boundary(G: Multigraph, X: Iterable[int]) -> FrozenSet[int]:
    return G.boundary(X)


def edges_between(G: Multigraph, X: Iterable[int], Y: Iterable[int]) -> FrozenSet[int]:
    return G.edges_between(X, Y)


def components(G: Multigraph) -> List[FrozenSet[int]]:
    return G.components()


def delete_edges(G: Multigraph, F: Iterable[int]) -> Multigraph:
    return G.delete_edges(F)


def delete_vertices(G: Multigraph, X: Iterable[int]) -> Multigraph:
    return G.delete_vertices(X)


def contract_edges(G: Multigraph, F: Iterable[int]) -> Tuple[Multigraph, Dict[int, int]]:
    return G.contract_edges(F)


def disjoint_union(A: Multigraph, B: Multigraph) -> Tuple[Multigraph, Dict[int, int], Dict[int, int]]:
    """Union with B's vertices and edges shifted past A's.

    Returns (graph, B vertex map, B edge map). A keeps its ids.
    """
    voff = A.next_vertex_id()
    eoff = A.next_edge_id
    vmap = {v: v + voff for v in B.vertices}
    emap = {e: e + eoff for e in B.edge_ids}
    es = list(A.edges()) + [(emap[e], vmap[a], vmap[b]) for e, a, b in B.edges()]
    return Multigraph(list(A.vertices) + list(vmap.values()), es), vmap, emap


# ---- canonical forms


def canonical_form(
    vertices: Sequence[int],
    edges: Iterable[Tuple[int, int]],
    colors: Optional[Mapping[int, Tuple]] = None,
) -> Tuple:
    """Isomorphism invariant that is complete for coloured multigraphs.

    Colour refinement followed by individualization of ties; each leaf of the
    search yields an ordering, and the lexicographically least encoding over
    all leaves is returned. Exhaustive, so only meant for small graphs.
    """
    verts = list(vertices)
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    mult: Dict[Tuple[int, int], int] = {}
    nbrs: List[Dict[int, int]] = [dict() for _ in range(n)]
    for u, v in edges:
        a, b = idx[u], idx[v]
        if a > b:
            a, b = b, a
        mult[(a, b)] = mult.get((a, b), 0) + 1
        nbrs[a][b] = nbrs[a].get(b, 0) + 1
        nbrs[b][a] = nbrs[b].get(a, 0) + 1
    base = [colors[v] if colors is not None else () for v in verts]

    def refine(cols: List[int]) -> List[int]:
        while True:
            sig = [
                (cols[i], tuple(sorted((cols[j], m) for j, m in nbrs[i].items())))
                for i in range(n)
            ]
            order = sorted(set(sig))
            rank = {s: r for r, s in enumerate(order)}
            new = [rank[s] for s in sig]
            if len(order) == len(set(cols)):
                return new
            cols = new

    start_order = sorted(set(base))
    start = refine([start_order.index(c) for c in base])
    best: List[Optional[Tuple]] = [None]

    def encode(cols: List[int]) -> Tuple:
        pos = cols  # discrete: colour is the position
        es = sorted(
            (min(pos[a], pos[b]), max(pos[a], pos[b]), m) for (a, b), m in mult.items()
        )
        inv = [0] * n
        for i in range(n):
            inv[pos[i]] = i
        return (tuple(base[inv[p]] for p in range(n)), tuple(es))

    def search(cols: List[int]) -> None:
        counts: Dict[int, int] = {}
        for c in cols:
            counts[c] = counts.get(c, 0) + 1
        ties = [c for c in sorted(counts) if counts[c] > 1]
        if not ties:
            enc = encode(cols)
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        c0 = ties[0]
        for i in range(n):
            if cols[i] != c0:
                continue
            # split c0 into {i} (first) and the rest, keeping ranks dense
            new = [2 * c + (0 if (j == i or c != c0) else 1) for j, c in enumerate(cols)]
            ranks = sorted(set(new))
            rk = {c: r for r, c in enumerate(ranks)}
            search(refine([rk[c] for c in new]))

    search(start)
    return (n,) + best[0] if n else (0, (), ())
