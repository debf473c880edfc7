"""Unit-capacity max-flow on undirected multigraphs.

Every edge is a capacity-1 undirected arc. Net flow on edge e=(a,b), a<b, is
stored as +1 (a->b), -1 (b->a) or 0. Used for Menger-style path packing,
connectivity pruning in the immersion search and important-cut enumeration.
"""
from __future__ import annotations

from collections import deque
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .multigraph import Multigraph


class UnitFlow:
    def __init__(
        self,
        G: Multigraph,
        sources: Iterable[int],
        sinks: Iterable[int],
        forbidden: Iterable[int] = (),
    ) -> None:
        self.G = G
        self.S = frozenset(sources)
        self.T = frozenset(sinks)
        if self.S & self.T:
            raise ValueError("sources and sinks overlap")
        self.forbidden = frozenset(forbidden)
        self.flow: Dict[int, int] = {}
        self.value = 0

    def _can_push(self, e: int, x: int) -> bool:
        if e in self.forbidden:
            return False
        a, _ = self.G.endpoints(e)
        f = self.flow.get(e, 0)
        return f < 1 if x == a else f > -1

    def _push(self, e: int, x: int) -> None:
        a, _ = self.G.endpoints(e)
        self.flow[e] = self.flow.get(e, 0) + (1 if x == a else -1)

    def augment(self) -> bool:
        G = self.G
        pred: Dict[int, Tuple[int, int]] = {}
        seen = set(self.S)
        queue = deque(sorted(self.S))
        hit = None
        while queue and hit is None:
            x = queue.popleft()
            for e in G.incident(x):
                if not self._can_push(e, x):
                    continue
                y = G.other(e, x)
                if y in seen:
                    continue
                seen.add(y)
                pred[y] = (x, e)
                if y in self.T:
                    hit = y
                    break
                queue.append(y)
        if hit is None:
            return False
        y = hit
        while y not in self.S:
            x, e = pred[y]
            self._push(e, x)
            y = x
        self.value += 1
        return True

    def run(self, limit: Optional[int] = None) -> int:
        while limit is None or self.value < limit:
            if not self.augment():
                break
        return self.value

    def source_side(self) -> Set[int]:
        """Vertices reachable from the sources in the residual graph."""
        G = self.G
        seen = set(self.S)
        queue = deque(self.S)
        while queue:
            x = queue.popleft()
            for e in G.incident(x):
                if self._can_push(e, x):
                    y = G.other(e, x)
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
        return seen

    def sink_side(self) -> Set[int]:
        """Vertices that can still reach a sink in the residual graph."""
        G = self.G
        seen = set(self.T)
        queue = deque(self.T)
        while queue:
            y = queue.popleft()
            for e in G.incident(y):
                x = G.other(e, y)
                if x not in seen and self._can_push(e, x):
                    seen.add(x)
                    queue.append(x)
        return seen

    def paths(self) -> List[List[int]]:
        """Decompose the current flow into edge-disjoint simple paths."""
        G = self.G
        out_edges: Dict[int, List[int]] = {}
        for e, f in sorted(self.flow.items()):
            if f == 0:
                continue
            a, b = G.endpoints(e)
            tail = a if f > 0 else b
            out_edges.setdefault(tail, []).append(e)
        for lst in out_edges.values():
            lst.reverse()
        result = []
        for s in sorted(self.S):
            while out_edges.get(s):
                verts = [s]
                edges: List[int] = []
                x = s
                while x not in self.T:
                    e = out_edges[x].pop()
                    x = G.other(e, x)
                    if x in verts:
                        # drop the cycle just closed
                        i = verts.index(x)
                        verts = verts[: i + 1]
                        edges = edges[:i]
                    else:
                        verts.append(x)
                        edges.append(e)
                result.append(edges)
        return result


def max_flow(
    G: Multigraph,
    S: Iterable[int],
    T: Iterable[int],
    limit: Optional[int] = None,
    forbidden: Iterable[int] = (),
) -> int:
    return UnitFlow(G, S, T, forbidden).run(limit)


def edge_disjoint_paths(
    G: Multigraph, s: int, t: int, k: Optional[int] = None, forbidden: Iterable[int] = ()
) -> List[List[int]]:
    fl = UnitFlow(G, [s], [t], forbidden)
    fl.run(k)
    return fl.paths()


def connectivity_table(G: Multigraph, forbidden: Iterable[int] = ()) -> Dict[Tuple[int, int], int]:
    """Local edge-connectivity for all vertex pairs (Gusfield's flow tree).

    Keys are (u, v) with u < v.
    """
    forb = frozenset(forbidden)
    vs = list(G.vertices)
    n = len(vs)
    if n < 2:
        return {}
    parent = [0] * n
    fl = [0] * n
    for i in range(1, n):
        f = UnitFlow(G, [vs[i]], [vs[parent[i]]], forb)
        fl[i] = f.run()
        side = f.source_side()
        for j in range(i + 1, n):
            if vs[j] in side and parent[j] == parent[i]:
                parent[j] = i
    adj: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
    for i in range(1, n):
        adj[i].append((parent[i], fl[i]))
        adj[parent[i]].append((i, fl[i]))
    out: Dict[Tuple[int, int], int] = {}
    for i in range(n):
        best = {i: None}
        queue = deque([i])
        while queue:
            x = queue.popleft()
            for y, w in adj[x]:
                if y not in best:
                    cur = best[x]
                    best[y] = w if cur is None else min(cur, w)
                    queue.append(y)
        for j in range(i + 1, n):
            a, b = vs[i], vs[j]
            out[(min(a, b), max(a, b))] = best[j] or 0
    return out
