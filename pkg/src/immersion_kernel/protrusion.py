"""Signatures, replacement tables, protrusion replacement with solution
lifting, and the search for replaceable protrusions."""
from __future__ import annotations

import hashlib
import itertools
import json
import os
from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .cuts import _reach, cut_candidates, furthest_min_cut, splitter_family
from .errors import PreconditionError, ResourceLimitError
from .flow import connectivity_table
from .immersion import (
    DEFAULT_LIMITS,
    BoundariedGraph,
    GraphFamily,
    RelevantPair,
    SearchLimits,
    effective_pairs,
    extended_graph,
    find_immersion,
    find_rooted_immersion,
    is_family_free,
)
from .multigraph import Multigraph

MAX_DELETION_SETS = 60_000

_PAIRS: Dict[Tuple[str, int], List[RelevantPair]] = {}


def pairs_for(family: GraphFamily, r: int) -> List[RelevantPair]:
    key = (family.digest(), r)
    if key not in _PAIRS:
        _PAIRS[key] = effective_pairs(r, family)
    return _PAIRS[key]


# ---- signatures


@dataclass(frozen=True)
class Signature:
    """Deletion numbers over subsets of the canonical pair list.

    ``levels[j]`` is the antichain of maximal pair subsets (bitmasks) that
    some deletion set of size <= j kills. value(S) is the least such j.
    """

    r: int
    npairs: int
    levels: Tuple[Tuple[int, ...], ...]

    def value(self, mask: int) -> int:
        for j, anti in enumerate(self.levels):
            if any(mask & ~m == 0 for m in anti):
                return j
        raise ValueError("mask outside the pair universe")

    def as_map(self) -> Dict[int, int]:
        if self.npairs > 16:
            raise ResourceLimitError(f"explicit signature map limited to 16 pairs, have {self.npairs}")
        return {m: self.value(m) for m in range(1 << self.npairs)}

    def digest(self) -> str:
        blob = json.dumps([self.r, self.npairs, [list(a) for a in self.levels]])
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _maximal(masks: Iterable[int]) -> Tuple[int, ...]:
    ms = sorted(set(masks), key=lambda m: (-bin(m).count("1"), m))
    out: List[int] = []
    for m in ms:
        if not any(m & ~o == 0 for o in out):
            out.append(m)
    return tuple(sorted(out))


class _KillOracle:
    """Decides which pairs survive a deletion set, caching found models."""

    def __init__(self, B: BoundariedGraph, pairs: Sequence[RelevantPair], limits: SearchLimits) -> None:
        self.ext = extended_graph(B)
        self.pairs = pairs
        self.limits = limits
        self.models: List[List[FrozenSet[int]]] = [[] for _ in pairs]
        self.kills: List[List[FrozenSet[int]]] = [[] for _ in pairs]
        self.lam = connectivity_table(self.ext.graph)

    def alive(self, i: int, L: FrozenSet[int]) -> bool:
        for used in self.models[i]:
            if not used & L:
                return True
        for K in self.kills[i]:
            if K <= L:
                return False
        m = find_rooted_immersion(self.pairs[i], self.ext, L, self.limits, self.lam)
        if m is None:
            self.kills[i].append(L)
            return False
        self.models[i].append(m.edges_used())
        return True

    def killed(self, L: FrozenSet[int]) -> int:
        mask = 0
        for i in range(len(self.pairs)):
            if not self.alive(i, L):
                mask |= 1 << i
        return mask


def _deletion_sets(edges: Sequence[int], top: int) -> Iterator[FrozenSet[int]]:
    for j in range(top + 1):
        for L in itertools.combinations(edges, j):
            yield frozenset(L)


def compute_signature(
    B: BoundariedGraph,
    family: GraphFamily,
    limits: SearchLimits = DEFAULT_LIMITS,
    check_free: bool = True,
) -> Signature:
    """Signature of an F-free boundaried graph by bounded brute force.

    Every deletion set has at most r edges: deleting the r pendant edges of
    the extended graph already kills every pair.
    """
    if check_free and not is_family_free(B.graph, family, limits):
        raise PreconditionError("boundaried graph is not free of the family")
    r = B.r
    if r > family.signature_r_max:
        raise ResourceLimitError(f"signatures limited to r <= {family.signature_r_max} for {family.name}; got r={r}")
    pairs = pairs_for(family, r)
    n = len(pairs)
    if r == 0 or n == 0:
        return Signature(r, n, tuple((0,) if n == 0 else () for _ in range(r + 1)))
    oracle = _KillOracle(B, pairs, limits)
    edges = list(oracle.ext.graph.edge_ids)
    total = sum(comb(len(edges), j) for j in range(r + 1))
    if total > MAX_DELETION_SETS:
        raise ResourceLimitError(
            f"signature needs {total} deletion sets (> {MAX_DELETION_SETS}); ||B||={B.graph.num_edges}, r={r}"
        )
    full = (1 << n) - 1
    best: List[Set[int]] = [set() for _ in range(r + 1)]
    for L in _deletion_sets(edges, r):
        best[len(L)].add(oracle.killed(L))
    levels = []
    acc: Set[int] = set()
    for j in range(r + 1):
        acc |= best[j]
        levels.append(_maximal(acc))
    if full not in levels[r]:
        raise AssertionError("deleting every pendant edge must kill all pairs")
    return Signature(r, n, tuple(levels))


def min_kill_set(B: BoundariedGraph, family: GraphFamily, target: int, budget: int,
                 limits: SearchLimits = DEFAULT_LIMITS) -> Optional[FrozenSet[int]]:
    """Smallest L ⊆ E(extended B), |L| <= budget, killing every pair in ``target``.

    Returned ids refer to the extended graph.
    """
    pairs = pairs_for(family, B.r)
    oracle = _KillOracle(B, pairs, limits)
    edges = list(oracle.ext.graph.edge_ids)
    idx = [i for i in range(len(pairs)) if target >> i & 1]
    for L in _deletion_sets(edges, budget):
        if all(not oracle.alive(i, L) for i in idx):
            return L
    return None


def killed_pairs(B: BoundariedGraph, family: GraphFamily, L: Iterable[int],
                 limits: SearchLimits = DEFAULT_LIMITS) -> int:
    pairs = pairs_for(family, B.r)
    return _KillOracle(B, pairs, limits).killed(frozenset(L))


# ---- boundaried graph enumeration


def _boundary_bases(r: int) -> List[BoundariedGraph]:
    """Edgeless r-boundaried graphs up to isomorphism (one per set partition)."""
    out = {}
    if r == 0:
        return [BoundariedGraph(Multigraph([]), ())]
    for labels in itertools.product(range(r), repeat=r):
        # restricted growth strings only
        ok = all(labels[i] <= max(labels[:i], default=-1) + 1 for i in range(r))
        if not ok:
            continue
        d = max(labels) + 1
        B = BoundariedGraph(Multigraph(range(d)), tuple(labels))
        out.setdefault(B.canonical(), B)
    return [out[k] for k in sorted(out)]


def enumerate_boundaried(r: int, max_edges: int, family: GraphFamily,
                         limits: SearchLimits = DEFAULT_LIMITS) -> Iterator[Tuple[int, List[BoundariedGraph]]]:
    """F-free r-boundaried graphs by edge count, every component touching
    the boundary (rootless components never influence signatures)."""
    level = [B for B in _boundary_bases(r)]
    yield 0, level
    for m in range(1, max_edges + 1):
        seen: Dict[Tuple, BoundariedGraph] = {}
        for B in level:
            G = B.graph
            vs = list(G.vertices)
            new_v = G.next_vertex_id()
            cands = [(a, b) for a, b in itertools.combinations(vs, 2)] + [(a, new_v) for a in vs]
            for a, b in cands:
                H = G.add_vertices([b]) if b == new_v else G
                H, _ = H.add_edges([(a, b)])
                C = BoundariedGraph(H, B.boundary)
                k = C.canonical()
                if k in seen:
                    continue
                if not is_family_free(H, family, limits):
                    continue
                seen[k] = C.normalized()
        level = [seen[k] for k in sorted(seen, key=lambda k: (seen[k].graph.num_vertices, k))]
        yield m, level


# ---- replacement table


@dataclass
class TableEntry:
    graph: BoundariedGraph
    provenance: str  # "enumerated" | "observed"

    @property
    def size(self) -> Tuple[int, int]:
        return (self.graph.graph.num_edges, self.graph.graph.num_vertices)


SCHEMA_TABLE = "immersion-kernel/table/1"


class ReplacementTable:
    """Smallest known representative per (r, signature)."""

    def __init__(self, family: GraphFamily, limits: SearchLimits = DEFAULT_LIMITS, keep_all: bool = False) -> None:
        self.family = family
        self.limits = limits
        # keep every rooted-immersion-minimal representative, not just the smallest
        self.keep_all = keep_all
        self.entries: Dict[Tuple[int, Signature], List[TableEntry]] = {}
        self.budgets: Dict[int, int] = {}
        # protrusions met during reductions whose signature had no entry; they
        # are saved with the table but only served after a reload, so one
        # run's discoveries never change the next run's result in-process
        self.pending: Dict[Tuple[int, Signature], TableEntry] = {}
        # components known to hold no replaceable protrusion, per entries version
        self.version = 0
        self.settled: Set[Tuple] = set()

    def __len__(self) -> int:
        return len(self.entries)

    def best(self, r: int, sig: Signature) -> Optional[TableEntry]:
        lst = self.entries.get((r, sig))
        return lst[0] if lst else None

    def candidates(self, r: int, sig: Signature) -> List[TableEntry]:
        return list(self.entries.get((r, sig), []))

    def observe(self, B: BoundariedGraph, sig: Signature) -> None:
        key = (B.r, sig)
        if key in self.entries:
            return
        B = B.normalized()
        cur = self.pending.get(key)
        if cur is None or (B.graph.num_edges, B.graph.num_vertices) < cur.size:
            self.pending[key] = TableEntry(B, "observed")

    def insert(self, B: BoundariedGraph, sig: Signature, provenance: str) -> bool:
        """Insert B; returns True if it became (or joined) the class's entries."""
        keep_all = self.keep_all
        B = B.normalized()
        key = (B.r, sig)
        entry = TableEntry(B, provenance)
        self.version += 1
        lst = self.entries.setdefault(key, [])
        canon = B.canonical()
        if any(e.graph.canonical() == canon for e in lst):
            return False
        if not lst or entry.size < lst[0].size:
            lst.insert(0, entry)
            if not keep_all:
                del lst[1:]
            return True
        if keep_all:
            lst.append(entry)
            lst.sort(key=lambda e: e.size)
            return True
        return False

    def max_entry_edges(self, provenance: str = "enumerated") -> int:
        sizes = [lst[0].size[0] for lst in self.entries.values() if lst and lst[0].provenance == provenance]
        return max(sizes, default=0)

    # persistence

    def to_json(self) -> Dict:
        items = []
        merged: Dict[Tuple[int, Signature], List[TableEntry]] = dict(self.entries)
        for key, e in self.pending.items():
            merged.setdefault(key, [e])
        for (r, sig), lst in sorted(merged.items(), key=lambda kv: (kv[0][0], kv[0][1].digest())):
            for e in lst:
                G = e.graph.graph
                items.append(
                    {
                        "r": r,
                        "signature": [list(a) for a in sig.levels],
                        "npairs": sig.npairs,
                        "graph": {
                            "n": G.num_vertices,
                            "edges": [[a, b] for _, a, b in G.edges()],
                            "boundary": list(e.graph.boundary),
                        },
                        "provenance": e.provenance,
                    }
                )
        return {
            "schema": SCHEMA_TABLE,
            "family": self.family.digest(),
            "budgets": {str(k): v for k, v in sorted(self.budgets.items())},
            "keep_all": self.keep_all,
            "entries": items,
        }

    def save(self, path: str) -> None:
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True)
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str, family: GraphFamily, limits: SearchLimits = DEFAULT_LIMITS,
             keep_all: bool = False) -> "ReplacementTable":
        """Load a persisted table; every entry is re-verified and dropped on mismatch."""
        tab = cls(family, limits, keep_all)
        if not os.path.exists(path):
            return tab
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, ValueError):
            return tab
        if data.get("schema") != SCHEMA_TABLE or data.get("family") != family.digest():
            return tab
        for it in data.get("entries", []):
            try:
                g = it["graph"]
                G = Multigraph.from_pairs(int(g["n"]), [tuple(e) for e in g["edges"]])
                B = BoundariedGraph(G, tuple(g["boundary"]))
                claimed = Signature(int(it["r"]), int(it["npairs"]), tuple(tuple(a) for a in it["signature"]))
                if not is_family_free(G, family, limits):
                    continue
                sig = compute_signature(B, family, limits, check_free=False)
            except (KeyError, TypeError, ValueError, PreconditionError, ResourceLimitError):
                continue
            if sig != claimed:
                continue
            tab.insert(B, sig, it.get("provenance", "observed"))
        # a smallest-only file cannot vouch for complete immersion-minimal classes
        if data.get("keep_all", False) or not keep_all:
            tab.budgets = {int(k): int(v) for k, v in data.get("budgets", {}).items()}
        return tab


def extend_table(table: ReplacementTable, r: int, budget: int) -> ReplacementTable:
    """Insert the smallest representative of every signature met by an
    F-free r-boundaried graph with at most ``budget`` edges. Idempotent."""
    if table.budgets.get(r, -1) >= budget:
        return table
    for m, level in enumerate_boundaried(r, budget, table.family, table.limits):
        for B in level:
            sig = compute_signature(B, table.family, table.limits, check_free=False)
            if table.keep_all:
                # keep rooted-immersion-minimal representatives only
                lst = table.entries.get((r, sig), [])
                if any(_rooted_immersion(e.graph, B, table.limits) for e in lst):
                    continue
            table.insert(B, sig, "enumerated")
    table.budgets[r] = max(budget, table.budgets.get(r, -1))
    return table


_DEFAULT_TABLES: Dict[Tuple[str, bool, Optional[str]], ReplacementTable] = {}


def table_arities(family: GraphFamily) -> range:
    return range(1, min(2 * family.bF, family.signature_r_max) + 1)


def default_table(
    family: GraphFamily,
    immersion_respecting: bool = False,
    path: Optional[str] = None,
    limits: SearchLimits = DEFAULT_LIMITS,
) -> ReplacementTable:
    """The family's replacement table, filled up to its per-arity budgets.

    Starts from ``path`` if it exists, else from the table shipped with a
    built-in family; anything missing is enumerated and, with ``path``,
    written back. Tables are shared per process.
    """
    from .families import shipped_table_path

    key = (family.digest(), immersion_respecting, path)
    if key in _DEFAULT_TABLES:
        return _DEFAULT_TABLES[key]
    source = path if path and os.path.exists(path) else shipped_table_path(family)
    if source:
        tab = ReplacementTable.load(source, family, limits, immersion_respecting)
    else:
        tab = ReplacementTable(family, limits, immersion_respecting)
    before = dict(tab.budgets)
    for r in table_arities(family):
        extend_table(tab, r, family.budget_for(r))
    if path and (tab.budgets != before or source != path):
        tab.save(path)
    _DEFAULT_TABLES[key] = tab
    return tab


def _rooted_immersion(small: BoundariedGraph, big: BoundariedGraph, limits: SearchLimits) -> bool:
    """Is extended(small) an immersion of extended(big) fixing boundary copies?"""
    if small.r != big.r:
        return False
    es, eb = extended_graph(small), extended_graph(big)
    if es.graph.num_edges > limits.max_pattern_edges:
        raise ResourceLimitError("rooted immersion check pattern too large")
    fixed = {a: b for a, b in zip(es.copies, eb.copies)}
    return find_immersion(es.graph, eb.graph, fixed, (), limits) is not None


# ---- traces


@dataclass
class ReplacementRecord:
    removed_vertices: FrozenSet[int]
    removed: BoundariedGraph  # G[X] with original ids
    inserted: BoundariedGraph  # representative with the ids used in the new graph
    boundary_edges: Tuple[int, ...]  # δ(X) ordered by id; i-th joins boundary i
    outer_ends: Tuple[int, ...]
    rule: str = "replace"


@dataclass
class PruningRecord:
    """Edges/vertices deleted by a bounding step; lifting keeps a solution of
    the smaller graph unless it fails on the larger one, then falls back to
    delta plus everything outside the structure's components."""

    rule: str
    deleted_edges: FrozenSet[int]
    deleted_vertices: FrozenSet[int]
    delta: FrozenSet[int]
    local_edges: FrozenSet[int]
    removed_graph: Optional[Multigraph] = None


@dataclass
class ReductionTrace:
    records: List[object] = field(default_factory=list)

    def replacements(self) -> int:
        return sum(1 for r in self.records if isinstance(r, ReplacementRecord))

    def prunings(self) -> int:
        return sum(1 for r in self.records if isinstance(r, PruningRecord))

    def extend(self, other: "ReductionTrace") -> None:
        self.records.extend(other.records)

    def replay(self, G: Multigraph) -> Multigraph:
        """Apply the recorded steps to G."""
        for rec in self.records:
            if isinstance(rec, ReplacementRecord):
                G = _apply_replacement(G, rec)
            else:
                G = G.delete_edges(rec.deleted_edges & set(G.edge_ids)).delete_vertices(
                    rec.deleted_vertices & set(G.vertices)
                )
        return G


def _apply_replacement(G: Multigraph, rec: ReplacementRecord) -> Multigraph:
    H = G.delete_vertices(rec.removed_vertices)
    ins = rec.inserted.graph
    H = Multigraph(list(H.vertices) + list(ins.vertices), list(H.edges()) + list(ins.edges()), G.next_edge_id)
    extra = [(e, y, x) for e, y, x in zip(rec.boundary_edges, rec.outer_ends, rec.inserted.boundary)]
    return H.with_edges(extra)


def protrusion_boundary(G: Multigraph, X: Iterable[int]) -> Tuple[BoundariedGraph, Tuple[int, ...], Tuple[int, ...]]:
    """(G[X] with boundary tuple, δ(X) ordered by id, outer endpoints)."""
    X = frozenset(X)
    bedges = tuple(sorted(G.boundary(X)))
    inner, outer = [], []
    for e in bedges:
        a, b = G.endpoints(e)
        x, y = (a, b) if a in X else (b, a)
        inner.append(x)
        outer.append(y)
    return BoundariedGraph(G.induced(X), tuple(inner)), bedges, tuple(outer)


@dataclass
class ReplaceOutcome:
    graph: Multigraph
    progress: bool
    reason: str
    record: Optional[ReplacementRecord] = None


def replace_protrusion(
    G: Multigraph,
    X: Iterable[int],
    table: ReplacementTable,
    trace: Optional[ReductionTrace] = None,
    immersion_respecting: bool = False,
) -> ReplaceOutcome:
    """Swap G[X] for a strictly smaller same-signature representative.

    Reports no progress (graph unchanged) when the table has nothing
    smaller; unknown signatures are recorded as observed entries.
    """
    family = table.family
    X = frozenset(X)
    B, bedges, outer = protrusion_boundary(G, X)
    if B.r > 2 * family.bF:
        raise PreconditionError(f"|δ(X)|={B.r} exceeds 2bF={2 * family.bF}")
    if not is_family_free(B.graph, family, table.limits):
        raise PreconditionError("G[X] is not free of the family")
    try:
        sig = compute_signature(B, family, table.limits, check_free=False)
    except ResourceLimitError as exc:
        return ReplaceOutcome(G, False, f"signature too expensive: {exc}")
    cands = table.candidates(B.r, sig)
    size = (B.graph.num_edges, B.graph.num_vertices)
    chosen = None
    for entry in cands:
        if entry.size[0] >= size[0]:
            continue
        if immersion_respecting:
            try:
                if not _rooted_immersion(entry.graph, B, table.limits):
                    continue
            except ResourceLimitError:
                continue
        chosen = entry
        break
    if chosen is None:
        if not cands:
            table.observe(B, sig)
            return ReplaceOutcome(G, False, "signature not in table")
        return ReplaceOutcome(G, False, "no strictly smaller representative")
    rep = chosen.graph
    v0 = (max(G.vertices) + 1) if G.vertices else 0
    vmap = {v: v0 + i for i, v in enumerate(rep.graph.vertices)}
    e0 = G.next_edge_id
    ins_edges = [(e0 + i, vmap[a], vmap[b]) for i, (_, a, b) in enumerate(rep.graph.edges())]
    inserted = BoundariedGraph(
        Multigraph(vmap.values(), ins_edges, e0 + len(ins_edges)),
        tuple(vmap[v] for v in rep.boundary),
    )
    rec = ReplacementRecord(X, B, inserted, bedges, outer)
    G2 = _apply_replacement(G, rec)
    if G2.num_edges >= G.num_edges:
        raise AssertionError("replacement did not shrink the graph")
    if trace is not None:
        trace.records.append(rec)
    return ReplaceOutcome(G2, True, "replaced", rec)


# ---- lifting


def _lift_replacement(Fp: FrozenSet[int], rec: ReplacementRecord, family: GraphFamily,
                      limits: SearchLimits) -> FrozenSet[int]:
    ins = rec.inserted
    ext_ins = extended_graph(ins)
    # extended-graph edge ids: inner edges keep ids, pendant i <-> boundary edge i
    to_ext = {e: e for e in ins.graph.edge_ids}
    for i, e in enumerate(rec.boundary_edges):
        to_ext[e] = ext_ins.pendant[i]
    local = frozenset(to_ext[e] for e in Fp if e in to_ext)
    rest = frozenset(e for e in Fp if e not in to_ext)
    target = killed_pairs(ins, family, local, limits)
    budget = min(len(local), rec.removed.r)
    L = min_kill_set(rec.removed, family, target, budget, limits)
    if L is None:
        raise AssertionError("equal signatures must admit an equally small kill set")
    ext_rem = extended_graph(rec.removed)
    back = {p: rec.boundary_edges[i] for i, p in enumerate(ext_rem.pendant)}
    mapped = frozenset(back.get(e, e) for e in L)
    return rest | mapped


def _lift_pruning(Fp: FrozenSet[int], rec: PruningRecord, G_before: Multigraph, family: GraphFamily,
                  limits: SearchLimits) -> FrozenSet[int]:
    Fp = frozenset(e for e in Fp if G_before.has_edge(e))
    if is_family_free(G_before.delete_edges(Fp), family, limits):
        return Fp
    alt = (Fp - rec.local_edges) | rec.delta
    if len(alt) > len(Fp):
        raise AssertionError("bounding lift exceeded the reduced solution size")
    return alt


def lift_solution(
    Fp: Iterable[int],
    trace: ReductionTrace,
    original: Multigraph,
    family: GraphFamily,
    limits: SearchLimits = DEFAULT_LIMITS,
    verify: bool = True,
) -> FrozenSet[int]:
    """Map a solution of the reduced graph back onto ``original``."""
    graphs = [original]
    for rec in trace.records:
        graphs.append(ReductionTrace([rec]).replay(graphs[-1]))
    reduced = graphs[-1]
    F = frozenset(Fp)
    for e in F:
        if not reduced.has_edge(e):
            raise PreconditionError(f"edge {e} is not in the reduced graph")
    if not is_family_free(reduced.delete_edges(F), family, limits):
        raise PreconditionError("input is not a solution of the reduced graph")
    for i in range(len(trace.records) - 1, -1, -1):
        rec = trace.records[i]
        before = graphs[i]
        size = len(F)
        if isinstance(rec, ReplacementRecord):
            F = _lift_replacement(F, rec, family, limits)
        else:
            F = _lift_pruning(F, rec, before, family, limits)
        if len(F) > size:
            raise AssertionError("lifting increased the solution size")
    if verify and not is_family_free(original.delete_edges(F), family, limits):
        raise AssertionError("lifted solution does not verify on the original graph")
    return F


# ---- finding replaceable protrusions


def _connected_small_sets(G: Multigraph, size: int) -> Iterator[FrozenSet[int]]:
    """Connected vertex sets with exactly ``size`` vertices (each once)."""
    seen: Set[FrozenSet[int]] = set()
    for s in G.vertices:
        stack = [frozenset([s])]
        while stack:
            W = stack.pop()
            if len(W) == size:
                if W not in seen:
                    seen.add(W)
                    yield W
                continue
            nbrs = sorted({y for x in W for y in G.neighbors(x) if y not in W and y > s})
            for y in nbrs:
                stack.append(W | {y})


def _sinks_from_trees(G: Multigraph, family: GraphFamily) -> Iterator[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """Vertex sets spanned by a tree with at most cF+1 edges whose induced
    graph has more than cF edges; the tree edges are contracted."""
    cF = family.cF
    for size in range(2, cF + 3):
        for W in _connected_small_sets(G, size):
            if len(G.induced_edges(W)) <= cF:
                continue
            yield W, _spanning_edges(G, W)


def _spanning_edges(G: Multigraph, W: FrozenSet[int]) -> FrozenSet[int]:
    start = min(W)
    seen = {start}
    out = []
    stack = [start]
    while stack:
        x = stack.pop()
        for e in G.incident(x):
            y = G.other(e, x)
            if y in W and y not in seen:
                seen.add(y)
                out.append(e)
                stack.append(y)
    return frozenset(out)


def _sinks_from_splitter(G: Multigraph, family: GraphFamily, seed: int) -> Iterator[Tuple[FrozenSet[int], FrozenSet[int]]]:
    fam = splitter_family(G.edge_ids, family.cF + 1, 2 * family.bF, seed)
    for Fs in fam.sets:
        H = G.edge_subgraph(Fs)
        for C in sorted(H.components(), key=lambda c: (-len(c), min(c))):
            if len(C) < 2 or len(G.induced_edges(C)) <= family.cF:
                continue
            yield C, frozenset(e for e in Fs if G.endpoints(e)[0] in C)


def _far_order(G: Multigraph, W: FrozenSet[int]) -> List[int]:
    dist = {w: 0 for w in W}
    queue = deque(sorted(W))
    while queue:
        x = queue.popleft()
        for y in G.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return sorted((v for v in G.vertices if v not in W), key=lambda v: (-dist.get(v, -1), v))


def protrusion_candidates(
    G: Multigraph,
    family: GraphFamily,
    seed: int = 0,
    limits: SearchLimits = DEFAULT_LIMITS,
    strategy: str = "auto",
) -> Iterator[FrozenSet[int]]:
    """Distinct replaceable protrusions (|δ(X)| <= 2bF, G[X] F-free,
    ||G[X]|| > cF) produced by contraction + important-cut search.

    If G contains an excessive protrusion, at least one set is produced.
    """
    if not G.is_connected():
        raise PreconditionError("protrusion search needs a connected graph")
    k = 2 * family.bF
    cF = family.cF
    if G.num_edges <= k * cF:
        return
    if strategy == "auto":
        strategy = "trees"
    sinks = _sinks_from_trees(G, family) if strategy == "trees" else _sinks_from_splitter(G, family, seed)
    seen_X: Set[FrozenSet[int]] = set()
    seen_sink: Set[FrozenSet[int]] = set()
    free_cache: Dict[FrozenSet[int], bool] = {}

    def free(W: FrozenSet[int]) -> bool:
        if W not in free_cache:
            free_cache[W] = is_family_free(G.induced(W), family, limits)
        return free_cache[W]

    # Singles for every sink first, then pairs: the same guesses overall,
    # but cheap candidates surface early.
    prepared: List[Tuple[Multigraph, int, Dict[int, List[int]], Dict[int, FrozenSet[int]], Dict[FrozenSet[int], Set[FrozenSet[int]]]]] = []

    def emit(Gc: Multigraph, sink: int, members, memo, lam: int, R: FrozenSet[int]) -> Iterator[FrozenSet[int]]:
        if R in memo:
            return
        memo[R] = cut_candidates(Gc, R, frozenset([sink]), k, lam)
        for D in sorted(memo[R], key=lambda c: (len(c), sorted(c))):
            Xbar = _reach(Gc, [sink], D)
            X = frozenset(v for x in Xbar for v in members[x])
            if X in seen_X:
                continue
            seen_X.add(X)
            if len(G.boundary(X)) > k or len(G.induced_edges(X)) <= cF:
                continue
            if free(X):
                yield X

    for W, contract in sinks:
        if W in seen_sink:
            continue
        seen_sink.add(W)
        if not free(W):
            continue
        Gc, rep = G.contract_edges(contract)
        sink = rep[min(W)]
        members: Dict[int, List[int]] = {}
        for v, r_ in rep.items():
            members.setdefault(r_, []).append(v)
        near: Dict[int, FrozenSet[int]] = {}
        memo: Dict[FrozenSet[int], Set[FrozenSet[int]]] = {}
        for s in _far_order(Gc, frozenset([sink])):
            lam, R = furthest_min_cut(Gc, [s], [sink], k)
            if lam > k:
                continue
            near[s] = R
            yield from emit(Gc, sink, members, memo, lam, R)
        prepared.append((Gc, sink, members, near, memo))

    for Gc, sink, members, near, memo in prepared:
        singles = list(near)
        for s1, s2 in itertools.combinations(singles, 2):
            # s2 inside R(s1) leaves the furthest minimum cut at R(s1)
            if s2 in near[s1] or s1 in near[s2]:
                continue
            lam, R = furthest_min_cut(Gc, [s1, s2], [sink], k)
            if lam <= k:
                yield from emit(Gc, sink, members, memo, lam, R)


def find_replaceable_protrusion(
    G: Multigraph,
    family: GraphFamily,
    table: Optional[ReplacementTable] = None,
    seed: int = 0,
    limits: SearchLimits = DEFAULT_LIMITS,
) -> Optional[FrozenSet[int]]:
    """First candidate protrusion; with a table, the first one the table can shrink."""
    for X in protrusion_candidates(G, family, seed, limits):
        if table is None:
            return X
        if _replaceable_by(G, X, table):
            return X
    return None


def _replaceable_by(G: Multigraph, X: FrozenSet[int], table: ReplacementTable) -> bool:
    B, _, _ = protrusion_boundary(G, X)
    try:
        sig = compute_signature(B, table.family, table.limits, check_free=False)
    except ResourceLimitError:
        return False
    best = table.best(B.r, sig)
    return best is not None and best.size[0] < B.graph.num_edges


@dataclass
class ReplacementStats:
    rounds: int = 0
    replacements: int = 0
    candidates_tried: int = 0


def exhaustive_replacement(
    G: Multigraph,
    family: GraphFamily,
    table: ReplacementTable,
    trace: Optional[ReductionTrace] = None,
    seed: int = 0,
    immersion_respecting: bool = False,
    stats: Optional[ReplacementStats] = None,
) -> Tuple[Multigraph, ReductionTrace]:
    """Replace protrusions until no component offers a shrinkable one."""
    trace = trace if trace is not None else ReductionTrace()
    stats = stats if stats is not None else ReplacementStats()
    settled: Set[FrozenSet[int]] = set()
    start_edges = G.num_edges
    rounds = 0
    while True:
        rounds += 1
        stats.rounds += 1
        if rounds > start_edges + 1:
            raise AssertionError("more replacement rounds than edges")
        progressed = False
        for C in G.components():
            key = G.induced_edges(C)
            if key in settled:
                continue
            H = G.induced(C)
            memo = (table.version, seed, immersion_respecting, H.key())
            if memo in table.settled:
                settled.add(key)
                continue
            for X in protrusion_candidates(H, family, seed, table.limits):
                stats.candidates_tried += 1
                out = replace_protrusion(G, X, table, trace, immersion_respecting)
                if out.progress:
                    G = out.graph
                    stats.replacements += 1
                    progressed = True
                    break
            if progressed:
                break
            settled.add(key)
            table.settled.add(memo)
        if not progressed:
            return G, trace
