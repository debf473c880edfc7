"""Instance files and the JSON documents written by the command line.

Instance format::

    # comment
    v 4
    e 0 1
    e 0 1

Edge ids are the zero-based order of the ``e`` lines.
"""
from __future__ import annotations

import hashlib
import json
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import InstanceParseError
from .families import SCHEMA_FAMILY  # noqa: F401  re-exported
from .multigraph import Multigraph
from .protrusion import PruningRecord, ReductionTrace, ReplacementRecord
from .treecut import TreeCutDecomposition

SCHEMA_RESULT = "immersion-kernel/result/1"
SCHEMA_DECOMPOSITION = "immersion-kernel/decomposition/1"
SCHEMA_TRACE = "immersion-kernel/trace/1"
SCHEMA_SIDECAR = "immersion-kernel/instance-truth/1"


def parse_instance(text: str) -> Multigraph:
    n: Optional[int] = None
    pairs: List[Tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag, args = parts[0], parts[1:]
        try:
            nums = [int(a) for a in args]
        except ValueError:
            raise InstanceParseError(f"line {lineno}: expected integers, got {line!r}") from None
        if tag == "v":
            if n is not None:
                raise InstanceParseError(f"line {lineno}: second 'v' header")
            if len(nums) != 1 or nums[0] < 0:
                raise InstanceParseError(f"line {lineno}: header must be 'v <n>' with n >= 0")
            n = nums[0]
        elif tag == "e":
            if n is None:
                raise InstanceParseError(f"line {lineno}: edge before the 'v' header")
            if len(nums) != 2:
                raise InstanceParseError(f"line {lineno}: edge must be 'e <u> <v>'")
            u, v = nums
            if u == v:
                raise InstanceParseError(f"line {lineno}: loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceParseError(f"line {lineno}: vertex out of range 0..{n - 1}")
            pairs.append((u, v))
        else:
            raise InstanceParseError(f"line {lineno}: unknown line type {tag!r}")
    if n is None:
        raise InstanceParseError("missing 'v <n>' header")
    return Multigraph.from_pairs(n, pairs)


def read_instance(path: str) -> Multigraph:
    try:
        with open(path) as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        raise InstanceParseError(f"cannot read {path}: {exc}") from None


def compact(G: Multigraph) -> Tuple[Multigraph, Dict[int, int], Dict[int, int]]:
    """Relabel vertices to 0..n-1 and edges to 0..m-1, both in id order.

    Returns the new graph and the maps old -> new for vertices and edges.
    """
    vmap = {v: i for i, v in enumerate(G.vertices)}
    emap = {e: i for i, e in enumerate(G.edge_ids)}
    H = Multigraph(range(len(vmap)), ((emap[e], vmap[a], vmap[b]) for e, a, b in G.edges()))
    return H, vmap, emap


def render_instance(G: Multigraph, comments: Iterable[str] = ()) -> str:
    H, _, _ = compact(G)
    lines = [f"# {c}" for c in comments]
    lines.append(f"v {H.num_vertices}")
    lines.extend(f"e {a} {b}" for _, a, b in H.edges())
    return "\n".join(lines) + "\n"


def graph_digest(G: Multigraph) -> str:
    return hashlib.sha256(render_instance(G).encode()).hexdigest()[:16]


def dumps(doc: Mapping[str, Any]) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def result_doc(
    solution: Optional[Iterable[int]],
    verified: bool,
    opt_bound: Optional[int],
    stats: Mapping[str, int],
    **extra: Any,
) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "schema": SCHEMA_RESULT,
        "solution": None if solution is None else sorted(solution),
        "verified": bool(verified),
        "opt_bound": opt_bound,
        "stats": {
            "iterations": int(stats.get("iterations", 0)),
            "replacements": int(stats.get("replacements", 0)),
            "prunings": int(stats.get("prunings", 0)),
        },
    }
    doc.update(extra)
    return doc


def decomposition_doc(D: TreeCutDecomposition) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_DECOMPOSITION,
        "graph": graph_digest(D.graph),
        "nodes": [
            {"id": t, "parent": D.parent[t], "bag": sorted(D.bags[t])} for t in D.nodes
        ],
    }


def decomposition_from_doc(doc: Mapping[str, Any], G: Multigraph) -> TreeCutDecomposition:
    if doc.get("schema") != SCHEMA_DECOMPOSITION:
        raise InstanceParseError(f"expected schema {SCHEMA_DECOMPOSITION}")
    if doc.get("graph") != graph_digest(G):
        raise InstanceParseError("decomposition refers to a different graph")
    parent = {int(nd["id"]): (None if nd["parent"] is None else int(nd["parent"])) for nd in doc["nodes"]}
    bags = {int(nd["id"]): frozenset(int(v) for v in nd["bag"]) for nd in doc["nodes"]}
    return TreeCutDecomposition(G, parent, bags)


def trace_doc(trace: ReductionTrace, original: Multigraph, reduced: Multigraph) -> Dict[str, Any]:
    """The reduction log, plus the map from the reduced file's edge ids to the
    ids used internally (original ids where the edge survived)."""
    _, vmap, emap = compact(reduced)
    steps: List[Dict[str, Any]] = []
    for rec in trace.records:
        if isinstance(rec, ReplacementRecord):
            steps.append({
                "rule": rec.rule,
                "removed_vertices": sorted(rec.removed_vertices),
                "removed_edges": sorted(rec.removed.graph.edge_ids),
                "boundary_edges": list(rec.boundary_edges),
                "inserted_vertices": sorted(rec.inserted.graph.vertices),
                "inserted_edges": [[e, a, b] for e, a, b in rec.inserted.graph.edges()],
                "inserted_boundary": list(rec.inserted.boundary),
            })
        elif isinstance(rec, PruningRecord):
            steps.append({
                "rule": rec.rule,
                "deleted_edges": sorted(rec.deleted_edges),
                "deleted_vertices": sorted(rec.deleted_vertices),
                "delta": sorted(rec.delta),
            })
    return {
        "schema": SCHEMA_TRACE,
        "original": graph_digest(original),
        "reduced": graph_digest(reduced),
        "steps": steps,
        "reduced_vertices": {str(new): old for old, new in sorted(vmap.items())},
        "reduced_edges": {str(new): old for old, new in sorted(emap.items())},
    }
