"""Command handlers: parse a request, run the pipeline, build a report.

The HTTP service and the command line both go through these functions, so a
request gives the same report either way.
"""
from __future__ import annotations

from typing import Any, Dict, FrozenSet, Optional

from . import io
from .families import family_from_json, family_to_json, load_family
from .generators import generate
from .immersion import GraphFamily, SearchLimits, DEFAULT_LIMITS, is_family_free, obstruction
from .multigraph import Multigraph
from .protrusion import ReplacementTable, default_table
from .reduction import _is_theta2, approximate, kernelize, min_deletion_set, opt_bruteforce, solve_fpt
from .schemas import BudgetRequest, GenRequest, GenResponse, InstanceRequest, Report, RunConfig, Stats
from .treecut import exact_tctw

LIMITS: SearchLimits = DEFAULT_LIMITS


def resolve_family(cfg: RunConfig) -> GraphFamily:
    if cfg.family_doc is not None:
        return family_from_json(cfg.family_doc)
    return load_family(cfg.family)


def _table(cfg: RunConfig, F: GraphFamily) -> ReplacementTable:
    return default_table(F, cfg.immersion_respecting, path=cfg.table, limits=LIMITS)


def _persist(cfg: RunConfig, tab: ReplacementTable) -> None:
    # observed representatives become usable on the next load
    if cfg.table and tab.pending:
        tab.save(cfg.table)


def _report(command: str, F: GraphFamily, **kw: Any) -> Report:
    stats = kw.pop("stats", None) or {}
    return Report(schema=io.SCHEMA_RESULT, command=command, family=F.name, stats=Stats(**stats), **kw)


def _sorted(edges: Optional[FrozenSet[int]]):
    return None if edges is None else sorted(edges)


def solve(req: BudgetRequest) -> Report:
    G = io.parse_instance(req.instance)
    F = resolve_family(req)
    tab = _table(req, F)
    sol, kr = solve_fpt(G, req.k, F, tab, req.seed, req.immersion_respecting, LIMITS)
    _persist(req, tab)
    if sol is None:
        return _report("solve", F, status="no", stats=kr.stats, details={"k": req.k, "opt_lower": req.k + 1})
    # the exact search is minimum on the kernel and lifting keeps the size
    return _report(
        "solve", F, solution=_sorted(sol.edges), verified=sol.verified, opt_bound=len(sol.edges),
        stats=sol.stats, details={"k": req.k, "opt_lower": len(sol.edges)},
    )


def approx(req: InstanceRequest) -> Report:
    G = io.parse_instance(req.instance)
    F = resolve_family(req)
    tab = _table(req, F)
    sol = approximate(G, F, tab, req.seed, req.immersion_respecting, LIMITS)
    _persist(req, tab)
    return _report(
        "approx", F, solution=_sorted(sol.edges), verified=sol.verified, opt_bound=len(sol.edges),
        stats=sol.stats, details={"opt_lower": sol.lower_bound, "c_apx": F.c_apx},
    )


def kernel(req: BudgetRequest) -> Report:
    """Report with the reduced instance text and trace under ``details``."""
    G = io.parse_instance(req.instance)
    F = resolve_family(req)
    tab = _table(req, F)
    kr = kernelize(G, req.k, F, tab, req.seed, req.immersion_respecting, LIMITS)
    _persist(req, tab)
    details: Dict[str, Any] = {"k": req.k, "bound": F.c_ker * req.k}
    if kr.no_instance:
        details["opt_lower"] = req.k + 1
        return _report("kernel", F, status="no", stats=kr.stats, details=details)
    details.update(
        kernel_vertices=kr.graph.num_vertices,
        kernel_edges=kr.graph.num_edges,
        within_bound=kr.within_bound,
        kernel_instance=io.render_instance(kr.graph, [f"kernel of {io.graph_digest(G)} for k={req.k}"]),
        trace=io.trace_doc(kr.trace, G, kr.graph),
    )
    return _report("kernel", F, stats=kr.stats, details=details)


def tctw(req: InstanceRequest) -> Report:
    G = io.parse_instance(req.instance)
    F = resolve_family(req)
    w, D = exact_tctw(G)
    return _report("tctw", F, details={"tctw": w, "decomposition": io.decomposition_doc(D)})


def free(req: InstanceRequest) -> Report:
    G = io.parse_instance(req.instance)
    F = resolve_family(req)
    ok = is_family_free(G, F, LIMITS)
    details: Dict[str, Any] = {"free": ok}
    if not ok:
        i, model = obstruction(G, F, LIMITS)
        details["obstruction"] = {
            "member": i,
            "vertex_map": {str(h): g for h, g in sorted(model.vertex_map.items())},
            "paths": {str(e): p for e, p in sorted(model.edge_map.items())},
        }
    return _report("free", F, solution=[] if ok else None, verified=ok, opt_bound=0 if ok else None,
                   details=details)


def _forest_complement(G: Multigraph) -> FrozenSet[int]:
    seen = set()
    keep = set()
    for root in G.vertices:
        if root in seen:
            continue
        seen.add(root)
        stack = [root]
        while stack:
            x = stack.pop()
            for e in G.incident(x):
                y = G.other(e, x)
                if y not in seen:
                    seen.add(y)
                    keep.add(e)
                    stack.append(y)
    return frozenset(G.edge_ids) - keep


def oracle(req: InstanceRequest) -> Report:
    G = io.parse_instance(req.instance)
    F = resolve_family(req)
    opt = opt_bruteforce(G, F, max_edges=req.max_oracle_edges, limits=LIMITS)
    witness = _forest_complement(G) if _is_theta2(F) else min_deletion_set(G, F, opt, LIMITS)
    return _report("oracle", F, solution=_sorted(witness), verified=is_family_free(G.delete_edges(witness), F, LIMITS),
                   opt_bound=opt, details={"opt": opt})


def gen(req: GenRequest) -> GenResponse:
    F = resolve_family(req)
    inst = generate(req.model, F, req.n, req.m, req.seed, req.k, req.count)
    truth = dict(inst.truth)
    truth["schema"] = io.SCHEMA_SIDECAR
    truth["family_doc"] = family_to_json(F)
    header = [f"model={req.model} seed={req.seed}"]
    return GenResponse(instance=io.render_instance(inst.graph, header), truth=truth)


HANDLERS = {"solve": solve, "approx": approx, "kernel": kernel, "tctw": tctw, "free": free, "oracle": oracle}
REQUESTS = {"solve": BudgetRequest, "kernel": BudgetRequest, "approx": InstanceRequest, "tctw": InstanceRequest,
            "free": InstanceRequest, "oracle": InstanceRequest}
