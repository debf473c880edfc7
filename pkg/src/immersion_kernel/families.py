"""Built-in families, family files and default replacement tables."""
from __future__ import annotations

import itertools
import json
import os
from typing import Any, Dict, Mapping, Optional

from .errors import FamilyInvalidError
from .immersion import GraphFamily, require_valid
from .multigraph import Multigraph

SCHEMA_FAMILY = "immersion-kernel/family/1"
DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

# bF: bounds the tree-cut width of F-free graphs (checked on small graphs by the calibration script).
# cF: largest minimal representative in the shipped table.
# c_struct / c_apx / c_ker: worst observed ratios in the acceptance sweeps, doubled.
_BUILTINS: Dict[str, Dict[str, Any]] = {
    "theta2": dict(
        n=2, edges=[(0, 1), (0, 1)], bF=1, cF=1, c_struct=9.0, c_apx=2.0, c_ker=20.0,
        table_budget=3, table_budgets={}, signature_r_max=2,
    ),
    "theta3": dict(
        n=2, edges=[(0, 1), (0, 1), (0, 1)], bF=2, cF=4, c_struct=26.0, c_apx=6.0, c_ker=16.0,
        table_budget=5, table_budgets={4: 4}, signature_r_max=4,
    ),
    # arities above 3 have too many relevant pairs for brute-force signatures
    "k4": dict(
        n=4, edges=list(itertools.combinations(range(4), 2)), bF=4, cF=3, c_struct=34.0, c_apx=6.0, c_ker=38.0,
        table_budget=4, table_budgets={}, signature_r_max=3,
    ),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> GraphFamily:
    try:
        cfg = _BUILTINS[name]
    except KeyError:
        raise FamilyInvalidError(f"unknown built-in family {name!r}; choose from {', '.join(_BUILTINS)}") from None
    H = Multigraph.from_pairs(cfg["n"], cfg["edges"])
    return require_valid(
        GraphFamily(
            name,
            [H],
            cfg["bF"],
            cfg["cF"],
            c_struct=cfg["c_struct"],
            c_apx=cfg["c_apx"],
            c_ker=cfg["c_ker"],
            table_budget=cfg["table_budget"],
            table_budgets=dict(cfg["table_budgets"]),
            signature_r_max=cfg["signature_r_max"],
        )
    )


def family_from_json(data: Mapping[str, Any]) -> GraphFamily:
    """Family object: {name, graphs: [[[u,v], ...], ...], bF, cF?, ...}."""
    try:
        name = str(data["name"])
        graphs = data["graphs"]
        bF = int(data["bF"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FamilyInvalidError(f"family file missing field: {exc}") from None
    if not isinstance(graphs, list) or not graphs:
        raise FamilyInvalidError("family needs a non-empty 'graphs' list")
    members = []
    for i, el in enumerate(graphs):
        try:
            pairs = [(int(u), int(v)) for u, v in el]
        except (TypeError, ValueError):
            raise FamilyInvalidError(f"graph {i}: edges must be [u, v] pairs") from None
        if not pairs:
            raise FamilyInvalidError(f"graph {i} has no edges")
        if any(u == v or u < 0 or v < 0 for u, v in pairs):
            raise FamilyInvalidError(f"graph {i} has a loop or negative vertex")
        used = sorted({x for p in pairs for x in p})
        relabel = {v: j for j, v in enumerate(used)}
        members.append(Multigraph.from_pairs(len(used), [(relabel[u], relabel[v]) for u, v in pairs]))
    if bF < 1:
        raise FamilyInvalidError("bF must be positive")
    cF_raw = data.get("cF", "auto")
    fam = GraphFamily(
        name,
        members,
        bF,
        1,
        c_struct=float(data.get("c_struct", 8.0)),
        c_apx=float(data.get("c_apx", 4.0)),
        c_ker=float(data.get("c_ker", 60.0)),
        table_budget=int(data.get("table_budget", 2)),
        table_budgets={int(r): int(b) for r, b in data.get("table_budgets", {}).items()},
        signature_r_max=int(data.get("signature_r_max", 3)),
    )
    require_valid(fam)
    if cF_raw == "auto" or cF_raw is None:
        from .protrusion import default_table

        fam.cF = max(1, default_table(fam).max_entry_edges())
    else:
        try:
            fam.cF = int(cF_raw)
        except (TypeError, ValueError):
            raise FamilyInvalidError("cF must be an integer or 'auto'") from None
    return fam


def family_to_json(F: GraphFamily) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_FAMILY,
        "name": F.name,
        "graphs": [[[a, b] for _, a, b in H.edges()] for H in F.members],
        "bF": F.bF,
        "cF": F.cF,
        "c_struct": F.c_struct,
        "c_apx": F.c_apx,
        "c_ker": F.c_ker,
        "table_budget": F.table_budget,
        "table_budgets": {str(r): b for r, b in sorted(F.table_budgets.items())},
        "signature_r_max": F.signature_r_max,
    }


def load_family(cfg: str) -> GraphFamily:
    """Built-in name or path to a family JSON file."""
    if cfg in _BUILTINS:
        return builtin(cfg)
    if not os.path.exists(cfg):
        raise FamilyInvalidError(f"{cfg!r} is neither a built-in family nor a readable file")
    try:
        with open(cfg) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise FamilyInvalidError(f"cannot read family file {cfg}: {exc}") from None
    if not isinstance(data, dict):
        raise FamilyInvalidError("family file must hold a JSON object")
    return family_from_json(data)


def shipped_table_path(F: GraphFamily) -> Optional[str]:
    if F.name in _BUILTINS:
        return os.path.join(DATA_DIR, f"{F.name}-table.json")
    return None
