"""Measure the worst approximation, kernel-size and structure ratios of the
built-in families and suggest constants with 2x headroom. Also reports the
largest tree-cut width among small F-free graphs, which must not exceed bF.

    python scripts/calibrate.py [--families theta2 theta3 k4] [--extra 300] [-o calibration.json]

The workloads are the acceptance corpora (tests/corpora.py) plus ``--extra``
further seeds, so the shipped constants are not fitted to the test seeds alone.
"""
import argparse
import json
import math
import os
import sys
import random
import time

import networkx as nx

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "tests"))

import corpora  # noqa: E402
from oracles import random_multigraph  # noqa: E402

from immersion_kernel.errors import ResourceLimitError  # noqa: E402
from immersion_kernel.families import builtin  # noqa: E402
from immersion_kernel.immersion import is_family_free  # noqa: E402
from immersion_kernel.multigraph import Multigraph  # noqa: E402
from immersion_kernel.reduction import approximate, kernelize, opt_bruteforce  # noqa: E402
from immersion_kernel.treecut import exact_tctw  # noqa: E402

# per family: e2e graph cap (edges), planted k range and sizes, structured count
SETTINGS = {
    "theta2": dict(max_edges=20, ks=range(1, 6), sizes=corpora.PLANTED_SIZES, structured=100),
    "theta3": dict(max_edges=20, ks=range(1, 6), sizes=(40, 80), structured=100),
    "k4": dict(max_edges=14, ks=range(1, 4), sizes=(60, 100), structured=30),
}


def worst(items):
    return max(items, key=lambda x: x[0], default=(0.0, None))


def width_sweep(F, samples: int = 400) -> dict:
    """Connected simple graphs on <= 6 vertices plus random multigraphs."""
    rng = random.Random(5)
    graphs = [Multigraph.from_pairs(g.number_of_nodes(), list(g.edges()))
              for g in nx.graph_atlas_g()[1:] if g.number_of_nodes() <= 6 and nx.is_connected(g)]
    graphs += [random_multigraph(rng, rng.randint(2, 6), rng.randint(1, 12)) for _ in range(samples)]
    widths = [exact_tctw(G)[0] for G in graphs if is_family_free(G, F)]
    return {"worst": max(widths, default=0), "samples": len(widths), "bF": F.bF}


def sweep(name: str, extra: int) -> dict:
    F = builtin(name)
    cfg = SETTINGS[name]
    out = {"family": name}
    t0 = time.time()

    apx = []
    graphs = corpora.e2e_corpus(300) + corpora.e2e_corpus(extra, base=50_000)
    for seed, G in graphs:
        if G.num_edges > cfg["max_edges"]:
            continue
        try:
            opt = opt_bruteforce(G, F)
        except ResourceLimitError:
            continue
        if opt:
            apx.append((len(approximate(G, F).edges) / opt, seed))
    out["apx"] = {"worst": worst(apx)[0], "seed": worst(apx)[1], "samples": len(apx)}

    ker = []
    for k, m, G in corpora.planted_corpus(F, cfg["ks"], cfg["sizes"]):
        kr = kernelize(G, k, F)
        ker.append((kr.graph.num_edges / k, f"k={k} m={m}{' NO' if kr.no_instance else ''}"))
    out["ker"] = {"worst": worst(ker)[0], "case": worst(ker)[1], "samples": len(ker)}

    pairs, tries = corpora.structured_corpus(F, cfg["structured"])
    more, _ = corpora.structured_corpus(F, cfg["structured"], seed=70_000)
    st = [(G.num_edges / opt, i) for i, (G, opt) in enumerate(pairs + more)]
    out["struct"] = {"worst": worst(st)[0], "samples": len(st), "draws": tries}

    out["tctw"] = width_sweep(F)

    out["suggested"] = {
        "c_apx": max(1, math.ceil(2 * out["apx"]["worst"])),
        "c_ker": max(1, math.ceil(2 * out["ker"]["worst"])),
        "c_struct": max(1, math.ceil(2 * out["struct"]["worst"])),
    }
    out["shipped"] = {"c_apx": F.c_apx, "c_ker": F.c_ker, "c_struct": F.c_struct}
    out["seconds"] = round(time.time() - t0, 1)
    return out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--families", nargs="*", default=list(SETTINGS))
    ap.add_argument("--extra", type=int, default=300)
    ap.add_argument("-o", "--output")
    args = ap.parse_args()
    results = []
    for name in args.families:
        res = sweep(name, args.extra)
        print(json.dumps(res, sort_keys=True), flush=True)
        results.append(res)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
            fh.write("\n")


if __name__ == "__main__":
    main()
