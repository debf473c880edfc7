"""Regenerate the replacement tables shipped for the built-in families.

    python scripts/build_tables.py [theta2 theta3 k4]
"""
import argparse
import os
import time

from immersion_kernel import protrusion
from immersion_kernel.families import BUILTIN_NAMES, builtin, shipped_table_path


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("names", nargs="*", default=list(BUILTIN_NAMES))
    args = ap.parse_args()
    for name in args.names:
        F = builtin(name)
        path = shipped_table_path(F)
        tab = protrusion.ReplacementTable(F, keep_all=True)
        for r in protrusion.table_arities(F):
            t0 = time.time()
            protrusion.extend_table(tab, r, F.budget_for(r))
            n = sum(1 for (rr, _) in tab.entries if rr == r)
            print(f"{name} r={r} budget={F.budget_for(r)} classes={n} {time.time() - t0:.1f}s", flush=True)
        tab.save(path)
        print(f"{name}: {len(tab)} classes, max representative {tab.max_entry_edges()} edges -> {os.path.relpath(path)}")


if __name__ == "__main__":
    main()
