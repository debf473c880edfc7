"""Print the service reports for a fixed slice of the end-to-end and planted
workloads, one JSON document per line. Run twice, the output must match."""
import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import corpora  # noqa: E402

from immersion_kernel import api, io  # noqa: E402
from immersion_kernel.families import builtin  # noqa: E402
from immersion_kernel.schemas import BudgetRequest, InstanceRequest  # noqa: E402

E2E_SEEDS = 30
PLANTED = [(1, 40), (3, 40), (5, 40), (2, 120)]


def reports():
    for seed, G in corpora.e2e_corpus(E2E_SEEDS):
        text = io.render_instance(G)
        for fam in ("theta2", "theta3"):
            for k in (1, 3):
                yield api.kernel(BudgetRequest(instance=text, family=fam, k=k, seed=seed)).doc()
                yield api.solve(BudgetRequest(instance=text, family=fam, k=k, seed=seed)).doc()
            yield api.approx(InstanceRequest(instance=text, family=fam, seed=seed)).doc()
    F = builtin("theta2")
    for k, m, G in corpora.planted_corpus(F, [k for k, _ in PLANTED], [m for _, m in PLANTED]):
        if (k, m) in PLANTED:
            text = io.render_instance(G)
            yield api.kernel(BudgetRequest(instance=text, family="theta2", k=k)).doc()


def main() -> None:
    for doc in reports():
        sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
