"""Seeded instance generators.

Planted models return the ground truth next to the graph so detector and
kernel tests can check against it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .errors import PreconditionError
from .immersion import GraphFamily, is_family_free
from .multigraph import Multigraph

MODELS = ("uniform-multigraph", "planted-protrusion", "planted-bouquet")


@dataclass
class Instance:
    graph: Multigraph
    truth: Dict[str, Any] = field(default_factory=dict)


def uniform_multigraph(n: int, m: int, seed: int = 0) -> Instance:
    """m edges, each joining a uniformly random pair of distinct vertices."""
    if n < 0 or m < 0:
        raise PreconditionError("n and m must be non-negative")
    if m and n < 2:
        raise PreconditionError("edges need at least two vertices")
    rng = random.Random(seed)
    pairs = [tuple(rng.sample(range(n), 2)) for _ in range(m)]
    return Instance(Multigraph.from_pairs(n, pairs), {"model": "uniform-multigraph", "seed": seed})


class _Builder:
    def __init__(self) -> None:
        self.n = 0
        self.pairs: List[Tuple[int, int]] = []

    def vertex(self) -> int:
        self.n += 1
        return self.n - 1

    def edge(self, u: int, v: int) -> int:
        self.pairs.append((u, v))
        return len(self.pairs) - 1

    def subdivide(self, e: int) -> int:
        """Split edge e by a new vertex; e keeps its id and first endpoint."""
        u, v = self.pairs[e]
        x = self.vertex()
        self.pairs[e] = (u, x)
        self.edge(x, v)
        return x

    def graph(self) -> Multigraph:
        return Multigraph.from_pairs(self.n, self.pairs)


def _member_copy(b: _Builder, H: Multigraph) -> Tuple[List[int], List[int]]:
    vmap = {v: b.vertex() for v in H.vertices}
    return [vmap[v] for v in H.vertices], [b.edge(vmap[x], vmap[y]) for _, x, y in H.edges()]


def _check_size(model: str, n: int, m: Optional[int], need_n: int, need_m: int, n_min: int) -> None:
    if n < n_min:
        raise PreconditionError(f"{model} needs n >= {n_min}")
    if m is not None and m != need_m:
        raise PreconditionError(f"{model} with n={need_n} has exactly {need_m} edges; got m={m}")


def planted_protrusion(
    family: GraphFamily, k: int, n: Optional[int] = None, m: Optional[int] = None, seed: int = 0
) -> Instance:
    """k copies of the first family member chained by bridges, so OPT = k for
    members that lose every model after one deletion; the other vertices
    subdivide core edges or hang as trees, and one hanging path is long
    enough to be an excessive protrusion.

    Each extra vertex adds one edge, so m = n + k(||H|| - |H| + 1) - 1.
    """
    if k < 1:
        raise PreconditionError("planted-protrusion needs k >= 1")
    H = family.members[0]
    chain = 2 * family.bF * family.cF + 2
    n_min = k * H.num_vertices + chain
    extra = k * (H.num_edges - H.num_vertices + 1) - 1
    if n is None:
        n = n_min if m is None else m - extra
    need_m = n + extra
    _check_size("planted-protrusion", n, m, n, need_m, n_min)
    rng = random.Random(seed)
    b = _Builder()
    core_vertices: List[int] = []
    core_edges: List[int] = []
    cut: List[int] = []
    last = None
    for i in range(k):
        vs, es = _member_copy(b, H)
        if last is not None:
            b.edge(last, vs[0])
        core_vertices.extend(vs)
        core_edges.extend(es)
        cut.append(es[0])
        last = vs[-1]
    anchor = core_vertices[0]
    path = []
    prev = anchor
    for _ in range(chain):
        x = b.vertex()
        b.edge(prev, x)
        path.append(x)
        prev = x
    hanging = list(path)
    while b.n < n:
        if rng.random() < 0.25:
            x = b.subdivide(rng.choice(core_edges))
            core_vertices.append(x)
        else:
            x = b.vertex()
            b.edge(rng.choice(core_vertices + hanging), x)
            hanging.append(x)
    G = b.graph()
    truth: Dict[str, Any] = {
        "model": "planted-protrusion",
        "seed": seed,
        "family": family.name,
        "k": k,
        "core_vertices": sorted(core_vertices),
        "witness": sorted(cut),
        "protrusion": sorted(path),
    }
    # the copies are edge-disjoint, so k is a lower bound; the witness makes it exact
    truth["opt"] = k if is_family_free(G.delete_edges(cut), family) else None
    truth["opt_lower"] = k
    return Instance(G, truth)


def planted_bouquet(
    family: GraphFamily, count: Optional[int] = None, n: Optional[int] = None, m: Optional[int] = None,
    seed: int = 0,
) -> Instance:
    """Attachment {u, v} with ``count`` paths u-x-v, plus one copy of the first
    member joined to u; extra vertices subdivide member edges.

    m = n + count + ||H|| - |H| - 1.
    """
    H = family.members[0]
    count = family.dF if count is None else count
    if count < 1:
        raise PreconditionError("planted-bouquet needs count >= 1")
    n_min = 2 + count + H.num_vertices
    extra = count + H.num_edges - H.num_vertices - 1
    if n is None:
        n = n_min if m is None else m - extra
    need_m = n + extra
    _check_size("planted-bouquet", n, m, n, need_m, n_min)
    rng = random.Random(seed)
    b = _Builder()
    u, v = b.vertex(), b.vertex()
    elements = []
    for _ in range(count):
        x = b.vertex()
        b.edge(u, x)
        b.edge(x, v)
        elements.append([x])
    vs, es = _member_copy(b, H)
    b.edge(u, vs[0])
    while b.n < n:
        b.subdivide(rng.choice(es))
    truth = {
        "model": "planted-bouquet",
        "seed": seed,
        "family": family.name,
        "attachment": [u, v],
        "elements": elements,
        "count": count,
    }
    return Instance(b.graph(), truth)


def generate(
    model: str,
    family: GraphFamily,
    n: Optional[int] = None,
    m: Optional[int] = None,
    seed: int = 0,
    k: int = 1,
    count: Optional[int] = None,
) -> Instance:
    if model == "uniform-multigraph":
        if n is None or m is None:
            raise PreconditionError("uniform-multigraph needs n and m")
        return uniform_multigraph(n, m, seed)
    if model == "planted-protrusion":
        return planted_protrusion(family, k, n, m, seed)
    if model == "planted-bouquet":
        return planted_bouquet(family, count, n, m, seed)
    raise PreconditionError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
