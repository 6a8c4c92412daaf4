"""Shared fixtures loaders, random network makers and brute-force references."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from cherrypick.construction import build_from_cps
from cherrypick.formats import parse_network
from cherrypick.generation import random_cps, random_tcs
from cherrypick.network import Network, Pair

DATA = Path(__file__).parent / "data"

ACCEPTANCE: dict = {}


def report(k: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {k:>2} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE[k] = line
    print(line)


def load(name: str) -> Network:
    return parse_network((DATA / f"{name}.el").read_text())[0]


def fixture_names():
    return sorted(p.stem for p in DATA.glob("*.el"))


def random_cpn(rng, cls, n_max=6, r_max=3, n_min=2):
    n = int(rng.integers(n_min, n_max + 1))
    r = int(rng.integers(0, r_max + 1))
    seq = random_cps(n, r, rng)
    return build_from_cps(seq, cls), seq


def random_tree_child(rng, n_max=7, r_max=4, n_min=2):
    n = int(rng.integers(n_min, n_max + 1))
    r = int(rng.integers(0, r_max + 1))
    seq = random_tcs(n, r, rng)
    return build_from_cps(seq, "1a2b"), seq


def shuffled(net: Network, rng) -> Network:
    """Same network with node ids permuted."""
    nodes = net.nodes()
    perm = rng.permutation(len(nodes)) + 1000
    return net.relabel_nodes({v: int(p) for v, p in zip(nodes, perm)})


def brute_pairs(net: Network) -> set:
    """Reducible pairs straight from the definitions, using only the edge list."""
    parents, children = {}, {}
    for u, v, m in net.edges():
        parents.setdefault(v, []).extend([u] * m)
        children.setdefault(u, []).extend([v] * m)
    leaf_of = {net.taxon(v): v for v in net.leaves()}
    found = set()
    for x, vx in leaf_of.items():
        for y, vy in leaf_of.items():
            if x == y:
                continue
            (px,), (py,) = parents[vx], parents[vy]
            if px == py:
                found.add(Pair(x, y))
                continue
            px_ret = len(parents.get(px, [])) >= 2
            py_tree = len(parents.get(py, [])) == 1 and len(children.get(py, [])) >= 2
            if px_ret and py_tree and py in parents[px]:
                found.add(Pair(x, y))
    return found


def rewired(net: Network, rng, tries=50):
    """Networks obtained by swapping the heads of two edges; invalid results are skipped."""
    edges = [(u, v) for u, v, _ in net.edges()]
    out = []
    for _ in range(tries):
        i, j = rng.choice(len(edges), size=2, replace=False)
        (u, a), (w, b) = edges[i], edges[j]
        if a == b or u == w:
            continue
        cand = net.copy()
        cand.remove_edge(u, a)
        cand.remove_edge(w, b)
        cand.add_edge(u, b)
        cand.add_edge(w, a)
        try:
            cand.validate()
        except ValueError:
            continue
        out.append(cand)
    return out
