"""Exhaustive ground truth for small networks.

Everything here is exponential and guarded by explicit caps; exceeding a cap
raises :class:`CapExceeded` rather than returning a guess.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from .network import Network, NetworkError, Pair, all_reducible_pairs, reduce_pair
from .sequences import Sequence

DEFAULT_EDGE_CAP = 16
DEFAULT_SEQUENCE_CAP = 500_000


class CapExceeded(RuntimeError):
    """The instance is too large for brute force."""


# -- isomorphism --------------------------------------------------------------------

def _signatures(net: Network) -> Dict[int, tuple]:
    order = net.topological_order()
    depth = {net.root: 0}
    for u in order:
        for v in net.children(u):
            d = depth[u] + 1
            if depth.get(v, -1) < d:
                depth[v] = d
    below: Dict[int, FrozenSet[str]] = {}
    for u in reversed(order):
        t = net.taxon(u)
        if t is not None:
            below[u] = frozenset((t,))
        else:
            below[u] = frozenset().union(*(below[c] for c in net.children(u)))
    return {v: (net.indegree(v), net.outdegree(v), depth[v], below[v]) for v in order}


def _isomorphism(a: Network, b: Network) -> Optional[Dict[int, int]]:
    if a.taxa() != b.taxa() or len(a) != len(b) or a.num_edges() != b.num_edges():
        return None
    sa, sb = _signatures(a), _signatures(b)
    if Counter(sa.values()) != Counter(sb.values()):
        return None
    by_sig: Dict[tuple, List[int]] = {}
    for v, s in sb.items():
        by_sig.setdefault(s, []).append(v)
    mapping = {a.root: b.root}
    for t in a.taxa():
        mapping[a.leaf(t)] = b.leaf(t)
    used = set(mapping.values())
    order = [v for v in a.topological_order() if v not in mapping or a.is_leaf(v)]

    def fits(v: int, w: int) -> bool:
        for u in a.parents(v):
            if b.multiplicity(mapping[u], w) != a.multiplicity(u, v):
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        if a.is_leaf(v):
            return fits(v, mapping[v]) and extend(i + 1)
        for w in by_sig[sa[v]]:
            if w in used or not fits(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if extend(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return dict(mapping) if extend(0) else None


def labeled_iso(a: Network, b: Network) -> bool:
    """Isomorphism fixing leaf labels and the root, respecting edge multiplicities."""
    return _isomorphism(a, b) is not None


# -- cleanup -----------------------------------------------------------------------

def _prune(net: Network, keep: FrozenSet[str]) -> Network:
    """Drop unkept sinks and stray sources until none remain."""
    net = net.copy()
    stack = [v for v in net.nodes()
             if v != net.root and (net.outdegree(v) == 0 or net.indegree(v) == 0)]
    while stack:
        v = stack.pop()
        if v not in net or v == net.root:
            continue
        if net.indegree(v) == 0:
            pass
        elif net.outdegree(v) == 0 and net.taxon(v) not in keep:
            pass
        else:
            continue
        touched = net.parents(v) + net.children(v)
        net.remove_node(v)
        stack.extend(touched)
    return net


def _suppress_all(net: Network) -> None:
    for v in net.nodes():
        if v != net.root and net.indegree(v) == 1 and net.outdegree(v) == 1:
            net.suppress(v)


def cleanup(net: Network, keep) -> Optional[Network]:
    """Normalize ``net`` onto the taxa ``keep``.

    Returns None when the result is not a valid network on exactly ``keep``.
    """
    keep = frozenset(str(t) for t in keep)
    pruned = _prune(net, keep)
    _suppress_all(pruned)
    if pruned.taxa() != keep:
        return None
    try:
        pruned.validate()
    except NetworkError:
        return None
    return pruned


# -- deletion enumeration ------------------------------------------------------

def _reticulation_edges(net: Network) -> List[Tuple[int, int, int]]:
    return [(u, v, m) for u, v, m in net.edges() if net.indegree(v) >= 2]


def _deletions(net: Network, cap: int) -> Iterator[Tuple[Tuple[int, int, int], ...]]:
    """Every multiset of reticulation-edge instances, as (parent, child, count) triples."""
    edges = _reticulation_edges(net)
    total = sum(m for _, _, m in edges)
    if total > cap:
        raise CapExceeded(f"{total} reticulation edges exceed the cap of {cap}")
    ranges = [range(m + 1) for _, _, m in edges]
    for counts in itertools.product(*ranges):
        yield tuple((u, v, k) for (u, v, _), k in zip(edges, counts) if k)


def _delete(net: Network, chosen) -> Network:
    out = net.copy()
    for u, v, k in chosen:
        for _ in range(k):
            out.remove_edge(u, v)
    return out


def _shape(net: Network) -> tuple:
    return (len(net), net.num_edges(), net.reticulation_number())


@dataclass
class EmbeddingWitness:
    """Node map from the small network into the big one, and one path per small edge instance."""

    node_map: Dict[int, int]
    edge_paths: Dict[Tuple[int, int], List[Tuple[int, ...]]] = field(default_factory=dict)


def verify_embedding(big: Network, small: Network, w: EmbeddingWitness) -> bool:
    """Independent check of injectivity, labels, endpoints and edge-disjointness."""
    nm = w.node_map
    if set(nm) != set(small.nodes()) or len(set(nm.values())) != len(nm):
        return False
    for v in small.leaves():
        if big.taxon(nm[v]) != small.taxon(v):
            return False
    used: Counter = Counter()
    for s, t, m in small.edges():
        paths = w.edge_paths.get((s, t), [])
        if len(paths) != m:
            return False
        for path in paths:
            if path[0] != nm[s] or path[-1] != nm[t]:
                return False
            for u, v in zip(path, path[1:]):
                used[(u, v)] += 1
    return all(big.multiplicity(u, v) >= k for (u, v), k in used.items())


def subnetwork_bruteforce(big: Network, small: Network, cap: int = DEFAULT_EDGE_CAP,
                          witness: bool = False):
    """Whether deleting reticulation edges of ``big`` and cleaning up can give ``small``.

    With ``witness=True`` returns ``(answer, EmbeddingWitness or None)``.
    """
    keep = frozenset(small.taxa())
    if not keep <= big.taxa():
        return (False, None) if witness else False
    target = _shape(small)
    for chosen in _deletions(big, cap):
        deleted = _delete(big, chosen)
        kept = _prune(deleted, keep)
        cleaned = kept.copy()
        _suppress_all(cleaned)
        if cleaned.taxa() != keep or _shape(cleaned) != target:
            continue
        try:
            cleaned.validate()
        except NetworkError:
            continue
        iso = _isomorphism(small, cleaned)
        if iso is None:
            continue
        if not witness:
            return True
        return True, _build_witness(kept, cleaned, small, iso)
    return (False, None) if witness else False


def _build_witness(kept: Network, cleaned: Network, small: Network, iso) -> EmbeddingWitness:
    image = set(cleaned.nodes())
    runs: Dict[Tuple[int, int], List[Tuple[int, ...]]] = {}
    for a in image:
        for c in kept.children(a):
            for _ in range(kept.multiplicity(a, c)):
                path = [a, c]
                while path[-1] not in image:
                    path.append(kept.child(path[-1]))
                runs.setdefault((a, path[-1]), []).append(tuple(path))
    paths = {(s, t): runs[(iso[s], iso[t])][:m] for s, t, m in small.edges()}
    return EmbeddingWitness(node_map=dict(iso), edge_paths=paths)


# -- containment -----------------------------------------------------------------

def _contract(net: Network, edges: Tuple[Tuple[int, int], ...]) -> Network:
    rep = {v: v for v in net.nodes()}

    def find(v):
        while rep[v] != v:
            rep[v] = rep[rep[v]]
            v = rep[v]
        return v

    for u, v in edges:
        rep[find(v)] = find(u)
    out = Network()
    ids = {}
    for v in net.topological_order():
        r = find(v)
        if r in ids:
            continue
        if v == net.root:
            ids[r] = out.root
        elif net.is_leaf(v):
            ids[r] = out.add_leaf(net.taxon(v))
        else:
            ids[r] = out.add_node()
    contracted = set(edges)
    for u, v, m in net.edges():
        if (u, v) in contracted:
            continue
        out.add_edge(ids[find(u)], ids[find(v)], m)
    return out


def _contractible(net: Network) -> List[Tuple[int, int]]:
    found = []
    for u, v, _ in net.edges():
        if net.is_tree_node(u) and net.is_tree_node(v):
            found.append((u, v))
        elif net.is_reticulation(u) and net.is_reticulation(v) and not net.is_leaf(v):
            found.append((u, v))
    return found


def containment_bruteforce(big: Network, small: Network, cap: int = DEFAULT_EDGE_CAP,
                           contraction_cap: int = 200_000) -> bool:
    """Whether some refinement of ``small`` is a subnetwork of ``big``.

    Refinements are explored as contractions of tree-tree and
    reticulation-reticulation edges of each cleaned-up deletion result.
    """
    keep = frozenset(small.taxa())
    if not keep <= big.taxa():
        return False
    r_small = small.reticulation_number()
    seen = set()
    for chosen in _deletions(big, cap):
        cleaned = cleanup(_delete(big, chosen), keep)
        if cleaned is None or cleaned.reticulation_number() != r_small:
            continue
        key = frozenset(cleaned.edges())
        if key in seen:
            continue
        seen.add(key)
        k = len(cleaned) - len(small)
        if k < 0 or cleaned.num_edges() - small.num_edges() != k:
            continue
        if k == 0:
            if labeled_iso(small, cleaned):
                return True
            continue
        options = _contractible(cleaned)
        budget = 0
        for subset in itertools.combinations(options, k):
            budget += 1
            if budget > contraction_cap:
                raise CapExceeded("too many contraction sets")
            if labeled_iso(small, _contract(cleaned, subset)):
                return True
    return False


# -- sequence enumeration ----------------------------------------------------------

def _state_key(net: Network):
    return frozenset(net.edges()), frozenset((v, net.taxon(v)) for v in net.leaves())


def enumerate_all_minimal_cps(net: Network, cap: int = DEFAULT_SEQUENCE_CAP) -> List[Sequence]:
    """Every minimal cherry-picking sequence of ``net``; empty when it is not cherry-picking."""
    memo: Dict[object, List[Tuple[Pair, ...]]] = {}

    def walk(state: Network) -> List[Tuple[Pair, ...]]:
        if state.is_single_leaf():
            return [()]
        key = _state_key(state)
        if key in memo:
            return memo[key]
        found: List[Tuple[Pair, ...]] = []
        for p in sorted(all_reducible_pairs(state)):
            nxt = state.copy()
            reduce_pair(nxt, p)
            for tail in walk(nxt):
                found.append((p,) + tail)
                if len(found) > cap:
                    raise CapExceeded(f"more than {cap} minimal sequences")
        memo[key] = found
        return found

    return [Sequence(s) for s in walk(net)]


def count_minimal_cps(net: Network) -> int:
    """Number of minimal cherry-picking sequences, counted without listing them."""
    memo: Dict[object, int] = {}

    def walk(state: Network) -> int:
        if state.is_single_leaf():
            return 1
        key = _state_key(state)
        if key not in memo:
            total = 0
            for p in all_reducible_pairs(state):
                nxt = state.copy()
                reduce_pair(nxt, p)
                total += walk(nxt)
            memo[key] = total
        return memo[key]

    return walk(net)
