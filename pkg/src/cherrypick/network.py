"""Rooted phylogenetic networks as multigraphs, plus the local reduction primitives.

A network is a rooted DAG whose source (the root) has outdegree 1, whose sinks
are leaves carrying distinct taxon labels, and whose remaining nodes are tree
nodes (indegree 1, outdegree >= 2) or reticulations (indegree >= 2,
outdegree 1). Parallel edges are stored as multiplicities.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Set, Tuple

Taxon = str


class NetworkError(ValueError):
    """A graph that violates the network invariants.

    ``node`` holds the offending node id when one can be named.
    """

    def __init__(self, message: str, node: Optional[int] = None):
        super().__init__(message)
        self.node = node


class NodeKind(enum.Enum):
    ROOT = "root"
    TREE = "tree"
    RETICULATION = "reticulation"
    LEAF = "leaf"


class PairKind(enum.Enum):
    CHERRY = "cherry"
    RETICULATED = "reticulated"


class Pair(NamedTuple):
    first: Taxon
    second: Taxon

    def __repr__(self) -> str:
        return f"({self.first},{self.second})"


def pair(first, second) -> Pair:
    """Build a validated pair; taxa are stored as strings."""
    a, b = str(first), str(second)
    if a == b:
        raise ValueError(f"a pair needs two distinct taxa, got ({a},{b})")
    return Pair(a, b)


class Network:
    """Mutable rooted network.

    Node ids are ints handed out by a counter and never reused, so ids stay
    stable across reductions. Taxa are the external identity of leaves.
    """

    __slots__ = ("root", "_out", "_in", "_outdeg", "_indeg", "_taxon", "_leaf", "_next")

    def __init__(self) -> None:
        self._out: Dict[int, Dict[int, int]] = {}
        self._in: Dict[int, Dict[int, int]] = {}
        self._outdeg: Dict[int, int] = {}
        self._indeg: Dict[int, int] = {}
        self._taxon: Dict[int, Taxon] = {}
        self._leaf: Dict[Taxon, int] = {}
        self._next = 0
        self.root = self.add_node()

    # -- construction -------------------------------------------------------

    @classmethod
    def single_leaf(cls, taxon) -> "Network":
        net = cls()
        net.add_edge(net.root, net.add_leaf(taxon))
        return net

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple], validate: bool = True) -> "Network":
        """Build from ``(parent, child)`` or ``(parent, child, multiplicity)`` tuples.

        Endpoint names are arbitrary hashables; sinks become leaves labelled by
        ``str(name)``. The unique source must have outdegree 1.
        """
        net = cls()
        ids: Dict[object, int] = {}
        raw: List[Tuple[object, object, int]] = []
        for e in edges:
            u, v = e[0], e[1]
            m = e[2] if len(e) > 2 else 1
            raw.append((u, v, m))
            for name in (u, v):
                if name not in ids:
                    ids[name] = -1
        children = {u for u, _, _ in raw}
        heads = {v for _, v, _ in raw}
        sources = [name for name in ids if name not in heads]
        if len(sources) != 1:
            raise NetworkError(f"expected exactly one source, found {len(sources)}")
        ids[sources[0]] = net.root
        for name in ids:
            if ids[name] != -1:
                continue
            if name in children:
                ids[name] = net.add_node()
            else:
                ids[name] = net.add_leaf(name)
        for u, v, m in raw:
            net.add_edge(ids[u], ids[v], m)
        if validate:
            net.validate()
        return net

    def add_node(self) -> int:
        v = self._next
        self._next += 1
        self._out[v] = {}
        self._in[v] = {}
        self._outdeg[v] = 0
        self._indeg[v] = 0
        return v

    def add_leaf(self, taxon) -> int:
        taxon = str(taxon)
        if taxon in self._leaf:
            raise NetworkError(f"taxon {taxon!r} already present")
        v = self.add_node()
        self._taxon[v] = taxon
        self._leaf[taxon] = v
        return v

    def add_edge(self, u: int, v: int, multiplicity: int = 1) -> None:
        out = self._out[u]
        out[v] = out.get(v, 0) + multiplicity
        inn = self._in[v]
        inn[u] = inn.get(u, 0) + multiplicity
        self._outdeg[u] += multiplicity
        self._indeg[v] += multiplicity

    def remove_edge(self, u: int, v: int) -> None:
        """Remove one instance of the edge ``u -> v``."""
        out = self._out[u]
        m = out[v]
        if m == 1:
            del out[v]
            del self._in[v][u]
        else:
            out[v] = m - 1
            self._in[v][u] = m - 1
        self._outdeg[u] -= 1
        self._indeg[v] -= 1

    def remove_node(self, v: int) -> None:
        for c, m in self._out[v].items():
            del self._in[c][v]
            self._indeg[c] -= m
        for p, m in self._in[v].items():
            del self._out[p][v]
            self._outdeg[p] -= m
        del self._out[v], self._in[v], self._outdeg[v], self._indeg[v]
        taxon = self._taxon.pop(v, None)
        if taxon is not None:
            del self._leaf[taxon]

    def suppress(self, v: int) -> None:
        """Replace ``a -> v -> b`` by ``a -> b`` for a node of in- and outdegree 1."""
        if self._indeg[v] != 1 or self._outdeg[v] != 1 or v == self.root:
            raise NetworkError(f"node {v} cannot be suppressed", v)
        (a,) = self._in[v]
        (b,) = self._out[v]
        self.remove_node(v)
        self.add_edge(a, b)

    def copy(self) -> "Network":
        net = Network.__new__(Network)
        net.root = self.root
        net._out = {v: dict(d) for v, d in self._out.items()}
        net._in = {v: dict(d) for v, d in self._in.items()}
        net._outdeg = dict(self._outdeg)
        net._indeg = dict(self._indeg)
        net._taxon = dict(self._taxon)
        net._leaf = dict(self._leaf)
        net._next = self._next
        return net

    # -- queries --------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._out)

    def __contains__(self, v: int) -> bool:
        return v in self._out

    def nodes(self) -> List[int]:
        return list(self._out)

    def edges(self) -> Iterator[Tuple[int, int, int]]:
        """Yield ``(parent, child, multiplicity)``."""
        for u, d in self._out.items():
            for v, m in d.items():
                yield u, v, m

    def num_edges(self) -> int:
        return sum(self._outdeg.values())

    def children(self, v: int) -> List[int]:
        """Distinct children of ``v``."""
        return list(self._out[v])

    def parents(self, v: int) -> List[int]:
        return list(self._in[v])

    def multiplicity(self, u: int, v: int) -> int:
        return self._out[u].get(v, 0)

    def indegree(self, v: int) -> int:
        return self._indeg[v]

    def outdegree(self, v: int) -> int:
        return self._outdeg[v]

    def kind(self, v: int) -> NodeKind:
        if v == self.root:
            return NodeKind.ROOT
        i, o = self._indeg[v], self._outdeg[v]
        if o == 0:
            return NodeKind.LEAF
        if i == 1:
            return NodeKind.TREE
        return NodeKind.RETICULATION

    def is_tree_node(self, v: int) -> bool:
        return v != self.root and self._indeg[v] == 1 and self._outdeg[v] >= 2

    def is_reticulation(self, v: int) -> bool:
        return self._indeg[v] >= 2

    def is_leaf(self, v: int) -> bool:
        return v in self._taxon

    def parent(self, v: int) -> int:
        """The single parent of a leaf or tree node."""
        return next(iter(self._in[v]))

    def child(self, v: int) -> int:
        """The single child of the root or a reticulation."""
        return next(iter(self._out[v]))

    def leaf(self, taxon) -> Optional[int]:
        return self._leaf.get(taxon)

    def taxon(self, v: int) -> Optional[Taxon]:
        return self._taxon.get(v)

    def taxa(self) -> Set[Taxon]:
        return set(self._leaf)

    def leaves(self) -> List[int]:
        return list(self._taxon)

    def reticulation_number(self) -> int:
        return sum(d - 1 for v, d in self._indeg.items() if d >= 2)

    def is_single_leaf(self) -> bool:
        return len(self._out) == 2 and len(self._leaf) == 1 and self._outdeg[self.root] == 1

    # -- validation -----------------------------------------------------------

    def validate(self) -> None:
        """Raise :class:`NetworkError` naming the first offending node."""
        if self._indeg[self.root] != 0:
            raise NetworkError("root has a parent", self.root)
        if self._outdeg[self.root] != 1:
            raise NetworkError(
                f"root must have outdegree 1, has {self._outdeg[self.root]}", self.root)
        for v in self._out:
            if v == self.root:
                continue
            i, o = self._indeg[v], self._outdeg[v]
            if i == 0:
                raise NetworkError(f"node {v} is a second source", v)
            if o == 0:
                if i != 1:
                    raise NetworkError(f"leaf {v} has indegree {i}", v)
                if v not in self._taxon:
                    raise NetworkError(f"sink {v} carries no taxon", v)
            elif v in self._taxon:
                raise NetworkError(f"labelled node {v} is not a sink", v)
            elif i == 1 and o == 1:
                raise NetworkError(f"node {v} has indegree 1 and outdegree 1", v)
            elif i >= 2 and o != 1:
                raise NetworkError(f"node {v} has indegree {i} and outdegree {o}", v)
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        indeg = dict(self._indeg)
        stack = [v for v, d in indeg.items() if d == 0]
        seen = 0
        while stack:
            u = stack.pop()
            seen += 1
            for v, m in self._out[u].items():
                indeg[v] -= m
                if indeg[v] == 0:
                    stack.append(v)
        if seen != len(self._out):
            stuck = min(v for v, d in indeg.items() if d > 0)
            raise NetworkError(f"cycle through node {stuck}", stuck)

    def topological_order(self) -> List[int]:
        indeg = dict(self._indeg)
        stack = [self.root]
        order = []
        while stack:
            u = stack.pop()
            order.append(u)
            for v, m in self._out[u].items():
                indeg[v] -= m
                if indeg[v] == 0:
                    stack.append(v)
        return order

    def relabel_nodes(self, mapping: Dict[int, int]) -> "Network":
        """Return a copy whose node ids are permuted by ``mapping``."""
        net = Network.__new__(Network)
        net.root = mapping[self.root]
        net._out = {mapping[v]: {mapping[c]: m for c, m in d.items()} for v, d in self._out.items()}
        net._in = {mapping[v]: {mapping[c]: m for c, m in d.items()} for v, d in self._in.items()}
        net._outdeg = {mapping[v]: d for v, d in self._outdeg.items()}
        net._indeg = {mapping[v]: d for v, d in self._indeg.items()}
        net._taxon = {mapping[v]: t for v, t in self._taxon.items()}
        net._leaf = {t: mapping[v] for t, v in self._leaf.items()}
        net._next = max(mapping.values()) + 1
        return net

    def __repr__(self) -> str:
        return (f"Network(n={len(self._leaf)}, r={self.reticulation_number()}, "
                f"nodes={len(self._out)})")


@dataclass(frozen=True)
class ClassReport:
    is_binary: bool
    is_semi_binary: bool
    is_stack_free: bool
    is_tree_child: bool
    n_leaves: int
    reticulation_number: int


def classify(net: Network) -> ClassReport:
    """Validate ``net`` and report its degree and topology classes in one scan."""
    net.validate()
    semi_binary = binary = stack_free = tree_child = True
    r = 0
    for v in net.nodes():
        if v == net.root or net.is_leaf(v):
            continue
        if net.is_reticulation(v):
            d = net.indegree(v)
            r += d - 1
            if d != 2:
                binary = False
            if net.is_reticulation(net.child(v)):
                stack_free = False
        else:
            if net.outdegree(v) != 2:
                semi_binary = False
            if all(net.is_reticulation(c) for c in net.children(v)):
                tree_child = False
    return ClassReport(
        is_binary=binary and semi_binary,
        is_semi_binary=semi_binary,
        is_stack_free=stack_free,
        is_tree_child=tree_child and stack_free,
        n_leaves=len(net.taxa()),
        reticulation_number=r,
    )


# -- reducible pairs ----------------------------------------------------------

def _leaf_node(net: Network, x) -> int:
    v = net.leaf(x)
    if v is None:
        raise KeyError(f"taxon {x!r} is not a leaf of the network")
    return v


def find_rp_2nd(net: Network, x) -> Set[Pair]:
    """All reducible pairs with ``x`` as second coordinate.

    On semi-binary networks this walks at most two nodes and returns at most
    one pair.
    """
    # hot path of the containment kernel: read the adjacency dicts directly
    vx = _leaf_node(net, x)
    (p,) = net._in[vx]
    found = set()
    if p == net.root or net._indeg[p] != 1:
        return found
    taxon, out, indeg = net._taxon, net._out, net._indeg
    for c in out[p]:
        if c == vx:
            continue
        t = taxon.get(c)
        if t is None and indeg[c] >= 2:
            (cc,) = out[c]
            t = taxon.get(cc)
        if t is not None:
            found.add(Pair(t, x))
    return found


def find_rc_1st(net: Network, x) -> Set[Pair]:
    """All reticulated cherries with ``x`` as first coordinate, in O(indegree(parent(x)))."""
    vx = _leaf_node(net, x)
    (p,) = net._in[vx]
    found = set()
    if net._indeg[p] < 2:
        return found
    taxon, out = net._taxon, net._out
    for g in net._in[p]:
        if not net.is_tree_node(g):
            continue
        for c in out[g]:
            if c != p:
                t = taxon.get(c)
                if t is not None:
                    found.add(Pair(x, t))
    return found


def _locate(net: Network, p) -> Tuple[Optional[PairKind], int, int]:
    """Kind of ``p`` plus the parents of its two leaves (-1 when absent)."""
    vx = net._leaf.get(p[0])
    vy = net._leaf.get(p[1])
    if vx is None or vy is None:
        return None, -1, -1
    (px,) = net._in[vx]
    (py,) = net._in[vy]
    if px == py:
        return PairKind.CHERRY, px, py
    if net._indeg[px] >= 2 and px in net._out[py] and net.is_tree_node(py):
        return PairKind.RETICULATED, px, py
    return None, px, py


def pair_kind(net: Network, p: Pair) -> Optional[PairKind]:
    """Classify ``p`` in ``net``: cherry, reticulated cherry, or None."""
    return _locate(net, p)[0]


def reduce_pair(net: Network, p: Pair) -> Optional[PairKind]:
    """Reduce ``p`` in place; return what was reduced, or None for a no-op."""
    kind, px, py = _locate(net, p)
    if kind is PairKind.CHERRY:
        net.remove_node(net._leaf[p[0]])
        if net._outdeg[px] == 1 and px != net.root:
            net.suppress(px)
    elif kind is PairKind.RETICULATED:
        net.remove_edge(py, px)
        if net._indeg[px] == 1:
            net.suppress(px)
        if net._outdeg[py] == 1:
            net.suppress(py)
    return kind


def all_reducible_pairs(net: Network) -> Dict[Pair, PairKind]:
    """Every cherry and reticulated cherry of ``net`` with its kind."""
    found: Dict[Pair, PairKind] = {}
    for x in net.taxa():
        for p in find_rp_2nd(net, x):
            found[p] = pair_kind(net, p)
    return found
