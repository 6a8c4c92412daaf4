"""Linear-time containment for tree-child networks and canonical smallest sequences."""
from __future__ import annotations

import heapq
import re
from collections import deque
from typing import Callable, Dict, Iterable, List, Optional, Sequence as Seq

from .construction import CpnClass
from .network import (ClassReport, Network, Pair, PairKind, classify, find_rc_1st,
                      find_rp_2nd, pair_kind, reduce_pair)
from .sequences import Sequence, cps_reduces_network


class PreconditionError(ValueError):
    """Input outside the class an algorithm is specified for."""

    def __init__(self, message: str, report: Optional[ClassReport] = None):
        super().__init__(message)
        self.report = report


class NotCPN(ValueError):
    """The network cannot be fully reduced by any sequence."""


# -- taxon orders ---------------------------------------------------------------

_RUN = re.compile(r"(\d+)")


def natural_key(taxon: str):
    """Sort key comparing digit runs numerically, so ``"2" < "10"``."""
    parts = _RUN.split(taxon)
    key = []
    for i, part in enumerate(parts):
        if i % 2:
            key.append((0, int(part), part))
        elif part:
            key.append((1, 0, part))
    return tuple(key)


class TaxonOrder:
    """A total order on taxa; natural order unless an explicit ranking is given."""

    def __init__(self, ranking: Optional[Iterable] = None):
        self._rank: Optional[Dict[str, int]] = None
        if ranking is not None:
            ranking = [str(t) for t in ranking]
            if len(set(ranking)) != len(ranking):
                raise ValueError("taxon order lists a taxon twice")
            self._rank = {t: i for i, t in enumerate(ranking)}

    def key(self, taxon: str):
        if self._rank is None:
            return natural_key(taxon)
        try:
            return self._rank[taxon]
        except KeyError:
            raise PreconditionError(f"taxon {taxon!r} missing from the order") from None

    def pair_key(self, p: Pair):
        return (self.key(p[0]), self.key(p[1]))

    def covers(self, taxa: Iterable[str]) -> bool:
        return self._rank is None or all(t in self._rank for t in taxa)

    def sorted(self, taxa: Iterable[str]) -> List[str]:
        return sorted(taxa, key=self.key)


DEFAULT_ORDER = TaxonOrder()


# -- worklist ---------------------------------------------------------------------

class ReduciblePairSet:
    """Set of pairs with a pop policy: ``fifo``, ``min`` (under a taxon order) or ``random``.

    Removal is lazy for ``fifo`` and ``min``: entries stay in the backing
    queue and are skipped at pop time if no longer members.
    """

    def __init__(self, policy: str = "fifo", order: TaxonOrder = DEFAULT_ORDER, rng=None):
        if policy not in ("fifo", "min", "random"):
            raise ValueError(f"unknown policy {policy!r}")
        if policy == "random" and rng is None:
            raise ValueError("random policy needs an rng")
        self.policy = policy
        self._order = order
        self._rng = rng
        self._members: set = set()
        self._queue: deque = deque()
        self._heap: list = []
        self._items: List[Pair] = []
        self._pos: Dict[Pair, int] = {}

    def __len__(self) -> int:
        return len(self._members)

    def __bool__(self) -> bool:
        return bool(self._members)

    def __contains__(self, p) -> bool:
        return p in self._members

    def __iter__(self):
        return iter(set(self._members))

    def add(self, p: Pair) -> None:
        if p in self._members:
            return
        self._members.add(p)
        if self.policy == "fifo":
            self._queue.append(p)
        elif self.policy == "min":
            heapq.heappush(self._heap, (self._order.pair_key(p), p))
        else:
            self._pos[p] = len(self._items)
            self._items.append(p)

    def update(self, pairs: Iterable[Pair]) -> None:
        for p in pairs:
            self.add(p)

    def discard(self, p: Pair) -> None:
        if p not in self._members:
            return
        self._members.discard(p)
        if self.policy == "random":
            i = self._pos.pop(p)
            last = self._items.pop()
            if last != p:
                self._items[i] = last
                self._pos[last] = i

    def pop(self) -> Pair:
        if not self._members:
            raise KeyError("pop from an empty pair set")
        if self.policy == "fifo":
            while True:
                p = self._queue.popleft()
                if p in self._members:
                    break
        elif self.policy == "min":
            while True:
                _, p = heapq.heappop(self._heap)
                if p in self._members:
                    break
        else:
            p = self._items[int(self._rng.integers(len(self._items)))]
            self.discard(p)
            return p
        self._members.discard(p)
        return p


# -- tree-child sequences -------------------------------------------------------

def _require_tree_child(net: Network, what: str) -> ClassReport:
    report = classify(net)
    if not (report.is_semi_binary and report.is_tree_child):
        raise PreconditionError(f"{what} must be semi-binary and tree-child", report)
    return report


def find_tcs(net: Network, rng=None, inplace: bool = False, check: bool = True,
             policy: Optional[str] = None) -> Sequence:
    """A minimal tree-child sequence for a semi-binary tree-child network.

    The worklist is FIFO over a natural-order initial scan; pass ``rng`` (a
    numpy Generator) to pick pairs at random instead.
    """
    if check:
        _require_tree_child(net, "network")
    work = net if inplace else net.copy()
    if policy is None:
        policy = "fifo" if rng is None else "random"
    pending = ReduciblePairSet(policy, rng=rng)
    for x in DEFAULT_ORDER.sorted(work.taxa()):
        pending.update(find_rp_2nd(work, x))
    out: List[Pair] = []
    while pending:
        p = pending.pop()
        kind = reduce_pair(work, p)
        if kind is None:
            raise RuntimeError(f"worklist held the stale pair {p}")
        out.append(p)
        x, y = p
        if kind is PairKind.CHERRY:
            pending.discard(Pair(y, x))
        pending.update(find_rp_2nd(work, y))
        pending.update(find_rc_1st(work, y))
    if not work.is_single_leaf():
        raise NotCPN("network was not fully reduced")
    return Sequence(out)


def tcn_contains(big: Network, small: Network, inplace: bool = False, check: bool = True) -> bool:
    """Whether ``small`` is contained in ``big``; both semi-binary tree-child on one leaf set."""
    if check:
        if big.taxa() != small.taxa():
            raise PreconditionError("networks must have the same leaf set")
        _require_tree_child(big, "first network")
        _require_tree_child(small, "second network")
    seq = find_tcs(big, inplace=inplace, check=False)
    return cps_reduces_network(small, seq, inplace=inplace)


# -- smallest sequences ---------------------------------------------------------

VARIANTS = ("semibinary_stackfree", "binary", "nonbinary")

_VARIANT_FOR_CLASS = {
    "1a2a": "binary",
    "1a2b": "semibinary_stackfree",
    "1b2c": "nonbinary",
    "1b2d": "nonbinary",
}


def variant_for_class(cls) -> str:
    name = cls if isinstance(cls, str) else cls.name
    try:
        return _VARIANT_FOR_CLASS[name]
    except KeyError:
        raise PreconditionError(f"class {name} is not reconstructible") from None


def _check_variant(net: Network, variant: str) -> None:
    report = classify(net)
    if variant == "binary" and not report.is_binary:
        raise PreconditionError("binary variant needs a binary network", report)
    if variant == "semibinary_stackfree" and not (report.is_semi_binary and report.is_stack_free):
        raise PreconditionError("network must be semi-binary and stack-free", report)
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")


def pairs_touching(net: Network, leaf: str) -> set:
    """Every reducible pair that has ``leaf`` in either coordinate."""
    found = find_rp_2nd(net, leaf)
    found |= find_rc_1st(net, leaf)
    p = net.parent(net.leaf(leaf))
    for c in net.children(p):
        t = net.taxon(c)
        if t is not None and t != leaf:
            found.add(Pair(leaf, t))
    return found


def smallest_cps(net: Network, order: Optional[TaxonOrder] = None,
                 variant: str = "semibinary_stackfree", check: bool = True) -> Sequence:
    """The lexicographically smallest minimal cherry-picking sequence of ``net``.

    Always reduces the smallest available pair. After each reduction only
    pairs touching the two reduced leaves are rescanned; entries that went
    stale elsewhere are dropped when popped.
    """
    order = order or DEFAULT_ORDER
    if check:
        _check_variant(net, variant)
        if not order.covers(net.taxa()):
            raise PreconditionError("taxon order does not cover every leaf")
    work = net.copy()
    pending = ReduciblePairSet("min", order=order)
    for x in work.taxa():
        pending.update(find_rp_2nd(work, x))
    out: List[Pair] = []
    while pending:
        p = pending.pop()
        kind = reduce_pair(work, p)
        if kind is None:
            continue
        out.append(p)
        x, y = p
        pending.update(pairs_touching(work, y))
        if work.leaf(x) is not None:
            pending.update(pairs_touching(work, x))
    if not work.is_single_leaf():
        raise NotCPN("network is not cherry-picking")
    return Sequence(out)


def greedy_reduction(net: Network, choose: Callable[[List[Pair]], Pair],
                     first: Optional[Pair] = None) -> Sequence:
    """Reduce by repeatedly choosing among all current reducible pairs.

    Slow reference procedure (full rescan per step); ``first`` forces the
    opening pair.
    """
    from .network import all_reducible_pairs

    work = net.copy()
    out: List[Pair] = []
    if first is not None:
        if reduce_pair(work, first) is None:
            raise ValueError(f"{first} is not reducible")
        out.append(first)
    while True:
        pairs = sorted(all_reducible_pairs(work), key=DEFAULT_ORDER.pair_key)
        if not pairs:
            break
        p = choose(pairs)
        reduce_pair(work, p)
        out.append(p)
    return Sequence(out)


# -- isomorphism --------------------------------------------------------------------

_STRUCTURE = {
    "1a2a": lambda net, rep: rep.is_binary,
    "1a2b": lambda net, rep: rep.is_semi_binary and rep.is_stack_free,
    "1b2c": lambda net, rep: _max_indegree(net) <= 2 and not _has_tt_edge(net),
    "1b2d": lambda net, rep: rep.is_stack_free and not _has_tt_edge(net),
}


def _max_indegree(net: Network) -> int:
    return max(net.indegree(v) for v in net.nodes())


def _has_tt_edge(net: Network) -> bool:
    return any(net.is_tree_node(u) and net.is_tree_node(v) for u, v, _ in net.edges())


def _has_rr_edge(net: Network) -> bool:
    return any(net.is_reticulation(u) and net.is_reticulation(v) for u, v, _ in net.edges())


def fits_class_structure(net: Network, cls) -> bool:
    """Degree and edge-type profile expected of a reconstructible class."""
    name = cls if isinstance(cls, str) else cls.name
    if name not in _STRUCTURE:
        raise PreconditionError(f"class {name} is not reconstructible")
    return _STRUCTURE[name](net, classify(net))


def isomorphic(a: Network, b: Network, mode: str = "treechild",
               cls=None, order: Optional[TaxonOrder] = None) -> bool:
    """Decide whether two networks are the same up to node ids.

    ``treechild``: both semi-binary tree-child; a tree-child sequence of ``a``
    must reduce ``b`` and the reticulation numbers must agree.
    ``class``: both in the reconstructible class ``cls``; compare smallest
    sequences. A second network that is not cherry-picking is reported as
    not isomorphic.
    """
    if a.taxa() != b.taxa():
        return False
    if mode == "treechild":
        _require_tree_child(a, "first network")
        _require_tree_child(b, "second network")
        if a.reticulation_number() != b.reticulation_number():
            return False
        return tcn_contains(a, b, check=False)
    if mode != "class":
        raise ValueError(f"unknown isomorphism mode {mode!r}")
    if cls is None:
        raise ValueError("class mode needs a class")
    if isinstance(cls, str):
        cls = CpnClass.parse(cls)
    variant = variant_for_class(cls)
    for which, net in (("first", a), ("second", b)):
        if not fits_class_structure(net, cls):
            raise PreconditionError(f"{which} network does not fit class {cls.name}")
    sa = smallest_cps(a, order, variant)
    try:
        sb = smallest_cps(b, order, variant)
    except NotCPN:
        return False
    return sa == sb
