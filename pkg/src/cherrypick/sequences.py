"""Cherry-picking sequences: syntax checks and their action on networks."""
from __future__ import annotations

from typing import Iterable, List, Optional, Tuple

from .network import Network, Pair, pair, reduce_pair


class Sequence(tuple):
    """Immutable sequence of :class:`Pair` with 1-based helpers."""

    def __new__(cls, pairs: Iterable = ()):
        items = []
        for p in pairs:
            items.append(p if isinstance(p, Pair) else pair(*p))
        return super().__new__(cls, items)

    def pair(self, i: int) -> Pair:
        """The ``i``-th pair, counting from 1."""
        if not 1 <= i <= len(self):
            raise IndexError(i)
        return self[i - 1]

    def prefix(self, i: int) -> "Sequence":
        """The first ``i`` pairs."""
        return Sequence(tuple.__getitem__(self, slice(0, i)))

    def suffix(self, i: int) -> "Sequence":
        """Everything after the first ``i`` pairs."""
        return Sequence(tuple.__getitem__(self, slice(i, None)))

    def __add__(self, other) -> "Sequence":
        return Sequence(tuple(self) + tuple(Sequence(other)))

    def taxa(self) -> set:
        return {t for p in self for t in p}

    def __repr__(self) -> str:
        return "Sequence(" + ",".join(repr(p) for p in self) + ")"


def cps_violation(seq: Sequence) -> Optional[int]:
    """1-based index of the first pair breaking the CPS rule, or None."""
    seq = Sequence(seq)
    if not seq:
        return None
    survivor = seq[-1][1]
    later_firsts: set = set()
    bad = None
    # walk backwards so later first coordinates are known
    for i in range(len(seq) - 1, -1, -1):
        x, y = seq[i]
        if y != survivor and y not in later_firsts:
            bad = i + 1
        later_firsts.add(x)
    return bad


def check_cps(seq) -> bool:
    return cps_violation(seq) is None


def tcs_violation(seq) -> Optional[int]:
    """1-based index of the first pair whose first coordinate reappears later as a second."""
    seq = Sequence(seq)
    later_seconds: set = set()
    bad = None
    for i in range(len(seq) - 1, -1, -1):
        x, y = seq[i]
        if x in later_seconds:
            bad = i + 1
        later_seconds.add(y)
    return bad


def check_tcs(seq) -> bool:
    return check_cps(seq) and tcs_violation(seq) is None


def apply(net: Network, seq, trace: Optional[List[bool]] = None, inplace: bool = False) -> Network:
    """Reduce ``net`` by every pair of ``seq`` in order.

    When ``trace`` is a list, one flag per pair is appended telling whether
    that step changed the network.
    """
    if not inplace:
        net = net.copy()
    for p in Sequence(seq):
        changed = reduce_pair(net, p) is not None
        if trace is not None:
            trace.append(changed)
    return net


def active_steps(net: Network, seq) -> List[bool]:
    trace: List[bool] = []
    apply(net, seq, trace)
    return trace


def is_fully_reduced(net: Network) -> bool:
    return net.is_single_leaf()


def cps_reduces_network(net: Network, seq, inplace: bool = False) -> bool:
    return is_fully_reduced(apply(net, seq, inplace=inplace))


def is_minimal_for(net: Network, seq) -> bool:
    trace: List[bool] = []
    out = apply(net, seq, trace)
    return is_fully_reduced(out) and all(trace)


def surviving_taxon(net: Network) -> Optional[str]:
    """The leaf left over in a single-leaf network, else None."""
    if not is_fully_reduced(net):
        return None
    return next(iter(net.taxa()))


def as_tuples(seq) -> List[Tuple[str, str]]:
    return [tuple(p) for p in Sequence(seq)]
