"""Growing networks by adding pairs, and building a network from a whole sequence.

A pair ``(x, y)`` is added as a cherry when ``x`` is not yet a leaf and as a
reticulated cherry otherwise. Each case has optional contractions, which
together give eight construction classes named ``1a2a`` ... ``1b2d``:

* ``1a`` keeps the new parent of ``y``; ``1b`` merges it into the old parent
  when that parent is a tree node.
* ``2a`` keeps both new nodes; ``2b`` merges the new node above ``x`` into an
  existing reticulation; ``2c`` merges the new node above ``y`` into an
  existing tree node; ``2d`` does both.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .network import Network, NetworkError, Pair, pair
from .sequences import Sequence, cps_violation


class NotACPS(ValueError):
    """Raised when a sequence fails the cherry-picking rule."""

    def __init__(self, index: int):
        super().__init__(f"pair {index} breaks the cherry-picking condition")
        self.index = index


_CHERRY_RULES = ("1a", "1b")
_RET_RULES = ("2a", "2b", "2c", "2d")
_RECONSTRUCTIBLE = {("1a", "2a"), ("1a", "2b"), ("1b", "2c"), ("1b", "2d")}


@dataclass(frozen=True)
class CpnClass:
    cherry_rule: str = "1a"
    ret_cherry_rule: str = "2a"

    def __post_init__(self):
        if self.cherry_rule not in _CHERRY_RULES or self.ret_cherry_rule not in _RET_RULES:
            raise ValueError(f"unknown class {self.cherry_rule}{self.ret_cherry_rule}")

    @classmethod
    def parse(cls, name: str) -> "CpnClass":
        name = name.strip().replace(",", "").replace("(", "").replace(")", "")
        if len(name) != 4:
            raise ValueError(f"unknown class {name!r}")
        return cls(name[:2], name[2:])

    @property
    def name(self) -> str:
        return self.cherry_rule + self.ret_cherry_rule

    @property
    def reconstructible(self) -> bool:
        return (self.cherry_rule, self.ret_cherry_rule) in _RECONSTRUCTIBLE

    @property
    def merges_cherry_parent(self) -> bool:
        return self.cherry_rule == "1b"

    @property
    def merges_reticulation(self) -> bool:
        return self.ret_cherry_rule in ("2b", "2d")

    @property
    def merges_tree_parent(self) -> bool:
        return self.ret_cherry_rule in ("2c", "2d")

    def __str__(self) -> str:
        return self.name


ALL_CLASSES = tuple(CpnClass(a, b) for a in _CHERRY_RULES for b in _RET_RULES)
RECONSTRUCTIBLE_CLASSES = tuple(c for c in ALL_CLASSES if c.reconstructible)


def is_reconstructible(cls) -> bool:
    if isinstance(cls, str):
        cls = CpnClass.parse(cls)
    return cls.reconstructible


def _subdivide_above(net: Network, leaf: int) -> int:
    parent = net.parent(leaf)
    net.remove_edge(parent, leaf)
    mid = net.add_node()
    net.add_edge(parent, mid)
    net.add_edge(mid, leaf)
    return mid


def add_pair(net: Network, p, cls: CpnClass, inplace: bool = False) -> Network:
    """Add ``p`` to ``net`` under the rules of ``cls``."""
    if isinstance(cls, str):
        cls = CpnClass.parse(cls)
    p = p if isinstance(p, Pair) else pair(*p)
    x, y = p
    vy = net.leaf(y)
    if vy is None:
        raise NetworkError(f"second coordinate {y!r} is not a leaf")
    if not inplace:
        net = net.copy()
    vx = net.leaf(x)
    py = net.parent(vy)
    if vx is None:
        vx = net.add_leaf(x)
        if cls.merges_cherry_parent and net.is_tree_node(py):
            net.add_edge(py, vx)
        else:
            net.add_edge(_subdivide_above(net, vy), vx)
        return net
    px = net.parent(vx)
    merge_x = cls.merges_reticulation and net.is_reticulation(px)
    merge_y = cls.merges_tree_parent and net.is_tree_node(py)
    head = px if merge_x else _subdivide_above(net, vx)
    tail = py if merge_y else _subdivide_above(net, vy)
    net.add_edge(tail, head)
    return net


def build_from_cps(seq, cls, seed_taxon: Optional[str] = None) -> Network:
    """The network of class ``cls`` reduced by ``seq``, built back to front."""
    if isinstance(cls, str):
        cls = CpnClass.parse(cls)
    seq = Sequence(seq)
    bad = cps_violation(seq)
    if bad is not None:
        raise NotACPS(bad)
    if not seq:
        if seed_taxon is None:
            raise ValueError("an empty sequence needs a seed taxon")
        return Network.single_leaf(seed_taxon)
    net = Network.single_leaf(seq[-1][1])
    for p in reversed(seq):
        add_pair(net, p, cls, inplace=True)
    return net
