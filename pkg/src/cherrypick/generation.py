"""Random tree-child sequences, random sub-sequences and containment instances.

Randomness comes from ``numpy.random.Generator`` (PCG64). The draw protocol
is fixed so sequences can be reproduced from a seed alone:

``random_tcs``
    per step, in order: one ``rng.random()`` for the leaf/reticulation choice
    (only when both are possible; leaf iff the draw is below L/(L+R)); for a
    reticulation step one ``rng.integers(len(nf))`` indexing the non-forbidden
    list; one ``rng.integers(k - 1)`` picking the second taxon among the ``k``
    current taxa ``1..k`` with the first taxon skipped. The non-forbidden list
    starts as ``["2"]``, appends new taxa, and removes by swapping in the last
    element.

``random_sub_tcs``
    for each first-coordinate taxon in natural order, one
    ``rng.integers(len(indices))``; then one ``rng.choice(rest, r_prime,
    replace=False)`` over the remaining indices in increasing order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .algorithms import natural_key
from .construction import CpnClass, build_from_cps
from .network import Network, Pair
from .sequences import Sequence, check_tcs

TREE_CHILD_CLASS = CpnClass("1a", "2b")
BINARY_CLASS = CpnClass("1a", "2a")

KIND_CODES = {"yes": 1, "no": 0}


class GenerationError(RuntimeError):
    """Random generation reached a state with no admissible move."""


class _SwapList:
    """List with O(1) membership, append and removal (order changes on removal)."""

    def __init__(self, items=()):
        self.items: List[str] = []
        self.pos: Dict[str, int] = {}
        for t in items:
            self.add(t)

    def __len__(self):
        return len(self.items)

    def add(self, t: str) -> None:
        if t not in self.pos:
            self.pos[t] = len(self.items)
            self.items.append(t)

    def discard(self, t: str) -> None:
        i = self.pos.pop(t, None)
        if i is None:
            return
        last = self.items.pop()
        if last != t:
            self.items[i] = last
            self.pos[last] = i


def random_tcs(n: int, r: int, rng: np.random.Generator, binary: bool = False) -> Sequence:
    """A random tree-child sequence on taxa ``"1".."n"`` with ``r`` reticulations.

    It always ends with ``(2,1)`` and has length ``n + r - 1``. With
    ``binary=True`` a taxon used as the first coordinate of a reticulated pair
    leaves the non-forbidden set, so the network built under ``1a2a`` is
    binary tree-child; that variant can run out of moves and then raises
    :class:`GenerationError`.
    """
    if n < 2:
        raise ValueError("need at least two taxa")
    if r < 0:
        raise ValueError("reticulation number must be non-negative")
    k = 2
    pairs: List[Pair] = [Pair("2", "1")]
    leaves_left, retics_left = n - 2, r
    nf = _SwapList(["2"])
    while leaves_left > 0 or retics_left > 0:
        if len(nf) and leaves_left > 0 and retics_left > 0:
            add_leaf = rng.random() < leaves_left / (leaves_left + retics_left)
        elif len(nf) and retics_left > 0:
            add_leaf = False
        elif leaves_left > 0:
            add_leaf = True
        else:
            raise GenerationError("no non-forbidden taxon left for a reticulation")
        if add_leaf:
            k += 1
            first = str(k)
            leaves_left -= 1
            nf.add(first)
            fi = k - 1
        else:
            first = nf.items[int(rng.integers(len(nf)))]
            retics_left -= 1
            fi = int(first) - 1
        j = int(rng.integers(k - 1))
        second = str((j if j < fi else j + 1) + 1)
        if binary and not add_leaf:
            nf.discard(first)
        nf.discard(second)
        pairs.append(Pair(first, second))
    pairs.reverse()
    return Sequence(pairs)


def random_cps(n: int, r: int, rng: np.random.Generator) -> Sequence:
    """A random cherry-picking sequence on ``"1".."n"`` of length ``n + r - 1``.

    Built back to front like :func:`random_tcs` but without the tree-child
    restriction: a reticulated pair may start at any current taxon.
    """
    if n < 1 or r < 0 or (n == 1 and r > 0):
        raise ValueError("need n >= 2, or n == 1 with r == 0")
    if n == 1:
        return Sequence()
    k = 2
    pairs: List[Pair] = [Pair("2", "1")]
    leaves_left, retics_left = n - 2, r
    while leaves_left > 0 or retics_left > 0:
        add_leaf = rng.random() < leaves_left / (leaves_left + retics_left)
        if add_leaf:
            k += 1
            leaves_left -= 1
            fi = k - 1
        else:
            retics_left -= 1
            fi = int(rng.integers(k))
        j = int(rng.integers(k - 1))
        pairs.append(Pair(str(fi + 1), str((j if j < fi else j + 1) + 1)))
    pairs.reverse()
    return Sequence(pairs)


def random_sub_tcs(s, r_prime: int, rng: np.random.Generator) -> Sequence:
    """A random sub-sequence keeping one pair per first-coordinate taxon plus ``r_prime`` extras."""
    s = Sequence(s)
    if not check_tcs(s):
        raise ValueError("input is not a tree-child sequence")
    by_first: Dict[str, List[int]] = {}
    for i, (x, _) in enumerate(s):
        by_first.setdefault(x, []).append(i)
    chosen = set()
    for x in sorted(by_first, key=natural_key):
        idx = by_first[x]
        chosen.add(idx[int(rng.integers(len(idx)))])
    rest = [i for i in range(len(s)) if i not in chosen]
    if not 0 <= r_prime <= len(rest):
        raise ValueError(f"r_prime must lie in [0, {len(rest)}]")
    if r_prime:
        chosen.update(int(i) for i in rng.choice(rest, size=r_prime, replace=False))
    return Sequence(s[i] for i in sorted(chosen))


def instance_seed(base_seed: int, n: int, r: int, r_prime: int, kind: str,
                  replicate: int = 0) -> int:
    """Stable 64-bit seed mixed from the instance coordinates."""
    ss = np.random.SeedSequence([base_seed, n, r, r_prime, KIND_CODES[kind], replicate])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class Instance:
    big: Network
    small: Network
    kind: str
    n: int
    r: int
    r_prime: int
    seed: int
    big_seq: Sequence = field(repr=False, default_factory=Sequence)
    small_seq: Sequence = field(repr=False, default_factory=Sequence)


def instance_sequences(n: int, r: int, r_prime: int, kind: str, base_seed: int = 0,
                       replicate: int = 0, binary: bool = False):
    """The seed and the two sequences behind :func:`make_instance`, without building networks."""
    if kind not in KIND_CODES:
        raise ValueError(f"kind must be 'yes' or 'no', not {kind!r}")
    if not 0 <= r_prime <= r:
        raise ValueError("need 0 <= r_prime <= r")
    seed = instance_seed(base_seed, n, r, r_prime, kind, replicate)
    rng = np.random.default_rng(seed)
    big_seq = random_tcs(n, r, rng, binary=binary)
    if kind == "yes":
        small_seq = random_sub_tcs(big_seq, r_prime, rng)
    else:
        small_seq = random_tcs(n, r_prime, rng, binary=binary)
    return seed, big_seq, small_seq


def make_instance(n: int, r: int, r_prime: int, kind: str, base_seed: int = 0,
                  replicate: int = 0, binary: bool = False) -> Instance:
    """A containment instance: ``yes`` keeps a random sub-sequence, ``no`` draws an independent network."""
    seed, big_seq, small_seq = instance_sequences(n, r, r_prime, kind, base_seed, replicate, binary)
    cls = BINARY_CLASS if binary else TREE_CHILD_CLASS
    big = build_from_cps(big_seq, cls)
    small = build_from_cps(small_seq, cls)
    if small.taxa() != big.taxa():
        raise GenerationError("sub-sequence lost a taxon")
    return Instance(big, small, kind, n, r, r_prime, seed, big_seq, small_seq)
