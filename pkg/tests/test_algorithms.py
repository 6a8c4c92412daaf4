import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from cherrypick import (
    RECONSTRUCTIBLE_CLASSES,
    Network,
    Pair,
    PreconditionError,
    ReduciblePairSet,
    Sequence,
    TaxonOrder,
    all_reducible_pairs,
    apply,
    reduce_pair,
    build_from_cps,
    check_tcs,
    cps_reduces_network,
    find_tcs,
    is_minimal_for,
    isomorphic,
    smallest_cps,
    tcn_contains,
)
from cherrypick.algorithms import NotCPN, natural_key, variant_for_class
from cherrypick.generation import GenerationError, random_sub_tcs, random_tcs
from cherrypick.oracle import (
    _state_key,
    containment_bruteforce,
    enumerate_all_minimal_cps,
    labeled_iso,
    subnetwork_bruteforce,
)
from helpers import load, random_cpn, random_tree_child, shuffled

seeds = st.integers(0, 2**32 - 1)
CONTAIN_TCS = Sequence([("2", "1"), ("3", "4"), ("3", "1"), ("3", "4"), ("1", "4")])


def cherry():
    return Network.from_edges([("r", "p"), ("p", 1), ("p", 2)])


def lexmin(net, order):
    """Exhaustive lexicographic minimum over all reduction paths, memoized by state."""
    memo = {}

    def best(state):
        if state.is_single_leaf():
            return ()
        key = _state_key(state)
        if key not in memo:
            options = []
            for p in all_reducible_pairs(state):
                nxt = state.copy()
                reduce_pair(nxt, p)
                options.append((p,) + best(nxt))
            memo[key] = min(options, key=lambda s: [order.pair_key(q) for q in s])
        return memo[key]

    return Sequence(best(net))


# -- orders and worklists


def test_natural_order():
    assert sorted(["10", "2", "b", "a1", "a10", "a2"], key=natural_key) == \
        ["2", "10", "a1", "a2", "a10", "b"]


def test_explicit_order():
    order = TaxonOrder(["3", "1", "2"])
    assert order.sorted(["1", "2", "3"]) == ["3", "1", "2"]
    assert not order.covers(["4"])
    with pytest.raises(ValueError):
        TaxonOrder(["1", "1"])


def test_fifo_worklist():
    ps = ReduciblePairSet("fifo")
    ps.update([Pair("3", "1"), Pair("1", "2"), Pair("3", "1")])
    ps.discard(Pair("3", "1"))
    ps.add(Pair("2", "4"))
    assert len(ps) == 2 and [ps.pop(), ps.pop()] == [Pair("1", "2"), Pair("2", "4")]
    with pytest.raises(KeyError):
        ps.pop()


def test_min_worklist():
    ps = ReduciblePairSet("min", order=TaxonOrder(["2", "1", "3"]))
    ps.update([Pair("1", "3"), Pair("2", "3"), Pair("1", "2")])
    ps.discard(Pair("2", "3"))
    assert [ps.pop(), ps.pop()] == [Pair("1", "2"), Pair("1", "3")]


def test_random_worklist_pops_everything_once():
    ps = ReduciblePairSet("random", rng=np.random.default_rng(0))
    items = {Pair(str(i), str(i + 1)) for i in range(20)}
    ps.update(items)
    ps.discard(Pair("0", "1"))
    got = [ps.pop() for _ in range(19)]
    assert set(got) == items - {Pair("0", "1")} and not ps


# -- tree-child sequences and containment


def test_find_tcs_cherry():
    assert find_tcs(cherry()) in (Sequence([("1", "2")]), Sequence([("2", "1")]))


def test_find_tcs_rejects_non_tree_child():
    with pytest.raises(PreconditionError):
        find_tcs(load("counter_net"))
    with pytest.raises(PreconditionError):
        find_tcs(load("contain_big"))


def test_fixture_containment_without_subnetwork():
    big, small = load("contain_big"), load("contain_small")
    assert check_tcs(CONTAIN_TCS) and is_minimal_for(big, CONTAIN_TCS)
    assert cps_reduces_network(small, CONTAIN_TCS)
    assert containment_bruteforce(big, small)
    assert not subnetwork_bruteforce(big, small)


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(2, 9), st.integers(0, 6))
def test_find_tcs_is_minimal(seed, n, r):
    rng = np.random.default_rng(seed)
    net = build_from_cps(random_tcs(n, r, rng), "1a2b")
    for kw in ({}, {"rng": rng}):
        seq = find_tcs(net, **kw)
        assert check_tcs(seq) and is_minimal_for(net, seq)
        assert len(seq) == n + r - 1


def test_find_tcs_six_three():
    rng = np.random.default_rng(1)
    for _ in range(20):
        net = build_from_cps(random_tcs(6, 3, rng), "1a2b")
        seq = find_tcs(net)
        assert len(seq) == 8 and cps_reduces_network(net, seq)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_containment_kernel_matches_oracles(seed):
    rng = np.random.default_rng(seed)
    n, r = int(rng.integers(2, 7)), int(rng.integers(0, 4))
    big_seq = random_tcs(n, r, rng)
    small_seq = (random_sub_tcs(big_seq, int(rng.integers(0, r + 1)), rng) if rng.random() < 0.5
                 else random_tcs(n, int(rng.integers(0, r + 1)), rng))
    big, small = build_from_cps(big_seq, "1a2b"), build_from_cps(small_seq, "1a2b")
    fast = tcn_contains(big, small)
    assert fast == subnetwork_bruteforce(big, small) == containment_bruteforce(big, small)
    assert tcn_contains(big, big)
    if fast:
        for _ in range(5):
            assert cps_reduces_network(small, find_tcs(big, rng=rng))


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(RECONSTRUCTIBLE_CLASSES[:2]))
def test_reduction_implies_containment(seed, cls):
    rng = np.random.default_rng(seed)
    n, r = int(rng.integers(2, 6)), int(rng.integers(0, 3))
    try:
        seq = random_tcs(n, r, rng, binary=cls.name == "1a2a")
    except GenerationError:
        assume(False)
    sub = random_sub_tcs(seq, int(rng.integers(0, r + 1)), rng)
    big, small = build_from_cps(seq, cls), build_from_cps(sub, cls)
    assert cps_reduces_network(small, seq)
    assert containment_bruteforce(big, small)


def test_containment_preconditions():
    with pytest.raises(PreconditionError):
        tcn_contains(cherry(), Network.from_edges([("r", "p"), ("p", 1), ("p", 3)]))
    with pytest.raises(PreconditionError):
        tcn_contains(load("counter_net"), load("counter_net"))


# -- smallest sequences and isomorphism


def test_smallest_fixture():
    got = smallest_cps(load("smallest"), TaxonOrder("12345"), variant="nonbinary")
    assert got == Sequence([("1", "2"), ("3", "2"), ("3", "4"), ("4", "5"), ("2", "5")])


def test_smallest_cherry():
    assert smallest_cps(cherry()) == Sequence([("1", "2")])


def test_smallest_sees_reversed_cherry():
    net = Network.from_edges([("r", "a"), ("a", "b"), ("a", 3), ("b", 1), ("b", 2)])
    assert smallest_cps(net) == Sequence([("1", "2"), ("2", "3")])


def test_smallest_preconditions():
    with pytest.raises(PreconditionError):
        smallest_cps(Network.from_edges([("r", "p"), ("p", 1), ("p", 2), ("p", 3)]),
                     variant="binary")
    with pytest.raises(PreconditionError):
        smallest_cps(cherry(), TaxonOrder(["1"]))
    with pytest.raises(ValueError):
        smallest_cps(cherry(), variant="weird")


def test_smallest_rejects_non_cherry_picking():
    # two reticulations whose parents are only each other's siblings
    net = Network.from_edges([
        ("r", "t"), ("t", "a"), ("t", "b"), ("a", "h1"), ("a", "h2"), ("b", "h1"), ("b", "h2"),
        ("h1", "x1"), ("h2", "x2"), ("x1", 1), ("x1", 2), ("x2", 3), ("x2", 4),
    ])
    with pytest.raises(NotCPN):
        smallest_cps(net, variant="nonbinary")


@settings(max_examples=120, deadline=None)
@given(seeds, st.sampled_from(RECONSTRUCTIBLE_CLASSES))
def test_smallest_is_lexicographic_minimum(seed, cls):
    rng = np.random.default_rng(seed)
    net, _ = random_cpn(rng, cls, n_max=5, r_max=3)
    order = TaxonOrder(rng.permutation(sorted(net.taxa())).tolist())
    variant = variant_for_class(cls)
    got = smallest_cps(net, order, variant)
    assert got == lexmin(net, order)
    assert smallest_cps(shuffled(net, rng), order, variant) == got


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_tree_child_isomorphism_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    a, _ = random_tree_child(rng, n_max=6, r_max=3)
    b = build_from_cps(random_tcs(len(a.taxa()), a.reticulation_number(), rng), "1a2b")
    assert isomorphic(a, b) == labeled_iso(a, b)
    assert isomorphic(a, shuffled(a, rng))


def test_class_panels_are_not_isomorphic():
    binary, stacked = load("class_1a2a"), load("class_1a2b")
    assert not labeled_iso(binary, stacked)
    # the binary panel has stacked reticulations, so only the first class applies to it
    with pytest.raises(PreconditionError):
        isomorphic(binary, stacked, mode="class", cls="1a2b")
    assert isomorphic(stacked, shuffled(stacked, np.random.default_rng(0)), mode="class",
                      cls="1a2b")


def test_isomorphic_mode_errors():
    with pytest.raises(PreconditionError):
        isomorphic(load("counter_net"), load("counter_net"))
    with pytest.raises(PreconditionError):
        isomorphic(load("class_1b2c"), load("class_1b2c"), mode="class", cls="1a2a")
    with pytest.raises(ValueError):
        isomorphic(cherry(), cherry(), mode="class")
    with pytest.raises(ValueError):
        isomorphic(cherry(), cherry(), mode="other")
