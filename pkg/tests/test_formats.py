import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cherrypick import ALL_CLASSES, Network, Sequence, classify
from cherrypick.formats import (
    ParseError,
    parse_cps,
    parse_enewick,
    parse_enewick_report,
    parse_network,
    read_network,
    write_cps,
    write_edgelist,
    write_enewick,
    write_network,
)
from cherrypick.oracle import labeled_iso
from helpers import DATA, fixture_names, load, random_cpn

seeds = st.integers(0, 2**32 - 1)


def error_at(parse, text):
    with pytest.raises(ParseError) as err:
        parse(text)
    return err.value.line, err.value.col


def test_worked_fixture_parses():
    net, report = parse_network((DATA / "worked.el").read_text())
    rep = classify(net)
    assert (rep.n_leaves, rep.reticulation_number) == (4, 2) and not report.root_inserted


def test_root_insertion_is_reported():
    net, report = parse_network("r a\nr b\n")
    assert report.root_inserted and net.taxa() == {"a", "b"}
    assert net.outdegree(net.root) == 1


def test_merged_duplicate_lines():
    net, report = parse_network("r t\nt h\nt h\nt 2\nh 1\n")
    assert report.merged_edges == 1 and classify(net).reticulation_number == 1


@pytest.mark.parametrize("text, where", [
    ("", (1, 1)),
    ("# only a comment\n", (1, 1)),
    ("r a\nr\n", (2, 1)),
    ("r a b c\n", (1, 7)),
    ("r a(b\n", (1, 4)),
    ("r a 0\n", (1, 5)),
    ("r a x\n", (1, 5)),
    ("r r\n", (1, 3)),
    ("a b\nb a\n", (1, 1)),
    ("r a\ns b\n", (2, 1)),
    ("r t\nt 1\n", (1, 3)),
    (b"r \xff\n", (1, 3)),
])
def test_edge_list_errors_are_positioned(text, where):
    assert error_at(parse_network, text) == where


def test_single_leaf_edge_list():
    net = Network.single_leaf("a")
    assert write_edgelist(net).strip().split() == ["_0", "a"]
    assert labeled_iso(parse_network(write_edgelist(net))[0], net)


def test_internal_prefix_avoids_taxa():
    net = Network.from_edges([("r", "p"), ("p", "_0"), ("p", "_1")])
    assert labeled_iso(parse_network(write_edgelist(net))[0], net)


def test_parallel_edges_written_with_multiplicity():
    net = load("class_1b2c")
    text = write_edgelist(net)
    assert any(len(line.split()) == 3 for line in text.splitlines()) or \
        all(m == 1 for _, _, m in net.edges())
    assert labeled_iso(parse_network(text)[0], net)


def test_newick_cherry_and_hybrid():
    net, report = parse_enewick_report("(a,b);")
    assert report.root_inserted and net.taxa() == {"a", "b"}
    net = parse_enewick("((a,(b)#H1),(#H1,c));")
    rep = classify(net)
    assert (rep.n_leaves, rep.reticulation_number) == (3, 1)
    hyb = net.parent(net.leaf("b"))
    assert net.is_reticulation(hyb)


@pytest.mark.parametrize("text", [
    "", "(a,b)", "(a,b;", "(a,a);", "((a)#H1,b);", "((a)#H1,(#H1)#H1);", "(a,#H2);",
    "(a,b);x", "(a,,b);", "((a,b)c#H1,#H1,d);(",
])
def test_newick_errors(text):
    with pytest.raises(ParseError):
        parse_enewick(text)


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_round_trips(name):
    net = load(name)
    for fmt in ("edgelist", "enewick"):
        assert labeled_iso(read_network(write_network(net, fmt)), net)


@settings(max_examples=150, deadline=None)
@given(seeds, st.sampled_from(ALL_CLASSES))
def test_random_round_trips(seed, cls):
    net, seq = random_cpn(np.random.default_rng(seed), cls, n_max=8, r_max=5)
    assert labeled_iso(parse_network(write_edgelist(net))[0], net)
    assert labeled_iso(parse_enewick(write_enewick(net)), net)
    assert parse_cps(write_cps(seq)) == seq


def test_sequence_text():
    assert parse_cps("2 1\n3 2\n3 4\n2 1\n1 4") == Sequence(
        [("2", "1"), ("3", "2"), ("3", "4"), ("2", "1"), ("1", "4")])
    assert parse_cps("2,1\n# note\n\n1 , 4\n") == Sequence([("2", "1"), ("1", "4")])
    assert parse_cps("") == Sequence()
    assert error_at(parse_cps, "1 2\nx x\n") == (2, 3)
    assert error_at(parse_cps, "1 2 3\n") == (1, 5)
    assert error_at(parse_cps, "1\n") == (1, 2)
    with pytest.raises(ValueError):
        write_cps([("a b", "c")])


def test_format_detection():
    assert read_network("(a,b);").taxa() == {"a", "b"}
    assert read_network("r p\np a\np b\n").taxa() == {"a", "b"}
    with pytest.raises(ValueError):
        write_network(Network.single_leaf("a"), "xml")
