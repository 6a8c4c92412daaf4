import json
import subprocess
import sys

import pytest

from cherrypick.oracle import labeled_iso
from cherrypick.cli import main
from cherrypick.formats import parse_cps, read_network
from helpers import DATA, load

WORKED_SEQ = "2 1\n3 2\n3 4\n2 1\n1 4\n"


@pytest.fixture
def seq_file(tmp_path):
    path = tmp_path / "worked.cps"
    path.write_text(WORKED_SEQ)
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_prints_survivor(capsys, seq_file):
    code, out, _ = run(capsys, "reduce", DATA / "worked.el", seq_file)
    assert (code, out) == (0, "4\n")


def test_reduce_json_and_partial(capsys, tmp_path):
    short = tmp_path / "short.cps"
    short.write_text("2 1\n")
    code, out, _ = run(capsys, "reduce", DATA / "worked.el", short, "--json")
    assert code == 1 and json.loads(out) == {"reduced": False, "survivor": None,
                                             "active_steps": [1]}


def test_check_network_and_sequence(capsys, seq_file):
    code, out, _ = run(capsys, "check", DATA / "worked.el", "--json")
    info = json.loads(out)
    assert code == 0 and (info["n_leaves"], info["reticulation_number"]) == (4, 2)
    code, out, _ = run(capsys, "check", "--sequence", seq_file)
    assert code == 0 and "tcs=False" in out


def test_cyclic_file_is_an_error(capsys, tmp_path):
    bad = tmp_path / "cyclic.el"
    bad.write_text("a b\nb c\nc a\nc 1\n")
    code, out, err = run(capsys, "check", bad)
    assert code == 2 and out == "" and err.startswith("error: ParseError: line ")
    assert len(err.strip().splitlines()) == 1


def test_missing_file_and_bad_flag(capsys, tmp_path):
    assert run(capsys, "check", tmp_path / "missing.el")[0] == 2
    assert run(capsys, "check", "--bogus")[0] == 2


def test_build_and_smallest(capsys, tmp_path, seq_file):
    code, out, _ = run(capsys, "build", seq_file, "--class", "1a2a")
    assert code == 0 and labeled_iso(read_network(out), load("worked"))
    order = tmp_path / "order.txt"
    order.write_text("1 2 3 4 5\n")
    code, out, _ = run(capsys, "smallest-cps", DATA / "smallest.el", "--order-file", order)
    assert code == 0 and out == "1 2\n3 2\n3 4\n4 5\n2 5\n"


def test_empty_build_needs_seed(capsys, tmp_path):
    empty = tmp_path / "empty.cps"
    empty.write_text("")
    assert run(capsys, "build", empty, "--class", "1a2a")[0] == 2
    code, out, _ = run(capsys, "build", empty, "--class", "1a2a", "--seed-taxon", "a")
    assert code == 0 and read_network(out).taxa() == {"a"}


def test_generate_subnet_contains(capsys, tmp_path):
    big, seq = tmp_path / "big.el", tmp_path / "big.cps"
    small = tmp_path / "small.el"
    assert run(capsys, "generate", "--leaves", 8, "--retics", 4, "--seed", 1,
               "--network-out", big, "--sequence-out", seq)[0] == 0
    assert len(parse_cps(seq.read_text())) == 11
    assert run(capsys, "subnet", seq, "--retics", 2, "--seed", 3, "--network-out", small)[0] == 0
    assert run(capsys, "contains", big, small) == (0, "yes\n", "")
    assert run(capsys, "tcs", big)[0] == 0
    assert run(capsys, "isomorphic", big, big)[0] == 0
    assert run(capsys, "isomorphic", big, small)[0] == 1
    assert run(capsys, "oracle", "subnetwork", big, small)[0] == 0


def test_precondition_failures_exit_two(capsys):
    code, _, err = run(capsys, "contains", DATA / "counter_net.el", DATA / "counter_net.el")
    assert code == 2 and "PreconditionError" in err
    assert run(capsys, "isomorphic", DATA / "class_1a2b.el", DATA / "class_1a2b.el",
               "--mode", "class")[0] == 2


def test_oracle_commands(capsys):
    code, out, _ = run(capsys, "oracle", "contains", DATA / "contain_big.el",
                       DATA / "contain_small.el")
    assert (code, out) == (0, "yes\n")
    code, out, _ = run(capsys, "oracle", "enumerate", DATA / "smallest.el")
    assert code == 0 and len(out.splitlines()) == 96
    assert run(capsys, "oracle", "contains", DATA / "worked.el")[0] == 2


def test_bench_and_fit(capsys, tmp_path):
    csv_path = tmp_path / "bench.csv"
    code, out, _ = run(capsys, "bench", "--min", 10, "--max", 30, "--step", 10,
                       "--replicates", 1, "--repeats", 1, "--out", csv_path, "--fit", "--json")
    assert code == 0 and set(json.loads(out)) == {"all", "yes", "no"}
    assert csv_path.read_text().splitlines()[0] == "n,r,r_prime,kind,result,seconds,seed"
    code, out, _ = run(capsys, "fit", csv_path)
    assert code == 0 and out.splitlines()[0].split()[:3] == ["split", "count", "R^2"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cherrypick", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "smallest-cps" in proc.stdout
