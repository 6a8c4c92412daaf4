"""Command-line interface.

Decision commands exit 0 for yes, 1 for no and 2 for any error. Results go to
stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from . import bench
from .algorithms import (DEFAULT_ORDER, VARIANTS, NotCPN, PreconditionError, TaxonOrder,
                         find_tcs, isomorphic, smallest_cps, tcn_contains)
from .construction import ALL_CLASSES, CpnClass, NotACPS, build_from_cps
from .formats import ParseError, parse_cps, read_network, write_cps, write_network
from .generation import GenerationError, random_sub_tcs, random_tcs
from .network import NetworkError, classify
from .oracle import (CapExceeded, containment_bruteforce, enumerate_all_minimal_cps,
                     subnetwork_bruteforce)
from .sequences import apply, check_cps, check_tcs, surviving_taxon

YES, NO, ERROR = 0, 1, 2
CLASS_NAMES = [c.name for c in ALL_CLASSES]


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _network(path: str, fmt: Optional[str]):
    return read_network(_read(path), fmt)


def _sequence(path: str):
    return parse_cps(_read(path))


def _order(path: Optional[str]) -> TaxonOrder:
    if path is None:
        return DEFAULT_ORDER
    return TaxonOrder(_read(path).decode("utf-8").split())


def _emit(text: str, path: Optional[str] = None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _decision(answer: bool, as_json: bool) -> int:
    if as_json:
        print(json.dumps({"answer": "yes" if answer else "no"}))
    else:
        print("yes" if answer else "no")
    return YES if answer else NO


# -- subcommands --------------------------------------------------------------------

def cmd_check(a) -> int:
    if a.sequence:
        seq = _sequence(a.file)
        info = {"pairs": len(seq), "cps": check_cps(seq), "tcs": check_tcs(seq)}
        print(json.dumps(info) if a.json else " ".join(f"{k}={v}" for k, v in info.items()))
        return YES if info["cps"] else NO
    report = classify(_network(a.file, a.format))
    info = report.__dict__
    print(json.dumps(info) if a.json else " ".join(f"{k}={v}" for k, v in info.items()))
    return YES


def cmd_reduce(a) -> int:
    net = _network(a.network, a.format)
    trace: List[bool] = []
    out = apply(net, _sequence(a.sequence), trace)
    left = surviving_taxon(out)
    if a.json:
        print(json.dumps({"reduced": left is not None, "survivor": left,
                          "active_steps": [i + 1 for i, t in enumerate(trace) if t]}))
    elif left is not None:
        print(left)
    else:
        sys.stdout.write(write_network(out, a.out_format))
    return YES if left is not None else NO


def cmd_build(a) -> int:
    net = build_from_cps(_sequence(a.sequence), CpnClass.parse(a.cls), a.seed_taxon)
    _emit(write_network(net, a.out_format))
    return YES


def cmd_contains(a) -> int:
    return _decision(tcn_contains(_network(a.big, a.format), _network(a.small, a.format)), a.json)


def cmd_isomorphic(a) -> int:
    x, y = _network(a.first, a.format), _network(a.second, a.format)
    if a.mode == "class" and a.cls is None:
        raise PreconditionError("--mode class needs --class")
    ans = isomorphic(x, y, a.mode, cls=a.cls, order=_order(a.order_file))
    return _decision(ans, a.json)


def cmd_smallest_cps(a) -> int:
    seq = smallest_cps(_network(a.network, a.format), _order(a.order_file), a.variant)
    sys.stdout.write(write_cps(seq))
    return YES


def cmd_tcs(a) -> int:
    sys.stdout.write(write_cps(find_tcs(_network(a.network, a.format))))
    return YES


def cmd_generate(a) -> int:
    rng = np.random.default_rng(a.seed)
    seq = random_tcs(a.leaves, a.retics, rng, binary=a.binary)
    cls = CpnClass("1a", "2a") if a.binary else CpnClass("1a", "2b")
    if a.sequence_out:
        _emit(write_cps(seq), a.sequence_out)
    _emit(write_network(build_from_cps(seq, cls), a.out_format), a.network_out)
    return YES


def cmd_subnet(a) -> int:
    rng = np.random.default_rng(a.seed)
    sub = random_sub_tcs(_sequence(a.sequence), a.retics, rng)
    if a.sequence_out:
        _emit(write_cps(sub), a.sequence_out)
    cls = CpnClass.parse(a.cls)
    _emit(write_network(build_from_cps(sub, cls), a.out_format), a.network_out)
    return YES


def cmd_oracle(a) -> int:
    if a.what == "enumerate":
        for seq in enumerate_all_minimal_cps(_network(a.files[0], a.format), cap=a.cap):
            print(" ".join(f"{x},{y}" for x, y in seq))
        return YES
    if len(a.files) != 2:
        raise ValueError(f"oracle {a.what} needs two network files")
    big, small = (_network(f, a.format) for f in a.files)
    fn = containment_bruteforce if a.what == "contains" else subnetwork_bruteforce
    return _decision(fn(big, small), a.json)


def _grid_config(a) -> bench.BenchConfig:
    kw = dict(replicates=a.replicates, base_seed=a.seed, repeats=a.repeats, binary=a.binary,
              time_budget=a.budget or None, max_passes=a.max_passes)
    if a.full_grid:
        return bench.BenchConfig.full_grid(**kw)
    return bench.BenchConfig.grid(a.min, a.max, a.step, **kw)


def _print_fits(fits, as_json: bool) -> None:
    if as_json:
        print(json.dumps({k: v.as_dict() for k, v in fits.items()}, indent=2))
    else:
        print(bench.format_fits(fits))


def cmd_bench(a) -> int:
    cfg = _grid_config(a)
    if a.out and a.out != "-":
        with open(a.out, "w", encoding="utf-8", newline="") as fh:
            records = bench.run_benchmark(cfg, fh, workers=a.workers, progress=sys.stderr)
    else:
        records = bench.run_benchmark(cfg, sys.stdout, workers=a.workers, progress=sys.stderr)
    if a.fit:
        fits = bench.fit(records)
        stream = sys.stderr if not a.out or a.out == "-" else sys.stdout
        if a.json:
            stream.write(json.dumps({k: v.as_dict() for k, v in fits.items()}, indent=2) + "\n")
        else:
            stream.write(bench.format_fits(fits) + "\n")
    return YES


def cmd_fit(a) -> int:
    with open(a.csv, encoding="utf-8") as fh:
        records = bench.read_records(fh)
    _print_fits(bench.fit(records), a.json)
    return YES


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cherrypick", description="Cherry-picking sequences on phylogenetic networks.")
    sub = p.add_subparsers(dest="command", required=True)

    def net_fmt(sp):
        sp.add_argument("--format", choices=["edgelist", "enewick"], default=None,
                        help="input format (guessed when omitted)")

    def out_fmt(sp):
        sp.add_argument("--out-format", choices=["edgelist", "enewick"], default="edgelist")

    def js(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("check", help="validate a network (or a sequence with --sequence)")
    sp.add_argument("file")
    sp.add_argument("--sequence", action="store_true", help="treat the file as a pair sequence")
    net_fmt(sp)
    js(sp)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("reduce", help="apply a sequence; prints the surviving taxon")
    sp.add_argument("network")
    sp.add_argument("sequence")
    net_fmt(sp)
    out_fmt(sp)
    js(sp)
    sp.set_defaults(fn=cmd_reduce)

    sp = sub.add_parser("build", help="build the network of a sequence in a class")
    sp.add_argument("sequence")
    sp.add_argument("--class", dest="cls", required=True, choices=CLASS_NAMES)
    sp.add_argument("--seed-taxon", default=None, help="taxon for an empty sequence")
    out_fmt(sp)
    sp.set_defaults(fn=cmd_build)

    sp = sub.add_parser("contains", help="tree-child containment: does BIG contain SMALL")
    sp.add_argument("big")
    sp.add_argument("small")
    net_fmt(sp)
    js(sp)
    sp.set_defaults(fn=cmd_contains)

    sp = sub.add_parser("isomorphic", help="isomorphism test")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--mode", choices=["treechild", "class"], default="treechild")
    sp.add_argument("--class", dest="cls", choices=["1a2a", "1a2b", "1b2c", "1b2d"])
    sp.add_argument("--order-file", default=None, help="whitespace-separated taxa, smallest first")
    net_fmt(sp)
    js(sp)
    sp.set_defaults(fn=cmd_isomorphic)

    sp = sub.add_parser("smallest-cps", help="lexicographically smallest minimal sequence")
    sp.add_argument("network")
    sp.add_argument("--order-file", default=None)
    sp.add_argument("--variant", choices=list(VARIANTS), default="nonbinary")
    net_fmt(sp)
    sp.set_defaults(fn=cmd_smallest_cps)

    sp = sub.add_parser("tcs", help="a minimal tree-child sequence of a tree-child network")
    sp.add_argument("network")
    net_fmt(sp)
    sp.set_defaults(fn=cmd_tcs)

    sp = sub.add_parser("generate", help="random tree-child network")
    sp.add_argument("--leaves", type=int, required=True)
    sp.add_argument("--retics", type=int, required=True)
    sp.add_argument("--binary", action="store_true")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--network-out", default=None)
    sp.add_argument("--sequence-out", default=None)
    out_fmt(sp)
    sp.set_defaults(fn=cmd_generate)

    sp = sub.add_parser("subnet", help="random sub-sequence of a tree-child sequence")
    sp.add_argument("sequence")
    sp.add_argument("--retics", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--class", dest="cls", default="1a2b", choices=CLASS_NAMES)
    sp.add_argument("--network-out", default=None)
    sp.add_argument("--sequence-out", default=None)
    out_fmt(sp)
    sp.set_defaults(fn=cmd_subnet)

    sp = sub.add_parser("oracle", help="brute-force checks for small networks")
    sp.add_argument("what", choices=["contains", "subnetwork", "enumerate"])
    sp.add_argument("files", nargs="+")
    sp.add_argument("--cap", type=int, default=100_000)
    net_fmt(sp)
    js(sp)
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("bench", help="run the containment benchmark grid, CSV to stdout or --out")
    sp.add_argument("--min", type=int, default=100)
    sp.add_argument("--max", type=int, default=1000)
    sp.add_argument("--step", type=int, default=100)
    sp.add_argument("--full-grid", action="store_true", help="25..1000 step 25 (131200 instances)")
    sp.add_argument("--replicates", type=int, default=2)
    sp.add_argument("--repeats", type=int, default=3,
                    help="minimum timing passes per instance; the fastest is kept")
    sp.add_argument("--budget", type=float, default=540.0,
                    help="seconds within which extra passes may run (0: none)")
    sp.add_argument("--max-passes", type=int, default=12)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--binary", action="store_true")
    sp.add_argument("--workers", type=int, default=None,
                    help=f"worker processes (default: ${bench.WORKERS_ENV} or 1)")
    sp.add_argument("--out", default=None)
    sp.add_argument("--fit", action="store_true", help="also print the regression")
    js(sp)
    sp.set_defaults(fn=cmd_bench)

    sp = sub.add_parser("fit", help="regress a benchmark CSV")
    sp.add_argument("csv")
    js(sp)
    sp.set_defaults(fn=cmd_fit)
    return p


_EXPECTED = (ParseError, NetworkError, PreconditionError, NotCPN, NotACPS, CapExceeded,
             GenerationError, OSError, ValueError, KeyError, UnicodeDecodeError)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help
        return exc.code if isinstance(exc.code, int) else ERROR
    try:
        return args.fn(args)
    except _EXPECTED as err:
        msg = str(err).replace("\n", " ")
        print(f"error: {type(err).__name__}: {msg}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
