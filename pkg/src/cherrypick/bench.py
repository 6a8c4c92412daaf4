"""Benchmark grid for tree-child containment and a through-origin linear fit."""
from __future__ import annotations

import csv
import gc
import io
import math
import os
import pickle
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, TextIO, Tuple

import numpy as np

from .algorithms import tcn_contains
from .generation import make_instance

CSV_FIELDS = ("n", "r", "r_prime", "kind", "result", "seconds", "seed")
WORKERS_ENV = "CHERRYPICK_WORKERS"


@dataclass(frozen=True)
class BenchConfig:
    n_values: Tuple[int, ...] = tuple(range(100, 1001, 100))
    r_values: Tuple[int, ...] = tuple(range(100, 1001, 100))
    r_prime_values: Tuple[int, ...] = tuple(range(100, 1001, 100))
    replicates: int = 2
    base_seed: int = 0
    repeats: int = 3
    binary: bool = False
    # extra timing passes run while the projected wall time stays within budget
    time_budget: Optional[float] = 540.0
    max_passes: int = 12

    @classmethod
    def grid(cls, lo: int, hi: int, step: int, **kw) -> "BenchConfig":
        values = tuple(range(lo, hi + 1, step))
        return cls(n_values=values, r_values=values, r_prime_values=values, **kw)

    @classmethod
    def full_grid(cls, **kw) -> "BenchConfig":
        return cls.grid(25, 1000, 25, **kw)

    def cells(self) -> List[Tuple[int, int, int, str, int]]:
        out = []
        for n in self.n_values:
            for r in self.r_values:
                for rp in self.r_prime_values:
                    if rp > r:
                        continue
                    for kind in ("yes", "no"):
                        for rep in range(self.replicates):
                            out.append((n, r, rp, kind, rep))
        return out


@dataclass(frozen=True)
class BenchRecord:
    n: int
    r: int
    r_prime: int
    kind: str
    result: str
    seconds: float
    seed: int


def _timed_kernel(big, small) -> Tuple[bool, float]:
    enabled = gc.isenabled()
    gc.disable()
    try:
        t0 = time.perf_counter()
        answer = tcn_contains(big, small, inplace=True, check=False)
        elapsed = time.perf_counter() - t0
    finally:
        if enabled:
            gc.enable()
    return answer, elapsed


def time_instance(inst, repeats: int = 3) -> Tuple[bool, float]:
    """Minimum wall time of the containment kernel over ``repeats`` fresh copies."""
    best = math.inf
    answer = None
    for _ in range(max(1, repeats)):
        answer, elapsed = _timed_kernel(inst.big.copy(), inst.small.copy())
        best = min(best, elapsed)
    return answer, best


@dataclass
class _Pending:
    cell: Tuple[int, int, int, str, int]
    seed: int
    blob: bytes = b""
    answer: Optional[bool] = None
    best: float = math.inf
    failure: Optional[str] = None


def _prepare(cell, cfg: "BenchConfig") -> _Pending:
    # pickled networks are small and restore several times faster than a rebuild
    n, r, rp, kind, rep = cell
    try:
        inst = make_instance(n, r, rp, kind, cfg.base_seed, rep, binary=cfg.binary)
    except (MemoryError, RecursionError) as err:
        return _Pending(cell, -1, failure=repr(err))
    blob = pickle.dumps((inst.big, inst.small), protocol=pickle.HIGHEST_PROTOCOL)
    return _Pending(cell, inst.seed, blob)


def _run_chunk(args) -> List[BenchRecord]:
    """Generate a chunk of cells, then time them in shuffled passes.

    Each pass restores fresh networks outside the timed region and times
    every instance once; an instance keeps its fastest pass. Spreading the
    repeats over the whole run keeps slow stretches of the machine from
    landing on all of one instance's measurements.

    At least ``cfg.repeats`` passes run. Further passes, up to
    ``cfg.max_passes``, run while another pass of the last observed length
    still fits in ``budget`` seconds counted from the start of the chunk.
    """
    cells, cfg, budget = args
    start = time.perf_counter()
    pending = [_prepare(c, cfg) for c in cells]
    live = [p for p in pending if p.failure is None]
    order = np.random.default_rng([cfg.base_seed, len(cells)])
    passes = 0
    while True:
        now = time.perf_counter()
        if passes >= max(1, cfg.repeats):
            last = now - pass_start
            if (budget is None or passes >= cfg.max_passes
                    or now - start + 1.1 * last > budget):
                break
        pass_start = now
        passes += 1
        for i in order.permutation(len(live)):
            item = live[i]
            if item.failure is not None:
                continue
            try:
                big, small = pickle.loads(item.blob)
                item.answer, elapsed = _timed_kernel(big, small)
            except (MemoryError, RecursionError) as err:
                item.failure = repr(err)
                continue
            del big, small
            item.best = min(item.best, elapsed)
    out = []
    for item in pending:
        n, r, rp, kind, rep = item.cell
        if item.failure is not None:
            print(f"cell n={n} r={r} r'={rp} {kind}#{rep} failed: {item.failure}", file=sys.stderr)
            out.append(BenchRecord(n, r, rp, kind, "error", float("nan"), item.seed))
        else:
            out.append(BenchRecord(n, r, rp, kind, "yes" if item.answer else "no", item.best,
                                   item.seed))
    return out


def workers_from_env(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, default)))
    except ValueError:
        return default


def run_benchmark(cfg: BenchConfig, out: Optional[TextIO] = None, workers: Optional[int] = None,
                  progress: Optional[TextIO] = None) -> List[BenchRecord]:
    """Run every grid cell; rows come back (and are written) in grid order.

    With several workers each one owns a contiguous slice of the grid.
    """
    workers = workers or workers_from_env()
    cells = cfg.cells()
    size = max(1, math.ceil(len(cells) / (workers * 4))) if workers > 1 else len(cells) or 1
    spans = [cells[i:i + size] for i in range(0, len(cells), size)]
    # each chunk gets the share of the budget its worker can spend on it
    share = lambda span: (None if cfg.time_budget is None
                          else cfg.time_budget * len(span) * workers / max(1, len(cells)))
    chunks = [(span, cfg, share(span)) for span in spans]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    else:
        parts = [_run_chunk(c) for c in chunks]
    records = [rec for part in parts for rec in part]
    if out is not None:
        write_records(records, out)
    for rec in records:
        if rec.kind == "yes" and rec.result == "no":
            print(f"yes-instance answered no: {rec}", file=sys.stderr)
        if rec.kind == "no" and rec.result == "yes":
            print(f"no-instance answered yes (possible but unlikely): {rec}", file=sys.stderr)
    if progress is not None:
        print(f"{len(records)} instances timed", file=progress, flush=True)
    return records


def _row(rec: BenchRecord) -> list:
    return [rec.n, rec.r, rec.r_prime, rec.kind, rec.result, repr(rec.seconds), rec.seed]


def write_records(records: Iterable[BenchRecord], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        writer.writerow(_row(rec))


def read_records(fh: TextIO) -> List[BenchRecord]:
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(f"expected header {','.join(CSV_FIELDS)}")
    return [BenchRecord(int(row["n"]), int(row["r"]), int(row["r_prime"]), row["kind"],
                        row["result"], float(row["seconds"]), int(row["seed"]))
            for row in reader]


def records_to_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


# -- fitting ---------------------------------------------------------------------

@dataclass(frozen=True)
class FitReport:
    split: str
    count: int
    slope_leaves: float
    slope_r: float
    slope_r_prime: float
    r_squared: float

    def as_dict(self) -> dict:
        return asdict(self)


def fit_split(records: List[BenchRecord], split: str = "all") -> FitReport:
    """Least squares of seconds on (n, r, r') with no intercept.

    R-squared is measured against zero, the baseline matching a model
    without intercept: 1 - SS_res / sum(y^2).
    """
    rows = [rec for rec in records if math.isfinite(rec.seconds)]
    if len(rows) < 3:
        raise ValueError(f"split {split!r} needs at least 3 records, has {len(rows)}")
    x = np.array([[rec.n, rec.r, rec.r_prime] for rec in rows], dtype=float)
    y = np.array([rec.seconds for rec in rows], dtype=float)
    coef, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < 3:
        raise ValueError(f"split {split!r} has a degenerate design matrix (rank {rank})")
    resid = y - x @ coef
    total = float(y @ y)
    r2 = 1.0 - float(resid @ resid) / total if total > 0 else float("nan")
    return FitReport(split, len(rows), float(coef[0]), float(coef[1]), float(coef[2]), r2)


def fit(records: Iterable[BenchRecord]) -> Dict[str, FitReport]:
    """Fits for all records and for the yes and no instance kinds separately."""
    records = list(records)
    return {
        "all": fit_split(records, "all"),
        "yes": fit_split([r for r in records if r.kind == "yes"], "yes"),
        "no": fit_split([r for r in records if r.kind == "no"], "no"),
    }


def format_fits(fits: Dict[str, FitReport]) -> str:
    lines = [f"{'split':<6} {'count':>6} {'R^2':>10} {'leaves':>12} {'r':>12} {'r_prime':>12}"]
    for f in fits.values():
        lines.append(f"{f.split:<6} {f.count:>6} {f.r_squared:>10.6f} {f.slope_leaves:>12.4e} "
                     f"{f.slope_r:>12.4e} {f.slope_r_prime:>12.4e}")
    return "\n".join(lines)
