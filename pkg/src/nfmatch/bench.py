"""Benchmark harness: pair enumeration over a multiset (naive, optimized,
and a hand-written functional baseline) plus the sequential-triple check.

Each (variant, n) cell runs in a forked child process so a runaway cell
can be cut off at the configured timeout and reported as "n/a". Timing
wraps the match call only; input construction is outside the clock.
"""

from __future__ import annotations

import bisect
import csv
import multiprocessing
import statistics
from time import perf_counter
from typing import NamedTuple, Optional

from .engine import MatchClause, match_all
from .errors import UnknownPatternConstructor
from .matchers import (
    CONS,
    NIL,
    SOMETHING,
    integer_matcher,
    multiset_matcher,
    register_matcher_extension,
)
from .pattern import (
    WILDCARD,
    Constructor,
    ValuePattern,
    Var,
    Wildcard,
    env_get,
)
from .values import Symbol, VList, as_vlist, value_equal, without_index

COMB2_VARIANTS = ("naive-multiset", "optimized-multiset", "functional")
SEQ_TRIPLE_VARIANTS = ("multiset", "sorted")

_X = Symbol("x")
_Y = Symbol("y")


class BenchConfig(NamedTuple):
    sizes: tuple
    variants: tuple
    repetitions: int = 5
    timeout: float = 60.0
    bench: str = "comb2"
    parallel: bool = False


class BenchCell(NamedTuple):
    bench: str
    variant: str
    n: int
    median_seconds: Optional[float]  # None = timed out ("n/a")
    count: Optional[int]
    repetitions: int


class BenchReport(NamedTuple):
    cells: tuple


class BenchError(Exception):
    pass


# ---------------------------------------------------------------------------
# comb2: all ordered pairs of distinct positions


def _comb2_clause():
    pattern = Constructor(
        CONS, (Var(_X), Constructor(CONS, (Var(_Y), WILDCARD)))
    )
    return MatchClause(pattern, lambda x, y: VList.of((x, y)))


def comb2_pattern(n: int, variant: str = "optimized-multiset") -> list:
    """Ordered pairs from (1..n) via the nested cons pattern."""
    if variant not in ("naive-multiset", "optimized-multiset"):
        raise BenchError(f"unknown pattern variant {variant!r}")
    target = VList.of(tuple(range(1, n + 1)))
    matcher = multiset_matcher(SOMETHING, optimized=variant == "optimized-multiset")
    return match_all(target, matcher, [_comb2_clause()])


def comb2_functional(n: int) -> list:
    """Hand-written baseline: for each head, pairs with earlier elements
    (in first-seen order) and then with the remaining tail.

    Builds the same pair values as the pattern variants so the comparison
    prices result construction equally.
    """
    return _comb2_functional_run(tuple(range(1, n + 1)))


def _comb2_functional_run(xs: tuple) -> list:
    of = VList.of
    chunks = []
    hs = ()
    for i, x in enumerate(xs):
        chunk = [of((x, y)) for y in hs]
        chunk += [of((x, y)) for y in xs[i + 1 :]]
        chunks.append(chunk)
        hs = hs + (x,)
    return [p for chunk in chunks for p in chunk]


# ---------------------------------------------------------------------------
# sequential triple: x, x+1, x+2 somewhere in a multiset of zeros


def _seq_triple_clause():
    vp1 = ValuePattern(lambda env: env_get(env, _X) + 1, (_X,))
    vp2 = ValuePattern(lambda env: env_get(env, _X) + 2, (_X,))
    pattern = Constructor(
        CONS,
        (
            Var(_X),
            Constructor(CONS, (vp1, Constructor(CONS, (vp2, WILDCARD)))),
        ),
    )
    return MatchClause(pattern, lambda x: x)


def _distinct_run_starts(tt):
    # first index of each run of equal values, found by bisect jumps
    i = 0
    n = len(tt)
    while i < n:
        yield i
        i = bisect.bisect_right(tt, tt[i], i, n)


def sorted_list_matcher(m) -> "Matcher":
    """User-registered matcher for sorted integer lists.

    cons enumerates one decomposition per distinct element value (equal
    elements give identical head/rest splits, so duplicates are skipped
    with binary search). A head whose value cannot occur is rejected
    after O(log n) work instead of a full scan, which is what makes the
    sequential-triple search linear on sorted input.
    """

    def fn(p, t):
        tp = type(p)
        if tp is Constructor:
            cname = p.name
            if cname is CONS:
                tt = as_vlist(t)
                px, py = p.args
                if type(px) is ValuePattern and px.has_value:
                    # pre-evaluated head: jump straight to its run
                    lo = bisect.bisect_left(tt, px.value)
                    starts = [lo] if lo < len(tt) and tt[lo] == px.value else []
                else:
                    starts = _distinct_run_starts(tt)
                if type(py) is Wildcard:
                    return [((px, m, tt[i]),) for i in starts]
                return [
                    ((px, m, tt[i]), (py, matcher, without_index(tt, i)))
                    for i in starts
                ]
            if cname is NIL:
                return [()] if len(as_vlist(t)) == 0 else []
            raise UnknownPatternConstructor(cname, "SortedList")
        if tp is ValuePattern:
            return [()] if value_equal(p.value, t) else []
        return [((p, SOMETHING, t),)]

    matcher = register_matcher_extension(fn, f"(SortedList {m.name})")
    return matcher


def seq_triple_bench(n: int, variant: str = "multiset"):
    """Search n zeros for a sequential triple; returns (results, seconds)."""
    if variant == "multiset":
        matcher = multiset_matcher(integer_matcher())
    elif variant == "sorted":
        matcher = sorted_list_matcher(integer_matcher())
    else:
        raise BenchError(f"unknown seq-triple variant {variant!r}")
    target = VList.of((0,) * n)
    clause = _seq_triple_clause()
    start = perf_counter()
    results = match_all(target, matcher, [clause])
    elapsed = perf_counter() - start
    return VList.of(tuple(results)), elapsed


# ---------------------------------------------------------------------------
# cell execution


def _run_once(bench: str, variant: str, n: int):
    if bench == "comb2":
        if variant == "functional":
            xs = tuple(range(1, n + 1))
            start = perf_counter()
            result = _comb2_functional_run(xs)
            return perf_counter() - start, len(result)
        target = VList.of(tuple(range(1, n + 1)))
        matcher = multiset_matcher(
            SOMETHING, optimized=variant == "optimized-multiset"
        )
        clause = _comb2_clause()
        start = perf_counter()
        result = match_all(target, matcher, [clause])
        return perf_counter() - start, len(result)
    if bench == "seq-triple":
        result, elapsed = seq_triple_bench(n, variant)
        return elapsed, len(result)
    raise BenchError(f"unknown bench {bench!r}")


def _cell_worker(bench, variant, n, repetitions, queue):
    times = []
    count = 0
    for _ in range(repetitions):
        elapsed, count = _run_once(bench, variant, n)
        times.append(elapsed)
    queue.put((statistics.median(times), count))


def _time_cell(bench, variant, n, repetitions, timeout) -> BenchCell:
    ctx = multiprocessing.get_context("fork")
    queue = ctx.Queue()
    proc = ctx.Process(target=_cell_worker, args=(bench, variant, n, repetitions, queue))
    proc.start()
    proc.join(timeout)
    if proc.is_alive():
        proc.terminate()
        proc.join()
        return BenchCell(bench, variant, n, None, None, repetitions)
    try:
        median, count = queue.get(timeout=5)
    except Exception:
        return BenchCell(bench, variant, n, None, None, repetitions)
    return BenchCell(bench, variant, n, median, count, repetitions)


def run_benchmarks(cfg: BenchConfig, out=None, csv_path: Optional[str] = None) -> BenchReport:
    """Run every (variant, n) cell, print a table, optionally write CSV."""
    _check_config(cfg)
    jobs = [(cfg.bench, v, n) for v in cfg.variants for n in cfg.sizes]
    if cfg.parallel:
        cells = _run_parallel(jobs, cfg)
    else:
        cells = [
            _time_cell(bench, v, n, cfg.repetitions, cfg.timeout)
            for (bench, v, n) in jobs
        ]
    report = BenchReport(tuple(cells))
    text = format_table(report)
    if out is None:
        print(text, end="")
    else:
        out.write(text)
    if csv_path is not None:
        write_csv(report, csv_path)
    return report


def _run_parallel(jobs, cfg: BenchConfig):
    ctx = multiprocessing.get_context("fork")
    started = []
    for bench, v, n in jobs:
        queue = ctx.Queue()
        proc = ctx.Process(target=_cell_worker, args=(bench, v, n, cfg.repetitions, queue))
        proc.start()
        started.append((bench, v, n, proc, queue, perf_counter()))
    cells = []
    for bench, v, n, proc, queue, t0 in started:
        remaining = max(0.0, cfg.timeout - (perf_counter() - t0))
        proc.join(remaining)
        if proc.is_alive():
            proc.terminate()
            proc.join()
            cells.append(BenchCell(bench, v, n, None, None, cfg.repetitions))
            continue
        try:
            median, count = queue.get(timeout=5)
            cells.append(BenchCell(bench, v, n, median, count, cfg.repetitions))
        except Exception:
            cells.append(BenchCell(bench, v, n, None, None, cfg.repetitions))
    return cells


def _check_config(cfg: BenchConfig):
    if cfg.repetitions < 1:
        raise BenchError("repetitions must be at least 1")
    if not cfg.sizes or any(n < 1 for n in cfg.sizes):
        raise BenchError("sizes must be positive")
    if list(cfg.sizes) != sorted(cfg.sizes):
        raise BenchError("sizes must be ascending")
    allowed = COMB2_VARIANTS if cfg.bench == "comb2" else SEQ_TRIPLE_VARIANTS
    for v in cfg.variants:
        if v not in allowed:
            raise BenchError(f"unknown variant {v!r} for bench {cfg.bench!r}")


def format_table(report: BenchReport) -> str:
    """One row per variant, one column per size, medians in seconds."""
    if not report.cells:
        return "(no cells)\n"
    bench = report.cells[0].bench
    sizes = sorted({c.n for c in report.cells})
    variants = []
    for c in report.cells:
        if c.variant not in variants:
            variants.append(c.variant)
    by_key = {(c.variant, c.n): c for c in report.cells}
    header = [bench] + [f"n={n}" for n in sizes]
    rows = [header]
    for v in variants:
        row = [v]
        for n in sizes:
            cell = by_key.get((v, n))
            if cell is None or cell.median_seconds is None:
                row.append("n/a")
            else:
                row.append(f"{cell.median_seconds:.3f}s")
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for r in rows:
        lines.append("  ".join(col.ljust(widths[i]) for i, col in enumerate(r)).rstrip())
    return "\n".join(lines) + "\n"


def write_csv(report: BenchReport, path: str):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "n", "median_seconds", "count"])
        for c in report.cells:
            writer.writerow(
                [
                    c.variant,
                    c.n,
                    "n/a" if c.median_seconds is None else f"{c.median_seconds:.6f}",
                    "" if c.count is None else c.count,
                ]
            )


def scaling_ratios(report: BenchReport, variant: str) -> dict:
    """time(2n)/time(n) for every n where both cells have times."""
    times = {
        c.n: c.median_seconds
        for c in report.cells
        if c.variant == variant and c.median_seconds is not None
    }
    out = {}
    for n, t in times.items():
        if 2 * n in times and t > 0:
            out[n] = times[2 * n] / t
    return out
