"""Exhaustive program-space exploration and its summary statistics.

A *sweep* runs every program up to a length bound under one step budget
and records, per canonical position: length, halted flag, step count,
and output bitstring.  From the records (or folded directly inside the
sweep workers) come:

* the halting census per length;
* the shortest-producer table: for each output string, the minimal
  program length that produced it, the first witness position, and how
  many halting programs produced it;
* step-count and output-length histograms;
* empirical algorithmic probability of an output, with its -log2
  complexity estimate.

Also here: the closed-form upper bound ``x[0] := n`` for any target
string, and the four parameterized program families whose outputs grow
as 2**n, n!, n**n and n**(2**n).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from math import log2
from multiprocessing import get_context
from typing import Iterable, Iterator

from .enumeration import count_programs, cumulative_count, iter_fixed_length
from .lang import (
    Add, Assign, Lt, Mul, Num, Program, Reg, Seq, While, SKIP,
    program_length, string_to_nat,
)
from .vm import classify, run


@dataclass(frozen=True, slots=True)
class RunRecord:
    """One sweep row: what a single program did under the budget."""

    position: int
    length: int
    halted: bool
    steps: int
    output: str


@dataclass(frozen=True, slots=True)
class CensusRow:
    halted: int
    not_halted: int

    @property
    def total(self) -> int:
        return self.halted + self.not_halted

    @property
    def halted_pct(self) -> float:
        return round(100 * self.halted / self.total, 1)

    @property
    def not_halted_pct(self) -> float:
        return round(100 * self.not_halted / self.total, 1)


@dataclass(frozen=True, slots=True)
class ComplexityEntry:
    """Shortest discovered producer of one output string."""

    output: str
    best_length: int
    witness: int
    producers: int


class IncompleteCensusError(ValueError):
    """A census was requested over records not covering whole lengths."""


# ---------------------------------------------------------------------------
# Sweeping
# ---------------------------------------------------------------------------

def _plan(max_length: int, workers: int) -> list[tuple[int, int, int, int]]:
    """Chunk every length block into (length, start, count, base) tasks."""
    total = cumulative_count(max_length)
    chunk = max(1000, total // (workers * 16) + 1)
    tasks = []
    for length in range(1, max_length + 1):
        block = count_programs(length)
        base = cumulative_count(length - 1)
        for start in range(0, block, chunk):
            tasks.append((length, start, min(chunk, block - start), base + start))
    return tasks


_worker_budget = 0
_worker_exact = False


def _sweep_init(budget: int, exact_budget: bool):
    global _worker_budget, _worker_exact
    _worker_budget = budget
    _worker_exact = exact_budget


def _classify(program: Program):
    if _worker_exact:
        return run(program, _worker_budget)
    return classify(program, _worker_budget)


def _record_task(task: tuple[int, int, int, int]) -> list[tuple[int, int, bool, int, str]]:
    length, start, count, base = task
    rows = []
    for offset, program in enumerate(islice(iter_fixed_length(length, start), count)):
        result = _classify(program)
        rows.append((base + offset, length, result.halted, result.steps,
                     result.output if result.halted else ""))
    return rows


def sweep(max_length: int, budget: int, workers: int = 1,
          exact_budget: bool = False) -> Iterator[RunRecord]:
    """Run every program of length <= max_length; yield records in position order.

    The stream is identical for any worker count.  ``exact_budget``
    disables the loop-detection shortcut and burns the full budget on
    every non-halting program (slower, used for cross-validation).
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if workers < 1:
        raise ValueError("need at least one worker")
    tasks = _plan(max_length, workers)
    if workers == 1:
        _sweep_init(budget, exact_budget)
        chunks: Iterable[list] = map(_record_task, tasks)
        for chunk in chunks:
            for row in chunk:
                yield RunRecord(*row)
        return
    with get_context("fork").Pool(
            workers, initializer=_sweep_init,
            initargs=(budget, exact_budget)) as pool:
        for chunk in pool.imap(_record_task, tasks):
            for row in chunk:
                yield RunRecord(*row)


def _summary_task(task: tuple[int, int, int, int]):
    length, start, count, base = task
    halted = 0
    complexity: dict[str, list] = {}
    steps_hist: dict[int, int] = {}
    output_hist: dict[int, int] = {}
    for offset, program in enumerate(islice(iter_fixed_length(length, start), count)):
        result = _classify(program)
        if not result.halted:
            continue
        halted += 1
        position = base + offset
        out = result.output
        steps_hist[result.steps] = steps_hist.get(result.steps, 0) + 1
        output_hist[len(out)] = output_hist.get(len(out), 0) + 1
        entry = complexity.get(out)
        if entry is None:
            complexity[out] = [length, position, 1]
        else:
            entry[2] += 1
            # chunks are single-length and position-ordered, so the first
            # producer seen is already the minimal (length, position) one
    return length, count, halted, complexity, steps_hist, output_hist


@dataclass(frozen=True, slots=True)
class SweepSummary:
    """Aggregates folded during a sweep, without keeping the records."""

    max_length: int
    budget: int
    census: dict[int, CensusRow]
    complexity: dict[str, ComplexityEntry]
    steps_hist: dict[int, dict[int, int]]
    output_hist: dict[int, int]

    @property
    def total(self) -> int:
        return sum(row.total for row in self.census.values())

    @property
    def total_halting(self) -> int:
        return sum(row.halted for row in self.census.values())


def sweep_summary(max_length: int, budget: int, workers: int = 1,
                  exact_budget: bool = False) -> SweepSummary:
    """Sweep with all aggregation done inside the workers.

    Produces exactly the statistics that ``halting_census``,
    ``complexity_table`` and ``histograms`` would give over the full
    record stream, in constant memory per distinct output.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if workers < 1:
        raise ValueError("need at least one worker")
    tasks = _plan(max_length, workers)
    if workers == 1:
        _sweep_init(budget, exact_budget)
        partials: Iterable = map(_summary_task, tasks)
        return _merge_summaries(max_length, budget, partials)
    with get_context("fork").Pool(
            workers, initializer=_sweep_init,
            initargs=(budget, exact_budget)) as pool:
        return _merge_summaries(max_length, budget,
                                pool.imap(_summary_task, tasks))


def _merge_summaries(max_length: int, budget: int, partials) -> SweepSummary:
    census_counts: dict[int, list[int]] = {}
    complexity: dict[str, list] = {}
    steps_hist: dict[int, dict[int, int]] = {}
    output_hist: dict[int, int] = {}
    for length, count, halted, part_cx, part_steps, part_out in partials:
        totals = census_counts.setdefault(length, [0, 0])
        totals[0] += halted
        totals[1] += count - halted
        row = steps_hist.setdefault(length, {})
        for steps, n in part_steps.items():
            row[steps] = row.get(steps, 0) + n
        for out_len, n in part_out.items():
            output_hist[out_len] = output_hist.get(out_len, 0) + n
        for out, (best, witness, producers) in part_cx.items():
            entry = complexity.get(out)
            if entry is None:
                complexity[out] = [best, witness, producers]
            else:
                entry[2] += producers
                if (best, witness) < (entry[0], entry[1]):
                    entry[0], entry[1] = best, witness
    census = {length: CensusRow(h, nh)
              for length, (h, nh) in sorted(census_counts.items())}
    table = {out: ComplexityEntry(out, best, witness, producers)
             for out, (best, witness, producers)
             in sorted(complexity.items(), key=lambda kv: (len(kv[0]), kv[0]))}
    return SweepSummary(max_length=max_length, budget=budget, census=census,
                        complexity=table,
                        steps_hist={l: dict(sorted(r.items()))
                                    for l, r in sorted(steps_hist.items())},
                        output_hist=dict(sorted(output_hist.items())))


# ---------------------------------------------------------------------------
# Aggregations over record streams
# ---------------------------------------------------------------------------

def halting_census(records: Iterable[RunRecord]) -> dict[int, CensusRow]:
    """Per-length halting counts; lengths must be completely covered."""
    counts: dict[int, list[int]] = {}
    for record in records:
        totals = counts.setdefault(record.length, [0, 0])
        totals[record.halted is False] += 1
    for length, (h, nh) in counts.items():
        expected = count_programs(length)
        if h + nh != expected:
            raise IncompleteCensusError(
                f"length {length}: saw {h + nh} records, "
                f"expected {expected}")
    return {length: CensusRow(h, nh)
            for length, (h, nh) in sorted(counts.items())}


def complexity_table(records: Iterable[RunRecord]) -> dict[str, ComplexityEntry]:
    """Shortest producer per output over the halting records.

    Ties on length break toward the smallest position.  Keys iterate in
    canonical bitstring order (length, then lexicographic).
    """
    working: dict[str, list] = {}
    for record in records:
        if not record.halted:
            continue
        entry = working.get(record.output)
        if entry is None:
            working[record.output] = [record.length, record.position, 1]
        else:
            entry[2] += 1
            if (record.length, record.position) < (entry[0], entry[1]):
                entry[0], entry[1] = record.length, record.position
    return {out: ComplexityEntry(out, best, witness, producers)
            for out, (best, witness, producers)
            in sorted(working.items(), key=lambda kv: (len(kv[0]), kv[0]))}


def histograms(records: Iterable[RunRecord],
               ) -> tuple[dict[int, dict[int, int]], dict[int, int]]:
    """(steps-by-length matrix, output-length histogram) over halting records."""
    steps_hist: dict[int, dict[int, int]] = {}
    output_hist: dict[int, int] = {}
    for record in records:
        if not record.halted:
            continue
        row = steps_hist.setdefault(record.length, {})
        row[record.steps] = row.get(record.steps, 0) + 1
        out_len = len(record.output)
        output_hist[out_len] = output_hist.get(out_len, 0) + 1
    return ({l: dict(sorted(r.items())) for l, r in sorted(steps_hist.items())},
            dict(sorted(output_hist.items())))


def trivial_bound(bits: str) -> tuple[Program, int]:
    """The always-available producer of a bitstring and its length.

    The empty string comes from ``skip``; anything else from assigning
    the string's canonical index to register 0.
    """
    if not bits:
        return SKIP, 1
    program = Assign(0, Num(string_to_nat(bits)))
    return program, program_length(program)


@dataclass(frozen=True, slots=True)
class OutputProbability:
    probability: Fraction
    complexity_bits: float


def algorithmic_probability(table: dict[str, ComplexityEntry], output: str,
                            total_halting: int) -> OutputProbability:
    """Producer share of one output, and -log2 of it as a complexity estimate."""
    entry = table.get(output)
    if entry is None:
        raise KeyError(f"output {output!r} not present in the table")
    p = Fraction(entry.producers, total_halting)
    return OutputProbability(p, -log2(p.numerator / p.denominator)
                             if p < 1 else 0.0)


# ---------------------------------------------------------------------------
# Program families
# ---------------------------------------------------------------------------

def _counting_loop(init: Program, bound: int, step: Program) -> Program:
    """init, then a loop stepping x[1] from 0 to bound around ``step``."""
    body = Seq(Assign(1, Add(Reg(1), Num(1))), step)
    return Seq(init, While(Lt(Reg(1), Num(bound)), body))


def family_program(family: str, n: int) -> Program:
    """One of the four generator families, instantiated at parameter n.

    ``pows2`` leaves 2**n in x[0]; ``fact`` leaves n!; ``expt`` leaves
    n**n; ``expt_pows2`` squares its way to n**(2**n).  All leave the
    loop counter n in x[1].
    """
    if n < 0:
        raise ValueError("family parameter must be nonnegative")
    if family == "pows2":
        return _counting_loop(Assign(0, Num(1)), n,
                              Assign(0, Mul(Reg(0), Num(2))))
    if family == "fact":
        return _counting_loop(Assign(0, Num(1)), n,
                              Assign(0, Mul(Reg(0), Reg(1))))
    if family == "expt":
        return _counting_loop(Assign(0, Num(1)), n,
                              Assign(0, Mul(Reg(0), Num(n))))
    if family == "expt_pows2":
        return _counting_loop(Assign(0, Num(n)), n,
                              Assign(0, Mul(Reg(0), Reg(0))))
    raise ValueError(f"unknown family {family!r}; "
                     f"expected one of {', '.join(FAMILIES)}")


FAMILIES = ("pows2", "fact", "expt", "expt_pows2")
