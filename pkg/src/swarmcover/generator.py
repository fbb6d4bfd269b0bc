"""One-row-at-a-time suite construction driven by swarm rounds.

Each round asks the swarm for one violation-free row that covers open
tuples, marks the coverage, and repeats until the store is exhausted.
A round that fails is retried with a fresh seed a bounded number of
times; repeated failure raises :class:`StuckTuples` with the tuples that
could not be covered.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .model import SystemModel, TestSuite
from .mopso import NoFeasibleRow, RoundTimeout, SwarmConfig, run_swarm_round
from .tuplestore import TupleStore

__all__ = [
    "StuckTuples",
    "GenerationTimeout",
    "GenerationReport",
    "BenchmarkRun",
    "BenchmarkStats",
    "generate",
    "run_benchmark",
]


@dataclass(frozen=True)
class GenerationReport:
    """Outcome of a generation run, complete or partial.

    ``pruned_tuples`` counts tuples that embed a forbidden tuple;
    ``unreachable_tuples`` counts tuples no violation-free row can
    cover at all.  On a complete run ``covered_tuples`` equals
    ``initial_tuples - pruned_tuples - unreachable_tuples``.
    """

    suite: TestSuite
    seed: int
    rounds: int
    wall_time_s: float
    initial_tuples: int
    pruned_tuples: int
    unreachable_tuples: int
    covered_tuples: int
    uncovered_tuples: int
    coverage_deltas: tuple[int, ...]

    @property
    def complete(self) -> bool:
        return self.uncovered_tuples == 0

    @property
    def size(self) -> int:
        return self.suite.size


class StuckTuples(RuntimeError):
    """Raised when repeated rounds cannot cover the remaining tuples."""

    def __init__(self, open_tuples, report: GenerationReport):
        self.open_tuples = list(open_tuples)
        self.report = report
        preview = ", ".join(
            " ".join(f"{p}:{v}" for p, v in zip(params, values))
            for params, values in self.open_tuples[:5]
        )
        suffix = "..." if len(self.open_tuples) > 5 else ""
        super().__init__(
            f"{len(self.open_tuples)} tuples left uncoverable after retries: "
            f"{preview}{suffix}"
        )


class GenerationTimeout(RuntimeError):
    """Raised when the configured time budget runs out mid-generation."""

    def __init__(self, open_tuples, report: GenerationReport):
        self.open_tuples = list(open_tuples)
        self.report = report
        super().__init__(
            f"timed out with {len(self.open_tuples)} tuples still uncovered "
            f"after {report.rounds} rounds"
        )


def generate(model: SystemModel, cfg: SwarmConfig | None = None) -> GenerationReport:
    """Generate a covering suite for ``model``.

    Builds the tuple store, prunes tuples that embed a forbidden tuple,
    then appends swarm-built rows until nothing is left to cover.  Every
    appended row is violation free and covers at least one previously
    open tuple, so the suite grows by bounded, checkable progress.
    """
    cfg = cfg if cfg is not None else SwarmConfig()
    cfg.validate()
    start = time.monotonic()
    deadline = start + cfg.timeout if cfg.timeout is not None else None

    store = TupleStore.build(model)
    initial = store.initial_total
    pruned = store.prune_constrained(model.constraints)
    unreachable = store.prune_unreachable(model)

    rows: list[tuple[int, ...]] = []
    deltas: list[int] = []
    rounds = 0
    consecutive_failures = 0
    master = np.random.SeedSequence(cfg.rng_seed)

    def report_so_far() -> GenerationReport:
        return GenerationReport(
            suite=TestSuite(rows=tuple(rows)),
            seed=cfg.rng_seed,
            rounds=rounds,
            wall_time_s=time.monotonic() - start,
            initial_tuples=initial,
            pruned_tuples=pruned,
            unreachable_tuples=unreachable,
            covered_tuples=store.covered_total,
            uncovered_tuples=store.uncovered_total,
            coverage_deltas=tuple(deltas),
        )

    while not store.is_empty():
        if deadline is not None and time.monotonic() > deadline:
            raise GenerationTimeout(store.open_tuples(), report_so_far())
        round_seed = master.spawn(1)[0]
        rounds += 1
        try:
            row, fitness = run_swarm_round(
                store, model.constraints, cfg, round_seed, deadline
            )
        except NoFeasibleRow:
            consecutive_failures += 1
            if consecutive_failures > cfg.retries:
                raise StuckTuples(store.open_tuples(), report_so_far()) from None
            continue
        except RoundTimeout:
            raise GenerationTimeout(store.open_tuples(), report_so_far()) from None
        consecutive_failures = 0
        newly = store.mark_covered(row)
        if newly != fitness.coverage:
            raise AssertionError(
                f"round reported coverage {fitness.coverage} but marking "
                f"covered {newly} tuples"
            )
        rows.append(row)
        deltas.append(newly)

    return report_so_far()


@dataclass(frozen=True)
class BenchmarkRun:
    """One benchmark repetition."""

    name: str
    rep: int
    seed: int
    size: int
    millis: float
    verified: bool


@dataclass(frozen=True)
class BenchmarkStats:
    """Aggregated repetitions of one corpus benchmark."""

    name: str
    runs: tuple[BenchmarkRun, ...]

    @property
    def best_size(self) -> int:
        return min(run.size for run in self.runs)

    @property
    def mean_size(self) -> float:
        return sum(run.size for run in self.runs) / len(self.runs)

    @property
    def mean_millis(self) -> float:
        return sum(run.millis for run in self.runs) / len(self.runs)


def run_benchmark(
    name: str, cfg: SwarmConfig | None = None, repetitions: int = 1
) -> BenchmarkStats:
    """Run a named corpus model ``repetitions`` times and aggregate.

    Run seeds are derived from ``cfg.rng_seed`` so a benchmark is itself
    reproducible.  Every run is checked by the independent verifier
    before it is counted; a verification failure raises, because it
    means the generator is broken, not the benchmark.
    """
    from .corpus import load_model
    from .verify import check

    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    cfg = cfg if cfg is not None else SwarmConfig()
    model = load_model(name)
    seeds = np.random.SeedSequence(cfg.rng_seed).generate_state(repetitions)
    runs = []
    for rep, seed in enumerate(seeds):
        run_cfg = replace(cfg, rng_seed=int(seed))
        begin = time.monotonic()
        report = generate(model, run_cfg)
        millis = (time.monotonic() - begin) * 1000.0
        result = check(report.suite, model)
        if not result.passed:
            raise RuntimeError(
                f"benchmark run {name} rep {rep} failed verification: "
                f"{result.summary()}"
            )
        runs.append(
            BenchmarkRun(
                name=name,
                rep=rep,
                seed=int(seed),
                size=report.suite.size,
                millis=millis,
                verified=True,
            )
        )
    return BenchmarkStats(name=name, runs=tuple(runs))
