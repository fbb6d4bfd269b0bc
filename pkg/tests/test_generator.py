"""Tests for one-row-at-a-time generation and the benchmark driver."""

from __future__ import annotations

import itertools

import pytest

from swarmcover.generator import (
    BenchmarkStats,
    GenerationTimeout,
    StuckTuples,
    generate,
    run_benchmark,
)
from swarmcover.model import (
    ConstraintSet,
    ForbiddenTuple,
    SystemModel,
    parse_model,
    violates,
)
from swarmcover.mopso import SwarmConfig

RUNNING_EXAMPLE = """\
2
3
2 2 2
2
2 0:0 2:0
2 1:0 2:1
"""

FAST = SwarmConfig(particles=8, workers=4, max_iterations=60, stagnation_window=10)


def all_pairs_covered(suite, model):
    """Brute-force coverage check used as an oracle for small models."""
    want = set()
    for pa, pb in itertools.combinations(range(model.k), 2):
        for va in range(model.values[pa]):
            for vb in range(model.values[pb]):
                row = [-1] * model.k
                row[pa], row[pb] = va, vb
                want.add(((pa, pb), (va, vb)))
    got = set()
    for row in suite:
        for pa, pb in itertools.combinations(range(model.k), 2):
            got.add(((pa, pb), (row[pa], row[pb])))
    return want, got


class TestGenerate:
    def test_running_example_complete_report(self):
        model = parse_model(RUNNING_EXAMPLE)
        report = generate(model, FAST)
        assert report.complete
        assert report.size >= 4
        assert report.initial_tuples == 12
        assert report.pruned_tuples == 2
        assert report.unreachable_tuples == 1
        assert report.covered_tuples == 9
        assert report.uncovered_tuples == 0
        assert report.seed == FAST.rng_seed
        assert all(violates(row, model.constraints) == 0 for row in report.suite)

    def test_every_round_makes_progress(self):
        model = parse_model(RUNNING_EXAMPLE)
        report = generate(model, FAST)
        assert len(report.coverage_deltas) == report.rounds == report.size
        assert all(delta >= 1 for delta in report.coverage_deltas)
        assert sum(report.coverage_deltas) == report.covered_tuples

    def test_unconstrained_pairwise(self):
        model = SystemModel(t=2, values=(2, 2, 2, 2))
        report = generate(model, FAST)
        want, got = all_pairs_covered(report.suite, model)
        assert want <= got
        assert report.pruned_tuples == 0
        assert report.unreachable_tuples == 0

    def test_rows_are_in_range(self):
        model = SystemModel(t=2, values=(2, 3, 4))
        report = generate(model, FAST)
        for row in report.suite:
            assert all(0 <= v < model.values[p] for p, v in enumerate(row))

    def test_unsatisfiable_model_yields_empty_suite(self):
        # no valid row exists, so every tuple is unreachable and the
        # empty suite already covers everything that can be covered
        cs = ConstraintSet(
            (
                ForbiddenTuple(params=(0,), values=(0,)),
                ForbiddenTuple(params=(0,), values=(1,)),
            )
        )
        model = SystemModel(t=2, values=(2, 2), constraints=cs)
        report = generate(model, FAST)
        assert report.complete
        assert report.size == 0
        assert report.pruned_tuples == 4
        assert report.unreachable_tuples == 0

    def test_wall_time_and_seed_recorded(self):
        model = SystemModel(t=2, values=(2, 2))
        cfg = SwarmConfig(particles=4, workers=2, rng_seed=99)
        report = generate(model, cfg)
        assert report.wall_time_s >= 0
        assert report.seed == 99

    def test_same_seed_reproduces_suite(self):
        model = parse_model(RUNNING_EXAMPLE)
        first = generate(model, FAST)
        second = generate(model, FAST)
        assert first.suite == second.suite
        assert first.coverage_deltas == second.coverage_deltas

    def test_timeout_raises_with_partial_report(self):
        model = SystemModel(t=2, values=(4, 4, 4, 4, 4))
        cfg = SwarmConfig(particles=8, workers=4, timeout=1e-9)
        with pytest.raises(GenerationTimeout) as excinfo:
            generate(model, cfg)
        report = excinfo.value.report
        assert report.uncovered_tuples > 0
        assert excinfo.value.open_tuples

    def test_invalid_config_rejected_up_front(self):
        model = SystemModel(t=2, values=(2, 2))
        from swarmcover.mopso import ConfigError

        with pytest.raises(ConfigError):
            generate(model, SwarmConfig(particles=5, workers=2))


class TestStuck:
    """Retry accounting, driven by a swarm stub that fails on demand."""

    def test_gives_up_after_retries(self, monkeypatch):
        from swarmcover import generator
        from swarmcover.mopso import NoFeasibleRow

        calls = []

        def always_fails(store, constraints, cfg, seed, deadline=None):
            calls.append(1)
            raise NoFeasibleRow("stubbed")

        monkeypatch.setattr(generator, "run_swarm_round", always_fails)
        model = parse_model(RUNNING_EXAMPLE)
        cfg = SwarmConfig(particles=4, workers=2, retries=2)
        with pytest.raises(StuckTuples) as excinfo:
            generate(model, cfg)
        assert len(calls) == 3  # first try plus two retries
        assert excinfo.value.report.size == 0
        assert excinfo.value.open_tuples
        assert "uncoverable after retries" in str(excinfo.value)

    def test_transient_failures_are_retried(self, monkeypatch):
        from swarmcover import generator
        from swarmcover.mopso import NoFeasibleRow, run_swarm_round

        failures = iter([True, True])

        def flaky(store, constraints, cfg, seed, deadline=None):
            if next(failures, False):
                raise NoFeasibleRow("stubbed")
            return run_swarm_round(store, constraints, cfg, seed, deadline)

        monkeypatch.setattr(generator, "run_swarm_round", flaky)
        model = parse_model(RUNNING_EXAMPLE)
        cfg = SwarmConfig(
            particles=8, workers=4, max_iterations=60, stagnation_window=10, retries=2
        )
        report = generate(model, cfg)
        assert report.complete
        # the two stubbed failures still count as rounds
        assert report.rounds == report.size + 2


class TestBenchmark:
    def test_gpl_reaches_known_optimum(self):
        stats = run_benchmark("gpl", FAST, repetitions=2)
        assert isinstance(stats, BenchmarkStats)
        assert stats.best_size >= 14
        assert all(run.verified for run in stats.runs)
        assert len({run.seed for run in stats.runs}) == 2

    def test_stats_aggregation(self):
        stats = run_benchmark("gpl-constrained", FAST, repetitions=2)
        assert stats.mean_size >= stats.best_size
        assert stats.mean_millis > 0
        assert [run.rep for run in stats.runs] == [0, 1]

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            run_benchmark("no-such-system", FAST)

    def test_bad_repetitions(self):
        with pytest.raises(ValueError, match="repetitions"):
            run_benchmark("gpl", FAST, repetitions=0)

    def test_benchmark_is_seed_reproducible(self):
        a = run_benchmark("gpl-constrained", FAST, repetitions=1)
        b = run_benchmark("gpl-constrained", FAST, repetitions=1)
        assert a.runs[0].size == b.runs[0].size
        assert a.runs[0].seed == b.runs[0].seed
