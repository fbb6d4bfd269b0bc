"""Command line interface.

Exit codes: 0 success, 1 usage or input errors, 2 generation gave up on
uncoverable tuples, 3 generation timed out, 4 verification failed.
Generated suites go to stdout (or ``--out``); progress summaries go to
stderr, so suite output is byte stable for a fixed seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .combgen import count_by_enumeration, iter_combinations
from .generator import GenerationTimeout, StuckTuples, generate, run_benchmark
from .model import ModelError, TestSuite, parse_model, to_notation
from .mopso import ConfigError, SwarmConfig
from .tuplestore import CapacityError, TupleStore

_DEFAULTS = SwarmConfig()


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class _VersionAction(argparse.Action):
    def __init__(self, option_strings, dest, **kwargs):
        super().__init__(option_strings, dest, nargs=0, **kwargs)

    def __call__(self, parser, namespace, values, option_string=None):
        from . import __version__
        from .corpus import corpus_hash

        print(f"swarmcover {__version__} (corpus {corpus_hash()})")
        parser.exit(0)


def _add_swarm_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("swarm options")
    group.add_argument("--seed", type=int, default=0, help="master RNG seed")
    group.add_argument(
        "--particles", type=int, default=_DEFAULTS.particles, help="swarm size"
    )
    group.add_argument(
        "--workers",
        type=int,
        default=_DEFAULTS.workers,
        help="evaluation threads; must divide the swarm size",
    )
    group.add_argument("--inertia", type=float, default=_DEFAULTS.inertia)
    group.add_argument("--c1", type=float, default=_DEFAULTS.c1)
    group.add_argument("--c2", type=float, default=_DEFAULTS.c2)
    group.add_argument(
        "--max-iterations", type=int, default=_DEFAULTS.max_iterations
    )
    group.add_argument(
        "--stagnation", type=int, default=_DEFAULTS.stagnation_window,
        help="stop a round after this many iterations without Pareto progress",
    )
    group.add_argument(
        "--retries", type=int, default=_DEFAULTS.retries,
        help="consecutive failed rounds tolerated before giving up",
    )
    group.add_argument(
        "--timeout", type=float, default=None, help="wall-clock budget in seconds"
    )


def _config_from(args: argparse.Namespace) -> SwarmConfig:
    return SwarmConfig(
        particles=args.particles,
        workers=args.workers,
        inertia=args.inertia,
        c1=args.c1,
        c2=args.c2,
        max_iterations=args.max_iterations,
        stagnation_window=args.stagnation,
        retries=args.retries,
        rng_seed=args.seed,
        timeout=args.timeout,
    )


def _read_model(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc}") from None
    return parse_model(text)


def _render_suite(suite: TestSuite, fmt: str, t: int) -> str:
    if fmt == "csv":
        return suite.render_csv()
    if fmt == "json-lines":
        return suite.render_json_lines()
    return suite.render(t)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _print_open_tuples(open_tuples, limit: int = 20) -> None:
    for params, values in open_tuples[:limit]:
        print(
            "  " + " ".join(f"{p}:{v}" for p, v in zip(params, values)),
            file=sys.stderr,
        )
    if len(open_tuples) > limit:
        print(f"  ... and {len(open_tuples) - limit} more", file=sys.stderr)


def _cmd_generate(args: argparse.Namespace) -> int:
    model = _read_model(args.model)
    cfg = _config_from(args)
    cfg.validate()
    try:
        report = generate(model, cfg)
    except StuckTuples as exc:
        print(f"generate: {exc}", file=sys.stderr)
        _print_open_tuples(exc.open_tuples)
        return 2
    except GenerationTimeout as exc:
        print(f"generate: {exc}", file=sys.stderr)
        _print_open_tuples(exc.open_tuples)
        _emit(_render_suite(exc.report.suite, args.format, model.t), args.out)
        return 3
    _emit(_render_suite(report.suite, args.format, model.t), args.out)
    print(
        f"{to_notation(model)}: {report.suite.size} rows in {report.rounds} rounds, "
        f"{report.covered_tuples} tuples covered ({report.pruned_tuples} pruned, "
        f"{report.unreachable_tuples} unreachable) in {report.wall_time_s:.2f}s",
        file=sys.stderr,
    )
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    model = _read_model(args.model)
    try:
        suite_text = Path(args.suite).read_text()
    except OSError as exc:
        raise ModelError(f"cannot read {args.suite}: {exc}") from None
    suite = TestSuite.parse(suite_text)
    from .verify import check

    result = check(suite, model)
    if args.report == "json":
        print(result.to_json())
    else:
        print(result.summary())
        for params, values in result.missing[:10]:
            print("  missing " + " ".join(f"{p}:{v}" for p, v in zip(params, values)))
        for row, constraint in result.violating_rows[:10]:
            print(f"  row {row} violates forbidden tuple {constraint}")
        for row, reason in result.invalid_rows[:10]:
            print(f"  row {row} invalid: {reason}")
    return 0 if result.passed else 4


def _cmd_bench(args: argparse.Namespace) -> int:
    from .corpus import names

    if args.list:
        for name in names():
            print(name)
        return 0
    if not args.names:
        print("bench: no corpus entries named (try --list)", file=sys.stderr)
        return 1
    cfg = _config_from(args)
    cfg.validate()
    lines = ["name,rep,seed,size,millis,verified"]
    for name in args.names:
        try:
            stats = run_benchmark(name, cfg, repetitions=args.reps)
        except KeyError:
            print(f"bench: unknown corpus entry {name!r}", file=sys.stderr)
            return 1
        except RuntimeError as exc:
            print(f"bench: {exc}", file=sys.stderr)
            return 4
        for run in stats.runs:
            lines.append(
                f"{run.name},{run.rep},{run.seed},{run.size},"
                f"{run.millis:.1f},{str(run.verified).lower()}"
            )
        print(
            f"{name}: best {stats.best_size}, mean {stats.mean_size:.1f} rows, "
            f"mean {stats.mean_millis:.0f} ms over {len(stats.runs)} runs",
            file=sys.stderr,
        )
    _emit("\n".join(lines) + "\n", args.csv)
    return 0


def _cmd_tuples(args: argparse.Namespace) -> int:
    model = _read_model(args.model)
    store = TupleStore.build(model)
    store.prune_constrained(model.constraints)
    store.prune_unreachable(model)
    for params, values, status in store.iter_entries():
        if args.status != "all" and status != args.status:
            continue
        print(" ".join(f"{p}:{v}" for p, v in zip(params, values)) + f" {status}")
    return 0


def _cmd_combinations(args: argparse.Namespace) -> int:
    if args.count:
        print(count_by_enumeration(args.k, args.t))
        return 0
    for combo in iter_combinations(args.k, args.t):
        print(" ".join(str(p) for p in combo))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="swarmcover",
        description="Generate and verify constrained covering arrays.",
    )
    parser.add_argument(
        "--version", action=_VersionAction, help="print version and corpus digest"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate a covering suite")
    p_gen.add_argument("model", help="model file")
    p_gen.add_argument("--out", help="write the suite here instead of stdout")
    p_gen.add_argument(
        "--format",
        choices=("plain", "csv", "json-lines"),
        default="plain",
        help="suite output format",
    )
    _add_swarm_flags(p_gen)
    p_gen.set_defaults(func=_cmd_generate)

    p_ver = sub.add_parser("verify", help="verify a suite against a model")
    p_ver.add_argument("model", help="model file")
    p_ver.add_argument("suite", help="suite file in plain format")
    p_ver.add_argument(
        "--report", choices=("text", "json"), default="text", help="report format"
    )
    p_ver.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="run corpus benchmarks")
    p_bench.add_argument("names", nargs="*", help="corpus entry names")
    p_bench.add_argument("--list", action="store_true", help="list corpus entries")
    p_bench.add_argument("--reps", type=int, default=1, help="repetitions per entry")
    p_bench.add_argument("--csv", help="write the CSV here instead of stdout")
    _add_swarm_flags(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_tuples = sub.add_parser("tuples", help="dump the pruned tuple store")
    p_tuples.add_argument("model", help="model file")
    p_tuples.add_argument(
        "--status",
        choices=("all", "open", "covered", "removed", "unreachable"),
        default="all",
        help="only show tuples with this status",
    )
    p_tuples.set_defaults(func=_cmd_tuples)

    p_comb = sub.add_parser(
        "combinations", help="enumerate t-way parameter combinations"
    )
    p_comb.add_argument("-k", type=int, required=True, help="parameter count")
    p_comb.add_argument("-t", type=int, required=True, help="strength")
    p_comb.add_argument(
        "--count",
        action="store_true",
        help="run the full enumeration but print only the total",
    )
    p_comb.set_defaults(func=_cmd_combinations)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, ConfigError, CapacityError, ValueError) as exc:
        print(f"swarmcover: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
