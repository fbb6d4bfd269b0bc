"""Constrained covering array generation with particle swarm search.

Build combinatorial interaction test suites for systems whose
configuration space carries forbidden value combinations.  The main
entry points are :func:`generate` for the swarm generator,
:func:`greedy_baseline` for the reference generator, and :func:`check`
for independent suite verification.
"""

from .combgen import (
    combination_count,
    count_by_enumeration,
    generate_combinations,
    iter_combinations,
)
from .estimators import GreedyGenerator, SwarmGenerator
from .generator import (
    BenchmarkRun,
    BenchmarkStats,
    GenerationReport,
    GenerationTimeout,
    StuckTuples,
    generate,
    run_benchmark,
)
from .model import (
    ConstraintSet,
    ForbiddenTuple,
    ModelError,
    SystemModel,
    TestCase,
    TestSuite,
    as_model,
    check_row,
    classify,
    completes_forbidden,
    constraint_notation,
    find_valid_row,
    has_valid_extension,
    parse_model,
    render_model,
    to_notation,
    violates,
)
from .mopso import (
    ConfigError,
    Fitness,
    NoFeasibleRow,
    ParetoSet,
    Particle,
    SwarmConfig,
    dominates,
    evaluate,
    neighbour_refine,
    run_swarm_round,
    update_position,
    update_velocity,
)
from .tuplestore import CapacityError, TupleStore
from .verify import VerificationResult, check, greedy_baseline

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BenchmarkRun",
    "BenchmarkStats",
    "CapacityError",
    "ConfigError",
    "ConstraintSet",
    "Fitness",
    "ForbiddenTuple",
    "GenerationReport",
    "GenerationTimeout",
    "GreedyGenerator",
    "ModelError",
    "NoFeasibleRow",
    "ParetoSet",
    "Particle",
    "StuckTuples",
    "SwarmConfig",
    "SwarmGenerator",
    "SystemModel",
    "TestCase",
    "TestSuite",
    "TupleStore",
    "VerificationResult",
    "as_model",
    "check",
    "check_row",
    "classify",
    "combination_count",
    "completes_forbidden",
    "constraint_notation",
    "count_by_enumeration",
    "dominates",
    "evaluate",
    "find_valid_row",
    "generate",
    "generate_combinations",
    "greedy_baseline",
    "has_valid_extension",
    "iter_combinations",
    "neighbour_refine",
    "parse_model",
    "render_model",
    "run_benchmark",
    "run_swarm_round",
    "to_notation",
    "update_position",
    "update_velocity",
    "violates",
]
