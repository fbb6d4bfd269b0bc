"""Multi-objective particle swarm search for a single test row.

Each round keeps a fixed-size swarm of candidate rows.  A particle moves
through the discrete value grid under the usual inertia / cognitive /
social velocity rule, positions are rounded and clamped back into range,
and fitness is the pair (constraint violations, newly covered tuples).
Candidates enter a Pareto set; the round's winner is the admitted row
with no violations that covers the most open tuples, polished by a
deterministic neighbour search.

Fitness evaluation fans out over a thread pool in fixed contiguous
blocks and the per-block results are merged in block order, so the
worker count never changes which row wins.  Every particle draws from
its own seeded random stream, which keeps runs reproducible for any
worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import ConstraintSet, TestCase
from .tuplestore import TupleStore

__all__ = [
    "ConfigError",
    "NoFeasibleRow",
    "RoundTimeout",
    "Fitness",
    "SwarmConfig",
    "Particle",
    "ParetoSet",
    "dominates",
    "evaluate",
    "update_velocity",
    "update_position",
    "neighbour_refine",
    "run_swarm_round",
]


class ConfigError(ValueError):
    """Raised when a swarm configuration is inconsistent."""


class NoFeasibleRow(RuntimeError):
    """Raised when a round finds no violation-free row with new coverage."""


class RoundTimeout(RuntimeError):
    """Raised inside a round when the caller's deadline passes."""


@dataclass(frozen=True, slots=True)
class Fitness:
    """Row quality: constraint violations down, new coverage up."""

    violations: int
    coverage: int

    @property
    def lex_key(self) -> tuple[int, int]:
        """Sort key ranking fewer violations first, then more coverage."""
        return (self.violations, -self.coverage)

    def better_than(self, other: "Fitness") -> bool:
        return self.lex_key < other.lex_key


def dominates(a: Fitness, b: Fitness) -> bool:
    """Pareto dominance: ``a`` at least as good everywhere, better somewhere."""
    if a.violations > b.violations or a.coverage < b.coverage:
        return False
    return a.violations < b.violations or a.coverage > b.coverage


@dataclass(frozen=True)
class SwarmConfig:
    """Knobs for one generation run.

    ``particles`` must divide evenly into ``workers`` blocks; the block
    layout is part of the deterministic merge contract.  ``retries`` is
    the number of consecutive failed rounds tolerated before generation
    gives up, and ``timeout`` (seconds) bounds a whole generation run.
    """

    particles: int = 80
    workers: int = 8
    inertia: float = 0.7
    c1: float = 1.5
    c2: float = 1.5
    max_iterations: int = 500
    stagnation_window: int = 30
    retries: int = 3
    rng_seed: int = 0
    timeout: float | None = None

    def validate(self) -> None:
        if self.particles < 1:
            raise ConfigError(f"particles must be >= 1, got {self.particles}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.particles % self.workers != 0:
            raise ConfigError(
                f"particles ({self.particles}) must be a multiple of "
                f"workers ({self.workers})"
            )
        if self.inertia < 0:
            raise ConfigError(f"inertia must be >= 0, got {self.inertia}")
        if self.c1 < 0 or self.c2 < 0:
            raise ConfigError("acceleration coefficients must be >= 0")
        if self.max_iterations < 1:
            raise ConfigError(
                f"max_iterations must be >= 1, got {self.max_iterations}"
            )
        if self.stagnation_window < 1:
            raise ConfigError(
                f"stagnation_window must be >= 1, got {self.stagnation_window}"
            )
        if self.retries < 0:
            raise ConfigError(f"retries must be >= 0, got {self.retries}")
        if self.timeout is not None and self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")


@dataclass
class Particle:
    """Mutable swarm member: position, velocity and personal best."""

    position: np.ndarray
    velocity: np.ndarray
    rng: np.random.Generator
    fitness: Fitness | None = None
    best_position: np.ndarray = field(default=None)  # type: ignore[assignment]
    best_fitness: Fitness | None = None


class ParetoSet:
    """Insertion-ordered set of mutually non-dominated candidate rows.

    A candidate is admitted only if no resident dominates it and no
    resident already has the same fitness; residents it dominates are
    evicted.  When full, the longest-resident entry makes room.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._entries: list[tuple[np.ndarray, Fitness]] = []

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def offer(self, position: np.ndarray, fitness: Fitness) -> bool:
        """Try to admit a candidate; True if the set changed."""
        for _, resident in self._entries:
            if resident == fitness or dominates(resident, fitness):
                return False
        self._entries = [
            (p, f) for p, f in self._entries if not dominates(fitness, f)
        ]
        self._entries.append((position.copy(), fitness))
        if len(self._entries) > self.capacity:
            self._entries.pop(0)
        return True

    def best_feasible(self) -> tuple[np.ndarray, Fitness] | None:
        """Violation-free entry with the most coverage, oldest on ties."""
        best = None
        for position, fitness in self._entries:
            if fitness.violations != 0:
                continue
            if best is None or fitness.coverage > best[1].coverage:
                best = (position, fitness)
        return best


def evaluate(row: TestCase, store: TupleStore, constraints: ConstraintSet) -> Fitness:
    """Fitness of a row against the current store state."""
    return Fitness(
        violations=constraints.violations(row),
        coverage=store.covered_count(row),
    )


def update_velocity(
    particle: Particle,
    gbest: np.ndarray,
    cfg: SwarmConfig,
    rng: np.random.Generator,
    vmax: np.ndarray,
) -> np.ndarray:
    """Inertia plus cognitive and social pull, clamped to ``±vmax``.

    ``r1`` is drawn for the cognitive term and then ``r2`` for the social
    term, one uniform [0, 1) variate per dimension each.
    """
    k = len(particle.position)
    r1 = rng.random(k)
    r2 = rng.random(k)
    v = (
        cfg.inertia * particle.velocity
        + cfg.c1 * r1 * (particle.best_position - particle.position)
        + cfg.c2 * r2 * (gbest - particle.position)
    )
    return np.clip(v, -vmax, vmax)


def update_position(
    position: np.ndarray, velocity: np.ndarray, vmax: np.ndarray
) -> np.ndarray:
    """Round the moved position to the grid and clamp into range.

    Rounding follows numpy ``rint`` (ties to even); the result is clamped
    per dimension to ``[0, values[d] - 1]`` so positions are always valid
    rows by construction.
    """
    moved = np.rint(position + velocity)
    np.clip(moved, 0, vmax, out=moved)
    return moved.astype(np.int64)


def neighbour_refine(
    row: TestCase, store: TupleStore, constraints: ConstraintSet
) -> TestCase:
    """Greedy one-value-at-a-time polish of a candidate row.

    Scans the parameters in order; for each one, tries every alternative
    value and keeps the best strict improvement (fewer violations first,
    then more coverage).  Deterministic, and never returns a row worse
    than the input.
    """
    pos = list(row)
    best_fit = evaluate(pos, store, constraints)
    for d, cardinality in enumerate(store.values):
        original = pos[d]
        best_value = original
        for v in range(cardinality):
            if v == original:
                continue
            pos[d] = v
            fit = evaluate(pos, store, constraints)
            if fit.better_than(best_fit):
                best_fit = fit
                best_value = v
        pos[d] = best_value
    return tuple(pos)


def _evaluate_block(
    particles: list[Particle],
    start: int,
    store: TupleStore,
    constraints: ConstraintSet,
) -> tuple[list[Fitness], tuple[tuple[int, int], int]]:
    """Evaluate a contiguous particle block; return fits and block best."""
    fits = []
    best_key = None
    best_index = -1
    for offset, particle in enumerate(particles):
        row = particle.position.tolist()
        fit = Fitness(
            violations=constraints.violations(row),
            coverage=store.covered_count(row),
        )
        fits.append(fit)
        if best_key is None or fit.lex_key < best_key:
            best_key = fit.lex_key
            best_index = start + offset
    return fits, (best_key, best_index)


def _evaluate_swarm(
    particles: list[Particle],
    store: TupleStore,
    constraints: ConstraintSet,
    executor: ThreadPoolExecutor,
    workers: int,
) -> int:
    """Evaluate all particles in ``workers`` blocks; return the best index.

    Block results are merged in ascending block order with strict
    improvement, which reproduces a sequential first-best scan no matter
    how many workers ran.
    """
    block = len(particles) // workers
    tasks = [
        (particles[b * block : (b + 1) * block], b * block, store, constraints)
        for b in range(workers)
    ]
    results = list(executor.map(lambda args: _evaluate_block(*args), tasks))
    best_key = None
    best_index = -1
    for b, (fits, (block_key, block_index)) in enumerate(results):
        for offset, fit in enumerate(fits):
            particles[b * block + offset].fitness = fit
        if best_key is None or block_key < best_key:
            best_key = block_key
            best_index = block_index
    return best_index


def run_swarm_round(
    store: TupleStore,
    constraints: ConstraintSet,
    cfg: SwarmConfig,
    seed: "int | np.random.SeedSequence",
    deadline: float | None = None,
) -> tuple[TestCase, Fitness]:
    """Search for one violation-free row that covers open tuples.

    Runs the swarm until the iteration cap or until the Pareto set has
    not changed for ``stagnation_window`` iterations, then refines the
    best feasible candidate.  Raises :class:`NoFeasibleRow` if no
    violation-free row covering at least one open tuple was found, and
    :class:`RoundTimeout` if ``deadline`` (a ``time.monotonic`` instant)
    passes mid-round.
    """
    cfg.validate()
    if store.is_empty():
        raise ValueError("store has no open tuples left to cover")

    values = np.asarray(store.values, dtype=np.int64)
    vmax_int = values - 1
    vmax_float = vmax_int.astype(np.float64)
    k = len(values)

    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    streams = seed.spawn(cfg.particles)

    particles = []
    for child in streams:
        rng = np.random.default_rng(child)
        position = rng.integers(0, values, dtype=np.int64)
        particles.append(
            Particle(position=position, velocity=np.zeros(k), rng=rng)
        )

    pareto = ParetoSet(capacity=cfg.particles)
    remaining = store.uncovered_total

    with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        best_index = _evaluate_swarm(
            particles, store, constraints, executor, cfg.workers
        )
        for particle in particles:
            particle.best_position = particle.position.copy()
            particle.best_fitness = particle.fitness
        gbest_position = particles[best_index].position.copy()
        gbest_fitness = particles[best_index].fitness
        for particle in particles:
            pareto.offer(particle.position, particle.fitness)

        iterations = 0
        stall = 0
        while iterations < cfg.max_iterations and stall < cfg.stagnation_window:
            if gbest_fitness.violations == 0 and gbest_fitness.coverage == remaining:
                break
            if deadline is not None and time.monotonic() > deadline:
                raise RoundTimeout("deadline passed mid-round")
            for particle in particles:
                particle.velocity = update_velocity(
                    particle, gbest_position, cfg, particle.rng, vmax_float
                )
                particle.position = update_position(
                    particle.position, particle.velocity, vmax_int
                )
            best_index = _evaluate_swarm(
                particles, store, constraints, executor, cfg.workers
            )
            for particle in particles:
                if particle.fitness.better_than(particle.best_fitness):
                    particle.best_fitness = particle.fitness
                    particle.best_position = particle.position.copy()
            iteration_best = particles[best_index]
            if iteration_best.fitness.better_than(gbest_fitness):
                gbest_fitness = iteration_best.fitness
                gbest_position = iteration_best.position.copy()
            improved = False
            for particle in particles:
                if pareto.offer(particle.position, particle.fitness):
                    improved = True
            stall = 0 if improved else stall + 1
            iterations += 1

    winner = pareto.best_feasible()
    if winner is None:
        raise NoFeasibleRow(
            "no violation-free candidate row emerged from the swarm"
        )
    refined = neighbour_refine(tuple(winner[0].tolist()), store, constraints)
    fitness = evaluate(refined, store, constraints)
    if fitness.violations != 0 or fitness.coverage < 1:
        raise NoFeasibleRow(
            "best feasible candidate covers no open tuples "
            f"(coverage {fitness.coverage})"
        )
    return refined, fitness
