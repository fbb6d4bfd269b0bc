"""Independent suite verification and a greedy reference generator.

The checker enumerates demanded tuples with ``itertools`` directly and
keeps its own accounting, deliberately sharing no code with the tuple
store: a bookkeeping bug there cannot hide a coverage gap here.  The
greedy generator builds rows by locally maximal value choices and serves
as the quality baseline for the swarm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .model import (
    ConstraintSet,
    SystemModel,
    TestSuite,
    completes_forbidden,
    find_valid_row,
    has_valid_extension,
)

__all__ = ["VerificationResult", "check", "greedy_baseline"]


@dataclass(frozen=True)
class VerificationResult:
    """Everything the checker found, pass or fail."""

    passed: bool
    demanded_tuples: int
    covered_tuples: int
    excluded_tuples: int
    missing: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    violating_rows: tuple[tuple[int, int], ...]
    invalid_rows: tuple[tuple[int, str], ...]

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        parts = [
            f"{state}: {self.covered_tuples}/{self.demanded_tuples} tuples covered",
            f"{self.excluded_tuples} excluded by constraints",
        ]
        if self.missing:
            parts.append(f"{len(self.missing)} missing")
        if self.violating_rows:
            parts.append(f"{len(self.violating_rows)} constraint violations")
        if self.invalid_rows:
            parts.append(f"{len(self.invalid_rows)} malformed rows")
        return ", ".join(parts)

    def to_json(self) -> str:
        return json.dumps(
            {
                "passed": self.passed,
                "demanded_tuples": self.demanded_tuples,
                "covered_tuples": self.covered_tuples,
                "excluded_tuples": self.excluded_tuples,
                "missing": [
                    {"params": list(p), "values": list(v)} for p, v in self.missing
                ],
                "violating_rows": [
                    {"row": r, "constraint": c} for r, c in self.violating_rows
                ],
                "invalid_rows": [
                    {"row": r, "reason": reason} for r, reason in self.invalid_rows
                ],
            },
            indent=2,
        )


def _embeds_forbidden(
    combo: tuple[int, ...], values: tuple[int, ...], constraints: ConstraintSet
) -> bool:
    """True if the value tuple fully contains some forbidden tuple."""
    assigned = dict(zip(combo, values))
    for ft in constraints:
        if all(p in assigned and assigned[p] == v for p, v in zip(ft.params, ft.values)):
            return True
    return False


def _reachable(
    combo: tuple[int, ...],
    values: tuple[int, ...],
    model: SystemModel,
    base: list[int] | None,
) -> bool:
    """Can any violation-free row cover this tuple?

    Splicing the tuple into a known valid row is a cheap certificate;
    only when that fails does the exact extension search run.
    """
    if base is None:
        return False
    saved = [base[p] for p in combo]
    for p, v in zip(combo, values):
        base[p] = v
    ok = model.constraints.violations(base) == 0
    for p, v in zip(combo, saved):
        base[p] = v
    return ok or has_valid_extension(model, combo, values)


def check(suite: TestSuite, model: SystemModel) -> VerificationResult:
    """Confirm ``suite`` covers every demanded tuple and breaks no constraint.

    A tuple is demanded when at least one violation-free row could cover
    it; tuples that embed a forbidden tuple, or that constraints rule
    out indirectly, are excluded from demand.  Every parameter
    combination is enumerated here from scratch with its own accounting,
    so the result stands on its own even if the generator's bookkeeping
    were wrong.
    """
    invalid = []
    valid_rows = []
    for idx, row in enumerate(suite):
        if len(row) != model.k:
            invalid.append((idx, f"expected {model.k} values, found {len(row)}"))
            continue
        bad = next(
            (p for p, v in enumerate(row) if not 0 <= v < model.values[p]), None
        )
        if bad is not None:
            invalid.append((idx, f"value {row[bad]} out of range for parameter {bad}"))
            continue
        valid_rows.append((idx, row))

    violating = []
    for idx, row in valid_rows:
        for ci, ft in enumerate(model.constraints):
            if ft.matches(row):
                violating.append((idx, ci))

    demanded = 0
    covered = 0
    excluded = 0
    missing = []
    base = None
    if model.constraints:
        valid_row = find_valid_row(model)
        base = list(valid_row) if valid_row is not None else None
    for combo in combinations(range(model.k), model.t):
        seen = {tuple(row[p] for p in combo) for _, row in valid_rows}
        for values in product(*(range(model.values[p]) for p in combo)):
            if _embeds_forbidden(combo, values, model.constraints):
                excluded += 1
            elif values in seen:
                demanded += 1
                covered += 1
            elif model.constraints and not _reachable(combo, values, model, base):
                excluded += 1
            else:
                demanded += 1
                missing.append((combo, values))

    passed = not missing and not violating and not invalid
    return VerificationResult(
        passed=passed,
        demanded_tuples=demanded,
        covered_tuples=covered,
        excluded_tuples=excluded,
        missing=tuple(missing),
        violating_rows=tuple(violating),
        invalid_rows=tuple(invalid),
    )


def _build_uncovered(model: SystemModel):
    """Demanded value tuples per parameter combination, checker style."""
    base = None
    if model.constraints:
        valid_row = find_valid_row(model)
        base = list(valid_row) if valid_row is not None else None
    uncovered = {}
    for combo in combinations(range(model.k), model.t):
        wanted = set()
        for values in product(*(range(model.values[p]) for p in combo)):
            if _embeds_forbidden(combo, values, model.constraints):
                continue
            if model.constraints and not _reachable(combo, values, model, base):
                continue
            wanted.add(values)
        if wanted:
            uncovered[combo] = wanted
    return uncovered


def _greedy_row(
    model: SystemModel,
    uncovered: dict,
    combos_by_param: dict,
    rng: np.random.Generator,
    fixed: dict[int, int] | None = None,
) -> list[int] | None:
    """Build one row by locally maximal choices; None on a dead end.

    Parameters are visited in a random order.  For each one, every value
    that does not complete a forbidden tuple is scored by how many still
    uncovered tuples it would close against the already assigned
    parameters, and a random best scorer wins.  A parameter with no legal
    value backtracks one level before giving up.
    """
    assignment: list[int] = [-1] * model.k
    if fixed:
        for p, v in fixed.items():
            assignment[p] = v
    order = [int(p) for p in rng.permutation(model.k) if assignment[int(p)] < 0]
    banned: dict[int, set[int]] = {}

    def choose(position: int) -> bool:
        param = order[position]
        best_gain = -1
        best_values: list[int] = []
        for value in range(model.values[param]):
            if value in banned.get(param, ()):
                continue
            if completes_forbidden(assignment, param, value, model.constraints):
                continue
            gain = 0
            for combo in combos_by_param[param]:
                wanted = uncovered.get(combo)
                if wanted is None:
                    continue
                projected = []
                complete = True
                for p in combo:
                    v = value if p == param else assignment[p]
                    if v < 0:
                        complete = False
                        break
                    projected.append(v)
                if complete and tuple(projected) in wanted:
                    gain += 1
            if gain > best_gain:
                best_gain = gain
                best_values = [value]
            elif gain == best_gain:
                best_values.append(value)
        if not best_values:
            return False
        assignment[param] = best_values[int(rng.integers(len(best_values)))]
        return True

    position = 0
    backtracked = False
    while position < len(order):
        if choose(position):
            position += 1
            continue
        if position == 0 or backtracked:
            return None
        backtracked = True
        previous = order[position - 1]
        banned.setdefault(previous, set()).add(assignment[previous])
        assignment[previous] = -1
        position -= 1
    return assignment


def greedy_baseline(model: SystemModel, seed: int = 0) -> TestSuite:
    """Generate a covering suite with seeded greedy row construction.

    Keeps its own uncovered-tuple accounting built the same way the
    checker enumerates demand.  Rows must cover at least one open tuple
    to be kept; when random restarts stop making progress, construction
    is re-seeded from a specific open tuple before giving up.
    """
    rng = np.random.default_rng(seed)
    uncovered = _build_uncovered(model)
    combos_by_param: dict[int, list] = {p: [] for p in range(model.k)}
    for combo in uncovered:
        for p in combo:
            combos_by_param[p].append(combo)

    rows = []
    while uncovered:
        row = None
        for _ in range(20):
            candidate = _greedy_row(model, uncovered, combos_by_param, rng)
            if candidate is not None and _consume(candidate, uncovered) > 0:
                row = candidate
                break
        if row is None:
            combo, values = next(
                (c, sorted(vs)[0]) for c, vs in sorted(uncovered.items()) if vs
            )
            candidate = _greedy_row(
                model, uncovered, combos_by_param, rng, fixed=dict(zip(combo, values))
            )
            if candidate is None or _consume(candidate, uncovered) == 0:
                from .generator import GenerationReport, StuckTuples

                report = GenerationReport(
                    suite=TestSuite(rows=tuple(rows)),
                    seed=seed,
                    rounds=len(rows),
                    wall_time_s=0.0,
                    initial_tuples=0,
                    pruned_tuples=0,
                    unreachable_tuples=0,
                    covered_tuples=0,
                    uncovered_tuples=sum(len(v) for v in uncovered.values()),
                    coverage_deltas=(),
                )
                open_left = [
                    (combo, values)
                    for combo, wanted in uncovered.items()
                    for values in sorted(wanted)
                ]
                raise StuckTuples(open_left, report)
            row = candidate
        rows.append(tuple(row))
    return TestSuite(rows=tuple(rows))


def _consume(row: list[int], uncovered: dict) -> int:
    """Remove every tuple ``row`` covers; returns how many were removed."""
    closed = 0
    emptied = []
    for combo, wanted in uncovered.items():
        projected = tuple(row[p] for p in combo)
        if projected in wanted:
            wanted.discard(projected)
            closed += 1
            if not wanted:
                emptied.append(combo)
    for combo in emptied:
        del uncovered[combo]
    return closed
