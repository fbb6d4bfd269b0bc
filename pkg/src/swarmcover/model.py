"""System models for combinatorial interaction testing.

A system under test is described by a list of parameter cardinalities, an
interaction strength ``t``, and a set of forbidden tuples.  Each forbidden
tuple names value assignments that must never appear together in a test
case.  This module owns the model text format, the constraint semantics,
and the suite container used by the generators and the verifier.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

__all__ = [
    "ModelError",
    "ForbiddenTuple",
    "ConstraintSet",
    "SystemModel",
    "TestCase",
    "TestSuite",
    "parse_model",
    "render_model",
    "violates",
    "completes_forbidden",
    "has_valid_extension",
    "find_valid_row",
    "to_notation",
    "constraint_notation",
    "classify",
    "as_model",
    "check_row",
]

TestCase = tuple[int, ...]


class ModelError(ValueError):
    """Raised when model text is malformed or semantically invalid."""


@dataclass(frozen=True)
class ForbiddenTuple:
    """A set of (parameter, value) assignments that must not co-occur.

    Assignments are stored sorted by parameter index so that equal
    constraints compare equal regardless of the order they were written in.
    """

    params: tuple[int, ...]
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.params) != len(self.values):
            raise ModelError("forbidden tuple has mismatched params and values")
        if len(self.params) == 0:
            raise ModelError("forbidden tuple must contain at least one assignment")
        if len(set(self.params)) != len(self.params):
            raise ModelError(f"forbidden tuple repeats a parameter: {self.params}")
        if any(p != q for p, q in zip(self.params, sorted(self.params))):
            order = sorted(range(len(self.params)), key=lambda i: self.params[i])
            object.__setattr__(self, "params", tuple(self.params[i] for i in order))
            object.__setattr__(self, "values", tuple(self.values[i] for i in order))

    @property
    def size(self) -> int:
        return len(self.params)

    def matches(self, row: TestCase) -> bool:
        """True if ``row`` assigns every forbidden value in this tuple."""
        return all(row[p] == v for p, v in zip(self.params, self.values))


@dataclass(frozen=True)
class ConstraintSet:
    """An immutable collection of forbidden tuples."""

    tuples: tuple[ForbiddenTuple, ...] = ()

    def __iter__(self):
        return iter(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def __bool__(self) -> bool:
        return bool(self.tuples)

    def violations(self, row: TestCase) -> int:
        """Number of forbidden tuples fully assigned by ``row``."""
        return sum(1 for ft in self.tuples if ft.matches(row))


def violates(row: TestCase, constraints: ConstraintSet) -> int:
    """Count the forbidden tuples of ``constraints`` matched by ``row``."""
    return constraints.violations(row)


def completes_forbidden(
    assignment: list[int], param: int, value: int, constraints: ConstraintSet
) -> bool:
    """Would assigning ``param = value`` finish off a forbidden tuple?

    ``assignment`` is a partial row with ``-1`` marking unassigned
    parameters.
    """
    for ft in constraints:
        hit = False
        ok = True
        for p, v in zip(ft.params, ft.values):
            if p == param:
                if v != value:
                    ok = False
                    break
                hit = True
            elif assignment[p] != v:
                ok = False
                break
        if ok and hit:
            return True
    return False


def _complete_assignment(assignment: list[int], model: "SystemModel") -> bool:
    """Backtracking completion of a partial row; mutates ``assignment``.

    Tries values in ascending order and never finishes a forbidden
    tuple, so it is fast whenever constraints are loose and still exact
    when they are not.  On success the assignment holds a full valid
    row; on failure the free positions are restored to ``-1``.
    """
    free = [p for p in range(model.k) if assignment[p] < 0]
    if not free:
        return True
    constraints = model.constraints
    choice = [-1] * len(free)
    depth = 0
    while depth >= 0:
        if depth == len(free):
            return True
        p = free[depth]
        v = choice[depth] + 1
        while v < model.values[p] and completes_forbidden(
            assignment, p, v, constraints
        ):
            v += 1
        if v < model.values[p]:
            choice[depth] = v
            assignment[p] = v
            depth += 1
            if depth < len(free):
                choice[depth] = -1
        else:
            assignment[p] = -1
            depth -= 1
    return False


def has_valid_extension(
    model: "SystemModel", params: tuple[int, ...], values: tuple[int, ...]
) -> bool:
    """True if some violation-free full row assigns ``params`` to ``values``.

    Constraints can rule out value combinations beyond the forbidden
    tuples themselves: a tuple may be unreachable because every row
    containing it violates some constraint elsewhere.
    """
    assignment = [-1] * model.k
    for p, v in zip(params, values):
        assignment[p] = v
    for ft in model.constraints:
        if all(assignment[p] == v for p, v in zip(ft.params, ft.values)):
            return False
    return _complete_assignment(assignment, model)


def find_valid_row(model: "SystemModel") -> TestCase | None:
    """Some violation-free row of the model, or None if there is none."""
    assignment = [-1] * model.k
    if _complete_assignment(assignment, model):
        return tuple(assignment)
    return None


@dataclass(frozen=True)
class SystemModel:
    """A system under test: value cardinalities, strength, constraints.

    ``values[i]`` is the number of values of parameter ``i``; parameter
    values are always the integers ``0 .. values[i] - 1``.  ``names`` is an
    optional tuple of per-parameter value label tuples used only for
    display.
    """

    t: int
    values: tuple[int, ...]
    constraints: ConstraintSet = field(default_factory=ConstraintSet)
    names: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ModelError(f"strength must be >= 1, got {self.t}")
        if self.t > len(self.values):
            raise ModelError(
                f"strength {self.t} exceeds parameter count {len(self.values)}"
            )
        for i, v in enumerate(self.values):
            if v < 2:
                raise ModelError(f"parameter {i} has {v} values, need at least 2")
        for ft in self.constraints:
            for p, v in zip(ft.params, ft.values):
                if not 0 <= p < len(self.values):
                    raise ModelError(f"constraint parameter {p} out of range")
                if not 0 <= v < self.values[p]:
                    raise ModelError(
                        f"constraint value {v} out of range for parameter {p}"
                    )
        if self.names is not None:
            if len(self.names) != len(self.values):
                raise ModelError("names must cover every parameter")
            for i, labels in enumerate(self.names):
                if len(labels) != self.values[i]:
                    raise ModelError(
                        f"parameter {i} has {self.values[i]} values "
                        f"but {len(labels)} labels"
                    )

    @property
    def k(self) -> int:
        return len(self.values)


def check_row(row: TestCase, model: SystemModel) -> tuple[int, ...]:
    """Validate a test row against a model and return it as a tuple.

    Raises ``ValueError`` if the row has the wrong length or any value is
    out of range for its parameter.
    """
    row = tuple(row)
    if len(row) != model.k:
        raise ValueError(f"row has {len(row)} values, model has {model.k} parameters")
    for p, v in enumerate(row):
        if not 0 <= v < model.values[p]:
            raise ValueError(f"value {v} out of range for parameter {p}")
    return row


@dataclass(frozen=True)
class TestSuite:
    """An ordered collection of test rows."""

    __test__ = False  # tells pytest this is not a test case

    rows: tuple[TestCase, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i: int) -> TestCase:
        return self.rows[i]

    @property
    def size(self) -> int:
        return len(self.rows)

    def render(self, t: int | None = None) -> str:
        """Plain-text form: ``N k`` (or ``N k t``) header, one row per line."""
        k = len(self.rows[0]) if self.rows else 0
        header = f"{len(self.rows)} {k}" if t is None else f"{len(self.rows)} {k} {t}"
        lines = [header]
        lines.extend(" ".join(str(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def render_csv(self) -> str:
        """CSV form with a ``p0,p1,...`` header line."""
        k = len(self.rows[0]) if self.rows else 0
        lines = [",".join(f"p{i}" for i in range(k))]
        lines.extend(",".join(str(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def render_json_lines(self) -> str:
        """One JSON array of values per line."""
        return "".join(json.dumps(list(row)) + "\n" for row in self.rows)

    @classmethod
    def parse(cls, text: str) -> "TestSuite":
        """Parse the plain-text form produced by :meth:`render`."""
        lines = [
            stripped
            for raw in text.splitlines()
            if (stripped := raw.split("#", 1)[0].strip())
        ]
        if not lines:
            raise ModelError("suite text is empty")
        header = lines[0].split()
        if len(header) not in (2, 3):
            raise ModelError("suite header must be 'N k' or 'N k t'")
        try:
            n, k = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ModelError(f"suite header is not numeric: {lines[0]!r}") from exc
        if len(lines) - 1 != n:
            raise ModelError(f"suite header promises {n} rows, found {len(lines) - 1}")
        rows = []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split()
            if len(parts) != k:
                raise ModelError(f"row {lineno} has {len(parts)} values, expected {k}")
            try:
                rows.append(tuple(int(p) for p in parts))
            except ValueError as exc:
                raise ModelError(f"row {lineno} is not numeric: {line!r}") from exc
        return cls(rows=tuple(rows))


def _logical_lines(text: str) -> list[tuple[int, str]]:
    """Strip comments and blanks, keeping original line numbers."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            out.append((lineno, stripped))
    return out


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ModelError(f"line {lineno}: {what} is not an integer: {token!r}") from None


def parse_model(text: str) -> SystemModel:
    """Parse model text into a :class:`SystemModel`.

    The format is line based.  ``#`` starts a comment and blank lines are
    skipped.  The records are: strength ``t``; parameter count ``k``; a
    line of ``k`` value cardinalities; forbidden-tuple count ``c``; then
    ``c`` lines of the form ``m p:v p:v ...``.  An optional trailing
    section starts with a line reading ``names:`` followed by ``k`` lines
    of comma-separated value labels.
    """
    lines = _logical_lines(text)
    pos = 0

    def next_line(what: str) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(lines):
            raise ModelError(f"unexpected end of model text, expected {what}")
        entry = lines[pos]
        pos += 1
        return entry

    lineno, tok = next_line("strength t")
    if len(tok.split()) != 1:
        raise ModelError(f"line {lineno}: expected a single integer for t")
    t = _parse_int(tok, lineno, "strength t")

    lineno, tok = next_line("parameter count k")
    if len(tok.split()) != 1:
        raise ModelError(f"line {lineno}: expected a single integer for k")
    k = _parse_int(tok, lineno, "parameter count k")
    if k < 1:
        raise ModelError(f"line {lineno}: parameter count must be positive, got {k}")
    if t < 2:
        raise ModelError(f"strength must be at least 2, got {t}")
    if t > k:
        raise ModelError(f"strength {t} exceeds parameter count {k}")

    lineno, tok = next_line("value cardinalities")
    parts = tok.split()
    if len(parts) != k:
        raise ModelError(
            f"line {lineno}: expected {k} value cardinalities, found {len(parts)}"
        )
    values = tuple(_parse_int(p, lineno, "value cardinality") for p in parts)
    for i, v in enumerate(values):
        if v < 2:
            raise ModelError(f"line {lineno}: parameter {i} needs >= 2 values, got {v}")

    lineno, tok = next_line("constraint count")
    if len(tok.split()) != 1:
        raise ModelError(f"line {lineno}: expected a single integer constraint count")
    c = _parse_int(tok, lineno, "constraint count")
    if c < 0:
        raise ModelError(f"line {lineno}: constraint count must be >= 0, got {c}")

    forbidden = []
    for _ in range(c):
        lineno, tok = next_line("forbidden tuple")
        parts = tok.split()
        m = _parse_int(parts[0], lineno, "forbidden tuple size")
        if m < 2:
            raise ModelError(
                f"line {lineno}: forbidden tuple needs >= 2 assignments "
                "(forbidding a single value is the same as removing it "
                "from the model)"
            )
        if len(parts) - 1 != m:
            raise ModelError(
                f"line {lineno}: forbidden tuple promises {m} assignments, "
                f"found {len(parts) - 1}"
            )
        params, vals = [], []
        for part in parts[1:]:
            if part.count(":") != 1:
                raise ModelError(
                    f"line {lineno}: assignment must be 'param:value', got {part!r}"
                )
            p_tok, v_tok = part.split(":")
            p = _parse_int(p_tok, lineno, "parameter index")
            v = _parse_int(v_tok, lineno, "parameter value")
            if not 0 <= p < k:
                raise ModelError(f"line {lineno}: parameter index {p} out of range")
            if not 0 <= v < values[p]:
                raise ModelError(
                    f"line {lineno}: value {v} out of range for parameter {p}"
                )
            params.append(p)
            vals.append(v)
        if len(set(params)) != len(params):
            raise ModelError(f"line {lineno}: forbidden tuple repeats a parameter")
        forbidden.append(ForbiddenTuple(params=tuple(params), values=tuple(vals)))

    names = None
    if pos < len(lines):
        lineno, tok = next_line("names: marker")
        if tok != "names:":
            raise ModelError(f"line {lineno}: unexpected trailing content: {tok!r}")
        labels = []
        for i in range(k):
            lineno, tok = next_line(f"labels for parameter {i}")
            row = tuple(lbl.strip() for lbl in tok.split(","))
            if len(row) != values[i]:
                raise ModelError(
                    f"line {lineno}: parameter {i} has {values[i]} values "
                    f"but {len(row)} labels"
                )
            labels.append(row)
        if pos < len(lines):
            lineno, tok = lines[pos]
            raise ModelError(f"line {lineno}: unexpected trailing content: {tok!r}")
        names = tuple(labels)

    return SystemModel(
        t=t, values=values, constraints=ConstraintSet(tuple(forbidden)), names=names
    )


def render_model(model: SystemModel) -> str:
    """Render a model to its canonical text form.

    The output is byte stable: LF line endings, single spaces, no
    comments, assignments in ascending parameter order.
    ``parse_model(render_model(m))`` reproduces ``m`` exactly.
    """
    lines = [
        str(model.t),
        str(model.k),
        " ".join(str(v) for v in model.values),
        str(len(model.constraints)),
    ]
    for ft in model.constraints:
        parts = [str(ft.size)]
        parts.extend(f"{p}:{v}" for p, v in zip(ft.params, ft.values))
        lines.append(" ".join(parts))
    if model.names is not None:
        lines.append("names:")
        lines.extend(",".join(labels) for labels in model.names)
    return "\n".join(lines) + "\n"


def _shape_counts(sizes: list[int]) -> str:
    """Render multiset of sizes as ``2^13 4^5`` style, ascending by size."""
    counts = Counter(sizes)
    return " ".join(f"{size}^{count}" for size, count in sorted(counts.items()))


def to_notation(model: SystemModel) -> str:
    """Covering array notation for a model, e.g. ``MCA(N; 2, 2^13 4^5)``.

    Uniform models render as ``CA(N; t, v^k)``; mixed ones as ``MCA``.
    """
    label = "CA" if len(set(model.values)) == 1 else "MCA"
    return f"{label}(N; {model.t}, {_shape_counts(list(model.values))})"


def constraint_notation(constraints: ConstraintSet) -> str:
    """Shape summary of a constraint set, e.g. ``2^4 3^1``; '' when empty."""
    if not constraints:
        return ""
    return _shape_counts([ft.size for ft in constraints])


def classify(model: SystemModel) -> str:
    """Model class label: CA, MCA, CCA or CMCA."""
    mixed = len(set(model.values)) > 1
    if model.constraints:
        return "CMCA" if mixed else "CCA"
    return "MCA" if mixed else "CA"


def as_model(source: "SystemModel | str") -> SystemModel:
    """Coerce a :class:`SystemModel` or model text into a model."""
    if isinstance(source, SystemModel):
        return source
    if isinstance(source, str):
        return parse_model(source)
    raise TypeError(f"expected SystemModel or model text, got {type(source).__name__}")
