"""Benchmark model corpus.

Five real-system configuration models plus the small graph product line
ship as data files next to this module.  Thirty additional entries are
derived from the real systems on the fly: for each base model, six
sub-sampled variants keep a deterministic random subset of parameters
(between roughly 15% and 60%, never fewer than six) together with every
forbidden tuple whose parameters all survived, remapped to the new
indices.  The sampling uses a fixed seed tree keyed by base model and
variant number, so the derived corpus is identical everywhere.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..model import (
    ConstraintSet,
    ForbiddenTuple,
    SystemModel,
    constraint_notation,
    parse_model,
    render_model,
    to_notation,
)

__all__ = ["CorpusEntry", "names", "load_entry", "load_model", "corpus_hash"]

_REAL = {
    "bugzilla": "Bugzilla defect tracker options",
    "apache": "Apache HTTP server options",
    "gcc": "GCC compiler options",
    "spin-s": "SPIN model checker, simulator mode",
    "spin-v": "SPIN model checker, verifier mode",
    "gpl": "graph product line, unconstrained",
    "gpl-constrained": "graph product line with a compiled feature constraint",
}

_DERIVED_BASES = ("bugzilla", "apache", "gcc", "spin-s", "spin-v")
_VARIANTS_PER_BASE = 6
_DERIVED_SEED = 1729


@dataclass(frozen=True)
class CorpusEntry:
    """A named benchmark model with its documentation strings."""

    name: str
    text: str
    notation: str
    constraints: str
    note: str


def _read_file(name: str) -> str:
    return (resources.files(__package__) / f"{name}.model").read_text()


def _derive(base_name: str, variant: int) -> str:
    """Sub-sample a base model into variant text (see module docstring)."""
    base = parse_model(_read_file(base_name))
    base_index = _DERIVED_BASES.index(base_name)
    seed = np.random.SeedSequence(
        entropy=_DERIVED_SEED, spawn_key=(base_index, variant)
    )
    rng = np.random.default_rng(seed)
    fraction = 0.15 + 0.09 * (variant - 1)
    size = max(6, round(base.k * fraction))
    size = min(size, base.k)
    chosen = sorted(int(p) for p in rng.choice(base.k, size=size, replace=False))
    remap = {p: i for i, p in enumerate(chosen)}
    kept = tuple(
        ForbiddenTuple(
            params=tuple(remap[p] for p in ft.params),
            values=ft.values,
        )
        for ft in base.constraints
        if all(p in remap for p in ft.params)
    )
    model = SystemModel(
        t=2,
        values=tuple(base.values[p] for p in chosen),
        constraints=ConstraintSet(kept),
    )
    return render_model(model)


def names() -> tuple[str, ...]:
    """Every loadable corpus entry name."""
    derived = tuple(
        f"{base}-sub{i}"
        for base in _DERIVED_BASES
        for i in range(1, _VARIANTS_PER_BASE + 1)
    )
    return tuple(_REAL) + derived


def load_entry(name: str) -> CorpusEntry:
    """Load a corpus entry by name; raises ``KeyError`` if unknown."""
    if name in _REAL:
        text = _read_file(name)
        note = _REAL[name]
    else:
        base, sep, variant = name.rpartition("-sub")
        if not sep or base not in _DERIVED_BASES or not variant.isdigit():
            raise KeyError(f"unknown corpus entry: {name!r}")
        index = int(variant)
        if not 1 <= index <= _VARIANTS_PER_BASE:
            raise KeyError(f"unknown corpus entry: {name!r}")
        text = _derive(base, index)
        note = f"deterministic sub-sample {index} of {base}"
    model = parse_model(text)
    return CorpusEntry(
        name=name,
        text=text,
        notation=to_notation(model),
        constraints=constraint_notation(model.constraints),
        note=note,
    )


def load_model(name: str) -> SystemModel:
    """Parse a corpus entry into a model."""
    return parse_model(load_entry(name).text)


def corpus_hash() -> str:
    """Stable short digest over every corpus entry's text."""
    digest = hashlib.sha256()
    for name in names():
        digest.update(name.encode())
        digest.update(b"\x00")
        digest.update(load_entry(name).text.encode())
        digest.update(b"\x00")
    return digest.hexdigest()[:12]
