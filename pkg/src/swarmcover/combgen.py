"""Lexicographic enumeration of t-way parameter combinations.

The enumerator is an explicit-stack loop rather than a recursive
generator, so combination order is defined operationally and the same
control flow can be compiled for large instances.  Combinations are
emitted in lexicographic order of their index tuples: for k=3, t=2 the
order is (0, 1), (0, 2), (1, 2).
"""

from __future__ import annotations

import math
from collections.abc import Iterator

__all__ = [
    "ParamCombination",
    "iter_combinations",
    "generate_combinations",
    "combination_count",
    "count_by_enumeration",
]

ParamCombination = tuple[int, ...]

# Enumerating more parameters than this would take days even compiled;
# refuse early instead of hanging.
MAX_PARAMS = 10_000


def _check_args(k: int, t: int) -> None:
    if t < 1:
        raise ValueError(f"strength must be >= 1, got {t}")
    if k < t:
        raise ValueError(f"need at least t={t} parameters, got k={k}")
    if k > MAX_PARAMS:
        raise ValueError(f"parameter count {k} exceeds supported maximum {MAX_PARAMS}")


def iter_combinations(k: int, t: int) -> Iterator[ParamCombination]:
    """Yield all t-subsets of ``range(k)`` in lexicographic order.

    Arguments are validated immediately, not at first ``next()``.

    The stack holds the next candidate value for each prefix position.
    Popping resumes the deepest unfinished prefix; pushing ``v + 1``
    records where that position continues once the current branch is
    exhausted.  A completed combination of length t is yielded and the
    loop backtracks.
    """
    _check_args(k, t)
    return _iter_combinations(k, t)


def _iter_combinations(k: int, t: int) -> Iterator[ParamCombination]:
    comb = [0] * t
    stack = [0]
    while stack:
        i = len(stack) - 1
        v = stack.pop()
        while v < k:
            comb[i] = v
            i += 1
            v += 1
            stack.append(v)
            if i == t:
                yield tuple(comb)
                break


def generate_combinations(k: int, t: int) -> list[ParamCombination]:
    """All t-way parameter combinations of ``range(k)``, lexicographic."""
    return list(iter_combinations(k, t))


def combination_count(k: int, t: int) -> int:
    """Number of t-subsets of ``range(k)``, i.e. C(k, t)."""
    _check_args(k, t)
    return math.comb(k, t)


def _count_by_enumeration_py(k: int, t: int) -> int:
    """Pure-Python twin of the compiled counting loop."""
    comb = [0] * t
    stack = [0]
    n = 0
    while stack:
        i = len(stack) - 1
        v = stack.pop()
        while v < k:
            comb[i] = v
            i += 1
            v += 1
            stack.append(v)
            if i == t:
                n += 1
                break
    return n


def count_by_enumeration(k: int, t: int) -> int:
    """Count combinations by actually running the enumeration to the end.

    Unlike :func:`combination_count` this visits every combination, so it
    exercises the enumerator itself; it is the self-check used for large
    instances where materialising the combinations is not feasible.  The
    loop is compiled when numba is available and falls back to the
    pure-Python twin otherwise.
    """
    _check_args(k, t)
    try:
        from numba import njit
    except ImportError:
        return _count_by_enumeration_py(k, t)

    global _count_jitted
    if _count_jitted is None:
        import numpy as np

        @njit(cache=True)
        def _drive(k: int, t: int) -> int:
            comb = np.zeros(t, dtype=np.int64)
            stack = np.zeros(t + 2, dtype=np.int64)
            top = 0
            stack[top] = 0
            top += 1
            n = 0
            while top > 0:
                i = top - 1
                top -= 1
                v = stack[top]
                while v < k:
                    comb[i] = v
                    i += 1
                    v += 1
                    stack[top] = v
                    top += 1
                    if i == t:
                        n += 1
                        break
            return n

        _count_jitted = _drive
    return int(_count_jitted(k, t))


_count_jitted = None
