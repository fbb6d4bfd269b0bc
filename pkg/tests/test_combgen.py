"""Tests for the t-way combination enumerator.

The enumerator is checked against an independent recursive
implementation and against the closed-form count, so a bug would have
to fool three different routes at once.
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from swarmcover.combgen import (
    MAX_PARAMS,
    _count_by_enumeration_py,
    combination_count,
    count_by_enumeration,
    generate_combinations,
    iter_combinations,
)


def recursive_combinations(k: int, t: int) -> list[tuple[int, ...]]:
    """Reference enumerator: straightforward recursion, no shared code."""
    out: list[tuple[int, ...]] = []

    def extend(prefix: list[int], start: int) -> None:
        if len(prefix) == t:
            out.append(tuple(prefix))
            return
        for v in range(start, k):
            prefix.append(v)
            extend(prefix, v + 1)
            prefix.pop()

    extend([], 0)
    return out


kt_strategy = st.integers(min_value=1, max_value=9).flatmap(
    lambda k: st.tuples(st.just(k), st.integers(min_value=1, max_value=k))
)


class TestIterCombinations:
    def test_documented_order_k3_t2(self):
        assert generate_combinations(3, 2) == [(0, 1), (0, 2), (1, 2)]

    def test_t1_lists_parameters(self):
        assert generate_combinations(4, 1) == [(0,), (1,), (2,), (3,)]

    def test_k_equals_t_single_combination(self):
        assert generate_combinations(5, 5) == [(0, 1, 2, 3, 4)]

    def test_is_a_generator(self):
        it = iter_combinations(4, 2)
        assert next(it) == (0, 1)
        assert next(it) == (0, 2)

    @settings(max_examples=80)
    @given(kt_strategy)
    def test_matches_recursive_reference(self, kt):
        k, t = kt
        assert generate_combinations(k, t) == recursive_combinations(k, t)

    @settings(max_examples=80)
    @given(kt_strategy)
    def test_strictly_increasing_within_and_across(self, kt):
        k, t = kt
        combos = generate_combinations(k, t)
        for combo in combos:
            assert all(a < b for a, b in zip(combo, combo[1:]))
        assert combos == sorted(combos)
        assert len(set(combos)) == len(combos)


class TestCounts:
    def test_closed_form(self):
        assert combination_count(10, 3) == 120
        assert combination_count(20, 1) == 20
        assert combination_count(7, 7) == 1

    # deadline off: the first call may pay numba compilation time
    @settings(max_examples=60, deadline=None)
    @given(kt_strategy)
    def test_enumerated_count_matches_closed_form(self, kt):
        k, t = kt
        expected = math.comb(k, t)
        assert combination_count(k, t) == expected
        assert _count_by_enumeration_py(k, t) == expected
        assert count_by_enumeration(k, t) == expected

    def test_compiled_and_python_twins_agree(self):
        for k, t in [(12, 4), (15, 2), (9, 9), (30, 1)]:
            assert count_by_enumeration(k, t) == _count_by_enumeration_py(k, t)

    def test_large_instance(self):
        # big enough that an off-by-one in the backtracking would show
        assert count_by_enumeration(40, 4) == math.comb(40, 4)


class TestArgumentChecks:
    def test_zero_strength(self):
        with pytest.raises(ValueError, match="strength must be >= 1"):
            generate_combinations(3, 0)

    def test_k_below_t(self):
        with pytest.raises(ValueError, match="at least t=4"):
            generate_combinations(3, 4)

    def test_parameter_cap(self):
        with pytest.raises(ValueError, match="supported maximum"):
            combination_count(MAX_PARAMS + 1, 2)

    def test_errors_raised_before_first_yield(self):
        with pytest.raises(ValueError):
            iter_combinations(2, 3)
