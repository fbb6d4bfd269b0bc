"""Coverage bookkeeping for t-way value tuples.

The store keeps one bucket per parameter combination.  A bucket holds the
full cartesian product of that combination's values in sorted order plus a
status flag per value tuple: open, covered, or removed by a constraint.
Lookups hash to the bucket and binary search inside it, so a row query
costs one probe per bucket rather than a scan of the whole store.  Tuples
are flagged rather than deleted, which keeps the store auditable after
pruning and generation.
"""

from __future__ import annotations

from bisect import bisect_left
from itertools import product
from operator import itemgetter

from .combgen import combination_count, iter_combinations
from .model import (
    ConstraintSet,
    SystemModel,
    TestCase,
    find_valid_row,
    has_valid_extension,
)

__all__ = [
    "CapacityError",
    "TupleStore",
    "OPEN",
    "COVERED",
    "REMOVED",
    "UNREACHABLE",
]

OPEN, COVERED, REMOVED, UNREACHABLE = 0, 1, 2, 3

_STATUS_NAMES = {
    OPEN: "open",
    COVERED: "covered",
    REMOVED: "removed",
    UNREACHABLE: "unreachable",
}

# Refuse builds whose tuple population obviously cannot fit in memory.
_MAX_ESTIMATED_TUPLES = 50_000_000


def _tuple_getter(params: tuple[int, ...]):
    """Row projector returning a tuple even for a single parameter."""
    if len(params) == 1:
        p = params[0]
        return lambda row: (row[p],)
    return itemgetter(*params)


class CapacityError(MemoryError):
    """Raised when a store would not fit in memory, naming the size."""


class TupleStore:
    """Tracks which t-way value tuples a growing suite still has to cover."""

    def __init__(self, t: int, values: tuple[int, ...]):
        self.t = t
        self.values = values
        self._params: list[tuple[int, ...]] = []
        self._getters: list = []
        self._tuples: list[list[tuple[int, ...]]] = []
        self._status: list[bytearray] = []
        self._open_counts: list[int] = []
        self._index: dict[tuple[int, ...], int] = {}
        self._live: list[tuple] = []
        self.initial_total = 0
        self.removed_total = 0
        self.unreachable_total = 0
        self.covered_total = 0

    @classmethod
    def build(cls, model: SystemModel) -> "TupleStore":
        """Populate a store with every t-way value tuple of ``model``."""
        n_combos = combination_count(model.k, model.t)
        worst_bucket = sorted(model.values, reverse=True)[: model.t]
        estimate = n_combos
        for v in worst_bucket:
            estimate *= v
        if estimate > _MAX_ESTIMATED_TUPLES:
            raise CapacityError(
                f"store would hold up to {estimate} tuples across "
                f"{n_combos} parameter combinations"
            )
        store = cls(t=model.t, values=model.values)
        try:
            for combo in iter_combinations(model.k, model.t):
                ranges = [range(model.values[p]) for p in combo]
                bucket = list(product(*ranges))
                store._index[combo] = len(store._params)
                store._params.append(combo)
                store._getters.append(_tuple_getter(combo))
                store._tuples.append(bucket)
                store._status.append(bytearray(len(bucket)))
                store._open_counts.append(len(bucket))
                store.initial_total += len(bucket)
        except MemoryError:
            raise CapacityError(
                f"ran out of memory building {n_combos} parameter combinations"
            ) from None
        store._rebuild_live()
        return store

    def _rebuild_live(self) -> None:
        self._live = [
            (self._getters[i], self._tuples[i], self._status[i])
            for i, n in enumerate(self._open_counts)
            if n > 0
        ]

    @property
    def uncovered_total(self) -> int:
        return (
            self.initial_total
            - self.removed_total
            - self.unreachable_total
            - self.covered_total
        )

    def __len__(self) -> int:
        return self.initial_total

    def is_empty(self) -> bool:
        """True once every non-removed tuple has been covered."""
        return self.uncovered_total == 0

    def prune_constrained(self, constraints: ConstraintSet) -> int:
        """Flag tuples that embed a forbidden tuple as removed.

        Only forbidden tuples whose size is at most the store strength can
        appear inside a stored tuple; larger ones are enforced by row
        violation counting instead and are skipped here.  Returns the
        number of tuples newly removed.  Must run before any coverage is
        marked so that removal never races with covering.
        """
        if self.covered_total:
            raise ValueError("prune must run before any coverage is marked")
        removed = 0
        for ft in constraints:
            if ft.size > self.t:
                continue
            for combo, i in self._index.items():
                positions = []
                ok = True
                for p in ft.params:
                    try:
                        positions.append(combo.index(p))
                    except ValueError:
                        ok = False
                        break
                if not ok:
                    continue
                vals = ft.values
                status = self._status[i]
                for j, tup in enumerate(self._tuples[i]):
                    if status[j] == OPEN and all(
                        tup[pos] == vals[n] for n, pos in enumerate(positions)
                    ):
                        status[j] = REMOVED
                        self._open_counts[i] -= 1
                        removed += 1
        self.removed_total += removed
        self._rebuild_live()
        return removed

    def prune_unreachable(self, model: SystemModel) -> int:
        """Flag open tuples that no violation-free row can cover.

        Pruning by embedded forbidden tuples is not the whole story:
        constraints can conspire so that every row containing some tuple
        violates one of them elsewhere.  Such tuples can never be covered
        and would otherwise stall generation forever.  Returns the number
        flagged.  Run after :meth:`prune_constrained`.
        """
        if self.covered_total:
            raise ValueError("unreachability analysis must run before coverage")
        if not model.constraints:
            return 0
        base = find_valid_row(model)
        trial = list(base) if base is not None else None
        violations = model.constraints.violations
        flagged = 0
        for i, combo in enumerate(self._params):
            if self._open_counts[i] == 0:
                continue
            status = self._status[i]
            for j, tup in enumerate(self._tuples[i]):
                if status[j] != OPEN:
                    continue
                if trial is not None:
                    # Splicing the tuple into a known valid row is a cheap
                    # reachability certificate; fall back to the exact
                    # search only when the spliced row violates something.
                    saved = [trial[p] for p in combo]
                    for p, v in zip(combo, tup):
                        trial[p] = v
                    ok = violations(trial) == 0
                    for p, v in zip(combo, saved):
                        trial[p] = v
                    if ok or has_valid_extension(model, combo, tup):
                        continue
                status[j] = UNREACHABLE
                self._open_counts[i] -= 1
                flagged += 1
        self.unreachable_total += flagged
        if flagged:
            self._rebuild_live()
        return flagged

    def covered_count(self, row: TestCase) -> int:
        """Number of still-open tuples that ``row`` covers.

        Read only and safe to call from several threads at once.
        """
        count = 0
        bl = bisect_left
        for getter, tuples, status in self._live:
            proj = getter(row)
            j = bl(tuples, proj)
            if j < len(tuples) and tuples[j] == proj and status[j] == OPEN:
                count += 1
        return count

    def covered_count_instrumented(self, row: TestCase) -> tuple[int, list[int]]:
        """Like :meth:`covered_count` but also reports probe counts.

        Each bucket is searched with an explicit binary search that exits
        early on equality; the returned list holds the number of value
        tuple comparisons spent in each live bucket.
        """
        count = 0
        comparisons: list[int] = []
        for getter, tuples, status in self._live:
            proj = getter(row)
            lo, hi = 0, len(tuples) - 1
            probes = 0
            found = -1
            while lo <= hi:
                mid = (lo + hi) // 2
                probes += 1
                cand = tuples[mid]
                if cand == proj:
                    found = mid
                    break
                if cand < proj:
                    lo = mid + 1
                else:
                    hi = mid - 1
            comparisons.append(probes)
            if found >= 0 and status[found] == OPEN:
                count += 1
        return count, comparisons

    def mark_covered(self, row: TestCase) -> int:
        """Flag every open tuple covered by ``row``; returns how many."""
        newly = 0
        for i, n_open in enumerate(self._open_counts):
            if n_open == 0:
                continue
            proj = self._getters[i](row)
            tuples = self._tuples[i]
            j = bisect_left(tuples, proj)
            if j < len(tuples) and tuples[j] == proj and self._status[i][j] == OPEN:
                self._status[i][j] = COVERED
                self._open_counts[i] -= 1
                newly += 1
        self.covered_total += newly
        self._rebuild_live()
        return newly

    def open_tuples(
        self, limit: int | None = None
    ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Uncovered (params, values) pairs in store order."""
        out = []
        for i, combo in enumerate(self._params):
            if self._open_counts[i] == 0:
                continue
            status = self._status[i]
            for j, tup in enumerate(self._tuples[i]):
                if status[j] == OPEN:
                    out.append((combo, tup))
                    if limit is not None and len(out) >= limit:
                        return out
        return out

    def iter_entries(self):
        """Yield (params, values, status name) for every stored tuple."""
        for i, combo in enumerate(self._params):
            status = self._status[i]
            for j, tup in enumerate(self._tuples[i]):
                yield combo, tup, _STATUS_NAMES[status[j]]
