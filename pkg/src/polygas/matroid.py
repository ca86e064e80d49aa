"""The matroid of an arrangement: rank oracle, bases / spanning-subset
enumeration, fundamental circuits, external activity, and the
characteristic polynomial at zero by two independent formulas.

Ground subsets are bitmasks over hyperplane indices.  All questions are
answered with exact arithmetic; results are memoized per subset, and the
caches may be read concurrently (inserts are lock-protected).
"""

from __future__ import annotations

import random
import threading

import numpy as np

from .arrangement import Arrangement
from .exact_linalg import _P, _integerize, _rank_mod_p, exact_rank


class MatroidError(ValueError):
    pass


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_elements(mask: int):
    e = 0
    while mask:
        if mask & 1:
            yield e
        mask >>= 1
        e += 1


class LinearOrder:
    """A total order on the ground set: elements listed smallest first."""

    def __init__(self, elements):
        self.elements = tuple(elements)
        self.position = {e: i for i, e in enumerate(self.elements)}
        if len(self.position) != len(self.elements):
            raise MatroidError("order must be a permutation of the ground set")

    @classmethod
    def default(cls, size: int) -> "LinearOrder":
        return cls(range(size))

    @classmethod
    def shuffled(cls, size: int, rng: random.Random) -> "LinearOrder":
        elems = list(range(size))
        rng.shuffle(elems)
        return cls(elems)

    def min_of(self, mask: int) -> int:
        return min(mask_elements(mask), key=self.position.__getitem__)

    def __repr__(self):
        return f"LinearOrder({list(self.elements)})"


class MatroidView:
    """Rank oracle and derived machinery for the matroid of an arrangement."""

    def __init__(self, arrangement: Arrangement):
        self.arrangement = arrangement
        self.size = arrangement.size
        self.full_rank = arrangement.ambient_dim
        self._rank_cache: dict[int, int] = {0: 0}
        self._chi_cache: dict[int, int] = {}
        self._safe_cache: dict[tuple, int] = {}
        self._bases: tuple | None = None
        self._spanning: tuple | None = None
        self._lock = threading.Lock()
        # fast exact-rank path: pre-integerized rows + a Hadamard certificate
        # that every minor survives reduction mod the working prime
        self._int_rows = None
        if arrangement.field_kind == "rational":
            ints = _integerize(arrangement.normals)
            bound_sq = 1
            for row in ints:
                bound_sq *= max(1, sum(v * v for v in row))
            if bound_sq < _P * _P:
                self._int_rows = np.array(ints, dtype=np.int64)

    @property
    def ground_mask(self) -> int:
        return (1 << self.size) - 1

    # -- rank ----------------------------------------------------------------

    def rank_of(self, mask: int) -> int:
        if mask >> self.size:
            raise MatroidError("subset outside the ground set")
        cached = self._rank_cache.get(mask)
        if cached is not None:
            return cached
        if self._int_rows is not None:
            r = _rank_mod_p(self._int_rows[list(mask_elements(mask))])
        else:
            r = exact_rank([self.arrangement.normals[e]
                            for e in mask_elements(mask)])
        with self._lock:
            self._rank_cache[mask] = r
        return r

    def is_spanning(self, mask: int) -> bool:
        return self.rank_of(mask) == self.full_rank

    def is_base(self, mask: int) -> bool:
        return (popcount(mask) == self.full_rank
                and self.rank_of(mask) == self.full_rank)

    # -- enumeration -----------------------------------------------------------

    def bases(self):
        """All bases, each once, in ascending bitmask order (backtracking
        search pruned by rank)."""
        if self._bases is None:
            found = []
            n, size = self.full_rank, self.size

            def extend(start, mask, count):
                if count == n:
                    found.append(mask)
                    return
                for e in range(start, size):
                    if size - e < n - count:
                        break
                    m2 = mask | (1 << e)
                    if self.rank_of(m2) == count + 1:
                        extend(e + 1, m2, count + 1)

            extend(0, 0, 0)
            found.sort()
            self._bases = tuple(found)
        return iter(self._bases)

    def spanning_subsets(self):
        """All subsets of full rank, ascending bitmask order."""
        if self._spanning is None:
            self._spanning = tuple(
                m for m in range(1 << self.size) if self.is_spanning(m))
        return iter(self._spanning)

    def bases_of(self, mask: int):
        """Bases of the sub-arrangement on `mask` (rank must be full)."""
        if not self.is_spanning(mask):
            raise MatroidError("subset is not spanning")
        elems = list(mask_elements(mask))
        n = self.full_rank
        found = []

        def extend(start, sub, count):
            if count == n:
                found.append(sub)
                return
            for idx in range(start, len(elems)):
                if len(elems) - idx < n - count:
                    break
                m2 = sub | (1 << elems[idx])
                if self.rank_of(m2) == count + 1:
                    extend(idx + 1, m2, count + 1)

        extend(0, 0, 0)
        return found

    # -- circuits and activity --------------------------------------------------

    def fundamental_circuit(self, base_mask: int, e: int) -> int:
        """The unique circuit of base + e; contains e, and dropping any of its
        elements restores independence."""
        if not self.is_base(base_mask):
            raise MatroidError("first argument is not a base")
        bit = 1 << e
        if base_mask & bit:
            raise MatroidError("element already in the base")
        if e >= self.size:
            raise MatroidError("element outside the ground set")
        circuit = bit
        n = self.full_rank
        for b in mask_elements(base_mask):
            swapped = (base_mask & ~(1 << b)) | bit
            if self.rank_of(swapped) == n:
                circuit |= 1 << b
        return circuit

    def is_safe(self, base_mask: int, order: LinearOrder, within: int | None = None) -> bool:
        """True iff no external element is minimal (under `order`) in its
        fundamental circuit; externals are taken inside `within` when given."""
        scope = self.ground_mask if within is None else within
        if not self.is_base(base_mask):
            raise MatroidError("first argument is not a base")
        outside = scope & ~base_mask
        for e in mask_elements(outside):
            circ = self.fundamental_circuit(base_mask, e)
            if order.min_of(circ) == e:
                return False
        return True

    # -- characteristic polynomial at 0 ------------------------------------------

    def chi_at_zero(self, mask: int | None = None) -> int:
        """Subset expansion: sum over T inside the given spanning set of
        (-1)^|T| over full-rank T.  Exact integer."""
        if mask is None:
            mask = self.ground_mask
        cached = self._chi_cache.get(mask)
        if cached is not None:
            return cached
        if not self.is_spanning(mask):
            raise MatroidError("subset is not spanning")
        n = self.full_rank
        total = 0
        sub = mask
        while True:
            if self.rank_of(sub) == n:
                total += -1 if popcount(sub) & 1 else 1
            if sub == 0:
                break
            sub = (sub - 1) & mask
        with self._lock:
            self._chi_cache[mask] = total
        return total

    def chi_if_spanning(self, mask: int) -> int:
        """chi_at_zero when the subset spans, else 0 (estimator fast path)."""
        if not self.is_spanning(mask):
            return 0
        return self.chi_at_zero(mask)

    def safe_base_count(self, mask: int | None = None,
                        order: LinearOrder | None = None) -> int:
        """Number of order-safe bases of the sub-arrangement; equals
        (-1)^rank * chi_at_zero for every linear order."""
        if mask is None:
            mask = self.ground_mask
        if order is None:
            order = LinearOrder.default(self.size)
        key = (mask, order.elements)
        cached = self._safe_cache.get(key)
        if cached is not None:
            return cached
        count = sum(1 for b in self.bases_of(mask)
                    if self.is_safe(b, order, within=mask))
        with self._lock:
            self._safe_cache[key] = count
        return count

    def safe_count_if_spanning(self, mask: int, order: LinearOrder) -> int:
        if not self.is_spanning(mask):
            return 0
        return self.safe_base_count(mask, order)
