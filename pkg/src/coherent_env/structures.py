"""Coherent structure functions represented by their minimal path sets."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    DegenerateSystemError,
    IrrelevantComponentError,
    NonMonotoneError,
    OutOfRangeError,
)

MAX_COMPONENTS = 20
MAX_TABLE_COMPONENTS = 12

Path = frozenset
StateTable = Union[Mapping[Sequence[int], int], Callable[[Sequence[int]], int]]


@dataclass(frozen=True)
class CoherentStructure:
    """Structure function of a coherent system.

    Components are numbered 1..n. ``kind`` is ``"paths"`` (explicit minimal
    path sets) or ``"kofn"`` (works iff at least ``k`` of ``n`` components
    work).
    """

    n: int
    kind: str
    paths: frozenset | None = None
    k: int | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise OutOfRangeError(f"component count must be a positive integer, got {self.n!r}")
        if self.n > MAX_COMPONENTS:
            raise OutOfRangeError(f"n={self.n} exceeds the cap of {MAX_COMPONENTS} components")
        if self.kind == "kofn":
            if self.k is None or not 1 <= self.k <= self.n:
                raise OutOfRangeError(f"k-out-of-n needs 1 <= k <= n, got k={self.k}, n={self.n}")
            if self.paths is not None:
                raise ValueError("k-out-of-n structure does not take explicit paths")
        elif self.kind == "paths":
            if not self.paths:
                raise DegenerateSystemError("a coherent structure needs at least one path")
            paths = frozenset(frozenset(int(i) for i in p) for p in self.paths)
            object.__setattr__(self, "paths", paths)
            _validate_paths(self.n, paths)
        else:
            raise ValueError(f"unknown structure kind {self.kind!r}")

    @classmethod
    def from_paths(cls, n: int, paths) -> "CoherentStructure":
        return cls(n=n, kind="paths", paths=frozenset(frozenset(p) for p in paths))

    @property
    def path_sets(self) -> frozenset:
        return expand_paths(self)

    def path_masks(self) -> list[int]:
        """Minimal paths as bit masks (bit i-1 set for component i), sorted."""
        return sorted(sum(1 << (i - 1) for i in p) for p in self.path_sets)

    def phi(self, state: Sequence[int]) -> int:
        """Structure function at a 0/1 component-state vector."""
        if len(state) != self.n:
            raise ValueError(f"state has {len(state)} entries, structure has {self.n}")
        if self.kind == "kofn":
            return int(sum(1 for s in state if s) >= self.k)
        working = {i + 1 for i, s in enumerate(state) if s}
        return int(any(p <= working for p in self.paths))

    def working_table(self) -> np.ndarray:
        """Boolean vector over all 2**n state masks: entry ``m`` is phi(mask m)."""
        masks = np.arange(1 << self.n, dtype=np.int64)
        if self.kind == "kofn":
            counts = np.zeros_like(masks)
            for i in range(self.n):
                counts += (masks >> i) & 1
            return counts >= self.k
        out = np.zeros(masks.shape, dtype=bool)
        for pm in self.path_masks():
            out |= (masks & pm) == pm
        return out

    def to_boolean_table(self) -> dict[tuple[int, ...], int]:
        table = self.working_table()
        return {
            tuple((m >> i) & 1 for i in range(self.n)): int(table[m])
            for m in range(1 << self.n)
        }

    def __str__(self) -> str:
        if self.kind == "kofn":
            return f"{self.k}-out-of-{self.n}"
        body = ",".join("{" + ",".join(map(str, sorted(p))) + "}" for p in _sorted_paths(self.paths))
        return f"paths[{body}]"


def _sorted_paths(paths) -> list[tuple[int, ...]]:
    return sorted((tuple(sorted(p)) for p in paths), key=lambda t: (len(t), t))


def _validate_paths(n: int, paths: frozenset) -> None:
    for p in paths:
        if not p:
            raise DegenerateSystemError("empty path set makes the system always work")
        bad = [i for i in p if not 1 <= i <= n]
        if bad:
            raise OutOfRangeError(f"path {sorted(p)} has indices outside 1..{n}: {bad}")
    for p, q in combinations(paths, 2):
        if p <= q or q <= p:
            raise NonMonotoneError(f"paths {sorted(p)} and {sorted(q)} are not minimal (one contains the other)")
    covered = set().union(*paths)
    missing = sorted(set(range(1, n + 1)) - covered)
    if missing:
        raise IrrelevantComponentError(f"components {missing} appear in no minimal path")


def series(n: int) -> CoherentStructure:
    return CoherentStructure.from_paths(n, [range(1, n + 1)])


def parallel(n: int) -> CoherentStructure:
    return CoherentStructure.from_paths(n, [[i] for i in range(1, n + 1)])


def k_out_of_n(k: int, n: int) -> CoherentStructure:
    if not (1 <= n <= MAX_COMPONENTS) or not 1 <= k <= n:
        raise OutOfRangeError(f"k-out-of-n needs 1 <= k <= n, got k={k}, n={n}")
    return CoherentStructure(n=n, kind="kofn", k=k)


def expand_paths(s: CoherentStructure) -> frozenset:
    if s.kind == "kofn":
        return frozenset(frozenset(c) for c in combinations(range(1, s.n + 1), s.k))
    return s.paths


def from_boolean_table(n: int, table: StateTable) -> CoherentStructure:
    """Recover the minimal path sets of a coherent structure from its truth table.

    ``table`` is either a mapping from 0/1 state tuples (component 1 first) to
    the system bit, or a callable taking such a tuple.
    """
    if not 1 <= n <= MAX_TABLE_COMPONENTS:
        raise OutOfRangeError(f"table ingestion supports 1 <= n <= {MAX_TABLE_COMPONENTS}, got {n}")
    lookup = table if callable(table) else _mapping_lookup(table, n)
    size = 1 << n
    phi = np.empty(size, dtype=bool)
    for m in range(size):
        state = tuple((m >> i) & 1 for i in range(n))
        v = lookup(state)
        if v not in (0, 1, True, False):
            raise ValueError(f"system state must be 0 or 1, got {v!r} at {state}")
        phi[m] = bool(v)

    if phi.all() or not phi.any():
        raise DegenerateSystemError(f"table is constant {int(phi[0])}")
    if phi[0] or not phi[size - 1]:
        raise NonMonotoneError("table must have phi(all 0)=0 and phi(all 1)=1")

    masks = np.arange(size)
    minimal = phi.copy()
    for i in range(n):
        bit = 1 << i
        lower = masks[(masks & bit) == 0]
        if np.any(phi[lower] & ~phi[lower | bit]):
            m = int(lower[np.argmax(phi[lower] & ~phi[lower | bit])])
            raise NonMonotoneError(
                f"turning component {i + 1} on breaks the system at state "
                f"{tuple((m >> j) & 1 for j in range(n))}"
            )
        upper = masks[(masks & bit) != 0]
        minimal[upper] &= ~phi[upper ^ bit]

    paths = [frozenset(j + 1 for j in range(n) if (m >> j) & 1) for m in np.flatnonzero(minimal)]
    covered = set().union(*paths)
    missing = sorted(set(range(1, n + 1)) - covered)
    if missing:
        raise IrrelevantComponentError(f"components {missing} never affect the system state")
    return CoherentStructure.from_paths(n, paths)


def _mapping_lookup(table: Mapping, n: int):
    norm = {}
    for key, value in table.items():
        key = tuple(int(b) for b in key)
        if len(key) != n:
            raise ValueError(f"state {key} does not have {n} entries")
        norm[key] = value

    def lookup(state):
        try:
            return norm[state]
        except KeyError:
            raise ValueError(f"table is missing state {state}") from None

    return lookup
