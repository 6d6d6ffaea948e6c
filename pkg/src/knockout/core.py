"""Problem, solution, pool and result types shared by every solver.

The base problem is a pure 0-1 program in canonical form::

    min  sum_i c_i x_i
    s.t. sum_j a_ij x_j >= b_i      for every row i
         x_j in {0, 1}

A *knockout set* D forces x_j = 0 for every j in D.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union


class KnockoutError(Exception):
    """Base class for errors raised by this package."""


class InputError(KnockoutError, ValueError):
    pass


class CapacityError(KnockoutError):
    pass


class ResourceLimitError(KnockoutError):
    """Iteration or wall-clock cap hit; carries the partial trace."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class BrokenOracleError(KnockoutError):
    pass


class InfeasibleBudgetError(KnockoutError):
    pass


class NoSurvivorCoverError(KnockoutError):
    pass


def _as_int(value, what):
    if isinstance(value, bool) or not isinstance(value, int):
        try:
            if int(value) != value:
                raise TypeError
            value = int(value)
        except (TypeError, ValueError, OverflowError):
            raise InputError(f"{what} must be an integer, got {value!r}") from None
    return value


@dataclass(frozen=True)
class BinaryProgram:
    """Canonical 0-1 program; every row reads ``sum a_ij x_j >= b_i``."""

    costs: tuple
    rows: tuple
    variable_names: Optional[tuple] = None

    def __init__(self, costs: Sequence[int], rows: Iterable = (), variable_names=None):
        costs = tuple(_as_int(c, "cost") for c in costs)
        if not costs:
            raise InputError("a program needs at least one variable")
        n = len(costs)
        norm = []
        for coeffs, rhs in rows:
            coeffs = {int(j): _as_int(a, "coefficient") for j, a in dict(coeffs).items()}
            for j in coeffs:
                if not 0 <= j < n:
                    raise InputError(f"row index {j} outside [0, {n})")
            norm.append((tuple(sorted(coeffs.items())), _as_int(rhs, "rhs")))
        if variable_names is not None:
            variable_names = tuple(str(v) for v in variable_names)
            if len(variable_names) != n:
                raise InputError("variable_names must have one entry per variable")
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "rows", tuple(norm))
        object.__setattr__(self, "variable_names", variable_names)

    @property
    def n(self) -> int:
        return len(self.costs)

    @property
    def m(self) -> int:
        return len(self.rows)


def evaluate(program: BinaryProgram, support: Iterable[int]):
    """Return ``(feasible, value)`` for the 0-1 vector whose ones are *support*.

    The value is reported even when the point is infeasible.
    """
    chosen = set()
    for j in support:
        if not 0 <= j < program.n:
            raise InputError(f"support index {j} outside [0, {program.n})")
        chosen.add(j)
    value = sum(program.costs[j] for j in chosen)
    feasible = all(
        sum(a for j, a in coeffs if j in chosen) >= rhs for coeffs, rhs in program.rows
    )
    return feasible, value


@dataclass(frozen=True)
class KnockoutWeights:
    d: tuple

    def __init__(self, d: Sequence[int]):
        d = tuple(_as_int(w, "weight") for w in d)
        if any(w < 0 for w in d):
            raise InputError("knockout weights must be nonnegative")
        object.__setattr__(self, "d", d)

    @classmethod
    def unit(cls, n: int) -> "KnockoutWeights":
        return cls([1] * n)

    def __len__(self):
        return len(self.d)

    def __getitem__(self, i):
        return self.d[i]

    def total(self, indices: Iterable[int]) -> int:
        return sum(self.d[i] for i in indices)


@dataclass(frozen=True)
class ValueAtLeast:
    threshold: int

    def __post_init__(self):
        object.__setattr__(self, "threshold", _as_int(self.threshold, "threshold"))


@dataclass(frozen=True)
class MustBeInfeasible:
    pass


PropertySpec = Union[ValueAtLeast, MustBeInfeasible]


def property_holds(spec: PropertySpec, outcome: Optional[int]) -> bool:
    """Does a surviving optimum of *outcome* (None: infeasible) satisfy *spec*?"""
    if isinstance(spec, MustBeInfeasible):
        return outcome is None
    if isinstance(spec, ValueAtLeast):
        return outcome is None or outcome >= spec.threshold
    raise InputError(f"unknown property {spec!r}")


@dataclass(frozen=True, order=True)
class Solution:
    """A base-feasible point, identified by its support (indices with x_i = 1)."""

    value: int
    support: tuple

    def __init__(self, support: Iterable[int], value: int):
        object.__setattr__(self, "support", tuple(sorted(set(support))))
        object.__setattr__(self, "value", _as_int(value, "value"))

    @classmethod
    def from_program(cls, program: BinaryProgram, support: Iterable[int]) -> "Solution":
        support = tuple(support)
        _, value = evaluate(program, support)
        return cls(support, value)


class SolutionPool:
    """The recorded supports F(1), ..., F(S) in the order they were found."""

    def __init__(self, entries: Iterable[Solution] = ()):
        self._entries = []
        self._seen = set()
        for sol in entries:
            self.add(sol)

    def add(self, solution: Solution) -> None:
        if solution.support in self._seen:
            raise BrokenOracleError(
                f"support {list(solution.support)} is already pooled; "
                "its knockout constraint should have excluded it"
            )
        self._entries.append(solution)
        self._seen.add(solution.support)

    @property
    def entries(self):
        return tuple(self._entries)

    @property
    def supports(self):
        return tuple(s.support for s in self._entries)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __getitem__(self, i):
        return self._entries[i]

    def __contains__(self, support):
        return tuple(sorted(support)) in self._seen

    def is_monotone(self) -> bool:
        vals = [s.value for s in self._entries]
        return all(a <= b for a, b in zip(vals, vals[1:]))


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    value: Optional[int]
    support_size: int
    elapsed_ms: float


@dataclass
class KnockoutResult:
    knockout_set: tuple
    weight: int
    pool_size: int
    spec: PropertySpec
    surviving_value: Optional[int] = None
    pool: tuple = ()
    trace: list = field(default_factory=list)
    ensure_survivor: bool = False
    verified: bool = False


@dataclass
class CardinalityResult:
    budget: int
    knockout_set: tuple
    optimal_value: int
    pool_size: int
    pool: tuple = ()
    trace: list = field(default_factory=list)
    verified: bool = False
