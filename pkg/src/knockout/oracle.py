"""Subproblem oracles for the knockout loop.

A query carries the pooled supports F(1..S) and an optional budget K.  The
oracle returns the cheapest base-feasible x for which some knockout set alpha
exists with

* alpha disjoint from supp(x),
* alpha meeting every pooled F(s),
* |alpha| == K when a budget is given,

together with such an alpha (the *witness*), or reports that no pair exists.

Two implementations share that contract: :class:`ExhaustiveOracle` enumerates
every 0-1 point of a :class:`BinaryProgram`, and :class:`ShortestPathOracle`
works on a :class:`DirectedGraph` directly.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional

import numpy as np

from .core import BinaryProgram, CapacityError, InputError, Solution
from .graph import DirectedGraph, hop_limited_shortest_path, shortest_path
from .setcover import CoverInstance, exact_cover

EXHAUSTIVE_MAX_VARS = 24


def _supports(pool) -> tuple:
    out = []
    for entry in pool:
        support = entry.support if isinstance(entry, Solution) else entry
        out.append(tuple(sorted(set(int(i) for i in support))))
    return tuple(out)


@dataclass(frozen=True)
class SubproblemQuery:
    pool: tuple = ()
    budget: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "pool", _supports(self.pool))
        if self.budget is not None:
            if int(self.budget) != self.budget or self.budget < 0:
                raise InputError(f"budget must be a nonnegative integer, got {self.budget!r}")
            object.__setattr__(self, "budget", int(self.budget))


class SubproblemAnswer:
    """Feasible (solution + witness) or infeasible (``solution is None``).

    The witness may be supplied as a callable; it is then computed on first
    access, since the driver rarely needs it for unbudgeted queries.
    """

    def __init__(self, solution: Optional[Solution] = None, witness=(), path=None):
        self.solution = solution
        self._witness = witness
        self.path = path

    @property
    def feasible(self) -> bool:
        return self.solution is not None

    @property
    def value(self) -> Optional[int]:
        return None if self.solution is None else self.solution.value

    @cached_property
    def witness(self) -> tuple:
        w = self._witness() if callable(self._witness) else self._witness
        return tuple(sorted(w))

    def __repr__(self):
        if self.solution is None:
            return "SubproblemAnswer(infeasible)"
        return f"SubproblemAnswer(value={self.value}, support={list(self.solution.support)})"


INFEASIBLE = SubproblemAnswer()


def _min_hitting_set(sets, n):
    if not sets:
        return ()
    cover, _ = exact_cover(CoverInstance(n, sets))
    return cover


def _pad(witness, avoid, budget, n):
    taken = set(witness) | set(avoid)
    extra = [i for i in range(n) if i not in taken][: budget - len(witness)]
    return tuple(sorted(set(witness) | set(extra)))


def cover_exists(pool, support, budget: Optional[int], n: int) -> bool:
    """Is there an alpha outside *support* meeting every pooled set (with |alpha| = budget)?"""
    support = set(support)
    rest = [set(F) - support for F in _supports(pool)]
    if any(not r for r in rest):
        return False
    if budget is None:
        return True
    if n - len(support) < budget:
        return False
    return len(_min_hitting_set(rest, n)) <= budget


def knockout_witness(pool, support, budget: Optional[int], n: int) -> Optional[tuple]:
    """Minimum-cardinality witness (lexicographic ties), padded to the budget; None if none exists."""
    if not cover_exists(pool, support, budget, n):
        return None
    support = set(support)
    core = _min_hitting_set([set(F) - support for F in _supports(pool)], n)
    if budget is None:
        return core
    return _pad(core, support, budget, n)


# --------------------------------------------------------------------------
# exhaustive reference


def _feasible_points(program: BinaryProgram, chunk_bits=16):
    n = program.n
    A = np.zeros((program.m, n), dtype=np.int64)
    b = np.array([rhs for _, rhs in program.rows], dtype=np.int64)
    for r, (coeffs, _) in enumerate(program.rows):
        for j, a in coeffs:
            A[r, j] = a
    c = np.array(program.costs, dtype=np.int64)
    bits = np.arange(n, dtype=np.int64)
    step = 1 << min(n, chunk_bits)
    found = []
    for start in range(0, 1 << n, step):
        masks = np.arange(start, start + step, dtype=np.int64)
        X = (masks[:, None] >> bits) & 1
        ok = (X @ A.T >= b).all(axis=1) if program.m else np.ones(len(masks), bool)
        vals = X @ c
        for mask, val in zip(masks[ok].tolist(), vals[ok].tolist()):
            support = tuple(j for j in range(n) if mask >> j & 1)
            found.append((val, support))
    found.sort()
    return [Solution(s, v) for v, s in found]


class ExhaustiveOracle:
    """Reference oracle by total enumeration of the 2^n points (n <= 24)."""

    def __init__(self, program: BinaryProgram):
        if program.n > EXHAUSTIVE_MAX_VARS:
            raise CapacityError(
                f"exhaustive search is limited to {EXHAUSTIVE_MAX_VARS} variables, got {program.n}"
            )
        self.program = program
        self.n = program.n

    @cached_property
    def candidates(self):
        """Base-feasible points in increasing (value, sorted support) order."""
        return _feasible_points(self.program)

    def solve(self, pool=(), budget: Optional[int] = None) -> SubproblemAnswer:
        q = pool if isinstance(pool, SubproblemQuery) else SubproblemQuery(pool, budget)
        for sol in self.candidates:
            witness = knockout_witness(q.pool, sol.support, q.budget, self.n)
            if witness is not None:
                return SubproblemAnswer(sol, witness)
        return INFEASIBLE

    def base_solve(self, forbidden: Iterable[int] = ()) -> Optional[Solution]:
        forbidden = set(forbidden)
        for sol in self.candidates:
            if forbidden.isdisjoint(sol.support):
                return sol
        return None


def exhaustive_solve(program: BinaryProgram, query: SubproblemQuery) -> SubproblemAnswer:
    return ExhaustiveOracle(program).solve(query)


# --------------------------------------------------------------------------
# shortest-path specialization


def _path_solution(path) -> Solution:
    return Solution(path.arc_indices, path.length)


class _ExclusionSearch:
    """Best-first partition search over simple paths (Lawler's scheme).

    Each heap entry is a subspace: paths sharing ``seq[:fixed]`` whose next arc
    is not in ``banned``; ``seq`` is that subspace's best path.
    """

    def __init__(self, g: DirectedGraph):
        self.g = g
        self.heap = []
        first = shortest_path(g)
        if first is not None:
            heapq.heappush(self.heap, (first.length, first.arc_indices, 0, frozenset()))
        self.pool = ()
        self.returned = None
        self.fresh = True

    def _split(self, entry):
        g = self.g
        _, seq, fixed, banned = entry
        nodes = [g.origin] + [g.arcs[k][1] for k in seq]
        for i in range(fixed, len(seq)):
            excluded = {seq[i]} | (banned if i == fixed else set())
            spur = shortest_path(
                g, excluded, source=nodes[i], banned_nodes=nodes[:i]
            )
            if spur is None:
                continue
            prefix = seq[:i]
            heapq.heappush(
                self.heap,
                (g.path_length(prefix) + spur.length, prefix + spur.arc_indices, i, frozenset(excluded)),
            )

    def can_resume(self, pool) -> bool:
        if self.returned is None:
            return self.fresh or pool == self.pool
        last = tuple(sorted(self.returned[1]))
        return pool == self.pool or pool == self.pool + (last,)

    def next_admissible(self, pool, admissible: Callable[[tuple], bool]):
        if self.returned is not None:
            if pool == self.pool:
                heapq.heappush(self.heap, self.returned)
            else:
                # the path handed out last time is now pooled
                self._split(self.returned)
        self.fresh = False
        self.pool = pool
        self.returned = None
        while self.heap:
            entry = heapq.heappop(self.heap)
            if admissible(entry[1]):
                self.returned = entry
                return entry
            self._split(entry)
        return None


class ShortestPathOracle:
    """Oracle for origin-destination shortest path with arc knockout.

    Unbudgeted queries reduce to "cheapest path containing no pooled support",
    answered by an exclusion search that is resumed when the pool grows by the
    path it last returned.  Budgeted queries run a branch and bound over
    partial knockout sets.
    """

    def __init__(self, g: DirectedGraph):
        self.graph = g
        self.n = g.arc_count
        self._search = None
        self.stats = {"bb_nodes": 0, "restarts": 0}

    def base_solve(self, forbidden: Iterable[int] = ()) -> Optional[Solution]:
        p = shortest_path(self.graph, forbidden)
        return None if p is None else _path_solution(p)

    def solve(self, pool=(), budget: Optional[int] = None) -> SubproblemAnswer:
        q = pool if isinstance(pool, SubproblemQuery) else SubproblemQuery(pool, budget)
        for F in q.pool:
            if F and (F[0] < 0 or F[-1] >= self.n):
                raise InputError(f"pooled support {list(F)} references a missing arc")
        if q.budget is None:
            return self._solve_unbudgeted(q.pool)
        return self._solve_budgeted(q.pool, q.budget)

    def _is_path_set(self, F) -> bool:
        g = self.graph
        by_tail = {}
        for k in F:
            by_tail.setdefault(g.arcs[k][0], []).append(k)
        node, used = g.origin, 0
        seen = {node}
        while node != g.destination:
            arcs = by_tail.get(node, ())
            if len(arcs) != 1:
                return False
            node = g.arcs[arcs[0]][1]
            if node in seen:
                return False
            seen.add(node)
            used += 1
        return used == len(F)

    def _solve_unbudgeted(self, pool) -> SubproblemAnswer:
        if any(len(F) == 0 for F in pool):
            return INFEASIBLE
        # a simple path contains another simple path only if they are equal
        exact = set()
        general = []
        for F in pool:
            if self._is_path_set(F):
                exact.add(F)
            else:
                general.append(frozenset(F))

        def admissible(seq):
            key = tuple(sorted(seq))
            if key in exact:
                return False
            s = set(seq)
            return not any(F <= s for F in general)

        if self._search is None or not self._search.can_resume(pool):
            self.stats["restarts"] += 1
            self._search = _ExclusionSearch(self.graph)
        entry = self._search.next_admissible(pool, admissible)
        if entry is None:
            return INFEASIBLE
        length, seq = entry[0], entry[1]
        sol = Solution(seq, length)
        rest = [set(F) - set(seq) for F in pool]
        return SubproblemAnswer(
            sol, lambda: _min_hitting_set(rest, self.n), path=seq
        )

    def _solve_budgeted(self, pool, budget) -> SubproblemAnswer:
        g, m = self.graph, self.n
        max_arcs = m - budget
        if max_arcs < 1:
            return INFEASIBLE
        sets = [frozenset(F) for F in pool]
        if any(not F for F in sets):
            return INFEASIBLE
        best = None  # (value, path sequence, witness)
        visited = set()

        def explore(A):
            nonlocal best
            if A in visited:
                return
            visited.add(A)
            self.stats["bb_nodes"] += 1
            sp = shortest_path(g, A)
            if sp is None or (best is not None and sp.length > best[0]):
                return
            unhit = next((F for F in sets if F.isdisjoint(A)), None)
            if unhit is None:
                cand = sp
                if len(sp.arc_indices) > max_arcs:
                    cand = hop_limited_shortest_path(g, A, max_arcs)
                    if cand is None:
                        return
                witness = _pad(A, cand.arc_indices, budget, m)
                key = (cand.length, cand.arc_indices, witness)
                if best is None or key < best:
                    best = key
                return
            if len(A) >= budget:
                return
            for e in sorted(unhit):
                explore(A | {e})

        explore(frozenset())
        if best is None:
            return INFEASIBLE
        value, seq, witness = best
        return SubproblemAnswer(Solution(seq, value), witness, path=seq)


def sp_interdiction_solve(g: DirectedGraph, query: SubproblemQuery) -> SubproblemAnswer:
    return ShortestPathOracle(g).solve(query)

