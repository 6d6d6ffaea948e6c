"""Knockout drivers.

:func:`solve_knockout` finds a minimum-weight knockout set D such that the
problem left after forcing D to zero has optimum >= C* (or no solution).
:func:`solve_cardinality` picks exactly K variables to knock out so that the
surviving optimum is as large as possible.

Both drivers only talk to an *oracle* object exposing ``n``,
``solve(pool, budget=None)`` and ``base_solve(forbidden)``; see
:mod:`knockout.oracle`.
"""

from __future__ import annotations

import logging
import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    BrokenOracleError,
    CardinalityResult,
    InfeasibleBudgetError,
    InputError,
    KnockoutResult,
    KnockoutWeights,
    MustBeInfeasible,
    ResourceLimitError,
    SolutionPool,
    TraceRecord,
    property_holds,
)
from .setcover import CoverInstance, cover_with_survivor, exact_cover

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 100_000


@dataclass
class SolveOptions:
    max_iterations: Optional[int] = None
    time_limit: Optional[float] = None  # seconds
    ensure_survivor: bool = False

    def iteration_cap(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        env = os.environ.get("KO_MAX_ITER")
        return int(env) if env else DEFAULT_MAX_ITERATIONS


class _Clock:
    def __init__(self, options: SolveOptions):
        self.start = time.perf_counter()
        self.cap = options.iteration_cap()
        self.time_limit = options.time_limit
        self.trace = []

    def ms(self):
        return (time.perf_counter() - self.start) * 1000.0

    def record(self, answer):
        sol = answer.solution
        self.trace.append(
            TraceRecord(
                iteration=len(self.trace) + 1,
                value=None if sol is None else sol.value,
                support_size=0 if sol is None else len(sol.support),
                elapsed_ms=self.ms(),
            )
        )

    def check(self, iterations):
        if iterations >= self.cap:
            raise ResourceLimitError(f"iteration cap {self.cap} reached", self.trace)
        if self.time_limit is not None and self.ms() > self.time_limit * 1000.0:
            raise ResourceLimitError(f"time limit {self.time_limit}s reached", self.trace)


def solve_knockout(oracle, weights: Optional[KnockoutWeights], spec, options: Optional[SolveOptions] = None) -> KnockoutResult:
    """Minimum-weight knockout set for the property *spec*.

    Solutions are pooled while they violate *spec*; each re-solve must avoid
    containing any pooled support.  Once the oracle returns a solution with
    the property (or none at all), every solution violating it contains a
    pooled support, so any cover of the pool achieves the property and the
    cheapest cover is optimal.  The terminating solution is not covered.
    """
    options = options or SolveOptions()
    if weights is None:
        weights = KnockoutWeights.unit(oracle.n)
    if len(weights) != oracle.n:
        raise InputError(f"{len(weights)} weights for {oracle.n} variables")
    if isinstance(spec, MustBeInfeasible) and options.ensure_survivor:
        raise InputError("ensure_survivor makes no sense when the goal is infeasibility")

    clock = _Clock(options)
    pool = SolutionPool()
    answer = oracle.solve(pool)
    clock.record(answer)
    while answer.feasible and not property_holds(spec, answer.value):
        if len(pool) and pool[-1].value > answer.value:
            raise BrokenOracleError("pooled values must be nondecreasing")
        pool.add(answer.solution)
        clock.check(len(clock.trace))
        answer = oracle.solve(pool)
        clock.record(answer)
    log.debug("knockout loop finished with %d pooled solutions", len(pool))

    found = len(pool) + (1 if answer.feasible else 0)
    inst = CoverInstance(oracle.n, pool.supports, weights)
    if options.ensure_survivor:
        cover, weight, survivor = cover_with_survivor(inst, oracle.base_solve, spec)
        surviving = survivor.value
    else:
        cover, weight = exact_cover(inst)
        left = oracle.base_solve(cover)
        surviving = None if left is None else left.value
    return KnockoutResult(
        knockout_set=cover,
        weight=weight,
        pool_size=found,
        spec=spec,
        surviving_value=surviving,
        pool=pool.entries,
        trace=clock.trace,
        ensure_survivor=options.ensure_survivor,
    )


def solve_cardinality(oracle, K: int, options: Optional[SolveOptions] = None) -> CardinalityResult:
    """Knock out exactly *K* variables so that the surviving optimum is maximal.

    Pools solutions under the budget until the budgeted subproblem becomes
    infeasible; the last feasible answer's value is the max-min and its
    witness is a maximizing knockout set.
    """
    options = options or SolveOptions()
    if K < 0 or K > oracle.n:
        raise InputError(f"budget {K} outside [0, {oracle.n}]")
    clock = _Clock(options)
    if K == 0:
        base = oracle.base_solve(())
        if base is None:
            raise InfeasibleBudgetError("the base problem has no feasible solution")
        return CardinalityResult(0, (), base.value, 0)

    pool = SolutionPool()
    answer = oracle.solve(pool, K)
    clock.record(answer)
    if not answer.feasible:
        raise InfeasibleBudgetError(f"no solution survives knocking out {K} variables")
    while True:
        last, last_pool = answer, len(pool)
        pool.add(answer.solution)
        clock.check(len(clock.trace))
        answer = oracle.solve(pool, K)
        clock.record(answer)
        if not answer.feasible:
            break
        if answer.value < last.value:
            raise BrokenOracleError("pooled values must be nondecreasing")
    return CardinalityResult(
        budget=K,
        knockout_set=last.witness,
        optimal_value=last.value,
        pool_size=last_pool,
        pool=pool.entries,
        trace=clock.trace,
    )


def verify(result, oracle, target=None) -> bool:
    """Re-solve with the result's knockout set removed and check the claim.

    *target* defaults to what the result was computed for: the property of a
    :class:`KnockoutResult` or the budget of a :class:`CardinalityResult`.
    Sets and returns ``result.verified``.
    """
    knocked = tuple(result.knockout_set)
    left = oracle.base_solve(knocked)
    value = None if left is None else left.value
    if isinstance(result, CardinalityResult):
        K = result.budget if target is None else target
        ok = (
            len(set(knocked)) == K
            and left is not None
            and value == result.optimal_value
        )
    else:
        spec = result.spec if target is None else target
        ok = property_holds(spec, value)
        if ok and result.ensure_survivor:
            ok = left is not None
        if ok and result.surviving_value != value:
            ok = False
    if not ok:
        log.error("verification failed for knockout set %s (surviving value %s)", list(knocked), value)
    result.verified = ok
    return ok


def gamma_threshold(gamma: float, base_value: int) -> int:
    """Smallest integer C* with C* >= gamma * base_value (gamma read as a decimal)."""
    return math.ceil(Fraction(str(gamma)) * base_value)

