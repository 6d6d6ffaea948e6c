"""Exact minimum-weight hitting set over the pooled supports.

Choose indices D minimizing ``sum(d[i] for i in D)`` such that D meets every
set.  Desk-scale pools only: the search is a depth-first branch and bound with
a disjoint-sets lower bound, seeded by the weighted greedy rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .core import (
    InputError,
    KnockoutWeights,
    NoSurvivorCoverError,
    PropertySpec,
    ValueAtLeast,
    property_holds,
)


@dataclass(frozen=True)
class CoverInstance:
    universe_size: int
    sets: tuple
    weights: KnockoutWeights

    def __init__(self, universe_size: int, sets: Iterable[Iterable[int]], weights=None):
        sets = tuple(frozenset(int(i) for i in s) for s in sets)
        if weights is None:
            weights = KnockoutWeights.unit(universe_size)
        elif not isinstance(weights, KnockoutWeights):
            weights = KnockoutWeights(weights)
        if len(weights) != universe_size:
            raise InputError("weights must have one entry per index")
        for s in sets:
            if not s:
                raise InputError("cannot cover an empty set")
            if min(s) < 0 or max(s) >= universe_size:
                raise InputError(f"set {sorted(s)} leaves [0, {universe_size})")
        object.__setattr__(self, "universe_size", universe_size)
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "weights", weights)

    def is_cover(self, chosen: Iterable[int]) -> bool:
        chosen = set(chosen)
        return all(s & chosen for s in self.sets)


def drop_supersets(sets: Sequence[frozenset]) -> list:
    """Remove duplicates and any set that strictly contains another; keeps order."""
    kept = []
    seen = set()
    by_size = sorted(range(len(sets)), key=lambda i: len(sets[i]))
    keep_idx = []
    for i in by_size:
        s = sets[i]
        if s in seen or any(k <= s for k in kept):
            continue
        seen.add(s)
        kept.append(s)
        keep_idx.append(i)
    return [sets[i] for i in sorted(keep_idx)]


def greedy_cover(inst: CoverInstance) -> tuple:
    """Weighted greedy: repeatedly take the index with the least weight per newly hit set."""
    d = inst.weights.d
    uncovered = list(inst.sets)
    chosen = set()
    while uncovered:
        hits = {}
        for s in uncovered:
            for i in s:
                hits[i] = hits.get(i, 0) + 1
        # zero-weight indices sort first since their ratio is 0
        best = min(hits, key=lambda i: (d[i] / hits[i], i))
        chosen.add(best)
        uncovered = [s for s in uncovered if best not in s]
    return tuple(sorted(chosen))


def _disjoint_bound(uncovered, d):
    used = set()
    bound = 0
    for s in uncovered:
        if used.isdisjoint(s):
            used |= s
            bound += min(d[i] for i in s)
    return bound


def _search(inst: CoverInstance, accept: Optional[Callable] = None, check_bound=None):
    d = inst.weights.d
    sets = drop_supersets(list(inst.sets))
    best = None  # (weight, sorted cover)

    def consider(chosen, weight):
        nonlocal best
        key = (weight, tuple(sorted(chosen)))
        if best is not None and key >= best:
            return
        if accept is not None and not accept(key[1]):
            return
        best = key

    if accept is None:
        seed = greedy_cover(CoverInstance(inst.universe_size, sets, inst.weights))
        consider(seed, sum(d[i] for i in seed))

    def branch(chosen, weight, uncovered):
        if not uncovered:
            consider(chosen, weight)
            return
        bound = _disjoint_bound(uncovered, d)
        if check_bound is not None:
            check_bound(chosen, weight, bound, uncovered)
        # ties are explored so the lexicographic rule stays exact
        if best is not None and weight + bound > best[0]:
            return
        for i in sorted(uncovered[0]):
            if best is not None and weight + d[i] > best[0]:
                continue
            chosen.append(i)
            branch(chosen, weight + d[i], [s for s in uncovered if i not in s])
            chosen.pop()

    branch([], 0, sets)
    return best


def exact_cover(inst: CoverInstance, check_bound=None):
    """Minimum-weight cover as ``(cover, weight)``.

    Ties go to the lexicographically smallest sorted index sequence among the
    irredundant covers.  *check_bound*, if given, is called at every search
    node with ``(chosen, weight, bound, uncovered)`` (used by tests).
    """
    if not inst.sets:
        return (), 0
    weight, cover = _search(inst, check_bound=check_bound)
    return cover, weight


def cover_with_survivor(inst: CoverInstance, base_solve: Callable, spec: PropertySpec):
    """Minimum-weight cover after whose removal a solution with the property survives.

    *base_solve(forbidden)* returns the base optimum avoiding *forbidden* (an
    object with ``.value``) or None.  Returns ``(cover, weight, survivor)``.
    When the pool holds every solution violating *spec*, a sub-cover of a
    surviving cover survives too, so accepting only irredundant covers is exact.
    """
    if not isinstance(spec, ValueAtLeast):
        raise InputError("a survivor is only meaningful for a value threshold")
    survivors = {}

    def accept(cover):
        sol = base_solve(cover)
        ok = sol is not None and property_holds(spec, sol.value)
        if ok:
            survivors[cover] = sol
        return ok

    if not inst.sets:
        if not accept(()):
            raise NoSurvivorCoverError("base problem has no solution with the property")
        return (), 0, survivors[()]
    found = _search(inst, accept=accept)
    if found is None:
        raise NoSurvivorCoverError("every cover of the pool leaves no qualifying survivor")
    weight, cover = found
    return cover, weight, survivors[cover]
