import itertools

import pytest

from brute import max_min_value, min_knockout_weight, surviving_length
from knockout.core import (
    BinaryProgram,
    CardinalityResult,
    InfeasibleBudgetError,
    InputError,
    KnockoutResult,
    KnockoutWeights,
    MustBeInfeasible,
    ResourceLimitError,
    Solution,
    ValueAtLeast,
)
from knockout.engine import (
    SolveOptions,
    gamma_threshold,
    solve_cardinality,
    solve_knockout,
    verify,
)
from knockout.graph import DirectedGraph, random_instance, to_binary_program
from knockout.oracle import ExhaustiveOracle, ShortestPathOracle


@pytest.fixture(params=["sp", "exhaustive"])
def dg1_oracle(request, dg1):
    if request.param == "sp":
        return ShortestPathOracle(dg1)
    return ExhaustiveOracle(to_binary_program(dg1))


def test_dg1_value_at_least_4(dg1, dg1_oracle):
    assert min_knockout_weight(dg1, 4) == 2
    r = solve_knockout(dg1_oracle, None, ValueAtLeast(4))
    assert r.knockout_set == (0, 2) and r.weight == 2
    assert [s.support for s in r.pool] == [(0, 1), (2, 3)]
    assert r.surviving_value == 5
    assert r.pool_size == 3
    assert verify(r, dg1_oracle) and r.verified


def test_dg1_already_satisfied(dg1_oracle):
    r = solve_knockout(dg1_oracle, None, ValueAtLeast(2))
    assert r.knockout_set == () and r.weight == 0 and r.pool == ()


def test_dg1_must_be_infeasible(dg1, dg1_oracle):
    # three arc-disjoint paths, so the minimum cut has 3 arcs
    assert min_knockout_weight(dg1, None) == 3
    r = solve_knockout(dg1_oracle, None, MustBeInfeasible())
    assert r.weight == 3 and len(r.knockout_set) == 3
    assert 4 in r.knockout_set
    assert r.surviving_value is None
    assert verify(r, dg1_oracle)


def test_literal_pooling_of_the_final_solution_would_overpay(dg1):
    # covering the terminating path {a5} too would cost 3 instead of 2
    from knockout.setcover import CoverInstance, exact_cover

    assert exact_cover(CoverInstance(5, [{0, 1}, {2, 3}, {4}]))[1] == 3
    assert solve_knockout(ShortestPathOracle(dg1), None, ValueAtLeast(4)).weight == 2


@pytest.mark.parametrize("K, value", [(0, 2), (1, 2), (2, 5)])
def test_dg1_cardinality(dg1, dg1_oracle, K, value):
    assert max_min_value(dg1, K) == value
    r = solve_cardinality(dg1_oracle, K)
    assert r.optimal_value == value and len(r.knockout_set) == K
    assert verify(r, dg1_oracle)
    if K == 2:
        assert r.knockout_set == (0, 2)


def test_dg1_cardinality_three(dg1, dg1_oracle):
    # three knockouts: {a1,a3} plus one more arc off the a5 path
    r = solve_cardinality(dg1_oracle, 3)
    assert r.optimal_value == 5 == max_min_value(dg1, 3)
    assert verify(r, dg1_oracle)


def test_dg1_cardinality_too_large(dg1):
    with pytest.raises(InfeasibleBudgetError):
        solve_cardinality(ShortestPathOracle(dg1), 5)
    with pytest.raises(InputError):
        solve_cardinality(ShortestPathOracle(dg1), 6)


def test_verify_rejects_tampered_result(dg1):
    orc = ShortestPathOracle(dg1)
    good = solve_knockout(orc, None, ValueAtLeast(4))
    bad = KnockoutResult((4,), 1, good.pool_size, ValueAtLeast(4), surviving_value=2)
    assert not verify(bad, orc) and not bad.verified
    card = solve_cardinality(orc, 2)
    assert verify(card, orc)
    assert not verify(CardinalityResult(2, (0, 1), 5, 0), orc)
    assert not verify(CardinalityResult(2, (0,), 2, 0), orc)


def test_weighted_knockout(dg1):
    # both 2-arc routes must be hit: cheapest is a1 (5) plus a3 or a4 (1)
    w = [5, 6, 1, 1, 1]
    r = solve_knockout(ShortestPathOracle(dg1), KnockoutWeights(w), ValueAtLeast(4))
    assert r.weight == min_knockout_weight(dg1, 4, w) == 6
    assert r.knockout_set == (0, 2)


def test_ensure_survivor(dg1):
    r = solve_knockout(
        ShortestPathOracle(dg1), None, ValueAtLeast(4), SolveOptions(ensure_survivor=True)
    )
    assert r.knockout_set == (0, 2) and r.surviving_value == 5
    assert verify(r, ShortestPathOracle(dg1))
    with pytest.raises(InputError):
        solve_knockout(
            ShortestPathOracle(dg1), None, MustBeInfeasible(), SolveOptions(ensure_survivor=True)
        )


def test_iteration_cap_carries_trace(dg1, monkeypatch):
    with pytest.raises(ResourceLimitError) as info:
        solve_knockout(ShortestPathOracle(dg1), None, MustBeInfeasible(), SolveOptions(max_iterations=2))
    assert len(info.value.trace) == 2
    monkeypatch.setenv("KO_MAX_ITER", "1")
    with pytest.raises(ResourceLimitError):
        solve_knockout(ShortestPathOracle(dg1), None, ValueAtLeast(4))


def test_time_limit(dg1):
    with pytest.raises(ResourceLimitError):
        solve_knockout(ShortestPathOracle(dg1), None, MustBeInfeasible(), SolveOptions(time_limit=-1))


def test_trace_records(dg1):
    r = solve_knockout(ShortestPathOracle(dg1), None, ValueAtLeast(4))
    assert [(t.iteration, t.value, t.support_size) for t in r.trace] == [
        (1, 2, 2),
        (2, 2, 2),
        (3, 5, 1),
    ]
    times = [t.elapsed_ms for t in r.trace]
    assert times == sorted(times)


class _DuplicatingOracle:
    """Breaks the contract by returning the same support forever."""

    n = 2

    def solve(self, pool, budget=None):
        from knockout.oracle import SubproblemAnswer

        return SubproblemAnswer(Solution([0], 1), ())

    def base_solve(self, forbidden=()):
        return None


def test_broken_oracle_is_caught():
    from knockout.core import BrokenOracleError

    with pytest.raises(BrokenOracleError):
        solve_knockout(_DuplicatingOracle(), None, ValueAtLeast(5))


def test_generic_program_knockout():
    # vertex cover of a triangle: min sum x s.t. x_i + x_j >= 1 on each edge
    prog = BinaryProgram([1, 1, 1], [({0: 1, 1: 1}, 1), ({1: 1, 2: 1}, 1), ({0: 1, 2: 1}, 1)])
    orc = ExhaustiveOracle(prog)
    r = solve_knockout(orc, None, ValueAtLeast(3))
    # brute force: knocking out any single vertex leaves the other two (value 2) only
    # while knocking two leaves nothing, so infeasibility reaches the goal vacuously
    brute = min(
        len(D)
        for r_ in range(4)
        for D in itertools.combinations(range(3), r_)
        if (orc.base_solve(D) is None or orc.base_solve(D).value >= 3)
    )
    assert r.weight == brute == 2
    assert verify(r, orc)


@pytest.mark.parametrize("gamma, base, expected", [(1.5, 80, 120), (2, 80, 160), (1.5, 79, 119), (1.25, 7, 9), (1.0, 5, 5)])
def test_gamma_threshold(gamma, base, expected):
    assert gamma_threshold(gamma, base) == expected


def test_every_pooled_solution_violates_and_is_hit(small_corpus):
    for g in small_corpus[:80]:
        orc = ShortestPathOracle(g)
        L0 = orc.base_solve().value
        for spec in (ValueAtLeast(gamma_threshold(1.5, L0)), MustBeInfeasible()):
            r = solve_knockout(orc, None, spec)
            for s in r.pool:
                assert isinstance(spec, MustBeInfeasible) or s.value < spec.threshold
                assert set(s.support) & set(r.knockout_set)
            values = [s.value for s in r.pool]
            assert values == sorted(values)
            assert verify(r, orc)
            assert r.surviving_value == surviving_length(g, r.knockout_set)


def test_pool_values_monotone_under_budget():
    for seed in range(30):
        g = random_instance(7, 12, (1, 10), seed)
        r = solve_cardinality(ShortestPathOracle(g), 2)
        values = [s.value for s in r.pool]
        assert values == sorted(values)


def test_no_path_instance():
    g = DirectedGraph(3, [(1, 2, 1), (3, 2, 1)], 1, 3)
    orc = ShortestPathOracle(g)
    r = solve_knockout(orc, None, MustBeInfeasible())
    assert r.weight == 0 and r.pool_size == 0
    with pytest.raises(InfeasibleBudgetError):
        solve_cardinality(orc, 0)
