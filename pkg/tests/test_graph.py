import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import simple_paths, surviving_length
from conftest import DATA
from knockout.core import InputError
from knockout.graph import (
    DirectedGraph,
    ParseError,
    hop_limited_shortest_path,
    parse_arc_list,
    parse_instance,
    random_instance,
    shortest_path,
    to_binary_program,
    write_instance,
)
from knockout.oracle import ExhaustiveOracle


def test_shortest_path_dg1(dg1):
    p = shortest_path(dg1)
    assert p.arc_indices == (0, 1) and p.length == 2
    p = shortest_path(dg1, {0, 2})
    assert p.arc_indices == (4,) and p.length == 5
    assert shortest_path(dg1, {0, 2, 4}) is None


def test_tie_break_is_lexicographic(dg1):
    # {a1,a2} and {a3,a4} tie at 2; a1 < a3
    assert shortest_path(dg1).arc_indices == (0, 1)
    assert shortest_path(dg1, {1}).arc_indices == (2, 3)


def test_tie_break_compares_path_order():
    # paths (0, 3) and (1, 2) tie; path-order sequence (0, 3) < (1, 2)
    g = DirectedGraph(4, [(1, 2, 1), (1, 3, 1), (3, 4, 1), (2, 4, 1)], 1, 4)
    assert shortest_path(g).arc_indices == (0, 3)


def test_zero_length_cycle_still_gives_simple_path():
    g = DirectedGraph(4, [(1, 2, 0), (2, 3, 0), (3, 2, 0), (3, 4, 1), (2, 4, 3)], 1, 4)
    p = shortest_path(g)
    assert p.length == 1 and g.is_path(p.arc_indices)


def test_shortest_path_matches_enumeration(small_corpus):
    for g in small_corpus:
        paths = simple_paths(g)
        expected = min(
            ((sum(g.arcs[k][2] for k in p), p) for p in paths), default=None
        )
        got = shortest_path(g)
        assert got.length == expected[0]
        assert got.arc_indices == expected[1]
        assert g.is_path(got.arc_indices)


def test_forbidden_monotonicity(small_corpus):
    rng = random.Random(3)
    for g in small_corpus:
        m = g.arc_count
        F = {k for k in range(m) if rng.random() < 0.2}
        Fp = F | {k for k in range(m) if rng.random() < 0.3}
        a, b = shortest_path(g, F), shortest_path(g, Fp)
        if a is None:
            assert b is None
        elif b is not None:
            assert a.length <= b.length
        assert (a.length if a else None) == surviving_length(g, F)


def test_hop_limited_path():
    # long cheap path 1-2-3-4 versus direct expensive arc
    g = DirectedGraph(4, [(1, 2, 1), (2, 3, 1), (3, 4, 1), (1, 4, 10)], 1, 4)
    assert hop_limited_shortest_path(g, (), 3).length == 3
    assert hop_limited_shortest_path(g, (), 2).arc_indices == (3,)
    assert hop_limited_shortest_path(g, {3}, 2) is None


def test_parse_dg1(dg1):
    g = parse_instance((DATA / "dg1.ko").read_text())
    assert g == dg1


def test_write_dg1_golden(dg1):
    expected = "".join(
        line + "\n"
        for line in (DATA / "dg1.ko").read_text().splitlines()
        if not line.startswith("c ")
    )
    assert write_instance(dg1) == expected


def test_write_single_arc_is_three_lines():
    g = DirectedGraph(2, [(1, 2, 3)], 1, 2)
    assert write_instance(g) == "p ko 2 1\na 1 2 3\ns 1 2\n"


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("", None),
        ("p ko 4 1\na 1 9 2\ns 1 4\n", 2),
        ("a 1 2 3\n", 1),
        ("p ko 4 1\na 1 2 x\ns 1 4\n", 2),
        ("p ko 4 2\na 1 2 1\ns 1 4\n", None),
        ("p ko 4 1\na 1 2 1\n", None),
        ("p ko 4 1\na 1 2 -1\ns 1 4\n", 2),
        ("p ko 4 1\na 1 2 1\ns 2 2\n", 3),
        ("p ko 4 1\nz 1\n", 2),
    ],
)
def test_parse_errors(text, lineno):
    with pytest.raises(ParseError) as info:
        parse_instance(text)
    assert info.value.lineno == lineno


def test_comments_anywhere():
    text = "c head\np ko 2 1\nc mid\na 1 2 3\nc\ns 1 2\nc tail\n"
    assert parse_instance(text) == DirectedGraph(2, [(1, 2, 3)], 1, 2)


def test_arc_list_reader():
    g = parse_arc_list("1 2 4\n2 3 1  # trailing\n\n1 3 9\n", 1, 3)
    assert g.node_count == 3 and g.arc_count == 3 and g.destination == 3
    with pytest.raises(ParseError):
        parse_arc_list("1 2\n", 1, 2)


def test_random_instance_fixed_example():
    g = random_instance(4, 5, (1, 5), 7)
    assert g == random_instance(4, 5, (1, 5), 7)
    assert g.arc_count == 5 and g.origin == 1 and g.destination == 4
    assert shortest_path(g) is not None


def test_random_instance_single_arc():
    g = random_instance(2, 1, (3, 3), 0)
    assert g.arcs == ((1, 2, 3),)


@pytest.mark.parametrize(
    "args",
    [(4, 2, (1, 5), 0), (3, 7, (1, 5), 0), (1, 0, (1, 1), 0), (4, 4, (5, 1), 0)],
)
def test_random_instance_rejects_bad_parameters(args):
    with pytest.raises(InputError):
        random_instance(*args)


@settings(max_examples=60, deadline=None)
@given(
    nodes=st.integers(2, 12),
    extra=st.integers(0, 30),
    lo=st.integers(0, 20),
    span=st.integers(0, 20),
    seed=st.integers(0, 2**32),
)
def test_random_instance_properties_and_round_trip(nodes, extra, lo, span, seed):
    arcs = min(nodes - 1 + extra, nodes * (nodes - 1))
    g = random_instance(nodes, arcs, (lo, lo + span), seed)
    pairs = [(t, h) for t, h, _ in g.arcs]
    assert len(set(pairs)) == len(pairs)
    assert all(t != h for t, h in pairs)
    assert all(lo <= l <= lo + span for _, _, l in g.arcs)
    assert shortest_path(g) is not None
    assert parse_instance(write_instance(g)) == g


def test_binary_program_dg1(dg1):
    prog = to_binary_program(dg1)
    assert prog.n == 5
    orc = ExhaustiveOracle(prog)
    assert orc.base_solve().value == 2
    assert orc.base_solve({0, 2}).value == 5


def test_binary_program_single_arc():
    g = DirectedGraph(2, [(1, 2, 7)], 1, 2)
    assert ExhaustiveOracle(to_binary_program(g)).base_solve().value == 7


def test_binary_program_matches_shortest_path(small_corpus):
    for g in small_corpus:
        best = ExhaustiveOracle(to_binary_program(g)).base_solve()
        assert best.value == shortest_path(g).length


def test_binary_program_dg1_all_subsets_brute(dg1):
    # independent enumeration of the 2^5 supports, checking conservation by hand
    def is_flow(sub):
        bal = {v: 0 for v in range(1, 5)}
        for k in sub:
            t, h, _ = dg1.arcs[k]
            bal[t] += 1
            bal[h] -= 1
        return bal == {1: 1, 2: 0, 3: 0, 4: -1} and len(sub) <= 3

    from knockout.core import evaluate

    prog = to_binary_program(dg1)
    for r in range(6):
        for sub in itertools.combinations(range(5), r):
            assert evaluate(prog, sub)[0] == is_flow(sub)
