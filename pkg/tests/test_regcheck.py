import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from regulus.graph import (
    add_vertex,
    build,
    complement,
    complete,
    cycle,
    empty,
    induced_subgraph,
    lex_product,
    path,
)
from regulus.regcheck import (
    BlockingPair,
    BudgetExceeded,
    ExtensionFront,
    Mode,
    add_and_check,
    blocking_pairs,
    extension_sets,
    find_induced_regular,
    find_regular_through,
    in_family,
    in_req,
    in_rge,
    regular_degree,
)
from test_graph import graphs


def _random_graph(rng, n, p=0.5):
    return build(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def _adj(g):
    return [set(g.neighbors(v)) for v in range(g.order)]


def test_mode_parse():
    assert Mode.parse("atleast") is Mode.AT_LEAST
    assert Mode.parse("at-least") is Mode.AT_LEAST
    assert Mode.parse("exact") is Mode.EXACT
    with pytest.raises(ValueError):
        Mode.parse("most")


def test_regular_degree():
    assert regular_degree(cycle(5)) == 2
    assert regular_degree(path(3)) is None
    assert regular_degree(complete(4)) == 3


def test_find_examples():
    assert find_induced_regular(complete(5), 5) == 0b11111
    assert find_induced_regular(path(3), 3) is None
    assert find_induced_regular(lex_product(cycle(9), complete(2)), 5) is None
    hit = find_induced_regular(cycle(6), 4)
    sub = induced_subgraph(cycle(6), hit)
    assert sub.order == 4 and regular_degree(sub) == 1


def test_find_rejects_k0():
    with pytest.raises(ValueError):
        find_induced_regular(cycle(4), 0)


def test_membership_examples():
    assert in_req(path(3), 3)
    assert not in_rge(complete(5), 3)
    assert not in_req(cycle(4), 1)
    assert in_rge(lex_product(path(4), path(4)), 5)


def test_witness_is_valid_at_least():
    g = cycle(7)
    hit = find_induced_regular(g, 5, Mode.AT_LEAST)
    assert hit is not None and bin(hit).count("1") >= 5
    assert regular_degree(induced_subgraph(g, hit)) is not None


def test_oracle_agrees_with_brute_force():
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randint(1, 8)
        g = _random_graph(rng, n, rng.choice([0.2, 0.5, 0.8]))
        k = rng.randint(1, n)
        adj = _adj(g)
        for mode in Mode:
            sizes = [k] if mode is Mode.EXACT else range(k, n + 1)
            assert (find_induced_regular(g, k, mode) is None) == (not oracles.has_regular(adj, sizes))


def test_through_vertex():
    g = add_vertex(complete(3), 0b111)
    assert find_regular_through(g, 3, 4) == 0b1111
    g = add_vertex(complete(3), 0)
    assert find_regular_through(g, 3, 3) is None


def test_budget_raises():
    g = lex_product(cycle(5), complete(3))
    with pytest.raises(BudgetExceeded) as info:
        find_induced_regular(g, 7, budget=10)
    assert info.value.visited > 10


@settings(max_examples=60)
@given(graphs(max_order=9), st.integers(3, 6))
def test_hereditary(g, k):
    if not in_req(g, k):
        return
    rng = random.Random(g.num_edges)
    for _ in range(5):
        s = rng.randrange(1, 1 << g.order)
        assert in_req(induced_subgraph(g, s), k)


@settings(max_examples=80)
@given(graphs(max_order=9), st.integers(3, 6))
def test_complement_duality(g, k):
    assert in_req(g, k) == in_req(complement(g), k)
    assert in_rge(g, k) == in_rge(complement(g), k)


def test_pairs_examples():
    assert blocking_pairs(complete(2), 3) == [BlockingPair(0b11, 0b11)]
    assert blocking_pairs(empty(2), 3) == [BlockingPair(0b11, 0)]
    assert blocking_pairs(path(3), 4) == [BlockingPair(0b111, 0b101)]
    shapes = {p.shape for p in blocking_pairs(cycle(5), 4)}
    assert shapes <= {"independent", "clique", "two-degree"}


def test_pair_invariants():
    rng = random.Random(5)
    for _ in range(100):
        g = _random_graph(rng, rng.randint(3, 8))
        for k in (3, 4, 5):
            for p in blocking_pairs(g, k):
                assert p.u2 & ~p.u1 == 0
                assert bin(p.u1).count("1") == k - 1


def test_touching_filter():
    g = cycle(6)
    every = blocking_pairs(g, 4)
    some = blocking_pairs(g, 4, touching=5)
    assert set(some) == {p for p in every if p.u1 >> 5 & 1}


def test_case_exhaustiveness():
    # new vertex lies in a k-order regular subgraph iff some pair is hit
    rng = random.Random(8)
    for _ in range(150):
        n = rng.randint(2, 6)
        g = _random_graph(rng, n)
        for k in range(3, 6):
            if k - 1 > n:
                continue
            pairs = blocking_pairs(g, k)
            for u in range(1 << n):
                h = add_vertex(g, u)
                direct = find_regular_through(h, n, k) is not None
                hit = any(u & p.u1 == p.u2 for p in pairs)
                assert direct == hit


def test_front_examples():
    assert extension_sets(empty(1), None, 3).sets == (0, 1)
    assert extension_sets(complete(2), None, 3).sets == (0, 1, 2)


@pytest.mark.parametrize("mode", list(Mode))
def test_front_matches_oracle(mode):
    rng = random.Random(21)
    for _ in range(120):
        n = rng.randint(1, 6)
        g = _random_graph(rng, n)
        k = rng.randint(3, 6)
        front = set(extension_sets(g, None, k, mode).sets)
        for u in range(1 << n):
            h = add_vertex(g, u)
            direct = oracles.in_family(_adj(h), k, mode is Mode.EXACT)
            # the front assumes g itself is a member
            if oracles.in_family(_adj(g), k, mode is Mode.EXACT):
                assert (u in front) == direct


@pytest.mark.parametrize("mode", list(Mode))
def test_incremental_front_equals_scratch(mode):
    rng = random.Random(4)
    for _ in range(80):
        g = _random_graph(rng, rng.randint(2, 9), 0.4)
        k = 5
        parent = induced_subgraph(g, g.full >> 1)
        if not in_family(g, k, mode):
            continue
        prev = extension_sets(parent, None, k, mode)
        assert extension_sets(g, prev, k, mode) == extension_sets(g, None, k, mode)


def test_front_level_mismatch():
    with pytest.raises(ValueError):
        extension_sets(cycle(4), ExtensionFront((0,), 1), 3)


def test_add_and_check_examples():
    assert add_and_check(complete(2), 0b11, 3) is None
    assert add_and_check(complete(2), 0b01, 3).num_edges == 2
    assert add_and_check(empty(2), 0, 3) is None
