import random
from itertools import permutations

import pytest
from hypothesis import given, settings

import oracles
from regulus.canon import (
    OrderedPartition,
    aut_order,
    automorphisms,
    canon_bytes,
    canonical,
    canonical_form,
    is_equitable,
    is_isomorphic,
    max_degree_partition,
    refine,
    subset_orbit_reps,
    vertex_orbits,
)
from regulus.graph import (
    all_graphs,
    build,
    complete,
    cycle,
    empty,
    g6_encode,
    lex_product,
    path,
)
from test_graph import graphs

STAR = build(4, [(0, 1), (0, 2), (0, 3)])


def _shuffle(g, rng):
    perm = list(range(g.order))
    rng.shuffle(perm)
    return g.relabel(perm)


def _brute_aut(g):
    return sum(1 for p in permutations(range(g.order)) if g.relabel(p) == g)


def test_refine_examples():
    assert refine(STAR).as_lists() == [[1, 2, 3], [0]]
    assert refine(cycle(6)) == OrderedPartition.unit(6)
    p4 = refine(path(4))
    assert p4.as_lists() == [[0, 3], [1, 2]]
    assert refine(path(4), p4) == p4


@settings(max_examples=200)
@given(graphs(max_order=14))
def test_refine_is_equitable(g):
    p = refine(g)
    p.validate(g.order)
    assert is_equitable(g, p)


@settings(max_examples=100)
@given(graphs(max_order=12))
def test_refine_respects_initial_cells(g):
    p0 = max_degree_partition(g)
    p = refine(g, p0)
    for cell in p.cells:
        assert any(cell & ~c == 0 for c in p0.cells)


def test_partition_validation():
    with pytest.raises(ValueError):
        OrderedPartition((0b011, 0b110)).validate(3)
    with pytest.raises(ValueError):
        OrderedPartition((0b011,)).validate(3)
    with pytest.raises(ValueError):
        OrderedPartition((0b111, 0)).validate(3)


def test_canonical_examples():
    rng = random.Random(1)
    c5 = cycle(5)
    key = canon_bytes(c5)
    assert all(canon_bytes(_shuffle(c5, rng)) == key for _ in range(100))
    assert canon_bytes(path(4)) != canon_bytes(STAR)
    assert len({canon_bytes(g) for g in all_graphs(4)}) == 11


def test_canon_bytes_is_graph6_of_relabelled_graph():
    g = build(6, [(0, 1), (1, 2), (2, 5), (3, 4)])
    res = canonical(g)
    assert res.canon_bytes == g6_encode(g.relabel(res.labeling)).encode()
    assert canonical_form(g).order == 6


def test_iso_invariance_random():
    rng = random.Random(2)
    for _ in range(1000):
        n = rng.randint(1, 10)
        g = build(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5])
        assert canon_bytes(_shuffle(g, rng)) == canon_bytes(g)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_completeness_matches_oracle(n):
    # canon_bytes classes coincide with brute-force minimum-code classes
    by_canon: dict[bytes, int] = {}
    for g in all_graphs(n):
        m = oracles.min_code_of(g)
        assert by_canon.setdefault(canon_bytes(g), m) == m
    assert len(by_canon) == len(oracles.class_codes(n))


def test_canonical_respects_partition():
    g = path(4)
    p = OrderedPartition.of([[0, 1, 2], [3]])
    q = OrderedPartition.of([[1, 2, 3], [0]])
    swapped = g.relabel([3, 2, 1, 0])
    assert canonical(g, p).canon_bytes == canonical(swapped, q).canon_bytes
    for gen in canonical(g, p).aut_gens:
        assert gen[3] == 3


@settings(max_examples=150)
@given(graphs(max_order=11))
def test_generators_are_automorphisms(g):
    for gen in canonical(g).aut_gens:
        assert g.relabel(gen) == g


def test_aut_orders():
    assert aut_order(automorphisms(complete(4)), 4) == 24
    assert aut_order(automorphisms(path(4)), 4) == 2
    assert aut_order(automorphisms(cycle(5)), 5) == 10
    assert aut_order(automorphisms(empty(10)), 10) == 3628800
    assert aut_order(automorphisms(lex_product(cycle(9), complete(2))), 18) == 9216


def test_aut_order_matches_brute_force():
    rng = random.Random(6)
    for _ in range(150):
        n = rng.randint(1, 6)
        g = build(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5])
        assert aut_order(automorphisms(g), n) == _brute_aut(g)


def test_vertex_orbits():
    assert vertex_orbits(automorphisms(STAR), 4) == [[0], [1, 2, 3]]
    c9k2 = lex_product(cycle(9), complete(2))
    assert vertex_orbits(automorphisms(c9k2), 18) == [list(range(18))]
    assert vertex_orbits(automorphisms(empty(5)), 5) == [list(range(5))]


def test_subset_orbit_reps():
    assert subset_orbit_reps([(1, 0)], [0, 1, 2]) == [0, 1]
    assert subset_orbit_reps([], [5, 3, 1]) == [1, 3, 5]
    gens = automorphisms(cycle(4))
    assert subset_orbit_reps(gens, [1, 2, 4, 8]) == [1]
    with pytest.raises(ValueError):
        subset_orbit_reps([(1, 0)], [0, 1])


def test_isomorphism_helper():
    assert is_isomorphic(path(4), path(4).relabel([2, 0, 3, 1]))
    assert not is_isomorphic(path(4), STAR)
    assert not is_isomorphic(path(3), path(4))


def test_last_vertex_property():
    res = canonical(STAR)
    assert res.labeling[res.last_vertex] == 3
