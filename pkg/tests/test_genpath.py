from collections import Counter
from math import comb

import pytest

import oracles
from regulus.canon import automorphisms, canon_bytes, subset_orbit_reps
from regulus.genpath import (
    GenOptions,
    accept,
    count_self_complementary,
    generate,
    generate_level,
    verify_complement_closed,
)
from regulus.graph import add_vertex, all_graphs, complete, cycle, empty
from regulus.regcheck import Mode, in_family

OPTION_GRID = [
    GenOptions(max_degree_last=True, complement_closure=True),
    GenOptions(max_degree_last=True, complement_closure=False),
    GenOptions(max_degree_last=False, complement_closure=False),
]


def test_k4_tables():
    assert generate(4, "exact", 8).series() == [1, 2, 4, 7, 12, 12, 2, 0]
    assert generate(4, "at_least", 7).series() == [1, 2, 4, 7, 11, 10, 0]


def test_k5_rows():
    assert generate(5, Mode.EXACT, 8).count(8) == 7185
    assert generate(5, Mode.AT_LEAST, 9).count(9) == 66308


@pytest.mark.parametrize("mode", list(Mode))
@pytest.mark.parametrize("opts", OPTION_GRID)
def test_options_do_not_change_counts(mode, opts):
    want = generate(5, mode, 8, GenOptions(split_level=20)).series()
    for split in (1, 2, 4, 7, 8):
        o = GenOptions(**{**opts.__dict__, "split_level": split})
        assert generate(5, mode, 8, o).series() == want


def test_complement_closure_needs_maxdeg(caplog):
    t = generate(4, "exact", 7, GenOptions(max_degree_last=False, complement_closure=True))
    assert t.series() == [1, 2, 4, 7, 12, 12, 2]
    assert "disabling" in caplog.text


@pytest.mark.parametrize("mode", list(Mode))
@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_levels_match_brute_force(mode, k):
    exact = mode is Mode.EXACT
    for n in range(1, 7):
        for opts in OPTION_GRID:
            level = generate_level(k, mode, n, opts)
            got = Counter(oracles.min_code_of(g) for g in level)
            assert max(got.values(), default=1) == 1
            assert set(got) == set(oracles.family_classes(n, k, exact))


def test_emitted_graphs_pass_full_oracle():
    for mode in Mode:
        for g in generate_level(5, mode, 7):
            assert in_family(g, 5, mode)


def test_isomorph_free_level():
    level = generate_level(5, "exact", 8)
    keys = [canon_bytes(g) for g in level]
    assert len(keys) == len(set(keys)) == 7185


def test_at_least_never_exceeds_exact():
    for k in (4, 5, 6):
        ex = generate(k, "exact", 8)
        al = generate(k, "at_least", 8)
        assert all(al.count(n) <= ex.count(n) for n in range(1, 9))


def test_edge_histogram():
    t = generate(5, "exact", 8)
    for n in range(1, 9):
        row = {e: c for (m, e), c in t.edge_hist.items() if m == n}
        assert sum(row.values()) == t.count(n)
        full = comb(n, 2)
        assert all(row.get(full - e, 0) == c for e, c in row.items())


def test_deterministic_stream():
    a, b = [], []
    opts = GenOptions(emit_level=8, split_level=5)
    generate(5, "at_least", 8, opts, a.append)
    generate(5, "at_least", 8, opts, b.append)
    assert a == b and len(a) == 6027


def test_parallel_workers_same_multiset():
    seq, par = [], []
    generate(5, "exact", 8, GenOptions(emit_level=8, split_level=5), seq.append)
    t = generate(5, "exact", 8, GenOptions(emit_level=8, split_level=5, workers=2), par.append)
    assert t.count(8) == 7185
    assert Counter(map(canon_bytes, seq)) == Counter(map(canon_bytes, par))


def test_budget_flags_rows():
    t = generate(5, "exact", 10, GenOptions(budget=500, split_level=6))
    assert not t.complete
    assert 10 in t.incomplete
    assert t.extremal_order() is None
    assert "incomplete" in t.to_tsv()


def test_extremal_order():
    assert generate(4, "exact", 9).extremal_order() == 8
    assert generate(4, "at_least", 8).extremal_order() == 7


def test_bad_arguments():
    with pytest.raises(ValueError):
        generate(2, "exact", 5)
    with pytest.raises(ValueError):
        generate(4, "exact", 64)
    with pytest.raises(ValueError):
        GenOptions(emit_level=0)


def test_accept_examples():
    assert accept(empty(1), complete(2))
    # P3 arises from K2 (new end vertex) and from 2K1 (new centre)
    for opts in (GenOptions(), GenOptions(max_degree_last=False)):
        via_edge = accept(complete(2), add_vertex(complete(2), 0b01), 3, "exact", opts)
        via_pair = accept(empty(2), add_vertex(empty(2), 0b11), 3, "exact", opts)
        assert via_edge != via_pair


def test_accept_one_route_per_class():
    # over every parent and every U, each class of order 5 is accepted exactly once
    parents = {canon_bytes(g): g for g in all_graphs(4)}
    hits = Counter()
    for g in parents.values():
        reps = subset_orbit_reps(automorphisms(g), range(16))
        for u in reps:
            child = add_vertex(g, u)
            if accept(g, child):
                hits[canon_bytes(child)] += 1
    assert len(hits) == 34
    assert set(hits.values()) == {1}


def test_complement_helpers():
    level = generate_level(5, "exact", 6)
    assert len(level) == 136 and verify_complement_closed(level)
    assert verify_complement_closed([cycle(5)])
    assert not verify_complement_closed([complete(3)])
    assert count_self_complementary([cycle(5)]) == 1
    assert count_self_complementary([complete(3)]) == 0
    order4 = {canon_bytes(g): g for g in all_graphs(4)}
    assert count_self_complementary(order4.values()) == 1
