"""Depth-m type computation against a direct recursive oracle."""

from __future__ import annotations

from collections import Counter

import pytest

from ehrlab.colouring import Colouring, Palette, rooted_colourings
from ehrlab.errors import EhrlabError, PaletteMismatchError
from ehrlab.trees import enumerate_shapes, parse_tree, path_tree
from ehrlab.types_engine import (
    TypeTable,
    census,
    compute_types,
    descriptor_string,
    intern_descriptor,
    parse_descriptor,
    realized_descriptors,
    types_equal_nodes,
)


def oracle_type(tree, sigma, v, m, k):
    """Reference semantics written independently of the engine: no table, no
    sharing, plain structural recursion on finite trees."""
    if m == 0:
        return (sigma.values[v], ())
    kids = Counter(oracle_type(tree, sigma, ch, m - 1, k) for ch in tree.children[v])
    return (
        sigma.values[v],
        tuple(sorted((t, min(n, k)) for t, n in kids.items())),
    )


# ---------------------------------------------------------------------------
# descriptors


def test_descriptor_string_round_trip():
    texts = ["c0", "c1", "c0(c1*1)", "c0(c1*2,c2(c1*1)*1)", "c2(c2(c2*3)*1)"]
    for text in texts:
        desc = parse_descriptor(text)
        assert descriptor_string(desc) == text
        assert parse_descriptor(descriptor_string(desc)) == desc


def test_parse_descriptor_rejects_malformed():
    for bad in ["", "c", "c0(", "c0(c1)", "c0(c1*0)", "c0(c1*1", "c0()"]:
        with pytest.raises(EhrlabError):
            parse_descriptor(bad)


def test_intern_descriptor_matches_compute():
    t, sigma = parse_tree("c0(c1,c2(c1))")
    table = TypeTable(sigma.palette)
    assign = compute_types(t, sigma, 2, 2, table)
    via_desc = intern_descriptor(table, oracle_type(t, sigma, 0, 2, 2))
    assert via_desc == assign.type_of(0)


# ---------------------------------------------------------------------------
# engine vs oracle


def test_compute_types_matches_oracle_small_corpus():
    palette = Palette(2)
    for shape in enumerate_shapes(4):
        for sigma in rooted_colourings(shape, palette):
            for m in (0, 1, 2):
                for k in (1, 2):
                    assign = compute_types(shape, sigma, m, k)
                    for v in range(shape.size):
                        want = descriptor_string(oracle_type(shape, sigma, v, m, k))
                        assert assign.table.type_string(assign.type_of(v)) == want


def test_type_equality_relation_matches_oracle():
    t, sigma = parse_tree("c0(c1(c2,c2),c1(c2),c1(c2,c2,c2))")
    for m in (1, 2):
        for k in (1, 2):
            assign = compute_types(t, sigma, m, k)
            for a in range(t.size):
                for b in range(t.size):
                    same_engine = assign.type_of(a) == assign.type_of(b)
                    same_oracle = oracle_type(t, sigma, a, m, k) == oracle_type(
                        t, sigma, b, m, k
                    )
                    assert same_engine == same_oracle
                    assert (
                        types_equal_nodes(t, sigma, a, t, sigma, b, m, k)
                        == same_oracle
                    )


def test_count_cutoff_merges_large_families():
    # counts clamp at k: two leaves vs three look alike while k <= 2 and
    # separate once k can count to 3
    t2, s2 = parse_tree("c0(c1,c1)")
    t3, s3 = parse_tree("c0(c1,c1,c1)")
    for k, same in [(1, True), (2, True), (3, False)]:
        a = compute_types(t2, s2, 1, k)
        b = compute_types(t3, s3, 1, k)
        assert (
            a.table.type_string(a.type_of(0)) == b.table.type_string(b.type_of(0))
        ) == same


def test_levels_expose_coarser_views():
    t, sigma = parse_tree("c0(c1(c2),c1(c1))")
    assign = compute_types(t, sigma, 2, 2)
    # level 0 is the bare colour
    assert assign.table.type_string(assign.type_of(1, level=0)) == "c1"
    # level 1 distinguishes the two branches, level 0 does not
    assert assign.type_of(1, level=0) == assign.type_of(3, level=0)
    assert assign.type_of(1, level=1) != assign.type_of(3, level=1)


def test_shared_table_keeps_ids_comparable_across_trees():
    t1, s1 = parse_tree("c0(c1,c2(c1))")
    t2, s2 = parse_tree("c0(c2(c1),c1)")
    table = TypeTable(s1.palette)
    a1 = compute_types(t1, s1, 1, 2, table)
    a2 = compute_types(t2, s2, 1, 2, table)
    assert a1.type_of(0) == a2.type_of(0)
    assert sorted(a1.arena) == sorted(a2.arena)


def test_table_rejects_palette_mismatch():
    t, sigma = parse_tree("c0(c1)")
    table = TypeTable(Palette(3))
    with pytest.raises(PaletteMismatchError):
        compute_types(t, sigma, 1, 1, table)


def test_parameter_validation():
    t, sigma = parse_tree("c0(c1)")
    with pytest.raises(EhrlabError):
        compute_types(t, sigma, -1, 1)
    with pytest.raises(EhrlabError):
        compute_types(t, sigma, 1, 0)


# ---------------------------------------------------------------------------
# lasso tails


def test_tail_types_are_periodic():
    t, sigma = parse_tree("c0(c1@[c2,c1])")
    assign = compute_types(t, sigma, 2, 2)
    for step in range(1, 6):
        assert assign.tail_type(step) == assign.tail_type(step + 2)
    assert assign.tail_type(1) != assign.tail_type(2)


def test_lasso_attach_counts_its_tail_child():
    plain, ps = parse_tree("c0(c1)")
    looped, ls = parse_tree("c0(c1@[c1])")
    a = compute_types(plain, ps, 1, 2)
    b = compute_types(looped, ls, 1, 2)
    assert a.table.type_string(a.type_of(1)) == "c1"
    assert b.table.type_string(b.type_of(1)) == "c1(c1*1)"


def test_tail_type_on_finite_tree_raises():
    t, sigma = parse_tree("c0(c1)")
    assign = compute_types(t, sigma, 1, 1)
    with pytest.raises(EhrlabError):
        assign.tail_type(1)


# ---------------------------------------------------------------------------
# census


def test_census_frozen_fork():
    t, sigma = parse_tree("c0(c1,c2(c1))")
    c = census(t, sigma, 1, 2)
    assert c.dump() == "c0(c1*1,c2*1) 1\nc1 2\nc2(c1*1) 1\n"


def test_census_matches_oracle_counts():
    t, sigma = parse_tree("c0(c1(c2,c2),c1(c2),c2)")
    c = census(t, sigma, 2, 2, cap=100)
    want = Counter(
        descriptor_string(oracle_type(t, sigma, v, 2, 2)) for v in range(t.size)
    )
    assert c.as_string_map() == dict(want)
    capped = census(t, sigma, 2, 2)
    assert capped.as_string_map() == {s: min(n, 2) for s, n in want.items()}


def test_census_cap_clips_counts():
    t, sigma = parse_tree("c0(c1,c1,c1,c1)")
    c = census(t, sigma, 0, 2)
    assert c.as_string_map() == {"c0": 1, "c1": 2}
    full = census(t, sigma, 0, 2, cap=10)
    assert full.as_string_map() == {"c0": 1, "c1": 4}


def test_census_lasso_tail_types_sit_at_cap():
    t, sigma = parse_tree("c0@[c1]")
    c = census(t, sigma, 1, 3)
    assert c.as_string_map()["c1(c1*1)"] == 3


def test_realized_descriptors():
    t, sigma = parse_tree("c0(c1,c1)")
    descs = {descriptor_string(d) for d in realized_descriptors(t, sigma, 1, 2)}
    assert descs == {"c0(c1*2)", "c1"}
