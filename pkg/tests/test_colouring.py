"""Palettes, depth markers, enhancement, and colouring files."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehrlab.colouring import (
    ROOT_COLOUR,
    AugmentedPalette,
    Colouring,
    Palette,
    depth_marker,
    dump_colouring_file,
    enhance,
    is_legal,
    parse_colouring_file,
    random_rooted_colouring,
    require_rooted,
    require_same_palette,
    rooted_colourings,
    strip_enhancement,
)
from ehrlab.errors import EhrlabError, NotRootedError, PaletteMismatchError
from ehrlab.trees import lasso_path_tree, parse_tree, path_tree


# ---------------------------------------------------------------------------
# base palette


def test_palette_basics():
    p = Palette(3)
    assert p.size == 4
    assert p.colour_name(0) == "c0"
    assert list(p.non_root_colours()) == [1, 2, 3]
    p.check_index(3)
    with pytest.raises(EhrlabError):
        p.check_index(4)
    with pytest.raises(EhrlabError):
        Palette(0)


# ---------------------------------------------------------------------------
# depth markers and the augmented palette


def test_depth_marker_fixed_then_residue():
    # exact markers up to D0, then centered residue mod D
    assert depth_marker(0, 4, 6) == ("fix", 0)
    assert depth_marker(6, 4, 6) == ("fix", 6)
    assert depth_marker(7, 4, 6) == ("mod", -1)
    assert depth_marker(8, 4, 6) == ("mod", 0)
    assert depth_marker(9, 4, 6) == ("mod", 1)
    assert depth_marker(10, 4, 6) == ("mod", 2)
    assert depth_marker(11, 4, 6) == ("mod", -1)
    with pytest.raises(EhrlabError):
        depth_marker(-1, 4, 6)


def test_depth_marker_period():
    for depth in range(7, 40):
        assert depth_marker(depth, 4, 6) == depth_marker(depth + 4, 4, 6)


def test_augmented_palette_validation():
    base = Palette(2)
    with pytest.raises(EhrlabError):
        AugmentedPalette(base, 3, 0)  # odd D
    with pytest.raises(EhrlabError):
        AugmentedPalette(base, 0, 0)
    with pytest.raises(EhrlabError):
        AugmentedPalette(base, 4, -1)


def test_augmented_palette_size_and_layout():
    aug = AugmentedPalette(Palette(2), 4, 6)
    assert aug.markers_per_colour == 6 + 1 + 4
    assert aug.size == 3 * 11
    assert aug.r == aug.size - 1
    # index 0 is the augmented root colour
    assert aug.decompose(0) == (0, ("fix", 0))
    # per base colour: fixed markers first, then residues -D/2+1 .. D/2
    assert aug.decompose(6) == (0, ("fix", 6))
    assert aug.decompose(7) == (0, ("mod", -1))
    assert aug.decompose(10) == (0, ("mod", 2))
    assert aug.decompose(11) == (1, ("fix", 0))


def test_augmented_index_round_trip():
    aug = AugmentedPalette(Palette(2), 6, 2)
    for idx in range(aug.size):
        base, marker = aug.decompose(idx)
        assert aug.index_of(base, marker) == idx
    with pytest.raises(EhrlabError):
        aug.decompose(aug.size)
    with pytest.raises(EhrlabError):
        aug.index_of(0, ("fix", 3))
    with pytest.raises(EhrlabError):
        aug.index_of(0, ("mod", -3))  # residue window is (-3, 3]


def test_augmented_colour_names():
    aug = AugmentedPalette(Palette(1), 4, 1)
    assert aug.colour_name(0) == "(c0,c'0)"
    assert aug.colour_name(aug.index_of(1, ("mod", 2))) == "(c1,2)"


# ---------------------------------------------------------------------------
# colouring objects


def test_colouring_validate_for_checks_length_and_tails():
    t = path_tree(2)
    with pytest.raises(EhrlabError):
        Colouring(Palette(1), (0, 1)).validate_for(t)
    with pytest.raises(EhrlabError):
        Colouring(Palette(1), (0, 1, 1), tail_period=(1,)).validate_for(t)
    lt = lasso_path_tree()
    with pytest.raises(EhrlabError):
        Colouring(Palette(1), (0,)).validate_for(lt)


def test_colouring_tail_lookup():
    c = Colouring(Palette(3), (0,), tail_prefix=(3,), tail_period=(1, 2))
    assert [c.tail_colour(s) for s in (1, 2, 3, 4, 5)] == [3, 1, 2, 1, 2]
    with pytest.raises(EhrlabError):
        c.tail_colour(0)


def test_is_rooted():
    t, sigma = parse_tree("c0(c1,c2)")
    assert sigma.is_rooted(t)
    assert not sigma.with_value(1, 0).is_rooted(t)
    assert not sigma.with_value(0, 1).is_rooted(t)
    require_rooted(t, sigma)
    with pytest.raises(NotRootedError):
        require_rooted(t, sigma.with_value(1, 0))
    # a root colour hiding in the tail also breaks rootedness
    lt, lc = parse_tree("c0@[c1]")
    bad = Colouring(lc.palette, lc.values, (), (ROOT_COLOUR,))
    assert not bad.is_rooted(lt)


def test_require_same_palette():
    a = Colouring(Palette(1), (0, 1))
    b = Colouring(Palette(2), (0, 1))
    with pytest.raises(PaletteMismatchError):
        require_same_palette(a, b)


# ---------------------------------------------------------------------------
# enumeration and sampling


def test_rooted_colourings_count_and_shape():
    t = path_tree(2)
    cols = list(rooted_colourings(t, Palette(2)))
    assert len(cols) == 4  # r^(size-1)
    assert all(c.values[0] == ROOT_COLOUR for c in cols)
    assert all(0 not in c.values[1:] for c in cols)
    assert len({c.values for c in cols}) == 4


def test_rooted_colourings_single_node():
    cols = list(rooted_colourings(path_tree(0), Palette(3)))
    assert [c.values for c in cols] == [(0,)]


def test_random_rooted_colouring_is_rooted_and_seeded():
    t, _ = parse_tree("c0(c1(c1),c1,c1)")
    a = random_rooted_colouring(t, Palette(3), random.Random(9))
    b = random_rooted_colouring(t, Palette(3), random.Random(9))
    assert a.values == b.values
    assert a.is_rooted(t)


# ---------------------------------------------------------------------------
# enhancement


def test_enhance_attaches_depth_markers():
    t, sigma = parse_tree("c0(c1(c2))")
    aug = AugmentedPalette(sigma.palette, 4, 1)
    tau = enhance(t, sigma, aug)
    assert tau.palette is aug
    for v in range(t.size):
        base, marker = aug.decompose(tau.values[v])
        assert base == sigma.values[v]
        assert marker == aug.marker_of_depth(t.depths[v])


def test_enhance_requires_matching_base_and_rootedness():
    t, sigma = parse_tree("c0(c1)")
    aug = AugmentedPalette(Palette(2), 4, 1)
    with pytest.raises(PaletteMismatchError):
        enhance(t, sigma, aug)
    aug1 = AugmentedPalette(sigma.palette, 4, 1)
    with pytest.raises(NotRootedError):
        enhance(t, sigma.with_value(1, 0), aug1)


def test_enhance_strip_round_trip():
    t, sigma = parse_tree("c0(c1,c2(c1(c2)))")
    aug = AugmentedPalette(sigma.palette, 4, 2)
    assert strip_enhancement(t, enhance(t, sigma, aug), aug).values == sigma.values


def test_enhance_lasso_tail_markers():
    t, sigma = parse_tree("c0(c1@[c2,c1])")
    aug = AugmentedPalette(sigma.palette, 4, 2)
    tau = enhance(t, sigma, aug)
    assert tau.has_tail
    # attach leaf sits at depth 1; step s lives at depth 1 + s
    steps = len(tau.tail_prefix) + len(tau.tail_period)
    for s in range(1, steps + 1):
        base, marker = aug.decompose(tau.tail_colour(s))
        assert base == sigma.tail_colour(s)
        assert marker == aug.marker_of_depth(1 + s)


def test_is_legal_accepts_enhancements_and_spots_tampering():
    t, sigma = parse_tree("c0(c1(c2),c2)")
    aug = AugmentedPalette(sigma.palette, 4, 1)
    tau = enhance(t, sigma, aug)
    assert is_legal(t, tau, aug)
    for v in range(t.size):
        wrong_depth = (t.depths[v] + 1) % (aug.D0 + 2)
        bad_idx = aug.index_for_depth(
            aug.decompose(tau.values[v])[0], wrong_depth
        )
        if bad_idx == tau.values[v]:
            continue
        assert not is_legal(t, tau.with_value(v, bad_idx), aug)


def test_is_legal_checks_deep_residues():
    # beyond D0 only the residue class is pinned, so depth + D stays legal
    # while depth + 1 does not
    t, sigma = parse_tree("c0" + "(c1" * 8 + ")" * 8)
    aug = AugmentedPalette(sigma.palette, 4, 2)
    tau = enhance(t, sigma, aug)
    deep = 8
    base = aug.decompose(tau.values[deep])[0]
    same_class = aug.index_for_depth(base, t.depths[deep] + aug.D)
    assert same_class == tau.values[deep]
    off_class = aug.index_for_depth(base, t.depths[deep] + 1)
    assert not is_legal(t, tau.with_value(deep, off_class), aug)


# ---------------------------------------------------------------------------
# colouring files


def test_colouring_file_round_trip():
    t, sigma = parse_tree("c0(c2,c1(c1))")
    text = dump_colouring_file(sigma)
    back = parse_colouring_file(text, sigma.palette, t.size)
    assert back.values == sigma.values


def test_parse_colouring_file_comments_and_errors():
    p = Palette(2)
    text = "# colouring\n0 0\n1 2\n"
    assert parse_colouring_file(text, p, 2).values == (0, 2)
    with pytest.raises(EhrlabError):
        parse_colouring_file("0 0\n", p, 2)  # node 1 missing
    with pytest.raises(EhrlabError):
        parse_colouring_file("0 0\n1 1\n1 2\n", p, 2)  # duplicate node
    with pytest.raises(EhrlabError):
        parse_colouring_file("0 0\n1 9\n", p, 2)  # colour out of range
    with pytest.raises(EhrlabError):
        parse_colouring_file("0 0\nbogus\n", p, 2)


@given(st.integers(1, 3), st.integers(0, 4), st.data())
@settings(max_examples=40, deadline=None)
def test_rooted_colourings_are_exactly_the_rooted_ones(r, length, data):
    t = path_tree(length)
    p = Palette(r)
    enumerated = {c.values for c in rooted_colourings(t, p)}
    assert len(enumerated) == r ** length
    sample = tuple(
        0 if v == 0 else data.draw(st.integers(1, r)) for v in range(t.size)
    )
    assert sample in enumerated
