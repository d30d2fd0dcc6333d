"""Vectorized depth-1 duels against the generic engines."""

from __future__ import annotations

import pytest

from ehrlab.colouring import Palette, rooted_colourings
from ehrlab.constructions import ConstructionPlan
from ehrlab.deficiency import TypeSet, enumerate_Q
from ehrlab.errors import EhrlabError
from ehrlab.fastcensus import (
    ResponseHarness,
    fingerprint,
    fingerprint_of_type,
    fingerprint_space,
    node_fingerprints,
)
from ehrlab.trees import enumerate_shapes, lasso_path_tree, parse_tree, path_tree
from ehrlab.types_engine import TypeTable, compute_types

PALETTE = Palette(2)


def test_fingerprint_space_frozen():
    assert fingerprint_space(PALETTE, 1) == 3 * 2**3 == 24
    assert fingerprint_space(Palette(1), 2) == 2 * 3**2 == 18
    assert fingerprint_space(PALETTE, 2) == 81


def test_fingerprint_mixed_radix():
    # colour * radix^size + sum over colours of capped count * radix^colour
    assert fingerprint(0, (1,), PALETTE, 1) == 0 * 8 + 2
    assert fingerprint(2, (), PALETTE, 1) == 2 * 8
    assert fingerprint(1, (1, 1, 2), PALETTE, 2) == 1 * 27 + 2 * 3 + 1 * 9


def test_fingerprints_match_generic_types():
    for shape in enumerate_shapes(4):
        for sigma in rooted_colourings(shape, PALETTE):
            for k in (1, 2):
                table = TypeTable(PALETTE)
                assign = compute_types(shape, sigma, 1, k, table)
                want = [
                    fingerprint_of_type(table, assign.arena[v], PALETTE, k)
                    for v in range(shape.size)
                ]
                got = node_fingerprints(shape, sigma, k)
                assert list(got) == want
                # distinct fingerprints iff distinct type ids
                ids = [assign.arena[v] for v in range(shape.size)]
                for a in range(shape.size):
                    for b in range(shape.size):
                        assert (want[a] == want[b]) == (ids[a] == ids[b])


def test_fingerprint_of_type_rejects_deeper_types():
    tree = path_tree(2)
    sigma = rooted_colourings(tree, Palette(1)).__next__()
    table = TypeTable(Palette(1))
    assign = compute_types(tree, sigma, 2, 1, table)
    with pytest.raises(EhrlabError):
        fingerprint_of_type(table, assign.arena[0], Palette(1), 1)


def test_node_fingerprints_rejects_lasso():
    tree = lasso_path_tree()
    with pytest.raises(EhrlabError):
        node_fingerprints(tree, None, 1)


def mini_plan(k: int) -> ConstructionPlan:
    s = TypeSet.from_strings(
        ["c1", "c2", "c1(c1*1)", "c1(c2*1)", "c2(c1*1)", "c2(c2*1)"], 1
    )
    w, _ = parse_tree("c0(c1(c1))", PALETTE)
    return ConstructionPlan.create(1, k, {s: w}, PALETTE)


def test_harness_validation():
    with pytest.raises(EhrlabError):
        ResponseHarness(ConstructionPlan.create(1, 1, {}, PALETTE, m=2), lasso_path_tree())
    with pytest.raises(EhrlabError):
        ResponseHarness(mini_plan(1), path_tree(0))  # finite branch
    two_node, _ = parse_tree("c0(c1@[c1])", PALETTE)
    with pytest.raises(EhrlabError):
        ResponseHarness(mini_plan(1), two_node)
    with pytest.raises(EhrlabError):
        ResponseHarness(mini_plan(1), lasso_path_tree()).run(0, seed=1)


@pytest.fixture(scope="module")
def desk_harness():
    q = enumerate_Q(PALETTE, 1, 1, size_bound=3)
    plan = ConstructionPlan.create(1, 1, q, PALETTE)
    return ResponseHarness(plan, lasso_path_tree())


def test_desk_harness_all_samples_win(desk_harness):
    report = desk_harness.run(600, seed=9, cross_check_every=200)
    assert report.ok
    assert report.wins == report.samples == 600
    assert report.cross_checks == 3
    assert report.first_failure is None
    for line in report.to_lines()[2:8]:
        assert line.endswith(" 0")
    assert report.to_lines()[9] == "first-failure -"


def test_reconstructed_colourings_are_seeded_draws(desk_harness):
    sigma = desk_harness.reconstruct_colouring(0, 9)
    assert sigma.is_rooted(desk_harness.t1)
    assert len(sigma.values) == desk_harness.t1.size == 19650
    assert desk_harness.reconstruct_colouring(0, 9).values == sigma.values
    assert desk_harness.reconstruct_colouring(1, 9).values != sigma.values
    assert desk_harness.reconstruct_colouring(0, 10).values != sigma.values


def test_partial_catalogue_fails_honestly():
    # one-entry catalogue at k=2: many colourings admit no periodic branch
    # reply, and the tally must say so rather than claim a win
    harness = ResponseHarness(mini_plan(2), lasso_path_tree())
    assert harness.t1.size == 2 + 2 * 8 * 3 == 50
    report = harness.run(400, seed=0, cross_check_every=100)
    assert not report.ok
    assert (report.wins, report.step1_failures) == (238, 162)
    assert report.samples == report.wins + report.step1_failures
    assert report.source_failures == 0
    assert report.verdict_failures == 0
    assert report.eta_failures == 0
    assert report.path_failures == 0
    assert report.hub_census_failures == 0
    assert report.first_failure == 2
    assert report.cross_checks == 4
