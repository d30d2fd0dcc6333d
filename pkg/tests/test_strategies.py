"""Thresholds, the branch-matching engine, and the master strategy."""

from __future__ import annotations

import random

import pytest

from ehrlab.colouring import Colouring, Palette
from ehrlab.errors import EhrlabError, StrategyInvariantError
from ehrlab.games import PairSolver, dehr_check, solve_dehr
from ehrlab.strategies import (
    ClusterEngine,
    MasterEngine,
    StrategyScale,
    centered_residue,
    check_master_invariants,
    close,
    cluster_reply,
    exhaustive_master_playouts,
    invariants_imply_win,
    master_reply,
    random_master_playouts,
    threatens,
)
from ehrlab.trees import parse_tree, path_tree


def surrogate_path_pair(length: int = 30):
    """Identical monochrome paths, long enough for the k=1 surrogate scale."""
    scale = StrategyScale.surrogate(1)
    t = path_tree(length)
    sigma = Colouring(Palette(1), (0,) + (1,) * length)
    return t, sigma, scale


# ---------------------------------------------------------------------------
# residues and thresholds


def test_centered_residue_window():
    assert centered_residue(0, 108) == 0
    assert centered_residue(54, 108) == 54
    assert centered_residue(55, 108) == -53
    assert centered_residue(-53, 108) == -53
    assert centered_residue(-54, 108) == 54
    assert centered_residue(108, 108) == 0
    assert centered_residue(163, 108) == 55 - 108
    with pytest.raises(EhrlabError):
        centered_residue(3, 0)


def test_standard_scale_values():
    s = StrategyScale.standard(1)
    assert (s.M, s.D, s.D0) == (27, 108, 2700)
    s3 = StrategyScale.standard(3)
    assert (s3.M, s3.D, s3.D0) == (243, 972, 24300)
    assert s3.D0 == 25 * s3.D


def test_surrogate_presets():
    assert (StrategyScale.surrogate(1).M, StrategyScale.surrogate(1).D) == (3, 12)
    assert StrategyScale.surrogate(2).D0 == 144
    assert StrategyScale.surrogate(3).M == 27
    with pytest.raises(EhrlabError):
        StrategyScale.surrogate(4)


def test_scale_validation():
    with pytest.raises(EhrlabError):
        StrategyScale(k=1, M=2, D=8, D0=16)  # M not a multiple of 3
    with pytest.raises(EhrlabError):
        StrategyScale(k=1, M=3, D=13, D0=24)  # D != 4M
    with pytest.raises(EhrlabError):
        StrategyScale(k=1, M=3, D=12, D0=12)  # D0 < 2D
    with pytest.raises(EhrlabError):
        StrategyScale(k=1, M=3, D=12, D0=30)  # D0 not a multiple of D
    with pytest.raises(EhrlabError):
        StrategyScale(k=0, M=3, D=12, D0=24)


def test_close_threshold_arithmetic():
    # k=1 standard: M=27, threshold 2M/3^max(i,j)
    assert close(1, 1, 1, 18)
    assert not close(1, 1, 1, 19)
    assert StrategyScale.standard(3).close_threshold(3, 3) == 2 * 243 // 27
    assert StrategyScale.standard(1).close_threshold(0, 1) == 18
    assert StrategyScale.standard(1).close_threshold(0, 0) == 54


def test_tether_bounds():
    s = StrategyScale.surrogate(2)  # M=9
    assert s.tether_distance(1) == 3
    assert s.tether_lower(2) == 1
    assert s.tether_upper(2) == 8


def test_threatens_window_and_root_anchor():
    # k=1 standard: window 18, period 108
    assert threatens(1, 1, 1, 40, 30)
    assert not threatens(1, 1, 1, 40, 30, anchor_at_root=True)
    assert threatens(1, 1, 1, 40, 22)  # gap 18, boundary inclusive
    assert not threatens(1, 1, 1, 40, 21)
    assert threatens(1, 1, 1, 5, 113)  # gap -108 wraps to 0
    assert threatens(1, 1, 1, 0, 94)  # gap -94 wraps to 14
    assert threatens(1, 1, 1, 40, 30, D=12)  # gap 10 wraps to -2 at period 12


# ---------------------------------------------------------------------------
# branch-matching engine


def test_cluster_engine_requires_equal_root_types():
    p = Palette(2)
    t1, s1 = parse_tree("c0(c1)", p)
    t2, s2 = parse_tree("c0(c2)", p)
    with pytest.raises(StrategyInvariantError):
        ClusterEngine(t1, s1, t2, s2, 1, 1)


def test_cluster_engine_mirror_collapse():
    # on identical trees every reply is the mirror image
    t, sigma = parse_tree("c0(c1(c2,c1),c2(c1),c1)")
    engine = ClusterEngine(t, sigma, t, sigma, 2, 3)
    rng = random.Random(3)
    for _ in range(3):
        node = rng.randrange(t.size)
        if t.depths[node] > 2:
            continue
        mv = engine.reply("t1", node)
        assert mv.reply == node


def test_cluster_engine_case_tags():
    t1, s1 = parse_tree("c0(c1(c2),c1(c2))")
    engine = ClusterEngine(t1, s1, t1, s1, 2, 4)
    assert engine.reply("t1", 0).case == "B1"  # root
    first = engine.reply("t1", 1)
    assert first.case == "B3" and first.bindings  # fresh branch match
    deeper = engine.reply("t1", 2)
    assert deeper.case == "B3"  # extends the chain one level down
    replay = engine.reply("t2", 2)
    assert replay.case == "B2" and not replay.bindings  # chain fully matched
    assert engine.pairs == [(0, 0), (1, 1), (2, 2), (2, 2)]


def test_cluster_engine_swaps_isomorphic_branches():
    # the two root branches have equal depth-1 types but different layouts;
    # replies land in the matched branch, not at the literal node id
    t1, s1 = parse_tree("c0(c1(c2),c1(c2))")
    t2, s2 = parse_tree("c0(c1(c2),c1(c2))")
    engine = ClusterEngine(t1, s1, t2, s2, 2, 2)
    mv = engine.reply("t2", 3)  # second branch of the second tree
    partner = mv.reply
    assert t1.depths[partner] == 1
    follow = engine.reply("t2", 4)
    assert t1.parents[follow.reply] == partner


def test_cluster_engine_rejects_deep_and_spent_moves():
    t, sigma = parse_tree("c0(c1(c2))")
    engine = ClusterEngine(t, sigma, t, sigma, 1, 1)
    with pytest.raises(EhrlabError):
        engine.reply("t1", 2)  # below depth m=1
    engine.reply("t1", 1)
    with pytest.raises(EhrlabError):
        engine.reply("t1", 0)  # budget spent


def test_cluster_engine_clone_is_independent():
    t, sigma = parse_tree("c0(c1(c2),c1(c2))")
    a = ClusterEngine(t, sigma, t, sigma, 2, 2)
    a.reply("t1", 1)
    b = a.clone()
    b.reply("t1", 2)
    assert a.rounds == 1 and b.rounds == 2
    assert len(a.history) == 1


def test_cluster_replies_preserve_winnability():
    # after each engine reply the configuration stays winnable for the
    # remaining budget, judged by the exact solver
    t1, s1 = parse_tree("c0(c1(c2,c2),c1(c2))")
    t2, s2 = parse_tree("c0(c1(c2),c1(c2,c2))")
    k = 2
    engine = ClusterEngine(t1, s1, t2, s2, 2, k)
    solver = PairSolver(t1, s1, t2, s2, k, distance_required=True)
    for side, node in [("t1", 2), ("t2", 5)]:
        engine.reply(side, node)
        assert solver.is_winnable(engine.pairs) or len(engine.pairs) == k
        assert dehr_check(t1, s1, t2, s2, tuple(engine.pairs)) == []


def test_cluster_exhaustive_playouts_always_win():
    # every Spoiler sequence within the depth-m field ends with the referee
    # finding nothing
    t1, s1 = parse_tree("c0(c1,c2(c1))")
    t2, s2 = parse_tree("c0(c2(c1),c1)")
    m, k = 1, 2

    def walk(engine, rounds_left):
        if rounds_left == 0:
            assert dehr_check(t1, s1, t2, s2, tuple(engine.pairs)) == []
            return 1
        total = 0
        for side, tree in (("t1", t1), ("t2", t2)):
            for node in range(tree.size):
                if tree.depths[node] > m:
                    continue
                twin = engine.clone()
                twin.reply(side, node)
                total += walk(twin, rounds_left - 1)
        return total

    played = walk(ClusterEngine(t1, s1, t2, s2, m, k), k)
    assert played == 36


def test_cluster_reply_one_shot_matches_engine():
    t, sigma = parse_tree("c0(c1(c2),c1(c2))")
    engine = ClusterEngine(t, sigma, t, sigma, 2, 2)
    engine.reply("t1", 1)
    mv_engine = engine.reply("t1", 2)
    mv_replay = cluster_reply(t, sigma, t, sigma, 2, 2, [("t1", 1)], "t1", 2)
    assert (mv_replay.node, mv_replay.reply) == (mv_engine.node, mv_engine.reply)


# ---------------------------------------------------------------------------
# master engine: construction requirements


def test_master_engine_rejects_unrooted_and_census_gaps():
    t, sigma, scale = surrogate_path_pair()
    with pytest.raises(EhrlabError):
        MasterEngine(t, sigma.with_value(3, 0), t, sigma, scale)
    shorter = path_tree(29)
    sig2 = Colouring(Palette(1), (0,) + (1,) * 29)
    with pytest.raises(StrategyInvariantError):
        MasterEngine(t, sigma, shorter, sig2, scale)
    MasterEngine(t, sigma, shorter, sig2, scale, require_types_win=False)


def test_master_engine_requires_path_shaped_top():
    scale = StrategyScale.surrogate(1)  # top D0/2 = 24 levels must be a path
    text = "c0" + "(c1" * 9 + "(c1,c1)" + ")" * 9  # forks at depth 10
    tree, sig = parse_tree(text)
    with pytest.raises(StrategyInvariantError):
        MasterEngine(tree, sig, tree, sig, scale)
    stub, stub_sig = parse_tree("c0(c1)")  # far too shallow
    with pytest.raises(StrategyInvariantError):
        MasterEngine(stub, stub_sig, stub, stub_sig, scale)


def test_master_mirror_on_identical_paths():
    t, sigma, scale = surrogate_path_pair()
    engine = MasterEngine(t, sigma, t, sigma, scale)
    rec = engine.reply("t1", 10)
    assert rec.reply == 10
    assert check_master_invariants(engine) == []
    assert invariants_imply_win(engine).ok


def test_master_preview_does_not_commit():
    t, sigma, scale = surrogate_path_pair()
    engine = MasterEngine(t, sigma, t, sigma, scale)
    rec = engine.preview("t1", 7)
    assert engine.rounds_played == 0
    committed = engine.reply("t1", 7)
    assert committed.reply == rec.reply
    assert engine.rounds_played == 1


def test_master_reply_one_shot():
    t, sigma, scale = surrogate_path_pair()
    rec = master_reply(t, sigma, t, sigma, scale, [], "t2", 4)
    assert rec.reply == 4


def test_master_clone_is_independent():
    t, sigma, scale = surrogate_path_pair()
    a = MasterEngine(t, sigma, t, sigma, scale)
    b = a.clone()
    b.reply("t1", 5)
    assert a.rounds_played == 0 and b.rounds_played == 1
    assert len(a.classes[0].designated) == 0


def test_master_budget_exhaustion():
    t, sigma, scale = surrogate_path_pair()
    engine = MasterEngine(t, sigma, t, sigma, scale)
    engine.reply("t1", 3)
    with pytest.raises(EhrlabError):
        engine.reply("t1", 4)


# ---------------------------------------------------------------------------
# master engine: playouts and monitoring


def test_master_random_playouts_frozen():
    t, sigma, scale = surrogate_path_pair()
    report = random_master_playouts(
        t, sigma, t, sigma, scale, plays=25, rng=random.Random(7)
    )
    assert report.playouts == 25
    assert report.failures == 0
    assert report.first_failure is None
    assert report.case_counts == {"CLOSE": 7, "NT2": 18}


def test_master_exhaustive_playouts_short_path():
    t, sigma, scale = surrogate_path_pair()
    report = exhaustive_master_playouts(t, sigma, t, sigma, scale)
    assert report.playouts == 2 * t.size
    assert report.ok
    assert set(report.case_counts) <= {"CLOSE", "T1", "T2", "T3", "NT1", "NT2"}


def test_master_invariants_catch_tampering():
    t, sigma, scale = surrogate_path_pair()
    engine = MasterEngine(t, sigma, t, sigma, scale)
    engine.reply("t1", 10)
    # C3/C4: drag the second-tree pebble off its mirror position
    engine.pairs[1] = (10, 25)
    problems = check_master_invariants(engine)
    assert problems
    assert any(line.startswith(("C3", "C4")) for line in problems)


def test_master_invariants_catch_anchor_incongruence():
    # synthetic two-pebble position on one long path: distant pebbles whose
    # depth gap wraps into the threat window (mod D=36) but whose anchors sit
    # 36 apart; shifting one anchor by a single level must trip the
    # congruence condition and nothing else
    scale = StrategyScale.surrogate(2)  # M=9, D=36, k=2
    n = 80
    t = path_tree(n)
    sigma = Colouring(Palette(1), (0,) + (1,) * n)
    engine = MasterEngine(t, sigma, t, sigma, scale)
    engine.pairs = [(0, 0), (20, 20), (55, 55)]
    engine.classes = [
        engine.classes[0],
        engine._make_class((17, 17)),
        engine._make_class((53, 53)),
    ]
    engine.class_of = [0, 1, 2]
    assert check_master_invariants(engine) == []
    engine.classes[2] = engine._make_class((54, 54))
    engine.pairs[2] = (55, 55)
    problems = check_master_invariants(engine)
    assert problems
    assert all(line.startswith("C6") for line in problems)
    assert any("incongruent anchor depths" in line for line in problems)


def test_invariants_imply_win_reports_all_three_views():
    t, sigma, scale = surrogate_path_pair()
    engine = MasterEngine(t, sigma, t, sigma, scale)
    engine.reply("t2", 8)
    report = invariants_imply_win(engine)
    assert report.ok
    lines = report.to_lines()
    assert lines[0] == "invariants: ok"
    assert "win conditions (enhanced): ok" in lines
    assert "win conditions (base): ok" in lines
    # tamper and watch the enhanced referee complain through the report
    engine.pairs[1] = (8, 9)
    broken = invariants_imply_win(engine)
    assert not broken.ok
    assert broken.enhanced_violations


def test_master_distinct_spines_same_census():
    # two different trees with matching enhanced censuses: a path and the
    # same path, but colours permuted below the root by the same rule
    scale = StrategyScale.surrogate(1)
    n = 30
    t = path_tree(n)
    vals1 = [0] + [1 + (d % 2) for d in range(1, n + 1)]
    s1 = Colouring(Palette(2), tuple(vals1))
    s2 = Colouring(Palette(2), tuple(vals1))
    engine = MasterEngine(t, s1, t, s2, scale)
    rec = engine.reply("t1", 17)
    assert rec.reply == 17
    assert invariants_imply_win(engine).ok
