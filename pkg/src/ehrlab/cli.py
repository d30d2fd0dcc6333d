"""Batch command line for every engine in the package.

One subcommand per engine; results go to stdout or, with --out, to artifact
files.  Every output starts with comment lines echoing the tool version and
the fully resolved options, so artifacts are self-describing; the comment
syntax is accepted by all of the package's file parsers.

Exit codes: 0 success (for queries: the property holds / Duplicator wins),
1 property violation or negative answer, 2 bad usage or malformed input,
3 a size guard refused the computation.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import __version__
from .colouring import Colouring, Palette, parse_colouring_file
from .constructions import (
    ConstructionPlan,
    OffspringLaw,
    build_T1,
    build_T2,
    estimate_truncation_probability,
    gw_sample,
    justification_report,
    types_game_response,
)
from .deficiency import TypeSet, dump_q_manifest, enumerate_Q, is_deficient, parse_q_manifest
from .emso import ehr_parameters_of, evaluate, parse_sentence_file, unparse
from .errors import (
    ConfigurationNotWinnableError,
    ConstructionError,
    EhrlabError,
    GuardExceededError,
    ResponseUnavailableError,
    StrategyInvariantError,
)
from .games import (
    Player,
    dehr_check,
    ehr_check,
    solve_dehr,
    solve_set_pebble_ehr,
    types_game_verdict,
)
from .strategies import (
    ClusterEngine,
    StrategyScale,
    exhaustive_master_playouts,
    random_master_playouts,
)
from .trees import RootedTree, lasso_path_tree, parse_tree, path_tree, serialize_tree
from .types_engine import census


# --- shared plumbing ---------------------------------------------------------


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def _load_tree(path: str, palette: Palette | None = None) -> tuple[RootedTree, Colouring]:
    return parse_tree(_strip_comments(_read(path)).strip(), palette)


def _load_pair(path1: str, path2: str, min_r: int | None):
    # both literals must speak one palette: infer the widest needed
    t1, c1 = _load_tree(path1)
    t2, c2 = _load_tree(path2)
    r = max(c1.palette.r, c2.palette.r, min_r or 1)
    palette = Palette(r)
    t1, c1 = _load_tree(path1, palette)
    t2, c2 = _load_tree(path2, palette)
    return t1, c1, t2, c2, palette


def _header(ns: argparse.Namespace) -> str:
    # destination options are plumbing, not configuration: an artifact's
    # content must not depend on where it was written
    skip = {"func", "command", "out", "out_t1", "out_t2"}
    lines = [f"# ehrlab {__version__}", f"# command: {ns.command}"]
    for key in sorted(vars(ns)):
        if key in skip:
            continue
        lines.append(f"# {key.replace('_', '-')}: {getattr(ns, key)}")
    return "\n".join(lines) + "\n"


def _emit(ns: argparse.Namespace, body: str, path_override: str | None = None) -> None:
    if not body.endswith("\n"):
        body += "\n"
    text = _header(ns) + body
    target = path_override if path_override is not None else getattr(ns, "out", None)
    if target:
        Path(target).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _placeholder(tree: RootedTree, palette: Palette) -> Colouring:
    values = tuple(0 if v == tree.root else 1 for v in range(tree.size))
    tail = tree.lasso.period_colours if tree.lasso else ()
    return Colouring(palette, values, tail_prefix=(), tail_period=tail)


def _verdict_exit(winner: Player) -> int:
    return 0 if winner is Player.DUPLICATOR else 1


def _parse_pairs(text: str) -> tuple[tuple[int, int], ...]:
    if not text:
        return ()
    pairs = []
    for part in text.split(","):
        left, sep, right = part.partition(":")
        if not sep:
            raise EhrlabError(f"designated pair must be 'node:node', got {part!r}")
        pairs.append((int(left), int(right)))
    return tuple(pairs)


def _law_of(ns: argparse.Namespace) -> OffspringLaw:
    if ns.law == "poisson":
        return OffspringLaw.poisson(ns.param)
    if ns.law == "geometric":
        return OffspringLaw.geometric(ns.param)
    if not ns.pmf:
        raise EhrlabError("--pmf is required for the explicit law")
    return OffspringLaw.explicit(tuple(float(x) for x in ns.pmf.split(",")))


def _branch_shape(spec: str) -> RootedTree:
    if spec == "path":
        return lasso_path_tree()
    tree, _ = _load_tree(spec)
    return tree


def _manifest_shape(text: str) -> tuple[int, int]:
    """Widest colour index and deepest type nesting named by manifest lines."""
    r = 1
    m = 0
    for raw in text.splitlines():
        line = raw.split("#", 1)[0]
        left, sep, _ = line.partition(" | ")
        if not sep:
            continue
        depth = 0
        for i, ch in enumerate(left):
            if ch == "(":
                depth += 1
                m = max(m, depth)
            elif ch == ")":
                depth -= 1
            elif ch == "c" and i + 1 < len(left) and left[i + 1].isdigit():
                j = i + 1
                while j < len(left) and left[j].isdigit():
                    j += 1
                r = max(r, int(left[i + 1 : j]))
    return r, m


def _plan_of(ns: argparse.Namespace) -> ConstructionPlan:
    text = _read(ns.q)
    inferred_r, inferred_m = _manifest_shape(text)
    r = ns.r if ns.r is not None else inferred_r
    m = ns.m if ns.m is not None else inferred_m
    palette = Palette(r)
    q_map = parse_q_manifest(text, palette, m)
    return ConstructionPlan.create(ns.L, ns.k, q_map, palette, m=m, node_budget=ns.budget)


# --- subcommands -------------------------------------------------------------


def cmd_census(ns: argparse.Namespace) -> int:
    palette = Palette(ns.r) if ns.r else None
    tree, col = _load_tree(ns.tree, palette)
    result = census(tree, col, ns.m, ns.k, cap=ns.cap)
    _emit(ns, result.dump())
    return 0


def cmd_types_game(ns: argparse.Namespace) -> int:
    t1, c1, t2, c2, _ = _load_pair(ns.t1, ns.t2, ns.r)
    verdict = types_game_verdict(t1, c1, t2, c2, ns.m, ns.k)
    _emit(ns, "\n".join(verdict.to_lines()))
    return _verdict_exit(verdict.winner)


def cmd_dehr(ns: argparse.Namespace) -> int:
    t1, c1, t2, c2, _ = _load_pair(ns.t1, ns.t2, ns.r)
    designated = _parse_pairs(ns.pairs)
    verdict = solve_dehr(t1, c1, t2, c2, ns.k, designated, node_product_guard=ns.product_guard)
    _emit(ns, "\n".join(verdict.to_lines()))
    return _verdict_exit(verdict.winner)


def cmd_ehr(ns: argparse.Namespace) -> int:
    palette = Palette(ns.r)
    t1, _ = _load_tree(ns.t1)
    t2, _ = _load_tree(ns.t2)
    verdict = solve_set_pebble_ehr(
        t1,
        t2,
        palette,
        ns.k,
        spoiler_colours=ns.spoiler_colours,
        colouring_guard=ns.colouring_guard,
        node_product_guard=ns.product_guard,
    )
    _emit(ns, "\n".join(verdict.to_lines()))
    return _verdict_exit(verdict.winner)


def _master_demo_pair(scale: StrategyScale) -> tuple[RootedTree, Colouring, RootedTree, Colouring]:
    depth = scale.D0 // 2
    tree = path_tree(depth)
    col = _placeholder(tree, Palette(1))
    return tree, col, tree, col


def cmd_strategy_playout(ns: argparse.Namespace) -> int:
    if ns.mode == "master":
        return _master_playout(ns)
    return _cluster_playout(ns)


def _master_playout(ns: argparse.Namespace) -> int:
    scale = StrategyScale.standard(ns.k) if ns.preset == "paper" else StrategyScale.surrogate(ns.k)
    if ns.t1:
        _, c1 = _load_tree(ns.t1)
        _, c2 = _load_tree(ns.t2)
        base_r = max(c1.palette.r, c2.palette.r)
    else:
        base_r = 1
    aug_size = (base_r + 1) * (scale.D0 + 1 + scale.D)
    if aug_size > ns.max_aug_colours:
        raise GuardExceededError("augmented palette", aug_size, ns.max_aug_colours)
    if ns.t1:
        t1, c1, t2, c2, _ = _load_pair(ns.t1, ns.t2, None)
    else:
        t1, c1, t2, c2 = _master_demo_pair(scale)
    if ns.exhaustive:
        total = (t1.size + t2.size) ** scale.k
        if total > ns.max_playouts:
            raise GuardExceededError("exhaustive playouts", total, ns.max_playouts)
        report = exhaustive_master_playouts(t1, c1, t2, c2, scale)
    else:
        rng = random.Random(ns.seed)
        report = random_master_playouts(t1, c1, t2, c2, scale, ns.plays, rng)
    lines = [f"playouts: {report.playouts}", f"failures: {report.failures}"]
    for case in sorted(report.case_counts):
        lines.append(f"case {case}: {report.case_counts[case]}")
    if report.first_failure:
        lines.append(f"first failure: {report.first_failure}")
    _emit(ns, "\n".join(lines))
    return 0 if report.ok else 1


def _cluster_playout(ns: argparse.Namespace) -> int:
    if not ns.t1 or not ns.t2:
        raise EhrlabError("cluster mode needs --t1 and --t2 (tree literal files)")
    t1, c1, t2, c2, _ = _load_pair(ns.t1, ns.t2, ns.r)
    field1 = [v for v in range(t1.size) if t1.depths[v] <= ns.m]
    field2 = [v for v in range(t2.size) if t2.depths[v] <= ns.m]
    moves = [("t1", v) for v in field1] + [("t2", v) for v in field2]

    playouts = failures = 0
    first_failure: str | None = None

    def finish(engine: ClusterEngine, trace) -> None:
        nonlocal playouts, failures, first_failure
        playouts += 1
        problems = dehr_check(t1, c1, t2, c2, tuple(engine.pairs))
        if problems and failures == 0:
            first_failure = f"trace {trace}: {problems[0]}"
        failures += 1 if problems else 0

    if ns.exhaustive:
        total = len(moves) ** ns.k
        if total > ns.max_playouts:
            raise GuardExceededError("exhaustive playouts", total, ns.max_playouts)

        def walk(engine: ClusterEngine, trace: list) -> None:
            if engine.rounds == ns.k:
                finish(engine, trace)
                return
            for side, node in moves:
                nxt = engine.clone()
                nxt.reply(side, node)
                walk(nxt, trace + [(side, node)])

        walk(ClusterEngine(t1, c1, t2, c2, ns.m, ns.k), [])
    else:
        rng = random.Random(ns.seed)
        for _ in range(ns.plays):
            engine = ClusterEngine(t1, c1, t2, c2, ns.m, ns.k)
            trace = []
            for _round in range(ns.k):
                side, node = moves[rng.randrange(len(moves))]
                trace.append((side, node))
                engine.reply(side, node)
            finish(engine, trace)

    lines = [f"playouts: {playouts}", f"failures: {failures}"]
    if first_failure:
        lines.append(f"first failure: {first_failure}")
    _emit(ns, "\n".join(lines))
    return 0 if failures == 0 else 1


def cmd_deficient(ns: argparse.Namespace) -> int:
    palette = Palette(ns.r)
    tree, _ = _load_tree(ns.tree, palette)
    s = TypeSet.from_strings(ns.types.split(), ns.m)
    answer = is_deficient(s, tree, palette, ns.m, ns.k, colouring_guard=ns.colouring_guard)
    _emit(ns, f"deficient: {'yes' if answer else 'no'}")
    return 0 if answer else 1


def cmd_enumerate_q(ns: argparse.Namespace) -> int:
    palette = Palette(ns.r)
    q_map = enumerate_Q(
        palette,
        ns.m,
        ns.k,
        ns.size_bound,
        subset_guard=ns.subset_guard,
        type_guard=ns.type_guard,
        colouring_guard=ns.colouring_guard,
    )
    _emit(ns, dump_q_manifest(q_map, palette))
    return 0


def cmd_construct(ns: argparse.Namespace) -> int:
    plan = _plan_of(ns)
    t1 = build_T1(plan)
    t2_full = build_T2(plan, _branch_shape(ns.t2))
    lit1 = serialize_tree(t1, _placeholder(t1, plan.palette))
    lit2 = serialize_tree(t2_full, _placeholder(t2_full, plan.palette))
    if ns.out_t1 or ns.out_t2:
        if ns.out_t1:
            _emit(ns, lit1, path_override=ns.out_t1)
        if ns.out_t2:
            _emit(ns, lit2, path_override=ns.out_t2)
    else:
        body = f"# first tree: {t1.size} nodes\n{lit1}\n# second tree: {t2_full.size} arena nodes + tail\n{lit2}"
        _emit(ns, body)
    return 0


def cmd_respond(ns: argparse.Namespace) -> int:
    plan = _plan_of(ns)
    t1 = build_T1(plan)
    t2_full = build_T2(plan, _branch_shape(ns.t2))
    sigma1 = parse_colouring_file(_read(ns.sigma1), plan.palette, t1.size)
    sigma2 = types_game_response(
        t1, sigma1, plan, t2_full, verify=not ns.no_verify, step1_guard=ns.step1_guard
    )
    verdict = types_game_verdict(t1, sigma1, t2_full, sigma2, plan.m, plan.k)
    lines = [
        f"# tail-prefix: {' '.join(str(c) for c in sigma2.tail_prefix) or '-'}",
        f"# tail-period: {' '.join(str(c) for c in sigma2.tail_period)}",
    ]
    lines += [f"{v} {c}" for v, c in enumerate(sigma2.values)]
    lines += [f"# {line}" for line in verdict.to_lines()]
    lines += [f"# {line}" for line in justification_report(t1, sigma1, t2_full, sigma2, plan).to_lines()]
    _emit(ns, "\n".join(lines))
    return _verdict_exit(verdict.winner)


def cmd_gw_sample(ns: argparse.Namespace) -> int:
    law = _law_of(ns)
    tree = gw_sample(law, ns.depth, ns.seed, node_budget=ns.budget)
    body = f"# law: {law.describe()}\n# nodes: {tree.size}\n" + serialize_tree(
        tree, _placeholder(tree, Palette(1))
    )
    _emit(ns, body)
    return 0


def cmd_estimate(ns: argparse.Namespace) -> int:
    law = _law_of(ns)
    target, _ = _load_tree(ns.target)
    result = estimate_truncation_probability(
        law, target, ns.n, ns.samples, ns.seed, z=ns.z, node_budget=ns.budget
    )
    _emit(ns, "\n".join(result.to_lines()))
    return 0


def cmd_emso_eval(ns: argparse.Namespace) -> int:
    sentence = parse_sentence_file(_read(ns.sentence))
    tree, _ = _load_tree(ns.tree)
    n_sets, rank = ehr_parameters_of(sentence)
    value = evaluate(sentence, tree, assignment_guard=ns.guard)
    body = "\n".join(
        [
            f"sentence: {unparse(sentence)}",
            f"set-quantifiers: {n_sets}",
            f"quantifier-rank: {rank}",
            f"value: {'true' if value else 'false'}",
        ]
    )
    _emit(ns, body)
    return 0 if value else 1


def cmd_referee(ns: argparse.Namespace) -> int:
    import json

    data = json.loads(_read(ns.transcript))
    kind = data["kind"]
    palette = Palette(int(data["r"]))
    t1, lit1 = parse_tree(data["t1"], palette)
    t2, lit2 = parse_tree(data["t2"], palette)

    def colouring_of(tree, lit, values, tail):
        if values is None:
            return lit
        prefix = tuple(tail["prefix"]) if tail else ()
        period = tuple(tail["period"]) if tail else ()
        col = Colouring(palette, tuple(values), tail_prefix=prefix, tail_period=period)
        col.validate_for(tree)
        return col

    c1 = colouring_of(t1, lit1, data.get("colours1"), data.get("tail1"))
    c2 = colouring_of(t2, lit2, data.get("colours2"), data.get("tail2"))
    pairs = [tuple(p) for p in data.get("designated", [])] + [
        tuple(p) for p in data.get("pairs", [])
    ]

    if kind == "types":
        verdict = types_game_verdict(t1, c1, t2, c2, int(data["m"]), int(data["k"]))
        _emit(ns, "\n".join(verdict.to_lines()))
        return _verdict_exit(verdict.winner)
    check = dehr_check if kind == "dehr" else ehr_check
    problems = check(t1, c1, t2, c2, tuple(pairs))
    winner = "Spoiler" if problems else "Duplicator"
    lines = [f"winner: {winner}"] + [f"violation: {p}" for p in problems]
    _emit(ns, "\n".join(lines))
    return 0 if not problems else 1


def cmd_serve(ns: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=ns.host, port=ns.port, log_level="info")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehrlab",
        description="Game laboratory on rooted coloured trees.",
    )
    parser.add_argument("--version", action="version", version=f"ehrlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result to this file instead of stdout")
    common.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker pool cap for engines that use one (current engines are single-threaded; outputs never depend on it)",
    )

    p = sub.add_parser("census", parents=[common], help="type census of one coloured tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cap", type=int, default=None, help="count truncation (default k)")
    p.add_argument("--r", type=int, default=None, help="minimum palette size")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("types-game", parents=[common], help="census-comparison verdict for two coloured trees")
    p.add_argument("--t1", required=True)
    p.add_argument("--t2", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, default=None)
    p.set_defaults(func=cmd_types_game)

    p = sub.add_parser("dehr", parents=[common], help="solve the distance-preserving pebble game")
    p.add_argument("--t1", required=True)
    p.add_argument("--t2", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pairs", default="", help="designated pairs 'x:y,x:y' (default none)")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--product-guard", type=int, default=6400)
    p.set_defaults(func=cmd_dehr)

    p = sub.add_parser("ehr", parents=[common], help="solve the full set-round pebble game")
    p.add_argument("--t1", required=True)
    p.add_argument("--t2", required=True)
    p.add_argument("--r", type=int, required=True, help="non-root colours available in the set round")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--spoiler-colours", choices=["t1", "t2", "either"], default="t1")
    p.add_argument("--colouring-guard", type=int, default=250_000)
    p.add_argument("--product-guard", type=int, default=6400)
    p.set_defaults(func=cmd_ehr)

    p = sub.add_parser(
        "strategy-playout",
        parents=[common],
        help="drive a scripted Spoiler against a strategy engine and referee the results",
    )
    p.add_argument("--mode", choices=["master", "cluster"], default="master")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, default=1, help="playing-field depth (cluster mode)")
    p.add_argument("--preset", choices=["surrogate", "paper"], default="surrogate")
    p.add_argument("--t1", help="tree literal file (default: a built-in demo pair)")
    p.add_argument("--t2")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--plays", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--max-playouts", type=int, default=10_000)
    p.add_argument("--max-aug-colours", type=int, default=1024)
    p.set_defaults(func=cmd_strategy_playout)

    p = sub.add_parser("deficient", parents=[common], help="can the tree avoid realizing the given types?")
    p.add_argument("--types", required=True, help="space-separated type descriptors, e.g. 'c0 c1(c2*1)'")
    p.add_argument("--tree", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--colouring-guard", type=int, default=2_000_000)
    p.set_defaults(func=cmd_deficient)

    p = sub.add_parser("enumerate-q", parents=[common], help="all deficient type sets with bounded witnesses")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--size-bound", type=int, required=True)
    p.add_argument("--subset-guard", type=int, default=4096)
    p.add_argument("--type-guard", type=int, default=4096)
    p.add_argument("--colouring-guard", type=int, default=2_000_000)
    p.set_defaults(func=cmd_enumerate_q)

    construct_common = argparse.ArgumentParser(add_help=False)
    construct_common.add_argument("--q", required=True, help="deficient-set manifest file")
    construct_common.add_argument("--L", type=int, required=True, help="trunk length")
    construct_common.add_argument("--k", type=int, required=True)
    construct_common.add_argument("--r", type=int, default=None, help="palette size (default: widest colour in the manifest)")
    construct_common.add_argument("--m", type=int, default=None, help="type depth (default: deepest nesting in the manifest)")
    construct_common.add_argument(
        "--t2", default="path", help="branch shape: 'path' or a lasso tree literal file"
    )
    construct_common.add_argument("--budget", type=int, default=1_000_000)

    p = sub.add_parser(
        "construct", parents=[common, construct_common], help="build the witness-forest tree pair"
    )
    p.add_argument("--out-t1", help="write the first tree literal here")
    p.add_argument("--out-t2", help="write the second tree literal here")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser(
        "respond",
        parents=[common, construct_common],
        help="answer a colouring of the first constructed tree so the types game is a draw for Spoiler",
    )
    p.add_argument("--sigma1", required=True, help="colouring file for the first tree")
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--step1-guard", type=int, default=2_000_000)
    p.set_defaults(func=cmd_respond)

    law_common = argparse.ArgumentParser(add_help=False)
    law_common.add_argument("--law", choices=["poisson", "geometric", "explicit"], required=True)
    law_common.add_argument("--param", type=float, default=0.0)
    law_common.add_argument("--pmf", default="", help="comma-separated masses for the explicit law")
    law_common.add_argument("--seed", type=int, required=True)
    law_common.add_argument("--budget", type=int, default=1_000_000)

    p = sub.add_parser("gw-sample", parents=[common, law_common], help="sample one truncated branching-process tree")
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=cmd_gw_sample)

    p = sub.add_parser(
        "estimate", parents=[common, law_common], help="Monte Carlo probability of one truncated shape"
    )
    p.add_argument("--target", required=True, help="tree literal file (colours ignored)")
    p.add_argument("--n", type=int, required=True, help="truncation depth")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--z", type=float, default=1.96)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("emso-eval", parents=[common], help="evaluate a sentence file on a tree")
    p.add_argument("--sentence", required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--guard", type=int, default=1 << 20)
    p.set_defaults(func=cmd_emso_eval)

    p = sub.add_parser("referee", parents=[common], help="replay an exported session transcript offline")
    p.add_argument("--transcript", required=True, help="transcript JSON exported by the session service")
    p.set_defaults(func=cmd_referee)

    p = sub.add_parser("serve", parents=[common], help="run the interactive session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if ns.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return ns.func(ns)
    except GuardExceededError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (
        ResponseUnavailableError,
        ConstructionError,
        ConfigurationNotWinnableError,
        StrategyInvariantError,
    ) as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return 1
    except (EhrlabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
