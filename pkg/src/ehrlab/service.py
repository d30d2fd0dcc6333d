"""Stateful HTTP sessions for interactive play against the engines.

A human takes one side; the service validates every move against the game
rules, computes the engine's answer, referees the position after each round,
and returns the full public state, so clients never implement rule logic.

Endpoints (JSON bodies; trees travel as literals):
  POST /sessions                create; body = SessionConfig fields
  GET  /sessions/{id}           current public state
  POST /sessions/{id}/moves     submit a move; returns the updated state
  GET  /sessions/{id}/hint      annotated candidate moves for the human

Errors: 400 invalid config or illegal move (the message names the violated
rule), 404 unknown session, 409 finished session or a second in-flight
request, 422 a size guard refused the computation.

Sessions are in-memory and vanish with the process.  Requests for one
session are strictly serialized: a move arriving while another is being
processed is rejected, not queued.

The exported ``transcript`` field is self-contained: replaying it through
the offline referee (``ehrlab referee``) reproduces the verdict.
"""

from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass, field
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .colouring import Colouring, Palette, random_rooted_colouring
from .errors import (
    ConfigurationNotWinnableError,
    EhrlabError,
    GuardExceededError,
    StrategyInvariantError,
)
from .games import PairSolver, dehr_check, ehr_check, types_game_verdict
from .strategies import (
    ClusterEngine,
    MasterEngine,
    StrategyScale,
    centered_residue,
    check_master_invariants,
)
from .trees import RootedTree, distance, parse_tree, serialize_tree


Kind = Literal["ehr", "dehr", "types"]
Policy = Literal["master", "cluster", "minimax", "random", "mirror"]


class SessionConfig(BaseModel):
    kind: Kind
    t1: str
    t2: str
    k: int = Field(ge=0)
    r: int | None = None
    m: int = 1
    human: Literal["spoiler", "duplicator"] = "spoiler"
    policy: Policy = "minimax"
    designated: list[tuple[int, int]] = []
    preset: Literal["surrogate", "paper"] = "surrogate"
    seed: int = 0
    max_aug_colours: int = 1024
    node_product_guard: int = 6400


class MoveBody(BaseModel):
    type: Literal["colouring", "pebble"]
    side: Literal["t1", "t2"] = "t1"
    node: int | None = None
    values: list[int] | None = None


def _bad(message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=message)


@dataclass
class _Session:
    id: str
    config: SessionConfig
    palette: Palette
    trees: tuple[RootedTree, RootedTree]
    cols: list[Colouring | None]
    pairs: list[tuple[int, int]] = field(default_factory=list)
    status: str = "awaiting-move"
    winner: str | None = None
    problems: list[str] = field(default_factory=list)
    monitor: list[dict] = field(default_factory=list)
    engine: object = None
    solver: PairSolver | None = None
    rng: random.Random = field(default_factory=random.Random)
    pending: dict | None = None  # engine Spoiler move awaiting the human reply
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def rounds_total(self) -> int:
        return self.config.k - len(self.config.designated)

    @property
    def rounds_played(self) -> int:
        return len(self.pairs)


class _Store:
    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, _Session] = {}
        self._counter = itertools.count(1)

    def add(self, make) -> _Session:
        with self._lock:
            sid = f"s{next(self._counter)}"
            sess = make(sid)
            self._sessions[sid] = sess
            return sess

    def get(self, sid: str) -> _Session:
        with self._lock:
            sess = self._sessions.get(sid)
        if sess is None:
            raise HTTPException(status_code=404, detail=f"no session {sid!r}")
        return sess


# --- creation ----------------------------------------------------------------


def _make_session(sid: str, cfg: SessionConfig) -> _Session:
    t1, c1 = parse_tree(cfg.t1)
    t2, c2 = parse_tree(cfg.t2)
    r = max(c1.palette.r, c2.palette.r, cfg.r or 1)
    palette = Palette(r)
    t1, c1 = parse_tree(cfg.t1, palette)
    t2, c2 = parse_tree(cfg.t2, palette)

    sess = _Session(
        id=sid,
        config=cfg,
        palette=palette,
        trees=(t1, t2),
        cols=[c1, c2],
        rng=random.Random(cfg.seed),
    )

    if cfg.kind == "types":
        if cfg.policy != "mirror":
            raise _bad("types sessions support the mirror reply policy only")
        if cfg.human != "spoiler":
            raise _bad("types sessions put the human on the colouring side")
        sess.cols = [None, None]
        sess.status = "awaiting-colouring"
        return sess

    if cfg.kind == "dehr":
        for tree, col, name in ((t1, c1, "t1"), (t2, c2, "t2")):
            if not col.is_rooted(tree):
                raise _bad(f"{name}: the root colour must mark the root and nothing else")
        for x, y in cfg.designated:
            t1.check_node(x)
            t2.check_node(y)
        violations = dehr_check(t1, c1, t2, c2, tuple(cfg.designated))
        if violations:
            raise _bad(f"designated pairs violate the win conditions: {violations[0]}")
        if cfg.designated and cfg.policy == "master":
            raise _bad("the master policy starts from the bare convention pair; drop the designated pairs")
        if sess.rounds_total < 0:
            raise _bad("more designated pairs than rounds")
        _build_engine(sess)
        if sess.rounds_total == 0:
            sess.status = "finished"
            sess.winner = "Duplicator"
            return sess
        sess.status = "awaiting-move"
        if cfg.human == "duplicator":
            _engine_spoiler_move(sess)
        return sess

    # ehr: the colouring round comes first
    sess.cols = [None, None]
    sess.status = "awaiting-colouring"
    if cfg.human == "duplicator":
        _engine_spoiler_colouring(sess)
    return sess


def _scale_for(cfg: SessionConfig, palette: Palette) -> StrategyScale:
    k = max(cfg.k - len(cfg.designated), 1)
    scale = StrategyScale.standard(k) if cfg.preset == "paper" else StrategyScale.surrogate(k)
    aug_size = palette.size * (scale.D0 + 1 + scale.D)
    if aug_size > cfg.max_aug_colours:
        raise GuardExceededError("augmented palette", aug_size, cfg.max_aug_colours)
    return scale


def _build_engine(sess: _Session) -> None:
    cfg = sess.config
    t1, t2 = sess.trees
    c1, c2 = sess.cols
    if cfg.policy == "master":
        scale = _scale_for(cfg, sess.palette)
        sess.engine = MasterEngine(t1, c1, t2, c2, scale)
    elif cfg.policy == "cluster":
        sess.engine = ClusterEngine(t1, c1, t2, c2, cfg.m, max(sess.rounds_total, 1))
    elif cfg.policy == "minimax":
        sess.solver = PairSolver(
            t1,
            c1,
            t2,
            c2,
            cfg.k,
            distance_required=(cfg.kind == "dehr"),
            node_product_guard=cfg.node_product_guard,
        )
    elif cfg.policy == "mirror":
        if t1.parents != t2.parents or c1.values != c2.values:
            raise _bad("the mirror policy needs two identical coloured trees")


# --- engine moves -------------------------------------------------------------


def _other(side: str) -> str:
    return "t2" if side == "t1" else "t1"


def _engine_spoiler_colouring(sess: _Session) -> None:
    sigma = random_rooted_colouring(sess.trees[0], sess.palette, sess.rng)
    sess.cols[0] = sigma
    sess.pending = {"type": "colouring", "side": "t1", "values": list(sigma.values)}
    sess.status = "awaiting-colouring"


def _engine_spoiler_move(sess: _Session) -> None:
    side = "t1" if sess.rng.random() < 0.5 else "t2"
    tree = sess.trees[0 if side == "t1" else 1]
    node = sess.rng.randrange(tree.size)
    sess.pending = {"type": "pebble", "side": side, "node": node}
    sess.status = "awaiting-move"


def _engine_reply(sess: _Session, side: str, node: int) -> int:
    """Duplicator's answer on the other tree, by the configured policy."""
    cfg = sess.config
    a = 0 if side == "t1" else 1
    other_tree = sess.trees[1 - a]
    if cfg.policy == "master":
        record = sess.engine.reply(side, node)
        return record.reply
    if cfg.policy == "cluster":
        move = sess.engine.reply(side, node)
        return move.reply
    if cfg.policy == "minimax":
        history = tuple(sess.config.designated) + tuple(sess.pairs)
        try:
            candidates = sess.solver.corresponding(history, node, side)
        except ConfigurationNotWinnableError:
            candidates = []
        if not candidates:
            # nothing preserves the win; concede with the smallest node
            return 0
        return min(candidates)
    if cfg.policy == "mirror":
        return node
    return sess.rng.randrange(other_tree.size)


def _referee(sess: _Session) -> list[str]:
    t1, t2 = sess.trees
    c1, c2 = sess.cols
    history = tuple(sess.config.designated) + tuple(sess.pairs)
    if sess.config.kind == "dehr":
        return dehr_check(t1, c1, t2, c2, history)
    return ehr_check(t1, c1, t2, c2, history)


def _monitor_entry(sess: _Session) -> dict:
    entry: dict = {"round": sess.rounds_played, "violations": _referee(sess)}
    if sess.config.policy == "master" and sess.engine is not None:
        entry["conditions"] = check_master_invariants(sess.engine)
    return entry


def _after_round(sess: _Session) -> None:
    entry = _monitor_entry(sess)
    sess.monitor.append(entry)
    violations = entry["violations"] + entry.get("conditions", [])
    if entry["violations"]:
        sess.status = "finished"
        sess.winner = "Spoiler"
        sess.problems = violations
        return
    if sess.rounds_played >= sess.rounds_total:
        sess.status = "finished"
        sess.winner = "Duplicator"
        sess.problems = violations
        return
    if sess.config.human == "duplicator":
        _engine_spoiler_move(sess)


# --- move handling -------------------------------------------------------------


def _apply_colouring(sess: _Session, move: MoveBody) -> None:
    if sess.status != "awaiting-colouring":
        raise _bad("no colouring round is pending")
    if move.values is None:
        raise _bad("a colouring move carries 'values'")
    human_is_spoiler = sess.config.human == "spoiler"
    if not human_is_spoiler and (sess.pending is None or sess.pending["type"] != "colouring"):
        raise _bad("no engine colouring to answer")
    side = move.side if human_is_spoiler else _other(sess.pending["side"])
    a = 0 if side == "t1" else 1
    if not human_is_spoiler and sess.cols[1 - a] is None:
        raise _bad("reply on the other tree")
    tree = sess.trees[a]
    if len(move.values) != tree.size:
        raise _bad(f"expected {tree.size} colour values, got {len(move.values)}")
    try:
        sigma = Colouring(sess.palette, tuple(move.values))
        sigma.validate_for(tree)
    except EhrlabError as exc:
        raise _bad(str(exc))
    if not sigma.is_rooted(tree):
        raise _bad("the root colour marks the root and nothing else")
    sess.cols[a] = sigma
    sess.pending = None

    if human_is_spoiler:
        # every policy answers the colouring round by mirroring: the pebble
        # policies only differ once pebbles are on the board
        if sess.trees[0].parents != sess.trees[1].parents:
            raise _bad("set-round replies need two identical tree shapes")
        sess.cols[1 - a] = Colouring(sess.palette, tuple(move.values))

    if sess.cols[0] is not None and sess.cols[1] is not None:
        if sess.config.kind == "types":
            verdict = types_game_verdict(
                sess.trees[0], sess.cols[0], sess.trees[1], sess.cols[1],
                sess.config.m, sess.config.k,
            )
            sess.status = "finished"
            sess.winner = str(verdict.winner)
            sess.problems = [str(w) for w in (verdict.witness or [])]
            return
        try:
            _build_engine(sess)
        except StrategyInvariantError as exc:
            raise _bad(f"this colouring pair defeats the engine precondition: {exc}")
        sess.status = "awaiting-move"
        if sess.config.human == "duplicator":
            _engine_spoiler_move(sess)


def _apply_pebble(sess: _Session, move: MoveBody) -> None:
    if sess.status != "awaiting-move":
        raise _bad("no pebble round is pending")
    if move.node is None:
        raise _bad("a pebble move carries 'node'")
    if sess.config.human == "spoiler":
        a = 0 if move.side == "t1" else 1
        tree = sess.trees[a]
        if not 0 <= move.node < tree.size:
            raise _bad(f"node {move.node} outside 0..{tree.size - 1}")
        try:
            reply = _engine_reply(sess, move.side, move.node)
        except StrategyInvariantError as exc:
            raise _bad(f"the engine cannot answer this move: {exc}")
        except EhrlabError as exc:
            raise _bad(str(exc))
        pair = (move.node, reply) if a == 0 else (reply, move.node)
    else:
        if sess.pending is None or sess.pending["type"] != "pebble":
            raise _bad("no engine move to answer")
        want = _other(sess.pending["side"])
        if move.side != want:
            raise _bad(f"reply on {want}")
        a = 0 if move.side == "t1" else 1
        tree = sess.trees[a]
        if not 0 <= move.node < tree.size:
            raise _bad(f"node {move.node} outside 0..{tree.size - 1}")
        engine_side = 0 if sess.pending["side"] == "t1" else 1
        pair = (sess.pending["node"], move.node) if engine_side == 0 else (move.node, sess.pending["node"])
        sess.pending = None
    sess.pairs.append(pair)
    _after_round(sess)


# --- hints ---------------------------------------------------------------------


def _hint(sess: _Session) -> dict:
    if sess.status == "finished":
        return {"candidates": []}
    if sess.status == "awaiting-colouring":
        return {
            "candidates": [],
            "note": "colouring round: submit a rooted colouring of your tree",
        }
    if sess.config.human == "duplicator":
        return _hint_duplicator(sess)
    return _hint_spoiler(sess)


def _hint_duplicator(sess: _Session) -> dict:
    if sess.pending is None or sess.pending["type"] != "pebble":
        return {"candidates": []}
    side = _other(sess.pending["side"])
    out = []
    if sess.solver is not None:
        history = tuple(sess.config.designated) + tuple(sess.pairs)
        try:
            good = set(
                sess.solver.corresponding(history, sess.pending["node"], sess.pending["side"])
            )
        except ConfigurationNotWinnableError:
            good = set()
        tree = sess.trees[0 if side == "t1" else 1]
        for node in range(tree.size):
            out.append({"side": side, "node": node, "preserves_win": node in good})
    return {"candidates": out, "reply_to": sess.pending}


def _hint_spoiler(sess: _Session) -> dict:
    """Candidates with the flags the strategy arithmetic assigns them."""
    scale = getattr(sess.engine, "scale", None)
    candidates = []
    pairs = [(sess.trees[0].root, sess.trees[1].root)] + list(sess.pairs)
    s_next = len(pairs)
    anchors: list[bool] | None = None
    if scale is not None:
        # a threat is live only against a pair whose anchor is off the root
        anchors = [c != 0 for c in sess.engine.class_of]
    for side_name, a in (("t1", 0), ("t2", 1)):
        tree = sess.trees[a]
        for node in range(tree.size):
            entry: dict = {"side": side_name, "node": node}
            if scale is not None:
                close_list = [
                    i
                    for i, pair in enumerate(pairs)
                    if distance(tree, node, pair[a]) <= scale.close_threshold(i, s_next)
                ]
                threat_list = [
                    i
                    for i in range(len(pairs))
                    if anchors[i]
                    and abs(
                        centered_residue(
                            tree.depths[node] - tree.depths[pairs[i][a]], scale.D
                        )
                    )
                    <= scale.close_threshold(i, s_next)
                ]
                entry["close"] = close_list
                entry["threatens"] = threat_list
                try:
                    entry["case"] = sess.engine.preview(side_name, node).case
                except EhrlabError as exc:
                    entry["case"] = f"error: {exc}"
            candidates.append(entry)
    out: dict = {"candidates": candidates}
    if anchors is not None:
        out["anchors"] = anchors
    return out


# --- public state ----------------------------------------------------------------


def _tail_of(col: Colouring | None) -> dict | None:
    if col is None or not col.has_tail:
        return None
    return {"prefix": list(col.tail_prefix), "period": list(col.tail_period)}


def _transcript(sess: _Session) -> dict:
    return {
        "kind": sess.config.kind,
        "r": sess.palette.r,
        "k": sess.config.k,
        "m": sess.config.m,
        "t1": serialize_tree(sess.trees[0], sess.cols[0]) if sess.cols[0] else sess.config.t1,
        "t2": serialize_tree(sess.trees[1], sess.cols[1]) if sess.cols[1] else sess.config.t2,
        "colours1": list(sess.cols[0].values) if sess.cols[0] else None,
        "colours2": list(sess.cols[1].values) if sess.cols[1] else None,
        "tail1": _tail_of(sess.cols[0]),
        "tail2": _tail_of(sess.cols[1]),
        "designated": [list(p) for p in sess.config.designated],
        "pairs": [list(p) for p in sess.pairs],
    }


def _public_state(sess: _Session) -> dict:
    cfg = sess.config
    return {
        "id": sess.id,
        "kind": cfg.kind,
        "status": sess.status,
        "human": cfg.human,
        "policy": cfg.policy,
        "preset": cfg.preset,
        "k": cfg.k,
        "m": cfg.m,
        "r": sess.palette.r,
        "rounds_total": sess.rounds_total,
        "rounds_played": sess.rounds_played,
        "t1": cfg.t1,
        "t2": cfg.t2,
        "colours1": list(sess.cols[0].values) if sess.cols[0] else None,
        "colours2": list(sess.cols[1].values) if sess.cols[1] else None,
        "designated": [list(p) for p in cfg.designated],
        "pairs": [list(p) for p in sess.pairs],
        "pending": sess.pending,
        "monitor": sess.monitor,
        "winner": sess.winner,
        "problems": sess.problems,
        "transcript": _transcript(sess),
    }


# --- app ---------------------------------------------------------------------------


def create_app() -> FastAPI:
    app = FastAPI(title="ehrlab sessions")
    store = _Store()

    @app.post("/sessions")
    def create_session(cfg: SessionConfig):
        try:
            sess = store.add(lambda sid: _make_session(sid, cfg))
        except GuardExceededError as exc:
            raise HTTPException(status_code=422, detail=f"refused: {exc}")
        except StrategyInvariantError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except EhrlabError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return _public_state(sess)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return _public_state(store.get(sid))

    @app.post("/sessions/{sid}/moves")
    def submit_move(sid: str, move: MoveBody):
        sess = store.get(sid)
        if not sess.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="another move is in flight")
        try:
            if sess.status == "finished":
                raise HTTPException(status_code=409, detail="session finished")
            if move.type == "colouring":
                _apply_colouring(sess, move)
            else:
                _apply_pebble(sess, move)
            return _public_state(sess)
        except GuardExceededError as exc:
            raise HTTPException(status_code=422, detail=f"refused: {exc}")
        except EhrlabError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        finally:
            sess.lock.release()

    @app.get("/sessions/{sid}/hint")
    def hint(sid: str):
        return _hint(store.get(sid))

    # the UI is served by the same process; the frontend build drops its
    # bundle next to this module under webui/
    from pathlib import Path

    webui = Path(__file__).parent / "webui"
    if webui.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(webui), html=True), name="ui")

    return app
