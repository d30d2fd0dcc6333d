"""Constructive Duplicator strategies for the pebble phase.

Two engines live here.

ClusterEngine answers moves on a pair of depth-m truncations whose roots
realize the same depth-m type.  It matches branches of equal type on demand
and recurses; replies are tagged B1 (root), B2 (inside an already matched
branch pair) or B3 (a fresh branch pair had to be matched first).

MasterEngine answers moves on a pair of deep trees whose top levels form
paths, playing against depth markers that repeat with period D below the
fixed region.  Every pebble is tethered to an auxiliary anchor pair and the
actual reply is found inside a small distance-preserving subgame around the
anchors, solved exactly.  Moves are tagged CLOSE, T1, T2, T3, NT1 or NT2
according to how the new pebble relates to existing pebbles and anchors.

All thresholds scale with a single magnitude M.  The standard binding uses
M = 3**(k+2); the surrogate presets shrink M so that exhaustive play and
exact subgame solving stay cheap while every threshold stays integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .colouring import AugmentedPalette, Colouring, enhance, require_same_palette
from .errors import (
    EhrlabError,
    LassoUnsupportedError,
    StrategyInvariantError,
)
from .games import PairSolver, ehr_check
from .trees import RootedTree, ancestor_at, distance, is_ancestor, truncated_subtree_with_map
from .types_engine import TypeTable, census, compute_types

CLOSE = "CLOSE"
T1 = "T1"
T2 = "T2"
T3 = "T3"
NT1 = "NT1"
NT2 = "NT2"
B1 = "B1"
B2 = "B2"
B3 = "B3"

MASTER_CASES = (CLOSE, T1, T2, T3, NT1, NT2)
CLUSTER_CASES = (B1, B2, B3)


def centered_residue(value: int, modulus: int) -> int:
    """Residue of value mod modulus shifted into (-modulus/2, modulus/2]."""
    if modulus <= 0:
        raise EhrlabError(f"modulus must be positive, got {modulus}")
    z = value % modulus
    if z > modulus // 2:
        z -= modulus
    return z


@dataclass(frozen=True)
class StrategyScale:
    """Threshold magnitudes for a k-round master strategy.

    M is the tether length unit, D the marker period and D0 the extent of the
    fixed marker region.  D is always 4*M; D0 must be a multiple of D and at
    least 2*D; M must be divisible by 3**k so every per-round threshold is an
    integer.
    """

    k: int
    M: int
    D: int
    D0: int

    def __post_init__(self):
        if self.k < 1:
            raise EhrlabError(f"k must be >= 1, got {self.k}")
        if self.M < 1 or self.M % 3**self.k != 0:
            raise EhrlabError(f"M must be a positive multiple of 3**k, got {self.M}")
        if self.D != 4 * self.M:
            raise EhrlabError(f"D must equal 4*M, got D={self.D} with M={self.M}")
        if self.D0 % self.D != 0 or self.D0 < 2 * self.D:
            raise EhrlabError(
                f"D0 must be a multiple of D no smaller than 2*D, got D0={self.D0}"
            )

    @classmethod
    def standard(cls, k: int) -> "StrategyScale":
        m = 3 ** (k + 2)
        return cls(k=k, M=m, D=4 * m, D0=100 * m)

    @classmethod
    def surrogate(cls, k: int) -> "StrategyScale":
        presets = {
            1: (3, 12, 48),
            2: (9, 36, 144),
            3: (27, 108, 216),
        }
        if k not in presets:
            raise EhrlabError(f"surrogate presets exist for k in 1..3, got {k}")
        m, d, d0 = presets[k]
        return cls(k=k, M=m, D=d, D0=d0)

    def close_threshold(self, i: int, j: int) -> int:
        """Two pebbles with indices i, j count as close within this distance."""
        return 2 * self.M // 3 ** max(i, j)

    def tether_distance(self, s: int) -> int:
        """Distance from a round-s pebble up to a freshly created anchor."""
        return self.M // 3**s

    def tether_lower(self, i: int) -> int:
        return self.M // 3**i

    def tether_upper(self, i: int) -> int:
        return self.M - self.M // 3**i

    def augmented(self, base) -> AugmentedPalette:
        return AugmentedPalette(base, self.D, self.D0)


def close(k: int, i: int, j: int, rho: int) -> bool:
    """Closeness of pebbles i and j at distance rho, standard binding."""
    return rho <= StrategyScale.standard(k).close_threshold(i, j)


def threatens(
    k: int,
    i: int,
    j: int,
    depth_i: int,
    depth_j: int,
    anchor_at_root: bool = False,
    D: int | None = None,
) -> bool:
    """Depth-congruence threat window between pebbles i and j, standard
    magnitude binding.  A threat is dead whenever the anchor of the
    earlier-indexed pebble is the root itself (anchor_at_root)."""
    if anchor_at_root:
        return False
    scale = StrategyScale.standard(k)
    period = scale.D if D is None else D
    delta = centered_residue(depth_i - depth_j, period)
    return abs(delta) <= scale.close_threshold(i, j)


# ---------------------------------------------------------------------------
# branch-matching engine


@dataclass
class ClusterMove:
    case: str
    side: str
    node: int
    reply: int
    bindings: tuple[tuple[int, int], ...] = ()


class ClusterEngine:
    """Replies on two depth-m truncations with equal root types.

    Branch pairs of equal child type are matched lazily as moves descend into
    them; within a matched pair the same matching recurses one level down.
    The reply to a node is the like-positioned node of its matched chain.
    """

    def __init__(
        self,
        t1: RootedTree,
        s1: Colouring,
        t2: RootedTree,
        s2: Colouring,
        m: int,
        k: int,
        table: TypeTable | None = None,
    ):
        if t1.lasso is not None or t2.lasso is not None:
            raise LassoUnsupportedError("the branch-matching engine needs finite trees")
        s1.validate_for(t1)
        s2.validate_for(t2)
        require_same_palette(s1, s2)
        if k < 1:
            raise EhrlabError(f"k must be >= 1, got {k}")
        self.m, self.k = m, k
        self.trees = (t1, t2)
        self.table = table if table is not None else TypeTable(s1.palette)
        self.assign = (
            compute_types(t1, s1, m, k, self.table),
            compute_types(t2, s2, m, k, self.table),
        )
        if self.assign[0].type_of(t1.root) != self.assign[1].type_of(t2.root):
            raise StrategyInvariantError("root types differ at the requested depth")
        # context (u1, u2) -> per-side child matching, mutually inverse
        self._match: dict[tuple[int, int], tuple[dict, dict]] = {}
        self.rounds = 0
        self.history: list[ClusterMove] = []

    def clone(self) -> "ClusterEngine":
        twin = object.__new__(ClusterEngine)
        for name in ("m", "k", "trees", "table", "assign"):
            setattr(twin, name, getattr(self, name))
        twin._match = {ctx: (dict(f), dict(b)) for ctx, (f, b) in self._match.items()}
        twin.rounds = self.rounds
        twin.history = list(self.history)
        return twin

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """Played (first tree, second tree) pairs, excluding the root pair."""
        return [
            (mv.node, mv.reply) if mv.side == "t1" else (mv.reply, mv.node)
            for mv in self.history
        ]

    def _toward(self, side: int, top: int, node: int) -> int:
        """Child of `top` on the path down to `node`."""
        tree = self.trees[side]
        hop = tree.depths[node] - tree.depths[top] - 1
        child = ancestor_at(tree, node, hop)
        if child is None or tree.parents[child] != top:
            raise EhrlabError(f"node {node} does not sit below {top}")
        return child

    def reply(self, side: str, node: int) -> ClusterMove:
        if self.rounds >= self.k:
            raise EhrlabError(f"all {self.k} rounds have been played")
        if side not in ("t1", "t2"):
            raise EhrlabError(f"side must be 't1' or 't2', got {side!r}")
        a = 0 if side == "t1" else 1
        b = 1 - a
        tree_a, tree_b = self.trees[a], self.trees[b]
        tree_a.check_node(node)
        if tree_a.depths[node] > self.m:
            raise EhrlabError(
                f"node {node} lies below depth {self.m}, outside the playing field"
            )
        ctx = (self.trees[0].root, self.trees[1].root)
        bindings: list[tuple[int, int]] = []
        fresh = False
        x = node
        while True:
            top_a = ctx[a]
            if x == top_a:
                reply = ctx[b]
                break
            level = self.m - tree_a.depths[top_a]
            c_a = self._toward(a, top_a, x)
            maps = self._match.setdefault(ctx, ({}, {}))
            partner = maps[a].get(c_a)
            if partner is None:
                fresh = True
                want = self.assign[a].type_of(c_a, level - 1)
                taken = set(maps[a].values())
                cands = [
                    c
                    for c in tree_b.children[ctx[b]]
                    if c not in taken and self.assign[b].type_of(c, level - 1) == want
                ]
                if not cands:
                    raise StrategyInvariantError(
                        f"no unmatched branch of the required type under node {ctx[b]}"
                    )
                partner = min(cands)
                maps[a][c_a] = partner
                maps[b][partner] = c_a
                bindings.append((c_a, partner) if a == 0 else (partner, c_a))
            ctx = (c_a, partner) if a == 0 else (partner, c_a)
        if node == tree_a.root:
            case = B1
        elif fresh:
            case = B3
        else:
            case = B2
        move = ClusterMove(case, side, node, reply, tuple(bindings))
        self.rounds += 1
        self.history.append(move)
        return move


def cluster_reply(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    m: int,
    k: int,
    history,
    side: str,
    node: int,
) -> ClusterMove:
    """One-shot convenience: replay `history` ([(side, node), ...]) through a
    fresh engine, then answer the new move."""
    engine = ClusterEngine(t1, s1, t2, s2, m, k)
    for past_side, past_node in history:
        engine.reply(past_side, past_node)
    return engine.reply(side, node)


# ---------------------------------------------------------------------------
# master engine


@dataclass
class MoveRecord:
    case: str
    side: str
    pair_index: int
    node: int
    reply: int
    class_id: int
    created_class: bool
    anchor: tuple[int, int]
    delta: int | None = None
    t_star: int | None = None

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "side": self.side,
            "pairIndex": self.pair_index,
            "node": self.node,
            "reply": self.reply,
            "classId": self.class_id,
            "createdClass": self.created_class,
            "anchor": list(self.anchor),
            "delta": self.delta,
            "tStar": self.t_star,
        }


class _AuxClass:
    """One anchor pair with its local subgame (both subtrees cut at depth M)."""

    __slots__ = ("anchors", "sub", "maps", "inv", "solver", "designated")

    def __init__(self, anchors, sub, maps, inv, solver):
        self.anchors = anchors
        self.sub = sub
        self.maps = maps
        self.inv = inv
        self.solver = solver
        self.designated: list[tuple[int, int]] = []

    def fork(self) -> "_AuxClass":
        twin = _AuxClass(self.anchors, self.sub, self.maps, self.inv, self.solver)
        twin.designated = list(self.designated)
        return twin


@dataclass
class _Plan:
    case: str
    side: str
    node: int
    reply: int
    class_id: int
    created_class: bool
    new_class: _AuxClass | None
    local_pair: tuple[int, int]
    delta: int | None = None
    t_star: int | None = None


class MasterEngine:
    """Scale-driven Duplicator for the pebble phase on two deep trees.

    Requirements checked at construction: both trees are finite, their top
    D0/2 levels form paths, and (unless require_types_win=False) the two
    marker-enhanced colourings realize identical depth-M type censuses
    truncated at k.  Replies never mutate state on failure.
    """

    def __init__(
        self,
        t1: RootedTree,
        s1: Colouring,
        t2: RootedTree,
        s2: Colouring,
        scale: StrategyScale,
        table: TypeTable | None = None,
        subgame_guard: int = 250_000,
        require_types_win: bool = True,
    ):
        if t1.lasso is not None or t2.lasso is not None:
            raise LassoUnsupportedError("the master engine needs finite trees")
        require_same_palette(s1, s2)
        for tree, col in ((t1, s1), (t2, s2)):
            col.validate_for(tree)
            if not col.is_rooted(tree):
                raise EhrlabError("base colourings must be rooted")
        self.scale = scale
        self.trees = (t1, t2)
        self.base = (s1, s2)
        self.subgame_guard = subgame_guard
        self.aug = scale.augmented(s1.palette)
        self.paths = (
            _initial_path(t1, scale.D0 // 2),
            _initial_path(t2, scale.D0 // 2),
        )
        self.enh = (enhance(t1, s1, self.aug), enhance(t2, s2, self.aug))
        self.table = table if table is not None else TypeTable(self.aug)
        self.assign = (
            compute_types(t1, self.enh[0], scale.M, scale.k, self.table),
            compute_types(t2, self.enh[1], scale.M, scale.k, self.table),
        )
        if require_types_win:
            c1 = census(t1, self.enh[0], scale.M, scale.k, assignment=self.assign[0])
            c2 = census(t2, self.enh[1], scale.M, scale.k, assignment=self.assign[1])
            if c1.counts != c2.counts:
                raise StrategyInvariantError(
                    "the enhanced depth-M censuses differ; the master strategy "
                    "needs a types-game win at this scale"
                )
        self.pairs: list[tuple[int, int]] = [(t1.root, t2.root)]
        self.class_of: list[int] = [0]
        self.records: list[MoveRecord] = []
        self.classes: list[_AuxClass] = [self._make_class((t1.root, t2.root))]
        self._plan_cache: tuple[str, int, _Plan] | None = None

    # -- construction helpers ----------------------------------------------

    def _make_class(self, anchors: tuple[int, int]) -> _AuxClass:
        subs, maps, invs = [], [], []
        for side in (0, 1):
            sub, col, mapping = truncated_subtree_with_map(
                self.trees[side], anchors[side], self.scale.M, self.enh[side]
            )
            subs.append((sub, col))
            maps.append(mapping)
            invs.append({loc: glob for glob, loc in mapping.items()})
        solver = PairSolver(
            subs[0][0],
            subs[0][1],
            subs[1][0],
            subs[1][1],
            self.scale.k,
            distance_required=True,
            node_product_guard=self.subgame_guard,
        )
        return _AuxClass(
            anchors,
            (subs[0][0], subs[1][0]),
            (maps[0], maps[1]),
            (invs[0], invs[1]),
            solver,
        )

    def clone(self) -> "MasterEngine":
        twin = object.__new__(MasterEngine)
        for name in (
            "scale",
            "trees",
            "base",
            "subgame_guard",
            "aug",
            "paths",
            "enh",
            "table",
            "assign",
        ):
            setattr(twin, name, getattr(self, name))
        twin.pairs = list(self.pairs)
        twin.class_of = list(self.class_of)
        twin.records = list(self.records)
        twin.classes = [c.fork() for c in self.classes]
        twin._plan_cache = None
        return twin

    # -- public queries ------------------------------------------------------

    @property
    def rounds_played(self) -> int:
        return len(self.pairs) - 1

    def snapshot(self) -> dict:
        return {
            "k": self.scale.k,
            "roundsPlayed": self.rounds_played,
            "pairs": [list(p) for p in self.pairs],
            "classOf": list(self.class_of),
            "anchors": [list(c.anchors) for c in self.classes],
            "records": [r.as_dict() for r in self.records],
        }

    def preview(self, side: str, node: int) -> MoveRecord:
        """Classify and answer a move without committing it."""
        plan = self._compute(side, node)
        self._plan_cache = (side, node, plan)
        return self._record_of(plan)

    def reply(self, side: str, node: int) -> MoveRecord:
        if self._plan_cache is not None and self._plan_cache[:2] == (side, node):
            plan = self._plan_cache[2]
        else:
            plan = self._compute(side, node)
        self._plan_cache = None
        return self._apply(plan)

    # -- the case analysis ---------------------------------------------------

    def _compute(self, side: str, node: int) -> _Plan:
        if side not in ("t1", "t2"):
            raise EhrlabError(f"side must be 't1' or 't2', got {side!r}")
        if self.rounds_played >= self.scale.k:
            raise EhrlabError(f"all {self.scale.k} rounds have been played")
        a = 0 if side == "t1" else 1
        tree_a = self.trees[a]
        tree_a.check_node(node)
        s_next = self.rounds_played + 1
        scale = self.scale
        depth_x = tree_a.depths[node]

        close_set = [
            i
            for i, pair in enumerate(self.pairs)
            if distance(tree_a, node, pair[a]) <= scale.close_threshold(i, s_next)
        ]
        if close_set:
            classes = {self.class_of[i] for i in close_set}
            if len(classes) > 1:
                raise StrategyInvariantError(
                    "a new pebble is close to pebbles of distinct anchor classes"
                )
            cid = classes.pop()
            reply, local_pair = self._class_reply(cid, a, node)
            return _Plan(CLOSE, side, node, reply, cid, False, None, local_pair)

        threat_set = [
            i
            for i in range(len(self.pairs))
            if self.class_of[i] != 0
            and abs(
                centered_residue(depth_x - tree_a.depths[self.pairs[i][a]], scale.D)
            )
            <= scale.close_threshold(i, s_next)
        ]
        if threat_set:
            alpha = min(
                threat_set,
                key=lambda i: (tree_a.depths[self.pairs[i][a]], self.pairs[i][a], i),
            )
            cls = self.classes[self.class_of[alpha]]
            pebble = self.pairs[alpha][a]
            anchor_a = cls.anchors[a]
            if not is_ancestor(tree_a, anchor_a, pebble):
                raise StrategyInvariantError("a pebble drifted off its anchor chain")
            rho = tree_a.depths[pebble] - tree_a.depths[anchor_a]
            delta = centered_residue(depth_x - tree_a.depths[pebble], scale.D)
            t_star = rho + delta
            w = ancestor_at(tree_a, node, t_star) if 0 <= t_star <= depth_x else None
            if w is None:
                return self._plan_t3(side, a, node, delta, t_star)
            owner = self._anchor_class(a, w)
            if owner is not None:
                reply, local_pair = self._class_reply(owner, a, node)
                return _Plan(
                    T1, side, node, reply, owner, False, None, local_pair, delta, t_star
                )
            return self._plan_fresh(T2, side, a, node, w, delta, t_star)

        g = scale.tether_distance(s_next)
        if depth_x < g:
            raise StrategyInvariantError(
                "a shallow pebble escaped the close case; the top-path "
                "hypothesis must have been violated"
            )
        w = ancestor_at(tree_a, node, g)
        assert w is not None
        owner = self._anchor_class(a, w)
        if owner is not None:
            reply, local_pair = self._class_reply(owner, a, node)
            return _Plan(NT1, side, node, reply, owner, False, None, local_pair)
        return self._plan_fresh(NT2, side, a, node, w, None, None)

    def _anchor_class(self, side: int, node: int) -> int | None:
        for cid, cls in enumerate(self.classes):
            if cls.anchors[side] == node:
                return cid
        return None

    # corresponding-node tie-break: minimal depth, then minimal arena id

    def _class_reply(self, cid: int, a: int, node: int) -> tuple[int, tuple[int, int]]:
        """Corresponding node for a pebble joining class `cid` from side a."""
        cls = self.classes[cid]
        b = 1 - a
        loc = cls.maps[a].get(node)
        if loc is None:
            raise StrategyInvariantError(
                f"pebble {node} lands outside the subgame of its anchor class"
            )
        candidates = cls.solver.corresponding(
            cls.designated, loc, side="t1" if a == 0 else "t2"
        )
        pick, reply = _best_candidate(cls, b, candidates)
        if pick is None:
            raise StrategyInvariantError(
                "the anchor-class subgame offers no corresponding node"
            )
        local_pair = (loc, pick) if a == 0 else (pick, loc)
        return reply, local_pair

    def _plan_t3(
        self, side: str, a: int, node: int, delta: int, t_star: int
    ) -> _Plan:
        b = 1 - a
        depth_x = self.trees[a].depths[node]
        if depth_x >= len(self.paths[b]):
            raise StrategyInvariantError(
                "a threatened pebble with no anchor candidate sits below the "
                "top path region"
            )
        reply = self.paths[b][depth_x]
        cls = self.classes[0]
        loc_a = cls.maps[a].get(node)
        loc_b = cls.maps[b].get(reply)
        if loc_a is None or loc_b is None:
            raise StrategyInvariantError("a top-path pebble escapes the root subgame")
        local_pair = (loc_a, loc_b) if a == 0 else (loc_b, loc_a)
        if not cls.solver.is_winnable(cls.designated + [local_pair]):
            raise StrategyInvariantError(
                "the same-depth path reply leaves the root subgame unwinnable"
            )
        return _Plan(T3, side, node, reply, 0, False, None, local_pair, delta, t_star)

    def _plan_fresh(
        self,
        case: str,
        side: str,
        a: int,
        node: int,
        w: int,
        delta: int | None,
        t_star: int | None,
    ) -> _Plan:
        b = 1 - a
        want = self.assign[a].type_of(w)
        used = {cls.anchors[b] for cls in self.classes}
        tree_b = self.trees[b]
        cands = [
            v
            for v in range(tree_b.size)
            if v not in used and self.assign[b].type_of(v) == want
        ]
        if not cands:
            raise StrategyInvariantError(
                "no fresh anchor partner realizes the required depth-M type"
            )
        v = min(cands, key=lambda u: (tree_b.depths[u], u))
        anchors = (w, v) if a == 0 else (v, w)
        cls = self._make_class(anchors)
        cid = len(self.classes)
        loc = cls.maps[a].get(node)
        if loc is None:
            raise StrategyInvariantError(
                "a fresh anchor does not cover its own pebble"
            )
        candidates = cls.solver.corresponding([], loc, side="t1" if a == 0 else "t2")
        pick, reply = _best_candidate(cls, b, candidates)
        if pick is None:
            raise StrategyInvariantError(
                "the fresh anchor-class subgame offers no corresponding node"
            )
        local_pair = (loc, pick) if a == 0 else (pick, loc)
        return _Plan(case, side, node, reply, cid, True, cls, local_pair, delta, t_star)

    # -- committing -----------------------------------------------------------

    def _record_of(self, plan: _Plan) -> MoveRecord:
        anchors = (
            plan.new_class.anchors
            if plan.new_class is not None
            else self.classes[plan.class_id].anchors
        )
        return MoveRecord(
            case=plan.case,
            side=plan.side,
            pair_index=self.rounds_played + 1,
            node=plan.node,
            reply=plan.reply,
            class_id=plan.class_id,
            created_class=plan.created_class,
            anchor=anchors,
            delta=plan.delta,
            t_star=plan.t_star,
        )

    def _apply(self, plan: _Plan) -> MoveRecord:
        record = self._record_of(plan)
        if plan.created_class:
            assert plan.new_class is not None
            self.classes.append(plan.new_class)
        cls = self.classes[plan.class_id]
        cls.designated.append(plan.local_pair)
        a = 0 if plan.side == "t1" else 1
        pair = (plan.node, plan.reply) if a == 0 else (plan.reply, plan.node)
        self.pairs.append(pair)
        self.class_of.append(plan.class_id)
        self.records.append(record)
        return record


def _best_candidate(cls: _AuxClass, side: int, candidates) -> tuple[int | None, int | None]:
    """Deterministic choice among subgame candidates: minimal subgame depth,
    then minimal arena id.  Candidates with no arena counterpart are skipped."""
    sub = cls.sub[side]
    best_key = None
    pick = reply = None
    for loc in candidates:
        arena = cls.inv[side].get(loc)
        if arena is None:
            continue
        key = (sub.depths[loc], arena)
        if best_key is None or key < best_key:
            best_key, pick, reply = key, loc, arena
    return pick, reply


def _initial_path(tree: RootedTree, limit: int) -> list[int]:
    """The unique node at each depth 0..limit; raises if the top levels
    branch or the tree is too shallow."""
    rows: list[list[int]] = [[] for _ in range(limit + 1)]
    for v in range(tree.size):
        d = tree.depths[v]
        if d <= limit:
            rows[d].append(v)
    out = []
    for d, row in enumerate(rows):
        if len(row) != 1:
            raise StrategyInvariantError(
                f"the top {limit} levels must form a path; depth {d} holds "
                f"{len(row)} nodes"
            )
        out.append(row[0])
    return out


def master_reply(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    scale: StrategyScale,
    history,
    side: str,
    node: int,
) -> MoveRecord:
    """One-shot convenience: replay `history` ([(side, node), ...]) through a
    fresh engine, then answer the new move."""
    engine = MasterEngine(t1, s1, t2, s2, scale)
    for past_side, past_node in history:
        engine.reply(past_side, past_node)
    return engine.reply(side, node)


# ---------------------------------------------------------------------------
# invariants


def check_master_invariants(engine: MasterEngine) -> list[str]:
    """Violations of the six running conditions (empty list = all hold).

    C1 anchor pairs coincide on one side iff they coincide on the other;
    C2 anchors of one class share their depth-M enhanced type;
    C3 every pebble hangs below its anchor, at the same distance on both
       sides, within [M/3**i, M - M/3**i] (lower bound waived at the root);
    C4 closeness agrees across the two trees and close pebbles share a class
       and their exact distances;
    C5 every anchor class remains winnable for its designated pebbles;
    C6 threat status agrees across the two trees, and a threatening pair
       either has its newer pebble anchored at the root or congruent anchor
       depths mod D on both sides.
    """
    scale = engine.scale
    t1, t2 = engine.trees
    out: list[str] = []

    for c in range(len(engine.classes)):
        for d in range(c + 1, len(engine.classes)):
            same0 = engine.classes[c].anchors[0] == engine.classes[d].anchors[0]
            same1 = engine.classes[c].anchors[1] == engine.classes[d].anchors[1]
            if same0 or same1:
                out.append(f"C1: classes {c} and {d} share an anchor on one side")

    for cid, cls in enumerate(engine.classes):
        tau1 = engine.assign[0].type_of(cls.anchors[0])
        tau2 = engine.assign[1].type_of(cls.anchors[1])
        if tau1 != tau2:
            out.append(f"C2: class {cid} anchors realize different types")

    for i in range(1, len(engine.pairs)):
        cid = engine.class_of[i]
        cls = engine.classes[cid]
        rhos = []
        for side, tree in ((0, t1), (1, t2)):
            p = engine.pairs[i][side]
            anchor = cls.anchors[side]
            if not is_ancestor(tree, anchor, p):
                out.append(f"C3: pair {i} sits off its anchor chain on side {side + 1}")
                continue
            rho = tree.depths[p] - tree.depths[anchor]
            rhos.append(rho)
            if rho > scale.tether_upper(i):
                out.append(f"C3: pair {i} tether too long on side {side + 1}")
            if cid != 0 and rho < scale.tether_lower(i):
                out.append(f"C3: pair {i} tether too short on side {side + 1}")
        if len(rhos) == 2 and rhos[0] != rhos[1]:
            out.append(f"C3: pair {i} tether lengths differ across the trees")

    n = len(engine.pairs)
    for i in range(n):
        for j in range(i + 1, n):
            r1 = distance(t1, engine.pairs[i][0], engine.pairs[j][0])
            r2 = distance(t2, engine.pairs[i][1], engine.pairs[j][1])
            bound = scale.close_threshold(i, j)
            close1, close2 = r1 <= bound, r2 <= bound
            if close1 != close2:
                out.append(f"C4: pairs {i},{j} are close in one tree only")
            elif close1:
                if engine.class_of[i] != engine.class_of[j]:
                    out.append(f"C4: close pairs {i},{j} sit in different classes")
                if r1 != r2:
                    out.append(f"C4: close pairs {i},{j} have different distances")

    for cid, cls in enumerate(engine.classes):
        if not cls.solver.is_winnable(cls.designated):
            out.append(f"C5: class {cid} is no longer winnable")

    for i in range(1, n):
        for j in range(i + 1, n):
            anc_low = engine.classes[engine.class_of[i]].anchors
            window = scale.close_threshold(i, j)
            threat = []
            for side, tree in ((0, t1), (1, t2)):
                if anc_low[side] == tree.root:
                    threat.append(False)
                    continue
                gap = centered_residue(
                    tree.depths[engine.pairs[i][side]]
                    - tree.depths[engine.pairs[j][side]],
                    scale.D,
                )
                threat.append(abs(gap) <= window)
            if threat[0] != threat[1]:
                out.append(f"C6: pairs {i},{j} threaten in one tree only")
            if not (threat[0] and threat[1]):
                continue
            if engine.class_of[j] == 0:
                continue
            anc_i = engine.classes[engine.class_of[i]].anchors
            anc_j = engine.classes[engine.class_of[j]].anchors
            for side, tree in ((0, t1), (1, t2)):
                gap = tree.depths[anc_i[side]] - tree.depths[anc_j[side]]
                if gap % scale.D != 0:
                    out.append(
                        f"C6: threatening pairs {i},{j} have incongruent anchor "
                        f"depths on side {side + 1}"
                    )

    return out


@dataclass
class WinReport:
    """Invariant status plus the referee's view of the final position."""

    invariant_violations: list[str]
    enhanced_violations: list[str]
    base_violations: list[str]

    @property
    def ok(self) -> bool:
        return not (
            self.invariant_violations or self.enhanced_violations or self.base_violations
        )

    def to_lines(self) -> list[str]:
        out = []
        out.append(f"invariants: {'ok' if not self.invariant_violations else 'VIOLATED'}")
        out.extend(f"  {v}" for v in self.invariant_violations)
        out.append(
            f"win conditions (enhanced): {'ok' if not self.enhanced_violations else 'VIOLATED'}"
        )
        out.extend(f"  {v}" for v in self.enhanced_violations)
        out.append(
            f"win conditions (base): {'ok' if not self.base_violations else 'VIOLATED'}"
        )
        out.extend(f"  {v}" for v in self.base_violations)
        return out


def invariants_imply_win(engine: MasterEngine) -> WinReport:
    """Check the running conditions and, independently, hand the position to
    the referee under both the enhanced and the base colourings."""
    t1, t2 = engine.trees
    played = tuple(engine.pairs[1:])
    return WinReport(
        invariant_violations=check_master_invariants(engine),
        enhanced_violations=ehr_check(t1, engine.enh[0], t2, engine.enh[1], played),
        base_violations=ehr_check(t1, engine.base[0], t2, engine.base[1], played),
    )


# ---------------------------------------------------------------------------
# playout drivers


@dataclass
class PlayoutReport:
    playouts: int = 0
    failures: int = 0
    case_counts: dict = field(default_factory=dict)
    first_failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def _absorb(self, records, problems: list[str], trace) -> None:
        self.playouts += 1
        for rec in records:
            self.case_counts[rec.case] = self.case_counts.get(rec.case, 0) + 1
        if problems:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = f"moves {trace}: " + "; ".join(problems)


def _finish_playout(engine: MasterEngine) -> list[str]:
    report = invariants_imply_win(engine)
    return (
        report.invariant_violations
        + report.enhanced_violations
        + report.base_violations
    )


def exhaustive_master_playouts(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    scale: StrategyScale,
    move_filter=None,
    check_each_round: bool = True,
) -> PlayoutReport:
    """Play every Spoiler move sequence (optionally restricted by
    move_filter(engine, side, node) -> bool) and verify invariants and win
    conditions along the way."""
    base = MasterEngine(t1, s1, t2, s2, scale)
    report = PlayoutReport()

    def moves_of(engine):
        for side, tree in (("t1", t1), ("t2", t2)):
            for node in range(tree.size):
                if move_filter is None or move_filter(engine, side, node):
                    yield side, node

    def walk(engine, trace):
        if engine.rounds_played == scale.k:
            report._absorb(engine.records, _finish_playout(engine), trace)
            return
        for side, node in moves_of(engine):
            twin = engine.clone()
            problems: list[str] = []
            try:
                twin.reply(side, node)
            except EhrlabError as exc:
                problems.append(f"engine failure: {exc}")
            if not problems and check_each_round:
                problems = _finish_playout(twin)
            if problems:
                report._absorb(twin.records, problems, trace + [(side, node)])
                continue
            walk(twin, trace + [(side, node)])

    walk(base, [])
    return report


def random_master_playouts(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    scale: StrategyScale,
    plays: int,
    rng,
    check_each_round: bool = True,
) -> PlayoutReport:
    """Random Spoiler against the engine, `plays` full games."""
    base = MasterEngine(t1, s1, t2, s2, scale)
    report = PlayoutReport()
    sizes = {"t1": t1.size, "t2": t2.size}
    for _ in range(plays):
        engine = base.clone()
        trace: list[tuple[str, int]] = []
        problems: list[str] = []
        for _round in range(scale.k):
            side = rng.choice(("t1", "t2"))
            node = rng.randrange(sizes[side])
            trace.append((side, node))
            try:
                engine.reply(side, node)
            except EhrlabError as exc:
                problems.append(f"engine failure: {exc}")
                break
            if check_each_round:
                problems = _finish_playout(engine)
                if problems:
                    break
        if not problems:
            problems = _finish_playout(engine)
        report._absorb(engine.records, problems, trace)
    return report
