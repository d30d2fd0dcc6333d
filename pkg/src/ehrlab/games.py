"""Game verdicts and exact solvers.

Three games on coloured rooted trees:

* the types game — one census exchange; Duplicator wins iff the depth-m type
  censuses truncated at k coincide;
* the pebble phase of the set-round game — k rounds of node picking; the win
  conditions relate parenthood, colours and equality across the two trees
  (the roots form an implicit 0th pair);
* the distance-preserving variant — same, plus exact graph-distance equality,
  and with optional designated pairs fixed before play.

Solvers are exact memoized minimax over unordered pair multisets; they are
deliberately small-scale tools guarded by a node-count product bound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .colouring import Colouring, Palette, require_same_palette
from .errors import (
    ConfigurationNotWinnableError,
    EhrlabError,
    GuardExceededError,
    LassoUnsupportedError,
)
from .trees import RootedTree, distance
from .types_engine import TypeTable, census


class Player(enum.Enum):
    SPOILER = "Spoiler"
    DUPLICATOR = "Duplicator"

    def __str__(self) -> str:  # verdict records read naturally
        return self.value


@dataclass
class Verdict:
    winner: Player
    witness: object = None
    detail: str = ""

    def to_lines(self) -> list[str]:
        out = [f"winner: {self.winner}"]
        if self.detail:
            out.append(f"detail: {self.detail}")
        if self.witness is not None:
            out.append(f"witness: {self.witness}")
        return out


@dataclass(frozen=True)
class PebbleHistory:
    """Played pairs in order, excluding the implicit root pair."""

    k: int
    pairs: tuple[tuple[int, int], ...] = ()
    designated_count: int = 0

    def __post_init__(self):
        if len(self.pairs) > self.k:
            raise EhrlabError(f"{len(self.pairs)} pairs exceed k={self.k}")
        if not 0 <= self.designated_count <= len(self.pairs):
            raise EhrlabError("designated prefix exceeds history")


# ---------------------------------------------------------------------------
# win-condition checking


def _pairwise_violations(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    pairs: list[tuple[int, int]],
    distance_required: bool,
) -> list[str]:
    out: list[str] = []
    for i, (x, y) in enumerate(pairs):
        if s1.values[x] != s2.values[y]:
            out.append(f"pair {i}: colours differ ({s1.values[x]} vs {s2.values[y]})")
    for i in range(len(pairs)):
        for j in range(len(pairs)):
            x, y = pairs[i]
            a, b = pairs[j]
            if (t1.parents[a] == x) != (t2.parents[b] == y):
                out.append(f"pairs {i},{j}: parenthood differs")
            if (x == a) != (y == b):
                out.append(f"pairs {i},{j}: equality pattern differs")
            if distance_required and i < j:
                if distance(t1, x, a) != distance(t2, y, b):
                    out.append(f"pairs {i},{j}: distances differ")
    return out


def dehr_check(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    history: PebbleHistory | tuple[tuple[int, int], ...],
) -> list[str]:
    """Violations of the distance-preserving win conditions over the history
    (empty list = Duplicator holds).  The root pair is checked implicitly."""
    pairs = list(history.pairs if isinstance(history, PebbleHistory) else history)
    full = [(t1.root, t2.root)] + pairs
    return _pairwise_violations(t1, s1, t2, s2, full, distance_required=True)


def ehr_check(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    history: PebbleHistory | tuple[tuple[int, int], ...],
) -> list[str]:
    """Same as dehr_check but without the distance condition (the pebble-phase
    win conditions of the set-round game)."""
    pairs = list(history.pairs if isinstance(history, PebbleHistory) else history)
    full = [(t1.root, t2.root)] + pairs
    return _pairwise_violations(t1, s1, t2, s2, full, distance_required=False)


# ---------------------------------------------------------------------------
# types game


def types_game_verdict(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    m: int,
    k: int,
) -> Verdict:
    """Duplicator wins iff both trees realize the same depth-m types with the
    same counts truncated at k."""
    require_same_palette(s1, s2)
    table = TypeTable(s1.palette)
    c1 = census(t1, s1, m, k, cap=k, table=table)
    c2 = census(t2, s2, m, k, cap=k, table=table)
    if c1.counts == c2.counts:
        return Verdict(Player.DUPLICATOR, detail=f"{len(c1.counts)} types matched")
    diffs = []
    for tid in sorted(set(c1.counts) | set(c2.counts), key=table.type_string):
        n1, n2 = c1.counts.get(tid, 0), c2.counts.get(tid, 0)
        if n1 != n2:
            diffs.append(f"{table.type_string(tid)}: {n1} vs {n2}")
    return Verdict(Player.SPOILER, witness=diffs, detail=f"{len(diffs)} census mismatches")


# ---------------------------------------------------------------------------
# exact pebble solvers


class PairSolver:
    """Memoized minimax for the pebble phase on one coloured tree pair.

    Positions are unordered multisets of pairs (the root pair always present)
    plus the number of rounds left; all win conditions are pairwise, so any
    violation is permanent and play is pruned at the first inconsistent pair.
    """

    def __init__(
        self,
        t1: RootedTree,
        s1: Colouring,
        t2: RootedTree,
        s2: Colouring,
        k: int,
        distance_required: bool = True,
        node_product_guard: int = 6400,
    ):
        if t1.lasso is not None or t2.lasso is not None:
            raise LassoUnsupportedError("exact solving requires finite trees")
        s1.validate_for(t1)
        s2.validate_for(t2)
        require_same_palette(s1, s2)
        if k < 0:
            raise EhrlabError(f"k must be >= 0, got {k}")
        if t1.size * t2.size > node_product_guard:
            raise GuardExceededError(
                "node count product", t1.size * t2.size, node_product_guard
            )
        self.t1, self.t2 = t1, t2
        self.k = k
        self.distance_required = distance_required
        self.col1, self.col2 = s1.values, s2.values
        self.par1, self.par2 = t1.parents, t2.parents
        if distance_required:
            self.dist1 = [
                [distance(t1, a, b) for b in range(t1.size)] for a in range(t1.size)
            ]
            self.dist2 = [
                [distance(t2, a, b) for b in range(t2.size)] for a in range(t2.size)
            ]
        else:
            self.dist1 = self.dist2 = None
        self._memo: dict = {}

    # -- pair compatibility ------------------------------------------------

    def _compatible(self, x: int, y: int, a: int, b: int) -> bool:
        if (x == a) != (y == b):
            return False
        if (self.par1[a] == x) != (self.par2[b] == y):
            return False
        if (self.par1[x] == a) != (self.par2[y] == b):
            return False
        if self.dist1 is not None and self.dist1[x][a] != self.dist2[y][b]:
            return False
        return True

    def _admissible(self, pairs: tuple, x: int, y: int) -> bool:
        if self.col1[x] != self.col2[y]:
            return False
        return all(self._compatible(x, y, a, b) for a, b in pairs)

    def _canon(self, designated) -> tuple | None:
        """Sorted pair multiset including the root pair; None if inconsistent."""
        pairs = [(self.t1.root, self.t2.root)]
        for x, y in designated:
            self.t1.check_node(x)
            self.t2.check_node(y)
            pairs.append((x, y))
        for i, (x, y) in enumerate(pairs):
            if self.col1[x] != self.col2[y]:
                return None
            for a, b in pairs[i + 1 :]:
                if not self._compatible(x, y, a, b):
                    return None
        return tuple(sorted(pairs))

    # -- minimax -----------------------------------------------------------

    def _duplicator_wins(self, pairs: tuple, rounds_left: int) -> bool:
        if rounds_left == 0:
            return True
        key = (pairs, rounds_left)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = True
        for side, size in ((0, self.t1.size), (1, self.t2.size)):
            for move in range(size):
                refuted = True
                other = self.t2.size if side == 0 else self.t1.size
                for reply in range(other):
                    x, y = (move, reply) if side == 0 else (reply, move)
                    if not self._admissible(pairs, x, y):
                        continue
                    nxt = tuple(sorted(pairs + ((x, y),)))
                    if self._duplicator_wins(nxt, rounds_left - 1):
                        refuted = False
                        break
                if refuted:
                    result = False
                    break
            if not result:
                break
        self._memo[key] = result
        return result

    # -- public queries ------------------------------------------------------

    def is_winnable(self, designated=()) -> bool:
        designated = tuple(designated)
        if len(designated) > self.k:
            raise EhrlabError(f"{len(designated)} designated pairs exceed k={self.k}")
        pairs = self._canon(designated)
        if pairs is None:
            return False
        return self._duplicator_wins(pairs, self.k - len(designated))

    def corresponding(self, designated, node: int, side: str = "t1") -> list[int]:
        """Nodes of the other tree whose pairing with `node` keeps the
        configuration winnable (consuming one round of budget)."""
        designated = tuple(designated)
        if len(designated) + 1 > self.k:
            raise EhrlabError("no rounds left to extend the configuration")
        if not self.is_winnable(designated):
            raise ConfigurationNotWinnableError(
                "corresponding nodes are defined only from winnable configurations"
            )
        base = self._canon(designated)
        assert base is not None
        out = []
        if side == "t1":
            self.t1.check_node(node)
            candidates = range(self.t2.size)
        elif side == "t2":
            self.t2.check_node(node)
            candidates = range(self.t1.size)
        else:
            raise EhrlabError(f"side must be 't1' or 't2', got {side!r}")
        for cand in candidates:
            x, y = (node, cand) if side == "t1" else (cand, node)
            if not self._admissible(base, x, y):
                continue
            nxt = tuple(sorted(base + ((x, y),)))
            if self._duplicator_wins(nxt, self.k - len(designated) - 1):
                out.append(cand)
        return out


def solve_dehr(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    k: int,
    designated=(),
    node_product_guard: int = 6400,
) -> Verdict:
    solver = PairSolver(
        t1, s1, t2, s2, k, distance_required=True, node_product_guard=node_product_guard
    )
    if solver.is_winnable(designated):
        return Verdict(Player.DUPLICATOR)
    return Verdict(Player.SPOILER)


def corresponding_nodes(
    t1: RootedTree,
    s1: Colouring,
    t2: RootedTree,
    s2: Colouring,
    k: int,
    designated,
    node: int,
    side: str = "t1",
    node_product_guard: int = 6400,
) -> list[int]:
    solver = PairSolver(
        t1, s1, t2, s2, k, distance_required=True, node_product_guard=node_product_guard
    )
    return solver.corresponding(designated, node, side)


# ---------------------------------------------------------------------------
# set-round game


def solve_set_pebble_ehr(
    t1: RootedTree,
    t2: RootedTree,
    palette: Palette,
    k: int,
    spoiler_colours: str = "t1",
    colouring_guard: int = 250_000,
    node_product_guard: int = 6400,
) -> Verdict:
    """Full set-round game: Spoiler assigns a rooted colouring to the first
    tree, Duplicator replies on the second, then k pebble rounds are played
    under the parenthood/colour/equality win conditions.

    `spoiler_colours="either"` lets Spoiler choose which tree to colour
    (Duplicator must then handle both orientations).
    """
    if t1.lasso is not None or t2.lasso is not None:
        raise LassoUnsupportedError("the set-round solver requires finite trees")
    if spoiler_colours not in ("t1", "either"):
        raise EhrlabError(f"spoiler_colours must be 't1' or 'either', got {spoiler_colours!r}")
    for tree in (t1, t2):
        space = palette.r ** (tree.size - 1)
        if space > colouring_guard:
            raise GuardExceededError("rooted colouring space", space, colouring_guard)

    from .colouring import rooted_colourings

    def orientation(spoiler_tree, reply_tree, swap: bool) -> Verdict:
        for s_spoiler in rooted_colourings(spoiler_tree, palette):
            handled = False
            for s_reply in rooted_colourings(reply_tree, palette):
                s1, s2 = (s_reply, s_spoiler) if swap else (s_spoiler, s_reply)
                solver = PairSolver(
                    t1, s1, t2, s2, k,
                    distance_required=False,
                    node_product_guard=node_product_guard,
                )
                if solver.is_winnable():
                    handled = True
                    break
            if not handled:
                from .trees import serialize_tree

                witness = serialize_tree(spoiler_tree, s_spoiler)
                side = "second" if swap else "first"
                return Verdict(
                    Player.SPOILER,
                    witness=witness,
                    detail=f"no reply to this colouring of the {side} tree",
                )
        return Verdict(Player.DUPLICATOR)

    verdict = orientation(t1, t2, swap=False)
    if verdict.winner is Player.SPOILER or spoiler_colours == "t1":
        return verdict
    return orientation(t2, t1, swap=True)
