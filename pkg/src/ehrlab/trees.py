"""Rooted-tree arenas: construction, literals, truncation, subtrees, metrics.

Trees are finite arenas of nodes indexed 0..size-1 with node 0 as the root.
A "lasso" tree additionally hangs an infinite simple path below one
designated leaf; the tail's structure is implicit (one child per level) and
its colours are eventually periodic.  Operations that materialize tail nodes
(truncation, subtree extraction) synthesize their colours from the colouring
that travels with the tree.

Tree literals:  `c0(c1,c2(c1))` — a node is its colour followed by an
optional parenthesised child list; `@[c1,c2]` after a leaf's colour declares
the lasso tail's colour period.  Exactly one lasso per tree, only on a leaf.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .colouring import Colouring, Palette
from .errors import (
    EhrlabError,
    InvalidNodeError,
    LassoUnsupportedError,
    TreeSyntaxError,
)


@dataclass(frozen=True)
class Lasso:
    """Infinite simple path hanging below `attach` (a leaf of the arena).

    `period_colours` is the colour period of the tail as written in the
    literal the tree was parsed from; games may recolour the tail through the
    colouring object instead.
    """

    attach: int
    period_colours: tuple[int, ...]


@dataclass(frozen=True)
class RootedTree:
    parents: tuple[int | None, ...]
    children: tuple[tuple[int, ...], ...]
    depths: tuple[int, ...]
    root: int = 0
    lasso: Lasso | None = None

    @property
    def size(self) -> int:
        return len(self.parents)

    def __len__(self) -> int:
        return len(self.parents)

    @property
    def is_lasso(self) -> bool:
        return self.lasso is not None

    def check_node(self, v: int) -> None:
        if not 0 <= v < self.size:
            raise InvalidNodeError(f"node {v} outside arena 0..{self.size - 1}")

    def is_leaf(self, v: int) -> bool:
        self.check_node(v)
        return not self.children[v]

    def height(self) -> int:
        """Depth of the deepest arena node (the lasso tail is unbounded)."""
        return max(self.depths)

    def nodes_by_depth_desc(self) -> list[int]:
        return sorted(range(self.size), key=lambda v: -self.depths[v])

    def validate(self) -> None:
        n = self.size
        if n == 0:
            raise EhrlabError("empty tree")
        if self.root != 0 or self.parents[0] is not None:
            raise EhrlabError("node 0 must be the parentless root")
        for v in range(1, n):
            p = self.parents[v]
            if p is None or not 0 <= p < n:
                raise EhrlabError(f"node {v} has invalid parent {p}")
            if p >= v:
                raise EhrlabError(f"arena must be topologically ordered ({v} under {p})")
            if self.depths[v] != self.depths[p] + 1:
                raise EhrlabError(f"depth of {v} inconsistent with its parent")
            if v not in self.children[p]:
                raise EhrlabError(f"child lists miss edge {p}->{v}")
        if self.depths[0] != 0:
            raise EhrlabError("root depth must be 0")
        if self.lasso is not None:
            a = self.lasso.attach
            self.check_node(a)
            if self.children[a]:
                raise EhrlabError("lasso must attach to a leaf")
            if not self.lasso.period_colours:
                raise EhrlabError("lasso period must be non-empty")


class TreeBuilder:
    """Incremental arena construction; node ids are handed out in insertion
    order, so parents always precede children."""

    def __init__(self):
        self._parents: list[int | None] = [None]
        self._children: list[list[int]] = [[]]
        self._depths: list[int] = [0]

    @property
    def size(self) -> int:
        return len(self._parents)

    def add_child(self, parent: int) -> int:
        if not 0 <= parent < self.size:
            raise InvalidNodeError(f"unknown parent {parent}")
        node = self.size
        self._parents.append(parent)
        self._children.append([])
        self._depths.append(self._depths[parent] + 1)
        self._children[parent].append(node)
        return node

    def build(self, lasso: Lasso | None = None) -> RootedTree:
        tree = RootedTree(
            parents=tuple(self._parents),
            children=tuple(tuple(c) for c in self._children),
            depths=tuple(self._depths),
            root=0,
            lasso=lasso,
        )
        tree.validate()
        return tree


def single_node_tree() -> RootedTree:
    return TreeBuilder().build()


def path_tree(length: int) -> RootedTree:
    """Simple path with `length` edges (length+1 nodes), root at the top."""
    b = TreeBuilder()
    v = 0
    for _ in range(length):
        v = b.add_child(v)
    return b.build()


def lasso_path_tree(period_colours: tuple[int, ...] = (1,)) -> RootedTree:
    """A single root carrying an infinite path below it."""
    return TreeBuilder().build(lasso=Lasso(attach=0, period_colours=period_colours))


# ---------------------------------------------------------------------------
# literals


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _parse_colour(text: str, i: int) -> tuple[int, int]:
    i = _skip_ws(text, i)
    if i >= len(text) or text[i] != "c":
        raise TreeSyntaxError("expected colour 'c<digits>'", i)
    j = i + 1
    while j < len(text) and text[j].isdigit():
        j += 1
    if j == i + 1:
        raise TreeSyntaxError("expected digits after 'c'", i + 1)
    return int(text[i + 1 : j]), j


def parse_tree(text: str, palette: Palette | None = None) -> tuple[RootedTree, Colouring]:
    """Parse a tree literal into a tree and the colouring it denotes.

    With no explicit palette, the smallest palette covering the literal's
    colour indices is inferred (at least r=1).
    """
    builder = TreeBuilder()
    colours: list[int] = []
    lasso: Lasso | None = None

    def parse_node(i: int, parent: int | None) -> int:
        nonlocal lasso
        colour, i = _parse_colour(text, i)
        if parent is None:
            node = 0
            colours.append(colour)
        else:
            node = builder.add_child(parent)
            colours.append(colour)
        i = _skip_ws(text, i)
        node_lasso = None
        if i < len(text) and text[i] == "@":
            i += 1
            if i >= len(text) or text[i] != "[":
                raise TreeSyntaxError("expected '[' after '@'", i)
            i += 1
            period: list[int] = []
            while True:
                c, i = _parse_colour(text, i)
                period.append(c)
                i = _skip_ws(text, i)
                if i < len(text) and text[i] == ",":
                    i += 1
                    continue
                if i < len(text) and text[i] == "]":
                    i += 1
                    break
                raise TreeSyntaxError("expected ',' or ']' in lasso period", i)
            if lasso is not None:
                raise TreeSyntaxError("a tree may carry at most one lasso", i)
            node_lasso = tuple(period)
            i = _skip_ws(text, i)
        if i < len(text) and text[i] == "(":
            if node_lasso is not None:
                raise TreeSyntaxError("lasso is only allowed on a leaf", i)
            i += 1
            while True:
                i = parse_node(i, node)
                i = _skip_ws(text, i)
                if i < len(text) and text[i] == ",":
                    i += 1
                    continue
                if i < len(text) and text[i] == ")":
                    i += 1
                    break
                raise TreeSyntaxError("expected ',' or ')' in child list", i)
        if node_lasso is not None:
            lasso = Lasso(attach=node, period_colours=node_lasso)
        return i

    i = parse_node(0, None)
    i = _skip_ws(text, i)
    if i != len(text):
        raise TreeSyntaxError("trailing input after tree literal", i)

    tree = builder.build(lasso=lasso)
    if palette is None:
        seen = max(max(colours), max(lasso.period_colours) if lasso else 0)
        palette = Palette(max(1, seen))
    colouring = Colouring(
        palette,
        tuple(colours),
        tail_prefix=(),
        tail_period=lasso.period_colours if lasso else (),
    )
    colouring.validate_for(tree)
    return tree, colouring


def serialize_tree(tree: RootedTree, colouring: Colouring) -> str:
    """Literal for the tree with children in arena order.  Inverse of
    parse_tree on whitespace-free literals."""
    colouring.validate_for(tree)
    # iterative emission to keep deep paths within stack limits
    out: list[str] = []
    stack: list[tuple[str, int | str]] = [("node", tree.root)]
    while stack:
        kind, item = stack.pop()
        if kind == "text":
            out.append(item)  # type: ignore[arg-type]
            continue
        v = item  # type: ignore[assignment]
        out.append(f"c{colouring.values[v]}")
        if tree.lasso is not None and tree.lasso.attach == v:
            period = _tail_literal_period(colouring)
            out.append("@[" + ",".join(f"c{c}" for c in period) + "]")
        kids = tree.children[v]
        if kids:
            stack.append(("text", ")"))
            for ch in reversed(kids[1:]):
                stack.append(("node", ch))
                stack.append(("text", ","))
            stack.append(("node", kids[0]))
            out.append("(")
    return "".join(out)


def _tail_literal_period(colouring: Colouring) -> tuple[int, ...]:
    # literals cannot express a tail prefix; fold a pure period or refuse
    if colouring.tail_prefix:
        pre, per = colouring.tail_prefix, colouring.tail_period
        n = len(per)
        # a prefix that already agrees with the periodic continuation can fold
        for i, c in enumerate(pre):
            if c != per[(i - len(pre)) % n]:
                raise EhrlabError("tail colouring with a true prefix has no literal form")
        shift = len(pre) % n
        return per[n - shift :] + per[: n - shift] if shift else per
    return colouring.tail_period


# ---------------------------------------------------------------------------
# structural operations


def truncate(
    tree: RootedTree, n: int, colouring: Colouring | None = None
) -> tuple[RootedTree, Colouring | None]:
    """Depth truncation: the subtree induced by nodes of depth <= n.  A lasso
    tail is unrolled into concrete nodes; the result never has a lasso."""
    if n < 0:
        raise EhrlabError(f"truncation depth must be >= 0, got {n}")
    if colouring is not None:
        colouring.validate_for(tree)
    if tree.lasso is not None and colouring is None:
        raise EhrlabError("truncating a lasso tree needs its colouring")
    builder = TreeBuilder()
    new_colours: list[int] = []
    if colouring is not None:
        new_colours.append(colouring.values[tree.root])
    mapping = {tree.root: 0}
    order = sorted(range(tree.size), key=lambda v: (tree.depths[v], v))
    for v in order:
        if v == tree.root or tree.depths[v] > n:
            continue
        p = tree.parents[v]
        assert p is not None
        if p not in mapping:
            continue
        mapping[v] = builder.add_child(mapping[p])
        if colouring is not None:
            new_colours.append(colouring.values[v])
    if tree.lasso is not None and tree.lasso.attach in mapping:
        a = tree.lasso.attach
        cur = mapping[a]
        for step in range(1, n - tree.depths[a] + 1):
            cur = builder.add_child(cur)
            new_colours.append(colouring.tail_colour(step))  # type: ignore[union-attr]
    out_tree = builder.build()
    out_col = (
        Colouring(colouring.palette, tuple(new_colours)) if colouring is not None else None
    )
    return out_tree, out_col


def subtree_at(
    tree: RootedTree, v: int, colouring: Colouring | None = None
) -> tuple[RootedTree, Colouring | None]:
    """Subtree hanging at v, renumbered to its own arena.  A lasso whose
    attach leaf lies inside moves along (tail colours travel unchanged)."""
    sub, col, _ = subtree_with_map(tree, v, colouring)
    return sub, col


def subtree_with_map(
    tree: RootedTree, v: int, colouring: Colouring | None = None
) -> tuple[RootedTree, Colouring | None, dict[int, int]]:
    tree.check_node(v)
    if colouring is not None:
        colouring.validate_for(tree)
    builder = TreeBuilder()
    mapping = {v: 0}
    new_colours: list[int] = []
    if colouring is not None:
        new_colours.append(colouring.values[v])
    queue = [v]
    qi = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        for ch in tree.children[u]:
            mapping[ch] = builder.add_child(mapping[u])
            if colouring is not None:
                new_colours.append(colouring.values[ch])
            queue.append(ch)
    lasso = None
    tail_prefix: tuple[int, ...] = ()
    tail_period: tuple[int, ...] = ()
    if tree.lasso is not None and tree.lasso.attach in mapping:
        lasso = Lasso(mapping[tree.lasso.attach], tree.lasso.period_colours)
        if colouring is not None:
            tail_prefix = colouring.tail_prefix
            tail_period = colouring.tail_period
    out_tree = builder.build(lasso=lasso)
    out_col = (
        Colouring(colouring.palette, tuple(new_colours), tail_prefix, tail_period)
        if colouring is not None
        else None
    )
    return out_tree, out_col, mapping


def truncated_subtree_with_map(
    tree: RootedTree, v: int, n: int, colouring: Colouring | None = None
) -> tuple[RootedTree, Colouring | None, dict[int, int]]:
    """Subtree at v cut at relative depth n (lasso tail unrolled): the local
    playing field of per-pebble subgames.  The map sends original arena ids of
    surviving nodes to local ids (materialized tail nodes have no preimage)."""
    tree.check_node(v)
    if colouring is not None:
        colouring.validate_for(tree)
    builder = TreeBuilder()
    mapping = {v: 0}
    new_colours: list[int] = []
    if colouring is not None:
        new_colours.append(colouring.values[v])
    rel_depth = {v: 0}
    queue = [v]
    qi = 0
    attach_local: int | None = None
    attach_rel: int | None = None
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        if tree.lasso is not None and tree.lasso.attach == u:
            attach_local = mapping[u]
            attach_rel = rel_depth[u]
        if rel_depth[u] == n:
            continue
        for ch in tree.children[u]:
            rel_depth[ch] = rel_depth[u] + 1
            mapping[ch] = builder.add_child(mapping[u])
            if colouring is not None:
                new_colours.append(colouring.values[ch])
            queue.append(ch)
    if attach_local is not None and attach_rel is not None and attach_rel < n:
        if colouring is None:
            raise EhrlabError("materializing a lasso tail needs the colouring")
        cur = attach_local
        for step in range(1, n - attach_rel + 1):
            cur = builder.add_child(cur)
            new_colours.append(colouring.tail_colour(step))
    out_tree = builder.build()
    out_col = (
        Colouring(colouring.palette, tuple(new_colours)) if colouring is not None else None
    )
    return out_tree, out_col, mapping


def distance(tree: RootedTree, a: int, b: int) -> int:
    """Graph distance d(a) + d(b) - 2 d(lca)."""
    return tree.depths[a] + tree.depths[b] - 2 * tree.depths[lca(tree, a, b)]


def lca(tree: RootedTree, a: int, b: int) -> int:
    tree.check_node(a)
    tree.check_node(b)
    while tree.depths[a] > tree.depths[b]:
        a = tree.parents[a]  # type: ignore[assignment]
    while tree.depths[b] > tree.depths[a]:
        b = tree.parents[b]  # type: ignore[assignment]
    while a != b:
        a = tree.parents[a]  # type: ignore[assignment]
        b = tree.parents[b]  # type: ignore[assignment]
    return a


def ancestor_at(tree: RootedTree, v: int, dist: int) -> int | None:
    """Ancestor exactly `dist` edges above v, or None if that overshoots the root."""
    tree.check_node(v)
    if dist < 0:
        raise EhrlabError(f"distance must be >= 0, got {dist}")
    if dist > tree.depths[v]:
        return None
    for _ in range(dist):
        v = tree.parents[v]  # type: ignore[assignment]
    return v


def is_ancestor(tree: RootedTree, anc: int, v: int) -> bool:
    return ancestor_at(tree, v, tree.depths[v] - tree.depths[anc]) == anc if tree.depths[v] >= tree.depths[anc] else False


def distance_matrix(tree: RootedTree) -> list[list[int]]:
    n = tree.size
    out = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            d = distance(tree, a, b)
            out[a][b] = d
            out[b][a] = d
    return out


# ---------------------------------------------------------------------------
# canonical forms and isomorphism


def canonical_code(tree: RootedTree, colouring: Colouring | None = None, at: int | None = None):
    """Canonical nested-tuple code of the (coloured) subtree at `at` (root by
    default): (label, sorted child codes).  Equal codes characterize
    root-preserving (colour-preserving when coloured) isomorphism."""
    if tree.lasso is not None:
        raise LassoUnsupportedError("canonical codes require a finite tree")
    if at is None:
        at = tree.root
    tree.check_node(at)
    code: dict[int, tuple] = {}
    scope = _subtree_nodes(tree, at)
    for v in sorted(scope, key=lambda u: -tree.depths[u]):
        label = colouring.values[v] if colouring is not None else 0
        kids = tuple(sorted(code[ch] for ch in tree.children[v]))
        code[v] = (label, kids)
    return code[at]


def _subtree_nodes(tree: RootedTree, v: int) -> list[int]:
    out = [v]
    qi = 0
    while qi < len(out):
        u = out[qi]
        qi += 1
        out.extend(tree.children[u])
    return out


def coloured_isomorphic(
    t1: RootedTree, c1: Colouring, t2: RootedTree, c2: Colouring
) -> bool:
    """Root- and colour-preserving isomorphism of finite coloured trees."""
    if t1.lasso is not None or t2.lasso is not None:
        raise LassoUnsupportedError("isomorphism testing requires finite trees")
    c1.validate_for(t1)
    c2.validate_for(t2)
    if c1.palette != c2.palette:
        return False
    if t1.size != t2.size:
        return False
    return canonical_code(t1, c1) == canonical_code(t2, c2)


def canonical_literal(tree: RootedTree, colouring: Colouring) -> str:
    """Literal with children ordered by canonical code (a normal form)."""
    if tree.lasso is not None:
        # only a pure-periodic tail has a literal; order the finite part
        raise LassoUnsupportedError("canonical literals require a finite tree")

    def emit(v: int) -> str:
        kids = sorted(
            (canonical_code(tree, colouring, ch), ch) for ch in tree.children[v]
        )
        inner = ",".join(emit(ch) for _, ch in kids)
        head = f"c{colouring.values[v]}"
        return f"{head}({inner})" if inner else head

    return emit(tree.root)


# ---------------------------------------------------------------------------
# shape enumeration (for oracle corpora and witness search)


def enumerate_shapes(max_nodes: int) -> list[RootedTree]:
    """All rooted tree shapes with 1..max_nodes nodes, without isomorphic
    duplicates, ordered by size then canonical code."""
    if max_nodes < 1:
        return []
    # shapes_by_size[n] = list of canonical codes of n-node shapes
    codes_by_size: dict[int, list] = {1: [(0, ())]}

    def combos(total: int, max_size: int) -> Iterator[tuple]:
        """Multisets of child codes with sizes summing to `total`, each child
        of size <= max_size, emitted as sorted tuples."""
        if total == 0:
            yield ()
            return
        for size in range(min(total, max_size), 0, -1):
            for idx, code in enumerate(codes_by_size[size]):
                for rest in combos(total - size, size):
                    # keep the multiset sorted: allow only children that do
                    # not precede `code` within the same size class
                    ok = True
                    for other in rest:
                        if _code_size(other) == size and other < code:
                            ok = False
                            break
                    if ok:
                        yield tuple(sorted((code,) + rest))

    seen_per_size: dict[int, set] = {1: {(0, ())}}
    for n in range(2, max_nodes + 1):
        found = set()
        for kids in combos(n - 1, n - 1):
            found.add((0, tuple(sorted(kids))))
        codes_by_size[n] = sorted(found)
        seen_per_size[n] = found

    out: list[RootedTree] = []
    for n in range(1, max_nodes + 1):
        for code in codes_by_size[n]:
            out.append(tree_from_code(code))
    return out


def _code_size(code) -> int:
    return 1 + sum(_code_size(ch) for ch in code[1])


def tree_from_code(code) -> RootedTree:
    b = TreeBuilder()

    def grow(node_code, parent: int | None) -> None:
        node = 0 if parent is None else b.add_child(parent)
        for ch in node_code[1]:
            grow(ch, node)

    grow(code, None)
    return b.build()


def load_corpus(text: str) -> list[str]:
    """Corpus files: one tree literal per line, `#` starts a comment."""
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out
