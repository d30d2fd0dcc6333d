"""Depth-bounded node types with count cutoffs, hash-consed.

The depth-0 type of a node is its colour; the depth-m type pairs the colour
with the census of children's depth-(m-1) types, every count truncated at the
cutoff k.  Types are interned in a table so equality is id equality within a
table; nested tuple descriptors provide a table-independent canonical form.

Lasso trees are handled through the eventual periodicity of the tail: types
along the infinite path repeat with the tail's colour period once past the
colour prefix, which the engine verifies defensively after unrolling.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .colouring import AugmentedPalette, Colouring, Palette
from .errors import EhrlabError, PaletteMismatchError, TreeSyntaxError
from .trees import RootedTree

TypeId = int

# descriptor := (colour, ((descriptor, count), ...)) with children sorted
Descriptor = tuple


class TypeTable:
    """Append-only intern table for types.

    Within one table two nodes have the same type iff their TypeIds are
    equal; use one shared table to compare types across trees.
    """

    def __init__(self, palette: Palette | AugmentedPalette | None = None):
        self.palette = palette
        self._entries: list[tuple[int, tuple[tuple[TypeId, int], ...]]] = []
        self._index: dict[tuple, TypeId] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def intern(self, colour: int, child_counts: tuple[tuple[TypeId, int], ...]) -> TypeId:
        key = (colour, child_counts)
        tid = self._index.get(key)
        if tid is None:
            tid = len(self._entries)
            self._entries.append(key)
            self._index[key] = tid
        return tid

    def entry(self, tid: TypeId) -> tuple[int, tuple[tuple[TypeId, int], ...]]:
        return self._entries[tid]

    def descriptor(self, tid: TypeId) -> Descriptor:
        colour, kids = self._entries[tid]
        children = tuple(sorted((self.descriptor(t), n) for t, n in kids))
        return (colour, children)

    def type_string(self, tid: TypeId) -> str:
        return descriptor_string(self.descriptor(tid))


def descriptor_string(desc: Descriptor) -> str:
    colour, children = desc
    if not children:
        return f"c{colour}"
    inner = ",".join(f"{descriptor_string(d)}*{n}" for d, n in children)
    return f"c{colour}({inner})"


def parse_descriptor(text: str) -> Descriptor:
    """Inverse of descriptor_string (used by manifest files)."""
    desc, i = _parse_desc(text, 0)
    if i != len(text.strip()):
        raise TreeSyntaxError("trailing input after type", i)
    return desc


def _parse_desc(text: str, i: int) -> tuple[Descriptor, int]:
    text = text.strip()
    if i >= len(text) or text[i] != "c":
        raise TreeSyntaxError("expected colour 'c<digits>' in type", i)
    j = i + 1
    while j < len(text) and text[j].isdigit():
        j += 1
    if j == i + 1:
        raise TreeSyntaxError("expected digits after 'c' in type", i + 1)
    colour = int(text[i + 1 : j])
    children: list[tuple[Descriptor, int]] = []
    if j < len(text) and text[j] == "(":
        j += 1
        while True:
            child, j = _parse_desc(text, j)
            if j >= len(text) or text[j] != "*":
                raise TreeSyntaxError("expected '*count' after child type", j)
            j += 1
            s = j
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == s:
                raise TreeSyntaxError("expected count digits", j)
            count = int(text[s:j])
            if count < 1:
                raise TreeSyntaxError("child count must be >= 1", s)
            children.append((child, count))
            if j < len(text) and text[j] == ",":
                j += 1
                continue
            if j < len(text) and text[j] == ")":
                j += 1
                break
            raise TreeSyntaxError("expected ',' or ')' in type", j)
    return (colour, tuple(sorted(children))), j


def intern_descriptor(table: TypeTable, desc: Descriptor) -> TypeId:
    colour, children = desc
    kids = tuple(
        sorted((intern_descriptor(table, d), n) for d, n in children)
    )
    return table.intern(colour, kids)


@dataclass
class TypeAssignment:
    """Types of every node at every level 0..m, plus tail types for lassos."""

    table: TypeTable
    m: int
    k: int
    levels: tuple[tuple[TypeId, ...], ...]
    tail_prefix_len: int = 0
    tail_period_len: int = 0
    _tail_memo: dict = field(default_factory=dict, repr=False)
    _tail_colour = None  # bound at construction for lasso trees

    @property
    def arena(self) -> tuple[TypeId, ...]:
        return self.levels[self.m]

    def type_of(self, v: int, level: int | None = None) -> TypeId:
        return self.levels[self.m if level is None else level][v]

    def tail_type(self, step: int, level: int | None = None) -> TypeId:
        """Type of the tail node `step` levels below the attach leaf."""
        if self._tail_colour is None:
            raise EhrlabError("tree has no tail")
        j = self.m if level is None else level
        if step > self.tail_prefix_len:
            step = self.tail_prefix_len + 1 + (step - self.tail_prefix_len - 1) % self.tail_period_len
        return self._tail_type(step, j)

    def _tail_type(self, step: int, j: int) -> TypeId:
        key = (step, j)
        hit = self._tail_memo.get(key)
        if hit is not None:
            return hit
        colour = self._tail_colour(step)
        if j == 0:
            tid = self.table.intern(colour, ())
        else:
            child = self._tail_type(step + 1, j - 1)
            tid = self.table.intern(colour, ((child, min(1, self.k)),))
        self._tail_memo[key] = tid
        return tid


def compute_types(
    tree: RootedTree,
    sigma: Colouring,
    m: int,
    k: int,
    table: TypeTable | None = None,
) -> TypeAssignment:
    """Bottom-up type assignment at levels 0..m with count cutoff k."""
    if m < 0:
        raise EhrlabError(f"type depth must be >= 0, got {m}")
    if k < 1:
        raise EhrlabError(f"count cutoff must be >= 1, got {k}")
    sigma.validate_for(tree)
    if table is None:
        table = TypeTable(sigma.palette)
    elif table.palette is None:
        table.palette = sigma.palette
    elif table.palette != sigma.palette:
        raise PaletteMismatchError("type table is bound to a different palette")

    assignment = TypeAssignment(table=table, m=m, k=k, levels=())
    attach = tree.lasso.attach if tree.lasso is not None else None
    if tree.lasso is not None:
        assignment._tail_colour = sigma.tail_colour
        p0, p = len(sigma.tail_prefix), len(sigma.tail_period)
        assignment.tail_prefix_len = p0
        assignment.tail_period_len = p
        # defensive periodicity check: unroll one extra period and compare
        for j in range(m + 1):
            for s in range(p0 + 1, p0 + p + 1):
                if assignment._tail_type(s, j) != assignment._tail_type(s + p, j):
                    raise EhrlabError(
                        f"tail types failed the periodicity check at step {s}, level {j}"
                    )

    order = tree.nodes_by_depth_desc()
    levels: list[tuple[TypeId, ...]] = []
    prev: list[TypeId] = [0] * tree.size
    for j in range(m + 1):
        cur = [0] * tree.size
        for v in order:
            colour = sigma.values[v]
            if j == 0:
                cur[v] = table.intern(colour, ())
                continue
            counts = Counter(prev[ch] for ch in tree.children[v])
            if v == attach:
                counts[assignment._tail_type(1, j - 1)] += 1
            kids = tuple(sorted((t, min(n, k)) for t, n in counts.items()))
            cur[v] = table.intern(colour, kids)
        levels.append(tuple(cur))
        prev = cur
    assignment.levels = tuple(levels)
    return assignment


@dataclass
class TypeCensus:
    """Counts of realized depth-m types, truncated at `cap`.

    Tail types of a lasso tree recur infinitely often, so they sit at the cap.
    """

    table: TypeTable
    m: int
    k: int
    cap: int
    counts: dict[TypeId, int]

    def dump(self) -> str:
        lines = sorted(
            (self.table.type_string(t), n) for t, n in self.counts.items()
        )
        return "\n".join(f"{s} {n}" for s, n in lines) + "\n"

    def as_string_map(self) -> dict[str, int]:
        return {self.table.type_string(t): n for t, n in self.counts.items()}


def census(
    tree: RootedTree,
    sigma: Colouring,
    m: int,
    k: int,
    cap: int | None = None,
    table: TypeTable | None = None,
    assignment: TypeAssignment | None = None,
) -> TypeCensus:
    if cap is None:
        cap = k
    if cap < 1:
        raise EhrlabError(f"census cap must be >= 1, got {cap}")
    if assignment is None:
        assignment = compute_types(tree, sigma, m, k, table)
    counts: Counter = Counter(assignment.arena)
    if tree.lasso is not None:
        for s in range(1, assignment.tail_prefix_len + 1):
            counts[assignment.tail_type(s)] += 1
        saturated = {
            assignment.tail_type(s)
            for s in range(
                assignment.tail_prefix_len + 1,
                assignment.tail_prefix_len + assignment.tail_period_len + 1,
            )
        }
    else:
        saturated = set()
    out = {t: min(n, cap) for t, n in counts.items()}
    for t in saturated:
        out[t] = cap
    return TypeCensus(table=assignment.table, m=m, k=k, cap=cap, counts=out)


def types_equal_nodes(
    tree_a: RootedTree,
    sigma_a: Colouring,
    u: int,
    tree_b: RootedTree,
    sigma_b: Colouring,
    v: int,
    m: int,
    k: int,
) -> bool:
    """Do u (in the first tree) and v (in the second) have equal depth-m types?"""
    if sigma_a.palette != sigma_b.palette:
        raise PaletteMismatchError("cross-tree type comparison needs one palette")
    table = TypeTable(sigma_a.palette)
    ta = compute_types(tree_a, sigma_a, m, k, table)
    tb = compute_types(tree_b, sigma_b, m, k, table)
    return ta.arena[u] == tb.arena[v]


def realized_descriptors(
    tree: RootedTree, sigma: Colouring, m: int, k: int
) -> frozenset[Descriptor]:
    """Set of depth-m types realized anywhere in the (possibly lasso) tree."""
    c = census(tree, sigma, m, k, cap=k)
    return frozenset(c.table.descriptor(t) for t in c.counts)
