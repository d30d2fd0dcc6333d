"""Adequacy and deficiency of type sets.

A type set S is deficient for a tree when no rooted colouring of the tree
realizes depth-m types inside S only; S is adequate when every finite tree
admits such a colouring.  This module classifies small instances by search:
a pruned backtracking colouring search, witness-tree enumeration up to a size
bound, and full enumeration of the deficient sets discoverable within that
bound.  The deficient-set manifest it writes is what the tree constructions
consume.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product

from .colouring import ROOT_COLOUR, Colouring, Palette, rooted_colourings
from .errors import EhrlabError, GuardExceededError
from .trees import RootedTree, canonical_code, enumerate_shapes, parse_tree, serialize_tree
from .types_engine import (
    Descriptor,
    TypeId,
    TypeTable,
    compute_types,
    descriptor_string,
    intern_descriptor,
    parse_descriptor,
    realized_descriptors,
)


def _normalize_descriptor(desc: Descriptor) -> Descriptor:
    colour, children = desc
    kids = tuple(sorted((_normalize_descriptor(d), int(n)) for d, n in children))
    return (int(colour), kids)


def descriptor_depth(desc: Descriptor) -> int:
    _, children = desc
    if not children:
        return 0
    return 1 + max(descriptor_depth(d) for d, _ in children)


@dataclass(frozen=True)
class TypeSet:
    """An immutable set of depth-m type descriptors."""

    descriptors: frozenset
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise EhrlabError(f"type depth must be >= 0, got {self.m}")
        norm = frozenset(_normalize_descriptor(d) for d in self.descriptors)
        object.__setattr__(self, "descriptors", norm)
        for d in norm:
            if descriptor_depth(d) > self.m:
                raise EhrlabError(
                    f"type {descriptor_string(d)} nests deeper than m={self.m}"
                )
            for _, count in _walk_counts(d):
                if count < 1:
                    raise EhrlabError(
                        f"type {descriptor_string(d)} carries a non-positive count"
                    )

    @classmethod
    def from_strings(cls, texts, m: int) -> "TypeSet":
        return cls(frozenset(parse_descriptor(t) for t in texts), m)

    @classmethod
    def of_realized(cls, tree, sigma, m: int, k: int) -> "TypeSet":
        return cls(realized_descriptors(tree, sigma, m, k), m)

    def strings(self) -> list[str]:
        return sorted(descriptor_string(d) for d in self.descriptors)

    def union(self, other: "TypeSet") -> "TypeSet":
        if self.m != other.m:
            raise EhrlabError("cannot union type sets of different depths")
        return TypeSet(self.descriptors | other.descriptors, self.m)

    def __contains__(self, desc: Descriptor) -> bool:
        return _normalize_descriptor(desc) in self.descriptors

    def __len__(self) -> int:
        return len(self.descriptors)

    def __iter__(self):
        return iter(sorted(self.descriptors))


def _walk_counts(desc: Descriptor):
    _, children = desc
    for d, n in children:
        yield d, n
        yield from _walk_counts(d)


def complement_within(s: TypeSet, universe) -> TypeSet:
    """Complement of S inside an explicit universe of descriptors."""
    uni = frozenset(_normalize_descriptor(d) for d in universe)
    missing = s.descriptors - uni
    if missing:
        raise EhrlabError("type set is not contained in the given universe")
    return TypeSet(uni - s.descriptors, s.m)


# ---------------------------------------------------------------------------
# the realizable type space


def realizable_type_space(
    palette: Palette, m: int, k: int, max_types: int = 4096
) -> tuple[tuple[Descriptor, ...], tuple[Descriptor, ...]]:
    """All depth-m types realizable in rooted colourings over the palette:
    (root types, non-root types), each sorted canonically.

    Realizable means: the distinguished colour appears exactly at the root,
    so child censuses range over non-root types only, with counts 1..k.
    Any census combination is realizable by hanging suitable subtrees.
    """
    if m < 0:
        raise EhrlabError(f"type depth must be >= 0, got {m}")
    if k < 1:
        raise EhrlabError(f"count cutoff must be >= 1, got {k}")
    level: list[Descriptor] = [(c, ()) for c in palette.non_root_colours()]
    for _ in range(m):
        censuses = _census_combos(level, k, palette.r, max_types)
        level = [
            (c, kids) for c in palette.non_root_colours() for kids in censuses
        ]
        if len(level) > max_types:
            raise GuardExceededError("realizable type space", len(level), max_types)
    if m == 0:
        roots: list[Descriptor] = [(ROOT_COLOUR, ())]
    else:
        below = realizable_type_space(palette, m - 1, k, max_types)[1]
        censuses = _census_combos(list(below), k, 1, max_types)
        roots = [(ROOT_COLOUR, kids) for kids in censuses]
    total = len(roots) + len(level)
    if total > max_types:
        raise GuardExceededError("realizable type space", total, max_types)
    return tuple(sorted(roots)), tuple(sorted(level))


def _census_combos(child_types, k, width, max_types):
    space = (k + 1) ** len(child_types) * max(width, 1)
    if space > max_types:
        raise GuardExceededError("realizable type space", space, max_types)
    combos = []
    for counts in product(range(k + 1), repeat=len(child_types)):
        kids = tuple(
            sorted((d, n) for d, n in zip(child_types, counts) if n > 0)
        )
        combos.append(kids)
    return combos


# ---------------------------------------------------------------------------
# colouring search


def _interned_set(table: TypeTable, s: TypeSet) -> set[TypeId]:
    return {intern_descriptor(table, d) for d in s.descriptors}


class _TailTypes:
    """Memoized (step, level) types along a fixed eventually periodic tail."""

    def __init__(self, table: TypeTable, prefix, period, k: int):
        self.table = table
        self.prefix = prefix
        self.period = period
        self.k = k
        self._memo: dict[tuple[int, int], TypeId] = {}

    def colour(self, step: int) -> int:
        if step <= len(self.prefix):
            return self.prefix[step - 1]
        return self.period[(step - 1 - len(self.prefix)) % len(self.period)]

    def type_at(self, step: int, level: int) -> TypeId:
        p0 = len(self.prefix)
        if step > p0:
            step = p0 + 1 + (step - p0 - 1) % len(self.period)
        key = (step, level)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        colour = self.colour(step)
        if level == 0:
            tid = self.table.intern(colour, ())
        else:
            child = self.type_at(step + 1, level - 1)
            tid = self.table.intern(colour, ((child, min(1, self.k)),))
        self._memo[key] = tid
        return tid

    def arena_types(self, level: int) -> list[TypeId]:
        """Types of every tail node at the level (steps 1..prefix+period
        cover all of them by periodicity)."""
        return [
            self.type_at(s, level)
            for s in range(1, len(self.prefix) + len(self.period) + 1)
        ]


def _search_colouring(
    tree: RootedTree,
    palette: Palette,
    sids: set[TypeId],
    m: int,
    k: int,
    table: TypeTable,
    tail: _TailTypes | None,
) -> list[int] | None:
    """Backtracking search for a rooted colouring with every node's depth-m
    type inside `sids`; children are coloured before parents so each node is
    checked the moment its subtree is complete."""
    order = tree.nodes_by_depth_desc()
    attach = tree.lasso.attach if tree.lasso is not None else None
    stacks: list[tuple[TypeId, ...] | None] = [None] * tree.size
    values = [ROOT_COLOUR] * tree.size

    def stack_of(v: int, colour: int) -> tuple[TypeId, ...]:
        out = [table.intern(colour, ())]
        for j in range(1, m + 1):
            counts = Counter(stacks[ch][j - 1] for ch in tree.children[v])
            if v == attach:
                counts[tail.type_at(1, j - 1)] += 1
            kids = tuple(sorted((t, min(n, k)) for t, n in counts.items()))
            out.append(table.intern(colour, kids))
        return tuple(out)

    def go(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        choices = (ROOT_COLOUR,) if v == tree.root else palette.non_root_colours()
        for c in choices:
            st = stack_of(v, c)
            if st[m] in sids:
                stacks[v] = st
                values[v] = c
                if go(i + 1):
                    return True
        stacks[v] = None
        return False

    return values if go(0) else None


def _check_depth(s: TypeSet, m: int) -> None:
    if s.m != m:
        raise EhrlabError(f"type set has depth {s.m}, expected {m}")


def is_deficient(
    s: TypeSet,
    tree: RootedTree,
    palette: Palette,
    m: int,
    k: int,
    colouring_guard: int = 2_000_000,
) -> bool:
    """True iff no rooted colouring of the finite tree realizes types inside
    S only.  Exhaustive search with early pruning: a partial colouring is
    abandoned as soon as any completed subtree's depth-m type leaves S."""
    if tree.lasso is not None:
        raise EhrlabError("deficiency is decided on finite trees")
    _check_depth(s, m)
    space = palette.r ** (tree.size - 1)
    if space > colouring_guard:
        raise GuardExceededError("rooted colouring space", space, colouring_guard)
    table = TypeTable(palette)
    sids = _interned_set(table, s)
    return _search_colouring(tree, palette, sids, m, k, table, None) is None


def find_S_colouring(
    s: TypeSet,
    tree: RootedTree,
    palette: Palette,
    m: int,
    k: int,
    colouring_guard: int = 2_000_000,
    tail_prefix_bound: int | None = None,
    tail_period_bound: int | None = None,
) -> Colouring | None:
    """A rooted colouring of the tree whose realized depth-m types all lie in
    S, or None when the search class is exhausted.

    Finite trees are searched completely, so None means no such colouring
    exists.  For a lasso tree the tail is searched over eventually periodic
    colourings with bounded prefix and period; None then only means none was
    found within those bounds.
    """
    _check_depth(s, m)
    space = palette.r ** max(tree.size - 1, 0)
    if space > colouring_guard:
        raise GuardExceededError("rooted colouring space", space, colouring_guard)
    table = TypeTable(palette)
    sids = _interned_set(table, s)
    if tree.lasso is None:
        values = _search_colouring(tree, palette, sids, m, k, table, None)
        if values is None:
            return None
        return Colouring(palette, tuple(values))

    if tail_period_bound is None:
        tail_period_bound = max(len(tree.lasso.period_colours), 1) * palette.r
    if tail_prefix_bound is None:
        tail_prefix_bound = tail_period_bound
    for p0 in range(tail_prefix_bound + 1):
        for p in range(1, tail_period_bound + 1):
            for combo in product(palette.non_root_colours(), repeat=p0 + p):
                tail = _TailTypes(table, combo[:p0], combo[p0:], k)
                if any(t not in sids for t in tail.arena_types(m)):
                    continue
                values = _search_colouring(tree, palette, sids, m, k, table, tail)
                if values is None:
                    continue
                return Colouring(
                    palette, tuple(values), tuple(combo[:p0]), tuple(combo[p0:])
                )
    return None


# ---------------------------------------------------------------------------
# witness search and enumeration of deficient sets


@dataclass(frozen=True)
class DeficientWitness:
    """A tree certifying that the set is deficient."""

    tree: RootedTree

    @property
    def deficient(self) -> bool:
        return True


@dataclass(frozen=True)
class AdequateUpTo:
    """No witness exists among trees of at most `bound` nodes."""

    bound: int

    @property
    def deficient(self) -> bool:
        return False


DeficiencyCertificate = DeficientWitness | AdequateUpTo


def _shapes_in_order(bound: int) -> list[RootedTree]:
    shapes = enumerate_shapes(bound)
    return sorted(shapes, key=lambda t: (t.size, canonical_code(t)))


def find_witness(
    s: TypeSet,
    size_bound: int,
    palette: Palette,
    m: int,
    k: int,
    colouring_guard: int = 2_000_000,
) -> DeficiencyCertificate:
    """First tree (fewest nodes, ties by canonical order) for which S is
    deficient, or the adequacy bound reached."""
    _check_depth(s, m)
    for shape in _shapes_in_order(size_bound):
        if is_deficient(s, shape, palette, m, k, colouring_guard):
            return DeficientWitness(shape)
    return AdequateUpTo(size_bound)


def enumerate_Q(
    palette: Palette,
    m: int,
    k: int,
    size_bound: int,
    subset_guard: int = 4096,
    type_guard: int = 4096,
    colouring_guard: int = 2_000_000,
) -> dict[TypeSet, RootedTree]:
    """All type sets with a deficiency witness of at most `size_bound` nodes,
    each mapped to its minimal witness (fewest nodes, ties by canonical
    order).

    Subsets are enumerated over the realizable type space; for every tree
    shape the family of realizable type sets is precomputed as bitmasks, so
    the deficiency test per (S, shape) is a masked subset check.
    """
    roots, nonroots = realizable_type_space(palette, m, k, type_guard)
    gamma: list[Descriptor] = list(roots) + list(nonroots)
    if 2 ** len(gamma) > subset_guard:
        raise GuardExceededError("type subset space", 2 ** len(gamma), subset_guard)
    index = {d: i for i, d in enumerate(gamma)}
    table = TypeTable(palette)
    by_tid: dict[TypeId, int] = {
        intern_descriptor(table, d): i for d, i in index.items()
    }

    shape_masks: list[tuple[RootedTree, list[int]]] = []
    for shape in _shapes_in_order(size_bound):
        space = palette.r ** (shape.size - 1)
        if space > colouring_guard:
            raise GuardExceededError("rooted colouring space", space, colouring_guard)
        masks: set[int] = set()
        for sigma in rooted_colourings(shape, palette):
            assign = compute_types(shape, sigma, m, k, table)
            mask = 0
            for tid in set(assign.arena):
                mask |= 1 << by_tid[tid]
            masks.add(mask)
        shape_masks.append((shape, sorted(masks)))

    out: dict[TypeSet, RootedTree] = {}
    for smask in range(2 ** len(gamma)):
        for shape, masks in shape_masks:
            if all(mask & ~smask for mask in masks):
                descs = frozenset(
                    gamma[i] for i in range(len(gamma)) if smask >> i & 1
                )
                out[TypeSet(descs, m)] = shape
                break
    return out


# ---------------------------------------------------------------------------
# manifest files


def dump_q_manifest(q_map: dict[TypeSet, RootedTree], palette: Palette) -> str:
    """One line per deficient set: space-separated canonical types, then
    ` | `, then the witness tree literal (placeholder colours)."""
    lines = ["# deficient type sets with minimal witness trees"]
    entries = []
    for s, tree in q_map.items():
        left = " ".join(s.strings()) if len(s) else "-"
        sigma = _placeholder_colouring(tree, palette)
        entries.append(f"{left} | {serialize_tree(tree, sigma)}")
    lines.extend(sorted(entries))
    return "\n".join(lines) + "\n"


def parse_q_manifest(text: str, palette: Palette, m: int) -> dict[TypeSet, RootedTree]:
    out: dict[TypeSet, RootedTree] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        left, _, right = line.partition(" | ")
        if not right:
            raise EhrlabError(f"manifest line lacks a witness: {line!r}")
        texts = [] if left.strip() == "-" else left.split()
        s = TypeSet.from_strings(texts, m)
        tree, _ = parse_tree(right, palette)
        out[s] = tree
    return out


def _placeholder_colouring(tree: RootedTree, palette: Palette) -> Colouring:
    values = tuple(
        ROOT_COLOUR if v == tree.root else 1 for v in range(tree.size)
    )
    return Colouring(palette, values)
