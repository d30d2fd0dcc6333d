"""Palettes and colourings of rooted trees.

A palette has colours c0..cr with c0 reserved for the root (a colouring is
"rooted" when c0 appears at the root and nowhere else).  An augmented palette
pairs every base colour with a depth marker: exact markers c'0..c'D0 for
depths up to D0, and beyond that the depth residue mod D, represented in the
centered window (-D/2, D/2].  Enhancing a rooted colouring records each
node's depth marker next to its colour; a colouring over the augmented
palette is "legal" when it arises that way, i.e. every marker matches the
node's actual depth and the base part is rooted.

Colourings of lasso trees carry the colours of the materialized arena plus an
eventually periodic description of the infinite tail (prefix then period).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import TYPE_CHECKING, Iterator

from .errors import (
    EhrlabError,
    NotRootedError,
    PaletteMismatchError,
    TreeSyntaxError,
)

if TYPE_CHECKING:  # structural use only; avoids an import cycle with trees
    from .trees import RootedTree

ROOT_COLOUR = 0

# Depth markers: ("fix", j) is the exact marker for depth j <= D0,
# ("mod", z) the centered residue z in (-D/2, D/2] for depths beyond D0.
Marker = tuple[str, int]


@dataclass(frozen=True)
class Palette:
    """Base colour set c0..cr; c0 is the distinguished root colour."""

    r: int

    def __post_init__(self):
        if self.r < 1:
            raise EhrlabError(f"palette needs r >= 1, got r={self.r}")

    @property
    def size(self) -> int:
        return self.r + 1

    def colour_name(self, idx: int) -> str:
        return f"c{idx}"

    def check_index(self, idx: int) -> None:
        if not 0 <= idx <= self.r:
            raise EhrlabError(f"colour index {idx} outside palette c0..c{self.r}")

    def non_root_colours(self) -> range:
        return range(1, self.r + 1)


def depth_marker(depth: int, D: int, D0: int) -> Marker:
    """Marker attached to a node of the given depth: exact up to D0, then the
    centered residue of depth mod D in (-D/2, D/2]."""
    if depth < 0:
        raise EhrlabError(f"negative depth {depth}")
    if depth <= D0:
        return ("fix", depth)
    z = depth % D
    if z > D // 2:
        z -= D
    return ("mod", z)


@dataclass(frozen=True)
class AugmentedPalette:
    """Base colours crossed with depth markers.

    Colour indices enumerate (base, marker) pairs: for each base colour, the
    fixed markers c'0..c'D0 first, then the residues ordered
    -D/2+1, ..., D/2.  Index 0 is (c0, c'0), the augmented root colour.
    """

    base: Palette
    D: int
    D0: int

    def __post_init__(self):
        if self.D < 2 or self.D % 2 != 0:
            raise EhrlabError(f"D must be even and >= 2, got {self.D}")
        if self.D0 < 0:
            raise EhrlabError(f"D0 must be >= 0, got {self.D0}")

    @property
    def markers_per_colour(self) -> int:
        return self.D0 + 1 + self.D

    @property
    def size(self) -> int:
        return self.base.size * self.markers_per_colour

    @property
    def r(self) -> int:
        # number of non-root colours, by analogy with Palette
        return self.size - 1

    def _marker_offset(self, marker: Marker) -> int:
        kind, value = marker
        if kind == "fix":
            if not 0 <= value <= self.D0:
                raise EhrlabError(f"fixed marker {value} outside 0..{self.D0}")
            return value
        if kind == "mod":
            half = self.D // 2
            if not -half < value <= half:
                raise EhrlabError(f"residue marker {value} outside (-{half}, {half}]")
            return self.D0 + 1 + (value + half - 1) % self.D
        raise EhrlabError(f"unknown marker kind {kind!r}")

    def index_of(self, base_colour: int, marker: Marker) -> int:
        self.base.check_index(base_colour)
        return base_colour * self.markers_per_colour + self._marker_offset(marker)

    def decompose(self, idx: int) -> tuple[int, Marker]:
        if not 0 <= idx < self.size:
            raise EhrlabError(f"augmented colour index {idx} outside palette")
        base, off = divmod(idx, self.markers_per_colour)
        if off <= self.D0:
            return base, ("fix", off)
        half = self.D // 2
        return base, ("mod", (off - self.D0 - 1) - half + 1)

    def marker_of_depth(self, depth: int) -> Marker:
        return depth_marker(depth, self.D, self.D0)

    def index_for_depth(self, base_colour: int, depth: int) -> int:
        return self.index_of(base_colour, self.marker_of_depth(depth))

    def colour_name(self, idx: int) -> str:
        base, (kind, value) = self.decompose(idx)
        mark = f"c'{value}" if kind == "fix" else str(value)
        return f"(c{base},{mark})"

    def check_index(self, idx: int) -> None:
        if not 0 <= idx < self.size:
            raise EhrlabError(f"colour index {idx} outside augmented palette")

    def non_root_colours(self) -> Iterator[int]:
        return iter(range(1, self.size))


@dataclass(frozen=True)
class Colouring:
    """Colour assignment for a tree's arena, plus tail colours for lasso trees.

    `values[v]` is the colour index of arena node v.  For a lasso tree the
    infinite tail below the attach leaf is coloured `tail_prefix` (steps
    1..len) and then `tail_period` repeated forever.  Finite trees leave both
    empty.
    """

    palette: Palette | AugmentedPalette
    values: tuple[int, ...]
    tail_prefix: tuple[int, ...] = ()
    tail_period: tuple[int, ...] = ()

    def colour_of(self, node: int) -> int:
        return self.values[node]

    def tail_colour(self, step: int) -> int:
        """Colour of the tail node `step` levels below the attach leaf (step >= 1)."""
        if step < 1:
            raise EhrlabError(f"tail step must be >= 1, got {step}")
        if not self.tail_period:
            raise EhrlabError("colouring has no tail data")
        if step <= len(self.tail_prefix):
            return self.tail_prefix[step - 1]
        return self.tail_period[(step - 1 - len(self.tail_prefix)) % len(self.tail_period)]

    @property
    def has_tail(self) -> bool:
        return bool(self.tail_period)

    def with_value(self, node: int, colour: int) -> "Colouring":
        vals = list(self.values)
        vals[node] = colour
        return Colouring(self.palette, tuple(vals), self.tail_prefix, self.tail_period)

    def validate_for(self, tree: "RootedTree") -> None:
        if len(self.values) != tree.size:
            raise EhrlabError(
                f"colouring covers {len(self.values)} nodes, tree has {tree.size}"
            )
        for v in self.values:
            self.palette.check_index(v)
        if tree.lasso is not None and not self.tail_period:
            raise EhrlabError("lasso tree needs tail colours")
        if tree.lasso is None and (self.tail_prefix or self.tail_period):
            raise EhrlabError("finite tree cannot carry tail colours")
        for v in self.tail_prefix + self.tail_period:
            self.palette.check_index(v)

    def is_rooted(self, tree: "RootedTree") -> bool:
        """True iff the distinguished colour appears at the root and only there."""
        root_idx = ROOT_COLOUR
        if self.values[tree.root] != root_idx:
            return False
        for v in range(len(self.values)):
            if v != tree.root and self.values[v] == root_idx:
                return False
        return all(c != root_idx for c in self.tail_prefix + self.tail_period)


def require_rooted(tree: "RootedTree", colouring: Colouring) -> None:
    colouring.validate_for(tree)
    if not colouring.is_rooted(tree):
        raise NotRootedError("colouring must put c0 at the root and nowhere else")


def require_same_palette(a: Colouring, b: Colouring) -> None:
    if a.palette != b.palette:
        raise PaletteMismatchError(f"palettes differ: {a.palette} vs {b.palette}")


def enhance(tree: "RootedTree", sigma: Colouring, aug: AugmentedPalette) -> Colouring:
    """Pair every node's colour with its depth marker.

    `sigma` must be rooted over `aug.base`.  For a lasso tree the enhanced tail
    is again eventually periodic: markers repeat with period D once the depth
    passes D0, so the combined period is lcm(base period, D).
    """
    if sigma.palette != aug.base:
        raise PaletteMismatchError("colouring palette does not match the base palette")
    require_rooted(tree, sigma)
    values = tuple(
        aug.index_for_depth(sigma.values[v], tree.depths[v]) for v in range(tree.size)
    )
    if tree.lasso is None:
        return Colouring(aug, values)
    d_attach = tree.depths[tree.lasso.attach]
    base_pre = len(sigma.tail_prefix)
    # prefix long enough that beyond it both the base colours and the markers
    # are purely periodic
    pre = max(base_pre, max(0, aug.D0 - d_attach))
    period = lcm(len(sigma.tail_period), aug.D)
    tail_prefix = tuple(
        aug.index_for_depth(sigma.tail_colour(s), d_attach + s) for s in range(1, pre + 1)
    )
    tail_period = tuple(
        aug.index_for_depth(sigma.tail_colour(s), d_attach + s)
        for s in range(pre + 1, pre + period + 1)
    )
    return Colouring(aug, values, tail_prefix, tail_period)


def strip_enhancement(tree: "RootedTree", tau: Colouring, aug: AugmentedPalette) -> Colouring:
    """Project an augmented colouring back to its base colours."""
    if tau.palette != aug:
        raise PaletteMismatchError("colouring is not over the given augmented palette")
    values = tuple(aug.decompose(c)[0] for c in tau.values)
    prefix = tuple(aug.decompose(c)[0] for c in tau.tail_prefix)
    period = tuple(aug.decompose(c)[0] for c in tau.tail_period)
    return Colouring(aug.base, values, prefix, period)


def is_legal(tree: "RootedTree", tau: Colouring, aug: AugmentedPalette) -> bool:
    """True iff `tau` is the enhancement of some rooted base colouring:
    every node's marker equals its depth marker and the base part is rooted."""
    if tau.palette != aug:
        raise PaletteMismatchError("colouring is not over the given augmented palette")
    tau.validate_for(tree)
    for v in range(tree.size):
        base, marker = aug.decompose(tau.values[v])
        if marker != aug.marker_of_depth(tree.depths[v]):
            return False
        if (base == ROOT_COLOUR) != (v == tree.root):
            return False
    if tree.lasso is not None:
        d_attach = tree.depths[tree.lasso.attach]
        # beyond this many steps both sides of the comparison are periodic
        steps = (
            len(tau.tail_prefix)
            + max(0, aug.D0 - d_attach)
            + lcm(len(tau.tail_period), aug.D)
            + aug.D
        )
        for s in range(1, steps + 1):
            base, marker = aug.decompose(tau.tail_colour(s))
            if marker != aug.marker_of_depth(d_attach + s):
                return False
            if base == ROOT_COLOUR:
                return False
    return True


def rooted_colourings(tree: "RootedTree", palette: Palette) -> Iterator[Colouring]:
    """All rooted colourings of a finite tree, in lexicographic order of the
    non-root colour vector."""
    from itertools import product

    if tree.lasso is not None:
        raise EhrlabError("enumeration over lasso trees is not supported")
    others = [v for v in range(tree.size) if v != tree.root]
    for combo in product(palette.non_root_colours(), repeat=len(others)):
        vals = [ROOT_COLOUR] * tree.size
        for v, c in zip(others, combo):
            vals[v] = c
        yield Colouring(palette, tuple(vals))


def random_rooted_colouring(tree: "RootedTree", palette: Palette, rng) -> Colouring:
    vals = [ROOT_COLOUR] * tree.size
    for v in range(tree.size):
        if v != tree.root:
            vals[v] = rng.randint(1, palette.r)
    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    if tree.lasso is not None:
        period = tuple(
            rng.randint(1, palette.r) for _ in tree.lasso.period_colours
        )
    return Colouring(palette, tuple(vals), prefix, period)


def parse_colouring_file(text: str, palette: Palette | AugmentedPalette, size: int) -> Colouring:
    """Standalone colouring files: one `nodeId colourIndex` pair per line,
    `#` comments, every arena node covered exactly once."""
    assigned: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TreeSyntaxError(f"line {lineno}: expected 'nodeId colourIndex'")
        try:
            node, colour = int(parts[0]), int(parts[1])
        except ValueError:
            raise TreeSyntaxError(f"line {lineno}: not integers: {line!r}") from None
        if node in assigned:
            raise TreeSyntaxError(f"line {lineno}: node {node} assigned twice")
        palette.check_index(colour)
        assigned[node] = colour
    missing = [v for v in range(size) if v not in assigned]
    if missing:
        raise TreeSyntaxError(f"colouring misses nodes {missing[:5]}")
    extra = [v for v in assigned if not 0 <= v < size]
    if extra:
        raise TreeSyntaxError(f"colouring mentions unknown nodes {extra[:5]}")
    return Colouring(palette, tuple(assigned[v] for v in range(size)))


def dump_colouring_file(colouring: Colouring) -> str:
    lines = [f"{v} {c}" for v, c in enumerate(colouring.values)]
    return "\n".join(lines) + "\n"
