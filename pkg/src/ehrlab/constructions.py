"""Witness-forest tree pairs, the colouring response that wins the types
game on them, and Galton-Watson sampling.

The finite tree hangs, below a path of length L, a block of copies of every
deficient set's witness tree; the infinite variant adds one extra branch under
the end of the path.  Duplicator's response recolours that branch inside an
adequate type set assembled from the copies, so the truncated type censuses of
the two coloured trees coincide.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .colouring import ROOT_COLOUR, Colouring, Palette, require_rooted
from .deficiency import TypeSet, find_S_colouring, is_deficient
from .errors import (
    ConstructionError,
    EhrlabError,
    GuardExceededError,
    LassoUnsupportedError,
    PaletteMismatchError,
    ResponseUnavailableError,
)
from .trees import Lasso, RootedTree, TreeBuilder, canonical_code, subtree_with_map
from .types_engine import TypeId, TypeTable, compute_types


def count_colourings_N(tree: RootedTree, palette: Palette) -> int:
    """Number of colourings of a finite tree by non-root colours only."""
    if tree.is_lasso:
        raise LassoUnsupportedError("colouring counts are for finite trees")
    return palette.r**tree.size


@dataclass(frozen=True)
class ConstructionPlan:
    """Parameters of the paired construction.

    `entries` maps each deficient type set to its witness tree, in canonical
    order (sorted by type strings); every witness is re-verified deficient for
    its set at depth m and cutoff k, so a plan object is evidence, not intent.
    """

    path_length: int
    k: int
    entries: tuple[tuple[TypeSet, RootedTree], ...]
    palette: Palette
    m: int
    node_budget: int = 1_000_000

    def __post_init__(self):
        if self.path_length < 1:
            raise ConstructionError("path length must be >= 1")
        if self.k < 1:
            raise ConstructionError("cutoff k must be >= 1")
        if self.m < 0:
            raise ConstructionError("type depth m must be >= 0")
        if self.node_budget < 1:
            raise ConstructionError("node budget must be >= 1")
        keys = [s.strings() for s, _ in self.entries]
        if keys != sorted(keys):
            raise ConstructionError("entries must be in canonical order")
        if len(set(map(tuple, keys))) != len(keys):
            raise ConstructionError("duplicate type set in plan")
        for s, witness in self.entries:
            if s.m != self.m:
                raise ConstructionError(
                    f"type set of depth {s.m} in a depth-{self.m} plan"
                )
            if witness.is_lasso:
                raise ConstructionError("witness trees must be finite")
            if not is_deficient(s, witness, self.palette, self.m, self.k):
                raise ConstructionError(
                    f"witness of {len(witness)} nodes is not deficient for "
                    f"{{{' '.join(s.strings()) or '-'}}}"
                )

    @classmethod
    def create(
        cls,
        path_length: int,
        k: int,
        q_map: dict[TypeSet, RootedTree],
        palette: Palette,
        m: int | None = None,
        node_budget: int = 1_000_000,
    ) -> "ConstructionPlan":
        """Build a plan from a witness map, deriving m from its keys."""
        depths = {s.m for s in q_map}
        if len(depths) > 1:
            raise ConstructionError("witness map mixes type depths")
        if m is None:
            if not depths:
                raise ConstructionError("empty witness map needs an explicit m")
            m = depths.pop()
        elif depths and depths != {m}:
            raise ConstructionError("explicit m disagrees with the witness map")
        entries = tuple(sorted(q_map.items(), key=lambda kv: kv[0].strings()))
        return cls(path_length, k, entries, palette, m, node_budget)

    def copies_of(self, index: int) -> int:
        """How many copies of entry `index`'s witness hang below the path."""
        _, witness = self.entries[index]
        return self.k * count_colourings_N(witness, self.palette)


@dataclass(frozen=True)
class ConstructionLayout:
    """Node-id geometry of a built tree: which ids form the path and which
    contiguous slices hold each witness copy.  The infinite variant appends
    its extra branch immediately after, rooted at id `total`."""

    path: tuple[int, ...]
    copy_slices: tuple[tuple[tuple[int, int], ...], ...]
    total: int

    @property
    def hub(self) -> int:
        """The last path node, under which all copies hang."""
        return self.path[-1]

    @property
    def branch_root(self) -> int:
        return self.total


def plan_layout(plan: ConstructionPlan) -> ConstructionLayout:
    path = tuple(range(plan.path_length + 1))
    nxt = plan.path_length + 1
    all_slices: list[tuple[tuple[int, int], ...]] = []
    for index, (_, witness) in enumerate(plan.entries):
        slices = []
        for _ in range(plan.copies_of(index)):
            slices.append((nxt, witness.size))
            nxt += witness.size
        all_slices.append(tuple(slices))
    return ConstructionLayout(path=path, copy_slices=tuple(all_slices), total=nxt)


def _build_trunk(plan: ConstructionPlan, layout: ConstructionLayout) -> TreeBuilder:
    builder = TreeBuilder()
    node = 0
    for _ in range(plan.path_length):
        node = builder.add_child(node)
    hub = node
    for index, (_, witness) in enumerate(plan.entries):
        for start, _ in layout.copy_slices[index]:
            root = builder.add_child(hub)
            if root != start:
                raise ConstructionError("layout drifted from the builder")
            for j in range(1, witness.size):
                builder.add_child(start + witness.parents[j])
    return builder


def build_T1(plan: ConstructionPlan) -> RootedTree:
    """The finite tree: a path, then every witness copied k*N times."""
    layout = plan_layout(plan)
    if layout.total > plan.node_budget:
        raise GuardExceededError("construction nodes", layout.total, plan.node_budget)
    return _build_trunk(plan, layout).build()


def build_T2(plan: ConstructionPlan, t2: RootedTree) -> RootedTree:
    """The infinite variant: same trunk plus one extra branch carrying t2."""
    if not t2.is_lasso:
        raise ConstructionError("the extra branch must be an infinite (lasso) tree")
    layout = plan_layout(plan)
    total = layout.total + t2.size
    if total > plan.node_budget:
        raise GuardExceededError("construction nodes", total, plan.node_budget)
    builder = _build_trunk(plan, layout)
    base = builder.add_child(layout.hub)
    for j in range(1, t2.size):
        builder.add_child(base + t2.parents[j])
    lasso = Lasso(base + t2.lasso.attach, t2.lasso.period_colours)
    return builder.build(lasso=lasso)


def _check_finite_shape(tree: RootedTree, plan: ConstructionPlan, layout: ConstructionLayout) -> None:
    if tree.is_lasso or tree.size != layout.total:
        raise ConstructionError("finite tree does not match its plan")
    if tree.parents != _build_trunk(plan, layout).build().parents:
        raise ConstructionError("finite tree does not match its plan")


def _check_infinite_shape(tree: RootedTree, t1: RootedTree, layout: ConstructionLayout) -> None:
    base = layout.total
    ok = (
        tree.is_lasso
        and tree.size > base
        and tree.parents[:base] == t1.parents
        and tree.parents[base] == layout.hub
        and all(tree.parents[g] >= base for g in range(base + 1, tree.size))
        and tree.lasso.attach >= base
    )
    if not ok:
        raise ConstructionError("infinite tree does not extend the plan's trunk")


def types_game_response(
    t1: RootedTree,
    sigma1: Colouring,
    plan: ConstructionPlan,
    t2_full: RootedTree,
    verify: bool = True,
    step1_guard: int = 2_000_000,
) -> Colouring:
    """Duplicator's colouring of the infinite tree against sigma1.

    Copies sigma1 onto the shared trunk, then colours the extra branch inside
    the union of the type sets realized by the pigeonholed witness copies.
    Raises ResponseUnavailableError when the bounded periodic search over the
    branch finds no admissible colouring, and ConstructionError when the
    inputs do not fit the plan.  With `verify` the justification report is
    required clean before the colouring is returned.
    """
    layout = plan_layout(plan)
    _check_finite_shape(t1, plan, layout)
    _check_infinite_shape(t2_full, t1, layout)
    if sigma1.palette != plan.palette:
        raise PaletteMismatchError("colouring palette differs from the plan's")
    require_rooted(t1, sigma1)
    m, k = plan.m, plan.k

    # pigeonhole: within each entry's block some colour tuple repeats >= k
    # times; recolouring its root gives a rooted colouring of the witness
    chosen: list[tuple[int, ...]] = []
    tilded: list[Colouring] = []
    union: TypeSet | None = None
    for index, (_, witness) in enumerate(plan.entries):
        counts: Counter = Counter()
        for start, size in layout.copy_slices[index]:
            counts[sigma1.values[start : start + size]] += 1
        eligible = [t for t, c in counts.items() if c >= k]
        if not eligible:
            raise ConstructionError("pigeonhole failed; tree does not match its plan")
        best = min(eligible)
        chosen.append(best)
        tilde = Colouring(plan.palette, (ROOT_COLOUR,) + best[1:])
        tilded.append(tilde)
        realized = TypeSet.of_realized(witness, tilde, m, k)
        union = realized if union is None else union.union(realized)
    if union is None:
        raise ResponseUnavailableError("an empty plan admits no adequate type set")

    branch_root = layout.branch_root
    branch, _, mapping = subtree_with_map(t2_full, branch_root)
    tilde2 = find_S_colouring(
        union, branch, plan.palette, m, k, colouring_guard=step1_guard
    )
    if tilde2 is None:
        raise ResponseUnavailableError(
            "no branch colouring realizes only pigeonholed types within the "
            "periodic search class"
        )

    # the branch root's type has the root colour, which each recoloured
    # witness realizes only at its own root; match it there
    table = TypeTable(plan.palette)
    gamma = compute_types(branch, tilde2, m, k, table).type_of(0)
    source: int | None = None
    for index, (_, witness) in enumerate(plan.entries):
        if compute_types(witness, tilded[index], m, k, table).type_of(0) == gamma:
            source = index
            break
    if source is None:
        raise ConstructionError("branch root type escaped the pigeonholed sets")

    values = list(sigma1.values) + [0] * (t2_full.size - t1.size)
    for node, local in mapping.items():
        values[node] = tilde2.values[local]
    values[branch_root] = chosen[source][0]
    sigma2 = Colouring(
        plan.palette, tuple(values), tilde2.tail_prefix, tilde2.tail_period
    )
    sigma2.validate_for(t2_full)
    if verify:
        report = justification_report(t1, sigma1, t2_full, sigma2, plan)
        if not report.ok:
            raise ConstructionError(
                "response failed its justification: " + "; ".join(report.problems)
            )
    return sigma2


@dataclass(frozen=True)
class JustificationReport:
    """Outcome of the three per-run response checks: exact trunk duplication,
    branch-type counts (>= k finite side, >= k+1 infinite side), and equal
    path types."""

    problems: tuple[str, ...]
    types_checked: int

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_lines(self) -> list[str]:
        if self.ok:
            return [f"justification clean ({self.types_checked} branch types checked)"]
        return list(self.problems)


def justification_report(
    t1: RootedTree,
    sigma1: Colouring,
    t2_full: RootedTree,
    sigma2: Colouring,
    plan: ConstructionPlan,
) -> JustificationReport:
    """Machine-check why the response wins, without computing the verdict."""
    layout = plan_layout(plan)
    _check_finite_shape(t1, plan, layout)
    _check_infinite_shape(t2_full, t1, layout)
    sigma1.validate_for(t1)
    sigma2.validate_for(t2_full)
    if sigma1.palette != sigma2.palette or sigma1.palette != plan.palette:
        raise PaletteMismatchError("justification needs one palette throughout")
    m, k = plan.m, plan.k
    hub = layout.hub
    problems: list[str] = []

    for i in layout.path:
        if sigma2.values[i] != sigma1.values[i]:
            problems.append(f"path colour differs at depth {i}")
    for index in range(len(plan.entries)):
        for copy, (start, size) in enumerate(layout.copy_slices[index]):
            if sigma2.values[start : start + size] != sigma1.values[start : start + size]:
                problems.append(f"copy {copy} of entry {index} is not an exact duplicate")

    table = TypeTable(plan.palette)
    a1 = compute_types(t1, sigma1, m, k, table)
    a2 = compute_types(t2_full, sigma2, m, k, table)

    for i in layout.path:
        if a1.arena[i] != a2.arena[i]:
            problems.append(f"path types differ at depth {i}")

    # the hubs must agree one level deeper than the game compares, which is
    # exactly equality of their capped child censuses
    census1: Counter = Counter(a1.arena[ch] for ch in t1.children[hub])
    census2: Counter = Counter(a2.arena[ch] for ch in t2_full.children[hub])
    capped1 = {t: min(n, k) for t, n in census1.items()}
    capped2 = {t: min(n, k) for t, n in census2.items()}
    if capped1 != capped2:
        problems.append("hub child censuses differ")

    # every type the branch realizes must already be frequent under both hubs
    below1: Counter = Counter(a1.arena[g] for g in range(hub + 1, t1.size))
    below2: Counter = Counter(a2.arena[g] for g in range(hub + 1, t2_full.size))
    p0 = a2.tail_prefix_len
    p = a2.tail_period_len
    for step in range(1, p0 + 1):
        below2[a2.tail_type(step)] += 1
    saturated = {a2.tail_type(step) for step in range(p0 + 1, p0 + p + 1)}
    capped_below2 = {t: min(n, k + 1) for t, n in below2.items()}
    for t in saturated:
        capped_below2[t] = k + 1

    branch_types: set[TypeId] = {
        a2.arena[g] for g in range(layout.branch_root, t2_full.size)
    }
    branch_types.update(a2.tail_type(step) for step in range(1, p0 + p + 1))
    for t in sorted(branch_types, key=table.type_string):
        if below1.get(t, 0) < k:
            problems.append(
                f"branch type {table.type_string(t)} appears only "
                f"{below1.get(t, 0)} < {k} times under the finite hub"
            )
        if capped_below2.get(t, 0) < k + 1:
            problems.append(
                f"branch type {table.type_string(t)} appears fewer than "
                f"{k + 1} times under the infinite hub"
            )
    return JustificationReport(tuple(problems), len(branch_types))


# ---------------------------------------------------------------------------
# Galton-Watson sampling

_PMF_TOLERANCE = 1e-12


@dataclass(frozen=True)
class OffspringLaw:
    """Child-count distribution: Poisson, geometric (counting failures), or
    an explicit finite table.  `param` is the mean for Poisson and the
    success probability for geometric."""

    kind: str
    param: float = 0.0
    pmf: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "poisson":
            if not self.param > 0:
                raise EhrlabError("poisson mean must be positive")
        elif self.kind == "geometric":
            if not 0 < self.param < 1:
                raise EhrlabError("geometric parameter must lie in (0, 1)")
        elif self.kind == "explicit":
            if not self.pmf:
                raise EhrlabError("explicit law needs at least one entry")
            if any(q < 0 for q in self.pmf):
                raise EhrlabError("probabilities must be non-negative")
            if abs(sum(self.pmf) - 1.0) > _PMF_TOLERANCE:
                raise EhrlabError(
                    f"probabilities sum to {sum(self.pmf)}, not 1"
                )
        else:
            raise EhrlabError(f"unknown offspring law kind {self.kind!r}")

    @classmethod
    def poisson(cls, mean: float) -> "OffspringLaw":
        return cls("poisson", param=float(mean))

    @classmethod
    def geometric(cls, success: float) -> "OffspringLaw":
        return cls("geometric", param=float(success))

    @classmethod
    def explicit(cls, pmf) -> "OffspringLaw":
        return cls("explicit", pmf=tuple(float(q) for q in pmf))

    @property
    def full_support(self) -> bool:
        """True when every child count has positive probability."""
        return self.kind in ("poisson", "geometric")

    def probability(self, count: int) -> float:
        if count < 0:
            return 0.0
        if self.kind == "poisson":
            lam = self.param
            return math.exp(-lam) * lam**count / math.factorial(count)
        if self.kind == "geometric":
            return (1 - self.param) ** count * self.param
        return self.pmf[count] if count < len(self.pmf) else 0.0

    def describe(self) -> str:
        if self.kind == "poisson":
            return f"poisson(mean={self.param:g})"
        if self.kind == "geometric":
            return f"geometric(success={self.param:g})"
        return "explicit(" + ",".join(f"{q:g}" for q in self.pmf) + ")"

    def sample_counts(self, gen: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "poisson":
            return gen.poisson(self.param, size)
        if self.kind == "geometric":
            return gen.geometric(self.param, size) - 1
        cum = np.cumsum(self.pmf)
        idx = np.searchsorted(cum, gen.random(size), side="right")
        return np.minimum(idx, len(self.pmf) - 1)


def _sample_offspring_lists(
    gen: np.random.Generator,
    law: OffspringLaw,
    max_depth: int,
    node_budget: int,
    prune_above: int | None = None,
) -> list[list[int]] | None:
    """Children lists of one sampled tree cut at max_depth; draws happen one
    generation at a time in breadth-first order.  Returns None as soon as the
    node count exceeds `prune_above` (the sample cannot match any target of
    that size)."""
    children: list[list[int]] = [[]]
    frontier = [0]
    for _ in range(max_depth):
        if not frontier:
            break
        counts = law.sample_counts(gen, len(frontier))
        grown = len(children) + int(counts.sum())
        if grown > node_budget:
            raise GuardExceededError("sampled nodes", grown, node_budget)
        if prune_above is not None and grown > prune_above:
            return None
        nxt: list[int] = []
        for node, c in zip(frontier, counts):
            for _ in range(int(c)):
                fresh = len(children)
                children[node].append(fresh)
                children.append([])
                nxt.append(fresh)
        frontier = nxt
    return children


def _lists_to_tree(children: list[list[int]]) -> RootedTree:
    builder = TreeBuilder()
    mapping = {0: 0}
    queue = [0]
    qi = 0
    while qi < len(queue):
        node = queue[qi]
        qi += 1
        for ch in children[node]:
            mapping[ch] = builder.add_child(mapping[node])
            queue.append(ch)
    return builder.build()


def _shape_code(children: list[list[int]], node: int = 0) -> tuple:
    kids = tuple(sorted(_shape_code(children, ch) for ch in children[node]))
    return (0, kids)


def gw_sample(
    law: OffspringLaw, max_depth: int, seed: int, node_budget: int = 1_000_000
) -> RootedTree:
    """One branching-process tree truncated at max_depth, reproducible from
    the seed.  Growth past the node budget raises rather than thrashing."""
    if max_depth < 0:
        raise EhrlabError(f"max_depth must be >= 0, got {max_depth}")
    gen = np.random.default_rng(seed)
    children = _sample_offspring_lists(gen, law, max_depth, node_budget)
    return _lists_to_tree(children)


@dataclass(frozen=True)
class TruncationEstimate:
    """Monte Carlo estimate of hitting a given truncated shape, with a Wilson
    score interval."""

    law: str
    target: str
    depth: int
    samples: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float

    def to_lines(self) -> list[str]:
        return [
            f"law {self.law}",
            f"target {self.target}",
            f"depth {self.depth}",
            f"samples {self.samples}",
            f"successes {self.successes}",
            f"estimate {self.estimate:.6g}",
            f"ci [{self.ci_low:.6g}, {self.ci_high:.6g}]",
        ]


def _wilson(successes: int, samples: int, z: float) -> tuple[float, float]:
    phat = successes / samples
    denom = 1 + z * z / samples
    centre = (phat + z * z / (2 * samples)) / denom
    half = z * math.sqrt(phat * (1 - phat) / samples + z * z / (4 * samples * samples)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _shape_literal(tree: RootedTree) -> str:
    def emit(v: int) -> str:
        inner = ",".join(emit(ch) for ch in tree.children[v])
        return f"({inner})" if inner else "()"

    return emit(tree.root)


def estimate_truncation_probability(
    law: OffspringLaw,
    t_target: RootedTree,
    n: int,
    samples: int,
    seed: int,
    z: float = 1.96,
    node_budget: int = 1_000_000,
) -> TruncationEstimate:
    """Probability that the branching-process tree, truncated at depth n,
    is isomorphic to t_target as an uncoloured rooted tree."""
    if t_target.is_lasso:
        raise LassoUnsupportedError("the target shape must be finite")
    if n < 0:
        raise EhrlabError(f"depth must be >= 0, got {n}")
    if samples < 1:
        raise EhrlabError(f"samples must be >= 1, got {samples}")
    if t_target.height() > n:
        # unreachable target: a depth-n truncation never has deeper nodes
        return TruncationEstimate(
            law.describe(), _shape_literal(t_target), n, samples, 0, 0.0, 0.0, 0.0
        )
    target_code = canonical_code(t_target)
    gen = np.random.default_rng(seed)
    successes = 0
    for _ in range(samples):
        children = _sample_offspring_lists(
            gen, law, n, node_budget, prune_above=t_target.size
        )
        if children is not None and _shape_code(children) == target_code:
            successes += 1
    low, high = _wilson(successes, samples, z)
    return TruncationEstimate(
        law.describe(),
        _shape_literal(t_target),
        n,
        samples,
        successes,
        successes / samples,
        low,
        high,
    )
