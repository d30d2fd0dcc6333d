"""Vectorized depth-1 type machinery for mass duels on constructed pairs.

At type depth 1 a node's type is its colour plus the capped census of its
children's colours, which fits into a small mixed-radix fingerprint.  On a
constructed tree pair the whole colouring response and its verification then
reduce to table lookups over per-block colour codes, so a hundred thousand
sampled colourings can be judged exactly in seconds.  A slice of the samples
is replayed through the generic engines to guard the tables.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .colouring import ROOT_COLOUR, Colouring, Palette
from .constructions import (
    ConstructionLayout,
    ConstructionPlan,
    build_T1,
    build_T2,
    justification_report,
    plan_layout,
    types_game_response,
)
from .errors import EhrlabError, ResponseUnavailableError
from .games import Player, types_game_verdict
from .trees import RootedTree, canonical_code
from .types_engine import TypeId, TypeTable, compute_types


def fingerprint_space(palette: Palette, k: int) -> int:
    """Number of depth-1 fingerprint slots: colour times capped child census."""
    return palette.size * (k + 1) ** palette.size


def fingerprint(colour: int, child_colours, palette: Palette, k: int) -> int:
    """Mixed-radix encoding of a depth-1 type."""
    radix = k + 1
    counts = [0] * palette.size
    for c in child_colours:
        counts[c] = min(counts[c] + 1, k)
    out = colour
    for c in reversed(range(palette.size)):
        out = out * radix + counts[c]
    return out


def fingerprint_of_type(table: TypeTable, tid: TypeId, palette: Palette, k: int) -> int:
    """Fingerprint of a depth-1 type id from the generic engine."""
    colour, kids = table.entry(tid)
    radix = k + 1
    counts = [0] * palette.size
    for child, n in kids:
        child_colour, inner = table.entry(child)
        if inner:
            raise EhrlabError("fingerprints encode depth-1 types only")
        counts[child_colour] = min(n, k)
    out = colour
    for c in reversed(range(palette.size)):
        out = out * radix + counts[c]
    return out


def node_fingerprints(tree: RootedTree, sigma: Colouring, k: int) -> np.ndarray:
    """Depth-1 fingerprints of every arena node of a finite tree."""
    if tree.is_lasso:
        raise EhrlabError("fingerprints of lasso arenas need tail handling")
    palette = sigma.palette
    n = tree.size
    values = np.asarray(sigma.values, dtype=np.int64)
    parents = np.asarray([0] + [tree.parents[v] for v in range(1, n)], dtype=np.int64)
    radix = k + 1
    out = values * radix**palette.size
    weight = np.int64(1)
    for c in range(palette.size):
        cnt = np.bincount(parents[1:][values[1:] == c], minlength=n)
        out = out + np.minimum(cnt, k) * weight
        weight *= radix
    return out


@dataclass(frozen=True)
class _ShapeGroup:
    """Entries of the plan sharing one witness shape, with lookup tables over
    every colour code of a block (big-endian digits, node 0 most
    significant, digit+1 = colour)."""

    entry_indices: np.ndarray
    copies: int
    code_space: int
    type_counts: np.ndarray  # (codes, space) type counts inside a block
    root_colour: np.ndarray  # (codes,) colour of the block root
    root_type: np.ndarray  # (codes,) fingerprint of the block root
    tilde_realized: np.ndarray  # (codes, space) bool, root recoloured
    tilde_root_type: np.ndarray  # (codes,) fingerprint after recolouring


@dataclass(frozen=True)
class _Candidate:
    """One eventually periodic branch colouring, in generic search order."""

    prefix: tuple[int, ...]
    period: tuple[int, ...]
    branch_root_type: int
    first_colour: int
    mask: np.ndarray  # (space,) bool: branch root and all tail types
    tail_mask: np.ndarray  # (space,) bool: tail types only (root recoloured later)
    prefix_counts: np.ndarray  # (space,) counts contributed by prefix steps
    period_mask: np.ndarray  # (space,) bool: types of saturated period steps


def _tail_fingerprints(
    prefix: tuple[int, ...], period: tuple[int, ...], palette: Palette, k: int
) -> list[int]:
    """Depth-1 fingerprints of tail steps 1..len(prefix)+len(period)."""
    colours = list(prefix) + list(period)

    def colour_at(step: int) -> int:
        if step <= len(prefix):
            return colours[step - 1]
        return period[(step - 1 - len(prefix)) % len(period)]

    return [
        fingerprint(colour_at(s), (colour_at(s + 1),), palette, k)
        for s in range(1, len(colours) + 1)
    ]


def _block_tables(shape: RootedTree, palette: Palette, k: int, space: int):
    """Per-code lookup tables for one witness shape at depth 1."""
    r = palette.r
    codes = r**shape.size
    type_counts = np.zeros((codes, space), dtype=np.int32)
    root_colour = np.zeros(codes, dtype=np.int64)
    root_type = np.zeros(codes, dtype=np.int64)
    tilde_realized = np.zeros((codes, space), dtype=bool)
    tilde_root_type = np.zeros(codes, dtype=np.int64)
    table = TypeTable(palette)
    for code in range(codes):
        digits = []
        rest = code
        for _ in range(shape.size):
            digits.append(rest % r)
            rest //= r
        values = tuple(d + 1 for d in reversed(digits))
        sigma = Colouring(palette, values)
        assign = compute_types(shape, sigma, 1, k, table)
        for v in range(shape.size):
            type_counts[code, fingerprint_of_type(table, assign.arena[v], palette, k)] += 1
        root_colour[code] = values[0]
        root_type[code] = fingerprint_of_type(table, assign.arena[0], palette, k)
        tilde = Colouring(palette, (ROOT_COLOUR,) + values[1:])
        tassign = compute_types(shape, tilde, 1, k, table)
        for v in range(shape.size):
            tilde_realized[code, fingerprint_of_type(table, tassign.arena[v], palette, k)] = True
        tilde_root_type[code] = fingerprint_of_type(table, tassign.arena[0], palette, k)
    return type_counts, root_colour, root_type, tilde_realized, tilde_root_type


def _branch_candidates(palette: Palette, k: int, space: int) -> list[_Candidate]:
    """Eventually periodic tail colourings in the order the generic search
    tries them (prefix length, then period length, then colour tuples)."""
    bound = palette.r
    out: list[_Candidate] = []
    for p0 in range(bound + 1):
        for p in range(1, bound + 1):
            for combo in _colour_tuples(palette, p0 + p):
                prefix, period = combo[:p0], combo[p0:]
                tail = _tail_fingerprints(prefix, period, palette, k)
                root_fp = fingerprint(ROOT_COLOUR, (combo[0],), palette, k)
                tail_mask = np.zeros(space, dtype=bool)
                for fp in tail:
                    tail_mask[fp] = True
                mask = tail_mask.copy()
                mask[root_fp] = True
                prefix_counts = np.zeros(space, dtype=np.int32)
                for fp in tail[:p0]:
                    prefix_counts[fp] += 1
                period_mask = np.zeros(space, dtype=bool)
                for fp in tail[p0:]:
                    period_mask[fp] = True
                out.append(
                    _Candidate(
                        prefix,
                        period,
                        root_fp,
                        combo[0],
                        mask,
                        tail_mask,
                        prefix_counts,
                        period_mask,
                    )
                )
    return out


def _colour_tuples(palette: Palette, length: int):
    colours = list(palette.non_root_colours())
    out = [()]
    for _ in range(length):
        out = [t + (c,) for t in out for c in colours]
    return out


@dataclass(frozen=True)
class DuelReport:
    """Outcome of a sampled response duel.  Every counter past `wins` must be
    zero for the run to be clean."""

    samples: int
    wins: int
    step1_failures: int
    source_failures: int
    verdict_failures: int
    eta_failures: int
    path_failures: int
    hub_census_failures: int
    cross_checks: int
    first_failure: int | None
    elapsed_seconds: float

    @property
    def ok(self) -> bool:
        return self.wins == self.samples

    def to_lines(self) -> list[str]:
        return [
            f"samples {self.samples}",
            f"wins {self.wins}",
            f"step1-failures {self.step1_failures}",
            f"source-failures {self.source_failures}",
            f"verdict-failures {self.verdict_failures}",
            f"eta-failures {self.eta_failures}",
            f"path-failures {self.path_failures}",
            f"hub-census-failures {self.hub_census_failures}",
            f"cross-checks {self.cross_checks}",
            f"first-failure {'-' if self.first_failure is None else self.first_failure}",
            f"elapsed {self.elapsed_seconds:.1f}s",
        ]


class ResponseHarness:
    """Depth-1 response duel over a constructed pair with an infinite-path
    branch.

    Per sample the harness draws a uniform rooted colouring of the finite
    tree (path colours node by node, copy blocks as one uniform code each,
    which is the same distribution), replays the pigeonhole/branch-colouring
    response through the lookup tables, and checks the verdict and the
    justification counts.  Exact trunk duplication holds by construction
    here; the replayed cross-check samples confirm it through the generic
    engine, which also guards every table.
    """

    _CHUNK = 256

    def __init__(self, plan: ConstructionPlan, t2: RootedTree):
        if plan.m != 1:
            raise EhrlabError("the fast harness handles type depth 1 only")
        if not t2.is_lasso or t2.size != 1:
            raise EhrlabError("the fast harness needs an infinite-path branch")
        self.plan = plan
        self.palette = plan.palette
        self.k = plan.k
        self.space = fingerprint_space(plan.palette, plan.k)
        self.layout: ConstructionLayout = plan_layout(plan)
        self.t1 = build_T1(plan)
        self.t2_full = build_T2(plan, t2)
        self.n_entries = len(plan.entries)
        self.groups = self._build_groups()
        self.candidates = _branch_candidates(plan.palette, plan.k, self.space)
        self.cand_masks = np.stack([c.mask for c in self.candidates])
        self.cand_tail_masks = np.stack([c.tail_mask for c in self.candidates])
        self.cand_root_types = np.asarray(
            [c.branch_root_type for c in self.candidates], dtype=np.int64
        )
        self.cand_first_colours = np.asarray(
            [c.first_colour for c in self.candidates], dtype=np.int64
        )
        self.cand_prefix_counts = np.stack([c.prefix_counts for c in self.candidates])
        self.cand_period_masks = np.stack([c.period_mask for c in self.candidates])

    def _build_groups(self) -> list[_ShapeGroup]:
        by_shape: dict = {}
        order: list = []
        for index, (_, witness) in enumerate(self.plan.entries):
            key = canonical_code(witness)
            if key not in by_shape:
                by_shape[key] = (witness, [])
                order.append(key)
            by_shape[key][1].append(index)
        groups = []
        for key in order:
            witness, indices = by_shape[key]
            tables = _block_tables(witness, self.palette, self.k, self.space)
            groups.append(
                _ShapeGroup(
                    entry_indices=np.asarray(indices, dtype=np.int64),
                    copies=self.plan.k * self.palette.r**witness.size,
                    code_space=self.palette.r**witness.size,
                    type_counts=tables[0],
                    root_colour=tables[1],
                    root_type=tables[2],
                    tilde_realized=tables[3],
                    tilde_root_type=tables[4],
                )
            )
        return groups

    def _generator(self, sample: int, seed: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(sample,)))

    def _draw(self, sample: int, seed: int):
        """Path colours and per-group block codes of one sample; the draw
        order (path first, then groups by first appearance) is part of the
        reproducibility contract."""
        gen = self._generator(sample, seed)
        path = gen.integers(1, self.palette.r + 1, size=self.plan.path_length)
        codes = [
            gen.integers(0, g.code_space, size=(len(g.entry_indices), g.copies))
            for g in self.groups
        ]
        return path, codes

    def reconstruct_colouring(self, sample: int, seed: int) -> Colouring:
        """The sampled rooted colouring of the finite tree, node by node."""
        path, codes = self._draw(sample, seed)
        values = [ROOT_COLOUR] * self.t1.size
        for i in range(self.plan.path_length):
            values[1 + i] = int(path[i])
        r = self.palette.r
        for group, group_codes in zip(self.groups, codes):
            for row, entry in enumerate(group.entry_indices):
                slices = self.layout.copy_slices[entry]
                for copy, (start, size) in enumerate(slices):
                    rest = int(group_codes[row, copy])
                    digits = []
                    for _ in range(size):
                        digits.append(rest % r)
                        rest //= r
                    for j, d in enumerate(reversed(digits)):
                        values[start + j] = d + 1
        return Colouring(self.palette, tuple(values))

    def run(self, samples: int, seed: int, cross_check_every: int = 5000) -> DuelReport:
        """Judge `samples` seeded colourings; see DuelReport for the tally."""
        if samples < 1:
            raise EhrlabError(f"samples must be >= 1, got {samples}")
        started = time.monotonic()
        k, space = self.k, self.space
        radix = k + 1
        colour_weight = np.asarray(
            [radix**c for c in range(self.palette.size)], dtype=np.int64
        )
        tally = {
            "step1": 0,
            "source": 0,
            "verdict": 0,
            "eta": 0,
            "path": 0,
            "hub": 0,
        }
        wins = 0
        first_failure: int | None = None
        cross_checks = 0
        for lo in range(0, samples, self._CHUNK):
            hi = min(lo + self._CHUNK, samples)
            chunk = hi - lo
            paths = np.zeros((chunk, self.plan.path_length), dtype=np.int64)
            group_codes = [
                np.zeros((chunk, len(g.entry_indices), g.copies), dtype=np.int64)
                for g in self.groups
            ]
            for i in range(chunk):
                path, codes = self._draw(lo + i, seed)
                paths[i] = path
                for g, c in zip(group_codes, codes):
                    g[i] = c

            below1 = np.zeros((chunk, space), dtype=np.int64)
            hub_colour_counts = np.zeros((chunk, self.palette.size), dtype=np.int64)
            root_type_counts = np.zeros((chunk, space), dtype=np.int64)
            x_mask = np.zeros((chunk, space), dtype=bool)
            chosen_root_colour = np.zeros((chunk, self.n_entries), dtype=np.int64)
            tilde_roots = np.zeros((chunk, self.n_entries), dtype=np.int64)
            rows = np.arange(chunk)
            for group, codes in zip(self.groups, group_codes):
                counts = (
                    codes[:, :, :, None] == np.arange(group.code_space)[None, None, None, :]
                ).sum(axis=2)
                if not (counts >= k).any(axis=2).all():
                    raise EhrlabError("pigeonhole failed inside the fast harness")
                chosen = np.argmax(counts >= k, axis=2)
                code_totals = counts.sum(axis=1)
                below1 += code_totals @ group.type_counts
                for c in range(1, self.palette.size):
                    hub_colour_counts[:, c] += code_totals[
                        :, group.root_colour == c
                    ].sum(axis=1)
                onehot_root = np.zeros((group.code_space, space), dtype=np.int64)
                onehot_root[np.arange(group.code_space), group.root_type] = 1
                root_type_counts += code_totals @ onehot_root
                x_mask |= group.tilde_realized[chosen].any(axis=1)
                chosen_root_colour[:, group.entry_indices] = group.root_colour[chosen]
                tilde_roots[:, group.entry_indices] = group.tilde_root_type[chosen]

            # branch colouring: first candidate whose types stay inside X
            violations = (~x_mask).astype(np.int64) @ self.cand_masks.T.astype(np.int64)
            cand_ok = violations == 0
            step1_found = cand_ok.any(axis=1)
            cand = np.argmax(cand_ok, axis=1)
            gamma = self.cand_root_types[cand]

            # first entry whose recoloured root realizes the branch root type
            match = tilde_roots == gamma[:, None]
            source_found = match.any(axis=1)
            source = np.argmax(match, axis=1)
            v_colour = chosen_root_colour[rows, source]
            v_fp = (
                v_colour * radix**self.palette.size
                + colour_weight[self.cand_first_colours[cand]]
            )

            # shared trunk contributions (identical in both trees)
            trunk = np.zeros((chunk, space), dtype=np.int64)
            cols = np.concatenate(
                [np.zeros((chunk, 1), dtype=np.int64), paths], axis=1
            )
            for i in range(self.plan.path_length):
                fp = cols[:, i] * radix**self.palette.size + colour_weight[cols[:, i + 1]]
                np.add.at(trunk, (rows, fp), 1)

            hub_capped = np.minimum(hub_colour_counts, k)
            hub1_fp = cols[:, -1] * radix**self.palette.size + hub_capped @ colour_weight
            hub2_counts = hub_colour_counts.copy()
            np.add.at(hub2_counts, (rows, v_colour), 1)
            hub2_fp = (
                cols[:, -1] * radix**self.palette.size
                + np.minimum(hub2_counts, k) @ colour_weight
            )

            total1 = below1 + trunk
            np.add.at(total1, (rows, hub1_fp), 1)
            census1 = np.minimum(total1, k)

            below2 = below1 + self.cand_prefix_counts[cand]
            np.add.at(below2, (rows, v_fp), 1)
            period_sel = self.cand_period_masks[cand]
            total2 = below2 + trunk
            np.add.at(total2, (rows, hub2_fp), 1)
            census2 = np.where(period_sel, k, np.minimum(total2, k))

            verdict_ok = (census1 == census2).all(axis=1)
            path_ok = hub1_fp == hub2_fp
            hub_ok = root_type_counts[rows, v_fp] >= k

            branch_mask = self.cand_tail_masks[cand].copy()
            branch_mask[rows, v_fp] = True
            below2_capped = np.where(period_sel, k + 1, np.minimum(below2, k + 1))
            eta_ok = (
                ~branch_mask | ((below1 >= k) & (below2_capped >= k + 1))
            ).all(axis=1)

            clean = (
                step1_found & source_found & verdict_ok & path_ok & hub_ok & eta_ok
            )
            wins += int(clean.sum())
            responded = step1_found & source_found
            tally["step1"] += int((~step1_found).sum())
            tally["source"] += int((step1_found & ~source_found).sum())
            tally["verdict"] += int((responded & ~verdict_ok).sum())
            tally["eta"] += int((responded & ~eta_ok).sum())
            tally["path"] += int((responded & ~path_ok).sum())
            tally["hub"] += int((responded & ~hub_ok).sum())
            if first_failure is None and not clean.all():
                first_failure = lo + int(np.argmax(~clean))

            for i in range(chunk):
                if (lo + i) % cross_check_every == 0:
                    self._cross_check(
                        lo + i,
                        seed,
                        bool(clean[i]),
                        int(cand[i]),
                        int(v_colour[i]),
                        bool(step1_found[i]),
                    )
                    cross_checks += 1
        return DuelReport(
            samples=samples,
            wins=wins,
            step1_failures=tally["step1"],
            source_failures=tally["source"],
            verdict_failures=tally["verdict"],
            eta_failures=tally["eta"],
            path_failures=tally["path"],
            hub_census_failures=tally["hub"],
            cross_checks=cross_checks,
            first_failure=first_failure,
            elapsed_seconds=time.monotonic() - started,
        )

    def _cross_check(
        self,
        sample: int,
        seed: int,
        fast_clean: bool,
        cand_index: int,
        v_colour: int,
        step1_found: bool,
    ) -> None:
        """Replay one sample through the generic engines and compare."""
        sigma1 = self.reconstruct_colouring(sample, seed)
        if not step1_found:
            try:
                types_game_response(self.t1, sigma1, self.plan, self.t2_full, verify=False)
            except ResponseUnavailableError:
                return
            raise EhrlabError(
                f"fast duel disagrees with the generic engine at sample {sample}"
            )
        sigma2 = types_game_response(
            self.t1, sigma1, self.plan, self.t2_full, verify=False
        )
        candidate = self.candidates[cand_index]
        branch_root = self.layout.branch_root
        agree = (
            step1_found
            and sigma2.tail_prefix == candidate.prefix
            and sigma2.tail_period == candidate.period
            and sigma2.values[branch_root] == v_colour
        )
        verdict = types_game_verdict(
            self.t1, sigma1, self.t2_full, sigma2, self.plan.m, self.plan.k
        )
        report = justification_report(self.t1, sigma1, self.t2_full, sigma2, self.plan)
        generic_clean = verdict.winner is Player.DUPLICATOR and report.ok
        if not agree or generic_clean != fast_clean:
            raise EhrlabError(
                f"fast duel disagrees with the generic engine at sample {sample}"
            )
