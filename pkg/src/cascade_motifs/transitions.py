"""4-node to 5-node motif transitions between consecutive temporal networks.

A 4-node instance in ``N_{i-1}`` transitions into a 5-node instance in ``N_i``
when all four of its vertices lie in the 5-node instance and its pattern is a
subgraph of the 5-node pattern. Pattern pairs whose counts fall below the
per-pattern thresholds are skipped entirely.
"""
from __future__ import annotations

import csv
import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from typing import IO

from .errors import ContractViolation
from .motifs import MotifCensus, PatternId, _canonical_raw, _pairs, pattern_catalog


@lru_cache(maxsize=2)
def _relation_table(induced: bool) -> dict[tuple[PatternId, PatternId], bool]:
    """Containment for the full 6 x 21 catalog, computed once per mode.

    For each 5-pattern, every 4-vertex subset contributes its induced 4-pattern
    and, in the non-induced mode, every connected spanning edge subset of it.
    """
    cat4, cat5 = pattern_catalog(4), pattern_catalog(5)
    table = {(p4, p5): False for p4 in cat4 for p5 in cat5}
    for p5 in cat5:
        edges5 = set(p5.edges)
        for quad in itertools.combinations(range(5), 4):
            pos = {v: i for i, v in enumerate(quad)}
            sub = [(pos[a], pos[b]) for a, b in itertools.combinations(quad, 2) if (a, b) in edges5]
            choices = [sub] if induced else [
                list(c) for r in range(3, len(sub) + 1) for c in itertools.combinations(sub, r)]
            pairs = _pairs(4)
            for es in choices:
                raw = 0
                for e in es:
                    raw |= 1 << pairs.index(e)
                pid = _canonical_raw(4, raw)
                if pid is not None:
                    table[(pid, p5)] = True
    return table


def pattern_subgraph_relation(p4: PatternId, p5: PatternId, induced: bool = False) -> bool:
    """Whether ``p4`` embeds in ``p5`` (as a subgraph, or as an induced subgraph)."""
    if p4.k != 4 or p5.k != 5:
        raise ContractViolation(f"need a 4-node and a 5-node pattern, got k={p4.k} and k={p5.k}")
    return _relation_table(induced)[(p4, p5)]


@dataclass(frozen=True)
class TransitionThresholds:
    """Minimum counts per pattern; a pattern below its minimum is skipped."""

    min4: Mapping[PatternId, int] = field(default_factory=dict)
    min5: Mapping[PatternId, int] = field(default_factory=dict)
    default4: int = 0
    default5: int = 0

    def __post_init__(self):
        values = [self.default4, self.default5, *self.min4.values(), *self.min5.values()]
        if any(v < 0 for v in values):
            raise ContractViolation("transition thresholds must be non-negative")

    def keep4(self, p: PatternId, count: int) -> bool:
        return count >= self.min4.get(p, self.default4)

    def keep5(self, p: PatternId, count: int) -> bool:
        return count >= self.min5.get(p, self.default5)


@dataclass
class TransitionMatrix:
    counts: dict[tuple[PatternId, PatternId], int]
    pair: tuple[int | None, int | None] = (None, None)

    def get(self, p4: PatternId, p5: PatternId) -> int:
        return self.counts.get((p4, p5), 0)

    def column_sums(self) -> dict[PatternId, int]:
        """Transitions into each 5-pattern."""
        out: dict[PatternId, int] = {}
        for (_, p5), c in self.counts.items():
            out[p5] = out.get(p5, 0) + c
        return out


def _check(census: MotifCensus | None, k: int) -> MotifCensus:
    if census is None or census.k != k or census.instances is None:
        raise ContractViolation(f"need a size-{k} census with instances")
    return census


def count_transitions(census4_prev: MotifCensus, census5_curr: MotifCensus,
                      thresholds: TransitionThresholds = TransitionThresholds(),
                      induced: bool = False) -> TransitionMatrix:
    """Transition counts for every surviving (4-pattern, 5-pattern) pair.

    5-instances are indexed by their five vertex quadruples, so each 4-instance
    costs one lookup per 5-pattern instead of a scan over all 5-instances.
    """
    c4 = _check(census4_prev, 4)
    c5 = _check(census5_curr, 5)
    table = _relation_table(induced)
    by_quad: dict[PatternId, dict[frozenset, int]] = {}
    for p5, insts in c5.instances.items():
        index: dict[frozenset, int] = {}
        for inst in insts:
            for quad in itertools.combinations(inst, 4):
                key = frozenset(quad)
                index[key] = index.get(key, 0) + 1
        by_quad[p5] = index
    counts: dict[tuple[PatternId, PatternId], int] = {}
    for p4 in c4.patterns():
        if not thresholds.keep4(p4, c4.count(p4)):
            continue
        quads = [frozenset(m) for m in c4.instances[p4]]
        for p5 in c5.patterns():
            if not table[(p4, p5)] or not thresholds.keep5(p5, c5.count(p5)):
                continue
            index = by_quad[p5]
            counts[(p4, p5)] = sum(index.get(q, 0) for q in quads)
    return TransitionMatrix(counts, (c4.network_index, c5.network_index))


def transition_series(censuses4: Mapping[int, MotifCensus], censuses5: Mapping[int, MotifCensus],
                      steep_index: int, inhib_index: int,
                      thresholds: TransitionThresholds = TransitionThresholds(),
                      induced: bool = False) -> list[TransitionMatrix]:
    """One matrix per pair (N_{i-1}, N_i) for i from inhib down to steep+1, returned in increasing i."""
    if steep_index > inhib_index:
        raise ContractViolation("steep index after inhibition index")
    series = []
    for i in range(inhib_index, steep_index, -1):
        if i - 1 not in censuses4 or i not in censuses5:
            raise ContractViolation(f"missing census for pair ({i - 1}, {i})")
        series.append(count_transitions(censuses4[i - 1], censuses5[i], thresholds, induced))
    series.reverse()
    return series


TRANSITION_HEADER = ["pair_index", "pattern4", "pattern5", "count"]


def write_transitions(series: Iterable[TransitionMatrix], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(TRANSITION_HEADER)
    for m in series:
        for (p4, p5), c in sorted(m.counts.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())):
            w.writerow([m.pair[1], p4, p5, c])


def relation_matrix(induced: bool = False) -> list[list[bool]]:
    """Rows follow the 4-node catalog, columns the 5-node catalog."""
    t = _relation_table(induced)
    return [[t[(p4, p5)] for p5 in pattern_catalog(5)] for p4 in pattern_catalog(4)]
