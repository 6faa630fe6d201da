"""Degree-preserving null models and motif z-scores.

Randomisation repeatedly picks two edges (a, b), (c, d) and rewires them to
(a, d), (b, c), rejecting any swap that would create a self-loop or a parallel
edge. Every vertex keeps its degree.
"""
from __future__ import annotations

import csv
import math
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import IO, Any

import numpy as np

from .errors import ConfigError, RandomizationWarning
from .motifs import MotifCensus, PatternId, motif_census, pattern_catalog

Z_SENTINEL = 1e9
P_THRESHOLD = 0.01
Z_THRESHOLD = 2.0


@dataclass
class SimpleGraph:
    """Plain undirected graph; enough of an interface for the census code."""

    nodes: list[Any]
    edges: list[tuple[Any, Any]]

    @classmethod
    def of(cls, network: Any) -> "SimpleGraph":
        return cls(list(network.nodes), [tuple(e) for e in network.edges])

    def degrees(self) -> dict[Any, int]:
        deg = {v: 0 for v in self.nodes}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


@dataclass
class Randomized:
    graph: SimpleGraph
    switches: int
    attempts: int


def edge_switch_randomize(network: Any, n_switches: int, seed: int | np.random.Generator | None = None,
                          rejection_factor: int = 100) -> Randomized:
    """``n_switches`` successful double-edge swaps, within ``rejection_factor * n_switches`` attempts.

    Runs out of budget with a :class:`RandomizationWarning` and returns whatever
    was reached.
    """
    if n_switches < 0:
        raise ConfigError("n_switches must be non-negative")
    g = SimpleGraph.of(network)
    index = {v: i for i, v in enumerate(g.nodes)}
    edges = [(index[u], index[v]) for u, v in g.edges]
    m = len(edges)
    if m < 2:
        if n_switches:
            warnings.warn(f"only {m} edge(s): nothing to switch", RandomizationWarning, stacklevel=2)
        return Randomized(g, 0, 0)
    adj = [set() for _ in g.nodes]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    rng = np.random.default_rng(seed)
    budget = rejection_factor * n_switches
    done = attempts = 0
    # draw candidates in blocks to keep per-attempt overhead low
    while done < n_switches and attempts < budget:
        block = min(4096, budget - attempts)
        picks = rng.integers(m, size=(block, 2))
        flips = rng.integers(2, size=block)
        for (i, j), flip in zip(picks.tolist(), flips.tolist()):
            attempts += 1
            if i == j:
                continue
            a, b = edges[i]
            c, d = edges[j]
            if flip:
                c, d = d, c
            if a == d or b == c or d in adj[a] or c in adj[b]:
                continue
            adj[a].discard(b); adj[b].discard(a)
            adj[c].discard(d); adj[d].discard(c)
            adj[a].add(d); adj[d].add(a)
            adj[b].add(c); adj[c].add(b)
            edges[i] = (a, d)
            edges[j] = (b, c)
            done += 1
            if done == n_switches:
                break
    if done < n_switches:
        warnings.warn(f"edge switching stalled at {done}/{n_switches} after {attempts} attempts",
                      RandomizationWarning, stacklevel=2)
    labels = g.nodes
    out = SimpleGraph(list(labels), [(labels[a], labels[b]) for a, b in edges])
    return Randomized(out, done, attempts)


@dataclass
class NullEnsemble:
    size: int
    censuses: dict[int, list[MotifCensus]]
    switches: list[int]
    requested_switches: int
    warnings: list[str] = field(default_factory=list)

    def counts(self, k: int, pattern: PatternId) -> np.ndarray:
        return np.array([c.count(pattern) for c in self.censuses[k]], dtype=float)


def build_ensemble(network: Any, R: int = 100, switches_per_edge: float = 10.0,
                   k: int | Sequence[int] = 5, seed: int | None = 0) -> NullEnsemble:
    """``R`` independent randomisations, each censused at every requested size."""
    if R < 2:
        raise ConfigError("ensemble size must be at least 2")
    ks = (k,) if isinstance(k, int) else tuple(k)
    base = SimpleGraph.of(network)
    n_switch = int(round(switches_per_edge * len(base.edges)))
    censuses: dict[int, list[MotifCensus]] = {kk: [] for kk in ks}
    switches, notes = [], []
    for child in np.random.SeedSequence(seed).spawn(R):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RandomizationWarning)
            rnd = edge_switch_randomize(base, n_switch, np.random.default_rng(child))
        notes.extend(str(w.message) for w in caught)
        switches.append(rnd.switches)
        for kk in ks:
            censuses[kk].append(motif_census(rnd.graph, kk, count_only=True))
    return NullEnsemble(R, censuses, switches, n_switch, notes)


@dataclass(frozen=True)
class PatternScore:
    pattern: PatternId
    input_count: int
    mean: float
    std: float
    z: float
    p: float

    @property
    def significant(self) -> bool:
        return self.p < P_THRESHOLD or self.z > Z_THRESHOLD


@dataclass
class SignificanceReport:
    k: int
    scores: list[PatternScore]
    network_index: int | None = None

    def by_pattern(self) -> dict[PatternId, PatternScore]:
        return {s.pattern: s for s in self.scores}


def zscore(value: float, sample: Sequence[float] | np.ndarray, ddof: int = 0) -> tuple[float, float, float]:
    """(z, mean, std) with z = 0 for a zero numerator over zero spread and a capped sentinel otherwise."""
    arr = np.asarray(sample, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std(ddof=ddof))
    diff = value - mean
    if std > 0:
        return diff / std, mean, std
    if diff == 0:
        return 0.0, mean, std
    return math.copysign(Z_SENTINEL, diff), mean, std


def empirical_p(value: float, sample: Sequence[float] | np.ndarray) -> float:
    """Fraction of ensemble members whose count is at least ``value``."""
    arr = np.asarray(sample, dtype=float)
    return float(np.count_nonzero(arr >= value)) / len(arr)


def zscore_report(input_census: MotifCensus, ensemble: NullEnsemble, ddof: int = 0,
                  patterns: Iterable[PatternId] | None = None) -> SignificanceReport:
    k = input_census.k
    members = ensemble.censuses.get(k)
    if not members or len(members) < 2:
        raise ConfigError(f"ensemble has fewer than two size-{k} censuses")
    scores = []
    for p in (pattern_catalog(k) if patterns is None else patterns):
        sample = np.array([c.count(p) for c in members], dtype=float)
        x = input_census.count(p)
        z, mean, std = zscore(x, sample, ddof)
        scores.append(PatternScore(p, x, mean, std, z, empirical_p(x, sample)))
    return SignificanceReport(k, scores, input_census.network_index)


REPORT_HEADER = ["network_index", "pattern_id", "input_count", "mean", "std", "z", "p", "significant"]


def write_reports(reports: Iterable[SignificanceReport], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for rep in reports:
        for s in rep.scores:
            w.writerow([rep.network_index, s.pattern, s.input_count, repr(s.mean), repr(s.std),
                        repr(s.z), repr(s.p), int(s.significant)])
