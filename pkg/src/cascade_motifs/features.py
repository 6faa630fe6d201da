"""Feature matrices for predicting the edge count of the inhibition network.

Motif features for interval start ``st`` come from the network pair
``N_{inhib-st}`` and ``N_{inhib-st-1}``: the count (MC) of each pattern and, for
5-node patterns, the number of 4-node instances that transitioned into it (MT).
"""
from __future__ import annotations

import math
import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import DataWarning
from .motifs import PatternId

CENTRALITY_MEASURES = ("degree", "degree_entropy", "clustering", "pagerank", "betweenness")
TOP_N = 10


@dataclass
class FeatureMatrix:
    names: list[str]
    values: np.ndarray                 # rows x columns, NaN where missing
    row_ids: list[str]
    imputed: np.ndarray | None = None  # True where a missing cell was filled

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(len(self.row_ids), len(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")
        if self.imputed is None:
            self.imputed = np.zeros(self.values.shape, dtype=bool)

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def take_rows(self, rows: Sequence[int] | np.ndarray) -> "FeatureMatrix":
        rows = np.asarray(rows, dtype=int)
        return FeatureMatrix(list(self.names), self.values[rows], [self.row_ids[r] for r in rows],
                             self.imputed[rows])

    def take_columns(self, cols: Sequence[int]) -> "FeatureMatrix":
        cols = list(cols)
        return FeatureMatrix([self.names[c] for c in cols], self.values[:, cols], list(self.row_ids),
                             self.imputed[:, cols])

    @classmethod
    def hstack(cls, parts: Sequence["FeatureMatrix"]) -> "FeatureMatrix":
        if not parts:
            raise ValueError("nothing to stack")
        ids = parts[0].row_ids
        for p in parts[1:]:
            if p.row_ids != ids:
                raise ValueError("row ids differ between blocks")
        return cls([n for p in parts for n in p.names], np.hstack([p.values for p in parts]), list(ids),
                   np.hstack([p.imputed for p in parts]))


# --------------------------------------------------------------------------
# per-cascade inputs


@dataclass
class CascadeFeatures:
    """Per-network motif and centrality values of one analysed cascade."""

    cascade_id: str
    inhib_network: int
    mc: dict[int, dict[PatternId, int]] = field(default_factory=dict)    # network -> pattern -> count
    mt: dict[int, dict[PatternId, int]] = field(default_factory=dict)    # network -> 5-pattern -> transitions in
    centrality: dict[int, dict[str, float]] = field(default_factory=dict)
    target: float = float("nan")


def interval_networks(inhib: int, st: int) -> tuple[int, int]:
    return inhib - st, inhib - st - 1


def motif_feature_names(patterns: Sequence[PatternId], st: int, kinds: Sequence[str] = ("MC", "MT")) -> list[str]:
    names = []
    for p in patterns:
        for kind in kinds:
            if kind == "MT" and p.k != 5:
                continue
            for off in (st, st + 1):
                names.append(f"{kind}[{p}]@inhib-{off}")
    return names


def extract_motif_features(cf: CascadeFeatures, patterns: Sequence[PatternId], st: int,
                           kinds: Sequence[str] = ("MC", "MT")) -> list[float]:
    """One row of MC/MT values on ``N_{inhib-st}`` and ``N_{inhib-st-1}``; all NaN if either is unavailable."""
    a, b = interval_networks(cf.inhib_network, st)
    names = motif_feature_names(patterns, st, kinds)
    if b < 2 or a not in cf.mc or b not in cf.mc:
        return [math.nan] * len(names)
    row = []
    for p in patterns:
        for kind in kinds:
            if kind == "MT" and p.k != 5:
                continue
            for net in (a, b):
                if kind == "MC":
                    row.append(float(cf.mc[net].get(p, 0)))
                else:
                    trans = cf.mt.get(net)
                    row.append(math.nan if trans is None else float(trans.get(p, 0)))
    return row


def motif_feature_matrix(corpus: Sequence[CascadeFeatures], patterns: Sequence[PatternId], st: int,
                         kinds: Sequence[str] = ("MC", "MT")) -> FeatureMatrix:
    names = motif_feature_names(patterns, st, kinds)
    rows = [extract_motif_features(cf, patterns, st, kinds) for cf in corpus]
    return FeatureMatrix(names, np.array(rows, dtype=float).reshape(len(rows), len(names)),
                         [cf.cascade_id for cf in corpus])


# --------------------------------------------------------------------------
# centralities


def _top_mean(values: Iterable[float], n: int = TOP_N) -> float:
    vals = sorted(values, reverse=True)[:n]
    return float(np.mean(vals)) if vals else 0.0


def degree_entropy(graph: nx.Graph) -> float:
    """Shannon entropy (nats) of the degree distribution."""
    degs = [d for _, d in graph.degree()]
    if not degs:
        return 0.0
    _, counts = np.unique(degs, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def centrality_values(graph: nx.Graph, top_n: int = TOP_N) -> dict[str, float]:
    """Top-``top_n`` means of per-node measures; degree entropy is one network-level value."""
    if graph.number_of_nodes() == 0:
        return {m: 0.0 for m in CENTRALITY_MEASURES}
    pr = nx.pagerank(graph, alpha=0.85, tol=1e-9, max_iter=10000) if graph.number_of_edges() else \
        {v: 1.0 / graph.number_of_nodes() for v in graph}
    return {
        "degree": _top_mean((d for _, d in graph.degree()), top_n),
        "degree_entropy": degree_entropy(graph),
        "clustering": _top_mean(nx.clustering(graph).values(), top_n),
        "pagerank": _top_mean(pr.values(), top_n),
        "betweenness": _top_mean(nx.betweenness_centrality(graph, normalized=True).values(), top_n),
    }


def centrality_feature_names(st: int, measures: Sequence[str] = CENTRALITY_MEASURES) -> list[str]:
    return [f"{m}@inhib-{off}" for m in measures for off in (st, st + 1)]


def extract_centrality_features(cf: CascadeFeatures, st: int,
                                measures: Sequence[str] = CENTRALITY_MEASURES) -> list[float]:
    a, b = interval_networks(cf.inhib_network, st)
    names = centrality_feature_names(st, measures)
    if b < 2 or a not in cf.centrality or b not in cf.centrality:
        return [math.nan] * len(names)
    return [float(cf.centrality[net][m]) for m in measures for net in (a, b)]


def centrality_feature_matrix(corpus: Sequence[CascadeFeatures], st: int,
                              measures: Sequence[str] = CENTRALITY_MEASURES) -> FeatureMatrix:
    names = centrality_feature_names(st, measures)
    rows = [extract_centrality_features(cf, st, measures) for cf in corpus]
    return FeatureMatrix(names, np.array(rows, dtype=float).reshape(len(rows), len(names)),
                         [cf.cascade_id for cf in corpus])


# --------------------------------------------------------------------------
# imputation and expansion


def column_means(fm: FeatureMatrix) -> np.ndarray:
    """Mean over observed cells; NaN for a column with no observed cell."""
    vals = fm.values
    observed = ~np.isnan(vals)
    counts = observed.sum(axis=0)
    sums = np.where(observed, vals, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


def apply_imputation(fm: FeatureMatrix, means: np.ndarray) -> FeatureMatrix:
    """Fill missing cells with ``means``; columns whose mean is NaN are dropped."""
    keep = [j for j in range(len(fm.names)) if not np.isnan(means[j])]
    vals = fm.values[:, keep]
    miss = np.isnan(vals)
    filled = np.where(miss, means[keep][None, :], vals)
    return FeatureMatrix([fm.names[j] for j in keep], filled, list(fm.row_ids), fm.imputed[:, keep] | miss)


def impute_missing(fm: FeatureMatrix) -> FeatureMatrix:
    """Column-mean imputation; fully missing columns are dropped with a warning."""
    means = column_means(fm)
    dropped = [fm.names[j] for j in range(len(fm.names)) if np.isnan(means[j])]
    if dropped:
        warnings.warn(f"dropping fully missing columns: {', '.join(dropped)}", DataWarning, stacklevel=2)
    return apply_imputation(fm, means)


def polynomial_features(fm: FeatureMatrix, order: int = 2) -> FeatureMatrix:
    """Original columns, then their squares, then pairwise products."""
    if order != 2:
        raise ValueError("only order 2 is supported")
    X = fm.values
    p = X.shape[1]
    names = list(fm.names) + [f"{n}^2" for n in fm.names]
    cols = [X, X ** 2]
    flags = [fm.imputed, fm.imputed]
    prods = []
    for i in range(p):
        for j in range(i + 1, p):
            names.append(f"{fm.names[i]}*{fm.names[j]}")
            prods.append(X[:, i] * X[:, j])
            flags.append((fm.imputed[:, i] | fm.imputed[:, j])[:, None])
    if prods:
        cols.append(np.column_stack(prods))
    return FeatureMatrix(names, np.hstack(cols), list(fm.row_ids), np.hstack(flags))


def corpus_targets(corpus: Sequence[CascadeFeatures]) -> np.ndarray:
    return np.array([cf.target for cf in corpus], dtype=float)


def index_by_id(corpus: Iterable[CascadeFeatures]) -> Mapping[str, CascadeFeatures]:
    return {cf.cascade_id: cf for cf in corpus}
