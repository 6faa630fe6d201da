"""Connected induced subgraph enumeration and motif census for undirected graphs.

Vertex sets are enumerated with ESU (exclusive-neighbour extension), optionally
subsampled level by level as in RAND-ESU. Each k-set is classified by its
canonical code: the lexicographically smallest upper-triangular adjacency bit
string over all k! vertex orderings. With k <= 5 this is at most 120 orderings,
and every labelled adjacency is canonicalised once per process (memo table).
"""
from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np

from .errors import ConfigError, ContractViolation

SUPPORTED_SIZES = (3, 4, 5)


def _pairs(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(k) for j in range(i + 1, k)]


@dataclass(frozen=True, order=True)
class PatternId:
    """Isomorphism class of a connected k-node undirected graph."""

    k: int
    code: str

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [p for p, bit in zip(_pairs(self.k), self.code) if bit == "1"]

    @property
    def n_edges(self) -> int:
        return self.code.count("1")

    @property
    def density(self) -> float:
        return self.n_edges / len(self.code)

    @property
    def has_triangle(self) -> bool:
        adj = _adjacency_sets(self.k, self.edges)
        return any(adj[a] & adj[b] for a, b in self.edges)

    @property
    def is_tree(self) -> bool:
        return self.n_edges == self.k - 1

    @property
    def label(self) -> str:
        """Position in :func:`pattern_catalog`, e.g. ``M3`` (1-based)."""
        return f"M{pattern_catalog(self.k).index(self) + 1}"

    def sort_key(self) -> tuple[int, int, str]:
        return (self.k, self.n_edges, self.code)

    def __str__(self) -> str:
        return f"{self.k}:{self.code}"

    @classmethod
    def parse(cls, text: str) -> "PatternId":
        k, _, code = text.partition(":")
        try:
            pid = cls(int(k), code)
        except ValueError as exc:
            raise ValueError(f"bad pattern id {text!r}") from exc
        if len(code) != len(_pairs(pid.k)) or set(code) - {"0", "1"}:
            raise ValueError(f"bad pattern id {text!r}")
        return pid


def _adjacency_sets(k: int, edges: Iterable[tuple[int, int]]) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(k)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def _raw_connected(k: int, raw: int) -> bool:
    pairs = _pairs(k)
    adj = _adjacency_sets(k, (pairs[p] for p in range(len(pairs)) if raw >> p & 1))
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == k


@lru_cache(maxsize=None)
def _permutation_tables(k: int) -> list[list[int]]:
    """For every vertex permutation, the image of each pair index under it.

    The image is returned as a bit weight so that pair 0 is the most
    significant bit: comparing weighted sums then equals comparing code strings.
    """
    pairs = _pairs(k)
    npairs = len(pairs)
    index = {p: i for i, p in enumerate(pairs)}
    tables = []
    for perm in itertools.permutations(range(k)):
        row = []
        for a, b in pairs:
            x, y = perm[a], perm[b]
            if x > y:
                x, y = y, x
            row.append(1 << (npairs - 1 - index[(x, y)]))
        tables.append(row)
    return tables


_CANON_MEMO: dict[tuple[int, int], PatternId | None] = {}


def _canonical_raw(k: int, raw: int) -> PatternId | None:
    """Canonical pattern for a labelled adjacency bit mask, or None if disconnected.

    Bit ``p`` of ``raw`` is set when pair ``_pairs(k)[p]`` is an edge.
    """
    key = (k, raw)
    hit = _CANON_MEMO.get(key, False)
    if hit is not False:
        return hit
    if not _raw_connected(k, raw):
        _CANON_MEMO[key] = None
        return None
    set_bits = [p for p in range(k * (k - 1) // 2) if raw >> p & 1]
    best = min(sum(row[p] for p in set_bits) for row in _permutation_tables(k))
    npairs = k * (k - 1) // 2
    code = format(best, f"0{npairs}b")
    pid = PatternId(k, code)
    _CANON_MEMO[key] = pid
    return pid


def canonical_form(adjacency: Sequence[Sequence[Any]] | np.ndarray) -> PatternId:
    """Canonical pattern of a small graph given as a k x k adjacency matrix."""
    mat = np.asarray(adjacency)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ContractViolation("adjacency must be square")
    k = mat.shape[0]
    if not 2 <= k <= 5:
        raise ContractViolation(f"canonical_form supports 2..5 nodes, got {k}")
    raw = 0
    for p, (i, j) in enumerate(_pairs(k)):
        if mat[i, j]:
            raw |= 1 << p
    pid = _canonical_raw(k, raw)
    if pid is None:
        raise ContractViolation("graph is not connected")
    return pid


def canonical_from_edges(k: int, edges: Iterable[tuple[int, int]]) -> PatternId:
    mat = np.zeros((k, k), dtype=int)
    for a, b in edges:
        mat[a, b] = mat[b, a] = 1
    return canonical_form(mat)


@lru_cache(maxsize=None)
def pattern_catalog(k: int) -> tuple[PatternId, ...]:
    """All connected isomorphism classes on k vertices, sorted by (edges, code)."""
    if k not in SUPPORTED_SIZES:
        raise ConfigError(f"motif size must be one of {SUPPORTED_SIZES}, got {k}")
    found = set()
    for raw in range(1 << (k * (k - 1) // 2)):
        pid = _canonical_raw(k, raw)
        if pid is not None:
            found.add(pid)
    return tuple(sorted(found, key=PatternId.sort_key))


# --------------------------------------------------------------------------
# dense graph view


@dataclass
class DenseGraph:
    """Nodes relabelled 0..n-1 with adjacency stored as int bitsets."""

    labels: list[Any]
    adj: list[int]

    @classmethod
    def from_network(cls, network: Any) -> "DenseGraph":
        labels = list(network.nodes)
        index = {v: i for i, v in enumerate(labels)}
        adj = [0] * len(labels)
        for u, v in network.edges:
            if u == v:
                raise ContractViolation(f"self-loop on {u!r}")
            a, b = index[u], index[v]
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return cls(labels, adj)

    def bits_to_labels(self, mask: int) -> tuple:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.labels[low.bit_length() - 1])
            mask ^= low
        return tuple(out)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _esu_masks(adj: list[int], k: int, rng: np.random.Generator | None = None,
               probs: Sequence[float] | None = None) -> Iterator[int]:
    """Yield each connected k-vertex set (as a bit mask) exactly once.

    With ``rng`` and ``probs`` a child at depth d is kept with probability
    ``probs[d]`` (depth 0 is the root choice).
    """
    n = len(adj)
    sampling = rng is not None

    def extend(sub: int, ext: int, nbhd: int, higher: int, depth: int) -> Iterator[int]:
        if depth == k:
            yield sub
            return
        p = probs[depth] if sampling else 1.0
        while ext:
            low = ext & -ext
            ext ^= low
            if sampling and p < 1.0 and rng.random() >= p:
                continue
            w = low.bit_length() - 1
            aw = adj[w]
            yield from extend(sub | low, ext | (aw & ~nbhd & higher), nbhd | aw, higher, depth + 1)

    for v in range(n):
        if sampling and probs[0] < 1.0 and rng.random() >= probs[0]:
            continue
        higher = ~((1 << (v + 1)) - 1)
        if k == 1:
            yield 1 << v
            continue
        yield from extend(1 << v, adj[v] & higher, adj[v] | (1 << v), higher, 1)


def enumerate_connected(network: Any, k: int) -> Iterator[frozenset]:
    """Every connected induced k-vertex set of ``network``, each exactly once."""
    if k < 2:
        raise ConfigError("k must be at least 2")
    dense = DenseGraph.from_network(network)
    for mask in _esu_masks(dense.adj, k):
        yield frozenset(dense.bits_to_labels(mask))


def _check_probs(k: int, depth_probs: Sequence[float]) -> list[float]:
    probs = [float(p) for p in depth_probs]
    if len(probs) != k:
        raise ConfigError(f"need {k} depth probabilities, got {len(probs)}")
    if any(not (0.0 < p <= 1.0) for p in probs):
        raise ConfigError("depth probabilities must lie in (0, 1]")
    return probs


def sample_connected(network: Any, k: int, depth_probs: Sequence[float],
                     seed: int | np.random.Generator | None = None) -> Iterator[tuple[frozenset, float]]:
    """RAND-ESU: yield ``(vertex_set, weight)`` with weight = 1 / inclusion probability."""
    if k < 2:
        raise ConfigError("k must be at least 2")
    probs = _check_probs(k, depth_probs)
    rng = np.random.default_rng(seed)
    weight = 1.0 / float(np.prod(probs))
    dense = DenseGraph.from_network(network)
    for mask in _esu_masks(dense.adj, k, rng=rng, probs=probs):
        yield frozenset(dense.bits_to_labels(mask)), weight


def _raw_of(adj: list[int], members: list[int]) -> int:
    raw = 0
    p = 0
    k = len(members)
    for i in range(k):
        ai = adj[members[i]]
        for j in range(i + 1, k):
            if ai >> members[j] & 1:
                raw |= 1 << p
            p += 1
    return raw


def classify_set(network_or_dense: Any, vertex_set: Iterable[Any]) -> PatternId:
    """Pattern realised by the subgraph induced on ``vertex_set``."""
    dense = network_or_dense if isinstance(network_or_dense, DenseGraph) else DenseGraph.from_network(network_or_dense)
    index = {v: i for i, v in enumerate(dense.labels)}
    members = [index[v] for v in vertex_set]
    pid = _canonical_raw(len(members), _raw_of(dense.adj, members))
    if pid is None:
        raise ContractViolation("vertex set does not induce a connected subgraph")
    return pid


@dataclass
class MotifCensus:
    """Per-pattern counts (and, unless ``count_only``, the vertex sets) for one network."""

    k: int
    counts: dict[PatternId, int]
    instances: dict[PatternId, list[tuple]] | None = None
    network_index: int | None = None
    weighted: dict[PatternId, float] | None = field(default=None, repr=False)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, pattern: PatternId) -> int:
        return self.counts.get(pattern, 0)

    def patterns(self) -> list[PatternId]:
        return sorted(self.counts, key=PatternId.sort_key)

    def dense_counts(self) -> dict[PatternId, int]:
        """Counts for the full catalog, zero-filled."""
        return {p: self.counts.get(p, 0) for p in pattern_catalog(self.k)}


def _colmajor_to_rowmajor(k: int, raw: int) -> int:
    out = 0
    rows = {pair: i for i, pair in enumerate(_pairs(k))}
    p = 0
    for j in range(1, k):
        for i in range(j):
            if raw >> p & 1:
                out |= 1 << rows[(i, j)]
            p += 1
    return out


_COLMAJOR_MEMO: dict[tuple[int, int], PatternId] = {}


def _census_core(adj: list[int], k: int, keep_instances: bool) -> tuple[dict[int, int], dict[int, list[tuple]]]:
    """ESU census keyed by a column-major labelled code built during extension.

    Vertex d (in insertion order) contributes the bits for pairs (i, d), i < d,
    which occupy a contiguous block in column-major pair order.
    """
    counts: dict[int, int] = {}
    sets: dict[int, list[tuple]] = {}
    members = [0] * k
    last_depth = k - 1

    def extend(ext: int, nbhd: int, higher: int, depth: int, raw: int) -> None:
        base = depth * (depth - 1) // 2
        head = members[:depth]
        if depth == last_depth:
            while ext:
                low = ext & -ext
                ext ^= low
                w = low.bit_length() - 1
                aw = adj[w]
                bits = 0
                for i, m in enumerate(head):
                    if aw >> m & 1:
                        bits |= 1 << i
                r = raw | (bits << base)
                counts[r] = counts.get(r, 0) + 1
                if keep_instances:
                    sets.setdefault(r, []).append((*head, w))
            return
        while ext:
            low = ext & -ext
            ext ^= low
            w = low.bit_length() - 1
            aw = adj[w]
            bits = 0
            for i, m in enumerate(head):
                if aw >> m & 1:
                    bits |= 1 << i
            members[depth] = w
            extend(ext | (aw & ~nbhd & higher), nbhd | aw, higher, depth + 1, raw | (bits << base))

    for v in range(len(adj)):
        higher = ~((1 << (v + 1)) - 1)
        members[0] = v
        extend(adj[v] & higher, adj[v] | (1 << v), higher, 1, 0)
    return counts, sets


def motif_census(network: Any, k: int, count_only: bool = False,
                 network_index: int | None = None) -> MotifCensus:
    """Exact census of connected induced k-subgraphs grouped by pattern."""
    if k not in SUPPORTED_SIZES:
        raise ConfigError(f"motif size must be one of {SUPPORTED_SIZES}, got {k}")
    dense = network if isinstance(network, DenseGraph) else DenseGraph.from_network(network)
    raw_counts, raw_sets = _census_core(dense.adj, k, not count_only)
    labels = dense.labels
    counts: dict[PatternId, int] = {}
    instances: dict[PatternId, list[tuple]] | None = None if count_only else {}
    for raw in sorted(raw_counts):
        pid = _COLMAJOR_MEMO.get((k, raw))
        if pid is None:
            pid = _canonical_raw(k, _colmajor_to_rowmajor(k, raw))
            _COLMAJOR_MEMO[(k, raw)] = pid
        counts[pid] = counts.get(pid, 0) + raw_counts[raw]
        if instances is not None:
            instances.setdefault(pid, []).extend(
                tuple(labels[m] for m in sorted(members)) for members in raw_sets[raw])
    counts = {p: counts[p] for p in sorted(counts, key=PatternId.sort_key)}
    if instances is not None:
        instances = {p: instances[p] for p in counts}
    return MotifCensus(k=k, counts=counts, instances=instances, network_index=network_index)


def sampled_census(network: Any, k: int, depth_probs: Sequence[float],
                   seed: int | np.random.Generator | None = None) -> MotifCensus:
    """RAND-ESU census; ``weighted`` holds the unbiased per-pattern count estimates."""
    dense = DenseGraph.from_network(network)
    probs = _check_probs(k, depth_probs)
    rng = np.random.default_rng(seed)
    weight = 1.0 / float(np.prod(probs))
    counts: dict[PatternId, int] = {}
    for mask in _esu_masks(dense.adj, k, rng=rng, probs=probs):
        pid = _canonical_raw(k, _raw_of(dense.adj, _bits(mask)))
        counts[pid] = counts.get(pid, 0) + 1
    weighted = {p: c * weight for p, c in counts.items()}
    return MotifCensus(k=k, counts=counts, weighted=weighted)
