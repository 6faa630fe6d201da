"""Slow, independent reference implementations used to check the package.

Nothing here calls the package's algorithms. The only package objects used are
plain data types (``PatternId`` as a dictionary key, ``Cascade`` as input).
Patterns are identified by ``networkx`` isomorphism tests against the graph
atlas, which is built independently of the package's canonical labelling.

Running this file prints the frozen values stored in ``tests/frozen.py``.
"""
from __future__ import annotations

import itertools
import math
from collections import deque

import networkx as nx
import numpy as np

from cascade_motifs.motifs import PatternId


# --------------------------------------------------------------------------
# fixtures


def random_graph(n: int, density: float, seed: int) -> nx.Graph:
    """Erdos-Renyi style graph on nodes 0..n-1 drawn with numpy (stable across versions)."""
    rng = np.random.default_rng(seed)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < density:
            g.add_edge(a, b)
    return g


def sparse_growth_pair(n: int, extra: int, seed: int) -> tuple[nx.Graph, nx.Graph]:
    """Two consecutive networks: a random tree plus chords, then the same with new nodes and chords."""
    rng = np.random.default_rng(seed)
    prev = nx.Graph()
    prev.add_node(0)
    for v in range(1, n):
        prev.add_edge(v, int(rng.integers(v)))
    for _ in range(extra):
        a, b = rng.integers(n, size=2)
        if a != b:
            prev.add_edge(int(a), int(b))
    curr = prev.copy()
    m = n + n // 4
    for v in range(n, m):
        curr.add_edge(v, int(rng.integers(v)))
    for _ in range(extra):
        a, b = rng.integers(m, size=2)
        if a != b:
            curr.add_edge(int(a), int(b))
    return prev, curr


# --------------------------------------------------------------------------
# pattern identification through the networkx atlas


def atlas_classes(k: int) -> list[nx.Graph]:
    """Every connected graph on exactly k nodes, one per isomorphism class."""
    return [g for g in nx.graph_atlas_g() if g.number_of_nodes() == k and nx.is_connected(g)]


def pattern_graph(p: PatternId) -> nx.Graph:
    """Decode a pattern id (upper-triangle bits, row-major) into a graph."""
    g = nx.Graph()
    g.add_nodes_from(range(p.k))
    pairs = [(i, j) for i in range(p.k) for j in range(i + 1, p.k)]
    g.add_edges_from(pair for pair, bit in zip(pairs, p.code) if bit == "1")
    return g


class Identifier:
    """Map small labelled graphs to catalogue ids by isomorphism."""

    def __init__(self, catalog: dict[int, list[PatternId]]):
        self.graphs = {k: [(p, pattern_graph(p)) for p in ps] for k, ps in catalog.items()}
        self.memo: dict[tuple, PatternId | None] = {}

    def __call__(self, k: int, edges: frozenset) -> PatternId | None:
        key = (k, edges)
        if key in self.memo:
            return self.memo[key]
        g = nx.Graph()
        g.add_nodes_from(range(k))
        g.add_edges_from(edges)
        hit = None
        if nx.is_connected(g):
            matches = [p for p, h in self.graphs[k] if nx.is_isomorphic(g, h)]
            if len(matches) != 1:
                raise AssertionError(f"{len(matches)} catalogue matches for {sorted(edges)}")
            hit = matches[0]
        self.memo[key] = hit
        return hit


def _local_edges(adj: dict, subset: tuple) -> frozenset:
    pos = {v: i for i, v in enumerate(subset)}
    return frozenset((pos[a], pos[b]) for a, b in itertools.combinations(subset, 2) if b in adj[a])


def _connected(adj: dict, subset: tuple) -> bool:
    members = set(subset)
    seen = {subset[0]}
    todo = [subset[0]]
    while todo:
        for w in adj[todo.pop()]:
            if w in members and w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == len(members)


def _adjacency(g: nx.Graph) -> dict:
    return {v: set(g[v]) for v in g.nodes}


def connected_sets(g: nx.Graph, k: int) -> set[frozenset]:
    """All k-subsets inducing a connected subgraph, by exhaustive search."""
    adj = _adjacency(g)
    nodes = sorted(g.nodes)
    return {frozenset(s) for s in itertools.combinations(nodes, k) if _connected(adj, s)}


def brute_census(g: nx.Graph, k: int, ident: Identifier) -> dict[PatternId, list[frozenset]]:
    """Pattern -> vertex sets, over every k-subset of the graph."""
    adj = _adjacency(g)
    out: dict[PatternId, list[frozenset]] = {}
    for s in itertools.combinations(sorted(g.nodes), k):
        if not _connected(adj, s):
            continue
        p = ident(k, _local_edges(adj, s))
        out.setdefault(p, []).append(frozenset(s))
    return out


def brute_counts(g: nx.Graph, k: int, ident: Identifier) -> dict[PatternId, int]:
    return {p: len(v) for p, v in brute_census(g, k, ident).items()}


def triangles(g: nx.Graph) -> int:
    adj = _adjacency(g)
    return sum(1 for a, b, c in itertools.combinations(sorted(g.nodes), 3)
               if b in adj[a] and c in adj[a] and c in adj[b])


# --------------------------------------------------------------------------
# transitions


def embeds(p4: PatternId, p5: PatternId, induced: bool) -> bool:
    """Search all 4-vertex subsets of p5 and all 24 bijections from p4 onto them."""
    g4, g5 = pattern_graph(p4), pattern_graph(p5)
    for subset in itertools.combinations(range(5), 4):
        for image in itertools.permutations(subset):
            ok = True
            for a, b in itertools.combinations(range(4), 2):
                e4 = g4.has_edge(a, b)
                e5 = g5.has_edge(image[a], image[b])
                if (e4 and not e5) or (induced and e5 and not e4):
                    ok = False
                    break
            if ok:
                return True
    return False


def naive_transitions(prev: nx.Graph, curr: nx.Graph, ident: Identifier, min4: dict | None = None,
                      min5: dict | None = None, induced: bool = False) -> dict[tuple, int]:
    """Double loop over every (4-instance in prev, 5-instance in curr) pair."""
    c4 = brute_census(prev, 4, ident)
    c5 = brute_census(curr, 5, ident)
    min4, min5 = min4 or {}, min5 or {}
    out = {}
    for p4, inst4 in c4.items():
        if len(inst4) < min4.get(p4, 0):
            continue
        for p5, inst5 in c5.items():
            if len(inst5) < min5.get(p5, 0) or not embeds(p4, p5, induced):
                continue
            out[(p4, p5)] = sum(1 for a in inst4 for b in inst5 if a <= b)
    return out


# --------------------------------------------------------------------------
# lifecycle


def hawkes_direct(times, weights, mu: float, alpha: float, beta: float) -> list[float]:
    """O(n^2) sum over strictly earlier events."""
    out = []
    for tj in times:
        s = 0.0
        for ti, wi in zip(times, weights):
            if ti < tj:
                s += wi * beta * math.exp(-beta * (tj - ti))
        out.append(mu + alpha * s)
    return out


def window_for_time(spans, t: float) -> int:
    """1-based window: [s1, e1], then (e_{i-1}, e_i]; clamp outside."""
    if t <= spans[0][1]:
        return 1
    for i in range(1, len(spans)):
        if spans[i - 1][1] < t <= spans[i][1]:
            return i + 1
    return len(spans)


def interval_sums(intensities, spans) -> list[float]:
    out = [0.0] * len(spans)
    for w in range(1, len(spans) + 1):
        for t, lam in intensities:
            if window_for_time(spans, t) == w:
                out[w - 1] += lam
    return out


def extrema(values) -> tuple[list[int], list[int]]:
    """Interior strict local extrema, comparing each plateau with its nearest differing neighbours."""
    maxima, minima = [], []
    n = len(values)
    for i in range(1, n - 1):
        if values[i - 1] == values[i]:
            continue  # not the leftmost point of its plateau
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        if j == n - 1:
            continue
        left, right = values[i - 1], values[j + 1]
        if left < values[i] and right < values[i]:
            maxima.append(i)
        elif left > values[i] and right > values[i]:
            minima.append(i)
    return maxima, minima


def inhibition_scan(cascade, t_steep: float, dtg: float, g: float) -> float | None:
    """Check every event in time order; sizes are recounted from scratch each time."""
    def size_at(t):
        people = set()
        for e in cascade.events:
            if e.time <= t:
                people.add(e.source)
                people.add(e.target)
        return len(people)

    s_steep = size_at(t_steep)
    for e in cascade.events:
        if e.time >= t_steep and e.time - t_steep >= dtg and size_at(e.time) / s_steep >= g:
            return e.time
    return None


# --------------------------------------------------------------------------
# centrality


def betweenness(g: nx.Graph) -> dict:
    """Normalised betweenness from all-pairs BFS path counts."""
    nodes = list(g.nodes)
    dist, sigma = {}, {}
    for s in nodes:
        d = {s: 0}
        c = {s: 1}
        q = deque([s])
        while q:
            u = q.popleft()
            for w in g[u]:
                if w not in d:
                    d[w] = d[u] + 1
                    c[w] = 0
                    q.append(w)
                if d[w] == d[u] + 1:
                    c[w] += c[u]
        dist[s], sigma[s] = d, c
    n = len(nodes)
    out = {v: 0.0 for v in nodes}
    for s, t in itertools.combinations(nodes, 2):
        if t not in dist[s]:
            continue
        for v in nodes:
            if v in (s, t) or v not in dist[s] or t not in dist[v]:
                continue
            if dist[s][v] + dist[v][t] == dist[s][t]:
                out[v] += sigma[s][v] * sigma[v][t] / sigma[s][t]
    scale = (n - 1) * (n - 2) / 2 if n > 2 else 1.0
    return {v: x / scale for v, x in out.items()}


def top_mean(values, n: int = 10) -> float:
    vals = sorted(values, reverse=True)[:n]
    return sum(vals) / len(vals)


# --------------------------------------------------------------------------
# regression


def ols(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Normal equations with an explicit intercept column."""
    A = np.column_stack([np.ones(len(y)), X])
    coef = np.linalg.solve(A.T @ A, A.T @ y)
    return coef[1:], float(coef[0])


def lasso_gd(X: np.ndarray, y: np.ndarray, eta: float, iters: int = 200000, tol: float = 1e-14):
    """Accelerated proximal gradient on sum (y - b - Zw)^2 + eta |w|_1 with standardised Z."""
    mean, std = X.mean(axis=0), X.std(axis=0)
    Z = (X - mean) / std
    yc = y - y.mean()
    L = 2.0 * np.linalg.eigvalsh(Z.T @ Z).max()
    step = 1.0 / L
    w = np.zeros(X.shape[1])
    v = w.copy()
    t = 1.0
    for _ in range(iters):
        grad = -2.0 * Z.T @ (yc - Z @ v)
        u = v - step * grad
        w_new = np.sign(u) * np.maximum(np.abs(u) - step * eta, 0.0)
        t_new = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
        v = w_new + (t - 1.0) / t_new * (w_new - w)
        if np.abs(w_new - w).max() < tol:
            w = w_new
            break
        w, t = w_new, t_new
    weights = w / std
    return weights, float(y.mean() - mean @ weights)


def r2(y, pred) -> float:
    y = np.asarray(y, dtype=float)
    return 1.0 - float(((y - pred) ** 2).sum()) / float(((y - y.mean()) ** 2).sum())


def select_eta(X, y, grid) -> float:
    """Refit at every grid value and keep the best in-sample R^2 (smallest eta on ties)."""
    best = None
    for eta in sorted(grid):
        w, b = lasso_gd(X, y, eta)
        score = r2(y, b + X @ w)
        if best is None or score > best[1] + 1e-12:
            best = (eta, score)
    return best[0]


def regression_problem(seed: int, n: int = 200, p: int = 10, noise: float = 0.5):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p)) * rng.uniform(0.5, 3.0, size=p) + rng.normal(size=p)
    w = rng.normal(size=p)
    w[rng.permutation(p)[: p // 3]] = 0.0
    y = 1.5 + X @ w + noise * rng.normal(size=n)
    return X, y, w


# --------------------------------------------------------------------------
# frozen values


def _catalog():
    from cascade_motifs.motifs import pattern_catalog
    return {k: list(pattern_catalog(k)) for k in (3, 4, 5)}


def frozen_values() -> dict:
    cat = _catalog()
    ident = Identifier(cat)
    out = {}
    g = random_graph(12, 0.35, 7)
    out["CENSUS_G12"] = {k: {str(p): c for p, c in sorted(brute_counts(g, k, ident).items())} for k in (3, 4, 5)}
    out["RELATION_ROWS"] = ["".join("1" if embeds(p4, p5, False) else "0" for p5 in cat[5]) for p4 in cat[4]]
    out["RELATION_ROWS_INDUCED"] = ["".join("1" if embeds(p4, p5, True) else "0" for p5 in cat[5])
                                    for p4 in cat[4]]
    prev, curr = sparse_growth_pair(16, 6, 3)
    out["TRANSITIONS_PAIR3"] = {f"{a}>{b}": c for (a, b), c in sorted(naive_transitions(prev, curr, ident).items())
                                if c}
    times = [0.0, 0.5, 0.5, 1.0, 2.5, 2.5, 2.5, 4.0, 7.0, 7.25]
    out["HAWKES_10"] = hawkes_direct(times, [1.0] * len(times), 0.2, 0.8, 0.5)
    rng = np.random.default_rng(5)
    curve = rng.integers(0, 4, size=30).tolist()
    out["EXTREMA_CURVE"] = curve
    out["EXTREMA"] = list(extrema(curve))
    bg = random_graph(40, 0.1, 11)
    out["BETWEENNESS_TOP10_G40"] = top_mean(betweenness(bg).values())
    X, y, _ = regression_problem(0)
    w, b = lasso_gd(X, y, 0.03)
    out["LASSO_W"] = w.tolist()
    out["LASSO_B"] = b
    Xn, yn, _ = regression_problem(1, noise=4.0)
    out["SELECT_ETA"] = select_eta(Xn, yn, (0.01, 0.02, 0.03, 0.04))
    out["TRIANGLES_SYNTH50"] = {p: triangles(synth_graph(50, p, 0)) for p in (0.0, 1.0)}
    return out


def synth_graph(n: int, prob: float, seed: int) -> nx.Graph:
    """Reshare edges plus historical overlay of one generated cascade."""
    from cascade_motifs.synth import SynthParams, synthesize_cascade

    c, d = synthesize_cascade(SynthParams(n_participants=n, historical_edge_prob=prob), seed)
    g = nx.Graph()
    g.add_nodes_from(c.participants)
    g.add_edges_from((e.source, e.target) for e in c.events)
    g.add_edges_from(d.edges)
    return g


if __name__ == "__main__":
    import pprint

    for name, value in frozen_values().items():
        print(f"{name} = {pprint.pformat(value, width=110, sort_dicts=False)}\n")
