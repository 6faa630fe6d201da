import io
import warnings
from collections import Counter

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from cascade_motifs.errors import ConfigError, RandomizationWarning
from cascade_motifs.motifs import MotifCensus, motif_census, pattern_catalog
from cascade_motifs.significance import (NullEnsemble, PatternScore, Z_SENTINEL, build_ensemble,
                                         edge_switch_randomize, empirical_p, write_reports, zscore,
                                         zscore_report)


def degree_multiset(edges):
    c = Counter()
    for u, v in edges:
        c[u] += 1
        c[v] += 1
    return c


def assert_simple(edges):
    seen = set()
    for u, v in edges:
        assert u != v
        key = frozenset((u, v))
        assert key not in seen
        seen.add(key)


# --------------------------------------------------------------------------
# edge switching


def test_swap_on_two_disjoint_edges():
    g = nx.Graph([(0, 1), (2, 3)])
    out = edge_switch_randomize(g, 1, seed=0)
    assert out.switches == 1
    assert {frozenset(e) for e in out.graph.edges} in (
        {frozenset((0, 3)), frozenset((1, 2))}, {frozenset((0, 2)), frozenset((1, 3))})


def test_complete_graph_cannot_switch():
    with pytest.warns(RandomizationWarning):
        out = edge_switch_randomize(nx.complete_graph(4), 5, seed=0)
    assert out.switches == 0
    assert {frozenset(e) for e in out.graph.edges} == {frozenset(e) for e in nx.complete_graph(4).edges}


def test_single_edge_warns():
    with pytest.warns(RandomizationWarning):
        assert edge_switch_randomize(nx.path_graph(2), 3).switches == 0
    assert edge_switch_randomize(nx.path_graph(2), 0).switches == 0
    with pytest.raises(ConfigError):
        edge_switch_randomize(nx.path_graph(3), -1)


def test_degrees_kept_on_200_edge_graph():
    g = nx.gnm_random_graph(60, 200, seed=4)
    out = edge_switch_randomize(g, 2000, seed=1)
    assert out.switches == 2000
    assert degree_multiset(out.graph.edges) == degree_multiset(g.edges)
    assert_simple(out.graph.edges)
    assert {frozenset(e) for e in out.graph.edges} != {frozenset(e) for e in g.edges}


def test_both_orientations_reachable():
    # one swap of three disjoint edges reaches 3 edge pairs x 2 orientations = 6 matchings
    g = nx.Graph([(0, 1), (2, 3), (4, 5)])
    results = {frozenset(frozenset(e) for e in edge_switch_randomize(g, 1, seed=s).graph.edges) for s in range(60)}
    assert len(results) >= 6


@given(st.integers(6, 20), st.floats(0.15, 0.6), st.integers(0, 10 ** 6), st.integers(0, 200))
def test_switching_invariants(n, density, seed, switches):
    g = oracles.random_graph(n, density, seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RandomizationWarning)
        out = edge_switch_randomize(g, switches, seed=seed)
    assert degree_multiset(out.graph.edges) == degree_multiset(g.edges)
    assert_simple(out.graph.edges)
    assert sorted(out.graph.nodes) == sorted(g.nodes)


# --------------------------------------------------------------------------
# ensembles


def test_ensemble_default_size_and_determinism():
    g = nx.gnm_random_graph(20, 40, seed=0)
    a = build_ensemble(g, k=(3, 4), seed=5)
    assert a.size == 100 and len(a.censuses[3]) == 100 and len(a.censuses[4]) == 100
    b = build_ensemble(g, R=10, k=(3, 4), seed=5)
    assert [c.counts for c in b.censuses[4]] == [c.counts for c in a.censuses[4][:10]]
    assert a.requested_switches == 400


def test_ensemble_on_k4_records_stalls():
    e = build_ensemble(nx.complete_graph(4), R=2, k=3, seed=0)
    assert e.switches == [0, 0] and len(e.warnings) == 2
    tri = pattern_catalog(3)[1]
    assert list(e.counts(3, tri)) == [4.0, 4.0]


def test_ensemble_size_checked():
    with pytest.raises(ConfigError):
        build_ensemble(nx.path_graph(4), R=1)


# --------------------------------------------------------------------------
# z and p


def test_zscore_hand_arithmetic():
    z, mean, std = zscore(5, [1, 3, 1, 3])
    assert (z, mean, std) == (3.0, 2.0, 1.0)
    z1, _, std1 = zscore(5, [1, 3, 1, 3], ddof=1)
    assert std1 == pytest.approx(np.sqrt(4 / 3)) and z1 == pytest.approx(3 / np.sqrt(4 / 3))


def test_zscore_zero_spread():
    assert zscore(4, [4, 4, 4])[0] == 0.0
    assert zscore(5, [4, 4, 4])[0] == Z_SENTINEL
    assert zscore(3, [4, 4, 4])[0] == -Z_SENTINEL
    assert empirical_p(4, [4, 4, 4]) == 1.0


def test_empirical_p():
    assert empirical_p(3, [1, 2, 3, 4]) == 0.5
    assert empirical_p(10, [1, 2, 3, 4]) == 0.0


@given(st.lists(st.integers(0, 50), min_size=2, max_size=30), st.integers(0, 60), st.integers(-20, 20))
def test_zscore_shift_invariant(sample, x, shift):
    z0 = zscore(x, sample)[0]
    z1 = zscore(x + shift, [s + shift for s in sample])[0]
    assert z1 == pytest.approx(z0, rel=1e-9, abs=1e-9)
    assert 0.0 <= empirical_p(x, sample) <= 1.0


def test_scores_consistent_with_samples():
    rng = np.random.default_rng(2)
    for _ in range(50):
        sample = rng.poisson(6, size=20).astype(float)
        x = int(rng.integers(0, 15))
        z, mean, std = zscore(x, sample)
        assert mean == pytest.approx(sample.mean())
        if std > 0:
            assert mean + z * std == pytest.approx(x)
        assert empirical_p(x, sample) == np.mean(sample >= x)


def test_significance_rule():
    p = pattern_catalog(3)[0]
    assert PatternScore(p, 1, 0, 1, 2.5, 0.5).significant
    assert PatternScore(p, 1, 0, 1, 0.5, 0.005).significant
    assert not PatternScore(p, 1, 0, 1, 2.0, 0.01).significant


def test_report_on_fixture_ensemble():
    tri, path = pattern_catalog(3)[1], pattern_catalog(3)[0]
    members = [MotifCensus(3, {tri: c, path: 10}) for c in (1, 3, 1, 3)]
    ens = NullEnsemble(4, {3: members}, [0] * 4, 0)
    rep = zscore_report(MotifCensus(3, {tri: 5, path: 10}, network_index=7), ens)
    by = rep.by_pattern()
    assert by[tri].z == 3.0 and by[tri].p == 0.0 and by[tri].significant
    assert by[path].z == 0.0 and by[path].p == 1.0 and not by[path].significant
    buf = io.StringIO()
    write_reports([rep], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("network_index,pattern_id") and len(lines) == 3
    with pytest.raises(ConfigError):
        zscore_report(motif_census(nx.path_graph(4), 4), ens)
