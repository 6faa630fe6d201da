import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

import oracles
from cascade_motifs.errors import LifecycleError, WindowingError
from cascade_motifs.model import Cascade, DiffusionNetwork, ReshareEvent
from cascade_motifs.synth import SynthParams, synthesize_cascade
from cascade_motifs.windows import (CASCADE, HISTORICAL, Subsequence, build_all_networks, build_temporal_network,
                                    build_window_network, count_long_reshares, edge_key, locate_lifecycle_networks,
                                    partition_subsequences, window_of_time)


def chain(n, cid="c"):
    return Cascade.from_events(cid, [ReshareEvent(float(i), f"u{i:03d}", f"u{i + 1:03d}") for i in range(n - 1)])


def test_partition_drops_partial_tail():
    ws = partition_subsequences(chain(100), 40)
    assert len(ws) == 2
    assert sum(len(w.node_set) for w in ws) == 80
    ws = partition_subsequences(chain(80), 40)
    assert len(ws) == 2 and all(len(w.node_set) == 40 for w in ws)
    assert [w.index for w in ws] == [1, 2]


def test_partition_needs_two_windows():
    with pytest.raises(WindowingError):
        partition_subsequences(chain(79), 40)
    with pytest.raises(WindowingError):
        partition_subsequences(chain(10), 1)


@given(st.integers(80, 300), st.integers(2, 40))
def test_windows_disjoint(n, W):
    c = chain(n)
    if n < 2 * W:
        return
    ws = partition_subsequences(c, W)
    for a in ws:
        assert len(a.node_set) == W
        for b in ws:
            if a.index != b.index:
                assert not (a.members & b.members)


def _subseq(nodes, events, index=1):
    return Subsequence(index, tuple(nodes), tuple(events), (0.0, 1.0))


def test_window_network_tags():
    s = _subseq("abcd", [ReshareEvent(0, "a", "b"), ReshareEvent(1, "b", "c")])
    tags = build_window_network(None, s, DiffusionNetwork([("a", "c")]))
    assert tags == {("a", "b"): CASCADE, ("b", "c"): CASCADE, ("a", "c"): HISTORICAL}


def test_cascade_tag_wins_over_historical():
    s = _subseq("abcd", [ReshareEvent(0, "a", "b")])
    tags = build_window_network(None, s, DiffusionNetwork([("a", "b")]))
    assert tags == {("a", "b"): CASCADE}


def _two_window_cascade():
    # window 1 = {u000..u003}, window 2 = {u004..u007}; u001 reshares to u005 across windows
    events = [ReshareEvent(0, "u000", "u001"), ReshareEvent(1, "u001", "u002"), ReshareEvent(2, "u002", "u003"),
              ReshareEvent(3, "u001", "u004"), ReshareEvent(4, "u004", "u005"), ReshareEvent(5, "u005", "u006"),
              ReshareEvent(6, "u006", "u007")]
    return Cascade.from_events("x", events)


def test_cross_window_reshare_lands_in_overlap_network():
    c = _two_window_cascade()
    ws = partition_subsequences(c, 4)
    w2 = build_window_network(c, ws[1], DiffusionNetwork())
    assert ("u001", "u004") not in w2
    net = build_temporal_network(ws, 2, DiffusionNetwork())
    assert net.edge_tags[("u001", "u004")] == CASCADE
    assert net.n_nodes == 8


def test_window_edges_without_history_are_the_inwindow_forest():
    c, d = synthesize_cascade(SynthParams(n_participants=200, historical_edge_prob=0.0), 3)
    for w in partition_subsequences(c, 40):
        tags = build_window_network(c, w, d)
        expected = {edge_key(e.source, e.target) for e in w.event_slice if e.source in w.members}
        assert set(tags) == expected
        assert set(tags.values()) <= {CASCADE}
        g = nx.Graph(list(tags))
        assert nx.is_forest(g)


def test_union_of_disjoint_windows():
    W = 40
    c = chain(2 * W)
    ws = partition_subsequences(c, W)
    no_cross = DiffusionNetwork()
    # drop the single bridging reshare by building each window separately
    e1 = build_window_network(c, ws[0], no_cross)
    e2 = build_window_network(c, ws[1], no_cross)
    net = build_temporal_network(ws, 2, no_cross)
    bridging = {edge_key("u039", "u040")}
    assert set(net.edge_tags) - bridging == set(e1) | set(e2)
    assert net.n_edges - len(bridging) == len(e1) + len(e2)
    assert net.n_nodes == 80


def test_network_index_bounds():
    ws = partition_subsequences(chain(120), 40)
    with pytest.raises(WindowingError):
        build_temporal_network(ws, 1, DiffusionNetwork())
    with pytest.raises(WindowingError):
        build_temporal_network(ws, 4, DiffusionNetwork())


def test_every_network_is_simple_and_bounded():
    c, d = synthesize_cascade(SynthParams(n_participants=420, historical_edge_prob=0.2), 8)
    ws = partition_subsequences(c, 40)
    for i, net in build_all_networks(ws, d).items():
        assert net.n_nodes <= 80
        assert all(u != v for u, v in net.edges)
        assert len(set(net.edges)) == net.n_edges
        assert all(u < v for u, v in net.edges)


def test_every_short_reshare_appears_in_some_network():
    c, d = synthesize_cascade(SynthParams(n_participants=330, historical_edge_prob=0.1), 4)
    ws = partition_subsequences(c, 40)
    nets = build_all_networks(ws, d)
    covered = set()
    for net in nets.values():
        covered |= set(net.tagged(CASCADE))
    owner = {v: w.index for w in ws for v in w.node_set}
    missing = 0
    for e in c.events:
        a, b = owner.get(e.source), owner.get(e.target)
        if a is None or b is None or abs(a - b) >= 2:
            missing += 1
        else:
            assert edge_key(e.source, e.target) in covered
    assert missing == count_long_reshares(c, ws)


@pytest.mark.parametrize("seed", range(5))
def test_loop_formation_needs_history(seed):
    for prob in (0.0, 0.15):
        c, d = synthesize_cascade(SynthParams(n_participants=300, historical_edge_prob=prob), seed)
        for net in build_all_networks(partition_subsequences(c, 40), d).values():
            assert nx.is_forest(net.to_graph(CASCADE))
            if prob == 0:
                assert not net.tagged(HISTORICAL)
            g = net.to_graph()
            for cycle in nx.cycle_basis(g):
                pairs = {edge_key(a, b) for a, b in zip(cycle, cycle[1:] + cycle[:1])}
                assert any(net.edge_tags[p] == HISTORICAL for p in pairs)


def test_shuffled_log_gives_identical_networks():
    c, d = synthesize_cascade(SynthParams(n_participants=200, historical_edge_prob=0.1), 1)
    events = list(c.events)
    random.Random(0).shuffle(events)
    c2 = Cascade.from_events(c.id, events)
    a = build_all_networks(partition_subsequences(c, 40), d)
    b = build_all_networks(partition_subsequences(c2, 40), d)
    assert {i: n.edge_tags for i, n in a.items()} == {i: n.edge_tags for i, n in b.items()}


# --------------------------------------------------------------------------
# locating steep and inhibition networks


def test_steep_window_three_maps_to_network_three():
    c = chain(200)
    ws = partition_subsequences(c, 40)
    t = ws[2].time_span[1]
    idx = locate_lifecycle_networks(ws, t, t)
    assert idx.steep_window == 3 and idx.inhib_window == 3
    first = locate_lifecycle_networks(ws, 0.0, t)
    assert first.steep_window == 2 and first.steep_subsequence == 1


def test_steep_after_inhib_rejected():
    ws = partition_subsequences(chain(200), 40)
    with pytest.raises(LifecycleError):
        locate_lifecycle_networks(ws, 50.0, 10.0)


def test_window_lookup_matches_span_oracle():
    c, _ = synthesize_cascade(SynthParams(n_participants=400), 2)
    ws = partition_subsequences(c, 40)
    spans = [w.time_span for w in ws]
    rng = random.Random(0)
    probes = [w.time_span[1] for w in ws] + [rng.uniform(0, spans[-1][1]) for _ in range(200)]
    for t in probes:
        assert window_of_time(ws, t) == oracles.window_for_time(spans, t)
    # a knee injected at window 6: its indices follow direct membership lookup
    t_knee = ws[5].time_span[0]
    t_late = ws[8].time_span[1]
    idx = locate_lifecycle_networks(ws, t_knee, t_late)
    assert idx.steep_subsequence == oracles.window_for_time(spans, t_knee)
    assert (idx.steep_window, idx.inhib_window) == (max(idx.steep_subsequence, 2), 9)


def test_window_lookup_outside_range():
    ws = partition_subsequences(chain(100), 40)
    with pytest.raises(LifecycleError):
        window_of_time(ws, 1e9)
    assert window_of_time(ws, 1e9, clamp=True) == 2
