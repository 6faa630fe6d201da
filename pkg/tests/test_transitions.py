import io
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

import frozen
import oracles
from cascade_motifs.errors import ContractViolation
from cascade_motifs.motifs import canonical_from_edges, motif_census, pattern_catalog
from cascade_motifs.transitions import (TransitionThresholds, count_transitions, pattern_subgraph_relation,
                                        relation_matrix, transition_series, write_transitions)

CAT4, CAT5 = pattern_catalog(4), pattern_catalog(5)
IDENT = oracles.Identifier({k: list(pattern_catalog(k)) for k in (3, 4, 5)})
PATH4 = canonical_from_edges(4, [(0, 1), (1, 2), (2, 3)])
PATH5 = canonical_from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
K4 = CAT4[-1]


def as_dict(matrix):
    return {(p4, p5): c for (p4, p5), c in matrix.counts.items()}


def transitions(prev, curr, thresholds=TransitionThresholds(), induced=False):
    return count_transitions(motif_census(prev, 4), motif_census(curr, 5), thresholds, induced)


# --------------------------------------------------------------------------
# relation table


@pytest.mark.parametrize("induced", [False, True])
def test_relation_table_matches_mapping_search(induced):
    rows = relation_matrix(induced)
    assert len(rows) == 6 and all(len(r) == 21 for r in rows)
    for p4, row in zip(CAT4, rows):
        for p5, hit in zip(CAT5, row):
            assert hit == oracles.embeds(p4, p5, induced)


def test_relation_table_matches_frozen_rows():
    as_bits = lambda rows: ["".join("1" if x else "0" for x in r) for r in rows]
    assert as_bits(relation_matrix(False)) == frozen.RELATION_ROWS
    assert as_bits(relation_matrix(True)) == frozen.RELATION_ROWS_INDUCED


def test_relation_examples():
    assert pattern_subgraph_relation(PATH4, PATH5)
    assert not pattern_subgraph_relation(K4, CAT5[3])
    assert all(pattern_subgraph_relation(p4, CAT5[-1]) for p4 in CAT4)
    assert sum(pattern_subgraph_relation(p4, CAT5[-1], induced=True) for p4 in CAT4) == 1
    with pytest.raises(ContractViolation):
        pattern_subgraph_relation(PATH5, PATH4)


# --------------------------------------------------------------------------
# counting


def test_single_instance_example():
    prev = nx.path_graph(4)
    curr = nx.path_graph(5)
    m = transitions(prev, curr)
    assert m.get(PATH4, PATH5) == 1
    assert as_dict(m) == {(PATH4, PATH5): 1}


def test_wrong_census_size_rejected():
    g = nx.path_graph(6)
    with pytest.raises(ContractViolation):
        count_transitions(motif_census(g, 5), motif_census(g, 5))
    with pytest.raises(ContractViolation):
        count_transitions(motif_census(g, 4, count_only=True), motif_census(g, 5))


def test_thresholds_above_every_count_give_nothing():
    prev, curr = oracles.sparse_growth_pair(16, 6, 3)
    assert as_dict(transitions(prev, curr, TransitionThresholds(default4=10 ** 6))) == {}
    assert as_dict(transitions(prev, curr, TransitionThresholds(default5=10 ** 6))) == {}
    with pytest.raises(ContractViolation):
        TransitionThresholds(default4=-1)


def test_matches_frozen_pair():
    prev, curr = oracles.sparse_growth_pair(16, 6, 3)
    got = {f"{a}>{b}": c for (a, b), c in transitions(prev, curr).counts.items() if c}
    assert got == frozen.TRANSITIONS_PAIR3


def _threshold_draw(rng, c4, c5):
    min4 = {p: rng.randint(0, c + 1) for p, c in c4.counts.items() if rng.random() < 0.5}
    min5 = {p: rng.randint(0, c + 1) for p, c in c5.counts.items() if rng.random() < 0.5}
    return min4, min5


def test_matches_naive_oracle_on_50_pairs():
    rng = random.Random(0)
    for seed in range(50):
        prev, curr = oracles.sparse_growth_pair(rng.randint(10, 22), rng.randint(0, 6), seed)
        for induced in (False, True):
            assert as_dict(transitions(prev, curr, induced=induced)) == \
                oracles.naive_transitions(prev, curr, IDENT, induced=induced)
        min4, min5 = _threshold_draw(rng, motif_census(prev, 4), motif_census(curr, 5))
        got = as_dict(transitions(prev, curr, TransitionThresholds(min4, min5)))
        assert got == oracles.naive_transitions(prev, curr, IDENT, min4, min5)


def test_raising_thresholds_only_removes_pairs():
    prev, curr = oracles.sparse_growth_pair(18, 5, 8)
    base = as_dict(transitions(prev, curr))
    for t in range(0, 40, 5):
        got = as_dict(transitions(prev, curr, TransitionThresholds(default4=t, default5=t)))
        assert set(got) <= set(base)
        assert all(got[k] == base[k] for k in got)


@given(st.integers(0, 10 ** 6))
def test_relabel_invariant(seed):
    prev, curr = oracles.sparse_growth_pair(12, 3, seed)
    names = list(curr.nodes)
    random.Random(seed).shuffle(names)
    mapping = {v: f"v{w}" for v, w in zip(curr.nodes, names)}
    a = as_dict(transitions(prev, curr))
    b = as_dict(transitions(nx.relabel_nodes(prev, mapping), nx.relabel_nodes(curr, mapping)))
    assert a == b


# --------------------------------------------------------------------------
# series


def _censuses(graphs):
    return ({i: motif_census(g, 4, network_index=i) for i, g in graphs.items()},
            {i: motif_census(g, 5, network_index=i) for i, g in graphs.items()})


def test_series():
    prev, curr = oracles.sparse_growth_pair(14, 4, 1)
    _, nxt = oracles.sparse_growth_pair(14, 4, 2)
    graphs = {2: prev, 3: curr, 4: nx.compose(curr, nxt)}
    c4, c5 = _censuses(graphs)
    assert transition_series(c4, c5, 3, 3) == []
    series = transition_series(c4, c5, 2, 4)
    assert [m.pair for m in series] == [(2, 3), (3, 4)]
    assert series[0].counts == count_transitions(c4[2], c5[3]).counts
    assert series[1].counts == count_transitions(c4[3], c5[4]).counts
    with pytest.raises(ContractViolation):
        transition_series(c4, c5, 4, 2)
    with pytest.raises(ContractViolation):
        transition_series(c4, c5, 1, 4)
    buf = io.StringIO()
    write_transitions(series, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "pair_index,pattern4,pattern5,count"
    assert len(lines) == 1 + sum(len(m.counts) for m in series)


def test_column_sums():
    prev, curr = oracles.sparse_growth_pair(16, 6, 3)
    m = transitions(prev, curr)
    sums = m.column_sums()
    for p5, total in sums.items():
        assert total == sum(c for (a, b), c in m.counts.items() if b == p5)
