import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from signet.errors import MissingSource, UnknownUser
from signet.features import (
    COLUMNS,
    Sources,
    all23_features,
    assemble,
    degree_features,
    di_features,
    ei_features,
    ip_features,
    normalize_blocks,
    triad_counts,
)
from signet.graph import build_network
from signet.io import InteractionLedger
from signet.personality import PersonalityScores


def test_ei_pair_shares():
    led = InteractionLedger({(0, 1): 3}, {(0, 1): 1}, 2)
    f = ei_features(led, 0, 1)
    assert f[:2] == [0.25, 0.75]


def test_ei_no_interactions():
    assert ei_features(InteractionLedger({}, {}, 3), 0, 1) == [0.0] * 6
    with pytest.raises(UnknownUser):
        ei_features(InteractionLedger({}, {}, 3), 0, 5)


def test_ei_recompute_from_records():
    rng = np.random.default_rng(4)
    pos, neg = {}, {}
    for _ in range(20):
        a, b = (int(x) for x in rng.choice(6, 2, replace=False))
        pos[(a, b)] = int(rng.integers(1, 4))
        if rng.random() < 0.5:
            neg[(a, b)] = int(rng.integers(1, 4))
    led = InteractionLedger(pos, neg, 6)
    for i in range(6):
        for j in range(6):
            if i == j:
                continue
            Pij, Nij = pos.get((i, j), 0), neg.get((i, j), 0)
            Pi = sum(c for (a, _), c in pos.items() if a == i)
            Ni = sum(c for (a, _), c in neg.items() if a == i)
            Pj = sum(c for (_, b), c in pos.items() if b == j)
            Nj = sum(c for (_, b), c in neg.items() if b == j)
            r = lambda x, y: x / y if y else 0.0
            want = [r(Nij, Nij + Pij), r(Pij, Nij + Pij), r(Ni, Ni + Pi), r(Pi, Ni + Pi), r(Nj, Nj + Pj), r(Pj, Nj + Pj)]
            assert ei_features(led, i, j) == pytest.approx(want, abs=0)
            f = ei_features(led, i, j)
            assert f[0] + f[1] in (0.0, 1.0)


def test_di_example():
    i, j, a, b, c, d = range(6)
    net = build_network([(i, a, 1), (i, b, 1), (i, c, 1), (i, d, 1), (a, j, 1), (b, j, 1), (c, j, -1)])
    assert di_features(net, i, j) == [0.25, 0.5]
    assert di_features(net, j, i) == [0.0, 0.0]


def test_di_excludes_target_from_followees():
    net = build_network([(0, 1, 1), (0, 2, 1), (2, 1, -1)])
    assert di_features(net, 0, 1) == [1.0, 0.0]


def test_ip_features():
    s = PersonalityScores(np.array([0.5, 1.0]), np.array([0.0, 0.25]), "rating", np.ones(2), np.ones(2))
    assert ip_features(s, 0, 1) == [0.5, 0.0, 1.0, 0.25]
    assert ip_features(s, 1, 0) == [1.0, 0.25, 0.5, 0.0]
    z = PersonalityScores(np.zeros(2), np.zeros(2), "rating", np.zeros(2), np.zeros(2))
    assert ip_features(z, 0, 1) == [0.0] * 4
    with pytest.raises(UnknownUser):
        ip_features(s, 0, 2)


def test_all23_hand_count():
    i, j, a, b, c = range(5)
    net = build_network([(i, a, 1), (i, b, 1), (i, c, -1), (a, j, 1)])
    f = all23_features(net, i, j)
    assert f[0] == 2 and f[1] == 1 and f[2] == 1 and f[6] == 1
    triads = dict(zip(COLUMNS["all23"][7:], f[7:]))
    assert triads["triad_ff_pp"] == 1
    assert sum(f[7:]) == 1


def test_all23_empty_graph():
    assert all23_features(build_network([], n_users=2), 0, 1) == [0.0] * 23


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_structural_blocks_match_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = 30
    edges = oracles.random_edges(rng, n, 0.12)
    net = build_network(oracles.edge_list(edges), n_users=n)
    for _ in range(15):
        i, j = (int(x) for x in rng.choice(n, 2, replace=False))
        assert di_features(net, i, j) == oracles.di(edges, n, i, j)
        assert triad_counts(net, i, j) == oracles.triads(edges, n, i, j)
        assert degree_features(net, i, j) == oracles.degrees(edges, n, i, j)
        cells = triad_counts(net, i, j)
        assert sum(cells) >= degree_features(net, i, j)[6]


def test_masked_features_match_enumeration_on_masked_graph():
    rng = np.random.default_rng(9)
    n = 40
    edges = oracles.random_edges(rng, n, 0.1)
    net = build_network(oracles.edge_list(edges), n_users=n)
    hidden = set(list(edges)[1::3])
    m = net.mask(hidden)
    rest = oracles.masked(edges, hidden)
    for i in range(0, n, 2):
        for j in range(1, n, 7):
            if i != j:
                assert di_features(net, i, j, m) == oracles.di(rest, n, i, j)
                assert triad_counts(net, i, j, m) == oracles.triads(rest, n, i, j)


def test_own_edge_never_read():
    rng = np.random.default_rng(5)
    n = 30
    edges = oracles.random_edges(rng, n, 0.15)
    net = build_network(oracles.edge_list(edges), n_users=n)
    for (i, j) in list(edges)[:60]:
        m = net.mask([(i, j)])
        assert di_features(net, i, j) == di_features(net, i, j, m)
        assert all23_features(net, i, j) == all23_features(net, i, j, m)


def _sources():
    net = build_network([(0, 1, 1), (1, 2, -1), (2, 0, 1), (0, 3, 1)], n_users=4)
    led = InteractionLedger({(0, 1): 2}, {(1, 2): 1}, 4)
    s = PersonalityScores(np.zeros(4), np.zeros(4), "emotion", np.zeros(4), np.zeros(4))
    return Sources(net, led, s)


def test_assemble_widths_and_order():
    src = _sources()
    pairs = [(2, 0), (0, 1), (1, 2), (0, 3)]
    fm = assemble(pairs, [1, 1, -1, 1], "ei,di,ip", src)
    assert fm.X.shape == (4, 12)
    assert fm.pairs == pairs
    assert assemble(pairs, [1, 1, -1, 1], "all", src).X.shape == (4, 35)
    rev = assemble(pairs[::-1], None, "ei,di,ip", src)
    assert np.array_equal(rev.X, fm.X[::-1])


def test_assemble_missing_source():
    src = _sources()
    with pytest.raises(MissingSource):
        assemble([(0, 1)], [1], "ip", Sources(src.network, src.ledger, None))


def test_block_names():
    assert normalize_blocks("ip+ei") == ("ei", "ip")
    assert normalize_blocks("all") == ("ei", "di", "ip", "all23")
    with pytest.raises(ValueError):
        normalize_blocks("ei,xx")


def test_standardize_and_select():
    src = _sources()
    fm = assemble([(0, 1), (1, 2), (2, 0)], [1, -1, 1], "all", src)
    z = fm.standardized()
    assert np.allclose(z.X.mean(axis=0), 0)
    sub = fm.select_blocks("di")
    assert sub.columns == ["di1", "di2"]
    assert np.array_equal(sub.X, fm.X[:, 6:8])
