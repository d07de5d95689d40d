import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legalsys.graph import Graph
from legalsys.random_models import edge_order, gnm, gnp, min_degree_hitting_time, pair_arrays, pair_count, process


def test_gnp_extremes():
    assert gnp(12, 0.0, 1) == Graph.empty(12)
    assert gnp(12, 1.0, 1) == Graph.complete(12)
    with pytest.raises(ValueError):
        gnp(5, 1.5, 0)


@pytest.mark.slow
def test_gnp_edge_count_large():
    n, p = 10_000, 0.3
    m = gnp(n, p, 0).edge_count
    mean = p * pair_count(n)
    assert abs(m - mean) <= 4 * math.sqrt(mean * (1 - p))


def test_gnp_deterministic_and_row_chunking():
    a = gnp(300, 0.1, 7)
    assert a == gnp(300, 0.1, 7)
    assert a != gnp(300, 0.1, 8)


def test_gnm_extremes():
    assert gnm(9, 0, 3) == Graph.empty(9)
    assert gnm(9, 36, 3) == Graph.complete(9)
    with pytest.raises(ValueError):
        gnm(4, 7, 0)


@given(st.integers(2, 30), st.integers(0, 10**6))
def test_gnm_nests(n, seed):
    prev = Graph.empty(n)
    for m in range(0, pair_count(n) + 1, max(1, pair_count(n) // 7)):
        g = gnm(n, m, seed)
        assert g.edge_count == m
        assert all(p & ~q == 0 for p, q in zip(prev.rows, g.rows))
        prev = g


@pytest.mark.slow
def test_gnm_uniform_n6_m3():
    seeds = 100_000
    counts = Counter()
    us, vs = pair_arrays(6)
    for s in range(seeds):
        counts[tuple(sorted(edge_order(6, s)[:3].tolist()))] += 1
    assert len(counts) == math.comb(15, 3)
    p = 1 / math.comb(15, 3)
    sd = math.sqrt(seeds * p * (1 - p))
    assert all(abs(c - seeds * p) <= 4 * sd for c in counts.values())
    # gnm is exactly that prefix
    g = gnm(6, 3, 42)
    first = edge_order(6, 42)[:3]
    assert g == Graph.from_edge_arrays(6, us[first], vs[first])


def test_process_n3():
    for seed in range(5):
        tr = process(3, seed)
        assert tr.t2 == 3
        assert tr.graph_at(3) == Graph.complete(3)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 60), st.integers(0, 10**6))
def test_process_invariants(n, seed):
    tr = process(n, seed)
    assert tr.t2 >= n
    assert tr.graph_at(tr.t2).min_degree() >= 2
    assert tr.graph_at(tr.t2 - 1).min_degree() <= 1
    assert tr.graph_at(tr.t2) == gnm(n, tr.t2, seed)
    assert sorted(tr.order.tolist()) == list(range(pair_count(n)))


def test_process_json():
    tr = process(10, 1)
    doc = tr.to_json()
    assert doc["schema"] == "legalsys.trace/1" and doc["T2"] == tr.t2 and len(doc["edges"]) == tr.t2
    assert len(tr.to_json(full=True)["edges"]) == 45
    assert tr.dumps() == process(10, 1).dumps()


def test_hitting_time_helper():
    us = np.array([0, 1, 2, 0])
    vs = np.array([1, 2, 0, 3])
    with pytest.raises(ValueError):
        min_degree_hitting_time(4, us, vs)
    assert min_degree_hitting_time(3, us[:3], vs[:3]) == 3


@pytest.mark.slow
def test_hitting_time_band_n1000():
    n = 1000
    t2 = [process(n, s).t2 for s in range(100)]
    centre = n / 2 * (math.log(n) + math.log(math.log(n)))
    mean = sum(t2) / len(t2)
    assert centre - 3 * n / 2 <= mean <= centre + 3 * n / 2


@pytest.mark.slow
def test_gnp_equals_binomial_then_gnm():
    # m ~ Bin(C(n,2), p) followed by gnm matches gnp in edge and triangle statistics
    n, p, trials = 30, 0.2, 10_000
    rng = np.random.default_rng(12345)
    ms = rng.binomial(pair_count(n), p, size=trials)

    def stats(g):
        a = g.dense_adjacency().astype(np.int64)
        return g.edge_count, int(np.trace(a @ a @ a)) // 6

    s1 = np.array([stats(gnp(n, p, s)) for s in range(trials)], dtype=float)
    s2 = np.array([stats(gnm(n, int(m), s + trials)) for s, m in enumerate(ms)], dtype=float)
    for j in range(2):
        se = math.sqrt(s1[:, j].var() / trials + s2[:, j].var() / trials)
        assert abs(s1[:, j].mean() - s2[:, j].mean()) <= 4 * se
        assert s1[:, j].std() == pytest.approx(s2[:, j].std(), rel=0.1)
