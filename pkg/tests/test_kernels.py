import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legalsys import kernels
from legalsys.graph import Graph, is_connected_subset, set_to_array
from legalsys.legal import MoveSet, _basis_csr
from legalsys.random_models import gnp
from legalsys.rng import RandomStream

from oracles import min_degree_induced

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not importable")
NP, NB = kernels.numpy_impl, kernels.numba_impl

graphs = st.builds(lambda n, p, s: gnp(n, p, s), st.integers(2, 24), st.floats(0.05, 0.9), st.integers(0, 10**6))


def test_backend_selection():
    assert kernels.get_backend("numpy") is NP
    assert kernels.get_backend("numba") is NB
    assert kernels.get_backend() is kernels.backend
    with pytest.raises(ValueError):
        kernels.get_backend("cuda")


@settings(max_examples=40, deadline=None)
@given(graphs, st.integers(0, 10**6), st.booleans())
def test_check_states_agree(g, seed, both):
    ip, ix = g.csr
    rng = np.random.default_rng(seed)
    states = (rng.random((30, g.n)) < 0.5).astype(np.uint8)
    a = NP.check_states(ip, ix, states, both)
    b = NB.check_states(ip, ix, states, both)
    assert a == b

    def ok(row):
        s = sum(1 << int(v) for v in np.nonzero(row)[0])
        good = s != 0 and is_connected_subset(g, s)
        if both:
            c = g.vertex_set & ~s
            good = good and c != 0 and is_connected_subset(g, c)
        return good

    expect = next((r for r in range(len(states)) if not ok(states[r])), -1)
    assert a == expect


@settings(max_examples=30, deadline=None)
@given(graphs, st.integers(0, 10**6), st.integers(1, 8))
def test_orbit_scan_agree(g, seed, r):
    rng = np.random.default_rng(seed)
    moves = [int(x) for x in rng.integers(1, 1 << g.n, size=r)]
    ms = MoveSet.of(moves)
    bptr, bidx = _basis_csr(ms.basis)
    s0 = set_to_array(int(rng.integers(0, 1 << g.n)), g.n)
    ip, ix = g.csr
    total = 1 << ms.rank
    a = NP.orbit_scan(ip, ix, s0, bptr, bidx, 0, total, True)
    b = NB.orbit_scan(ip, ix, s0, bptr, bidx, 0, total, True)
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 14), st.floats(0.1, 0.9), st.integers(0, 10**6), st.integers(1, 5), st.integers(1, 14))
def test_dense_subset_search_agree(c, p, seed, k, size):
    g = gnp(c, p, seed)
    masks = np.array(g.rows, dtype=np.int64)
    a = NP.dense_subset_search(masks, k, size)
    b = NB.dense_subset_search(masks, k, size)
    assert a == b
    if a >= 0:
        assert a.bit_count() <= size and min_degree_induced(g, a) >= k
    else:
        # brute force agrees there is none
        for s in range(1, 1 << c):
            if s.bit_count() <= size:
                assert min_degree_induced(g, s) < k


def _tabu_inputs(n, p, seed, k, iters):
    g = gnp(n, p, seed)
    rng = RandomStream(seed)
    start = rng.permutation(np.arange(n) % k).astype(np.int64)
    return g, start, kernels.noise_array(rng.child("noise"), iters)


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 40), st.floats(0.1, 0.6), st.integers(0, 10**6), st.integers(2, 6))
def test_tabucol_agree(n, p, seed, k):
    g, start, noise = _tabu_inputs(n, p, seed, k, 500)
    ip, ix = g.csr
    ca, fa, ia = NP.tabucol(ip, ix, start.copy(), k, 500, noise)
    cb, fb, ib = NB.tabucol(ip, ix, start.copy(), k, 500, noise)
    assert (fa, ia) == (fb, ib)
    assert np.array_equal(np.asarray(ca), np.asarray(cb))
    conflicts = sum(ca[u] == ca[v] for u, v in g.edges())
    assert conflicts == fa


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 40), st.floats(0.1, 0.6), st.integers(0, 10**6), st.integers(2, 6))
def test_tabu_equitable_agree(n, p, seed, k):
    g, start, noise = _tabu_inputs(n, p, seed, k, 500)
    ip, ix = g.csr
    ca, fa, ia = NP.tabu_equitable(ip, ix, start.copy(), k, 500, noise)
    cb, fb, ib = NB.tabu_equitable(ip, ix, start.copy(), k, 500, noise)
    assert (fa, ia) == (fb, ib)
    assert np.array_equal(np.asarray(ca), np.asarray(cb))
    sizes = np.bincount(np.asarray(ca), minlength=k)
    assert sizes.max() - sizes.min() <= 1
    if fa == 0:
        assert all(ca[u] != ca[v] for u, v in g.edges())


def test_env_switch_selects_numpy():
    import subprocess
    import sys
    code = "from legalsys import kernels; print(kernels.backend.name)"
    out = subprocess.run([sys.executable, "-c", code], env={"LEGALSYS_NUMBA": "0", "PATH": ""},
                         capture_output=True, text=True, check=True).stdout.strip()
    assert out == "numpy"
