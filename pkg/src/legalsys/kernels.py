"""Hot numeric kernels with a numba path and a pure-numpy path.

The backend is chosen once at import time:

* ``LEGALSYS_NUMBA=0`` (or numba not importable) selects the numpy path;
* anything else selects the numba path.

Both backends are always importable as :data:`numba_impl` and
:data:`numpy_impl` so tests and the benchmark can compare them directly.
Every kernel is deterministic and the two backends return identical
results for identical inputs (tie-breaking uses caller-supplied noise).

Vertex sets handed to the kernels are ``uint8`` membership arrays; graphs are
CSR ``(indptr, indices)`` pairs; a list of vertex sets (a basis) is a CSR
pair ``(ptr, idx)`` as well.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np
import scipy.sparse as sp

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("LEGALSYS_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

_MIX_A = 0x9E3779B1
_MIX_B = 0x85EBCA77
_MASK31 = 0x7FFFFFFF
_BIG = 1 << 30


# =============================================================================
# numpy backend


def _np_sides_connected(adj: sp.csr_matrix, states: np.ndarray) -> np.ndarray:
    """Row-wise: is the vertex set ``states[r]`` non-empty and connected?"""
    b, n = states.shape
    ok = states.any(axis=1)
    reached = np.zeros((b, n), dtype=bool)
    rows = np.nonzero(ok)[0]
    reached[rows, states[rows].argmax(axis=1)] = True
    adj_t = adj.T.tocsr()
    active = rows
    while len(active):
        cur = reached[active]
        grow = np.asarray((adj_t @ cur.T.astype(np.float32)).T > 0)
        new = cur | (grow & states[active])
        changed = (new != cur).any(axis=1)
        reached[active] = new
        active = active[changed]
    return ok & (reached == states).all(axis=1)


def _np_check_states(indptr, indices, states, both):
    n = states.shape[1]
    adj = sp.csr_matrix((np.ones(len(indices), np.float32), indices, indptr), shape=(n, n))
    st = states.astype(bool)
    good = _np_sides_connected(adj, st)
    if both:
        good &= _np_sides_connected(adj, ~st)
    bad = np.nonzero(~good)[0]
    return int(bad[0]) if len(bad) else -1


def _np_basis_dense(bptr, bidx, n):
    r = len(bptr) - 1
    dense = np.zeros((r, n), dtype=np.uint8)
    for i in range(r):
        dense[i, bidx[bptr[i]:bptr[i + 1]]] = 1
    return dense


def _np_orbit_scan(indptr, indices, state0, bptr, bidx, start, stop, both, block=4096):
    n = len(state0)
    r = len(bptr) - 1
    basis = _np_basis_dense(bptr, bidx, n).astype(np.int32)
    shifts = np.arange(r, dtype=np.int64)
    for lo in range(start, stop, block):
        ks = np.arange(lo, min(stop, lo + block), dtype=np.int64)
        gray = ks ^ (ks >> 1)
        bits = ((gray[:, None] >> shifts[None, :]) & 1).astype(np.int32)
        states = ((bits @ basis + state0[None, :]) & 1).astype(np.uint8)
        bad = _np_check_states(indptr, indices, states, both)
        if bad >= 0:
            return int(ks[bad])
    return -1


def _np_dense_subset_search(masks, min_deg, max_size):
    c = len(masks)
    if c == 0 or max_size < min_deg + 1:
        return -1
    chunk = 1 << 16
    for lo in range(1, 1 << c, chunk):
        cand = np.arange(lo, min(1 << c, lo + chunk), dtype=np.int64)
        size = np.bitwise_count(cand)
        ok = (size >= min_deg + 1) & (size <= max_size)
        for v in range(c):
            has = (cand >> v) & 1
            deg = np.bitwise_count(cand & masks[v])
            ok &= (has == 0) | (deg >= min_deg)
        hit = np.nonzero(ok)[0]
        if len(hit):
            return int(cand[hit[0]])
    return -1


def _np_gamma(indptr, indices, col, k):
    n = len(col)
    src = np.repeat(np.arange(n), np.diff(indptr))
    gamma = np.zeros((n, k), dtype=np.int64)
    np.add.at(gamma, (src, col[indices]), 1)
    return gamma


def _np_apply_move(gamma, indptr, indices, x, a, b):
    nb = indices[indptr[x]:indptr[x + 1]]
    gamma[nb, a] -= 1
    gamma[nb, b] += 1


def _np_tabucol(indptr, indices, col, k, max_iter, noise):
    """Minimise monochromatic edges of a k-colouring by tabu 1-moves."""
    n = len(col)
    col = col.copy()
    gamma = _np_gamma(indptr, indices, col, k)
    conf = int(gamma[np.arange(n), col].sum() // 2)
    tabu = np.zeros((n, k), dtype=np.int64)
    best = conf
    best_col = col.copy()
    classes = np.arange(k)
    for it in range(max_iter):
        if conf == 0:
            return col, 0, it
        us = np.nonzero(gamma[np.arange(n), col] > 0)[0]
        d = gamma[us] - gamma[us, col[us]][:, None]
        allowed = (classes[None, :] != col[us][:, None]) & ((tabu[us] <= it) | (conf + d < best))
        if not allowed.any():
            continue
        dd = np.where(allowed, d, _BIG)
        key = ((us[:, None] * _MIX_A) ^ (classes[None, :] * _MIX_B) ^ noise[it]) & _MASK31
        score = dd * (_MASK31 + 1) + key
        flat = int(np.argmin(score))
        u = int(us[flat // k])
        b = flat % k
        a = int(col[u])
        col[u] = b
        tabu[u, a] = it + int(0.6 * conf) + int(noise[it] % 10)
        _np_apply_move(gamma, indptr, indices, u, a, b)
        conf += int(d[flat // k, b])
        if conf < best:
            best = conf
            best_col[:] = col
    if conf == 0:
        return col, 0, max_iter
    return best_col, best, max_iter


def _np_tabu_equitable(indptr, indices, col, k, max_iter, noise):
    """Minimise monochromatic edges over colourings with a fixed equitable size profile.

    Moves are swaps of two vertices in different classes (one of them in
    conflict) and, when ``n % k != 0``, single-vertex moves from a class of
    size ``ceil(n/k)`` to a class of size ``floor(n/k)``.
    """
    n = len(col)
    col = col.copy()
    gamma = _np_gamma(indptr, indices, col, k)
    size = np.bincount(col, minlength=k)
    small = n // k
    big = small + (1 if n % k else 0)
    conf = int(gamma[np.arange(n), col].sum() // 2)
    tabu = np.zeros((n, k), dtype=np.int64)
    best = conf
    best_col = col.copy()
    verts = np.arange(n)
    classes = np.arange(k)
    for it in range(max_iter):
        if conf == 0:
            return col, 0, it
        us = np.nonzero(gamma[verts, col] > 0)[0]
        a = col[us]
        # swaps: rows us, columns all v
        d_sw = (gamma[us][:, col] - gamma[us, a][:, None]
                + gamma[:, a].T - gamma[verts, col][None, :])
        adj_uv = np.zeros((len(us), n), dtype=np.int64)
        for r, u in enumerate(us):
            adj_uv[r, indices[indptr[u]:indptr[u + 1]]] = 1
        d_sw = d_sw - 2 * adj_uv
        tabu_sw = (tabu[us][:, col] > it) | (tabu[:, a].T > it)
        ok_sw = (col[None, :] != a[:, None]) & (~tabu_sw | (conf + d_sw < best))
        key_sw = ((us[:, None] * _MIX_A) ^ ((verts[None, :] + 1) * _MIX_B) ^ noise[it]) & _MASK31
        score_sw = np.where(ok_sw, d_sw, _BIG) * (_MASK31 + 1) + key_sw
        best_sw = int(np.argmin(score_sw))
        cand = [(int(score_sw.flat[best_sw]), 0, best_sw)]
        if big != small:
            d_mv = gamma[us] - gamma[us, a][:, None]
            ok_mv = ((size[a] == big)[:, None] & (size[None, :] == small)
                     & ((tabu[us] <= it) | (conf + d_mv < best)))
            key_mv = ((us[:, None] * _MIX_A) ^ ((n + 1 + classes[None, :]) * _MIX_B) ^ noise[it]) & _MASK31
            score_mv = np.where(ok_mv, d_mv, _BIG) * (_MASK31 + 1) + key_mv
            best_mv = int(np.argmin(score_mv))
            cand.append((int(score_mv.flat[best_mv]), 1, best_mv))
        score, kind, flat = min(cand)
        if score >= _BIG * (_MASK31 + 1):
            continue
        ten = int(0.6 * conf) + int(noise[it] % 10)
        if kind == 0:
            r, v = divmod(flat, n)
            u = int(us[r])
            au, bv = int(col[u]), int(col[v])
            delta = int(d_sw[r, v])
            col[u] = bv
            tabu[u, au] = it + ten
            _np_apply_move(gamma, indptr, indices, u, au, bv)
            col[v] = au
            tabu[v, bv] = it + ten
            _np_apply_move(gamma, indptr, indices, v, bv, au)
        else:
            r, b = divmod(flat, k)
            u = int(us[r])
            au = int(col[u])
            delta = int(d_mv[r, b])
            col[u] = b
            tabu[u, au] = it + ten
            size[au] -= 1
            size[b] += 1
            _np_apply_move(gamma, indptr, indices, u, au, b)
        conf += delta
        if conf < best:
            best = conf
            best_col[:] = col
    if conf == 0:
        return col, 0, max_iter
    return best_col, best, max_iter


numpy_impl = SimpleNamespace(
    name="numpy",
    check_states=_np_check_states,
    orbit_scan=_np_orbit_scan,
    dense_subset_search=_np_dense_subset_search,
    tabucol=_np_tabucol,
    tabu_equitable=_np_tabu_equitable,
)


# =============================================================================
# numba backend

if HAVE_NUMBA:

    @njit(cache=True)
    def _popcount(x):
        x = x - ((x >> 1) & 0x5555555555555555)
        x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
        x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
        return ((x * 0x0101010101010101) & 0x7FFFFFFFFFFFFFFF) >> 56

    @njit(cache=True)
    def _side_connected(indptr, indices, state, want, visited, stack, stamp):
        n = state.shape[0]
        total = 0
        start = -1
        for v in range(n):
            if state[v] == want:
                total += 1
                if start < 0:
                    start = v
        if total == 0:
            return False
        visited[start] = stamp
        stack[0] = start
        top = 1
        cnt = 1
        while top > 0 and cnt < total:
            top -= 1
            u = stack[top]
            for j in range(indptr[u], indptr[u + 1]):
                w = indices[j]
                if state[w] == want and visited[w] != stamp:
                    visited[w] = stamp
                    cnt += 1
                    stack[top] = w
                    top += 1
        return cnt == total

    @njit(cache=True)
    def _nb_check_states(indptr, indices, states, both):
        b, n = states.shape
        visited = np.zeros(n, np.int64)
        stack = np.empty(n, np.int64)
        stamp = 0
        for r in range(b):
            stamp += 1
            if not _side_connected(indptr, indices, states[r], 1, visited, stack, stamp):
                return r
            if both:
                stamp += 1
                if not _side_connected(indptr, indices, states[r], 0, visited, stack, stamp):
                    return r
        return -1

    @njit(cache=True)
    def _nb_orbit_scan(indptr, indices, state0, bptr, bidx, start, stop, both):
        n = state0.shape[0]
        state = state0.copy()
        g = start ^ (start >> 1)
        i = 0
        while g:
            if g & 1:
                for j in range(bptr[i], bptr[i + 1]):
                    state[bidx[j]] ^= 1
            g >>= 1
            i += 1
        visited = np.zeros(n, np.int64)
        stack = np.empty(n, np.int64)
        stamp = 0
        for k in range(start, stop):
            if k > start:
                t = k
                b = 0
                while (t & 1) == 0:
                    t >>= 1
                    b += 1
                for j in range(bptr[b], bptr[b + 1]):
                    state[bidx[j]] ^= 1
            stamp += 1
            if not _side_connected(indptr, indices, state, 1, visited, stack, stamp):
                return k
            if both:
                stamp += 1
                if not _side_connected(indptr, indices, state, 0, visited, stack, stamp):
                    return k
        return -1

    @njit(cache=True)
    def _nb_dense_subset_search(masks, min_deg, max_size):
        c = masks.shape[0]
        if c == 0 or max_size < min_deg + 1:
            return -1
        for m in range(1, 1 << c):
            size = _popcount(m)
            if size < min_deg + 1 or size > max_size:
                continue
            ok = True
            for v in range(c):
                if (m >> v) & 1:
                    if _popcount(masks[v] & m) < min_deg:
                        ok = False
                        break
            if ok:
                return m
        return -1

    @njit(cache=True)
    def _nb_gamma(indptr, indices, col, k):
        n = col.shape[0]
        gamma = np.zeros((n, k), np.int64)
        for u in range(n):
            for j in range(indptr[u], indptr[u + 1]):
                gamma[u, col[indices[j]]] += 1
        return gamma

    @njit(cache=True)
    def _nb_apply_move(gamma, indptr, indices, x, a, b):
        for j in range(indptr[x], indptr[x + 1]):
            w = indices[j]
            gamma[w, a] -= 1
            gamma[w, b] += 1

    @njit(cache=True)
    def _nb_tabucol(indptr, indices, col, k, max_iter, noise):
        n = col.shape[0]
        col = col.copy()
        gamma = _nb_gamma(indptr, indices, col, k)
        conf = 0
        for u in range(n):
            conf += gamma[u, col[u]]
        conf //= 2
        tabu = np.zeros((n, k), np.int64)
        best = conf
        best_col = col.copy()
        for it in range(max_iter):
            if conf == 0:
                return col, 0, it
            bscore = _BIG * (_MASK31 + 1)
            bu = -1
            bb = -1
            bd = 0
            nz = noise[it]
            for u in range(n):
                a = col[u]
                if gamma[u, a] == 0:
                    continue
                for b in range(k):
                    if b == a:
                        continue
                    d = gamma[u, b] - gamma[u, a]
                    if tabu[u, b] > it and conf + d >= best:
                        continue
                    key = ((u * _MIX_A) ^ (b * _MIX_B) ^ nz) & _MASK31
                    score = d * (_MASK31 + 1) + key
                    if score < bscore:
                        bscore = score
                        bu = u
                        bb = b
                        bd = d
            if bu < 0:
                continue
            a = col[bu]
            col[bu] = bb
            tabu[bu, a] = it + int(0.6 * conf) + nz % 10
            _nb_apply_move(gamma, indptr, indices, bu, a, bb)
            conf += bd
            if conf < best:
                best = conf
                best_col[:] = col
        if conf == 0:
            return col, 0, max_iter
        return best_col, best, max_iter

    @njit(cache=True)
    def _nb_tabu_equitable(indptr, indices, col, k, max_iter, noise):
        n = col.shape[0]
        col = col.copy()
        gamma = _nb_gamma(indptr, indices, col, k)
        size = np.zeros(k, np.int64)
        for u in range(n):
            size[col[u]] += 1
        small = n // k
        big = small + (1 if n % k else 0)
        conf = 0
        for u in range(n):
            conf += gamma[u, col[u]]
        conf //= 2
        tabu = np.zeros((n, k), np.int64)
        adjrow = np.zeros(n, np.int64)
        best = conf
        best_col = col.copy()
        for it in range(max_iter):
            if conf == 0:
                return col, 0, it
            nz = noise[it]
            bscore = _BIG * (_MASK31 + 1)
            bkind = -1
            bu = -1
            bx = -1
            bd = 0
            for u in range(n):
                a = col[u]
                if gamma[u, a] == 0:
                    continue
                for j in range(indptr[u], indptr[u + 1]):
                    adjrow[indices[j]] = 1
                for v in range(n):
                    b = col[v]
                    if b == a:
                        continue
                    d = gamma[u, b] - gamma[u, a] + gamma[v, a] - gamma[v, b] - 2 * adjrow[v]
                    if (tabu[u, b] > it or tabu[v, a] > it) and conf + d >= best:
                        continue
                    key = ((u * _MIX_A) ^ ((v + 1) * _MIX_B) ^ nz) & _MASK31
                    score = d * (_MASK31 + 1) + key
                    if score < bscore:
                        bscore = score
                        bkind = 0
                        bu = u
                        bx = v
                        bd = d
                for j in range(indptr[u], indptr[u + 1]):
                    adjrow[indices[j]] = 0
                if big != small and size[a] == big:
                    for b in range(k):
                        if size[b] != small:
                            continue
                        d = gamma[u, b] - gamma[u, a]
                        if tabu[u, b] > it and conf + d >= best:
                            continue
                        key = ((u * _MIX_A) ^ ((n + 1 + b) * _MIX_B) ^ nz) & _MASK31
                        score = d * (_MASK31 + 1) + key
                        if score < bscore:
                            bscore = score
                            bkind = 1
                            bu = u
                            bx = b
                            bd = d
            if bkind < 0:
                continue
            ten = int(0.6 * conf) + nz % 10
            au = col[bu]
            if bkind == 0:
                bv = col[bx]
                col[bu] = bv
                tabu[bu, au] = it + ten
                _nb_apply_move(gamma, indptr, indices, bu, au, bv)
                col[bx] = au
                tabu[bx, bv] = it + ten
                _nb_apply_move(gamma, indptr, indices, bx, bv, au)
            else:
                col[bu] = bx
                tabu[bu, au] = it + ten
                size[au] -= 1
                size[bx] += 1
                _nb_apply_move(gamma, indptr, indices, bu, au, bx)
            conf += bd
            if conf < best:
                best = conf
                best_col[:] = col
        if conf == 0:
            return col, 0, max_iter
        return best_col, best, max_iter

    def _nb_orbit_scan_py(indptr, indices, state0, bptr, bidx, start, stop, both):
        return int(_nb_orbit_scan(indptr, indices, state0, bptr, bidx, np.int64(start), np.int64(stop), both))

    def _nb_check_states_py(indptr, indices, states, both):
        return int(_nb_check_states(indptr, indices, states, both))

    def _nb_dense_subset_search_py(masks, min_deg, max_size):
        return int(_nb_dense_subset_search(masks, np.int64(min_deg), np.int64(max_size)))

    def _nb_tabucol_py(indptr, indices, col, k, max_iter, noise):
        c, conf, it = _nb_tabucol(indptr, indices, col, np.int64(k), np.int64(max_iter), noise)
        return c, int(conf), int(it)

    def _nb_tabu_equitable_py(indptr, indices, col, k, max_iter, noise):
        c, conf, it = _nb_tabu_equitable(indptr, indices, col, np.int64(k), np.int64(max_iter), noise)
        return c, int(conf), int(it)

    numba_impl = SimpleNamespace(
        name="numba",
        check_states=_nb_check_states_py,
        orbit_scan=_nb_orbit_scan_py,
        dense_subset_search=_nb_dense_subset_search_py,
        tabucol=_nb_tabucol_py,
        tabu_equitable=_nb_tabu_equitable_py,
    )
else:  # pragma: no cover
    numba_impl = None

backend = numba_impl if USE_NUMBA else numpy_impl


def get_backend(name: str | None = None):
    if name is None:
        return backend
    if name == "numba":
        if numba_impl is None:
            raise RuntimeError("numba is not available")
        return numba_impl
    if name == "numpy":
        return numpy_impl
    raise ValueError(f"unknown backend {name!r}")


def noise_array(rng, length: int) -> np.ndarray:
    """Tie-breaking noise for the tabu kernels, drawn from a RandomStream."""
    return rng.integers(0, _MASK31 + 1, size=max(1, length)).astype(np.int64)
