"""Equitable proper colourings.

Pipeline: a DSatur greedy colouring (random tie-breaks) is balanced by
chain moves between classes; if balancing stalls, a tabu search over
colourings with the equitable size profile repairs it, and as a last resort
a class is added.  Afterwards the class count is pushed down one step at a
time (tabu search for a proper colouring, then equitable repair) while the
iteration budget allows.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import Graph, VertexSet, members
from .rng import RandomStream, as_stream

DEFAULT_C_CHI = 8.0


@dataclass(frozen=True)
class EquitableColouring:
    classes: tuple[VertexSet, ...]
    class_of: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.classes)

    def sizes(self) -> list[int]:
        return [c.bit_count() for c in self.classes]

    @classmethod
    def from_labels(cls, labels) -> "EquitableColouring":
        """Relabel so classes are ordered by their smallest vertex."""
        labels = [int(x) for x in labels]
        remap: dict[int, int] = {}
        for lab in labels:
            if lab not in remap:
                remap[lab] = len(remap)
        class_of = tuple(remap[lab] for lab in labels)
        classes = [0] * len(remap)
        for v, c in enumerate(class_of):
            classes[c] |= 1 << v
        return cls(tuple(classes), class_of)

    def to_json(self) -> list[list[int]]:
        return [members(c) for c in self.classes]


def is_proper(g: Graph, classes) -> bool:
    return all(not (g.rows[v] & c) for c in classes for v in _iter_bits(c))


def is_equitable_colouring(g: Graph, col: EquitableColouring) -> bool:
    if sum(c.bit_count() for c in col.classes) != g.n:
        return False
    union = 0
    for c in col.classes:
        if union & c or c == 0:
            return False
        union |= c
    if union != g.vertex_set:
        return False
    sizes = col.sizes()
    return is_proper(g, col.classes) and (not sizes or max(sizes) - min(sizes) <= 1)


def _iter_bits(s: int):
    while s:
        low = s & -s
        yield low.bit_length() - 1
        s ^= low


# ----------------------------------------------------------------------------
# greedy


def dsatur(g: Graph, rng: RandomStream) -> np.ndarray:
    """DSatur order; each vertex joins its smallest feasible class (ties: lowest index)."""
    n = g.n
    indptr, indices = g.csr
    tiebreak = rng.permutation(n)
    col = np.full(n, -1, dtype=np.int64)
    seen_cols: list[set[int]] = [set() for _ in range(n)]
    sizes: list[int] = []
    deg = g.degrees
    heap = [(0, -int(deg[v]), int(tiebreak[v]), v) for v in range(n)]
    heapq.heapify(heap)
    while heap:
        negsat, _, _, v = heapq.heappop(heap)
        if col[v] >= 0 or -negsat != len(seen_cols[v]):
            continue
        blocked = seen_cols[v]
        best = -1
        for c in range(len(sizes)):
            if c not in blocked and (best < 0 or sizes[c] < sizes[best]):
                best = c
        if best < 0:
            best = len(sizes)
            sizes.append(0)
        col[v] = best
        sizes[best] += 1
        for w in indices[indptr[v]:indptr[v + 1]]:
            w = int(w)
            if col[w] < 0 and best not in seen_cols[w]:
                seen_cols[w].add(best)
                heapq.heappush(heap, (-len(seen_cols[w]), -int(deg[w]), int(tiebreak[w]), w))
    return col


# ----------------------------------------------------------------------------
# balancing


def _gamma(g: Graph, col: np.ndarray, k: int) -> np.ndarray:
    indptr, indices = g.csr
    src = np.repeat(np.arange(g.n), np.diff(indptr))
    gamma = np.zeros((g.n, k), dtype=np.int64)
    np.add.at(gamma, (src, col[indices]), 1)
    return gamma


def balance(g: Graph, col: np.ndarray, k: int) -> bool:
    """Shift vertices along chains of conflict-free moves until sizes differ by <= 1.

    ``col`` must be a proper colouring with labels ``0..k-1``; it is updated in
    place and stays proper.  Returns whether the result is equitable.
    """
    if k == 0:
        return True
    indptr, indices = g.csr
    gamma = _gamma(g, col, k)
    while True:
        sizes = np.bincount(col, minlength=k)
        lo, hi = int(sizes.min()), int(sizes.max())
        if hi - lo <= 1:
            return True
        free = gamma == 0
        # mover[X, Y]: some vertex of X has no neighbour in Y
        mover = np.full((k, k), -1, dtype=np.int64)
        for x in range(k):
            verts = np.nonzero(col == x)[0]
            if len(verts) == 0:
                continue
            f = free[verts]
            has = f.any(axis=0)
            first = f.argmax(axis=0)
            mover[x, has] = verts[first[has]]
            mover[x, x] = -1
        sources = [int(c) for c in np.nonzero(sizes == hi)[0]]
        targets = set(int(c) for c in np.nonzero(sizes <= hi - 2)[0])
        parent = {c: None for c in sources}
        queue = deque(sources)
        end = None
        while queue and end is None:
            x = queue.popleft()
            for y in np.nonzero(mover[x] >= 0)[0]:
                y = int(y)
                if y in parent:
                    continue
                parent[y] = x
                if y in targets:
                    end = y
                    break
                queue.append(y)
        if end is None:
            return False
        path = [end]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        path.reverse()
        # move from the far end backwards so each chosen vertex is still in place
        for x, y in reversed(list(zip(path, path[1:]))):
            v = int(mover[x, y])
            col[v] = y
            nb = indices[indptr[v]:indptr[v + 1]]
            gamma[nb, x] -= 1
            gamma[nb, y] += 1


def _profile_start(g: Graph, col: np.ndarray, k: int) -> np.ndarray:
    """Reassign vertices so class sizes match the equitable profile, greedily minimising conflicts."""
    n = g.n
    col = col.copy()
    small, extra = divmod(n, k)
    gamma = _gamma(g, col, k)
    indptr, indices = g.csr
    sizes = np.bincount(col, minlength=k)
    order = np.argsort(-sizes, kind="stable")
    target = np.empty(k, dtype=np.int64)
    target[order] = small
    target[order[:extra]] += 1
    while True:
        over = np.nonzero(sizes > target)[0]
        if len(over) == 0:
            return col
        under = np.nonzero(sizes < target)[0]
        x = int(over[0])
        verts = np.nonzero(col == x)[0]
        cost = gamma[np.ix_(verts, under)] - gamma[verts, x][:, None]
        i, j = np.unravel_index(int(np.argmin(cost)), cost.shape)
        v, y = int(verts[i]), int(under[j])
        col[v] = y
        sizes[x] -= 1
        sizes[y] += 1
        nb = indices[indptr[v]:indptr[v + 1]]
        gamma[nb, x] -= 1
        gamma[nb, y] += 1


def _dissolve_class(g: Graph, col: np.ndarray, k: int) -> np.ndarray:
    """Drop the smallest class, sending each vertex to its least-conflicting remaining class."""
    sizes = np.bincount(col, minlength=k)
    drop = int(np.argmin(sizes))
    col = col.copy()
    col[col == drop] = -1
    col[col > drop] -= 1
    indptr, indices = g.csr
    for v in np.nonzero(col < 0)[0]:
        nb = indices[indptr[v]:indptr[v + 1]]
        counts = np.bincount(col[nb][col[nb] >= 0], minlength=k - 1)
        col[v] = int(np.argmin(counts))
    return col


def equitable_colouring(
    g: Graph,
    rng: RandomStream | int | None = None,
    *,
    reduce: bool = True,
    tabu_iters: int = 30_000,
    max_reductions: int | None = None,
    backend: str | None = None,
) -> EquitableColouring:
    """An equitable proper colouring of ``g``, deterministic per stream.

    ``tabu_iters`` bounds every tabu call; ``reduce=False`` skips the
    class-count reduction stage.
    """
    rng = as_stream(rng)
    kern = kernels.get_backend(backend)
    n = g.n
    if n == 0:
        return EquitableColouring((), ())
    indptr, indices = g.csr
    col = dsatur(g, rng.child("dsatur"))
    k = int(col.max()) + 1
    repair = rng.child("repair")

    def make_equitable(c: np.ndarray, kk: int) -> np.ndarray | None:
        c = c.copy()
        if balance(g, c, kk):
            return c
        start = _profile_start(g, c, kk)
        out, conf, _ = kern.tabu_equitable(indptr, indices, start, kk, tabu_iters,
                                           kernels.noise_array(repair, tabu_iters))
        if conf == 0:
            return np.asarray(out, dtype=np.int64)
        return None

    eq = make_equitable(col, k)
    while eq is None:
        # split the largest class in two and rebalance
        sizes = np.bincount(col, minlength=k)
        big = int(np.argmax(sizes))
        verts = np.nonzero(col == big)[0]
        col = col.copy()
        col[verts[len(verts) // 2:]] = k
        k += 1
        c2 = col.copy()
        eq = c2 if balance(g, c2, k) else None
    col = eq

    steps = 0
    reduce_rng = rng.child("reduce")
    while reduce and k > 1 and (max_reductions is None or steps < max_reductions):
        start = _dissolve_class(g, col, k)
        proper, conf, _ = kern.tabucol(indptr, indices, start, k - 1, tabu_iters,
                                       kernels.noise_array(reduce_rng, tabu_iters))
        if conf != 0:
            break
        cand = make_equitable(np.asarray(proper, dtype=np.int64), k - 1)
        if cand is None:
            break
        col, k = cand, k - 1
        steps += 1
    return EquitableColouring.from_labels(col)


def class_count_bound(n: int, c_chi: float = DEFAULT_C_CHI) -> float:
    return c_chi * math.log(n) / math.log(math.log(n))


@dataclass(frozen=True)
class ClassCountCheck:
    passed: bool
    measured: int
    bound: float


def check_class_count(colouring: EquitableColouring, n: int, c_chi: float = DEFAULT_C_CHI) -> ClassCountCheck:
    if n < 3:
        raise ValueError("class-count bound needs n >= 3")
    bound = class_count_bound(n, c_chi)
    return ClassCountCheck(colouring.count <= bound, colouring.count, bound)


def colouring_from_classes(n: int, classes) -> EquitableColouring:
    labels = [0] * n
    for i, c in enumerate(classes):
        for v in c:
            labels[v] = i
    return EquitableColouring.from_labels(labels)
