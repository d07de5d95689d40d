"""Random graph models and the edge-addition process.

Vertex pairs are indexed lexicographically: ``(0,1), (0,2), ..., (n-2,n-1)``.
``gnp`` draws one uniform per pair in that order.  ``gnm`` and ``process``
share one random edge order (pairs sorted by an independent uniform key), so
``gnm(n, m, seed)`` is exactly the first ``m`` edges of ``process(n, seed)``
and graphs for increasing ``m`` nest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import Graph
from .rng import RandomStream

TRACE_SCHEMA = "legalsys.trace/1"
_CHUNK = 1 << 20


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of all pairs in lexicographic order."""
    return np.triu_indices(n, 1)


def _stream(seed: int | RandomStream, name: str) -> RandomStream:
    if isinstance(seed, RandomStream):
        return seed.child(name)
    return RandomStream(int(seed)).child(name)


def gnp(n: int, p: float, seed: int | RandomStream = 0) -> Graph:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = _stream(seed, "graph")
    us_out, vs_out = [], []
    # rows are grouped into chunks; the draw sequence is still one uniform per pair in order
    u = 0
    while u < n - 1:
        rows = [u]
        size = n - u - 1
        while rows[-1] + 1 < n - 1 and size + (n - rows[-1] - 2) <= _CHUNK:
            rows.append(rows[-1] + 1)
            size += n - rows[-1] - 1
        draws = rng.random(size) < p
        off = 0
        for r in rows:
            k = n - r - 1
            hit = np.nonzero(draws[off:off + k])[0]
            us_out.append(np.full(len(hit), r, dtype=np.int64))
            vs_out.append(hit + r + 1)
            off += k
        u = rows[-1] + 1
    if not us_out:
        return Graph.empty(n)
    return Graph.from_edge_arrays(n, np.concatenate(us_out), np.concatenate(vs_out))


def edge_order(n: int, seed: int | RandomStream = 0) -> np.ndarray:
    """A uniformly random permutation of the pair indices."""
    rng = _stream(seed, "order")
    keys = rng.random(pair_count(n))
    return np.argsort(keys, kind="stable")


def gnm(n: int, m: int, seed: int | RandomStream = 0) -> Graph:
    total = pair_count(n)
    if not 0 <= m <= total:
        raise ValueError(f"m must lie in [0, {total}]")
    if m == total:
        return Graph.complete(n)
    order = edge_order(n, seed)[:m]
    us, vs = pair_arrays(n)
    return Graph.from_edge_arrays(n, us[order], vs[order])


@dataclass
class ProcessTrace:
    n: int
    seed: int
    order: np.ndarray  # pair indices, lexicographic numbering
    t2: int

    @cached_property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        us, vs = pair_arrays(self.n)
        return us[self.order], vs[self.order]

    def graph_at(self, t: int) -> Graph:
        """The graph after the first ``t`` edges."""
        if not 0 <= t <= len(self.order):
            raise ValueError("t out of range")
        us, vs = self.endpoints
        return Graph.from_edge_arrays(self.n, us[:t], vs[:t])

    def to_json(self, full: bool = False) -> dict:
        """Edges up to ``T2`` (or the whole order when ``full``)."""
        us, vs = self.endpoints
        stop = len(self.order) if full else self.t2
        return {
            "schema": TRACE_SCHEMA,
            "n": self.n,
            "seed": self.seed,
            "T2": self.t2,
            "edges": np.stack([us[:stop], vs[:stop]], axis=1).tolist(),
            "complete": bool(full),
        }

    def dumps(self, full: bool = False) -> str:
        return json.dumps(self.to_json(full), sort_keys=True)


def min_degree_hitting_time(n: int, us: np.ndarray, vs: np.ndarray, k: int = 2) -> int:
    """Number of edges after which every vertex has degree at least ``k``."""
    pos = np.arange(len(us), dtype=np.int64)
    ends = np.concatenate([us, vs])
    when = np.concatenate([pos, pos])
    idx = np.lexsort((when, ends))
    ends, when = ends[idx], when[idx]
    starts = np.searchsorted(ends, np.arange(n))
    counts = np.bincount(ends, minlength=n)
    if counts.min() < k:
        raise ValueError("edge sequence never reaches the requested minimum degree")
    return int(when[starts + k - 1].max()) + 1


def process(n: int, seed: int = 0) -> ProcessTrace:
    if n < 3:
        raise ValueError("process needs n >= 3")
    order = edge_order(n, seed)
    us, vs = pair_arrays(n)
    t2 = min_degree_hitting_time(n, us[order], vs[order])
    return ProcessTrace(n, int(seed), order, t2)
