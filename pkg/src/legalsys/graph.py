"""Graph core: bitset adjacency, connectivity and structural subroutines.

Vertices are dense indices ``0..n-1``.  A vertex set is a plain Python
``int`` used as a bitset (bit ``i`` set iff vertex ``i`` is in the set); the
same int is the GF(2) vector of the set, so symmetric difference is ``^``.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse as sp

from .rng import RandomStream, as_stream

VertexSet = int


class GraphFormatError(ValueError):
    """Raised when a graph text file cannot be parsed."""


# ----------------------------------------------------------------------------
# vertex-set helpers


def vset(vertices: Iterable[int]) -> VertexSet:
    s = 0
    for v in vertices:
        s |= 1 << int(v)
    return s


def members(s: VertexSet) -> list[int]:
    out = []
    while s:
        low = s & -s
        out.append(low.bit_length() - 1)
        s ^= low
    return out


def full_set(n: int) -> VertexSet:
    return (1 << n) - 1


def to_hex(s: VertexSet) -> str:
    return format(s, "x")


def from_hex(text: str) -> VertexSet:
    return int(text, 16) if text else 0


def set_to_array(s: VertexSet, n: int) -> np.ndarray:
    """Membership array (uint8, length n) of a vertex set."""
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = s.to_bytes((n + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].copy()


def array_to_set(arr: np.ndarray) -> VertexSet:
    packed = np.packbits(np.asarray(arr, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


# ----------------------------------------------------------------------------


class Graph:
    """Immutable simple undirected graph with one neighbour bitset per vertex."""

    __slots__ = ("n", "rows", "edge_count", "__dict__")

    def __init__(self, n: int, rows: Iterable[int]):
        rows = tuple(rows)
        if len(rows) != n:
            raise ValueError("need one adjacency row per vertex")
        self.n = n
        self.rows = rows
        self.edge_count = sum(r.bit_count() for r in rows) // 2

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @classmethod
    def from_edge_arrays(cls, n: int, us: np.ndarray, vs: np.ndarray) -> "Graph":
        """Build from parallel endpoint arrays; fast path for large random graphs."""
        nbytes = max(1, (n + 7) // 8)
        packed = np.zeros((n, nbytes), dtype=np.uint8)
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if np.any(us == vs):
            raise ValueError("self-loop in edge arrays")
        for a, b in ((us, vs), (vs, us)):
            np.bitwise_or.at(packed, (a, b >> 3), (1 << (b & 7)).astype(np.uint8))
        rows = [int.from_bytes(packed[i].tobytes(), "little") for i in range(n)]
        return cls(n, rows)

    @classmethod
    def from_dense(cls, adj: np.ndarray) -> "Graph":
        adj = np.asarray(adj, dtype=bool)
        us, vs = np.nonzero(np.triu(adj, 1))
        return cls.from_edge_arrays(adj.shape[0], us, vs)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = full_set(n)
        return cls(n, [full ^ (1 << v) for v in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        return cls.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "Graph":
        return cls.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])

    # -- basic queries ------------------------------------------------------

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    @property
    def vertex_set(self) -> VertexSet:
        return full_set(self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([r.bit_count() for r in self.rows], dtype=np.int64)

    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def neighbours(self, v: int) -> list[int]:
        return members(self.rows[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        for u, row in enumerate(self.rows):
            for v in members(row >> (u + 1) << (u + 1)):
                yield u, v

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        indptr, indices = self.csr
        us = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(indptr))
        keep = us < indices
        return us[keep], indices[keep].astype(np.int64)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) with sorted neighbour lists, int64."""
        n = self.n
        nbytes = max(1, (n + 7) // 8)
        buf = b"".join(r.to_bytes(nbytes, "little") for r in self.rows)
        bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8).reshape(n, nbytes), axis=1,
                             bitorder="little")[:, :n] if n else np.zeros((0, 0), np.uint8)
        rr, cc = np.nonzero(bits)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rr, minlength=n), out=indptr[1:])
        return indptr, cc.astype(np.int64)

    def sparse_adjacency(self) -> sp.csr_matrix:
        indptr, indices = self.csr
        data = np.ones(len(indices), dtype=np.int32)
        return sp.csr_matrix((data, indices, indptr), shape=(self.n, self.n))

    def dense_adjacency(self) -> np.ndarray:
        return self.sparse_adjacency().toarray().astype(bool)

    def induced_edge_count(self, s: VertexSet) -> int:
        return sum((self.rows[v] & s).bit_count() for v in members(s)) // 2

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = list(self.rows)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph(self.n, rows)

    # -- file format --------------------------------------------------------

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"{self.n} {self.edge_count}\n")
        for u, v in self.edges():
            out.write(f"{u} {v}\n")
        return out.getvalue()

    def write(self, path: str | os.PathLike) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def parse(cls, text: str) -> "Graph":
        lines = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            lines.append(line)
        if not lines:
            raise GraphFormatError("empty graph file")
        try:
            n, m = (int(x) for x in lines[0].split())
        except ValueError:
            raise GraphFormatError(f"bad header line {lines[0]!r}, expected 'n m'") from None
        if n < 0 or m < 0:
            raise GraphFormatError("negative n or m")
        if len(lines) - 1 != m:
            raise GraphFormatError(f"header announces {m} edges, found {len(lines) - 1}")
        rows = [0] * n
        for line in lines[1:]:
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError(f"bad edge line {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"bad edge line {line!r}") from None
            if not 0 <= u < v < n:
                raise GraphFormatError(f"edge line {line!r} violates 0 <= u < v < n")
            if rows[u] >> v & 1:
                raise GraphFormatError(f"duplicate edge {u} {v}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @classmethod
    def read(cls, path: str | os.PathLike) -> "Graph":
        with open(path) as fh:
            return cls.parse(fh.read())


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def covered(self) -> VertexSet:
        s = 0
        for u, v in self.pairs:
            s |= (1 << u) | (1 << v)
        return s


# ----------------------------------------------------------------------------
# operations


def is_connected_subset(g: Graph, s: VertexSet) -> bool:
    """True iff ``s`` is non-empty and ``g[s]`` is connected."""
    if s == 0:
        return False
    rows = g.rows
    seen = frontier = s & -s
    while frontier:
        reach = 0
        while frontier:
            low = frontier & -frontier
            reach |= rows[low.bit_length() - 1]
            frontier ^= low
        frontier = reach & s & ~seen
        seen |= frontier
    return seen == s


def connected_components(g: Graph, s: VertexSet | None = None) -> list[VertexSet]:
    """Components of ``g[s]`` (whole graph by default), ordered by lowest vertex."""
    rest = g.vertex_set if s is None else s
    rows = g.rows
    comps = []
    while rest:
        seen = frontier = rest & -rest
        while frontier:
            reach = 0
            while frontier:
                low = frontier & -frontier
                reach |= rows[low.bit_length() - 1]
                frontier ^= low
            frontier = reach & rest & ~seen
            seen |= frontier
        comps.append(seen)
        rest &= ~seen
    return comps


def complement(g: Graph) -> Graph:
    full = g.vertex_set
    return Graph(g.n, [full & ~r & ~(1 << v) for v, r in enumerate(g.rows)])


def greedy_maximal_matching(g: Graph, rng: RandomStream | int | None = None) -> Matching:
    """Maximal matching from a greedy scan of the edges in stream-shuffled order."""
    rng = as_stream(rng)
    us, vs = g.edge_arrays()
    order = rng.permutation(len(us)) if len(us) else np.zeros(0, dtype=np.int64)
    used = np.zeros(g.n, dtype=bool)
    pairs = []
    for e in order:
        u, v = int(us[e]), int(vs[e])
        if not used[u] and not used[v]:
            used[u] = used[v] = True
            pairs.append((u, v))
    return Matching(tuple(pairs))


def is_maximal_matching(g: Graph, m: Matching) -> bool:
    cov = m.covered
    seen = 0
    for u, v in m.pairs:
        if not g.has_edge(u, v) or (seen >> u & 1) or (seen >> v & 1):
            return False
        seen |= (1 << u) | (1 << v)
    return all((cov >> u & 1) or (cov >> v & 1) for u, v in g.edges())


def k23_witness(g: Graph) -> tuple[tuple[int, int], tuple[int, int, int]] | None:
    """A pair of vertices with three common neighbours, or ``None`` if K_{2,3}-free."""
    if g.n < 5:
        return None
    a = g.sparse_adjacency()
    codeg = sp.triu(a @ a, k=1).tocoo()
    hit = np.nonzero(codeg.data >= 3)[0]
    if len(hit) == 0:
        return None
    i = hit[np.lexsort((codeg.col[hit], codeg.row[hit]))[0]]
    u, v = int(codeg.row[i]), int(codeg.col[i])
    common = members(g.rows[u] & g.rows[v])[:3]
    return (u, v), tuple(common)


def d0_short_path_violation(g: Graph, d0: VertexSet, maxlen: int = 4) -> list[int] | None:
    """A path of length 1..maxlen joining two distinct vertices of ``d0``, or ``None``."""
    rows = g.rows
    for w in members(d0):
        targets = d0 & ~(1 << w)
        if not targets:
            continue
        layers = [1 << w]
        seen = 1 << w
        for _ in range(maxlen):
            frontier = layers[-1]
            reach = 0
            while frontier:
                low = frontier & -frontier
                reach |= rows[low.bit_length() - 1]
                frontier ^= low
            nxt = reach & ~seen
            if not nxt:
                break
            layers.append(nxt)
            seen |= nxt
            hit = nxt & targets
            if hit:
                x = (hit & -hit).bit_length() - 1
                path = [x]
                for layer in reversed(layers[:-1]):
                    prev = rows[path[-1]] & layer
                    path.append((prev & -prev).bit_length() - 1)
                return path[::-1]
    return None
