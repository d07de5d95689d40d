"""Moves, states and legal-system verification.

The group generated by the moves is an elementary abelian 2-group, so it is
handled as the GF(2) span of the move vectors.  A vertex set ``S`` is a
legal state when ``S`` and ``V - S`` are both non-empty and connected; a
triple ``(G, S, M)`` is a legal system when every translate ``S + g`` with
``g`` in the span is a legal state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .graph import Graph, VertexSet, from_hex, full_set, is_connected_subset, members, set_to_array, to_hex
from .rng import RandomStream, as_stream

EXHAUSTIVE_RANK_CAP = 24
DEFAULT_SAMPLES = 10_000
CERTIFICATE_SCHEMA = "legalsys.certificate/1"


class BudgetExceeded(RuntimeError):
    """Exhaustive verification requested for a span above the rank cap."""


# ----------------------------------------------------------------------------
# GF(2) span


def span_basis(vectors: Iterable[VertexSet]) -> tuple[tuple[VertexSet, ...], int]:
    """Reduced echelon basis of the span, pivots on the lowest set bit.

    Each basis vector's pivot (its lowest set bit) appears in no other basis
    vector, so membership is decided by XOR-ing in the basis vectors whose
    pivots are set.  Basis vectors are returned sorted by pivot.
    """
    basis: dict[int, int] = {}
    for x in vectors:
        x = reduce_vector(x, basis)
        if x:
            pivot = (x & -x).bit_length() - 1
            for p, b in basis.items():
                if b >> pivot & 1:
                    basis[p] = b ^ x
            basis[pivot] = x
    ordered = tuple(basis[p] for p in sorted(basis))
    return ordered, len(ordered)


def reduce_vector(x: VertexSet, basis) -> VertexSet:
    items = basis.items() if isinstance(basis, dict) else ((_pivot(b), b) for b in basis)
    for p, b in items:
        if x >> p & 1:
            x ^= b
    return x


def _pivot(b: VertexSet) -> int:
    return (b & -b).bit_length() - 1


def in_span(x: VertexSet, basis: Sequence[VertexSet]) -> bool:
    return reduce_vector(x, basis) == 0


def coordinates(x: VertexSet, basis: Sequence[VertexSet]) -> int | None:
    """Bitmask of basis vectors summing to ``x``, or ``None`` if ``x`` is outside the span."""
    coords = 0
    for i, b in enumerate(basis):
        if x >> _pivot(b) & 1:
            x ^= b
            coords |= 1 << i
    return coords if x == 0 else None


def combine(coords: int, basis: Sequence[VertexSet]) -> VertexSet:
    g = 0
    i = 0
    while coords:
        if coords & 1:
            g ^= basis[i]
        coords >>= 1
        i += 1
    return g


def gray(k: int) -> int:
    return k ^ (k >> 1)


# ----------------------------------------------------------------------------
# moves


@dataclass(frozen=True)
class MoveSet:
    moves: tuple[VertexSet, ...]
    basis: tuple[VertexSet, ...] = field(init=False, repr=False, compare=False)
    rank: int = field(init=False, compare=False)

    def __post_init__(self):
        basis, rank = span_basis(self.moves)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "rank", rank)

    @classmethod
    def of(cls, moves: Iterable[VertexSet]) -> "MoveSet":
        return cls(tuple(int(m) for m in moves))

    @property
    def n(self) -> int:
        return len(self.moves)

    def contains(self, x: VertexSet) -> bool:
        return in_span(x, self.basis)

    def orbit(self, s: VertexSet) -> list[VertexSet]:
        """All translates ``s + g`` in Gray-code order (small ranks only)."""
        out = [s]
        cur = s
        for k in range(1, 1 << self.rank):
            cur ^= self.basis[(k & -k).bit_length() - 1]
            out.append(cur)
        return out


@dataclass(frozen=True)
class MoveViolation:
    vertex: int
    reason: str  # "missing_self" | "contains_neighbour" | "out_of_range"

    def __str__(self) -> str:
        return f"move at vertex {self.vertex}: {self.reason}"


def validate_moves(g: Graph, m: MoveSet) -> MoveViolation | None:
    """``None`` when every move is valid, else the first offending vertex."""
    if m.n != g.n:
        return MoveViolation(min(m.n, g.n), "out_of_range")
    full = g.vertex_set
    for v, mv in enumerate(m.moves):
        if mv & ~full:
            return MoveViolation(v, "out_of_range")
        if not mv >> v & 1:
            return MoveViolation(v, "missing_self")
        if mv & g.rows[v]:
            return MoveViolation(v, "contains_neighbour")
    return None


def is_legal_state(g: Graph, s: VertexSet) -> bool:
    rest = g.vertex_set & ~s
    return is_connected_subset(g, s) and is_connected_subset(g, rest)


def orbit_closed_under_complement(m: MoveSet, n: int) -> bool:
    return in_span(full_set(n), m.basis)


# ----------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class LegalityCertificate:
    mode: str  # "exhaustive" | "sampled"
    rank: int
    legal: bool
    states_checked: int
    sample_count: int | None = None
    witness_g: VertexSet | None = None
    witness_state: VertexSet | None = None

    @property
    def verdict(self) -> str:
        return "legal" if self.legal else "counterexample"

    def to_json(self) -> dict:
        doc = {
            "schema": CERTIFICATE_SCHEMA,
            "mode": self.mode,
            "rank": self.rank,
            "verdict": self.verdict,
            "states_checked": self.states_checked,
        }
        if self.sample_count is not None:
            doc["sample_count"] = self.sample_count
        if not self.legal:
            doc["counterexample"] = {"g": to_hex(self.witness_g), "state": to_hex(self.witness_state)}
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc: dict) -> "LegalityCertificate":
        if doc.get("schema") != CERTIFICATE_SCHEMA:
            raise ValueError(f"unsupported certificate schema {doc.get('schema')!r}")
        cx = doc.get("counterexample")
        return cls(
            mode=doc["mode"],
            rank=doc["rank"],
            legal=doc["verdict"] == "legal",
            states_checked=doc["states_checked"],
            sample_count=doc.get("sample_count"),
            witness_g=from_hex(cx["g"]) if cx else None,
            witness_state=from_hex(cx["state"]) if cx else None,
        )

    def recheck(self, g: Graph, s: VertexSet, m: MoveSet) -> bool:
        """Re-validate a counterexample from the certificate alone."""
        if self.legal:
            return True
        return (
            m.contains(self.witness_g)
            and self.witness_state == s ^ self.witness_g
            and not is_legal_state(g, self.witness_state)
        )


def parse_mode(mode: str) -> tuple[str, int | None]:
    """``"exhaustive"`` or ``"sampled"`` / ``"sampled:N"``."""
    if mode == "exhaustive":
        return "exhaustive", None
    if mode == "sampled":
        return "sampled", DEFAULT_SAMPLES
    if mode.startswith("sampled:"):
        count = int(mode.split(":", 1)[1])
        if count < 1:
            raise ValueError("sample count must be positive")
        return "sampled", count
    raise ValueError(f"unknown verification mode {mode!r}")


def _basis_csr(basis: Sequence[VertexSet]) -> tuple[np.ndarray, np.ndarray]:
    ptr = [0]
    idx: list[int] = []
    for b in basis:
        idx.extend(members(b))
        ptr.append(len(idx))
    return np.asarray(ptr, dtype=np.int64), np.asarray(idx, dtype=np.int64)


def verify(
    g: Graph,
    s: VertexSet,
    m: MoveSet,
    mode: str = "exhaustive",
    *,
    rng: RandomStream | int | None = None,
    rank_cap: int = EXHAUSTIVE_RANK_CAP,
    backend: str | None = None,
) -> LegalityCertificate:
    """Check every (or a sample of) orbit state ``s + g`` for legality.

    Exhaustive mode walks the span in Gray-code order.  When ``V`` lies in
    the span the orbit is closed under complement, so only the state side is
    checked for connectivity.  Sampled mode always includes the zero element
    and, when ``V`` is in the span, the complement element.
    """
    kind, count = parse_mode(mode)
    kern = kernels.get_backend(backend)
    n = g.n
    indptr, indices = g.csr
    state0 = set_to_array(s, n)
    closed = orbit_closed_under_complement(m, n)

    if kind == "exhaustive":
        if m.rank > rank_cap:
            raise BudgetExceeded(f"span rank {m.rank} exceeds exhaustive cap {rank_cap}; use sampled mode")
        bptr, bidx = _basis_csr(m.basis)
        total = 1 << m.rank
        bad = kern.orbit_scan(indptr, indices, state0, bptr, bidx, 0, total, not closed)
        if bad < 0:
            return LegalityCertificate("exhaustive", m.rank, True, total)
        gel = combine(gray(bad), m.basis)
        return LegalityCertificate("exhaustive", m.rank, False, bad + 1, witness_g=gel, witness_state=s ^ gel)

    rng = as_stream(rng).child("verify-samples")
    coords = [0]
    if closed:
        coords.append(coordinates(full_set(n), m.basis))
    coords = coords[:count]
    rest = count - len(coords)
    if rest > 0:
        coords.extend(_random_coords(rng, m.rank, rest))
    elems = [combine(c, m.basis) for c in coords]
    batch = 1024
    for lo in range(0, len(elems), batch):
        chunk = elems[lo:lo + batch]
        states = np.stack([set_to_array(s ^ e, n) for e in chunk]) if n else np.zeros((len(chunk), 0), np.uint8)
        bad = kern.check_states(indptr, indices, states, True)
        if bad >= 0:
            gel = chunk[bad]
            return LegalityCertificate("sampled", m.rank, False, lo + bad + 1, sample_count=count,
                                       witness_g=gel, witness_state=s ^ gel)
    return LegalityCertificate("sampled", m.rank, True, len(elems), sample_count=count)


def _random_coords(rng: RandomStream, rank: int, count: int) -> list[int]:
    if rank == 0:
        return [0] * count
    words = (rank + 62) // 63
    draws = rng.integers(0, 1 << 63, size=(count, words))
    out = []
    for row in draws:
        c = 0
        for w in row[::-1]:
            c = (c << 63) | int(w)
        out.append(c & ((1 << rank) - 1))
    return out


def naive_verify(g: Graph, s: VertexSet, moves: Sequence[VertexSet]) -> tuple[bool, VertexSet | None]:
    """Oracle: enumerate every subset-sum of the move list directly."""
    distinct = sorted(set(moves))
    seen = set()
    for mask in range(1 << len(distinct)):
        e = 0
        for i, mv in enumerate(distinct):
            if mask >> i & 1:
                e ^= mv
        if e in seen:
            continue
        seen.add(e)
        if not is_legal_state(g, s ^ e):
            return False, e
    return True, None
