"""The three legal-system constructions.

* :func:`construct_dense` pairs up a maximal matching of the complement.
* :func:`construct_colouring` uses colour classes of an equitable colouring
  as moves and a uniformly random initial state.
* :func:`construct_main` is the colouring construction with deterministic
  repairs around low-degree vertices (``D0``) and vertices whose
  neighbourhood is poorly spread over signed class halves (``D1``).

Every construction returns a :class:`ConstructionTranscript` that can be
serialised, replayed and handed to :func:`legalsys.legal.verify`.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from itertools import product

from .colouring import DEFAULT_C_CHI, EquitableColouring, equitable_colouring
from .graph import Graph, Matching, VertexSet, complement, from_hex, greedy_maximal_matching, members, to_hex
from .legal import MoveSet, validate_moves
from .rng import RandomStream, as_stream

TRANSCRIPT_SCHEMA = "legalsys.transcript/1"


class ConstructionError(Exception):
    kind = "construction_error"

    def to_json(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class GraphComplete(ConstructionError):
    kind = "graph_complete"


class PairingFailed(ConstructionError):
    kind = "pairing_failed"

    def __init__(self, stage: str, vertex: int, detail: str = ""):
        super().__init__(f"{stage} pairing failed at vertex {vertex}" + (f": {detail}" if detail else ""))
        self.stage = stage
        self.vertex = vertex

    def to_json(self) -> dict:
        return {"error": self.kind, "stage": self.stage, "vertex": self.vertex, "message": str(self)}


class MoveInvalid(ConstructionError):
    kind = "move_invalid"


class AdjacentPairWarning(UserWarning):
    """An N0 pair had to be taken adjacent; its pair move was split into singletons."""


# ----------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class SignedColouring:
    colouring: EquitableColouring
    plus: VertexSet  # vertices with sign +; everything else is -

    def sign(self, v: int) -> str:
        return "+" if self.plus >> v & 1 else "-"

    def halves(self, i: int) -> tuple[VertexSet, VertexSet]:
        c = self.colouring.classes[i]
        return c & self.plus, c & ~self.plus


@dataclass
class ConstructionTranscript:
    method: str  # "dense" | "colouring" | "main"
    n: int
    state: VertexSet
    moves: MoveSet
    matching: tuple[tuple[int, int], ...] = ()
    classes: tuple[VertexSet, ...] = ()
    signs: VertexSet | None = None
    d0: VertexSet = 0
    n0: dict[int, tuple[int, int]] = field(default_factory=dict)
    d1: VertexSet = 0
    n1: dict[int, tuple[int, int]] = field(default_factory=dict)
    v_prime: VertexSet = 0
    v_double_prime: VertexSet = 0
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def pairs(self) -> dict[int, tuple[int, int]]:
        out = dict(self.n0)
        out.update(self.n1)
        return out

    def to_json(self) -> dict:
        doc = {
            "schema": TRANSCRIPT_SCHEMA,
            "method": self.method,
            "n": self.n,
            "S": to_hex(self.state),
            "moves": [to_hex(m) for m in self.moves.moves],
            "rank": self.moves.rank,
            "params": self.params,
            "diagnostics": self.diagnostics,
        }
        if self.matching:
            doc["matching"] = [list(p) for p in self.matching]
        if self.classes:
            doc["classes"] = [to_hex(c) for c in self.classes]
        if self.signs is not None:
            doc["signs_plus"] = to_hex(self.signs)
        if self.method == "main":
            doc.update({
                "D0": to_hex(self.d0),
                "N0": [[w, a, b] for w, (a, b) in sorted(self.n0.items())],
                "D1": to_hex(self.d1),
                "N1": [[w, a, b] for w, (a, b) in sorted(self.n1.items())],
                "V_prime": to_hex(self.v_prime),
                "V_double_prime": to_hex(self.v_double_prime),
            })
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc: dict) -> "ConstructionTranscript":
        if doc.get("schema") != TRANSCRIPT_SCHEMA:
            raise ValueError(f"unsupported transcript schema {doc.get('schema')!r}")
        return cls(
            method=doc["method"],
            n=doc["n"],
            state=from_hex(doc["S"]),
            moves=MoveSet.of(from_hex(m) for m in doc["moves"]),
            matching=tuple(tuple(p) for p in doc.get("matching", [])),
            classes=tuple(from_hex(c) for c in doc.get("classes", [])),
            signs=from_hex(doc["signs_plus"]) if "signs_plus" in doc else None,
            d0=from_hex(doc.get("D0", "")),
            n0={w: (a, b) for w, a, b in doc.get("N0", [])},
            d1=from_hex(doc.get("D1", "")),
            n1={w: (a, b) for w, a, b in doc.get("N1", [])},
            v_prime=from_hex(doc.get("V_prime", "")),
            v_double_prime=from_hex(doc.get("V_double_prime", "")),
            params=doc.get("params", {}),
            diagnostics=doc.get("diagnostics", {}),
        )


# ----------------------------------------------------------------------------
# dense regime


def construct_dense(g: Graph, rng: RandomStream | int | None = None) -> ConstructionTranscript:
    h = complement(g)
    if h.edge_count == 0:
        raise GraphComplete("graph is complete; it has no legal system")
    rng = as_stream(rng)
    f = greedy_maximal_matching(h, rng.child("matching"))
    moves = [1 << v for v in range(g.n)]
    state = 0
    for u, v in f.pairs:
        pair = (1 << u) | (1 << v)
        moves[u] = moves[v] = pair
        state |= 1 << u
    return ConstructionTranscript(
        method="dense",
        n=g.n,
        state=state,
        moves=MoveSet.of(moves),
        matching=f.pairs,
        diagnostics={"matching_size": len(f), "complement_edges": h.edge_count},
    )


def check_star_condition(g: Graph, f: Matching | tuple) -> list[int]:
    """Vertices whose complement-neighbourhood touches at least ceil(k/2) pairs of ``f``.

    A vertex's own pair is not counted.  With ``k = 0`` nothing violates.
    """
    pairs = f.pairs if isinstance(f, Matching) else tuple(f)
    k = len(pairs)
    if k == 0:
        return []
    h = complement(g)
    need = (k + 1) // 2
    masks = [(1 << u) | (1 << v) for u, v in pairs]
    out = []
    for v in range(g.n):
        nh = h.rows[v]
        touched = sum(1 for m in masks if nh & m and not m >> v & 1)
        if touched >= need:
            out.append(v)
    return out


# ----------------------------------------------------------------------------
# colouring construction


def construct_colouring(
    g: Graph,
    colouring: EquitableColouring | None = None,
    rng: RandomStream | int | None = None,
    *,
    state: VertexSet | None = None,
) -> ConstructionTranscript:
    """Class moves plus a fair-coin initial state (or the given ``state``)."""
    rng = as_stream(rng)
    if colouring is None:
        colouring = equitable_colouring(g, rng.child("colouring"))
    moves = [colouring.classes[colouring.class_of[v]] for v in range(g.n)]
    if state is None:
        coins = rng.child("subset").coin(g.n)
        state = sum(1 << int(v) for v in coins.nonzero()[0])
    return ConstructionTranscript(
        method="colouring",
        n=g.n,
        state=state,
        moves=MoveSet.of(moves),
        classes=colouring.classes,
        diagnostics={"classes": colouring.count, "class_sizes": sorted(set(colouring.sizes()))},
    )


# ----------------------------------------------------------------------------
# kappa


def kappa(u: VertexSet, signed: SignedColouring) -> int:
    """Minimum over sign vectors of the signed class halves' hits in ``u``.

    The choice is independent per class, so the minimum splits into a sum of
    per-class minima.
    """
    total = 0
    plus = signed.plus
    for c in signed.colouring.classes:
        hit = u & c
        if hit:
            a = (hit & plus).bit_count()
            total += min(a, hit.bit_count() - a)
    return total


def kappa_bruteforce(u: VertexSet, classes, plus: VertexSet) -> int:
    """Oracle: enumerate all 2^m sign vectors."""
    best = None
    for sigma in product((True, False), repeat=len(classes)):
        s = 0
        for c, pos in zip(classes, sigma):
            s += (u & c & (plus if pos else ~plus)).bit_count()
        best = s if best is None else min(best, s)
    return best or 0


# ----------------------------------------------------------------------------
# main construction


@dataclass(frozen=True)
class MainParams:
    """Knobs of the main construction.

    ``d0_threshold``: D0 holds vertices of degree <= d0_threshold * log n.
    ``d1_constant``: D1 holds vertices v with kappa(N(v)) < d1_constant * (log log n)^2.
    ``c_chi``: class-count constant reported alongside the colouring.
    """

    d0_threshold: float = 0.01
    d1_constant: float = 1.0
    c_chi: float = DEFAULT_C_CHI
    tabu_iters: int = 30_000

    def d0_bound(self, n: int) -> float:
        return self.d0_threshold * math.log(n)

    def d1_bound(self, n: int) -> float:
        return self.d1_constant * math.log(math.log(n)) ** 2

    def to_json(self) -> dict:
        return {"d0_threshold": self.d0_threshold, "d1_constant": self.d1_constant,
                "c_chi": self.c_chi, "tabu_iters": self.tabu_iters}


def _pick_n0_pairs(g: Graph, d0: VertexSet) -> tuple[dict[int, tuple[int, int]], list[int]]:
    """Disjoint neighbour pairs per D0 vertex, non-adjacent pairs preferred."""
    used = d0
    pairs: dict[int, tuple[int, int]] = {}
    adjacent: list[int] = []
    for w in members(d0):
        avail = members(g.rows[w] & ~used)
        if len(avail) < 2:
            raise PairingFailed("N0", w, f"only {len(avail)} free neighbour(s)")
        choice = None
        for i, a in enumerate(avail):
            for b in avail[i + 1:]:
                if not g.has_edge(a, b):
                    choice = (a, b)
                    break
            if choice:
                break
        if choice is None:
            choice = (avail[0], avail[1])
            adjacent.append(w)
        pairs[w] = choice
        used |= (1 << choice[0]) | (1 << choice[1])
    return pairs, adjacent


def _pick_n1_pairs(g: Graph, d1: VertexSet, classes, blocked: VertexSet) -> dict[int, tuple[int, int]]:
    """Disjoint same-class neighbour pairs per D1 vertex, avoiding ``blocked`` and D1 itself."""
    used = blocked | d1
    pairs: dict[int, tuple[int, int]] = {}
    for w in members(d1):
        nb = g.rows[w] & ~used
        choice = None
        for c in classes:
            hit = nb & c
            if hit.bit_count() >= 2:
                mem = members(hit)
                choice = (mem[0], mem[1])
                break
        if choice is None:
            raise PairingFailed("N1", w, "no two free neighbours in a common class")
        pairs[w] = choice
        used |= (1 << choice[0]) | (1 << choice[1])
    return pairs


def construct_main(
    g: Graph,
    params: MainParams | None = None,
    rng: RandomStream | int | None = None,
    *,
    colouring: EquitableColouring | None = None,
) -> ConstructionTranscript:
    params = params or MainParams()
    rng = as_stream(rng)
    n = g.n
    if n < 3:
        raise PairingFailed("N0", 0, "graph too small")
    full = g.vertex_set
    warn_list: list[str] = []

    low = g.min_degree()
    if low < 2:
        v = int(g.degrees.argmin())
        raise PairingFailed("N0", v, f"minimum degree {low} < 2")

    # (1) low-degree vertices
    d0_cut = params.d0_bound(n)
    d0 = sum(1 << v for v in range(n) if g.degree(v) <= d0_cut)
    # (2) disjoint neighbour pairs
    n0, adjacent = _pick_n0_pairs(g, d0)
    n0_set = 0
    for a, b in n0.values():
        n0_set |= (1 << a) | (1 << b)
    for w in adjacent:
        a, b = n0[w]
        msg = f"N0 pair ({a}, {b}) of vertex {w} is adjacent; using singleton moves"
        warnings.warn(msg, AdjacentPairWarning, stacklevel=2)
        warn_list.append(msg)
    v_prime = full & ~d0

    # (3) equitable colouring of V, trimmed
    if colouring is None:
        colouring = equitable_colouring(g, rng.child("colouring"), tabu_iters=params.tabu_iters)
    trimmed = tuple(c & ~(d0 | n0_set) for c in colouring.classes)
    trimmed = tuple(c for c in trimmed if c)
    class_of = [-1] * n
    for i, c in enumerate(trimmed):
        for v in members(c):
            class_of[v] = i
    # D0 and N0 vertices belong to no trimmed class (class index -1)
    signed_col = EquitableColouring(trimmed, tuple(class_of))

    # (4) random signs
    coins = rng.child("sign").coin(n)
    plus = sum(1 << int(v) for v in coins.nonzero()[0])
    signed = SignedColouring(signed_col, plus)

    # (5) poorly supported vertices
    d1_cut = params.d1_bound(n)
    kappas = {}
    d1 = 0
    for v in members(v_prime & ~n0_set):
        kv = kappa(g.rows[v], signed)
        kappas[v] = kv
        if kv < d1_cut:
            d1 |= 1 << v

    # (6) same-class neighbour pairs
    n1 = _pick_n1_pairs(g, d1, trimmed, d0 | n0_set)
    n1_set = 0
    for a, b in n1.values():
        n1_set |= (1 << a) | (1 << b)

    # (7) pair members get opposite signs
    for pairs in (n0, n1):
        for a, b in pairs.values():
            plus |= 1 << a
            plus &= ~(1 << b)

    # (8) moves
    v_dprime = v_prime & ~d1
    moves = [0] * n
    singles = d0 | d1
    adjacent_set = set(adjacent)
    for v in range(n):
        if singles >> v & 1:
            moves[v] = 1 << v
    for w, (a, b) in n0.items():
        if w in adjacent_set:
            moves[a], moves[b] = 1 << a, 1 << b
        else:
            moves[a] = moves[b] = (1 << a) | (1 << b)
    for v in members(v_dprime & ~n0_set):
        moves[v] = trimmed[class_of[v]]
    move_set = MoveSet.of(moves)
    bad = validate_moves(g, move_set)
    if bad is not None:
        raise MoveInvalid(str(bad))

    # (9) initial state
    state = plus
    kv = list(kappas.values())
    diagnostics = {
        "n": n,
        "min_degree": low,
        "max_degree": g.max_degree(),
        "d0_bound": d0_cut,
        "d1_bound": d1_cut,
        "D0": d0.bit_count(),
        "N0": 2 * len(n0),
        "D1": d1.bit_count(),
        "N1": 2 * len(n1),
        "classes": len(trimmed),
        "colouring_classes": colouring.count,
        "kappa_min": min(kv) if kv else None,
        "kappa_mean": (sum(kv) / len(kv)) if kv else None,
        "warnings": warn_list,
    }
    return ConstructionTranscript(
        method="main",
        n=n,
        state=state,
        moves=move_set,
        classes=trimmed,
        signs=plus,
        d0=d0,
        n0=n0,
        d1=d1,
        n1=n1,
        v_prime=v_prime,
        v_double_prime=v_dprime,
        params=params.to_json(),
        diagnostics=diagnostics,
    )
