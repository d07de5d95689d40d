"""Exhaustive decision of legal-system existence on small graphs.

The search assigns moves vertex by vertex while tracking the set of
candidate initial states that are still viable: a state ``S`` survives the
partial span ``W`` iff every translate ``S + w`` is a legal state.  Adding
a move ``M`` keeps ``S`` iff both ``S`` and ``S + M`` survived before.  Every
eliminated state records a span element that sends it to an illegal state,
so each refutation can be re-checked independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations

from .graph import Graph, VertexSet, full_set, members, vset
from .legal import MoveSet, in_span, is_legal_state, span_basis

DEFAULT_BUDGET = 10**8


@dataclass
class SearchResult:
    verdict: str  # "yes" | "no" | "unknown"
    nodes: int
    state: VertexSet | None = None
    moves: MoveSet | None = None
    # state -> span element refuting it, recorded at the root when verdict is "no"
    refutations: list[tuple[tuple[VertexSet, ...], dict[VertexSet, VertexSet]]] = field(default_factory=list)


def legal_states(g: Graph) -> list[VertexSet]:
    return [s for s in range(1, full_set(g.n)) if is_legal_state(g, s)]


def move_options(g: Graph, v: int) -> list[VertexSet]:
    """All valid moves at ``v``: ``{v}`` plus subsets of non-neighbours, by increasing size."""
    free = members(g.vertex_set & ~g.rows[v] & ~(1 << v))
    out = []
    for k in range(len(free) + 1):
        for extra in combinations(free, k):
            out.append((1 << v) | vset(extra))
    return out


def exists_legal_system(g: Graph, budget: int = DEFAULT_BUDGET, *, keep_refutations: bool = False) -> SearchResult:
    n = g.n
    if n < 2:
        return SearchResult("no", 0)
    legal = legal_states(g)
    if not legal:
        return SearchResult("no", 0)
    order = sorted(range(n), key=lambda v: (-g.degree(v), v))
    options = {v: move_options(g, v) for v in order}
    moves: list[VertexSet] = [0] * n
    nodes = 0
    result: SearchResult | None = None
    refutations = []

    def rec(depth: int, cand: frozenset, refute: dict) -> bool:
        nonlocal nodes, result
        if depth == n:
            result = SearchResult("yes", nodes, state=min(cand), moves=MoveSet.of(moves))
            return True
        v = order[depth]
        for mv in options[v]:
            nodes += 1
            if nodes > budget:
                return True
            keep = frozenset(s for s in cand if s ^ mv in cand)
            sub_refute = refute
            if keep_refutations:
                # s + mv already refuted (or illegal), so s is refuted by mv plus that element
                sub_refute = dict(refute)
                for s in cand - keep:
                    sub_refute[s] = mv ^ refute[s ^ mv]
            if not keep:
                if keep_refutations:
                    prefix = tuple(moves[order[i]] for i in range(depth)) + (mv,)
                    refutations.append((prefix, sub_refute))
                continue
            moves[v] = mv
            if rec(depth + 1, keep, sub_refute):
                return True
        return False

    start = frozenset(legal)
    base_refute = {}
    if keep_refutations:
        base_refute = {s: 0 for s in range(1 << n) if s not in start}
    rec(0, start, base_refute)
    if result is not None:
        result.nodes = nodes
        return result
    if nodes > budget:
        return SearchResult("unknown", nodes)
    return SearchResult("no", nodes, refutations=refutations)


def check_refutation(g: Graph, moves_prefix: tuple[VertexSet, ...], refute: dict[VertexSet, VertexSet]) -> bool:
    """Every legal state has a recorded span element (of the prefix moves) making it illegal."""
    basis, _ = span_basis(moves_prefix)
    for s in legal_states(g):
        e = refute.get(s)
        if e is None or not in_span(e, basis) or is_legal_state(g, s ^ e):
            return False
    return True


# ----------------------------------------------------------------------------
# small-n classification


def adjacency_bits(g: Graph, perm: tuple[int, ...] | None = None) -> str:
    """Upper-triangle adjacency string in lexicographic pair order."""
    n = g.n
    p = perm or tuple(range(n))
    bits = []
    for i in range(n):
        for j in range(i + 1, n):
            bits.append("1" if g.has_edge(p[i], p[j]) else "0")
    return "".join(bits)


def canonical_form(g: Graph) -> str:
    """Lexicographically smallest adjacency string over all vertex relabelings."""
    return min(adjacency_bits(g, perm) for perm in permutations(range(g.n)))


def graph_from_bits(n: int, bits: str) -> Graph:
    edges = []
    pos = 0
    for i in range(n):
        for j in range(i + 1, n):
            if bits[pos] == "1":
                edges.append((i, j))
            pos += 1
    return Graph.from_edges(n, edges)


@dataclass(frozen=True)
class ClassRow:
    canonical: str
    n: int
    edges: int
    min_degree: int
    verdict: str
    state: VertexSet | None = None
    moves: tuple[VertexSet, ...] | None = None

    def to_json(self) -> dict:
        doc = {"canonical": self.canonical, "n": self.n, "edges": self.edges,
               "min_degree": self.min_degree, "verdict": self.verdict}
        if self.state is not None:
            doc["witness"] = {"state": format(self.state, "x"), "moves": [format(m, "x") for m in self.moves]}
        return doc


def all_graph_classes(n: int) -> list[str]:
    pairs = n * (n - 1) // 2
    seen = set()
    for code in range(1 << pairs):
        bits = format(code, f"0{pairs}b") if pairs else ""
        seen.add(canonical_form(graph_from_bits(n, bits)))
    return sorted(seen)


def classify_all_graphs(n: int, budget: int = DEFAULT_BUDGET) -> list[ClassRow]:
    if not 1 <= n <= 5:
        raise ValueError("classification is limited to 1 <= n <= 5")
    rows = []
    for canon in all_graph_classes(n):
        g = graph_from_bits(n, canon)
        res = exists_legal_system(g, budget)
        rows.append(ClassRow(canon, n, g.edge_count, g.min_degree(), res.verdict,
                             res.state, res.moves.moves if res.moves else None))
    return rows
