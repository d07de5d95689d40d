import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legalsys.graph import Graph, full_set, vset
from legalsys.legal import (
    BudgetExceeded, LegalityCertificate, MoveSet, MoveViolation, coordinates, in_span, is_legal_state,
    naive_verify, orbit_closed_under_complement, parse_mode, span_basis, validate_moves, verify,
)

from oracles import naive_legal, subset_sums

# cherry: u1 = 0, v = 1, u2 = 2
CHERRY_MOVES = MoveSet.of([0b101, 0b010, 0b101])


def test_validate_examples(cherry):
    assert validate_moves(cherry, CHERRY_MOVES) is None
    bad = MoveSet.of([0b101, 0b011, 0b101])
    assert validate_moves(cherry, bad) == MoveViolation(1, "contains_neighbour")
    empty = MoveSet.of([0b101, 0, 0b101])
    assert validate_moves(cherry, empty) == MoveViolation(1, "missing_self")
    assert validate_moves(cherry, MoveSet.of([1, 2])).reason == "out_of_range"
    assert validate_moves(cherry, MoveSet.of([1, 2, 0b1100])).reason == "out_of_range"


def test_span_examples():
    assert span_basis([0b010, 0b101, 0b101])[1] == 2
    assert span_basis([1 << i for i in range(7)])[1] == 7
    assert span_basis([0b1011, 0b1011])[1] == 1
    assert span_basis([])[1] == 0


@given(st.lists(st.integers(0, 2**12 - 1), max_size=10))
def test_span_matches_subset_sums(vectors):
    basis, rank = span_basis(vectors)
    sums = subset_sums(vectors)
    assert len(sums) == 2**rank
    assert all(in_span(x, basis) for x in sums)
    # reduced echelon: each pivot appears in exactly one basis vector
    pivots = [(b & -b).bit_length() - 1 for b in basis]
    assert pivots == sorted(pivots)
    for i, b in enumerate(basis):
        for j, p in enumerate(pivots):
            assert (b >> p & 1) == (i == j)
    for x in range(2**12):
        assert in_span(x, basis) == (x in sums)


@given(st.lists(st.integers(1, 2**10 - 1), min_size=1, max_size=8))
def test_orbit_visits_each_element_once(vectors):
    m = MoveSet.of(vectors)
    orbit = m.orbit(0)
    assert len(orbit) == 2**m.rank == len(set(orbit))
    assert set(orbit) == subset_sums(vectors)


def test_legal_state_examples(cherry, bowtie):
    assert is_legal_state(cherry, 0b001)
    assert not is_legal_state(bowtie, vset([1, 2, 3, 4]))
    assert not is_legal_state(cherry, 0b111)
    assert not is_legal_state(cherry, 0)


def test_verify_cherry(cherry):
    cert = verify(cherry, 0b001, CHERRY_MOVES)
    assert cert.legal and cert.states_checked == 4 and cert.rank == 2


def test_verify_bowtie_counterexample(bowtie):
    # S = {u1, u2}, M_v = {v}, M_ui = {ui}, M_wi = {u1, u2, wi}
    moves = MoveSet.of([1 << 0, 1 << 1, 1 << 2, vset([1, 2, 3]), vset([1, 2, 4])])
    s = vset([1, 2])
    cert = verify(bowtie, s, moves)
    assert not cert.legal and cert.recheck(bowtie, s, moves)
    # {w1, w2} is a counterexample too
    assert moves.contains(vset([3, 4])) and not is_legal_state(bowtie, s ^ vset([3, 4]))


def test_verify_edge_counterexample():
    g = Graph.from_edges(2, [(0, 1)])
    cert = verify(g, 0b01, MoveSet.of([0b01, 0b10]))
    assert not cert.legal
    assert cert.witness_g in (0b01, 0b10, 0b11)
    assert not is_legal_state(g, cert.witness_state)


def test_closed_under_complement(cherry):
    assert orbit_closed_under_complement(CHERRY_MOVES, 3)
    assert not orbit_closed_under_complement(MoveSet.of([1, 0]), 2)
    classes = [vset([0, 2]), vset([1, 3])]
    assert orbit_closed_under_complement(MoveSet.of(classes), 4)


@st.composite
def systems(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    g = Graph.from_edges(n, [p for p, b in zip(pairs, mask) if b])
    moves = []
    for v in range(n):
        free = g.vertex_set & ~g.rows[v] & ~(1 << v)
        extra = draw(st.integers(0, 2**n - 1)) & free
        moves.append((1 << v) | extra)
    s = draw(st.integers(0, 2**n - 1))
    return g, s, moves


@settings(max_examples=150)
@given(systems())
def test_verify_matches_naive(sys_):
    g, s, moves = sys_
    m = MoveSet.of(moves)
    assert validate_moves(g, m) is None
    cert = verify(g, s, m)
    assert cert.legal == naive_legal(g, s, moves)
    assert cert.legal == naive_verify(g, s, moves)[0]
    assert cert.recheck(g, s, m)
    if cert.legal and orbit_closed_under_complement(m, g.n):
        orbit = set(m.orbit(s))
        assert {full_set(g.n) ^ x for x in orbit} == orbit


@settings(max_examples=60)
@given(systems(), st.integers(0, 1000))
def test_sampled_counterexamples_are_real(sys_, seed):
    g, s, moves = sys_
    m = MoveSet.of(moves)
    cert = verify(g, s, m, "sampled:50", rng=seed)
    if cert.legal:
        # the zero element is always sampled
        assert is_legal_state(g, s)
    else:
        assert cert.recheck(g, s, m) and not naive_legal(g, s, moves)
    assert cert == verify(g, s, m, "sampled:50", rng=seed)


def test_sampled_includes_zero_and_complement():
    # only the zero element and V lie in the span; one sample must hit both
    g = Graph.path(4)
    m = MoveSet.of([0b1111] * 4)
    cert = verify(g, 0b0011, m, "sampled:2", rng=1)
    assert cert.legal and cert.states_checked == 2
    bad = verify(g, 0b0101, m, "sampled:1", rng=1)
    assert not bad.legal and bad.witness_g == 0


def test_exhaustive_cap():
    g = Graph.empty(30)
    m = MoveSet.of([1 << v for v in range(30)])
    with pytest.raises(BudgetExceeded):
        verify(g, 1, m, "exhaustive")
    with pytest.raises(BudgetExceeded):
        verify(g, 1, MoveSet.of([1 << v for v in range(5)] + [0] * 25), "exhaustive", rank_cap=4)


def test_certificate_json_roundtrip(bowtie):
    moves = MoveSet.of([1 << 0, 1 << 1, 1 << 2, vset([1, 2, 3]), vset([1, 2, 4])])
    cert = verify(bowtie, vset([1, 2]), moves)
    doc = cert.to_json()
    assert doc["schema"] == "legalsys.certificate/1"
    assert LegalityCertificate.from_json(doc) == cert
    with pytest.raises(ValueError):
        LegalityCertificate.from_json({**doc, "schema": "other"})


def test_parse_mode():
    assert parse_mode("exhaustive") == ("exhaustive", None)
    assert parse_mode("sampled") == ("sampled", 10_000)
    assert parse_mode("sampled:7") == ("sampled", 7)
    for bad in ("sampled:0", "sometimes"):
        with pytest.raises(ValueError):
            parse_mode(bad)


def test_coordinates():
    basis, _ = span_basis([0b011, 0b110])
    c = coordinates(0b101, basis)
    assert c is not None
    assert coordinates(0b001, basis) is None
