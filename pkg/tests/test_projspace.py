import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spreadlab.config import CapExceeded, cap
from spreadlab.galois import make_tower, prime_field
from spreadlab.projspace import (
    Subspace,
    all_points,
    all_subspaces,
    image,
    in_general_position,
    mat_inverse,
    mat_mul,
    meet,
    normalize,
    null_space,
    points_of,
    projective_count,
    rank,
    solve,
    span,
    subspace_from_json,
)

GF2, GF3 = prime_field(2), prime_field(3)
GF4 = make_tower(2, 1, 2).top
GF9 = make_tower(3, 1, 2).top


def dot(F, a, b):
    out = 0
    for x, y in zip(a, b):
        out = F.add(out, F.mul(x, y))
    return out


def brute_points(F, rows, n):
    """All normalised nonzero combinations of ``rows`` (membership oracle)."""
    pts = set()
    for c in product(F.elements, repeat=len(rows)):
        v = [0] * n
        for ci, r in zip(c, rows):
            for i, x in enumerate(r):
                v[i] = F.add(v[i], F.mul(ci, x))
        if any(v):
            pts.add(normalize(F, v))
    return pts


def random_subspace(F, n, rng, max_rank=None):
    d = rng.randint(1, max_rank or n)
    rows = [tuple(rng.randrange(F.order) for _ in range(n)) for _ in range(d)]
    rows = [r for r in rows if any(r)] or [tuple(int(i == 0) for i in range(n))]
    return Subspace.from_rows(F, n, rows)


# --- normalisation --------------------------------------------------------------

def test_normalize_examples():
    assert normalize(GF3, (0, 2, 1)) == (0, 1, 2)
    assert normalize(GF3, (1, 2, 0)) == (1, 2, 0)
    w = 2
    assert normalize(GF4, (w, 1)) == (1, GF4.inv(w)) == (1, 3)


def test_normalize_zero():
    with pytest.raises(ValueError):
        normalize(GF3, (0, 0, 0))


@given(st.lists(st.integers(0, 8), min_size=1, max_size=6).filter(any))
def test_normalize_idempotent(v):
    p = normalize(GF9, v)
    assert normalize(GF9, p) == p
    assert next(x for x in p if x) == 1


# --- span, RREF ---------------------------------------------------------------------

def test_span_single_point():
    S = span(GF3, [(0, 2, 1)])
    assert S.rank == 1 and S.dim == 0
    assert S.basis == ((0, 1, 2),)


def test_span_unit_vectors_is_full():
    n = 4
    S = span(GF3, [tuple(int(i == j) for j in range(n)) for i in range(n)])
    assert S.rank == n
    assert len(points_of(S)) == 40


def test_span_of_three_points_of_a_plane():
    rng = random.Random(1)
    plane = Subspace.from_rows(GF3, 4, [(1, 0, 2, 1), (0, 1, 1, 1), (0, 0, 1, 2)])
    pts = points_of(plane)
    for _ in range(20):
        sample = rng.sample(pts, 3)
        S = span(GF3, sample)
        if rank(GF3, sample) == 3:
            assert S == plane
        assert all(P in plane for P in points_of(S))


def test_span_mixed_dimensions():
    with pytest.raises(ValueError):
        span(GF3, [(1, 0), (1, 0, 0)])


def test_rref_shape():
    rng = random.Random(2)
    for _ in range(50):
        S = random_subspace(GF9, 5, rng)
        assert list(S.pivots) == sorted(S.pivots)
        for row, pc in zip(S.basis, S.pivots):
            assert row[pc] == 1
            assert all(row[c] == 0 for c in range(pc))
            assert all(other[pc] == 0 for other in S.basis if other is not row)


def test_canonical_form_equality():
    rng = random.Random(3)
    for _ in range(50):
        S = random_subspace(GF3, 6, rng)
        assert span(GF3, points_of(S)) == S
        assert hash(span(GF3, points_of(S))) == hash(S)


def test_subspace_json_round_trip():
    S = Subspace.from_rows(GF9, 3, [(1, 5, 7), (0, 1, 3)])
    assert subspace_from_json(GF9, S.to_json()) == S
    with pytest.raises(ValueError):
        subspace_from_json(GF3, S.to_json())


# --- meet -------------------------------------------------------------------

def test_two_hyperplanes_of_a_plane_meet_in_a_point():
    A = Subspace.from_rows(GF3, 3, [(1, 0, 0), (0, 1, 0)])
    B = Subspace.from_rows(GF3, 3, [(1, 0, 0), (0, 0, 1)])
    M = meet(A, B)
    assert M.rank == 1 and M.basis == ((1, 0, 0),)


def test_meet_with_superspace():
    A = Subspace.from_rows(GF3, 4, [(1, 1, 0, 0)])
    B = Subspace.from_rows(GF3, 4, [(1, 0, 0, 0), (0, 1, 0, 0)])
    assert meet(A, B) == A


def test_disjoint_lines_of_pg33():
    A = Subspace.from_rows(GF3, 4, [(1, 0, 0, 0), (0, 1, 0, 0)])
    B = Subspace.from_rows(GF3, 4, [(0, 0, 1, 0), (0, 0, 0, 1)])
    assert meet(A, B) is None
    assert not set(points_of(A)) & set(points_of(B))


def test_meet_matches_point_enumeration():
    rng = random.Random(4)
    for _ in range(100):
        A = random_subspace(GF3, 4, rng, 3)
        B = random_subspace(GF3, 4, rng, 3)
        M = meet(A, B)
        common = set(points_of(A)) & set(points_of(B))
        assert (set(points_of(M)) if M else set()) == common


def test_modular_identity_on_random_pairs_in_pg73():
    rng = random.Random(20240607)
    for _ in range(1000):
        A = random_subspace(GF3, 8, rng)
        B = random_subspace(GF3, 8, rng)
        M = meet(A, B)
        m = M.rank if M else 0
        assert A.rank + B.rank == span(GF3, [A, B]).rank + m


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_meet_is_contained_in_both(data):
    rows = st.lists(st.tuples(*[st.integers(0, 3)] * 4).filter(any), min_size=1, max_size=3)
    A = Subspace.from_rows(GF4, 4, data.draw(rows))
    B = Subspace.from_rows(GF4, 4, data.draw(rows))
    M = meet(A, B)
    if M is not None:
        assert A.contains_subspace(M) and B.contains_subspace(M)


# --- points ------------------------------------------------------------------

def test_point_counts():
    line = Subspace.from_rows(GF3, 4, [(1, 0, 0, 0), (0, 1, 0, 0)])
    assert len(points_of(line)) == 4
    assert len(all_points(GF2, 4)) == 15
    solid = Subspace.from_rows(GF2, 8, [tuple(int(i == j) for j in range(8)) for i in range(4)])
    assert len(points_of(solid)) == 15


def test_points_match_brute_force_and_are_sorted():
    rng = random.Random(5)
    for _ in range(30):
        S = random_subspace(GF4, 4, rng, 3)
        pts = points_of(S)
        assert pts == sorted(pts)
        assert len(pts) == len(set(pts)) == projective_count(4, S.rank)
        assert set(pts) == brute_points(GF4, S.basis, 4)


def test_all_points_order_and_count():
    pts = all_points(GF3, 3)
    assert pts == sorted(pts)
    assert len(pts) == 13
    assert all(next(x for x in P if x) == 1 for P in pts)


def test_cap_guards_enumeration():
    with cap(10):
        with pytest.raises(CapExceeded):
            all_points(GF3, 4)
        S = Subspace.from_rows(GF3, 4, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)])
        with pytest.raises(CapExceeded):
            points_of(S)


def test_membership():
    S = Subspace.from_rows(GF9, 3, [(1, 2, 0), (0, 0, 1)])
    assert (1, 2, 7) in S
    assert (0, 1, 0) not in S


# --- general position -----------------------------------------------------------

def test_general_position_examples():
    frame = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
    assert in_general_position(GF9, frame)
    assert not in_general_position(GF9, [(1, 0, 0), (1, 0, 0), (0, 0, 1), (1, 1, 1)])
    with pytest.raises(ValueError):
        in_general_position(GF9, frame[:3])


def test_three_collinear_points_are_not_in_general_position():
    rng = random.Random(6)
    line = Subspace.from_rows(GF9, 3, [(1, 0, 3), (0, 1, 5)])
    on = points_of(line)
    off = [P for P in all_points(GF9, 3) if P not in line]
    for _ in range(30):
        pts = rng.sample(on, 3) + [rng.choice(off)]
        rng.shuffle(pts)
        assert not in_general_position(GF9, pts)


# --- linear algebra helpers ----------------------------------------------------

def test_null_space_annihilates():
    rng = random.Random(7)
    for _ in range(30):
        rows = [tuple(rng.randrange(9) for _ in range(5)) for _ in range(rng.randint(1, 4))]
        N = null_space(GF9, rows, 5)
        assert len(N) == 5 - rank(GF9, rows)
        assert all(dot(GF9, r, x) == 0 for r in rows for x in N)


def test_solve_and_inverse():
    M = [(1, 2, 0), (0, 1, 1), (1, 0, 2)]
    Minv = mat_inverse(GF3, M)
    identity = [tuple(int(i == j) for j in range(3)) for i in range(3)]
    assert mat_mul(GF3, M, Minv) == identity
    c = solve(GF3, M, (2, 1, 0))
    assert c is not None
    assert tuple(sum(ci * r[j] for ci, r in zip(c, M)) % 3 for j in range(3)) == (2, 1, 0)
    assert solve(GF3, [(1, 0, 0)], (0, 1, 0)) is None
    with pytest.raises(ValueError):
        mat_inverse(GF3, [(1, 1), (2, 2)])


def test_all_subspaces_counts():
    lines = all_subspaces(GF2, 4, 2)
    assert len(lines) == 35 == len(set(lines))
    assert len(all_subspaces(GF3, 3, 2)) == 13


def test_image_under_invertible_map():
    M = [(0, 1, 0), (0, 0, 1), (1, 0, 0)]
    S = Subspace.from_rows(GF3, 3, [(1, 0, 0)])
    assert image(S, M).basis == ((0, 1, 0),)
