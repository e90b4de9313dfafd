import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spreadlab.galois import make_tower, prime_field, tower_for
from spreadlab.moore import moore_space
from spreadlab.projspace import (
    Subspace,
    all_points,
    image,
    meet,
    normalize,
    points_of,
    rank,
)
from spreadlab.segre import (
    SegreSystem,
    build_generalized_segre,
    build_segre,
    extend_segre,
    induced_spreads_are_scalar_classes,
    is_rank_one,
    outer,
    quadric_kernel_dimension,
    regulus_member_through,
    second_system_by_scalar_classes,
    segre_through_pseudo_arc,
)
from spreadlab.singer import canonical_pseudo_arc

GF2, GF3 = prime_field(2), prime_field(3)
GF9 = make_tower(3, 1, 2).top


def random_invertible(F, n, rng):
    while True:
        M = [tuple(rng.randrange(F.order) for _ in range(n)) for _ in range(n)]
        if rank(F, M) == n:
            return M


# --- rank-1 test ----------------------------------------------------------------

def test_outer_product_is_rank_one():
    assert is_rank_one(GF9, outer(GF9, (1, 5), (3, 0, 7)), 2, 3)


def test_identity_block_is_not_rank_one():
    assert not is_rank_one(GF3, (1, 0, 0, 1), 2, 2)
    assert not is_rank_one(GF3, (1, 0, 0, 1), 2, 2, method="rref")


@pytest.mark.parametrize("F,n,shapes", [(GF3, 4, [(2, 2)]), (GF2, 8, [(2, 4), (4, 2)])])
def test_minor_and_rank_tests_agree_everywhere(F, n, shapes):
    for P in all_points(F, n):
        for rows, cols in shapes:
            is_rank_one(F, P, rows, cols, method="both")


def test_segre_points_of_pg33():
    S = build_segre(3, 2, 2)
    on = set(S.points)
    passing = {P for P in all_points(GF3, 4) if is_rank_one(GF3, P, 2, 2)}
    assert len(on) == 16 and passing == on
    assert len(all_points(GF3, 4)) - len(passing) == 24


@given(st.lists(st.integers(0, 8), min_size=3, max_size=3).filter(any),
       st.lists(st.integers(0, 8), min_size=2, max_size=2).filter(any))
def test_outer_products_pass_both_methods(x, y):
    assert is_rank_one(GF9, outer(GF9, x, y), 3, 2, method="both")


def test_rank_one_rejects_zero_and_bad_method():
    with pytest.raises(ValueError):
        is_rank_one(GF3, (0, 0, 0, 0), 2, 2)
    with pytest.raises(ValueError):
        is_rank_one(GF3, (1, 0, 0, 0), 2, 2, method="magic")


# --- classical Segre ----------------------------------------------------------

def test_build_segre_322():
    S = build_segre(3, 2, 2)
    assert len(S.points) == 16
    assert len(S.system_a) == len(S.system_b) == 4
    assert all(E.rank == 2 for E in S.system_a + S.system_b)
    res = S.check()
    assert res["ok"], res


def test_regulus_incidence_table_is_all_ones():
    S = build_segre(3, 2, 2)
    table = [[len(set(points_of(A)) & set(points_of(B))) for B in S.system_b] for A in S.system_a]
    assert table == [[1] * 4] * 4
    assert all(meet(A, B).rank == 1 for A in S.system_a for B in S.system_b)


def test_build_segre_232():
    S = build_segre(2, 3, 2)
    assert len(S.points) == 21
    assert len(S.system_a) == 7 and len(S.system_b) == 3
    assert S.check()["ok"]


def test_membership_predicate_matches_point_list():
    S = build_segre(3, 2, 2)
    pts = set(S.points)
    assert all(S.contains(P) == (P in pts) for P in all_points(GF3, 4))


def test_segre_json():
    data = build_segre(3, 2, 2).to_json()
    assert data["type"] == "segre" and data["schema_version"] == 1
    assert len(data["systemA"]) == len(data["systemB"]) == 4


def test_frame_must_record_arrangement():
    with pytest.raises(ValueError):
        SegreSystem(GF3, 3, 2, 2, None, [], [], [], {})


# --- extension ---------------------------------------------------------------

def test_extend_then_restrict_round_trips():
    ext = extend_segre(build_segre(3, 2, 2), 2)
    assert len(ext.points) == 100
    assert ext.witness["restriction_matches"]
    assert ext.check()["ok"]


def test_extension_is_psi_invariant():
    ext = extend_segre(build_segre(3, 2, 2), 2)
    M = moore_space(3, 2, 2)
    pts = set(ext.points)
    for P in ext.points:
        Y = M.apply_psi(P)
        assert is_rank_one(M.top, Y, 2, 2)
        assert Y in pts


def test_extension_of_232_over_gf4():
    S = build_segre(2, 3, 2)
    ext = extend_segre(S, 2)
    assert len(ext.points) == 21 * 5
    assert ext.witness["restriction_matches"]


# --- reguli through a point ----------------------------------------------------

@pytest.mark.parametrize("q,k,h", [(3, 2, 2), (2, 2, 4), (2, 3, 2)])
def test_member_through_unit_point_is_director(q, k, h):
    M = moore_space(q, k, h)
    Q = (1,) + (0,) * (k * h - 1)
    assert regulus_member_through(M.top, Q, k, h, "B") == M.director(0)
    for i in range(h):
        Qi = M.apply_psi(Q, i)
        assert regulus_member_through(M.top, Qi, k, h, "B") == M.director(i)


def test_member_through_general_rank_one_point():
    M = moore_space(3, 2, 2)
    F = M.top
    y, v = (1, 4), (1, 7)
    Q = outer(F, y, v)
    B = regulus_member_through(F, Q, 2, 2, "B")
    A = regulus_member_through(F, Q, 2, 2, "A")
    assert Q in B and Q in A
    assert B.rank == 2 and A.rank == 2
    assert all(is_rank_one(F, P, 2, 2) for P in points_of(A) + points_of(B))
    assert meet(A, B).basis == (Q,)


def test_support_pattern_member_is_disjoint_from_directors():
    M = moore_space(3, 2, 4)
    F = M.top
    a = F.primitive
    y = (1, 0, a, 0)
    v = (1, F.pow(a, 5))
    Q = normalize(F, outer(F, y, v))
    Phi = regulus_member_through(F, Q, 2, 4, "B")
    for i in range(4):
        assert Phi != M.director(i)
        assert meet(Phi, M.director(i)) is None


def test_member_through_rejects_non_rank_one():
    with pytest.raises(ValueError):
        regulus_member_through(GF3, (1, 0, 0, 1), 2, 2, "A")
    with pytest.raises(ValueError):
        regulus_member_through(GF3, (1, 0, 0, 0), 2, 2, "C")


@pytest.mark.parametrize("q,k,h", [(3, 2, 2), (2, 2, 4), (2, 3, 3)])
def test_directors_lie_on_the_rank_one_locus(q, k, h):
    M = moore_space(q, k, h)
    for i in range(h):
        assert all(is_rank_one(M.top, P, h, k) for P in points_of(M.director(i)))


# --- Segre through a pseudo-arc -------------------------------------------------

def test_canonical_arc_gives_standard_segre():
    A = canonical_pseudo_arc(3, 2, 2)
    S = segre_through_pseudo_arc(A.elements)
    assert set(S.points) == set(build_segre(3, 2, 2).points)
    assert all(E in S.system_a for E in A.elements)
    assert len(S.system_b) == 4
    assert S.witness["transversals_match"]


@pytest.mark.parametrize("q,k,h,seed", [(3, 2, 2, 0), (3, 2, 2, 1), (2, 3, 2, 2), (2, 2, 3, 3)])
def test_arc_under_random_projectivity(q, k, h, seed):
    rng = random.Random(seed)
    A = canonical_pseudo_arc(q, k, h)
    F = A.elements[0].field
    M = random_invertible(F, k * h, rng)
    moved = [image(E, M) for E in A.elements]
    S = segre_through_pseudo_arc(moved)
    assert all(E in S.system_a for E in moved)
    assert S.witness["transversals_match"]
    assert len(S.system_b) == (q**h - 1) // (q - 1)
    assert S.check()["ok"]
    canon = {normalize(F, tuple(sum(P[i] * M[i][j] for i in range(k * h)) % F.order
                                  for j in range(k * h)))
             for P in build_segre(q, k, h).points} if F.degree == 1 else None
    if canon is not None:
        assert set(S.points) == canon


def test_segre_through_arc_rejects_bad_input():
    A = canonical_pseudo_arc(3, 2, 2).elements
    with pytest.raises(ValueError):
        segre_through_pseudo_arc(A[:2])
    with pytest.raises(ValueError):
        segre_through_pseudo_arc(A[:2] + [A[0]])


# --- generalized Segre ----------------------------------------------------------

@pytest.mark.parametrize("q,k,h,r,points,na,nb", [
    (2, 2, 4, 2, 75, 5, 5),
    (3, 2, 4, 2, 400, 10, 10),
    (2, 2, 6, 2, 315, 5, 21),
    (2, 2, 6, 3, 567, 9, 9),
])
def test_generalized_segre(q, k, h, r, points, na, nb):
    G = build_generalized_segre(q, k, h, r)
    res = G.check()
    assert res["ok"], res
    assert (res["points"], res["system_a"], res["system_b"]) == (points, na, nb)
    assert G.witness["chain_agrees_with_scalar_classes"]
    assert induced_spreads_are_scalar_classes(G, moore_space(q, k, h))


def test_generalized_cross_meets_are_lines_for_2242():
    G = build_generalized_segre(2, 2, 4, 2)
    for A in G.system_a:
        for B in G.system_b:
            assert len(set(points_of(A)) & set(points_of(B))) == 3


@pytest.mark.parametrize("q,k,h", [(3, 2, 2), (2, 2, 4), (2, 3, 2)])
def test_r_equal_one_is_classical(q, k, h):
    G = build_generalized_segre(q, k, h, 1)
    M = moore_space(q, k, h)
    assert set(G.points) == set(build_segre(q, k, h).points)
    assert set(G.system_a) == {M.spread_element(v) for v in all_points(M.base, k)}
    assert G.check()["ok"]


def test_scalar_classes_group_points_by_subfield_multiples():
    M = moore_space(2, 2, 4)
    G = build_generalized_segre(2, 2, 4, 2)
    classes = second_system_by_scalar_classes(M, 2, G.points)
    assert sum(len(points_of(B)) for B in classes) == len(G.points)


def test_generalized_rejects_bad_r():
    for r in (0, 3, 4):
        with pytest.raises(ValueError):
            build_generalized_segre(2, 2, 4, r)


# --- quadrics through a subgeometry ----------------------------------------------

@pytest.mark.parametrize("q,k,h", [(3, 3, 2), (2, 4, 2)])
def test_no_quadric_contains_the_subgeometry(q, k, h):
    assert quadric_kernel_dimension(q, k, h) == 0


def test_quadric_kernel_by_exhaustive_forms():
    T = tower_for(2, 2)
    F = T.top
    pts = all_points(T.base, 2)
    vanishing = 0
    for a, b, c in product(range(F.order), repeat=3):
        if all(F.add(F.add(F.mul(a, F.mul(x, x)), F.mul(b, F.mul(x, y))), F.mul(c, F.mul(y, y))) == 0
               for x, y in pts):
            vanishing += 1
    assert vanishing == F.order ** quadric_kernel_dimension(2, 2, 2)

