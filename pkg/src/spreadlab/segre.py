"""Segre varieties, reguli and the generalized Segre variety S^r_{kr-1,h-1}(q).

A point of PG(kh-1, F) is read as a matrix through a ``frame`` arrangement:
``"kxh"`` for the GF(q) coordinates of the Moore model (row ``j`` holds the
coordinates of ``v_j``) and ``"hxk"`` for big points over GF(q^h). System A
always holds the (h-1)-dimensional maximal subspaces, system B the
(k-1)-dimensional (or (kr-1)-dimensional) ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .config import check_cap
from .galois import make_tower, tower_for
from .moore import SCHEMA_VERSION, MooreSpace, moore_space
from .projspace import (
    Subspace,
    all_points,
    image,
    lin_comb,
    meet,
    normalize,
    points_of,
    rank,
    solve,
    span,
)
from .singer import is_pseudo_arc

ARRANGEMENTS = ("kxh", "hxk")


def _shape(k, h, arrangement):
    if arrangement not in ARRANGEMENTS:
        raise ValueError(f"unknown arrangement {arrangement!r}")
    return (k, h) if arrangement == "kxh" else (h, k)


def as_matrix(X, rows: int, cols: int):
    if len(X) != rows * cols:
        raise ValueError(f"vector of length {len(X)} is not a {rows}x{cols} matrix")
    return [X[i * cols:(i + 1) * cols] for i in range(rows)]


def minors_vanish(F, X, rows: int, cols: int) -> bool:
    A = as_matrix(X, rows, cols)
    mul, sub = F.mul, F.sub
    for i, i2 in combinations(range(rows), 2):
        ri, ri2 = A[i], A[i2]
        for j, j2 in combinations(range(cols), 2):
            if sub(mul(ri[j], ri2[j2]), mul(ri[j2], ri2[j])):
                return False
    return True


def is_rank_one(F, X, rows: int, cols: int, method: str = "minors") -> bool:
    """Rank-1 test of a nonzero point read as a ``rows x cols`` matrix.

    ``method`` is ``"minors"`` (all 2x2 minors vanish), ``"rref"`` (row
    reduction) or ``"both"``, which raises if the two disagree.
    """
    if not any(X):
        raise ValueError("zero vector")
    if method == "minors":
        return minors_vanish(F, X, rows, cols)
    if method == "rref":
        return rank(F, as_matrix(X, rows, cols)) == 1
    if method == "both":
        a = minors_vanish(F, X, rows, cols)
        b = rank(F, as_matrix(X, rows, cols)) == 1
        if a != b:
            raise AssertionError(f"minor test and rank test disagree on {X}")
        return a
    raise ValueError(f"unknown method {method!r}")


def outer(F, x, y) -> tuple:
    mul = F.mul
    return tuple(mul(a, b) for a in x for b in y)


def _unit(n, i):
    e = [0] * n
    e[i] = 1
    return tuple(e)


def member_through(F, Q, rows: int, cols: int, vary: str) -> Subspace:
    """Maximal subspace of the rank-1 locus through ``Q``.

    ``vary="rows"`` fixes the row vector of ``Q = y (x) v`` and lets the column
    vector run, giving ``{z (x) v}``; ``vary="cols"`` gives ``{y (x) w}``.
    """
    if not is_rank_one(F, Q, rows, cols):
        raise ValueError("point is not on the Segre variety")
    A = as_matrix(Q, rows, cols)
    if vary == "rows":
        v = normalize(F, next(r for r in A if any(r)))
        gens = [outer(F, _unit(rows, i), v) for i in range(rows)]
    elif vary == "cols":
        c = next(j for j in range(cols) if any(r[j] for r in A))
        y = normalize(F, [r[c] for r in A])
        gens = [outer(F, y, _unit(cols, j)) for j in range(cols)]
    else:
        raise ValueError(f"vary must be 'rows' or 'cols', not {vary!r}")
    return Subspace.from_rows(F, rows * cols, gens)


def regulus_member_through(F, Q, k: int, h: int, system: str, arrangement: str = "hxk") -> Subspace:
    """The member of system ``"A"`` ((h-1)-dim) or ``"B"`` ((k-1)-dim) through ``Q``."""
    rows, cols = _shape(k, h, arrangement)
    h_side = "rows" if arrangement == "hxk" else "cols"
    k_side = "cols" if arrangement == "hxk" else "rows"
    if system == "A":
        return member_through(F, Q, rows, cols, h_side)
    if system == "B":
        return member_through(F, Q, rows, cols, k_side)
    raise ValueError("system must be 'A' or 'B'")


@dataclass
class SegreSystem:
    """A Segre or generalized Segre variety with its two systems."""

    field: object
    q: int
    k: int
    h: int
    r: int | None
    points: list | None
    system_a: list
    system_b: list
    frame: dict
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.frame.get("arrangement") not in ARRANGEMENTS:
            raise ValueError("frame must record the matrix arrangement")
        self.system_a = sorted(self.system_a)
        self.system_b = sorted(self.system_b)

    @property
    def arrangement(self) -> str:
        return self.frame["arrangement"]

    def contains(self, P) -> bool:
        """Membership predicate; does not need the materialised point list."""
        return any(P in E for E in self.system_a)

    def expected_counts(self) -> dict:
        q, k, h = self.q, self.k, self.h
        if self.r is None:
            return {
                "points": (q**k - 1) * (q**h - 1) // (q - 1) ** 2,
                "system_a": (q**k - 1) // (q - 1),
                "system_b": (q**h - 1) // (q - 1),
                "cross_rank": 1,
            }
        r = self.r
        return {
            "points": (q**h - 1) * (q ** (k * r) - 1) // ((q - 1) * (q**r - 1)),
            "system_a": (q ** (k * r) - 1) // (q**r - 1),
            "system_b": (q**h - 1) // (q**r - 1),
            "cross_rank": r,
        }

    def check(self) -> dict:
        """Verify counts, disjointness, cover and cross-incidence exhaustively."""
        exp = self.expected_counts()
        pts_a = [set(points_of(E)) for E in self.system_a]
        pts_b = [set(points_of(E)) for E in self.system_b]
        union_a = set().union(*pts_a)
        union_b = set().union(*pts_b)
        disjoint_a = sum(len(s) for s in pts_a) == len(union_a)
        disjoint_b = sum(len(s) for s in pts_b) == len(union_b)
        cross_bad = []
        induced_ok = True
        for i, A in enumerate(self.system_a):
            pieces = []
            for j, B in enumerate(self.system_b):
                M = meet(A, B)
                if M is None or M.rank != exp["cross_rank"]:
                    cross_bad.append([i, j, 0 if M is None else M.rank])
                else:
                    pieces.append(pts_a[i] & pts_b[j])
            if sum(len(p) for p in pieces) != len(pts_a[i]):
                induced_ok = False
        for j in range(len(self.system_b)):
            covered = sum(len(pts_a[i] & pts_b[j]) for i in range(len(self.system_a)))
            if covered != len(pts_b[j]):
                induced_ok = False
        point_set = set(self.points) if self.points is not None else union_a
        result = {
            "points": len(point_set),
            "system_a": len(self.system_a),
            "system_b": len(self.system_b),
            "expected": exp,
            "disjoint_a": disjoint_a,
            "disjoint_b": disjoint_b,
            "same_point_set": union_a == union_b == point_set,
            "cross_failures": cross_bad,
            "induced_partitions": induced_ok,
        }
        result["ok"] = (
            result["points"] == exp["points"]
            and result["system_a"] == exp["system_a"]
            and result["system_b"] == exp["system_b"]
            and disjoint_a and disjoint_b and result["same_point_set"]
            and not cross_bad and induced_ok
        )
        return result

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "segre",
            "q": self.q,
            "k": self.k,
            "h": self.h,
            "r": self.r,
            "level": self.field.name,
            "frame": {key: val for key, val in self.frame.items() if key != "transform"}
            | ({"transform": [list(row) for row in self.frame["transform"]]}
               if self.frame.get("transform") is not None else {}),
            "points": [list(P) for P in self.points] if self.points is not None else None,
            "systemA": [E.to_json() for E in self.system_a],
            "systemB": [E.to_json() for E in self.system_b],
            "witness": self.witness,
        }


def segre_over(F, k: int, h: int, q: int | None = None, materialize: bool = True) -> SegreSystem:
    """The classical Segre variety S_{k-1,h-1}(F) in ``kxh`` arrangement."""
    xs = all_points(F, k)
    ys = all_points(F, h)
    points = None
    if materialize:
        check_cap(len(xs) * len(ys), "Segre points")
        points = sorted(outer(F, x, y) for x in xs for y in ys)
    sys_a = [Subspace.from_rows(F, k * h, [outer(F, x, _unit(h, j)) for j in range(h)]) for x in xs]
    sys_b = [Subspace.from_rows(F, k * h, [outer(F, _unit(k, i), y) for i in range(k)]) for y in ys]
    return SegreSystem(F, q if q is not None else F.order, k, h, None, points, sys_a, sys_b,
                       {"arrangement": "kxh", "transform": None})


def build_segre(q: int, k: int, h: int) -> SegreSystem:
    """S_{k-1,h-1}(q) inside PG(kh-1, q)."""
    F = tower_for(q, 1).base
    return segre_over(F, k, h)


def extend_segre(S: SegreSystem, s: int) -> SegreSystem:
    """The rank-1 locus over GF(q^s) cut out by the same quadrics."""
    if S.r is not None or S.frame.get("transform") is not None:
        raise ValueError("only the classical Segre variety in canonical frame can be extended")
    T = make_tower(S.field.p, S.field.degree, s)
    ext = segre_over(T.top, S.k, S.h)
    q = S.field.order
    restricted = [P for P in ext.points if all(x < q for x in P)]
    ext.witness["restriction_matches"] = S.points is None or restricted == sorted(S.points)
    ext.witness["extension_degree"] = s
    return ext


def decompose(F, arc_k, P):
    """Components ``P_i`` of ``P`` in the direct sum of the first ``k`` arc elements."""
    columns = [r for E in arc_k for r in E.basis]
    coeffs = solve(F, columns, P)
    if coeffs is None:
        raise ValueError("point is outside the span of the arc elements")
    parts, pos = [], 0
    n = len(P)
    for E in arc_k:
        c = coeffs[pos:pos + E.rank]
        pos += E.rank
        parts.append(lin_comb(F, c, E.basis, n))
    return parts


def transversals(F, arc) -> list:
    """The (k-1)-subspaces through each point of the last arc element that meet
    each of the first ``k`` elements (one point each)."""
    *first, last = arc
    out = set()
    for P in points_of(last):
        parts = decompose(F, first, P)
        if not all(any(x) for x in parts):
            raise ValueError("arc is degenerate: a component vanished")
        out.add(span(F, parts))
    return sorted(out)


def segre_through_pseudo_arc(arc) -> SegreSystem:
    """The unique Segre variety whose (h-1)-regulus contains a (k+1)-pseudo-arc."""
    if not arc:
        raise ValueError("empty pseudo-arc")
    F = arc[0].field
    h = arc[0].rank
    n = arc[0].n
    k = n // h
    if len(arc) != k + 1:
        raise ValueError(f"need a pseudo-arc of size {k + 1}, got {len(arc)}")
    ok, bad = is_pseudo_arc(list(arc), k)
    if not ok:
        raise ValueError(f"not a pseudo-arc: elements {bad} do not span")
    bases = [list(E.basis) for E in arc[:k]]
    stacked = [r for B in bases for r in B]
    new_rows = []
    # Rebase block i by the i-th block of the last element so that it becomes (I ... I).
    coeff_rows = [solve(F, stacked, c) for c in arc[k].basis]
    for i in range(k):
        Ci = [row[i * h:(i + 1) * h] for row in coeff_rows]
        new_rows.extend(lin_comb(F, c, bases[i], n) for c in Ci)
    T = new_rows
    canon = segre_over(F, k, h)
    sys_a = [image(E, T) for E in canon.system_a]
    sys_b = [image(E, T) for E in canon.system_b]
    pts = sorted(normalize(F, lin_comb(F, P, T, n)) for P in canon.points)
    S = SegreSystem(F, F.order, k, h, None, pts, sys_a, sys_b, {"arrangement": "kxh", "transform": T})
    set_a = set(sys_a)
    if not all(E in set_a for E in arc):
        raise ArithmeticError("frame normalisation lost an arc element")
    S.witness["transversals_match"] = set(transversals(F, list(arc))) == set(sys_b)
    return S


# --- generalized Segre variety ---------------------------------------------


def reduce_field(model: MooreSpace, G: Subspace, r: int) -> Subspace:
    """Field reduction of a GF(q^r)-subspace of Theta_r to PG(kh-1, q).

    ``G`` uses the coordinates of ``restrict_scalars(step=r)``; only the block
    of the first parameter ``v_1`` may be nonzero.
    """
    k, h = model.k, model.h
    t = h // r
    rb = model.relative_basis(r)
    sub = model.tower.subfield(r)
    rows = []
    for b in G.basis:
        if any(b[k * t:]):
            raise ValueError("subspace is not contained in Theta_r")
        w = tuple(rb.combine(b[c * t:(c + 1) * t]) for c in range(k))
        for lam in sub.elements:
            if lam:
                rows.append(model.param_to_coords(model.scale(lam, w)))
    return Subspace.from_rows(model.base, model.n, rows)


def second_system_via_chain(model: MooreSpace, r: int, witness: dict | None = None) -> list:
    """R^r_{kr,q} through Pi_r and Theta_r.

    Theta_r is the psi^r-fixed part of the span of Theta, Theta^(psi^r), ...;
    inside it the elements of R^r_{h,q} cut the (t-1)-regulus of a Segre
    variety over GF(q^r), whose other regulus is obtained by transversals and
    then reduced to GF(q).
    """
    k, h = model.k, model.h
    t = h // r
    sub = model.tower.subfield(r)
    W = span(model.top, [model.director(j * r) for j in range(t)])
    theta_r = model.restrict_scalars(W, r)

    def trace(v):
        X = meet(model.orbit_span(model.director_point(v)), W)
        G = model.restrict_scalars(X, r)
        if not theta_r.contains_subspace(G):
            raise ArithmeticError("trace of a spread element leaves Theta_r")
        return G

    units = [_unit(k, i) for i in range(k)]
    arc = [trace(e) for e in units] + [trace((1,) * k)]
    members = transversals(sub, arc)
    if witness is not None:
        witness["theta_r_rank"] = theta_r.rank
        witness["regulus_t_size"] = len(all_points(sub, k))
        witness["transversals"] = len(members)
    return [reduce_field(model, G, r) for G in members]


def second_system_by_scalar_classes(model: MooreSpace, r: int, points) -> list:
    """R^r_{kr,q} by grouping points by the GF(q^r)*-class of their leading entry."""
    top = model.top
    m = (top.order - 1) // (model.q**r - 1)
    groups: dict[int, list] = {}
    for P in points:
        v = model.coords_to_param(P)
        lead = next(x for x in v if x)
        groups.setdefault(top.log(lead) % m, []).append(P)
    return sorted(Subspace.from_rows(model.base, model.n, g) for g in groups.values())


def build_generalized_segre(q: int, k: int, h: int, r: int) -> SegreSystem:
    """S^r_{kr-1,h-1}(q) with systems R^r_{h,q} (A) and R^r_{kr,q} (B)."""
    if r < 1 or r >= h or h % r:
        raise ValueError(f"r={r} must be a proper divisor of h={h}")
    model = moore_space(q, k, h)
    sub = model.tower.subfield(r)
    sys_a = [model.spread_element(v) for v in all_points(sub, k)]
    pts = sorted(set().union(*(points_of(E) for E in sys_a)))
    witness: dict = {}
    sys_b = second_system_via_chain(model, r, witness)
    direct = second_system_by_scalar_classes(model, r, pts)
    witness["chain_agrees_with_scalar_classes"] = sorted(sys_b) == direct
    return SegreSystem(model.base, q, k, h, r, pts, sys_a, sys_b,
                       {"arrangement": "kxh", "transform": None}, witness)


def induced_spreads_are_scalar_classes(S: SegreSystem, model: MooreSpace) -> bool:
    """Each cross-intersection is a GF(q^r)-scalar class {lambda w}, so the
    induced partitions are Desarguesian (r-1)-spreads."""
    sub = model.tower.subfield(S.r or 1)
    for A in S.system_a:
        for B in S.system_b:
            M = meet(A, B)
            w = model.coords_to_param(M.basis[0])
            cls = Subspace.from_rows(
                model.base, model.n,
                [model.param_to_coords(model.scale(lam, w)) for lam in sub.elements if lam])
            if cls != M:
                return False
    return True


def quadric_kernel_dimension(q: int, k: int, h: int) -> int:
    """Dimension of the space of quadratic forms over GF(q^h) vanishing on
    every point of the canonical PG(k-1, q)."""
    T = tower_for(q, h)
    F = T.top
    monomials = [(i, j) for i in range(k) for j in range(i, k)]
    rows = []
    for x in all_points(T.base, k):
        rows.append(tuple(F.mul(x[i], x[j]) for i, j in monomials))
    return len(monomials) - rank(F, rows)
