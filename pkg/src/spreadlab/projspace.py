"""Projective points, canonical (RREF) subspaces and incidence over any field level.

Vectors are tuples of element encodings. A field argument ``F`` is anything
exposing ``add/sub/mul/inv/neg``, ``order``, ``elements`` and ``name``:
a :class:`~spreadlab.galois.Field` or a :class:`~spreadlab.galois.Subfield`.
"""

from __future__ import annotations

from itertools import combinations, product

from .config import check_cap

Vector = tuple


def normalize(F, v) -> Vector:
    """Scale ``v`` so that its first nonzero coordinate is 1."""
    for x in v:
        if x:
            if x == 1:
                return tuple(v)
            c = F.inv(x)
            mul = F.mul
            return tuple(mul(c, y) for y in v)
    raise ValueError("the zero vector is not a projective point")


normalize_point = normalize


def rref(F, rows):
    """Reduced row-echelon form. Returns ``(rows, pivots)`` without zero rows."""
    add, mul, inv, neg = F.add, F.mul, F.inv, F.neg
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(M)):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        row = M[r]
        if row[c] != 1:
            s = inv(row[c])
            row = [mul(s, x) for x in row]
            M[r] = row
        for i in range(len(M)):
            if i != r:
                f = M[i][c]
                if f:
                    nf = neg(f)
                    other = M[i]
                    M[i] = [add(a, mul(nf, b)) if b else a for a, b in zip(other, row)]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return [tuple(x) for x in M[:r]], pivots


def rank(F, rows) -> int:
    return len(rref(F, rows)[1])


def null_space(F, rows, n: int):
    """Basis of ``{x : row . x == 0 for every row}`` in ``F^n``."""
    R, pivots = rref(F, rows) if rows else ([], [])
    free = [c for c in range(n) if c not in pivots]
    neg = F.neg
    basis = []
    for f in free:
        x = [0] * n
        x[f] = 1
        for row, pc in zip(R, pivots):
            if row[f]:
                x[pc] = neg(row[f])
        basis.append(tuple(x))
    return basis


def solve(F, columns, target):
    """Coefficients ``c`` with ``sum(c[i] * columns[i]) == target`` or ``None``.

    ``columns`` is a list of vectors assumed linearly independent.
    """
    m = len(columns)
    n = len(target)
    aug = [[columns[j][i] for j in range(m)] + [target[i]] for i in range(n)]
    R, pivots = rref(F, aug)
    if m in pivots:
        return None
    coeffs = [0] * m
    for row, pc in zip(R, pivots):
        coeffs[pc] = row[m]
    return tuple(coeffs)


def lin_comb(F, coeffs, vectors, n: int) -> Vector:
    add, mul = F.add, F.mul
    out = [0] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for i, x in enumerate(v):
                if x:
                    out[i] = add(out[i], mul(c, x))
    return tuple(out)


def mat_vec(F, v, M) -> Vector:
    """Row vector times matrix."""
    return lin_comb(F, v, M, len(M[0]))


def mat_mul(F, A, B):
    return [mat_vec(F, row, B) for row in A]


def mat_inverse(F, M):
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [tuple(row[n:]) for row in R]


def projective_count(order: int, rank_: int) -> int:
    return (order**rank_ - 1) // (order - 1)


def _normalized_coefficient_vectors(F, d: int):
    """All nonzero vectors of F^d with first nonzero entry 1, lexicographically."""
    elems = list(F.elements)
    for lead in reversed(range(d)):
        for tail in product(elems, repeat=d - lead - 1):
            yield (0,) * lead + (1,) + tail


def iter_points(F, n: int):
    """Lazy, uncapped version of :func:`all_points` for searches that stop early."""
    return _normalized_coefficient_vectors(F, n)


def all_points(F, n: int):
    """Points of PG(n-1, F) in lexicographic order of encodings."""
    check_cap(projective_count(F.order, n), f"PG({n - 1}, {F.order}) points")
    return list(_normalized_coefficient_vectors(F, n))


class Subspace:
    """A projective subspace stored as its RREF basis."""

    __slots__ = ("field", "n", "basis", "pivots")

    def __init__(self, field, n: int, basis, pivots=None):
        self.field = field
        self.n = n
        self.basis = tuple(tuple(r) for r in basis)
        if pivots is None:
            pivots = [next(i for i, x in enumerate(r) if x) for r in self.basis]
        self.pivots = tuple(pivots)

    @classmethod
    def from_rows(cls, F, n: int, rows):
        rows = [tuple(r) for r in rows]
        for r in rows:
            if len(r) != n:
                raise ValueError(f"vector of length {len(r)} in ambient dimension {n}")
        R, pivots = rref(F, rows)
        return cls(F, n, R, pivots)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        """Projective dimension."""
        return len(self.basis) - 1

    @property
    def level(self) -> str:
        return self.field.name

    def _key(self):
        return (self.field.name, self.n, self.basis)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        return self.basis < other.basis

    def __repr__(self):
        return f"Subspace({self.level}, n={self.n}, rank={self.rank})"

    def __contains__(self, v) -> bool:
        """Membership of a vector (reduction against the RREF basis)."""
        add, mul, neg = self.field.add, self.field.mul, self.field.neg
        w = list(v)
        for row, pc in zip(self.basis, self.pivots):
            f = w[pc]
            if f:
                nf = neg(f)
                w = [add(a, mul(nf, b)) if b else a for a, b in zip(w, row)]
        return not any(w)

    def contains_subspace(self, other: Subspace) -> bool:
        return all(r in self for r in other.basis)

    def points(self):
        return points_of(self)

    def to_json(self) -> dict:
        return {"level": self.level, "n": self.n, "basis": [list(r) for r in self.basis]}


def subspace_from_json(F, data) -> Subspace:
    if data.get("level") not in (None, F.name):
        raise ValueError(f"subspace level {data.get('level')} does not match {F.name}")
    return Subspace.from_rows(F, int(data["n"]), [tuple(r) for r in data["basis"]])


def span(F, items, n: int | None = None) -> Subspace:
    """Span of points, vectors and subspaces."""
    rows = []
    for it in items:
        if isinstance(it, Subspace):
            rows.extend(it.basis)
            length = it.n
        else:
            rows.append(tuple(it))
            length = len(it)
        if n is None:
            n = length
        elif length != n:
            raise ValueError(f"mixed ambient dimensions {n} and {length}")
    if n is None:
        raise ValueError("span of nothing")
    return Subspace.from_rows(F, n, rows)


def meet(A: Subspace, B: Subspace) -> Subspace | None:
    """Intersection of two subspaces, ``None`` when it is empty."""
    if A.n != B.n:
        raise ValueError("subspaces live in different ambient spaces")
    F = A.field
    eqs = null_space(F, list(A.basis), A.n) + null_space(F, list(B.basis), B.n)
    rows = null_space(F, eqs, A.n)
    if not rows:
        return None
    return Subspace.from_rows(F, A.n, rows)


def points_of(S: Subspace):
    """Normalised points of ``S`` in lexicographic order."""
    F = S.field
    check_cap(projective_count(F.order, S.rank), "subspace points")
    n = S.n
    pts = [lin_comb(F, c, S.basis, n) for c in _normalized_coefficient_vectors(F, S.rank)]
    pts.sort()
    return pts


def in_general_position(F, points) -> bool:
    """``k+1`` points of PG(k-1, F) with no ``k`` of them in a hyperplane."""
    k = len(points[0])
    if len(points) != k + 1:
        raise ValueError(f"need {k + 1} points in PG({k - 1}), got {len(points)}")
    return all(rank(F, list(sub)) == k for sub in combinations(points, k))


def all_subspaces(F, n: int, rank_: int):
    """Every subspace of the given vector rank in F^n, as RREF bases."""
    q = F.order
    count = 1
    for i in range(rank_):
        count = count * (q ** (n - i) - 1) // (q ** (i + 1) - 1)
    check_cap(count, "subspace enumeration")
    elems = list(F.elements)
    out = []
    for pivots in combinations(range(n), rank_):
        free_slots = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for values in product(elems, repeat=len(free_slots)):
            rows = [[0] * n for _ in range(rank_)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), x in zip(free_slots, values):
                rows[i][c] = x
            out.append(Subspace(F, n, rows, pivots))
    return out


def image(S: Subspace, M) -> Subspace:
    """Image of ``S`` under the linear map ``v -> v M``."""
    F = S.field
    return Subspace.from_rows(F, len(M[0]), [mat_vec(F, r, M) for r in S.basis])


def vector_key(F, v) -> int:
    """Integer index of a vector, base ``|F|``; used for bitset accounting."""
    q = F.parent.order if hasattr(F, "parent") else F.order
    key = 0
    for x in v:
        key = key * q + x
    return key
