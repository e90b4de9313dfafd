"""Singer cycles of PG(kh-1, q), their orbit spreads and pseudo-arcs.

GF(q^{kh}) is built as a single extension of GF(q); a vector of PG(kh-1, q)
is the list of base-q digits of an element, i.e. its coordinates in the basis
``1, x, ..., x^(kh-1)``. Multiplication by the primitive element ``g`` is the
linear map ``v -> v M`` with row ``l`` of ``M`` the coordinates of ``g x^l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .config import check_cap
from .galois import make_tower, prime_power
from .moore import Spread, moore_space
from .projspace import Subspace, all_subspaces, image, mat_inverse, mat_mul, normalize, rank


def normalizer_order(q: int, k: int, h: int) -> int:
    """Order kh (q^{kh}-1)/(q-1) of the normalizer of a Singer group (documentation constant)."""
    return k * h * (q ** (k * h) - 1) // (q - 1)


def gl_order(h: int, q: int) -> int:
    out = 1
    for i in range(h):
        out *= q**h - q**i
    return out


class SingerAction:
    """The cyclic group generated by multiplication by a primitive element."""

    def __init__(self, q: int, k: int, h: int):
        p, e = prime_power(q)
        self.q, self.k, self.h = q, k, h
        self.n = k * h
        check_cap(q**self.n, "Singer field")
        self.tower = make_tower(p, e, self.n)
        self.field = self.tower.top
        self.base = self.tower.base
        self.generator = self.field.primitive
        self.matrix = self.power_matrix(1)

    def coords(self, z: int) -> tuple:
        q = self.q
        return tuple((z // q**l) % q for l in range(self.n))

    def element(self, v) -> int:
        q = self.q
        return sum(c * q**l for l, c in enumerate(v))

    def power_matrix(self, e: int):
        """Matrix of multiplication by ``g^e``."""
        F = self.field
        ge = F.pow(self.generator, e)
        return [self.coords(F.mul(ge, F.pow(self.q, l) if self.n > 1 else 1)) for l in range(self.n)]

    @property
    def group_order(self) -> int:
        return self.field.order - 1

    @property
    def projective_order(self) -> int:
        return (self.q**self.n - 1) // (self.q - 1)

    def subgroup_exponent(self, order: int) -> int:
        """Exponent ``e`` such that ``g^e`` generates the subgroup of the given order."""
        if self.group_order % order:
            raise ValueError(f"{order} does not divide {self.group_order}")
        return self.group_order // order

    def point_orbit_length(self, v=None) -> int:
        """Length of the orbit of a projective point under the full cycle."""
        if v is None:
            v = (1,) + (0,) * (self.n - 1)
        F = self.base
        start = normalize(F, v)
        z0 = self.element(start)
        z = z0
        mul, g = self.field.mul, self.generator
        length = 0
        while True:
            z = mul(z, g)
            length += 1
            if normalize(F, self.coords(z)) == start:
                return length


def build_singer_spread(q: int, k: int, h: int, action: SingerAction | None = None) -> Spread:
    """Orbits of the order-(q^h - 1) subgroup of the Singer cycle, plus zero."""
    S = action or SingerAction(q, k, h)
    F = S.field
    N = (F.order - 1) // (q**h - 1)
    m = q**h - 1
    elems = []
    for i in range(N):
        orbit = [S.coords(F.exp(i + j * N)) for j in range(m)]
        E = Subspace.from_rows(S.base, S.n, orbit)
        if E.rank != h or len(set(orbit)) != m:
            raise ArithmeticError(f"orbit {i} is not an {h}-dimensional subspace")
        elems.append(E)
    # the quotient cycle acts regularly on the orbits: one cycle of length N
    index = {E: i for i, E in enumerate(elems)}
    cycle, cur = 0, elems[0]
    while True:
        cur = image(cur, S.matrix)
        cycle += 1
        if cur not in index:
            raise ArithmeticError("the Singer cycle does not preserve the orbit partition")
        if cur == elems[0]:
            break
    spread = Spread(q, k, h, tuple(elems), "singer",
                    {"generator": S.generator, "poly": list(S.tower.rel_poly),
                     "subgroup_order": m, "quotient_cycle_length": cycle})
    if cycle != N:
        raise ArithmeticError(f"quotient cycle has length {cycle}, expected {N}")
    return spread


def fixes_elementwise(matrices, elements) -> bool:
    """Whether every matrix stabilises every element setwise.

    ``matrices`` is one matrix or a list of generators; ``elements`` is a
    Spread, a PseudoArc or any iterable of subspaces.
    """
    if matrices and not isinstance(matrices[0][0], (list, tuple)):
        matrices = [matrices]
    elems = getattr(elements, "elements", elements)
    return all(image(E, M) == E for M in matrices for E in elems)


def alignment_to_moore(action: SingerAction):
    """Base-change matrix from Singer coordinates to Moore coordinates.

    The subfield GF(q^h) of GF(q^{kh}) is identified with the Moore field by
    sending its generator to a root of the same minimal polynomial; then
    ``1, g, ..., g^(k-1)`` is a basis of GF(q^{kh}) over that subfield. The
    returned ``T`` maps ``v -> v T``.
    """
    q, k, h = action.q, action.k, action.h
    L = action.field
    model = moore_space(q, k, h)
    rel = model.tower.rel_poly
    N = (L.order - 1) // (q**h - 1)
    sub = [0] + [L.exp(j * N) for j in range(q**h - 1)]

    def evaluate(poly, y):
        acc = 0
        for c in reversed(poly):
            acc = L.add(L.mul(acc, y), c)
        return acc

    y = next(z for z in sub if evaluate(rel, z) == 0) if h > 1 else 1
    g = action.generator
    rows = []
    for j in range(k):
        gj = L.pow(g, j)
        for m in range(h):
            rows.append(action.coords(L.mul(L.pow(y, m), gj)))
    return mat_inverse(action.base, rows), y


def singer_to_moore(q: int, k: int, h: int) -> dict:
    """Build both spreads and exhibit the projectivity between them."""
    S = SingerAction(q, k, h)
    singer = build_singer_spread(q, k, h, S)
    moore = moore_space(q, k, h).build_spread()
    T, y = alignment_to_moore(S)
    mapped = sorted(image(E, T) for E in singer.elements)
    return {
        "action": S,
        "singer": singer,
        "moore": moore,
        "matrix": T,
        "subfield_root": y,
        "maps_onto": mapped == list(moore.elements),
    }


def conjugated_subgroup_generator(action: SingerAction, T, order: int):
    """Generator of the order-``order`` subgroup transported by ``T``."""
    F = action.base
    M = action.power_matrix(action.subgroup_exponent(order))
    return mat_mul(F, mat_mul(F, mat_inverse(F, T), M), T)


# --- pseudo-arcs -------------------------------------------------------------


def thas_bound(q: int, k: int, h: int) -> int:
    """Largest possible pseudo-arc: q^h + k if q is even, q^h + k - 1 if q is odd."""
    return q**h + k if q % 2 == 0 else q**h + k - 1


def is_pseudo_arc(elements, k: int | None = None):
    """``(True, None)`` if every k of the elements span the ambient space,
    else ``(False, offending_indices)``."""
    elements = list(getattr(elements, "elements", elements))
    if not elements:
        return True, None
    n = elements[0].n
    d = elements[0].rank
    if any(E.rank != d or E.n != n for E in elements):
        raise ValueError("pseudo-arc elements must share dimension and ambient space")
    if k is None:
        k = n // d
    if k * d != n:
        raise ValueError(f"element rank {d} does not divide ambient rank {n}")
    F = elements[0].field
    for sub in combinations(range(len(elements)), k):
        rows = [r for i in sub for r in elements[i].basis]
        if rank(F, rows) != n:
            return False, list(sub)
    return True, None


@dataclass
class PseudoArc:
    q: int
    k: int
    h: int
    elements: list = field(default_factory=list)

    def __post_init__(self):
        for E in self.elements:
            if E.rank != self.h or E.n != self.k * self.h:
                raise ValueError(f"pseudo-arc element of rank {E.rank} in ambient {E.n}")
        bound = thas_bound(self.q, self.k, self.h)
        if len(self.elements) > bound:
            raise ValueError(
                f"{len(self.elements)} elements exceed the Thas bound {bound} "
                "(q^h + k if q is even, q^h + k - 1 if q is odd)")

    def __len__(self):
        return len(self.elements)

    def check(self):
        return is_pseudo_arc(self.elements, self.k)


def canonical_blocks(q: int, k: int, h: int):
    F = make_tower(*prime_power(q), 1).base
    n = k * h
    blocks = []
    for i in range(k):
        rows = [tuple(int(c == i * h + a) for c in range(n)) for a in range(h)]
        blocks.append(Subspace(F, n, rows, [i * h + a for a in range(h)]))
    return blocks


def canonical_pseudo_arc(q: int, k: int, h: int) -> PseudoArc:
    """Row blocks Sigma_1..Sigma_k and the diagonal Sigma_{k+1} = rows of (I ... I)."""
    blocks = canonical_blocks(q, k, h)
    F = blocks[0].field
    n = k * h
    diag = Subspace.from_rows(F, n, [tuple(int(c % h == a) for c in range(n)) for a in range(h)])
    return PseudoArc(q, k, h, blocks + [diag])


def completions(q: int, k: int, h: int):
    """All (h-1)-subspaces completing the k canonical blocks to a pseudo-arc."""
    blocks = canonical_blocks(q, k, h)
    F = blocks[0].field
    return [S for S in all_subspaces(F, k * h, h) if is_pseudo_arc(blocks + [S], k)[0]]


def completion_count(q: int, k: int, h: int) -> int:
    return len(completions(q, k, h))
