"""Moore-matrix model of the Desarguesian spread.

Big points live in PG(hk-1, q^h): an ``h x k`` matrix over GF(q^h), flattened
row-major. The collineation psi shifts the rows cyclically down by one and
raises every entry to the q-th power; its fixed points are the Moore matrices
``M_v`` (rows ``v, v^q, ..., v^(q^(h-1))``).

The fixed subgeometry is identified with PG(kh-1, q) through the parameter
``v``: entry ``v_j`` of ``v`` in GF(q^h)^k is expanded in the polynomial basis
``1, x, ..., x^(h-1)`` of GF(q^h)/GF(q), giving a ``k x h`` coordinate matrix
flattened row-major. With the integer encoding these coordinates are just the
base-q digits of ``v_j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .config import check_cap
from .galois import FieldTower, tower_for
from .projspace import (
    Subspace,
    all_points,
    normalize,
    null_space,
    points_of,
    projective_count,
    span,
    subspace_from_json,
    vector_key,
)

SCHEMA_VERSION = 1


@dataclass
class Spread:
    """A set of (h-1)-subspaces of PG(kh-1, q) with provenance metadata."""

    q: int
    k: int
    h: int
    elements: tuple
    provenance: str
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        self.elements = tuple(sorted(self.elements))

    def __len__(self):
        return len(self.elements)

    def __contains__(self, S):
        return S in set(self.elements)

    @property
    def expected_size(self) -> int:
        return (self.q ** (self.k * self.h) - 1) // (self.q**self.h - 1)

    def partition_report(self) -> dict:
        """Exact disjointness and cover accounting over every point."""
        q, n = self.q, self.k * self.h
        total = projective_count(q, n)
        check_cap(q**n, "partition bitset")
        counts = bytearray(q**n)
        bad_dim = [i for i, E in enumerate(self.elements) if E.rank != self.h]
        overlap = None
        for E in self.elements:
            F = E.field
            for P in points_of(E):
                key = vector_key(F, P)
                if counts[key] and overlap is None:
                    overlap = list(P)
                counts[key] = min(counts[key] + 1, 255)
        covered = sum(1 for c in counts if c)
        ok = (
            not bad_dim
            and overlap is None
            and covered == total
            and len(self.elements) == self.expected_size
        )
        return {
            "elements": len(self.elements),
            "expected_elements": self.expected_size,
            "points": total,
            "covered": covered,
            "overlap_witness": overlap,
            "wrong_dimension": bad_dim,
            "ok": ok,
        }

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "spread",
            "q": self.q,
            "k": self.k,
            "h": self.h,
            "provenance": self.provenance,
            "witness": self.witness,
            "elements": [E.to_json() for E in self.elements],
        }

    @classmethod
    def from_json(cls, data) -> Spread:
        q, k, h = int(data["q"]), int(data["k"]), int(data["h"])
        F = tower_for(q, 1).base
        elems = [subspace_from_json(F, e) for e in data["elements"]]
        return cls(q, k, h, tuple(elems), data.get("provenance", "unknown"), data.get("witness", {}))


class RelativeBasis:
    """GF(q^h) as a space over GF(q^s) with basis ``1, x, ..., x^(t-1)``, t = h/s."""

    def __init__(self, tower: FieldTower, s: int):
        self.tower = tower
        self.s = s
        self.t = tower.h // s
        self.sub = tower.subfield(s)
        top = tower.top
        x = tower.q if tower.h > 1 else 1
        self.powers = [top.pow(x, m) for m in range(self.t)]
        if s == 1:
            q, t = tower.q, self.t
            self._coords = None
            self._digits = lambda z: tuple((z // q**m) % q for m in range(t))
        else:
            table = {}
            for ys in product(self.sub.elements, repeat=self.t):
                z = 0
                for y, w in zip(ys, self.powers):
                    z = top.add(z, top.mul(y, w))
                table[z] = ys
            self._coords = table

    def coords(self, z: int) -> tuple:
        if self._coords is None:
            return self._digits(z)
        return self._coords[z]

    def combine(self, ys) -> int:
        top = self.tower.top
        z = 0
        for y, w in zip(ys, self.powers):
            z = top.add(z, top.mul(y, w))
        return z


class MooreSpace:
    """The matrix model for fixed ``(q, k, h)``."""

    def __init__(self, tower: FieldTower, k: int):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.tower = tower
        self.k, self.h, self.q = k, tower.h, tower.q
        self.top = tower.top
        self.base = tower.base
        self.n = k * tower.h
        self._rel: dict[int, RelativeBasis] = {}

    def __repr__(self):
        return f"MooreSpace(q={self.q}, k={self.k}, h={self.h})"

    def relative_basis(self, s: int) -> RelativeBasis:
        rb = self._rel.get(s)
        if rb is None:
            rb = self._rel[s] = RelativeBasis(self.tower, s)
        return rb

    # coordinates

    def param_to_coords(self, v) -> tuple:
        rb = self.relative_basis(1)
        out = []
        for x in v:
            out.extend(rb.coords(x))
        return tuple(out)

    def coords_to_param(self, X) -> tuple:
        h = self.h
        rb = self.relative_basis(1)
        return tuple(rb.combine(X[j * h:(j + 1) * h]) for j in range(self.k))

    def scale(self, alpha: int, v) -> tuple:
        mul = self.top.mul
        return tuple(mul(alpha, x) for x in v)

    # big points

    def moore_matrix(self, v) -> tuple:
        """Flattened ``M_v``; row ``i`` is ``v^(q^i)``."""
        if not any(v):
            raise ValueError("Moore matrix of the zero vector")
        out = []
        for i in range(self.h):
            fr = self.tower.frob_table(i)
            out.extend(fr[x] for x in v)
        return tuple(out)

    def rows(self, X):
        k = self.k
        return [tuple(X[i * k:(i + 1) * k]) for i in range(self.h)]

    def psi_vector(self, X, times: int = 1) -> tuple:
        """Semilinear image of a vector under psi^times (no normalisation)."""
        h, k = self.h, self.k
        t = times % h
        if t == 0:
            return tuple(X)
        fr = self.tower.frob_table(t)
        out = [0] * (h * k)
        for i in range(h):
            src = (i - t) % h
            for j in range(k):
                out[i * k + j] = fr[X[src * k + j]]
        return tuple(out)

    def apply_psi(self, X, times: int = 1) -> tuple:
        """psi^times as a map on projective points."""
        return normalize(self.top, self.psi_vector(X, times))

    def psi_subspace(self, W: Subspace, times: int = 1) -> Subspace:
        return Subspace.from_rows(self.top, W.n, [self.psi_vector(b, times) for b in W.basis])

    def orbit_span(self, P) -> Subspace:
        """X*(P) = <P, P^psi, ..., P^(psi^(h-1))>."""
        return span(self.top, [self.psi_vector(P, i) for i in range(self.h)])

    def director(self, i: int = 0) -> Subspace:
        """Theta^(psi^i): matrices supported on row ``i``."""
        k, n = self.k, self.h * self.k
        i %= self.h
        rows = []
        for j in range(k):
            e = [0] * n
            e[i * k + j] = 1
            rows.append(tuple(e))
        return Subspace.from_rows(self.top, n, rows)

    def director_point(self, v) -> tuple:
        """The point of Theta represented by ``v`` in the first row."""
        return normalize(self.top, tuple(v) + (0,) * (self.k * (self.h - 1)))

    def extension(self, Xi: Subspace) -> Subspace:
        """GF(q^h)-span of the Moore matrices of a GF(q)-subspace."""
        return span(self.top, [self.moore_matrix(self.coords_to_param(b)) for b in Xi.basis])

    # spread elements

    def parameters(self):
        """Normalised parameters v, i.e. the points of PG(k-1, q^h)."""
        return all_points(self.top, self.k)

    def spread_element(self, v) -> Subspace:
        """pi_v = {alpha v : alpha in GF(q^h)} as a subspace of PG(kh-1, q)."""
        if not any(v):
            raise ValueError("zero parameter")
        rb = self.relative_basis(1)
        rows = [self.param_to_coords(self.scale(w, v)) for w in rb.powers]
        return Subspace.from_rows(self.base, self.n, rows)

    def element_parameter(self, E: Subspace) -> tuple:
        """The normalised parameter of a spread element of the Moore spread."""
        return normalize(self.top, self.coords_to_param(E.basis[0]))

    def build_spread(self) -> Spread:
        check_cap(projective_count(self.q**self.h, self.k), "spread elements")
        elems = [self.spread_element(v) for v in self.parameters()]
        return Spread(self.q, self.k, self.h, tuple(elems), "moore",
                      {"field_reduction_basis": "polynomial", "polys": self.tower.polys})

    def restrict_scalars(self, W: Subspace, step: int = 1, check: bool = True) -> Subspace:
        """Scalar restriction of a psi^step-invariant subspace.

        Returns the GF(q^step)-subspace of parameters ``(v_1, ..., v_step)``
        whose matrix (row ``j*step + s`` equal to ``v_(s+1)^(q^(j*step))``) lies
        in ``W``. Coordinates are indexed ``(s, column, m)`` with ``m`` the
        position in the basis ``1, x, ..., x^(t-1)`` over GF(q^step). For
        ``step == 1`` this is the usual PG(kh-1, q) coordinate vector.
        """
        h, k = self.h, self.k
        if step < 1 or h % step:
            raise ValueError(f"step {step} does not divide h={h}")
        if W.n != h * k:
            raise ValueError("subspace is not in the big ambient space")
        if check and self.psi_subspace(W, step) != W:
            raise ValueError(f"subspace is not invariant under psi^{step}")
        t = h // step
        rb = self.relative_basis(step)
        top = self.top
        add, mul = top.add, top.mul
        frob_powers = [[self.tower.frob_table(j * step)[w] for w in rb.powers] for j in range(t)]
        eqs = []
        for a in null_space(top, list(W.basis), h * k):
            coef = [0] * (h * k)
            for s in range(step):
                for j in range(t):
                    row = j * step + s
                    for c in range(k):
                        ac = a[row * k + c]
                        if not ac:
                            continue
                        base_idx = s * k * t + c * t
                        for m in range(t):
                            coef[base_idx + m] = add(coef[base_idx + m], mul(ac, frob_powers[j][m]))
            expanded = [rb.coords(cf) for cf in coef]
            for mp in range(t):
                eqs.append(tuple(e[mp] for e in expanded))
        sub = rb.sub
        sol = null_space(sub, eqs, h * k)
        R = Subspace.from_rows(sub, h * k, sol)
        if R.rank != W.rank:
            raise ArithmeticError(
                f"restriction has rank {R.rank} over {sub.name}, expected {W.rank}")
        return R

    def restrict_scalars_fixed(self, W: Subspace) -> Subspace:
        return self.restrict_scalars(W, 1)

    def spread_from_director(self, Theta: Subspace) -> Spread:
        """L(Theta): the spread with director spaces Theta, Theta^psi, ..."""
        k, h = self.k, self.h
        if Theta.rank != k or Theta.n != h * k:
            raise ValueError(f"director must be a ({k - 1})-subspace of PG({h * k - 1}, q^h)")
        full = span(self.top, [self.psi_subspace(Theta, i) for i in range(h)])
        if full.rank != h * k:
            raise ValueError(
                f"degenerate director: its psi-orbit spans a {full.dim}-dimensional subspace, "
                f"not PG({h * k - 1}, q^h)")
        elems = set()
        for P in points_of(Theta):
            elems.add(self.restrict_scalars(self.orbit_span(P), 1))
        spread = Spread(self.q, k, h, tuple(elems), "director", {"director": Theta.to_json()})
        if len(spread) != spread.expected_size:
            raise ArithmeticError("director construction produced overlapping elements")
        return spread


@lru_cache(maxsize=None)
def moore_space(q: int, k: int, h: int) -> MooreSpace:
    return MooreSpace(tower_for(q, h), k)


def build_spread(q: int, k: int, h: int) -> Spread:
    return moore_space(q, k, h).build_spread()


def spread_from_director(Theta: Subspace, model: MooreSpace) -> Spread:
    return model.spread_from_director(Theta)
