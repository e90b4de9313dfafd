"""Exact arithmetic in small finite fields and towers GF(p) < GF(q) < GF(q^h).

Elements are plain ints. An element of an extension level is encoded as
``sum(c[i] * B**i)`` where ``c`` is its little-endian coefficient vector over
the level below and ``B`` is the size of that level. Because the encodings
nest, the encoding of an element of GF(q^h) is also its base-p digit vector,
so addition is digitwise mod p at every level.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .config import check_cap
from .conway import CONWAY

# full add tables are only built for odd characteristic below this order
_ADD_TABLE_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_power(q: int) -> tuple[int, int]:
    """Split a prime power ``q`` into ``(p, e)``."""
    f = factorize(q)
    if len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    ((p, e),) = f.items()
    return p, e


# ---------------------------------------------------------------------------
# polynomials over a field F, little-endian lists of element encodings


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_sub(F, a, b):
    n = max(len(a), len(b))
    out = [F.sub(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def poly_mul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def poly_divmod(F, a, b):
    a = list(a)
    _trim(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = F.inv(b[-1])
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = F.mul(a[-1], lead_inv)
        shift = len(a) - len(b)
        quot[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, y))
        a.pop()
        _trim(a)
    return _trim(quot), a


def poly_mod(F, a, f):
    return poly_divmod(F, a, f)[1]


def poly_mulmod(F, a, b, f):
    return poly_mod(F, poly_mul(F, a, b), f)


def poly_powmod(F, a, n, f):
    result = [1]
    base = poly_mod(F, a, f)
    while n:
        if n & 1:
            result = poly_mulmod(F, result, base, f)
        base = poly_mulmod(F, base, base, f)
        n >>= 1
    return result


def poly_monic(F, a):
    if not a:
        return a
    c = F.inv(a[-1])
    return [F.mul(c, x) for x in a]


def poly_gcd(F, a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, poly_mod(F, a, b)
    return poly_monic(F, a)


def poly_egcd(F, a, b):
    """Return ``(g, s, t)`` with ``s*a + t*b == g`` and ``g`` monic."""
    r0, r1 = _trim(list(a)), _trim(list(b))
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        qt, rem = poly_divmod(F, r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, poly_sub(F, s0, poly_mul(F, qt, s1))
        t0, t1 = t1, poly_sub(F, t0, poly_mul(F, qt, t1))
    c = F.inv(r0[-1])
    scale = lambda p: [F.mul(c, x) for x in p]  # noqa: E731
    return scale(r0), scale(s0), scale(t0)


def is_irreducible(F, f) -> bool:
    """Ben-Or irreducibility test for a monic polynomial over ``F``."""
    f = _trim(list(f))
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    power = x
    for _ in range(d // 2):
        power = poly_powmod(F, power, F.order, f)
        g = poly_gcd(F, f, poly_sub(F, power, x))
        if len(g) > 1:
            return False
    return True


def smallest_irreducible(F, d: int) -> list[int]:
    """Smallest monic irreducible of degree ``d`` over ``F``.

    Candidates are ordered by the integer encoding of their non-leading
    coefficients, i.e. lexicographically on ``(c[d-1], ..., c[0])``.
    """
    Q = F.order
    for idx in range(Q**d):
        coeffs = [(idx // Q**i) % Q for i in range(d)] + [1]
        if d > 1 and coeffs[0] == 0:
            continue
        if is_irreducible(F, coeffs):
            return coeffs
    raise RuntimeError(f"no irreducible polynomial of degree {d} over {F.name}")


def _int_inverse(a: int, p: int) -> int:
    r0, r1, s0, s1 = p, a % p, 0, 1
    while r1:
        qt = r0 // r1
        r0, r1 = r1, r0 - qt * r1
        s0, s1 = s1, s0 - qt * s1
    if r0 != 1:
        raise ZeroDivisionError(f"{a} not invertible mod {p}")
    return s0 % p


# ---------------------------------------------------------------------------


class Field:
    """A finite field level with integer-encoded elements.

    ``base`` is the level below (``None`` for a prime field) and ``poly`` the
    monic defining polynomial over it.
    """

    def __init__(self, p: int, base: Field | None = None, poly=None):
        self.p = p
        self.base = base
        if base is None:
            self.poly = None
            self.rel_degree = 1
            self.degree = 1
            self.order = p
        else:
            self.poly = tuple(poly)
            self.rel_degree = len(poly) - 1
            self.degree = base.degree * self.rel_degree
            self.order = base.order**self.rel_degree
        check_cap(self.order, "field order")
        self.name = f"GF({p})" if self.degree == 1 else f"GF({p}^{self.degree})"
        self.elements = range(self.order)
        self._build()

    def __repr__(self):
        return f"Field({self.name})"

    # slow reference arithmetic, used while building the tables

    def _digit_add(self, a, b):
        p = self.p
        if p == 2:
            return a ^ b
        out, scale = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    def coeffs(self, a: int) -> list[int]:
        B = self.base.order if self.base else self.p
        return [(a // B**i) % B for i in range(self.rel_degree)]

    def from_coeffs(self, c) -> int:
        B = self.base.order if self.base else self.p
        return sum(x * B**i for i, x in enumerate(c))

    def _slow_mul(self, a, b):
        if self.base is None:
            return a * b % self.p
        prod = poly_mulmod(self.base, self.coeffs(a), self.coeffs(b), list(self.poly))
        return self.from_coeffs(prod)

    def _slow_pow(self, a, n):
        result, base = 1, a
        while n:
            if n & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            n >>= 1
        return result

    def _egcd_inverse(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.base is None:
            return _int_inverse(a, self.p)
        g, s, _ = poly_egcd(self.base, self.coeffs(a), list(self.poly))
        if g != [1]:
            raise ArithmeticError("defining polynomial is not irreducible")
        return self.from_coeffs(s + [0] * (self.rel_degree - len(s)))

    def _build(self):
        N = self.order
        m = N - 1
        primes = list(factorize(m)) if m > 1 else []
        g = None
        for c in range(1, N):
            if all(self._slow_pow(c, m // ell) != 1 for ell in primes):
                g = c
                break
        if g is None:
            raise ArithmeticError(f"{self.name}: no primitive element, defining polynomial is reducible")
        self.primitive = g
        exp = [0] * (2 * m)
        x = 1
        for i in range(m):
            exp[i] = x
            exp[i + m] = x
            x = self._slow_mul(x, g)
        if x != 1:
            raise ArithmeticError(f"{self.name}: element {g} does not have order {m}")
        log = [-1] * N
        for i in range(m):
            log[exp[i]] = i
        if any(log[a] < 0 for a in range(1, N)):
            raise ArithmeticError(f"{self.name}: defining polynomial is not primitive-compatible")
        self._exp, self._log = exp, log
        self._inv = [0] + [self._egcd_inverse(a) for a in range(1, N)]
        p = self.p
        if p == 2:
            self._neg = list(range(N))
        else:
            self._neg = [0] * N
            for a in range(N):
                out, scale, r = 0, 1, a
                while r:
                    out += ((-(r % p)) % p) * scale
                    r //= p
                    scale *= p
                self._neg[a] = out
        self._install_ops()

    def _install_ops(self):
        N, m, p = self.order, self.order - 1, self.p
        exp, log, inv, neg = self._exp, self._log, self._inv, self._neg

        def mul(a, b):
            if a and b:
                return exp[log[a] + log[b]]
            return 0

        if p == 2:
            def add(a, b):
                return a ^ b
        elif self.base is None:
            def add(a, b):
                return (a + b) % p
        elif N <= _ADD_TABLE_LIMIT:
            digits = np.array([[(a // p**j) % p for j in range(self.degree)] for a in range(N)])
            weights = p ** np.arange(self.degree)
            table = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
            rows = table.tolist()
            self._add_rows = rows

            def add(a, b):
                return rows[a][b]
        else:
            zech = [-1] * m
            for i in range(m):
                s = self._digit_add(1, exp[i])
                zech[i] = log[s] if s else -1

            def add(a, b):
                if not a:
                    return b
                if not b:
                    return a
                la = log[a]
                d = log[b] - la
                if d < 0:
                    d += m
                z = zech[d]
                return exp[la + z] if z >= 0 else 0

        def sub(a, b):
            return add(a, neg[b])

        def inverse(a):
            if not a:
                raise ZeroDivisionError("inverse of zero")
            return inv[a]

        self.add = add
        self.sub = sub
        self.mul = mul
        self.inv = inverse
        self.neg = neg.__getitem__

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return 0
        m = self.order - 1
        return self._exp[(self._log[a] * n) % m]

    def log(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of zero")
        return self._log[a]

    def exp(self, i: int) -> int:
        return self._exp[i % (self.order - 1)]

    def order_of(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        m = self.order - 1
        return m // gcd(m, self._log[a])


class Subfield:
    """The subfield of ``parent`` of order ``q**r``, sharing its encodings."""

    def __init__(self, parent: Field, elements, name: str):
        self.parent = parent
        self.p = parent.p
        self.elements = list(elements)
        self.order = len(self.elements)
        self.name = name
        self.add, self.sub, self.mul = parent.add, parent.sub, parent.mul
        self.inv, self.neg = parent.inv, parent.neg

    def __repr__(self):
        return f"Subfield({self.name})"

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        return self.parent.pow(a, n)


@lru_cache(maxsize=None)
def prime_field(p: int) -> Field:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return Field(p)


@dataclass(frozen=True)
class FieldElement:
    """An element with its level tag, encoding and coefficient vector."""

    level: str
    idx: int
    coeffs: tuple

    def to_json(self):
        return {"level": self.level, "idx": self.idx, "coeffs": list(self.coeffs)}


class FieldTower:
    """The chain GF(p) < GF(q) < GF(q^h) with q = p^e.

    ``base`` is GF(q) and ``top`` is GF(q^h); when ``e == 1`` or ``h == 1``
    the corresponding step is the identity and the levels coincide.
    """

    def __init__(self, p: int, e: int, h: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if e < 1 or h < 1:
            raise ValueError("degrees must be at least 1")
        check_cap(p ** (e * h), "tower top field")
        self.p, self.e, self.h = p, e, h
        self.prime = prime_field(p)
        if (p, e) in CONWAY:
            self.base_poly = tuple(CONWAY[(p, e)])
        else:
            self.base_poly = tuple(smallest_irreducible(self.prime, e))
        self.base = self.prime if e == 1 else Field(p, self.prime, self.base_poly)
        self.q = self.base.order
        if h == 1:
            self.rel_poly = (0, 1)
            self.top = self.base
        else:
            self.rel_poly = tuple(smallest_irreducible(self.base, h))
            self.top = Field(p, self.base, self.rel_poly)
        self._frob: dict[int, list[int]] = {}
        self._subfields: dict[int, object] = {}

    def __repr__(self):
        return f"FieldTower(p={self.p}, e={self.e}, h={self.h})"

    @property
    def polys(self):
        return [list(self.base_poly), list(self.rel_poly)]

    def descriptor(self) -> dict:
        return {"p": self.p, "e": self.e, "h": self.h, "polys": self.polys}

    def element(self, x: int) -> FieldElement:
        return FieldElement(self.top.name, x, tuple(self.top.coeffs(x)) if self.h > 1 else (x,))

    def _check_divisor(self, r):
        if r < 1 or self.h % r:
            raise ValueError(f"{r} does not divide h={self.h}")

    def frob_table(self, times: int = 1) -> list[int]:
        """Lookup list for x -> x^(q^times) on the top level."""
        t = times % self.h
        table = self._frob.get(t)
        if table is None:
            F = self.top
            m = F.order - 1
            e = pow(self.q, t, m) if m > 1 else 1
            table = [0] + [F._exp[(F._log[x] * e) % m] for x in range(1, F.order)]
            self._frob[t] = table
        return table

    def frobenius(self, x: int, times: int = 1) -> int:
        return self.frob_table(times)[x]

    def rel_norm(self, x: int, r: int) -> int:
        self._check_divisor(r)
        qh, qr = self.q**self.h, self.q**r
        return self.top.pow(x, (qh - 1) // (qr - 1)) if x else 0

    def in_subfield(self, x: int, r: int) -> bool:
        return self.frobenius(x, r) == x

    def hilbert90(self, alpha: int, r: int) -> int:
        """Smallest beta with beta^(q^r - 1) == alpha, for alpha of norm 1."""
        n = self.rel_norm(alpha, r)
        if n != 1:
            raise ValueError(f"hilbert90 needs norm 1, element {alpha} has norm {n}")
        e = self.q**r - 1
        for beta in range(1, self.top.order):
            if self.top.pow(beta, e) == alpha:
                return beta
        raise ArithmeticError("no Hilbert 90 preimage found")

    def min_subfield_degree(self, x: int) -> int:
        for r in divisors(self.h):
            if self.frobenius(x, r) == x:
                return r
        return self.h

    def subfield(self, r: int):
        """GF(q^r) as a field-like view inside the top level."""
        self._check_divisor(r)
        if r == self.h:
            return self.top
        if r == 1:
            return self.base
        sub = self._subfields.get(r)
        if sub is None:
            elems = [x for x in self.top.elements if self.in_subfield(x, r)]
            name = f"GF({self.p}^{self.e * r})<{self.top.name}"
            sub = Subfield(self.top, elems, name)
            self._subfields[r] = sub
        return sub


@lru_cache(maxsize=None)
def make_tower(p: int, e: int, h: int) -> FieldTower:
    return FieldTower(p, e, h)


def tower_for(q: int, h: int) -> FieldTower:
    p, e = prime_power(q)
    return make_tower(p, e, h)
