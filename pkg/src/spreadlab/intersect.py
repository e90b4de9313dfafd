"""Extension traces of spread elements, second spreads through the regulus and
the intersection of two Desarguesian spreads.

Notation follows :mod:`spreadlab.moore`: ``Xi = spread_element(v)`` and its
extension over GF(q^h) is ``{diag(alpha) M_v}``. A second spread is built from
the B-member of the rank-1 locus through a rank-1 big point ``Q``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import lcm

import numpy as np

from .config import CapExceeded, check_cap
from .galois import divisors
from .moore import Spread, moore_space
from .projspace import Subspace, all_points, iter_points, normalize, projective_count, rank, span
from .report import VerificationReport
from .segre import build_generalized_segre, is_rank_one, regulus_member_through


def spread_intersection(D1: Spread, D2: Spread) -> list:
    """Common elements, compared by canonical RREF basis."""
    if (D1.q, D1.k, D1.h) != (D2.q, D2.k, D2.h):
        raise ValueError(f"spreads have different parameters {(D1.q, D1.k, D1.h)} and {(D2.q, D2.k, D2.h)}")
    return sorted(set(D1.elements) & set(D2.elements))


def admissible_sizes(q: int, k: int, h: int) -> dict:
    return {r: (q ** (k * r) - 1) // (q**r - 1) for r in divisors(h)}


def min_subgeometry_index(model, v) -> int:
    """Least r | h with the normalised ``v`` in GF(q^r)^k."""
    v = normalize(model.top, v)
    return lcm(*(model.tower.min_subfield_degree(x) for x in v))


def conjugate_classes(model, v):
    """Partition of the row indices of ``M_v`` by proportionality of the rows."""
    M = model.rows(model.moore_matrix(v))
    reps, classes = [], []
    for i, row in enumerate(M):
        key = normalize(model.top, row)
        if key in reps:
            classes[reps.index(key)].append(i)
        else:
            reps.append(key)
            classes.append([i])
    return classes


@dataclass
class ExtensionTrace:
    """The rank-1 part of the extension of ``Xi = spread_element(v)``.

    ``components`` are subspaces of PG(hk-1, q^h); ``classes`` lists the row
    indices supporting each component.
    """

    v: tuple
    element: Subspace
    extension: Subspace
    classes: list
    components: list

    @property
    def kind(self) -> str:
        if len(self.classes) == 1:
            return "whole"
        if all(len(c) == 1 for c in self.classes):
            return "points"
        return "subspaces"

    def alpha_points(self):
        """Normalised diagonal coefficient vectors alpha with diag(alpha) M_v of rank 1."""
        h = sum(len(c) for c in self.classes)
        out = set()
        for c in self.classes:
            for a in all_points(self.extension.field, len(c)):
                alpha = [0] * h
                for i, x in zip(c, a):
                    alpha[i] = x
                out.add(tuple(alpha))
        return out

    def to_json(self) -> dict:
        return {
            "v": list(self.v),
            "kind": self.kind,
            "classes": self.classes,
            "components": [C.to_json() for C in self.components],
        }


def extension_trace(model, v) -> ExtensionTrace:
    """Intersection of the extension of ``spread_element(v)`` with the rank-1 locus.

    A point ``diag(alpha) M_v`` has rank one exactly when the support of
    ``alpha`` lies in one class of proportional rows, so each class gives a
    component spanned by its rows.
    """
    v = normalize(model.top, v)
    Xi = model.spread_element(v)
    ext = model.extension(Xi)
    M = model.moore_matrix(v)
    k, n = model.k, model.n
    classes = conjugate_classes(model, v)
    comps = []
    for c in classes:
        rows = []
        for i in c:
            vec = [0] * n
            vec[i * k:(i + 1) * k] = M[i * k:(i + 1) * k]
            rows.append(tuple(vec))
        C = span(model.top, rows)
        if not ext.contains_subspace(C):
            raise ArithmeticError("trace component is not inside the extension")
        comps.append(C)
    return ExtensionTrace(v, Xi, ext, classes, comps)


def _mul_table(F):
    N = F.order
    return np.array([[F.mul(a, b) for b in range(N)] for a in range(N)], dtype=np.int64)


def rank_one_alphas_bruteforce(model, v):
    """All normalised alpha in PG(h-1, q^h) with diag(alpha) M_v of rank one,
    by evaluating every 2x2 minor over the whole coefficient space."""
    F = model.top
    h, k = model.h, model.k
    N = F.order
    check_cap(projective_count(N, h), "diagonal coefficient vectors")
    mul = _mul_table(F)
    M = model.rows(model.moore_matrix(normalize(F, v)))
    found = set()
    for lead in range(h):
        tail = h - lead - 1
        grids = np.indices((N,) * tail).reshape(tail, -1).T if tail else np.zeros((1, 0), dtype=np.int64)
        A = np.zeros((grids.shape[0], h), dtype=np.int64)
        A[:, lead] = 1
        A[:, lead + 1:] = grids
        R = np.stack([mul[A[:, i][:, None], np.array(M[i])[None, :]] for i in range(h)], axis=1)
        ok = np.ones(A.shape[0], dtype=bool)
        for i in range(h):
            for i2 in range(i + 1, h):
                for j in range(k):
                    for j2 in range(j + 1, k):
                        ok &= mul[R[:, i, j], R[:, i2, j2]] == mul[R[:, i, j2], R[:, i2, j]]
        found.update(map(tuple, A[ok].tolist()))
    return found


def uniqueness_flag(model, v) -> bool:
    """Whether ``Xi`` and the regulus R_{h,q} lie in a unique Desarguesian spread.

    Both criteria are computed: the parameter is in no proper subfield
    (minimal index ``h``) and the extension trace is ``h`` isolated points.
    """
    v = normalize(model.top, v)
    r = min_subgeometry_index(model, v)
    if r == 1:
        raise ValueError("the parameter defines an element of the regulus R_{h,q}; the question is vacuous")
    by_index = r == model.h
    trace = extension_trace(model, v)
    by_trace = trace.kind == "points" and len(trace.components) == model.h
    if by_index != by_trace:
        raise AssertionError(f"criteria disagree for v={v}: index {r}, trace {trace.kind}")
    return by_index


def on_director(model, Q) -> int | None:
    for i in range(model.h):
        if Q in model.director(i):
            return i
    return None


def second_spread(model, Q) -> Spread:
    """spread_from_director of the B-member through a rank-1 point ``Q``."""
    if not is_rank_one(model.top, Q, model.h, model.k):
        raise ValueError("Q is not a rank-1 point")
    i = on_director(model, Q)
    if i is not None:
        raise ValueError(f"Q lies on the director space number {i}; this reproduces the same spread")
    Phi = regulus_member_through(model.top, Q, model.k, model.h, "B", "hxk")
    spread = model.spread_from_director(Phi)
    spread.witness["Q"] = list(Q)
    return spread


def support_pattern_point(model, v, r: int, a: int):
    """diag(alpha) M_v with alpha_0 = 1, alpha_r = a and all other entries 0."""
    h, k = model.h, model.k
    M = model.moore_matrix(v)
    alpha = [0] * h
    alpha[0] = 1
    alpha[r] = a
    out = []
    for i in range(h):
        out.extend(model.top.mul(alpha[i], x) for x in M[i * k:(i + 1) * k])
    return tuple(out)


def theorem_parameter(model, r: int):
    """v = (1, u, 0, ..., 0) with u the smallest element of exact degree r."""
    sub = model.tower.subfield(r)
    u = next(x for x in sub.elements if model.tower.min_subfield_degree(x) == r) if r > 1 else 1
    return normalize(model.top, (1, u) + (0,) * (model.k - 2)) if model.k > 1 else (1,)


def theorem_second_spread(model, v, r: int):
    """Deterministic support-pattern choice of Q and the resulting spread.

    The second coefficient ``a`` is the smallest nonzero element for which
    the director space is non-degenerate; ``a`` of norm 1 over GF(q^r) is
    degenerate.
    """
    for a in range(1, model.top.order):
        Q = support_pattern_point(model, v, r, a)
        try:
            return Q, a, second_spread(model, Q)
        except ValueError:
            continue
    raise ValueError("no support-pattern point gives a non-degenerate director")


def column_orbit(model, y):
    """The vectors y, y^psi, ..., y^(psi^(h-1)) of GF(q^h)^h (cyclic shift plus Frobenius)."""
    h, T = model.h, model.tower
    return [tuple(T.frobenius(y[(s - i) % h], i) for s in range(h)) for i in range(h)]


def nondegenerate_column(model):
    """First y in PG(h-1, q^h) off the coordinate points whose B-member
    {y (x) x} is a non-degenerate director, or None if there is none."""
    for y in iter_points(model.top, model.h):
        if sum(1 for x in y if x) >= 2 and rank(model.top, column_orbit(model, y)) == model.h:
            return y
    return None


def random_second_spread(model, rng: random.Random):
    """Second spread from the B-member through a random rank-1 point."""
    F, h = model.top, model.h
    if nondegenerate_column(model) is None:
        raise ValueError("every B-member off the director spaces is degenerate")
    while True:
        y = [rng.randrange(F.order) for _ in range(h)]
        if sum(1 for x in y if x) < 2:
            continue
        v = model.parameters()[rng.randrange(projective_count(F.order, model.k))]
        Q = normalize(F, tuple(F.mul(a, b) for a in y for b in v))
        try:
            return Q, second_spread(model, Q)
        except ValueError:
            continue


def verify_intersection_theorem(q: int, k: int, h: int, r: int | None = None,
                                trials: int = 0, seed: int = 0) -> VerificationReport:
    """Check |D cap D'| = (q^{kr}-1)/(q^r-1) and D cap D' = R^r_{h,q}."""
    rep = VerificationReport("theorem-intersection", {"q": q, "k": k, "h": h, "r": r,
                                                      "trials": trials, "seed": seed})
    if r is None:
        proper = [d for d in divisors(h) if d < h]
        if proper != [1]:
            raise ValueError("r is required unless h is prime")
        r = 1
        rep.parameters["r"] = 1
    if r < 1 or r >= h or h % r:
        raise ValueError(f"r={r} must be a proper divisor of h={h}")
    try:
        model = moore_space(q, k, h)
        D = model.build_spread()
        v = theorem_parameter(model, r)
        rep.check("parameter_index", min_subgeometry_index(model, v) == r,
                  {"v": list(v), "index": min_subgeometry_index(model, v)})
        try:
            Q, a, D2 = theorem_second_spread(model, v, r)
        except ValueError as exc:
            if nondegenerate_column(model) is not None:
                raise
            degenerate = sum(1 for y in iter_points(model.top, h)
                             if sum(1 for x in y if x) >= 2)
            rep.skip("second_spread", f"no second spread through R_(h,q) arises from the B-members: {exc}",
                     {"degenerate_candidates": degenerate, "checked": "every y off the coordinate points"})
            return rep.finish()
        witness_q = {"Q": list(Q), "a": a, "v": list(v)}
        e = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        arc = [model.spread_element(x) for x in e] + [model.spread_element((1,) * k)]
        D_set, D2_set = set(D.elements), set(D2.elements)
        missing = [i for i, E in enumerate(arc) if E not in D_set or E not in D2_set]
        rep.check("pseudo_arc_in_both", not missing, {"missing_indices": missing} if missing else
                  {"arc": [E.to_json() for E in arc]})
        common = spread_intersection(D, D2)
        G = build_generalized_segre(q, k, h, r)
        same = common == sorted(G.system_a)
        rep.check("intersection_equals_system_a", same,
                  {"common": len(common), "system_a": len(G.system_a),
                   "only_in_intersection": [E.to_json() for E in set(common) - set(G.system_a)][:3],
                   "only_in_system_a": [E.to_json() for E in set(G.system_a) - set(common)][:3]})
        expected = (q ** (k * r) - 1) // (q**r - 1)
        rep.check("intersection_size", len(common) == expected,
                  {"size": len(common), "expected": expected})
        rep.check("spreads_differ", D_set != D2_set, witness_q)
        Xi = model.spread_element(v)
        rep.check("xi_in_both", Xi in D_set and Xi in D2_set and Q in model.extension(Xi),
                  {"xi": Xi.to_json()})
        reg = [model.spread_element(x) for x in model.parameters() if all(c < q for c in x)]
        rep.check("regulus_in_second_spread", all(E in D2_set for E in reg),
                  {"regulus_size": len(reg)})
        parts = D.partition_report(), D2.partition_report()
        rep.check("partitions", parts[0]["ok"] and parts[1]["ok"],
                  {"first": parts[0], "second": parts[1]})
        if q == 2:
            rep.skip("closure_hypothesis", "q = 2: the closure classification assumes q > 2; "
                     "the spread constructions above are still checked")
        if trials:
            rng = random.Random(seed)
            sizes = admissible_sizes(q, k, h)
            observed = []
            for _ in range(trials):
                Qr, Dr = random_second_spread(model, rng)
                observed.append(len(spread_intersection(D, Dr)))
            bad = [s for s in observed if s not in sizes.values()]
            rep.check("random_trials_admissible", not bad,
                      {"observed": sorted(set(observed)), "counts": {str(s): observed.count(s) for s in set(observed)},
                       "admissible": sizes, "inadmissible": bad})
    except CapExceeded as exc:
        rep.skip("enumeration_cap", str(exc))
    except Exception as exc:  # a report never passes silently
        rep.fail_with("exception", exc)
    return rep.finish()
