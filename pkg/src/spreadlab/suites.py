"""Named verification suites; each returns a :class:`VerificationReport`."""

from __future__ import annotations

import warnings

from .closure import PointSet, classify_closed, closure_generate, line_spectrum
from .config import CapExceeded, get_cap
from .galois import divisors, tower_for
from .intersect import verify_intersection_theorem
from .moore import moore_space
from .report import VerificationReport
from .segre import (
    build_generalized_segre,
    build_segre,
    induced_spreads_are_scalar_classes,
    quadric_kernel_dimension,
    segre_through_pseudo_arc,
)
from .singer import canonical_pseudo_arc, conjugated_subgroup_generator, fixes_elementwise, singer_to_moore


def _spread_partition(rep, q, k, h, r, **_):
    model = moore_space(q, k, h)
    D = model.build_spread()
    part = D.partition_report()
    rep.check("partition", part["ok"], part)
    same = model.spread_from_director(model.director(0)).elements == D.elements
    rep.check("director_reproduces_spread", same, {"elements": len(D)})


def _segre(rep, q, k, h, r, **_):
    S = build_segre(q, k, h)
    res = S.check()
    rep.check("segre_invariants", res["ok"], res)


def _generalized_segre(rep, q, k, h, r, **_):
    if r is None:
        rep.skip("generalized_segre", "no r given")
        return
    G = build_generalized_segre(q, k, h, r)
    res = G.check()
    rep.check("generalized_invariants", res["ok"], res)
    rep.check("chain_agrees_with_scalar_classes", G.witness["chain_agrees_with_scalar_classes"], G.witness)
    rep.check("induced_spreads_desarguesian", induced_spreads_are_scalar_classes(G, moore_space(q, k, h)),
              {"r": r})


def _singer(rep, q, k, h, r, **_):
    res = singer_to_moore(q, k, h)
    rep.check("singer_partition", res["singer"].partition_report()["ok"], res["singer"].partition_report())
    rep.check("projectivity_to_moore", res["maps_onto"],
              {"matrix": [list(row) for row in res["matrix"]], "subfield_root": res["subfield_root"]})
    S = res["action"]
    m = q**h - 1
    rep.check("subgroup_fixes_singer_spread",
              fixes_elementwise(S.power_matrix(S.subgroup_exponent(m)), res["singer"]), {"order": m})
    rep.check("conjugated_subgroup_fixes_moore_spread",
              fixes_elementwise(conjugated_subgroup_generator(S, res["matrix"], m), res["moore"]), {"order": m})
    rep.check("point_regular", S.point_orbit_length() == S.projective_order,
              {"orbit": S.point_orbit_length(), "expected": S.projective_order})


def _pseudo_arc(rep, q, k, h, r, **_):
    A = canonical_pseudo_arc(q, k, h)
    ok, bad = A.check()
    rep.check("canonical_is_pseudo_arc", ok, {"offending": bad})
    S = segre_through_pseudo_arc(A.elements)
    in_a = all(E in set(S.system_a) for E in A.elements)
    rep.check("arc_in_regulus", in_a, {"arc": len(A)})
    rep.check("transversals_reproduce_system_b", S.witness["transversals_match"], S.witness)


def _quadric(rep, q, k, h, r, **_):
    d = quadric_kernel_dimension(q, k, h)
    rep.check("quadric_kernel_zero", d == 0, {"kernel_dimension": d})


def _closure(rep, q, k, h, r, **_):
    if q == 2:
        rep.skip("closure_classification", "classification of closed sets needs q > 2")
        return
    T = tower_for(q, h)
    rs = [r] if r else divisors(h)
    for rr in rs:
        sub = T.subfield(rr)
        u = next(x for x in sub.elements if T.min_subfield_degree(x) == rr) if rr > 1 else 1
        seed = [tuple(int(i == j) for j in range(k)) for i in range(k)] + [(1,) * k]
        seed.append((1, u) + (0,) * (k - 2) if k > 1 else (1,))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            S = closure_generate(PointSet(q, k, h, tuple(seed)))
        c = classify_closed(S)
        rep.check(f"closure_r{rr}", c.closed and c.r == rr, {"size": len(S), "classified": c.to_json()})
        spec = line_spectrum(S)
        rep.check(f"line_spectrum_r{rr}", set(spec) == {q**rr + 1},
                  {"spectrum": {str(a): b for a, b in spec.items()}})


def _theorem(rep, q, k, h, r, trials=0, seed=0, **_):
    sub = verify_intersection_theorem(q, k, h, r, trials=trials, seed=seed)
    rep.assertions.extend(sub.assertions)
    rep.parameters["r"] = sub.parameters["r"]


SUITES = {
    "spread-partition": _spread_partition,
    "segre": _segre,
    "generalized-segre": _generalized_segre,
    "singer": _singer,
    "pseudo-arc": _pseudo_arc,
    "quadric": _quadric,
    "closure": _closure,
    "theorem-intersection": _theorem,
}


def default_suites(params) -> list:
    """Suites that apply to a ``(q, k, h)`` or ``(q, k, h, r)`` tuple."""
    if len(params) == 4:
        return ["generalized-segre", "theorem-intersection"]
    q, k, h = params
    out = ["spread-partition", "segre", "singer", "pseudo-arc"]
    if [d for d in divisors(h) if d < h] == [1]:
        out.append("theorem-intersection")
    return out


def estimated_size(q: int, k: int, h: int) -> int:
    return q ** (k * h)


def run_suite(name: str, q: int, k: int, h: int, r: int | None = None,
              trials: int = 0, seed: int = 0) -> VerificationReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    rep = VerificationReport(name, {"q": q, "k": k, "h": h, "r": r, "trials": trials, "seed": seed})
    if estimated_size(q, k, h) > get_cap():
        rep.skip("enumeration_cap", f"q^(kh) = {estimated_size(q, k, h)} exceeds cap {get_cap()}")
        return rep.finish()
    try:
        SUITES[name](rep, q, k, h, r, trials=trials, seed=seed)
    except CapExceeded as exc:
        rep.skip("enumeration_cap", str(exc))
    except Exception as exc:  # a report never passes silently
        rep.fail_with("exception", exc)
    return rep.finish()
