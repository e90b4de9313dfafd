"""Subgeometries of PG(k-1, q^h) through frames, closure under frames, and
classification of closed point sets."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .galois import divisors, tower_for
from .moore import SCHEMA_VERSION
from .projspace import (
    all_points,
    all_subspaces,
    in_general_position,
    lin_comb,
    meet,
    normalize,
    points_of,
    solve,
    span,
)

Q2_MESSAGE = "classification of closed sets needs q > 2"


@dataclass
class PointSet:
    """Deduplicated normalised points of PG(k-1, q^h)."""

    q: int
    k: int
    h: int
    points: tuple = ()

    def __post_init__(self):
        F = self.field
        pts = set()
        for P in self.points:
            if len(P) != self.k:
                raise ValueError(f"point {list(P)} is not in PG({self.k - 1}, q^h)")
            if any(not 0 <= x < F.order for x in P):
                raise ValueError(f"point {list(P)} has entries outside {F.name}")
            pts.add(normalize(F, P))
        self.points = tuple(sorted(pts))

    @property
    def tower(self):
        return tower_for(self.q, self.h)

    @property
    def field(self):
        return self.tower.top

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, P):
        return normalize(self.field, P) in set(self.points)

    def with_points(self, points) -> PointSet:
        return PointSet(self.q, self.k, self.h, tuple(points))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "points",
            "ambient": {"k": self.k, "q": self.q, "h": self.h},
            "points": [list(P) for P in self.points],
        }

    @classmethod
    def from_json(cls, data) -> PointSet:
        amb = data["ambient"]
        return cls(int(amb["q"]), int(amb["k"]), int(amb["h"]),
                   tuple(tuple(int(x) for x in P) for P in data["points"]))


def subgeometry_size(q: int, k: int, r: int) -> int:
    return (q ** (r * k) - 1) // (q**r - 1)


def frame_matrix(F, frame):
    """Rows ``lambda_i u_i`` with ``sum(lambda_i u_i) == last frame point``."""
    k = len(frame[0])
    if not in_general_position(F, frame):
        raise ValueError("frame points are not in general position")
    lams = solve(F, list(frame[:k]), frame[k])
    return [tuple(F.mul(lam, x) for x in u) for lam, u in zip(lams, frame[:k])]


def subgeometry_through(tower, frame, r: int = 1):
    """The q^r-order subgeometry determined by ``k+1`` points in general position."""
    if tower.h % r:
        raise ValueError(f"r={r} does not divide h={tower.h}")
    F = tower.top
    U = frame_matrix(F, frame)
    k = len(U)
    sub = tower.subfield(r)
    return sorted(normalize(F, lin_comb(F, c, U, k)) for c in all_points(sub, k))


def general_position_frames(F, points, require=None):
    """(k+1)-subsets of ``points`` in general position, in lexicographic order.

    With ``require`` (a set), only subsets meeting it are produced.
    """
    k = len(points[0])
    for sub in combinations(points, k + 1):
        if require is not None and not any(P in require for P in sub):
            continue
        if in_general_position(F, list(sub)):
            yield list(sub)


def closure_generate(S0: PointSet) -> PointSet:
    """Least superset of ``S0`` containing the q-subgeometry of each of its frames.

    Each round scans, in lexicographic order, only the subsets that contain a
    point added in the previous round; subsets of older points were handled
    before, so the least fixpoint is the same as with a full rescan.
    """
    if S0.q == 2:
        warnings.warn("closure generation at q = 2: the classification theorem does not apply",
                      stacklevel=2)
    F = S0.field
    tower = S0.tower
    current = set(S0.points)
    fresh = set(current)
    found_frame = False
    while fresh:
        pts = sorted(current)
        added = set()
        for frame in general_position_frames(F, pts, fresh):
            found_frame = True
            for P in subgeometry_through(tower, frame, 1):
                if P not in current and P not in added:
                    added.add(P)
        current |= added
        fresh = added
    if not found_frame:
        raise ValueError("the point set has no k+1 points in general position")
    return S0.with_points(current)


def not_closed_witness(S: PointSet):
    """First frame (lexicographically) whose q-subgeometry leaves ``S``, or None."""
    members = set(S.points)
    for frame in general_position_frames(S.field, list(S.points)):
        sub = subgeometry_through(S.tower, frame, 1)
        missing = [P for P in sub if P not in members]
        if missing:
            return {"frame": [list(P) for P in frame], "missing_point": list(missing[0])}
    return None


@dataclass
class Classification:
    closed: bool
    r: int | None = None
    frame: list | None = None
    matrix: list | None = None
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "closed": self.closed,
            "r": self.r,
            "frame": [list(P) for P in self.frame] if self.frame else None,
            "matrix": [list(row) for row in self.matrix] if self.matrix else None,
            "witness": self.witness,
        }


EXHAUSTIVE_SCAN_LIMIT = 200_000


def classify_closed(S: PointSet, exhaustive: bool | None = None) -> Classification:
    """Identify a closed set as a q^r-order subgeometry.

    The size fixes the candidate ``r``; the set must then coincide with the
    q^r-subgeometry through its first frame, which makes it closed. The
    closure is additionally checked frame by frame when ``exhaustive`` is
    true, or by default when there are at most ``EXHAUSTIVE_SCAN_LIMIT``
    candidate frames. Returns ``closed=False`` with a violating frame when
    ``S`` is not closed; raises for q = 2, for sets without a frame and for
    closed sets whose size is that of no subgeometry.
    """
    if S.q == 2:
        raise ValueError(Q2_MESSAGE)
    pts = list(S.points)
    if len(pts) < S.k + 1:
        raise ValueError("the point set has fewer than k+1 points")
    first = next(general_position_frames(S.field, pts), None)
    if first is None:
        raise ValueError("the point set has no k+1 points in general position")
    if exhaustive is None:
        exhaustive = comb(len(pts), S.k + 1) <= EXHAUSTIVE_SCAN_LIMIT
    sizes = {r: subgeometry_size(S.q, S.k, r) for r in divisors(S.h)}
    witness = {"size": len(pts), "sizes_by_r": sizes, "exhaustive_scan": exhaustive}
    rs = [r for r, n in sizes.items() if n == len(pts)]
    if rs and subgeometry_through(S.tower, first, rs[0]) == pts:
        if exhaustive:
            bad = not_closed_witness(S)
            if bad is not None:
                witness.update(bad)
                return Classification(False, witness=witness)
        return Classification(True, rs[0], first, frame_matrix(S.field, first), witness)
    bad = not_closed_witness(S)
    if bad is not None:
        witness.update(bad)
        return Classification(False, witness=witness)
    raise ValueError(f"closed set of size {len(pts)} is not a subgeometry (sizes {sizes})")


def _lines_through_pairs(S: PointSet):
    F = S.field
    lines = {}
    pts = list(S.points)
    for P, Q in combinations(pts, 2):
        L = span(F, [P, Q])
        if L not in lines:
            lines[L] = sum(1 for R in pts if R in L)
    return lines


def line_spectrum(S: PointSet) -> Counter:
    """Multiset of |line & S| over the lines meeting S in at least two points."""
    return Counter(_lines_through_pairs(S).values())


def full_line_spectrum(S: PointSet) -> Counter:
    """|line & S| over every line of the ambient space (0 and 1 included)."""
    pts = list(S.points)
    return Counter(sum(1 for P in pts if P in L) for L in all_subspaces(S.field, S.k, 2))


def secant_properties(S: PointSet) -> dict:
    """Two incidence facts of closed sets: every 2-secant line carries at
    least q+1 points of S, and two secant lines meet (if at all) in S."""
    lines = _lines_through_pairs(S)
    short = [L for L, n in lines.items() if n < S.q + 1]
    members = set(S.points)
    outside = None
    secants = sorted(lines)
    for L1, L2 in combinations(secants, 2):
        M = _meet_point(L1, L2)
        if M is not None and M not in members:
            outside = {"lines": [L1.to_json(), L2.to_json()], "point": list(M)}
            break
    return {"secants": len(lines), "short_secants": len(short), "meet_outside": outside,
            "ok": not short and outside is None}


def _meet_point(L1, L2):
    M = meet(L1, L2)
    if M is None or M.rank != 1:
        return None
    return points_of(M)[0]
