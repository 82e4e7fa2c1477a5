"""Exact arithmetic for points, arcs, and measure-zero closed sets on the unit circle.

Angles are rational fractions of a full turn, so membership and arc
partitions are exact; floating point enters only when a length is fed to a
logarithm or a chord.  The circle carries normalized Lebesgue measure
(full circle = 1), and all "entropy" sums below are

    sum over complementary arcs I of  |I| * ln(1/|I|)

with the natural logarithm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "CirclePoint",
    "ArcInterval",
    "BoundarySet",
    "ValidationError",
    "complementary_arcs",
    "entropy",
    "chordal_distance",
    "contains",
    "removed_arc_entropy_partials",
    "removed_arc_entropy_limit",
    "boundary_set_from_json",
    "boundary_set_to_json",
]

MAX_CANTOR_DEPTH = 20  # 2^21 endpoints; deeper specs are rejected as overflow


class ValidationError(ValueError):
    """Malformed input: unreduced rationals, out-of-range fields, bad specs."""


def _parse_turn(text: str) -> Fraction:
    """Parse 'p/q' into a reduced turn in [0, 1); reject anything else."""
    parts = text.strip().split("/")
    if len(parts) != 2:
        raise ValidationError(f"turn must be written 'p/q', got {text!r}")
    try:
        p, q = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValidationError(f"non-integer turn {text!r}") from exc
    if q <= 0:
        raise ValidationError(f"turn denominator must be positive in {text!r}")
    if gcd(abs(p), q) != 1 and p != 0:
        raise ValidationError(f"turn {text!r} is not in lowest terms")
    if p == 0 and q != 1:
        raise ValidationError(f"zero turn must be written '0/1', got {text!r}")
    if not (0 <= p < q or (p == 0 and q == 1)):
        raise ValidationError(f"turn {text!r} outside [0, 1)")
    return Fraction(p, q)


@dataclass(frozen=True, order=True)
class CirclePoint:
    """A point exp(2*pi*i*turn) with turn an exact rational in [0, 1)."""

    turn: Fraction

    def __post_init__(self):
        t = self.turn
        if not isinstance(t, Fraction):
            t = Fraction(t)
            object.__setattr__(self, "turn", t)
        if not (0 <= t < 1):
            raise ValidationError(f"turn {t} outside [0, 1)")

    @classmethod
    def from_string(cls, text: str) -> "CirclePoint":
        return cls(_parse_turn(text))

    @property
    def complex(self) -> complex:
        a = 2.0 * math.pi * float(self.turn)
        return complex(math.cos(a), math.sin(a))

    @property
    def theta(self) -> float:
        return 2.0 * math.pi * float(self.turn)

    def __str__(self):
        return f"{self.turn.numerator}/{self.turn.denominator}"


@dataclass(frozen=True)
class ArcInterval:
    """Open arc of the circle: counterclockwise from `start`, of rational `length`.

    `length` is the normalized measure of the arc; length 1 denotes the full
    circle (complement of a single point or of nothing).
    """

    start: CirclePoint
    length: Fraction

    def __post_init__(self):
        L = self.length
        if not isinstance(L, Fraction):
            L = Fraction(L)
            object.__setattr__(self, "length", L)
        if not (0 < L <= 1):
            raise ValidationError(f"arc length {L} outside (0, 1]")

    @property
    def end_turn(self) -> Fraction:
        return (self.start.turn + self.length) % 1

    @property
    def midpoint(self) -> CirclePoint:
        return CirclePoint((self.start.turn + self.length / 2) % 1)

    def contains_turn(self, turn: Fraction) -> bool:
        """Exact membership of a rational turn in the open arc."""
        rel = (Fraction(turn) - self.start.turn) % 1
        return 0 < rel < self.length

    def __str__(self):
        return f"({self.start}, len {self.length})"


# ---------------------------------------------------------------------------
# Boundary sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundarySet:
    """A finitely represented closed, measure-zero subset of the circle.

    kind is one of:
      * "empty"
      * "points"  -- a finite list of CirclePoints
      * "cantor"  -- endpoints of a depth-d middle-removal construction on a
                     base arc (removal ratio rho in (0,1)); keeping only the
                     endpoints makes every truncation a finite set, so the
                     measure-zero invariant holds at every depth
      * "union"   -- a finite union of the above
    """

    kind: str
    points: tuple = ()
    base: ArcInterval | None = None
    ratio: Fraction | None = None
    depth: int = 0
    members: tuple = ()

    def __post_init__(self):
        if self.kind not in ("empty", "points", "cantor", "union"):
            raise ValidationError(f"unknown boundary-set kind {self.kind!r}")
        if self.kind == "cantor":
            if self.base is None or self.ratio is None:
                raise ValidationError("cantor spec needs a base arc and a ratio")
            if not (0 < self.ratio < 1):
                raise ValidationError(f"removal ratio {self.ratio} outside (0, 1)")
            if not (0 <= self.depth <= MAX_CANTOR_DEPTH):
                raise ValidationError(
                    f"cantor depth {self.depth} outside [0, {MAX_CANTOR_DEPTH}]"
                )

    # -- constructors -------------------------------------------------------

    @staticmethod
    def empty() -> "BoundarySet":
        return BoundarySet("empty")

    @staticmethod
    def from_points(pts: Iterable[CirclePoint | Fraction | str]) -> "BoundarySet":
        norm = []
        for p in pts:
            if isinstance(p, CirclePoint):
                norm.append(p)
            elif isinstance(p, str):
                norm.append(CirclePoint.from_string(p))
            else:
                norm.append(CirclePoint(Fraction(p)))
        return BoundarySet("points", points=tuple(sorted(set(norm))))

    @staticmethod
    def cantor(base: ArcInterval, ratio: Fraction, depth: int) -> "BoundarySet":
        return BoundarySet("cantor", base=base, ratio=Fraction(ratio), depth=depth)

    @staticmethod
    def union(members: Sequence["BoundarySet"]) -> "BoundarySet":
        return BoundarySet("union", members=tuple(members))

    # -- structure ----------------------------------------------------------

    def point_turns(self) -> list[Fraction]:
        """All points of the set as sorted, deduplicated rational turns."""
        if self.kind == "empty":
            return []
        if self.kind == "points":
            return sorted({p.turn for p in self.points})
        if self.kind == "cantor":
            turns = set()
            for a, length in self._cantor_intervals():
                turns.add(a % 1)
                turns.add((a + length) % 1)
            return sorted(turns)
        turns = set()
        for m in self.members:
            turns.update(m.point_turns())
        return sorted(turns)

    def _cantor_intervals(self) -> list[tuple[Fraction, Fraction]]:
        """The 2^depth residual intervals as (start, length), unwrapped."""
        intervals = [(self.base.start.turn, self.base.length)]
        for _ in range(self.depth):
            nxt = []
            for a, length in intervals:
                side = length * (1 - self.ratio) / 2
                nxt.append((a, side))
                nxt.append((a + side + length * self.ratio, side))
            intervals = nxt
        return intervals

    def removed_arcs(self) -> list[ArcInterval]:
        """Middle arcs removed by a cantor construction, level by level.

        For a proper base arc this does not include the arc outside the base.
        Only meaningful for kind == "cantor".
        """
        if self.kind != "cantor":
            raise ValidationError("removed_arcs is defined for cantor sets only")
        intervals = [(self.base.start.turn, self.base.length)]
        removed = []
        for _ in range(self.depth):
            nxt = []
            for a, length in intervals:
                side = length * (1 - self.ratio) / 2
                nxt.append((a, side))
                removed.append(ArcInterval(CirclePoint((a + side) % 1), length * self.ratio))
                nxt.append((a + side + length * self.ratio, side))
            intervals = nxt
        return removed

    def is_empty(self) -> bool:
        return not self.point_turns()

    def __len__(self):
        return len(self.point_turns())


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def complementary_arcs(S: BoundarySet) -> list[ArcInterval]:
    """Maximal open arcs of the complement, ordered by start; lengths sum to 1.

    The empty set yields the single degenerate full-circle arc anchored at
    turn 0.
    """
    turns = S.point_turns()
    if not turns:
        return [ArcInterval(CirclePoint(Fraction(0)), Fraction(1))]
    if len(turns) == 1:
        return [ArcInterval(CirclePoint(turns[0]), Fraction(1))]
    arcs = []
    for i, t in enumerate(turns):
        nxt = turns[(i + 1) % len(turns)]
        length = (nxt - t) % 1
        if length == 0:
            length = Fraction(1)
        arcs.append(ArcInterval(CirclePoint(t), length))
    assert sum(a.length for a in arcs) == 1
    return arcs


def entropy(S: BoundarySet) -> float:
    """Sum of |I| ln(1/|I|) over the complementary arcs of S.

    Arc lengths are exact rationals; only the log is floating point.  The
    value is >= 0 and vanishes exactly when every arc has length 1.
    """
    terms = []
    for arc in complementary_arcs(S):
        ell = float(arc.length)
        if ell < 1.0:
            terms.append(-ell * math.log(ell))
    return math.fsum(terms)


def chordal_distance(p: Union[CirclePoint, complex], S: BoundarySet) -> float:
    """min over s in S of |z_p - z_s|, the chord metric; 0 iff p lies in S."""
    turns = S.point_turns()
    if not turns:
        raise ValidationError("chordal distance to the empty set is undefined")
    if isinstance(p, CirclePoint):
        # 2|sin(pi (p - s))| is exact-rational inside the sine
        return min(2.0 * abs(math.sin(math.pi * float(p.turn - s))) for s in turns)
    z = complex(p)
    pts = np.exp(2j * np.pi * np.array([float(t) for t in turns]))
    return float(np.min(np.abs(z - pts)))


def contains(S: BoundarySet, p: CirclePoint, tol: float = 0.0) -> bool:
    """Whether p lies within chordal distance tol of S; exact when tol == 0."""
    if tol < 0:
        raise ValidationError("tolerance must be nonnegative")
    if tol == 0.0:
        return p.turn in set(S.point_turns())
    return chordal_distance(p, S) <= tol


def rotated(S: BoundarySet, beta: Fraction) -> BoundarySet:
    """The set rotated by beta turns (exact)."""
    beta = Fraction(beta)
    if S.kind == "empty":
        return S
    if S.kind == "points":
        return BoundarySet.from_points([CirclePoint((p.turn + beta) % 1) for p in S.points])
    if S.kind == "cantor":
        base = ArcInterval(CirclePoint((S.base.start.turn + beta) % 1), S.base.length)
        return BoundarySet.cantor(base, S.ratio, S.depth)
    return BoundarySet.union([rotated(m, beta) for m in S.members])


def chordal_distance_grid(thetas: np.ndarray, S: BoundarySet) -> np.ndarray:
    """Vectorized chord distance from angles (radians) to the set."""
    turns = S.point_turns()
    if not turns:
        raise ValidationError("chordal distance to the empty set is undefined")
    z = np.exp(1j * np.asarray(thetas, dtype=float))
    pts = np.exp(2j * np.pi * np.array([float(t) for t in turns]))
    return np.min(np.abs(z[:, None] - pts[None, :]), axis=1)


# ---------------------------------------------------------------------------
# Cantor entropy series
# ---------------------------------------------------------------------------

def removed_arc_entropy_partials(S: BoundarySet) -> list[float]:
    """Partial entropy sums over the removed middle arcs, one per level.

    partials[d] covers all middles removed at levels 1..d+1.  Nondecreasing
    in depth since every term is nonnegative (all arcs are shorter than 1).
    """
    if S.kind != "cantor":
        raise ValidationError("removed-arc entropy is defined for cantor sets only")
    partials = []
    total = 0.0
    length = S.base.length
    for level in range(1, S.depth + 1):
        side = length * (1 - S.ratio) / 2
        mid = length * S.ratio
        count = 2 ** (level - 1)
        ell = float(mid)
        total += -count * ell * math.log(ell)
        partials.append(total)
        length = side
    return partials


def removed_arc_entropy_limit(S: BoundarySet) -> float:
    """Limit of the removed-arc entropy series as depth -> infinity.

    With base length L and removal ratio rho the removed middles at level k
    number 2^(k-1) and have length L*rho*q^(k-1), q = (1-rho)/2.  Summing the
    geometric series gives  L*[ln(1/(L*rho)) + ln(1/q)*(1-rho)/rho].
    """
    if S.kind != "cantor":
        raise ValidationError("removed-arc entropy is defined for cantor sets only")
    L = float(S.base.length)
    rho = float(S.ratio)
    q = (1.0 - rho) / 2.0
    return L * (math.log(1.0 / (L * rho)) + math.log(1.0 / q) * (1.0 - rho) / rho)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def _turn_str(t: Fraction) -> str:
    return f"{t.numerator}/{t.denominator}"


def boundary_set_to_json(S: BoundarySet) -> dict:
    if S.kind == "empty":
        return {"kind": "empty"}
    if S.kind == "points":
        return {"kind": "points", "points": [_turn_str(p.turn) for p in S.points]}
    if S.kind == "cantor":
        return {
            "kind": "cantor",
            "base_start": _turn_str(S.base.start.turn),
            "base_length": _turn_str(S.base.length),
            "ratio": _turn_str(S.ratio),
            "depth": S.depth,
        }
    return {"kind": "union", "members": [boundary_set_to_json(m) for m in S.members]}


def boundary_set_from_json(doc: dict) -> BoundarySet:
    """Parse the JSON boundary-set format with bit-exact rational checks."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError("boundary set document must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "empty":
        return BoundarySet.empty()
    if kind == "points":
        pts = doc.get("points")
        if not isinstance(pts, list):
            raise ValidationError("'points' must be a list of 'p/q' strings")
        return BoundarySet.from_points([CirclePoint(_parse_turn(s)) for s in pts])
    if kind == "cantor":
        try:
            start = _parse_turn(doc["base_start"])
            length = _parse_positive_fraction(doc["base_length"], upper=1)
            ratio = _parse_positive_fraction(doc["ratio"], upper=1, strict_upper=True)
            depth = doc["depth"]
        except KeyError as exc:
            raise ValidationError(f"cantor spec missing field {exc}") from exc
        if not isinstance(depth, int):
            raise ValidationError("cantor depth must be an integer")
        return BoundarySet.cantor(ArcInterval(CirclePoint(start), length), ratio, depth)
    if kind == "union":
        members = doc.get("members")
        if not isinstance(members, list):
            raise ValidationError("'members' must be a list of boundary sets")
        return BoundarySet.union([boundary_set_from_json(m) for m in members])
    raise ValidationError(f"unknown boundary-set kind {kind!r}")


def _parse_positive_fraction(text: str, upper: int, strict_upper: bool = False) -> Fraction:
    parts = str(text).strip().split("/")
    if len(parts) != 2:
        raise ValidationError(f"fraction must be written 'p/q', got {text!r}")
    try:
        p, q = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValidationError(f"non-integer fraction {text!r}") from exc
    if q <= 0 or p <= 0:
        raise ValidationError(f"fraction {text!r} must be positive")
    if gcd(p, q) != 1:
        raise ValidationError(f"fraction {text!r} is not in lowest terms")
    f = Fraction(p, q)
    if strict_upper and not (f < upper):
        raise ValidationError(f"fraction {text!r} must be < {upper}")
    if not strict_upper and not (f <= upper):
        raise ValidationError(f"fraction {text!r} must be <= {upper}")
    return f


def load_boundary_set(path) -> BoundarySet:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON in {path}: {exc}") from exc
    return boundary_set_from_json(doc)
