"""Angular-derivative detection.

Existence of an angular derivative at a boundary point lambda is decided by
summability of the Clark-measure criterion integral

    int w(zeta) / |zeta - lambda|^2 dm(zeta),

with w the boundary density of mu_alpha on an arc where the measure is
absolutely continuous.  No finite computation proves divergence, so the
classifier returns an honest three-way verdict backed by auditable
evidence: dyadic annulus sums around lambda, their decay ratios, and an
independent radial Julia-quotient probe (1 - |f(r lambda)|)/(1 - r).

Policy.  The integral splits into a far region |zeta - lambda| >= 1/2 and
dyadic annuli 2^-j-1 <= |zeta - lambda| < 2^-j, each integrated by
Gauss-Legendre panels against the band-limited interpolant of w.  Annulus
sums below the interpolation noise floor (estimated by re-running the
deepest annuli against a half-resolution interpolant) carry no evidence.
Divergence requires four consecutive well-resolved ratios >= 1 - 1e-3 or a
partial sum past abs_cap; finiteness requires the informative tail to decay
at geometric-mean rate <= ratio_threshold, and carries the geometric tail
extrapolation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circle import CirclePoint, ValidationError
from .clark import DEFAULT_PROXY_RADIUS, ClarkDensity, clark_density
from .discmap import DiscMap, HerglotzMap
from .harmonic import BandlimitedInterpolant, GridFunction, gauss_legendre_panels
from .util import neville_to_zero, ordered_parallel_map

__all__ = [
    "RefinementControl",
    "Verdict",
    "SingularIntegralResult",
    "JuliaReport",
    "DerivativeReport",
    "singular_integral",
    "julia_quotient",
    "detect",
    "detect_many",
    "reports_to_csv",
]

FINITE = "finite"
DIVERGENT = "divergent"
UNDETERMINED = "undetermined"

DIVERGENCE_RATIO = 1.0 - 1e-3   # per-ratio growth floor for a divergence call
DIVERGENCE_WINDOW = 4           # consecutive ratios required
FINITE_WINDOW = 4               # terms entering the geometric-mean decay test
NOISE_EVIDENCE_MULT = 4.0       # ratios count only this far above the noise floor
GL_NODES = 24
FAR_PANELS = 8


@dataclass(frozen=True)
class RefinementControl:
    """Convergence-classification policy knobs."""

    max_depth: int = 14
    base_grid_log2: int = 12
    ratio_threshold: float = 0.75
    abs_cap: float = 1e8

    def __post_init__(self):
        if self.max_depth < 4:
            raise ValidationError("max_depth must be at least 4")
        if not (0.0 < self.ratio_threshold < 1.0):
            raise ValidationError("ratio_threshold must lie in (0, 1)")
        if self.abs_cap <= 0.0:
            raise ValidationError("abs_cap must be positive")
        if self.base_grid_log2 < 3:
            raise ValidationError("base_grid_log2 must be at least 3")


@dataclass(frozen=True)
class Verdict:
    kind: str
    value: float | None = None

    @staticmethod
    def finite(value: float) -> "Verdict":
        return Verdict(FINITE, float(value))

    @staticmethod
    def divergent() -> "Verdict":
        return Verdict(DIVERGENT)

    @staticmethod
    def undetermined() -> "Verdict":
        return Verdict(UNDETERMINED)

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def is_divergent(self) -> bool:
        return self.kind == DIVERGENT


@dataclass(frozen=True)
class SingularIntegralResult:
    verdict: Verdict
    far: float
    terms: tuple
    noise: tuple
    partials: tuple
    interp_error: float
    notes: str = ""


_PANEL_CACHE: dict = {}


def _annulus_panels(max_depth: int):
    """Gauss-Legendre offsets per dyadic annulus in the angle variable.

    Chordal distance s and angular offset are linked by s = 2 sin(dtheta/2),
    so annulus j covers dtheta in [2 asin(2^-j-2), 2 asin(2^-j-1)).
    """
    key = max_depth
    if key not in _PANEL_CACHE:
        far = gauss_legendre_panels(
            2.0 * math.asin(0.25), 2.0 * math.pi - 2.0 * math.asin(0.25), FAR_PANELS, GL_NODES
        )
        ann = []
        for j in range(1, max_depth + 1):
            lo = 2.0 * math.asin(2.0 ** (-j - 2))
            hi = 2.0 * math.asin(2.0 ** (-j - 1))
            ann.append(gauss_legendre_panels(lo, hi, 1, GL_NODES))
        _PANEL_CACHE[key] = (far, ann)
    return _PANEL_CACHE[key]


class _WeightInterp:
    """Full- and half-resolution interpolants of the weight grid."""

    def __init__(self, w: GridFunction):
        vals = w.real_values()
        if np.min(vals) < -1e-12:
            raise ValidationError("criterion weight must be nonnegative on the grid")
        vals = np.clip(vals, 0.0, None)
        self.full = BandlimitedInterpolant(vals)
        self.half = BandlimitedInterpolant(vals[::2])


def _integral_pieces(interp: _WeightInterp, lam_theta: float, max_depth: int):
    far_nodes, far_w = _annulus_panels(max_depth)[0]
    thetas = lam_theta + far_nodes
    vals = np.clip(interp.full(thetas), 0.0, None)
    kern = far_w / (2.0 - 2.0 * np.cos(far_nodes))
    far = float(np.sum(vals * kern) / (2.0 * np.pi))
    terms, noise = [], []
    worst_interp = 0.0
    for j in range(max_depth):
        xs, ws = _annulus_panels(max_depth)[1][j]
        kern = ws / (2.0 - 2.0 * np.cos(xs))
        t = nz = 0.0
        for sgn in (1.0, -1.0):
            th = lam_theta + sgn * xs
            vf = interp.full(th)
            vc = interp.half(th)
            worst_interp = max(worst_interp, float(np.max(np.abs(vf - vc))))
            t += float(np.sum(np.clip(vf, 0.0, None) * kern) / (2.0 * np.pi))
            nz += float(np.sum(np.abs(vf - vc) * kern) / (2.0 * np.pi))
        terms.append(t)
        noise.append(nz)
    return far, np.array(terms), np.array(noise), worst_interp


def _classify(far, terms, noise, ctrl: RefinementControl) -> tuple[Verdict, str]:
    partials = far + np.cumsum(terms)
    if np.any(partials > ctrl.abs_cap):
        return Verdict.divergent(), "partial sums exceeded abs_cap"
    tiny = 1e-13 * max(abs(float(partials[-1])), 1.0)
    strong = terms > NOISE_EVIDENCE_MULT * noise + tiny
    ratios = np.divide(
        terms[1:], terms[:-1], out=np.full(len(terms) - 1, np.inf), where=terms[:-1] > 0
    )
    consec = 0
    for i in range(len(ratios)):
        if strong[i] and strong[i + 1] and ratios[i] >= DIVERGENCE_RATIO:
            consec += 1
            if consec >= DIVERGENCE_WINDOW:
                return Verdict.divergent(), (
                    f"annulus sums non-decaying across {DIVERGENCE_WINDOW} well-resolved depths"
                )
        else:
            consec = 0
    informative = terms > noise + tiny
    runs = _runs(informative)
    if not runs:
        # nothing above the noise floor: the near region contributes ~ nothing
        return Verdict.finite(float(far + np.sum(terms))), "near-region terms below resolution"
    start, end = max(runs, key=lambda se: (se[1] - se[0], se[1]))
    run = terms[start : end + 1]
    if len(run) >= FINITE_WINDOW + 1:
        w4 = run[-(FINITE_WINDOW):]
        if w4[0] > 0 and w4[-1] > 0:
            gmean = (w4[-1] / w4[0]) ** (1.0 / (FINITE_WINDOW - 1))
            last_ratio = run[-1] / run[-2] if run[-2] > 0 else np.inf
            if gmean <= ctrl.ratio_threshold and last_ratio <= 1.0:
                rho = min(max(gmean, 1e-6), 0.95)
                tail = run[-1] * rho / (1.0 - rho)
                value = float(far + np.sum(terms[: end + 1]) + tail)
                note = ""
                if end + 1 < len(terms):
                    note = f"depths beyond {end + 1} below interpolation resolution"
                return Verdict.finite(value), note
    return Verdict.undetermined(), "tail neither conclusively decaying nor growing"


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    runs, start = [], None
    for i, m in enumerate(mask):
        if m and start is None:
            start = i
        elif not m and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def singular_integral(
    w: GridFunction, lam: CirclePoint, ctrl: RefinementControl | None = None
) -> SingularIntegralResult:
    """Classify int w/|zeta - lambda|^2 dm as finite/divergent/undetermined.

    Finite verdicts carry the far+annuli value with the geometric tail
    extrapolated past max_depth.  lambda never needs to sit on the grid;
    the weight is interpolated onto the refined annuli.
    """
    ctrl = ctrl or RefinementControl()
    interp = _WeightInterp(w)
    far, terms, noise, worst = _integral_pieces(interp, lam.theta, ctrl.max_depth)
    verdict, notes = _classify(far, terms, noise, ctrl)
    partials = tuple(float(p) for p in (far + np.cumsum(terms)))
    return SingularIntegralResult(
        verdict=verdict,
        far=far,
        terms=tuple(float(t) for t in terms),
        noise=tuple(float(v) for v in noise),
        partials=partials,
        interp_error=worst,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Julia quotient probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JuliaReport:
    sequence: tuple            # ((r, quotient), ...)
    verdict: Verdict
    limit: float | None
    notes: str = ""


def default_radii(f: DiscMap, j_min: int = 4, j_max: int = 12) -> list[float]:
    """Dyadic ladder 1 - 2^-j, capped at the map's resolution bound."""
    top = f.max_radius()
    js = [j for j in range(j_min, j_max + 1) if 1.0 - 2.0 ** -j <= top + 1e-15]
    return [1.0 - 2.0 ** -j for j in js]


def julia_quotient(
    f: DiscMap, lam: CirclePoint, radii: Sequence[float] | None = None, abs_cap: float = 1e8
) -> JuliaReport:
    """Radial probe (1 - |f(r lambda)|)/(1 - r) along an increasing ladder.

    A Cauchy tail yields an extrapolated limit (finite angular derivative
    has this as its modulus); growth like 1/(1 - r) or past abs_cap is
    marked divergent.  Radial-only, a cross-check rather than a criterion.
    """
    if radii is None:
        radii = default_radii(f)
    rs = [float(r) for r in radii]
    if any(not (0.0 < r < 1.0) for r in rs) or any(
        rs[i + 1] <= rs[i] for i in range(len(rs) - 1)
    ):
        raise ValidationError("radii must increase strictly inside (0, 1)")
    lam_c = lam.complex
    zs = np.array([r * lam_c for r in rs])
    fv = f._eval_array(zs)
    qs = (1.0 - np.abs(fv)) / (1.0 - np.array(rs))
    seq = tuple((r, float(q)) for r, q in zip(rs, qs))
    if qs[-1] >= abs_cap:
        return JuliaReport(seq, Verdict.divergent(), None, "quotient exceeded abs_cap")
    if len(qs) >= 4:
        growth = qs[1:] / np.maximum(qs[:-1], 1e-300)
        if np.all(growth[-3:] >= 1.8):
            return JuliaReport(
                seq, Verdict.divergent(), None, "quotient grows like 1/(1-r)"
            )
        hs = [1.0 - r for r in rs[-4:]]
        limit = float(neville_to_zero(hs, list(qs[-4:])))
        diffs = np.abs(np.diff(qs[-4:]))
        settled = diffs[-1] <= max(0.05 * abs(qs[-1]), 1e-9) and (
            diffs[-1] <= diffs[0] + 1e-12
        )
        if settled:
            return JuliaReport(seq, Verdict.finite(limit), limit)
    return JuliaReport(seq, Verdict.undetermined(), None, "ladder tail not Cauchy")


# ---------------------------------------------------------------------------
# Combined detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeReport:
    lam: CirclePoint
    verdict: Verdict
    criterion: SingularIntegralResult
    julia: JuliaReport
    alpha: CirclePoint
    notes: str = ""

    @property
    def criterion_partials(self) -> tuple:
        return self.criterion.partials

    @property
    def julia_sequence(self) -> tuple:
        return self.julia.sequence

    def to_dict(self) -> dict:
        return {
            "lambda_turn": str(self.lam),
            "alpha_turn": str(self.alpha),
            "verdict": self.verdict.kind,
            "value": self.verdict.value,
            "julia_limit": self.julia.limit,
            "criterion_verdict": self.criterion.verdict.kind,
            "julia_verdict": self.julia.verdict.kind,
            "criterion_partials": list(self.criterion.partials),
            "annulus_terms": list(self.criterion.terms),
            "interp_error": self.criterion.interp_error,
            "julia_sequence": [[r, q] for r, q in self.julia.sequence],
            "notes": self.notes,
        }


def _combine(crit: Verdict, jul: Verdict) -> tuple[Verdict, str]:
    if crit.is_finite and jul.is_finite:
        return Verdict.finite(crit.value), ""
    if crit.is_divergent and jul.is_finite:
        return Verdict.undetermined(), "criteria conflict: criterion divergent, Julia finite"
    if jul.is_divergent and crit.is_finite:
        return Verdict.undetermined(), "criteria conflict: criterion finite, Julia divergent"
    if crit.is_divergent or jul.is_divergent:
        return Verdict.divergent(), ""
    return Verdict.undetermined(), "both probes inconclusive"


def detect(
    f: DiscMap,
    lam: CirclePoint,
    alpha: CirclePoint | None = None,
    ctrl: RefinementControl | None = None,
    density: ClarkDensity | None = None,
) -> DerivativeReport:
    """Two-probe angular-derivative detection at lambda.

    Runs the summability criterion on the boundary Clark density for alpha
    (assumed absolutely continuous near lambda; maps built from a boundary
    density satisfy this for alpha = 1 by construction) and the radial
    Julia probe on f itself.  Finite only when both agree; a conclusive
    disagreement is surfaced as undetermined with a conflict note, never
    silently resolved.
    """
    ctrl = ctrl or RefinementControl()
    alpha = alpha or CirclePoint(0)
    if density is None:
        density = _detection_density(f, alpha, ctrl)
    crit = singular_integral(density.density, lam, ctrl)
    jul = julia_quotient(f, lam, abs_cap=ctrl.abs_cap)
    verdict, conflict = _combine(crit.verdict, jul.verdict)
    return DerivativeReport(lam, verdict, crit, jul, alpha, conflict)


def _detection_density(f: DiscMap, alpha: CirclePoint, ctrl: RefinementControl) -> ClarkDensity:
    k = ctrl.base_grid_log2
    r = min(DEFAULT_PROXY_RADIUS, f.max_radius())
    return clark_density(f, alpha, r=r, k=k)


def detect_many(
    f: DiscMap,
    lambdas: Sequence[CirclePoint],
    alpha: CirclePoint | None = None,
    ctrl: RefinementControl | None = None,
) -> list[DerivativeReport]:
    """detect() over many candidate points, sharing one density computation."""
    ctrl = ctrl or RefinementControl()
    alpha = alpha or CirclePoint(0)
    density = _detection_density(f, alpha, ctrl)
    return ordered_parallel_map(
        lambda lam: detect(f, lam, alpha, ctrl, density=density), lambdas
    )


def reports_to_csv(reports: Sequence[DerivativeReport]) -> str:
    """Summary table: lambda_turn, verdict, value, julia_limit."""
    lines = ["lambda_turn,verdict,value,julia_limit"]
    for rep in reports:
        value = "" if rep.verdict.value is None else repr(rep.verdict.value)
        jl = "" if rep.julia.limit is None else repr(rep.julia.limit)
        lines.append(f"{rep.lam},{rep.verdict.kind},{value},{jl}")
    return "\n".join(lines) + "\n"
