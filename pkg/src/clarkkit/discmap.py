"""Holomorphic self-maps of the unit disc and their derivatives.

Closed-form kinds (identity, constants, Moebius factors, validated rational
maps) serve as oracles; HerglotzMap realizes a map from a prescribed
nonnegative boundary density w through

    (1 + f(z)) / (1 - f(z)) = H[w](z),   f = (H - 1)/(H + 1),

so f(0) = (mean(w) - 1)/(mean(w) + 1); a unit-mean density pins f(0) = 0.
All kinds evaluate vectorized over arrays of interior points.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .circle import CirclePoint, ValidationError
from .harmonic import (
    GridFunction,
    ZLike,
    analytic_coefficients,
    as_interior,
    _eval_series,
    _eval_series_circle,
    _warn_if_unresolved,
)

__all__ = [
    "DiscMap",
    "IdentityMap",
    "ConstantMap",
    "MoebiusMap",
    "RationalMap",
    "HerglotzMap",
    "rotate_map",
    "map_from_json",
    "map_to_json",
]

SELF_MAP_SAMPLE_LOG2 = 12
SELF_MAP_MARGIN = 1e-12


class DiscMap:
    """Base for holomorphic self-maps f : D -> D."""

    #: radius past which grid-backed evaluators warn; closed forms are exact
    grid_log2: int | None = None
    #: whether the Clark density at alpha = 1 is band-limited by construction
    band_limited_density: bool = False

    def _eval_array(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _deriv_array(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eval(self, z: ZLike) -> complex:
        zz = as_interior(z)
        self._check_resolution(abs(zz))
        return complex(self._eval_array(np.array([zz]))[0])

    def deriv(self, z: ZLike) -> complex:
        zz = as_interior(z)
        self._check_resolution(abs(zz))
        return complex(self._deriv_array(np.array([zz]))[0])

    def eval_many(self, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        if np.max(np.abs(zs)) >= 1.0:
            raise ValidationError("all evaluation points must satisfy |z| < 1")
        self._check_resolution(float(np.max(np.abs(zs))))
        return self._eval_array(zs)

    def _check_resolution(self, radius: float) -> None:
        if self.grid_log2 is not None:
            _warn_if_unresolved(radius, self.grid_log2)

    def boundary_trace(self, r: float, k: int) -> GridFunction:
        """Samples f(r * zeta_j) on a 2^k grid."""
        if not (0.0 < r < 1.0):
            raise ValidationError("boundary trace radius must lie in (0, 1)")
        self._check_resolution(r)
        n = 1 << k
        zs = r * np.exp(2j * np.pi * np.arange(n) / n)
        return GridFunction(k, self._eval_array(zs))

    def eval_circle(self, r: float, k: int) -> np.ndarray:
        """f on the radius-r copy of the 2^k grid (fast path where available)."""
        return self.boundary_trace(r, k).values

    def max_radius(self) -> float:
        """Largest radius the map evaluates without a resolution warning."""
        if self.grid_log2 is None:
            return 1.0 - 2.0 ** -40
        return 1.0 - 2.0 ** (-(self.grid_log2 - 2))


@dataclass(frozen=True)
class IdentityMap(DiscMap):
    def _eval_array(self, z):
        return np.asarray(z, dtype=complex)

    def _deriv_array(self, z):
        return np.ones_like(np.asarray(z, dtype=complex))


@dataclass(frozen=True)
class ConstantMap(DiscMap):
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if abs(v) >= 1.0:
            # unimodular constants break the Herglotz normalization
            raise ValidationError(f"constant map needs |c| < 1, got |c| = {abs(v)}")

    def _eval_array(self, z):
        return np.full(np.shape(z), self.value, dtype=complex)

    def _deriv_array(self, z):
        return np.zeros(np.shape(z), dtype=complex)


@dataclass(frozen=True)
class MoebiusMap(DiscMap):
    """z -> (a - z) / (1 - conj(a) z), the disc automorphism swapping 0 and a."""

    a: complex

    def __post_init__(self):
        v = complex(self.a)
        object.__setattr__(self, "a", v)
        if abs(v) >= 1.0:
            raise ValidationError(f"Moebius parameter needs |a| < 1, got {abs(v)}")

    def _eval_array(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a - z) / (1.0 - np.conj(self.a) * z)

    def _deriv_array(self, z):
        z = np.asarray(z, dtype=complex)
        return (abs(self.a) ** 2 - 1.0) / (1.0 - np.conj(self.a) * z) ** 2


@dataclass(frozen=True)
class RationalMap(DiscMap):
    """p(z)/q(z) with ascending coefficient lists, validated as a self-map.

    Validation samples |f| on |z| = 1 - 2^-12 and rejects maxima above
    1 - 1e-12, and rejects any denominator zero in the closed disc.
    """

    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        num = tuple(complex(c) for c in self.numerator)
        den = tuple(complex(c) for c in self.denominator)
        if not num or not den:
            raise ValidationError("rational map needs nonempty coefficient lists")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)
        if all(abs(c) == 0.0 for c in den):
            raise ValidationError("denominator is identically zero")
        roots = np.polynomial.polynomial.polyroots(np.array(den, dtype=complex))
        if len(roots) and np.min(np.abs(roots)) <= 1.0 + 1e-12:
            raise ValidationError("denominator has a zero in the closed unit disc")
        n = 1 << SELF_MAP_SAMPLE_LOG2
        zs = (1.0 - 2.0 ** -SELF_MAP_SAMPLE_LOG2) * np.exp(2j * np.pi * np.arange(n) / n)
        vals = np.abs(self._eval_array(zs))
        if np.max(vals) > 1.0 - SELF_MAP_MARGIN:
            raise ValidationError(
                f"not a strict self-map: max |f| = {np.max(vals):.15g} on the sample circle"
            )

    def _eval_array(self, z):
        z = np.asarray(z, dtype=complex)
        p = np.polynomial.polynomial.polyval(z, np.array(self.numerator))
        q = np.polynomial.polynomial.polyval(z, np.array(self.denominator))
        return p / q

    def _deriv_array(self, z):
        z = np.asarray(z, dtype=complex)
        pc = np.array(self.numerator)
        qc = np.array(self.denominator)
        p = np.polynomial.polynomial.polyval(z, pc)
        q = np.polynomial.polynomial.polyval(z, qc)
        dp = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(pc))
        dq = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(qc))
        return (dp * q - p * dq) / q ** 2


class HerglotzMap(DiscMap):
    """Map defined by a nonnegative boundary density on a uniform grid.

    f = (H - 1)/(H + 1) where H is the transform of the band-limited
    interpolant of the density; H has positive real part on the disc, so
    H = -1 cannot occur and |f| < 1 throughout.
    """

    band_limited_density = True

    def __init__(self, density: GridFunction):
        vals = density.real_values()
        if np.min(vals) < -1e-12:
            raise ValidationError("Herglotz density must be nonnegative")
        if np.min(vals) < 0.0:
            density = GridFunction(density.log2_size, np.clip(vals, 0.0, None))
        self.density = density
        self.grid_log2 = density.log2_size
        self._coef = analytic_coefficients(density)
        self._dcoef = np.polynomial.polynomial.polyder(self._coef)

    def herglotz_at(self, z) -> np.ndarray:
        return _eval_series(self._coef, z)

    def _eval_array(self, z):
        H = _eval_series(self._coef, np.asarray(z, dtype=complex))
        return (H - 1.0) / (H + 1.0)

    def _deriv_array(self, z):
        z = np.asarray(z, dtype=complex)
        H = _eval_series(self._coef, z)
        dH = _eval_series(self._dcoef, z)
        return 2.0 * dH / (H + 1.0) ** 2

    def eval_circle(self, r: float, k: int) -> np.ndarray:
        """f on the radius-r grid via one inverse FFT over the coefficient band."""
        if not (0.0 < r < 1.0):
            raise ValidationError("radius must lie in (0, 1)")
        self._check_resolution(r)
        k_eval = max(k, self.grid_log2)
        H = _eval_series_circle(self._coef, r, k_eval)
        f = (H - 1.0) / (H + 1.0)
        if k_eval > k:
            f = f[:: 1 << (k_eval - k)]
        return f

    def __repr__(self):
        return f"HerglotzMap(grid=2^{self.grid_log2}, mean={np.mean(self.density.values):.6g})"

    def __eq__(self, other):
        return (
            isinstance(other, HerglotzMap)
            and self.grid_log2 == other.grid_log2
            and np.array_equal(self.density.values, other.density.values)
        )


class RotatedMap(DiscMap):
    """Conjugation g(z) = beta * f(conj(beta) z) for grid-backed maps.

    Keeps the inner evaluator; the Clark density of g at beta*alpha is the
    rotated density of f at alpha, so the band-limited property carries over.
    """

    def __init__(self, inner: DiscMap, beta: CirclePoint):
        self.inner = inner
        self.beta = beta
        self._b = beta.complex
        self.grid_log2 = inner.grid_log2
        self.band_limited_density = inner.band_limited_density

    def _eval_array(self, z):
        return self._b * self.inner._eval_array(np.conj(self._b) * np.asarray(z, dtype=complex))

    def _deriv_array(self, z):
        return self.inner._deriv_array(np.conj(self._b) * np.asarray(z, dtype=complex))

    def eval_circle(self, r: float, k: int) -> np.ndarray:
        shift = Fraction(self.beta.turn) * (1 << k)
        if shift.denominator == 1:
            return self._b * np.roll(self.inner.eval_circle(r, k), int(shift))
        return super().eval_circle(r, k)


def rotate_map(f: DiscMap, beta: CirclePoint) -> DiscMap:
    """Conjugate f by the rotation beta: g(z) = beta * f(conj(beta) z).

    Angular-derivative structure rotates along: g behaves at beta*lambda with
    spectral parameter beta*alpha exactly as f does at lambda with alpha.
    """
    b = beta.complex
    if isinstance(f, IdentityMap):
        return f
    if isinstance(f, ConstantMap):
        return ConstantMap(b * f.value)
    if isinstance(f, MoebiusMap):
        return MoebiusMap(b * f.a)
    if isinstance(f, RationalMap):
        bb = np.conj(b)
        num = tuple(b * c * bb ** i for i, c in enumerate(f.numerator))
        den = tuple(c * bb ** i for i, c in enumerate(f.denominator))
        return RationalMap(num, den)
    return RotatedMap(f, beta)


# ---------------------------------------------------------------------------
# JSON map specifications (complex numbers as [re, im] pairs)
# ---------------------------------------------------------------------------

def _c2j(c: complex):
    return [float(np.real(c)), float(np.imag(c))]


def _j2c(v) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ValidationError(f"complex values are written [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def map_to_json(f: DiscMap, grid_csv: str | None = None) -> dict:
    if isinstance(f, IdentityMap):
        return {"kind": "identity"}
    if isinstance(f, ConstantMap):
        return {"kind": "constant", "value": _c2j(f.value)}
    if isinstance(f, MoebiusMap):
        return {"kind": "moebius", "a": _c2j(f.a)}
    if isinstance(f, RationalMap):
        return {
            "kind": "rational",
            "numerator": [_c2j(c) for c in f.numerator],
            "denominator": [_c2j(c) for c in f.denominator],
        }
    if isinstance(f, HerglotzMap):
        if grid_csv is None:
            raise ValidationError("serializing a HerglotzMap needs a grid_csv path")
        return {"kind": "herglotz", "grid_csv": grid_csv}
    raise ValidationError(f"cannot serialize map of type {type(f).__name__}")


def map_from_json(doc: dict, base_dir: str | None = None) -> DiscMap:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError("map document must be an object with a 'kind'")
    kind = doc["kind"]
    if kind == "identity":
        return IdentityMap()
    if kind == "constant":
        return ConstantMap(_j2c(doc.get("value")))
    if kind == "moebius":
        return MoebiusMap(_j2c(doc.get("a")))
    if kind == "rational":
        num = [_j2c(v) for v in doc.get("numerator", [])]
        den = [_j2c(v) for v in doc.get("denominator", [])]
        return RationalMap(tuple(num), tuple(den))
    if kind == "herglotz":
        path = doc.get("grid_csv")
        if not isinstance(path, str):
            raise ValidationError("herglotz map needs a 'grid_csv' path")
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return HerglotzMap(GridFunction.load_csv(path))
    raise ValidationError(f"unknown map kind {kind!r}")


def load_map(path) -> DiscMap:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON in {path}: {exc}") from exc
    return map_from_json(doc, base_dir=os.path.dirname(os.path.abspath(path)))
