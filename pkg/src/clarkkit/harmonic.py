"""Spectral transforms on uniform circle grids.

A GridFunction samples a boundary function at the N = 2^k roots of unity.
Integrals against the normalized measure dm are plain grid averages
(periodic trapezoid), which are exact for trigonometric polynomials of
degree < N.  The Poisson and Herglotz transforms

    P[w](z) = int (1-|z|^2)/|zeta-z|^2 w(zeta) dm(zeta)
    H[w](z) = int (zeta+z)/(zeta-z) w(zeta) dm(zeta)

are evaluated through the Fourier coefficients of the band-limited
interpolant of w:  H[w](z) = c_0 + 2 * sum_{n>=1} c_n z^n with
c_n = (1/N) sum_j w_j zeta_j^{-n}.  This is the exact transform of the
trigonometric interpolant at every |z| < 1, so there is no quadrature
blow-up near the boundary; what an evaluation close to the boundary cannot
see is structure finer than the grid, and callers are warned about that.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .circle import ValidationError

__all__ = [
    "GridFunction",
    "InteriorPoint",
    "ResolutionWarning",
    "mean",
    "poisson",
    "herglotz",
    "conjugate",
    "outer_function",
    "grid_from_function",
]

NEGATIVE_TOLERANCE = 1e-12  # entries above -this are clamped to zero


class ResolutionWarning(UserWarning):
    """Evaluation requested closer to the boundary than the grid resolves."""


@dataclass(frozen=True)
class GridFunction:
    """Values sampled at the N = 2^log2_size points exp(2*pi*i*j/N)."""

    log2_size: int
    values: np.ndarray

    def __post_init__(self):
        if self.log2_size < 3:
            raise ValidationError("grid must have at least 2^3 nodes")
        n = 1 << self.log2_size
        vals = np.asarray(self.values)
        if vals.shape != (n,):
            raise ValidationError(
                f"expected {n} values for log2_size={self.log2_size}, got shape {vals.shape}"
            )
        if not np.issubdtype(vals.dtype, np.complexfloating):
            vals = vals.astype(float)
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return 1 << self.log2_size

    @property
    def thetas(self) -> np.ndarray:
        n = self.size
        return 2.0 * np.pi * np.arange(n) / n

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(1j * self.thetas)

    @property
    def is_real(self) -> bool:
        return not np.issubdtype(self.values.dtype, np.complexfloating)

    def real_values(self) -> np.ndarray:
        if self.is_real:
            return self.values
        if np.max(np.abs(self.values.imag)) > 1e-12:
            raise ValidationError("grid function has a non-negligible imaginary part")
        return self.values.real

    # -- CSV interchange: node_index,value_real,value_imag -------------------

    def save_csv(self, path) -> None:
        vals = np.asarray(self.values, dtype=complex)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node_index", "value_real", "value_imag"])
            for j, v in enumerate(vals):
                writer.writerow([j, repr(float(v.real)), repr(float(v.imag))])

    @staticmethod
    def load_csv(path) -> "GridFunction":
        with open(path, "r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:3]] != [
                "node_index",
                "value_real",
                "value_imag",
            ]:
                raise ValidationError(f"{path}: expected header node_index,value_real,value_imag")
            rows = list(reader)
        n = len(rows)
        if n < 8 or n & (n - 1):
            raise ValidationError(f"{path}: node count {n} is not a power of two >= 8")
        vals = np.zeros(n, dtype=complex)
        seen = np.zeros(n, dtype=bool)
        for row in rows:
            j = int(row[0])
            if not (0 <= j < n) or seen[j]:
                raise ValidationError(f"{path}: bad or duplicate node index {j}")
            seen[j] = True
            vals[j] = complex(float(row[1]), float(row[2]))
        k = n.bit_length() - 1
        if np.max(np.abs(vals.imag)) == 0.0:
            return GridFunction(k, vals.real)
        return GridFunction(k, vals)


def grid_from_function(fn: Callable[[np.ndarray], np.ndarray], log2_size: int = 12) -> GridFunction:
    """Sample fn(theta) on the uniform grid."""
    n = 1 << log2_size
    theta = 2.0 * np.pi * np.arange(n) / n
    return GridFunction(log2_size, np.asarray(fn(theta)))


@dataclass(frozen=True)
class InteriorPoint:
    """A point of the open disc; construction rejects |value| >= 1."""

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if abs(v) >= 1.0:
            raise ValidationError(f"|z| = {abs(v)} is not < 1")


ZLike = Union[InteriorPoint, complex, float]


def as_interior(z: ZLike) -> complex:
    """Coerce to a complex interior point, validating |z| < 1."""
    if isinstance(z, InteriorPoint):
        return z.value
    v = complex(z)
    if abs(v) >= 1.0:
        raise ValidationError(f"|z| = {abs(v)} is not < 1")
    return v


def resolution_bound(log2_size: int) -> float:
    """Radius beyond which grid-resolution warnings are issued: 1 - 2^-(k-2)."""
    return 1.0 - 2.0 ** (-(log2_size - 2))


def _warn_if_unresolved(radius: float, log2_size: int) -> None:
    if radius > resolution_bound(log2_size) + 1e-15:
        warnings.warn(
            f"evaluation at |z| = {radius:.6g} exceeds the resolution bound "
            f"{resolution_bound(log2_size):.6g} of a 2^{log2_size} grid",
            ResolutionWarning,
            stacklevel=3,
        )


# ---------------------------------------------------------------------------
# Analytic coefficients and transforms
# ---------------------------------------------------------------------------

def analytic_coefficients(w: GridFunction) -> np.ndarray:
    """Taylor coefficients of H[w] at the origin.

    With c_n = (1/N) sum_j w_j zeta_j^{-n} (the rfft bins), the kernel
    expansion (zeta+z)/(zeta-z) = 1 + 2 sum_{n>=1} z^n zeta^{-n} gives
    coef[0] = mean(w), coef[n] = 2 c_n, except that the Nyquist mode
    represents cos(N theta / 2) and enters with weight 1, not 2.
    """
    vals = w.real_values()
    c = np.fft.rfft(vals) / w.size
    coef = np.empty(len(c), dtype=complex)
    coef[0] = c[0]
    coef[1:-1] = 2.0 * c[1:-1]
    coef[-1] = c[-1]
    return coef


def _eval_series(coef: np.ndarray, z) -> np.ndarray:
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.polynomial.polynomial.polyval(zs, coef)
    return out


def _eval_series_circle(coef: np.ndarray, radius: float, log2_out: int) -> np.ndarray:
    """Values of the series on the full grid radius*exp(2*pi*i*j/N), via FFT."""
    n_out = 1 << log2_out
    full = np.zeros(n_out, dtype=complex)
    m = min(len(coef), n_out)
    full[:m] = coef[:m] * radius ** np.arange(m)
    if len(coef) > n_out:
        raise ValidationError("output grid too coarse for the coefficient band")
    return np.fft.ifft(full) * n_out


def mean(w: GridFunction):
    """Grid average; exact integral for trig polynomials of degree < N."""
    m = np.mean(w.values)
    return complex(m) if not w.is_real else float(m.real if np.iscomplexobj(m) else m)


def _herglotz_raw(w: GridFunction, z: complex) -> complex:
    coef = analytic_coefficients(w)
    return complex(_eval_series(coef, z)[0])


def poisson(w: GridFunction, z: ZLike) -> float:
    """Harmonic extension of a real grid function at an interior point."""
    zz = as_interior(z)
    _warn_if_unresolved(abs(zz), w.log2_size)
    return float(_herglotz_raw(w, zz).real)


def _validate_nonnegative(w: GridFunction) -> GridFunction:
    vals = w.real_values()
    if np.min(vals) < -NEGATIVE_TOLERANCE:
        raise ValidationError(
            f"density has negative entries (min {np.min(vals):.3e}); "
            "only values above -1e-12 are tolerated"
        )
    if np.min(vals) < 0.0:
        return GridFunction(w.log2_size, np.clip(vals, 0.0, None))
    return w


def herglotz(w: GridFunction, z: ZLike) -> complex:
    """H[w](z) for a nonnegative density w; Re H = P[w] >= 0, H(0) = mean(w)."""
    w = _validate_nonnegative(w)
    zz = as_interior(z)
    _warn_if_unresolved(abs(zz), w.log2_size)
    return _herglotz_raw(w, zz)


def conjugate(u: GridFunction) -> GridFunction:
    """Harmonic conjugate on the grid, normalized to vanish at the origin.

    Fourier multiplier -i*sgn(n); the Nyquist mode is dropped since its
    conjugate samples to zero on the grid.  conjugate(cos k.) = sin k. and
    conjugate(const) = 0 exactly for aliasing-free inputs.
    """
    vals = u.real_values()
    spec = np.fft.rfft(vals)
    spec *= -1j
    spec[0] = 0.0
    spec[-1] = 0.0  # even N always: Nyquist conjugate vanishes at the nodes
    return GridFunction(u.log2_size, np.fft.irfft(spec, n=u.size))


def outer_function(
    modulus: GridFunction, floor: float = 1e-14
) -> tuple[GridFunction, Callable[[ZLike], complex]]:
    """Zero-free analytic function with prescribed boundary modulus.

    Returns the boundary trace exp(u + i*conj(u)), u = ln(max(modulus, floor)),
    and an evaluator z -> exp(H[u](z)).  The evaluator is positive at the
    origin: F(0) = exp(mean(u)).
    """
    vals = modulus.real_values()
    if np.min(vals) < 0.0:
        raise ValidationError("modulus must be nonnegative")
    if floor < 0.0:
        raise ValidationError("floor must be >= 0")
    if floor == 0.0 and np.min(vals) == 0.0:
        raise ValidationError("not log-integrable at this resolution: zero modulus with zero floor")
    clamped = np.maximum(vals, floor)
    u = GridFunction(modulus.log2_size, np.log(clamped))
    ut = conjugate(u)
    boundary = GridFunction(
        modulus.log2_size, np.exp(u.values) * np.exp(1j * ut.values)
    )
    coef = analytic_coefficients(u)
    k = modulus.log2_size

    def evaluator(z: ZLike) -> complex:
        zz = as_interior(z)
        _warn_if_unresolved(abs(zz), k)
        return complex(np.exp(_eval_series(coef, zz)[0]))

    return boundary, evaluator


# ---------------------------------------------------------------------------
# Band-limited interpolation on refined sub-grids
# ---------------------------------------------------------------------------

UPSAMPLE_FACTOR = 16
STENCIL = np.arange(-2, 4)  # 6-point local Lagrange on the oversampled grid


def fft_upsample(values: np.ndarray, factor: int) -> np.ndarray:
    """Resample a real periodic grid onto a factor-times finer grid.

    Zero-padding the spectrum reproduces the trigonometric interpolant
    exactly at the fine nodes (the Nyquist mode is split symmetrically).
    """
    n = len(values)
    spec = np.fft.rfft(np.asarray(values, dtype=float))
    spec[-1] *= 0.5
    fine = np.zeros(n * factor // 2 + 1, dtype=complex)
    fine[: len(spec)] = spec
    return np.fft.irfft(fine, n=n * factor) * factor


class BandlimitedInterpolant:
    """Evaluate the trigonometric interpolant of a real grid at arbitrary angles.

    The grid is FFT-upsampled UPSAMPLE_FACTOR times (exact), then queried with
    a 6-point local Lagrange stencil; for band-limited data the combined error
    is far below 1e-10 relative.
    """

    def __init__(self, values: np.ndarray, factor: int = UPSAMPLE_FACTOR):
        self.coarse_n = len(values)
        self.fine = fft_upsample(values, factor)
        self.n_fine = len(self.fine)

    def __call__(self, thetas: np.ndarray) -> np.ndarray:
        x = (np.asarray(thetas, dtype=float) / (2.0 * np.pi)) % 1.0 * self.n_fine
        i0 = np.floor(x).astype(np.int64)
        t = x - i0
        weights = np.ones((len(x), len(STENCIL)))
        for a, na in enumerate(STENCIL):
            for nb in STENCIL:
                if nb != na:
                    weights[:, a] *= (t - nb) / (na - nb)
        idx = (i0[:, None] + STENCIL[None, :]) % self.n_fine
        return np.einsum("ij,ij->i", weights, self.fine[idx])


def gauss_legendre_panels(a: float, b: float, n_panels: int, n_nodes: int):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    edges = np.linspace(a, b, n_panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    nodes = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
    weights = (halves[:, None] * w[None, :]).ravel()
    return nodes, weights
