"""Transforms on circle grids, checked against raw-kernel quadrature oracles."""

import math

import numpy as np
import pytest

from clarkkit import (
    GridFunction,
    InteriorPoint,
    ResolutionWarning,
    ValidationError,
    conjugate,
    grid_from_function,
    herglotz,
    mean,
    outer_function,
    poisson,
)
from clarkkit.harmonic import BandlimitedInterpolant, analytic_coefficients, fft_upsample

RNG = np.random.default_rng(7)


def raw_herglotz(w: GridFunction, z: complex, k_oracle: int = 16) -> complex:
    """Independent oracle: plain trapezoid sum of the raw kernel on a 2^16 grid.

    The test densities are low-degree trig polynomials, so resampling them
    on the finer grid is exact and the quadrature error is ~ |z|^N.
    """
    n = 1 << k_oracle
    theta = 2 * np.pi * np.arange(n) / n
    zeta = np.exp(1j * theta)
    fine = fft_upsample(w.real_values(), n // w.size)
    return complex(np.mean((zeta + z) / (zeta - z) * fine))


class TestMean:
    def test_constant(self):
        w = grid_from_function(lambda t: np.full_like(t, 2.5), 10)
        assert mean(w) == 2.5

    def test_cosine_integrates_to_zero(self):
        w = grid_from_function(np.cos, 3)
        assert mean(w) == pytest.approx(0.0, abs=1e-16)

    def test_one_minus_cos(self, one_minus_cos):
        assert mean(one_minus_cos) == pytest.approx(1.0, abs=1e-15)

    def test_exact_for_random_trig_polys(self):
        # trapezoid on the periodic grid integrates degree < N exactly
        k = 8
        n = 1 << k
        theta = 2 * np.pi * np.arange(n) / n
        for _ in range(10):
            degs = RNG.integers(1, n // 2, size=5)
            coefs = RNG.normal(size=5)
            vals = sum(c * np.cos(d * theta) for c, d in zip(coefs, degs))
            w = GridFunction(k, 3.0 + vals)
            assert mean(w) == pytest.approx(3.0, abs=1e-13)


class TestPoisson:
    def test_unit_mass(self):
        w = grid_from_function(lambda t: np.ones_like(t), 10)
        for z in (0.0, 0.5, 0.3 + 0.4j, -0.7j):
            assert poisson(w, z) == pytest.approx(1.0, abs=1e-12)

    def test_harmonicity_of_re(self):
        w = grid_from_function(np.cos, 10)   # Re zeta on the boundary
        assert poisson(w, 0.5) == pytest.approx(0.5, abs=1e-12)
        assert poisson(w, 0.2 - 0.3j) == pytest.approx(0.2, abs=1e-12)

    def test_mean_value_at_origin(self, one_minus_cos):
        assert poisson(one_minus_cos, 0.0) == pytest.approx(1.0, abs=1e-14)

    def test_rejects_exterior_point(self, one_minus_cos):
        with pytest.raises(ValidationError):
            poisson(one_minus_cos, 1.0)
        with pytest.raises(ValidationError):
            InteriorPoint(1.2)


class TestHerglotz:
    def test_constant_density(self):
        w = grid_from_function(lambda t: np.ones_like(t), 10)
        for z in (0.5, 0.3 + 0.4j, -0.9):
            assert herglotz(w, z) == pytest.approx(1.0 + 0j, abs=1e-12)

    def test_one_minus_cos_oracle(self, one_minus_cos):
        # Fourier expansion of the kernel against 1 - cos(theta) gives 1 - z;
        # cross-checked against the raw quadrature oracle.
        for z in (0.5, 0.25 + 0.5j, -0.8):
            got = herglotz(one_minus_cos, z)
            assert got == pytest.approx(1 - z, abs=1e-12)
            assert got == pytest.approx(raw_herglotz(one_minus_cos, z), abs=1e-10)
        assert herglotz(one_minus_cos, 0.5) == pytest.approx(0.5 + 0j, abs=1e-13)

    def test_one_minus_cos2_oracle(self):
        w = grid_from_function(lambda t: 1 - np.cos(2 * t), 12)
        for z in (0.5, 0.6j):
            got = herglotz(w, z)
            assert got == pytest.approx(1 - z * z, abs=1e-12)
            assert got == pytest.approx(raw_herglotz(w, z), abs=1e-10)
        assert herglotz(w, 0.5) == pytest.approx(0.75 + 0j, abs=1e-13)

    def test_value_at_origin_is_mean_exactly(self):
        w = grid_from_function(lambda t: 1.6 + np.cos(3 * t) - 0.5 * np.cos(t), 10)
        assert herglotz(w, 0.0) == complex(mean(w))

    def test_re_equals_poisson(self, one_minus_cos):
        for z in (0.5, 0.77j, -0.2 + 0.6j):
            assert herglotz(one_minus_cos, z).real == pytest.approx(
                poisson(one_minus_cos, z), abs=1e-12
            )

    def test_linearity(self, one_minus_cos):
        w2 = grid_from_function(lambda t: 1 - np.cos(2 * t), 12)
        z = 0.4 + 0.3j
        a, b = 0.7, 2.5
        combo = GridFunction(12, a * one_minus_cos.values + b * w2.values)
        assert herglotz(combo, z) == pytest.approx(
            a * herglotz(one_minus_cos, z) + b * herglotz(w2, z), abs=1e-13
        )

    def test_rejects_negative_density(self):
        w = grid_from_function(np.cos, 8)
        with pytest.raises(ValidationError):
            herglotz(w, 0.1)

    def test_clamps_tiny_negatives(self):
        vals = np.full(256, 1.0)
        vals[3] = -5e-13
        assert herglotz(GridFunction(8, vals), 0.2).real > 0

    def test_resolution_warning_near_boundary(self, one_minus_cos):
        with pytest.warns(ResolutionWarning):
            herglotz(one_minus_cos, 1 - 2.0 ** -11)


class TestConjugate:
    def test_constant_to_zero(self):
        u = grid_from_function(lambda t: np.full_like(t, 5.0), 8)
        assert np.max(np.abs(conjugate(u).values)) == 0.0

    def test_cos_to_sin(self):
        u = grid_from_function(np.cos, 8)
        expected = grid_from_function(np.sin, 8)
        assert np.max(np.abs(conjugate(u).values - expected.values)) < 1e-14

    def test_linearity_on_harmonics(self):
        u = grid_from_function(lambda t: np.cos(3 * t) + 2 * np.cos(t), 10)
        expected = grid_from_function(lambda t: np.sin(3 * t) + 2 * np.sin(t), 10)
        assert np.max(np.abs(conjugate(u).values - expected.values)) < 1e-13


class TestOuterFunction:
    def test_constant_modulus(self):
        m = grid_from_function(lambda t: np.full_like(t, 2.0), 10)
        boundary, ev = outer_function(m)
        assert np.max(np.abs(boundary.values - 2.0)) < 1e-13
        assert ev(0.0) == pytest.approx(2.0, abs=1e-13)
        assert ev(0.3 + 0.2j) == pytest.approx(2.0, abs=1e-12)

    def test_distance_modulus_gives_one_minus_z(self):
        # |e^{i theta} - 1| is the boundary modulus of 1 - z (outer, F(0)=1>0).
        # The modulus vanishes at node 0, which the floor clamps; that biases
        # interior values by ~|ln floor|/N, so the comparison is loose while
        # the boundary round trip is exact.
        m = grid_from_function(lambda t: np.abs(np.exp(1j * t) - 1.0), 12)
        boundary, ev = outer_function(m)
        for z in (0.0, 0.5, -0.4 + 0.3j, 0.6j):
            assert ev(z) == pytest.approx(1 - z, abs=2e-2)
        assert ev(0.0).real > 0
        assert abs(ev(0.0).imag) < 1e-14
        # boundary modulus round-trips exactly where above the floor
        assert np.max(np.abs(np.abs(boundary.values) - np.maximum(m.values, 1e-14))) < 1e-12
        # zero-freeness of the evaluator inside the disc
        samples = [ev(0.9 * np.exp(2j * np.pi * i / 32)) for i in range(32)]
        assert min(abs(s) for s in samples) > 0.05

    def test_scaled_distance_modulus(self):
        m = grid_from_function(lambda t: np.abs(np.exp(1j * t) - 1.0) / math.sqrt(2), 12)
        _, ev = outer_function(m)
        assert ev(0.5) == pytest.approx((1 - 0.5) / math.sqrt(2), abs=2e-2)

    def test_smooth_modulus_round_trip(self):
        m = grid_from_function(lambda t: 2.0 + np.cos(t) + 0.3 * np.sin(4 * t), 12)
        boundary, _ = outer_function(m)
        assert np.max(np.abs(np.abs(boundary.values) - m.values)) < 1e-8

    def test_origin_value_positive(self):
        m = grid_from_function(lambda t: 1.0 + 0.5 * np.cos(5 * t), 10)
        _, ev = outer_function(m)
        F0 = ev(0.0)
        assert abs(F0.imag) < 1e-14
        assert F0.real == pytest.approx(math.exp(mean(
            grid_from_function(lambda t: np.log(1.0 + 0.5 * np.cos(5 * t)), 10))), rel=1e-12)
        assert F0.real > 0

    def test_zero_freeness_radial_net_and_winding(self):
        m = grid_from_function(lambda t: 1.5 + np.cos(2 * t), 12)
        _, ev = outer_function(m)
        for j in range(1, 9):
            r = 1 - 2.0 ** -j
            samples = [ev(r * np.exp(2j * np.pi * i / 64)) for i in range(64)]
            assert min(abs(s) for s in samples) > 0
        # winding of F along |z| = 1/2 vanishes (argument principle)
        circle = 0.5 * np.exp(2j * np.pi * np.arange(512) / 512)
        vals = np.array([ev(z) for z in circle])
        winding = np.sum(np.diff(np.angle(np.append(vals, vals[0])))) / (2 * np.pi)
        # wrap-corrected total turn
        args = np.unwrap(np.angle(np.append(vals, vals[0])))
        assert abs((args[-1] - args[0]) / (2 * np.pi)) < 1e-9

    def test_zero_modulus_with_zero_floor_rejected(self):
        vals = np.abs(np.sin(np.pi * np.arange(256) / 128))
        with pytest.raises(ValidationError):
            outer_function(GridFunction(8, vals), floor=0.0)

    def test_rejects_negative_modulus(self):
        with pytest.raises(ValidationError):
            outer_function(grid_from_function(np.cos, 8))


class TestGridFunction:
    def test_size_validation(self):
        with pytest.raises(ValidationError):
            GridFunction(4, np.ones(15))
        with pytest.raises(ValidationError):
            GridFunction(2, np.ones(4))

    def test_csv_round_trip(self, tmp_path):
        w = grid_from_function(lambda t: np.exp(1j * t) * (2 + np.cos(t)), 8)
        path = tmp_path / "grid.csv"
        w.save_csv(path)
        back = GridFunction.load_csv(path)
        assert back.log2_size == 8
        assert np.max(np.abs(back.values - w.values)) == 0.0

    def test_csv_requires_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1.0,0.0\n1,1.0,0.0\n")
        with pytest.raises(ValidationError):
            GridFunction.load_csv(path)

    def test_immutable_values(self, one_minus_cos):
        with pytest.raises(ValueError):
            one_minus_cos.values[0] = 7.0


class TestBandlimitedInterpolant:
    def test_reproduces_trig_polynomial(self):
        k = 10
        n = 1 << k
        theta = 2 * np.pi * np.arange(n) / n
        vals = 1.0 + np.cos(5 * theta) - 0.25 * np.sin(17 * theta)
        interp = BandlimitedInterpolant(vals)
        probes = RNG.uniform(0, 2 * np.pi, 200)
        expected = 1.0 + np.cos(5 * probes) - 0.25 * np.sin(17 * probes)
        assert np.max(np.abs(interp(probes) - expected)) < 1e-11

    def test_hits_nodes(self):
        vals = RNG.normal(size=64)
        interp = BandlimitedInterpolant(vals)
        theta = 2 * np.pi * np.arange(64) / 64
        assert np.max(np.abs(interp(theta) - vals)) < 1e-10
