"""Disc self-maps: closed-form oracles, Herglotz-data maps, validation."""

import numpy as np
import pytest
from fractions import Fraction

from clarkkit import (
    CirclePoint,
    ConstantMap,
    GridFunction,
    HerglotzMap,
    IdentityMap,
    MoebiusMap,
    RationalMap,
    ValidationError,
    grid_from_function,
    map_from_json,
    map_to_json,
    rotate_map,
)

RNG = np.random.default_rng(11)


def random_interior(n, rmax=0.9):
    r = rmax * np.sqrt(RNG.uniform(0, 1, n))
    phi = RNG.uniform(0, 2 * np.pi, n)
    return r * np.exp(1j * phi)


class TestEval:
    def test_identity(self):
        f = IdentityMap()
        z = 0.3 + 0.4j
        assert f.eval(z) == z
        assert f.deriv(z) == 1.0

    def test_constant(self):
        f = ConstantMap(0.25 - 0.1j)
        assert f.eval(0.7j) == 0.25 - 0.1j
        assert f.deriv(0.7j) == 0.0

    def test_moebius_swaps_zero_and_a(self):
        a = 0.4 + 0.2j
        f = MoebiusMap(a)
        assert f.eval(0.0) == pytest.approx(a)
        assert abs(f.eval(a)) < 1e-15

    def test_rational_oracle(self, map_z_over_z_minus_2):
        f = map_z_over_z_minus_2
        for z in (0.5, -0.3 + 0.2j, 0.88j):
            assert f.eval(z) == pytest.approx(z / (z - 2), abs=1e-15)

    def test_herglotz_constant_density_is_zero_map(self):
        f = HerglotzMap(grid_from_function(lambda t: np.ones_like(t), 10))
        for z in (0.0, 0.5, -0.6j):
            assert abs(f.eval(z)) < 1e-14

    def test_herglotz_one_minus_cos_matches_closed_form(self, one_minus_cos):
        # H = 1 - z so f = (H-1)/(H+1) = z/(z-2)
        f = HerglotzMap(one_minus_cos)
        assert f.eval(0.5) == pytest.approx(-1.0 / 3.0, abs=1e-13)
        zs = random_interior(100)
        got = f.eval_many(zs)
        want = zs / (zs - 2)
        assert np.max(np.abs(got - want)) <= 1e-8

    def test_herglotz_origin_from_unit_mean(self, one_minus_cos):
        f = HerglotzMap(one_minus_cos)
        assert abs(f.eval(0.0)) < 1e-14

    def test_herglotz_origin_general_mean(self):
        w = grid_from_function(lambda t: 3.0 + np.cos(t), 10)
        f = HerglotzMap(w)
        assert f.eval(0.0) == pytest.approx((3.0 - 1.0) / (3.0 + 1.0), abs=1e-14)

    def test_rejects_exterior_evaluation(self, map_z_over_z_minus_2):
        with pytest.raises(ValidationError):
            map_z_over_z_minus_2.eval(1.0)


class TestDeriv:
    def test_herglotz_deriv_oracle(self, one_minus_cos):
        # f = z/(z-2) has f'(z) = -2/(z-2)^2, so f'(0) = -1/2
        f = HerglotzMap(one_minus_cos)
        assert f.deriv(0.0) == pytest.approx(-0.5, abs=1e-13)
        assert f.deriv(0.5) == pytest.approx(-2 / (0.5 - 2) ** 2, abs=1e-12)

    def test_moebius_deriv(self):
        a = 0.3 - 0.5j
        f = MoebiusMap(a)
        z = 0.2 + 0.1j
        fd = (abs(a) ** 2 - 1) / (1 - np.conj(a) * z) ** 2
        assert f.deriv(z) == pytest.approx(fd, abs=1e-15)

    @pytest.mark.parametrize("mapname", ["rational", "moebius", "herglotz"])
    def test_matches_finite_differences(self, mapname, one_minus_cos):
        f = {
            "rational": RationalMap((0.0, 1.0), (-2.0, 1.0)),
            "moebius": MoebiusMap(0.35 + 0.25j),
            "herglotz": HerglotzMap(one_minus_cos),
        }[mapname]
        h = 1e-5
        for z in random_interior(25, rmax=0.8):
            fd = (f.eval(z + h) - f.eval(z - h)) / (2 * h)
            d = f.deriv(z)
            assert abs(fd - d) <= 1e-6 * max(1.0, abs(d))


class TestBoundaryTrace:
    def test_zero_map(self):
        tr = ConstantMap(0.0).boundary_trace(0.5, 8)
        assert np.max(np.abs(tr.values)) == 0.0

    def test_identity_modulus(self):
        tr = IdentityMap().boundary_trace(0.9, 8)
        assert np.max(np.abs(np.abs(tr.values) - 0.9)) < 1e-15

    def test_rational_approaches_boundary_value(self, map_z_over_z_minus_2):
        # f(1) = -1 along the radius at turn 0
        for r in (0.9, 0.99, 0.999):
            tr = map_z_over_z_minus_2.boundary_trace(r, 6)
            assert abs(tr.values[0] - (-1.0)) < 3 * (1 - r)

    def test_values_inside_disc(self, one_minus_cos):
        f = HerglotzMap(one_minus_cos)
        tr = f.boundary_trace(0.99, 10)
        assert np.max(np.abs(tr.values)) < 1.0


class TestValidation:
    def test_unimodular_constant_rejected(self):
        with pytest.raises(ValidationError):
            ConstantMap(np.exp(0.3j))

    def test_moebius_parameter_bound(self):
        with pytest.raises(ValidationError):
            MoebiusMap(1.0)

    def test_rational_rejects_expanding_map(self):
        with pytest.raises(ValidationError):
            RationalMap((0.0, 1.1), (1.0,))  # 1.1 z

    def test_rational_rejects_pole_in_disc(self):
        with pytest.raises(ValidationError):
            RationalMap((0.0, 1.0), (-0.5, 1.0))  # pole at 0.5

    def test_rational_accepts_blaschke(self):
        RationalMap((0.0, 1.0), (1.0,))          # z itself
        RationalMap((0.0, 0.0, 1.0), (1.0,))     # z^2

    def test_herglotz_requires_nonnegative(self):
        with pytest.raises(ValidationError):
            HerglotzMap(grid_from_function(np.cos, 8))


class TestSchwarzPick:
    @pytest.mark.parametrize(
        "factory",
        [
            lambda: MoebiusMap(0.4 - 0.3j),
            lambda: RationalMap((0.0, 1.0), (-2.0, 1.0)),
            lambda: ConstantMap(0.3),
        ],
    )
    def test_pseudo_hyperbolic_contraction(self, factory):
        f = factory()
        z1 = random_interior(50)
        z2 = random_interior(50)
        f1, f2 = f.eval_many(z1), f.eval_many(z2)
        lhs = np.abs(f1 - f2) / np.abs(1 - np.conj(f2) * f1)
        rhs = np.abs(z1 - z2) / np.abs(1 - np.conj(z2) * z1)
        assert np.all(lhs <= rhs + 1e-9)

    def test_herglotz_map_contracts(self, one_minus_cos):
        f = HerglotzMap(one_minus_cos)
        z1, z2 = random_interior(50), random_interior(50)
        f1, f2 = f.eval_many(z1), f.eval_many(z2)
        lhs = np.abs(f1 - f2) / np.abs(1 - np.conj(f2) * f1)
        rhs = np.abs(z1 - z2) / np.abs(1 - np.conj(z2) * z1)
        assert np.all(lhs <= rhs + 1e-9)


class TestRotation:
    def test_identity_invariant(self):
        beta = CirclePoint(Fraction(1, 8))
        assert isinstance(rotate_map(IdentityMap(), beta), IdentityMap)

    def test_moebius_rotation(self):
        beta = CirclePoint(Fraction(1, 4))
        f = MoebiusMap(0.5)
        g = rotate_map(f, beta)
        b = beta.complex
        for z in random_interior(10):
            assert g.eval(z) == pytest.approx(b * f.eval(np.conj(b) * z), abs=1e-14)

    def test_rational_rotation(self, map_z_over_z_minus_2):
        beta = CirclePoint(Fraction(3, 8))
        f = map_z_over_z_minus_2
        g = rotate_map(f, beta)
        b = beta.complex
        for z in random_interior(10):
            assert g.eval(z) == pytest.approx(b * f.eval(np.conj(b) * z), abs=1e-13)

    def test_herglotz_rotation_grid_aligned(self, one_minus_cos):
        f = HerglotzMap(one_minus_cos)
        beta = CirclePoint(Fraction(1, 4))
        g = rotate_map(f, beta)
        b = beta.complex
        for z in random_interior(5):
            assert g.eval(z) == pytest.approx(b * f.eval(np.conj(b) * z), abs=1e-12)

    def test_herglotz_rotation_must_align(self, one_minus_cos):
        f = HerglotzMap(one_minus_cos)
        with pytest.raises(ValidationError):
            rotate_map(f, CirclePoint(Fraction(1, 3)))


class TestJson:
    def test_round_trip_closed_forms(self):
        maps = [
            IdentityMap(),
            ConstantMap(0.2 + 0.1j),
            MoebiusMap(-0.3j),
            RationalMap((0.0, 1.0), (-2.0, 1.0)),
        ]
        for f in maps:
            g = map_from_json(map_to_json(f))
            for z in (0.4, -0.2 + 0.3j):
                assert g.eval(z) == pytest.approx(f.eval(z), abs=1e-15)

    def test_herglotz_via_csv(self, tmp_path, one_minus_cos):
        f = HerglotzMap(one_minus_cos)
        csv_path = tmp_path / "w.csv"
        one_minus_cos.save_csv(csv_path)
        doc = map_to_json(f, grid_csv="w.csv")
        g = map_from_json(doc, base_dir=str(tmp_path))
        assert g.eval(0.5) == pytest.approx(f.eval(0.5), abs=1e-15)

    def test_malformed_complex(self):
        with pytest.raises(ValidationError):
            map_from_json({"kind": "constant", "value": 0.5})

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            map_from_json({"kind": "blaschke"})
