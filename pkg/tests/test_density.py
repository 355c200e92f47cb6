"""Predicted density values and grid sweeps."""

import math

import numpy as np
import pytest

import ginibre_density as gd

INV_PI = 1.0 / math.pi
# rho(0) for the 2x2-cell nilpotent block deformation, equal to
# 1/(pi (1 + 2^{-1/2})). Frozen after cross-checking two oracles: the
# closed-form expression and a 40-digit mpmath evaluation of the saddle
# equation plus explicit 2x2 resolvents.
JORDAN_RHO_AT_ZERO = 0.1864616142890283


def jordan(n):
    return gd.build_deformation(gd.EnsembleSpec(kind="jordan", n=n))


class TestRhoLimit:
    def test_circular_law_inside(self):
        a = np.zeros((8, 8), complex)
        assert gd.rho_limit(a, 0.3 + 0.4j) == pytest.approx(INV_PI, abs=1e-12)

    def test_zero_outside(self):
        assert gd.rho_limit(np.zeros((8, 8), complex), 1.5) == 0.0

    def test_jordan_center_value(self):
        assert gd.rho_limit(jordan(8), 0.0) == pytest.approx(JORDAN_RHO_AT_ZERO,
                                                             abs=1e-8)

    def test_jordan_value_independent_of_block_count(self):
        for z in (0.0, 0.3 + 0.2j, 0.9 - 0.5j):
            assert gd.rho_limit(jordan(4), z) == pytest.approx(
                gd.rho_limit(jordan(32), z), abs=1e-12)

    def test_nonnegative_on_probes(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        for _ in range(25):
            z = complex(*rng.uniform(-2, 2, 2))
            assert gd.rho_limit(a, z) >= 0.0

    def test_unitary_invariance(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        u = gd.random_unitary(6, seed=2)
        for z in (0.2 + 0.1j, 0.8, 1.4j):
            assert gd.rho_limit(u @ a @ u.conj().T, z) == pytest.approx(
                gd.rho_limit(a, z), abs=1e-8)


class TestRhoEps:
    def test_scalar_case(self):
        a = np.zeros((4, 4), complex)
        x = (0.2 + math.sqrt(4.04)) / 2
        assert gd.rho_eps(a, 0.0, 0.2) == pytest.approx(INV_PI / x ** 2, abs=1e-12)

    def test_eps_squared_decay_outside(self):
        a = np.zeros((4, 4), complex)
        ratios = [gd.rho_eps(a, 2.0, eps) / eps ** 2 for eps in (0.1, 0.05, 0.025)]
        spread = (max(ratios) - min(ratios)) / min(ratios)
        assert spread < 0.25

    def test_monotone_approach_inside(self):
        a = jordan(8)
        z = 0.2 + 0.1j
        target = gd.rho_limit(a, z)
        gaps = [abs(gd.rho_eps(a, z, eps) - target) for eps in (0.2, 0.1, 0.05, 0.025)]
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < gaps[0] / 4

    def test_defined_on_boundary_and_singular_points(self):
        a = np.zeros((4, 4), complex)
        for z in (1.0, 0.0):
            assert gd.rho_eps(a, z, 0.05) >= 0.0

    def test_nonnegative(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        for _ in range(25):
            z = complex(*rng.uniform(-2, 2, 2))
            assert gd.rho_eps(a, z, 0.07) >= 0.0


class TestPredictField:
    def test_circular_law_field(self):
        a = np.zeros((16, 16), complex)
        grid = gd.GridSpec((-1.5, 1.5, -1.5, 1.5), 101, 101)
        field = gd.predict_field(a, grid)
        zs = grid.nodes()
        inside = np.abs(zs) <= 0.98
        outside = np.abs(zs) >= 1.02
        assert np.max(np.abs(field.values[inside] - INV_PI)) <= 1e-10
        assert np.max(np.abs(field.values[outside])) == 0.0

    def test_mass_near_one(self):
        a = np.zeros((8, 8), complex)
        grid = gd.GridSpec((-1.5, 1.5, -1.5, 1.5), 201, 201)
        assert gd.predict_field(a, grid).mass() == pytest.approx(1.0, abs=0.03)

    def test_translation_shifts_field(self):
        a = jordan(4)
        c = 0.5
        g0 = gd.GridSpec((-1.5, 1.5, -1.5, 1.5), 31, 31)
        g1 = gd.GridSpec((-1.0, 2.0, -1.5, 1.5), 31, 31)
        f0 = gd.predict_field(a, g0)
        f1 = gd.predict_field(a + c * np.eye(4), g1)
        np.testing.assert_allclose(f1.values, f0.values, atol=1e-9)

    def test_eps_mode_and_metadata(self):
        a = np.zeros((4, 4), complex)
        grid = gd.GridSpec((-1.2, 1.2, -1.2, 1.2), 25, 25)
        field = gd.predict_field(a, grid, mode="eps", eps=0.1)
        assert field.kind == "predicted_eps" and field.eps == 0.1
        assert np.all(field.values >= 0.0)

    def test_worker_independence(self):
        a = jordan(6)
        grid = gd.GridSpec((-1.4, 1.4, -1.4, 1.4), 15, 15)
        f1 = gd.predict_field(a, grid, workers=1)
        f2 = gd.predict_field(a, grid, workers=2)
        np.testing.assert_array_equal(f1.values, f2.values)

    def test_field_export_round_trip(self, tmp_path):
        a = np.zeros((4, 4), complex)
        grid = gd.GridSpec((-1.0, 1.0, -1.0, 1.0), 9, 9)
        field = gd.predict_field(a, grid)
        path = tmp_path / "f.csv"
        field.to_csv(path)
        re, im, rho = gd.grids.read_field_csv(path)
        assert re.size == 81
        np.testing.assert_array_equal(rho.reshape(9, 9), field.values)
        field.to_json(tmp_path / "f.json")
        assert (tmp_path / "f.json").exists()

    def test_mode_validation(self):
        grid = gd.GridSpec((-1, 1, -1, 1), 9, 9)
        with pytest.raises(ValueError):
            gd.predict_field(np.zeros((2, 2)), grid, mode="eps")
        with pytest.raises(ValueError):
            gd.predict_field(np.zeros((2, 2)), grid, mode="banana")
