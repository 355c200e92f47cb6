"""Deformation builders, noise law, Hermitizations, matrix file round-trip."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ginibre_density as gd
from ginibre_density.errors import InvalidSpecError
from ginibre_density.linalg import hermitian_eigenvalues, max_abs


class TestBuildDeformation:
    def test_zero(self):
        a = gd.build_deformation(gd.EnsembleSpec(kind="zero", n=3))
        np.testing.assert_array_equal(a, np.zeros((3, 3)))

    def test_jordan_cell(self):
        a = gd.build_deformation(gd.EnsembleSpec(kind="jordan", n=2))
        np.testing.assert_array_equal(a, np.array([[0, 1], [0, 0]]))

    def test_jordan_blocks_tile(self):
        a = gd.build_deformation(gd.EnsembleSpec(kind="jordan", n=6, eigenvalue=2j))
        cell = np.array([[2j, 1], [0, 2j]])
        for k in range(3):
            np.testing.assert_array_equal(a[2 * k:2 * k + 2, 2 * k:2 * k + 2], cell)
        assert np.count_nonzero(a) == 9

    def test_diagonal(self):
        spec = gd.EnsembleSpec(kind="diagonal", n=4, atoms=(1.0, -1.0),
                               multiplicities=(2, 2))
        np.testing.assert_array_equal(gd.build_deformation(spec),
                                      np.diag([1.0, 1.0, -1.0, -1.0]))

    def test_deterministic_random_kinds(self):
        for kind in ("wigner", "ginibre"):
            spec = gd.EnsembleSpec(kind=kind, n=16, seed=9)
            np.testing.assert_array_equal(gd.build_deformation(spec),
                                          gd.build_deformation(spec))

    def test_wigner_is_hermitian_unit_scale(self):
        a = gd.build_deformation(gd.EnsembleSpec(kind="wigner", n=200, seed=1))
        assert max_abs(a - a.conj().T) < 1e-14
        # semicircle support [-2, 2]: extreme eigenvalues approach +-2
        w = hermitian_eigenvalues(a)
        assert 1.6 < w.max() < 2.4 and -2.4 < w.min() < -1.6

    def test_invalid_specs(self):
        with pytest.raises(InvalidSpecError):
            gd.EnsembleSpec(kind="diagonal", n=4, atoms=(1.0,), multiplicities=(3,))
        with pytest.raises(InvalidSpecError):
            gd.EnsembleSpec(kind="jordan", n=5)
        with pytest.raises(InvalidSpecError):
            gd.EnsembleSpec(kind="nope", n=4)


class TestGinibreSampling:
    def test_moment_bounds(self):
        # CLT bounds at ~4 sigma for 10^4 pooled entries, n = 100.
        n, pool = 100, 10_000
        h = gd.sample_ginibre(n, seed=7).matrix
        assert h.shape == (n, n)
        assert abs(h.mean()) <= 4.0 / np.sqrt(pool * n)
        assert abs((h ** 2).mean()) <= 4.0 / (n * np.sqrt(pool))
        assert abs((np.abs(h) ** 2).mean() - 1.0 / n) <= 4.0 / (n * np.sqrt(pool))

    def test_real_imag_parts_scale(self):
        h = gd.sample_ginibre(64, seed=3).matrix
        # each part is N(0, 1/(2n)); sample variance within 20%
        assert np.var(h.real) == pytest.approx(1 / 128, rel=0.2)
        assert np.var(h.imag) == pytest.approx(1 / 128, rel=0.2)

    def test_reproducible_and_stream_independent(self):
        a = gd.sample_ginibre(10, seed=5, stream=2).matrix
        b = gd.sample_ginibre(10, seed=5, stream=2).matrix
        c = gd.sample_ginibre(10, seed=5, stream=3).matrix
        np.testing.assert_array_equal(a, b)
        assert max_abs(a - c) > 1e-3

    def test_stream_decorrelation(self):
        a = gd.sample_ginibre(40, seed=5, stream=0).matrix.ravel()
        b = gd.sample_ginibre(40, seed=5, stream=1).matrix.ravel()
        corr = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
        assert corr < 0.1


class TestHermitize:
    def test_zero_deformation(self):
        y0, y0t = gd.hermitize(np.zeros((3, 3)), 0.5 + 0.5j)
        np.testing.assert_allclose(y0, 0.5 * np.eye(3))
        np.testing.assert_allclose(y0t, 0.5 * np.eye(3))

    def test_jordan_hermitizations(self):
        a = np.array([[0, 1], [0, 0]], dtype=complex)
        y0, y0t = gd.hermitize(a, 0.0)
        np.testing.assert_allclose(y0, np.diag([1.0, 0.0]))
        np.testing.assert_allclose(y0t, np.diag([0.0, 1.0]))

    def test_trace_is_frobenius_norm(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        z = 0.4 - 0.7j
        y0, y0t = gd.hermitize(a, z)
        fro = np.sum(np.abs(a - z * np.eye(5)) ** 2)
        assert np.trace(y0).real == pytest.approx(fro)
        assert np.trace(y0t).real == pytest.approx(fro)

    def test_spectra_coincide(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        y0, y0t = gd.hermitize(a, 1.1j)
        np.testing.assert_allclose(hermitian_eigenvalues(y0),
                                   hermitian_eigenvalues(y0t), atol=1e-9)

    def test_unitary_conjugation_invariance(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        u = gd.random_unitary(8, seed=12)
        y0, _ = gd.hermitize(a, 0.3)
        y0u, _ = gd.hermitize(u @ a @ u.conj().T, 0.3)
        np.testing.assert_allclose(hermitian_eigenvalues(y0u),
                                   hermitian_eigenvalues(y0), atol=1e-8)

    @settings(max_examples=20, deadline=None)
    @given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
           st.integers(min_value=0, max_value=2 ** 31))
    def test_translation_covariance(self, c, seed):
        a = gd.sample_ginibre(5, seed=seed).matrix
        z = 0.3 - 0.2j
        y0, _ = gd.hermitize(a, z)
        y0c, _ = gd.hermitize(a + c * np.eye(5), z + c)
        assert max_abs(y0c - y0) <= 1e-12 * max(1.0, max_abs(y0), abs(c) ** 2)


class TestMatrixFile:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(8)
        a = rng.standard_normal((4, 4)) * 1e-3 + 1j * rng.standard_normal((4, 4)) * 1e5
        path = tmp_path / "m.csv"
        gd.ensembles.write_matrix_file(path, a)
        b = gd.ensembles.read_matrix_file(path)
        np.testing.assert_array_equal(a.astype(complex), b)

    def test_whitespace_and_scientific(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("n=2\n 1.0e0 : 0 , 0:1e-1 \n0:0,  -2.5E-1:0\n")
        b = gd.ensembles.read_matrix_file(path)
        np.testing.assert_allclose(b, [[1.0, 0.1j], [0.0, -0.25]])

    def test_build_from_file(self, tmp_path):
        path = tmp_path / "m.csv"
        gd.ensembles.write_matrix_file(path, np.eye(3))
        spec = gd.EnsembleSpec(kind="file", n=3, path=str(path))
        np.testing.assert_array_equal(gd.build_deformation(spec), np.eye(3))

    def test_errors(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("rows=2\n1:0,0:0\n0:0,1:0\n")
        with pytest.raises(InvalidSpecError):
            gd.ensembles.read_matrix_file(bad)
        bad.write_text("n=2\n1:0\n0:0,1:0\n")
        with pytest.raises(InvalidSpecError):
            gd.ensembles.read_matrix_file(bad)
        good = tmp_path / "good.csv"
        gd.ensembles.write_matrix_file(good, np.eye(2))
        with pytest.raises(InvalidSpecError):
            gd.ensembles.read_matrix_file(good, expected_n=3)
