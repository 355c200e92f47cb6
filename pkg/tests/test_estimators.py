"""sklearn-facade behavior: params round-trip, fit/predict consistency."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

import ginibre_density as gd
from ginibre_density.estimators import DeformedGinibreDensity, MonteCarloDensity


class TestDeformedGinibreDensity:
    def test_params_round_trip_and_clone(self):
        est = DeformedGinibreDensity(mode="eps", eps=0.1)
        assert est.get_params() == {"mode": "eps", "eps": 0.1}
        twin = clone(est)
        assert twin.get_params() == est.get_params()
        est.set_params(mode="limit", eps=None)
        assert est.mode == "limit"

    def test_predict_matches_functional_api(self):
        a = gd.build_deformation(gd.EnsembleSpec(kind="jordan", n=6))
        zs = np.array([0.1 + 0.2j, 0.8, 1.5j])
        est = DeformedGinibreDensity().fit(a)
        expected = [gd.rho_limit(a, z) for z in zs]
        np.testing.assert_allclose(est.predict(zs), expected, atol=1e-12)

    def test_predict_accepts_re_im_columns(self):
        a = np.zeros((4, 4), complex)
        pts = np.array([[0.3, 0.4], [1.5, 0.0]])
        got = DeformedGinibreDensity().fit(a).predict(pts)
        np.testing.assert_allclose(got, [1 / np.pi, 0.0], atol=1e-12)

    def test_predict_grid(self):
        a = np.zeros((4, 4), complex)
        grid = gd.GridSpec((-1.2, 1.2, -1.2, 1.2), 13, 13)
        field = DeformedGinibreDensity().fit(a).predict_grid(grid)
        direct = gd.predict_field(a, grid)
        np.testing.assert_array_equal(field.values, direct.values)

    def test_eps_mode(self):
        a = np.zeros((4, 4), complex)
        est = DeformedGinibreDensity(mode="eps", eps=0.2).fit(a)
        assert est.predict([0.0])[0] == pytest.approx(gd.rho_eps(a, 0.0, 0.2))

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            DeformedGinibreDensity().predict([0.0])

    def test_bad_params(self):
        with pytest.raises(ValueError):
            DeformedGinibreDensity(mode="eps").fit(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            DeformedGinibreDensity(mode="nope").fit(np.zeros((3, 3)))

    def test_rejects_non_square(self):
        from ginibre_density.errors import DimensionMismatchError
        with pytest.raises(DimensionMismatchError):
            DeformedGinibreDensity().fit(np.zeros((3, 4)))


class TestMonteCarloDensity:
    def test_fit_exposes_field_and_predict_lookup(self):
        n = 24
        grid = gd.GridSpec((-1.5, 1.5, -1.5, 1.5), 13, 13)
        est = MonteCarloDensity(grid=grid, samples=5, seed=7).fit(np.zeros((n, n)))
        direct = gd.empirical_density(
            np.zeros((n, n), complex),
            gd.McConfig(n=n, samples=5, grid=grid, seed=7))
        np.testing.assert_array_equal(est.field_.values, direct.values)
        node = est.field_.grid.nodes()[3, 4]
        assert est.predict([node])[0] == est.field_.values[3, 4]

    def test_needs_grid_and_fit(self):
        with pytest.raises(ValueError):
            MonteCarloDensity().fit(np.zeros((4, 4)))
        with pytest.raises(NotFittedError):
            MonteCarloDensity(grid=gd.GridSpec((-1, 1, -1, 1), 9, 9)).predict([0.0])

    def test_clone_keeps_params(self):
        grid = gd.GridSpec((-1, 1, -1, 1), 9, 9)
        est = MonteCarloDensity(grid=grid, samples=3, eps=0.3, seed=1, workers=2)
        assert clone(est).get_params() == est.get_params()
