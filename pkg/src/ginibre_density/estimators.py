"""Scikit-learn-style front ends over the functional core.

``fit`` takes the deformation matrix; ``predict`` evaluates densities at
complex query points, so the estimators drop into sklearn tooling
(get_params / set_params / clone) without ceremony.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .density import predict_field, rho_eps, rho_limit
from .grids import DensityField, GridSpec
from .montecarlo import McConfig, empirical_density
from .spectral import spectral_backend
from .validation import check_deformation, check_points


class DeformedGinibreDensity(BaseEstimator):
    """Predicted spectral density of (deformation + Ginibre noise).

    Parameters
    ----------
    mode : "limit" for the zero-noise-width density, "eps" for the
        regularized one.
    eps : regularization width, required when mode="eps".
    """

    def __init__(self, mode: str = "limit", eps: float | None = None):
        self.mode = mode
        self.eps = eps

    def fit(self, A, y=None):
        if self.mode not in ("limit", "eps"):
            raise ValueError(f"mode must be 'limit' or 'eps', got {self.mode!r}")
        if self.mode == "eps" and (self.eps is None or self.eps <= 0.0):
            raise ValueError("mode='eps' needs a positive eps")
        self.deformation_ = check_deformation(A)
        self.backend_ = spectral_backend(self.deformation_)
        return self

    def _check_fitted(self):
        if not hasattr(self, "backend_"):
            raise NotFittedError("call fit(A) before predicting")

    def predict(self, Z) -> np.ndarray:
        """Density values at complex query points (or (m, 2) re/im rows)."""
        self._check_fitted()
        zs = check_points(Z)
        if self.mode == "limit":
            return np.array([rho_limit(self.deformation_, z, backend=self.backend_)
                             for z in zs])
        return np.array([rho_eps(self.deformation_, z, self.eps, backend=self.backend_)
                         for z in zs])

    def predict_grid(self, grid: GridSpec, workers: int = 1) -> DensityField:
        self._check_fitted()
        return predict_field(self.deformation_, grid, mode=self.mode,
                             eps=self.eps, backend=self.backend_, workers=workers)


class MonteCarloDensity(BaseEstimator):
    """Empirical regularized density from noise sampling on a grid.

    ``fit`` runs the simulation and stores the resulting field as ``field_``;
    ``predict`` looks up the nearest interior grid node for each query point.
    """

    def __init__(self, grid: GridSpec | None = None, samples: int = 20,
                 eps: float | None = None, seed: int = 0, workers: int = 1):
        self.grid = grid
        self.samples = samples
        self.eps = eps
        self.seed = seed
        self.workers = workers

    def fit(self, A, y=None):
        a = check_deformation(A)
        if self.grid is None:
            raise ValueError("MonteCarloDensity needs a grid")
        cfg = McConfig(n=a.shape[0], samples=self.samples, grid=self.grid,
                       eps=self.eps, seed=self.seed, workers=self.workers)
        self.field_ = empirical_density(a, cfg)
        return self

    def predict(self, Z) -> np.ndarray:
        if not hasattr(self, "field_"):
            raise NotFittedError("call fit(A) before predicting")
        zs = check_points(Z)
        grid = self.field_.grid
        ix = np.clip(np.rint((zs.real - grid.window[0]) / grid.h).astype(int),
                     0, grid.nx - 1)
        iy = np.clip(np.rint((zs.imag - grid.window[2]) / grid.h).astype(int),
                     0, grid.ny - 1)
        return self.field_.values[iy, ix]
