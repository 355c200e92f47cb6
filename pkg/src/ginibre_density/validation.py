"""Input validation helpers shared by the estimator API and the CLI."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError


def check_deformation(a) -> np.ndarray:
    """Validate and return a square, finite, complex deformation matrix."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"deformation must be square, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("deformation must be at least 1x1")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("deformation contains NaN/Inf entries")
    return arr


def check_points(z) -> np.ndarray:
    """Coerce query points to a 1-D complex array.

    Accepts complex array-likes, scalars, or real arrays of shape (m, 2)
    holding (re, im) columns, the layout sklearn pipelines tend to pass.
    """
    arr = np.asarray(z)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
        arr = arr[:, 0] + 1j * arr[:, 1]
    arr = np.atleast_1d(arr.astype(np.complex128, copy=False)).ravel()
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("query points contain NaN/Inf")
    return arr
