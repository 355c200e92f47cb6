"""Predicted spectral densities of A + Ginibre noise.

Two flavors: the limiting density (zero-noise-width saddle x0) and the
eps-regularized density (saddle x_eps), evaluated per point or on a grid.
rho_limit uses the inside-formula / outside-zero convention on the
measure-zero boundary of the support region.
"""

from __future__ import annotations

import math
import multiprocessing

import numpy as np

from ._threads import limit_blas_threads_in_worker, single_thread_blas
from .errors import (
    BracketFailureError,
    GinibreDensityError,
    NotPositiveDefiniteError,
    SingularPointError,
)
from .grids import DensityField, GridSpec
from .spectral import (
    SpectralMeasure,
    solve_x0,
    solve_x_eps,
    spectral_backend,
    stieltjes,
    verdict_from_measure,
)

_DENOM_GUARD = 1e-300


def _rho_from_parts(t1: complex, t2: float, xsq: float, denom: float) -> float:
    return (abs(t1) ** 2 / max(denom, _DENOM_GUARD) + xsq * t2) / math.pi


def _rho_limit_measure(backend, mu: SpectralMeasure, z: complex) -> float:
    verdict = verdict_from_measure(mu)
    if not verdict.in_D:
        return 0.0
    sol = solve_x0(mu)
    if sol is None:
        # inv_trace == 1 to the last bit: x0 = 0, one-sided inside value.
        xsq = 0.0
        denom = float(np.mean(mu.atoms ** -2.0))
    else:
        xsq = sol.x * sol.x
        denom = stieltjes(mu, xsq, 2)
    try:
        t1 = backend.t1(z, xsq)
        t2 = backend.t2(z, xsq)
    except NotPositiveDefiniteError as exc:
        raise SingularPointError(f"z={z}: saddle collapsed onto a singular point") from exc
    return _rho_from_parts(t1, t2, xsq, denom)


def rho_limit(a: np.ndarray, z: complex, backend=None) -> float:
    """Limiting density at z: 0 outside D, saddle-point formula inside."""
    if backend is None:
        backend = spectral_backend(a)
    mu = backend.measure(z)
    try:
        return _rho_limit_measure(backend, mu, z)
    except BracketFailureError as exc:
        raise SingularPointError(f"z={z}: saddle bracket degenerated") from exc


def rho_eps(a: np.ndarray, z: complex, eps: float, backend=None) -> float:
    """eps-regularized predicted density; defined for every z."""
    if backend is None:
        backend = spectral_backend(a)
    mu = backend.measure(z)
    sol = solve_x_eps(mu, eps)
    x = sol.x
    xsq = x * x
    denom = stieltjes(mu, xsq, 2) + eps / (2.0 * x ** 3)
    return _rho_from_parts(backend.t1(z, xsq), backend.t2(z, xsq), xsq, denom)


# -- grid sweeps ----------------------------------------------------------------

_ROW_CTX: dict = {}


def _row_init(backend, xs, ys, mode, eps):
    _ROW_CTX["args"] = (backend, xs, ys, mode, eps)


def _row_pool_init(backend, xs, ys, mode, eps):
    limit_blas_threads_in_worker()
    _row_init(backend, xs, ys, mode, eps)


def _row_eval(iy: int):
    backend, xs, ys, mode, eps = _ROW_CTX["args"]
    values = np.zeros(xs.size)
    flagged = []
    for ix, x in enumerate(xs):
        z = complex(x, ys[iy])
        try:
            if mode == "limit":
                values[ix] = _rho_limit_measure(backend, backend.measure(z), z)
            else:
                values[ix] = rho_eps(None, z, eps, backend=backend)
        except GinibreDensityError:
            values[ix] = np.nan
            flagged.append(ix)
    return iy, values, flagged


def predict_field(a: np.ndarray, grid: GridSpec, mode: str = "limit",
                  eps: float | None = None, backend=None,
                  workers: int = 1) -> DensityField:
    """Evaluate the predicted density at every grid node.

    Non-evaluable nodes (singular-point collapses) are flagged, filled with
    the average of their evaluable 4-neighbors, and listed in the metadata;
    the sweep itself never aborts.
    """
    if mode not in ("limit", "eps"):
        raise ValueError(f"mode must be 'limit' or 'eps', got {mode!r}")
    if mode == "eps":
        if eps is None or eps <= 0.0:
            raise ValueError("eps mode needs a positive eps")
    if backend is None:
        backend = spectral_backend(a)
    xs, ys = grid.xs(), grid.ys()
    values = np.zeros((grid.ny, grid.nx))
    flags: list[tuple[int, int]] = []

    if workers > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers, initializer=_row_pool_init,
                      initargs=(backend, xs, ys, mode, eps)) as pool:
            rows = pool.map(_row_eval, range(grid.ny))
    else:
        _row_init(backend, xs, ys, mode, eps)
        with single_thread_blas():
            rows = [_row_eval(iy) for iy in range(grid.ny)]

    for iy, row_values, flagged in rows:
        values[iy] = row_values
        flags.extend((iy, ix) for ix in flagged)

    for iy, ix in flags:
        neighbors = [values[jy, jx]
                     for jy, jx in ((iy - 1, ix), (iy + 1, ix), (iy, ix - 1), (iy, ix + 1))
                     if 0 <= jy < grid.ny and 0 <= jx < grid.nx
                     and np.isfinite(values[jy, jx])]
        values[iy, ix] = float(np.mean(neighbors)) if neighbors else 0.0

    kind = "predicted" if mode == "limit" else "predicted_eps"
    return DensityField(grid=grid, values=values, kind=kind,
                        eps=None if mode == "limit" else float(eps),
                        flags=flags)
