"""Empirical measurements of the convergence hypotheses for a deformation family.

Nothing here is a proof: for each size in a ladder we measure the norm bound,
the resolvent-trace stability outside the singular set, the inverse-trace
lower bound near it, and the log-determinant stability on the support region,
using the largest ladder member as a stand-in for the n -> infinity limit.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ensembles import EnsembleSpec, build_deformation, hermitize
from .grids import GridSpec
from .linalg import logdet_pd
from .montecarlo import respecify
from .spectral import inverse_moment, nu_measure, spectral_backend, verdict_from_measure


@dataclass(frozen=True)
class DiagnosticsParams:
    eps: float = 0.2        # exclusion radius around the singular set (C3-style scan)
    eps0: float = 0.2       # inclusion radius for the near-singular scan (C4-style)
    rho0: float = 0.1       # shift added to Y0 in the near-singular inverse trace
    kappa: float = 0.25     # lower end of the x-range for log-det profiles
    x_steps: int = 8


@dataclass(frozen=True)
class ConditionReport:
    """Per-size measurements; 'reference' quantities come from the largest n."""

    n: int
    c2_norm: float          # n^{-1} sum |a_ij|^2
    c3_sup: float           # sup over probes outside the dilated singular set
    c4_inf: float           # inf of tr_n (Y0 + rho0^2)^{-1} near the singular set
    c5_sup: float           # sup over (z in D) x [kappa, 2] of |L_n - L_ref|
    params: dict = field(default_factory=dict)


def _singular_points(a: np.ndarray) -> np.ndarray:
    # Y0(z) is singular exactly at the eigenvalues of A, so the finite-n
    # singular set is the spectrum itself.
    return np.linalg.eigvals(np.asarray(a, dtype=np.complex128))


def _dist_to_set(zs: np.ndarray, points: np.ndarray) -> np.ndarray:
    if points.size == 0:
        return np.full(zs.shape, np.inf)
    return np.min(np.abs(zs[:, None] - points[None, :]), axis=1)


def log_det_profile(a: np.ndarray, z: complex, x_range=(0.25, 2.0),
                    steps: int = 8) -> list[tuple[float, float]]:
    """(x, (1/n) log det(Y0(z) + x)) along an x-grid; increasing in x."""
    lo, hi = float(x_range[0]), float(x_range[1])
    if lo <= 0.0:
        raise ValueError("x range must start above 0")
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    y0, _ = hermitize(a, z)
    eye = np.eye(n)
    return [(float(x), logdet_pd(y0 + float(x) * eye) / n)
            for x in np.linspace(lo, hi, steps)]


def check_conditions(family: EnsembleSpec, n_ladder, probes: GridSpec,
                     params: DiagnosticsParams = DiagnosticsParams()) -> list[ConditionReport]:
    """Measure the condition quantities for each ladder size.

    The largest ladder member provides the reference inverse traces and
    log-determinant profiles; probe classification (near/far from the
    singular set) uses the largest member's spectrum throughout so every
    size is compared on the same probe partition.
    """
    ladder = sorted(int(n) for n in n_ladder)
    if len(ladder) < 2:
        raise ValueError("n_ladder needs at least two sizes")
    zs = probes.nodes().ravel()
    xs = np.linspace(params.kappa, 2.0, params.x_steps)

    a_ref = build_deformation(respecify(family, ladder[-1]))
    singular = _singular_points(a_ref)
    dist = _dist_to_set(zs, singular)
    far_mask = dist > params.eps
    near_zs = np.concatenate([zs[dist <= params.eps0], singular])

    backend_ref = spectral_backend(a_ref)
    ref_inv = np.array([inverse_moment(backend_ref.measure(z)) for z in zs])
    in_d_mask = np.array([verdict_from_measure(backend_ref.measure(z)).in_D for z in zs])
    d_zs = zs[in_d_mask]
    ref_logdet = _logdet_table(a_ref, d_zs, xs)

    reports = []
    for n in ladder:
        a_n = build_deformation(respecify(family, n))
        backend = spectral_backend(a_n)
        c2 = float(np.sum(np.abs(a_n) ** 2) / n)

        inv_n = np.array([inverse_moment(backend.measure(z)) for z in zs])
        diffs = np.abs(inv_n[far_mask] - ref_inv[far_mask])
        diffs = diffs[np.isfinite(diffs)]
        c3 = float(np.max(diffs)) if diffs.size else 0.0

        shifted = params.rho0 ** 2
        c4_vals = [float(np.mean(1.0 / (backend.measure(z).atoms + shifted)))
                   for z in near_zs]
        c4 = float(min(c4_vals)) if c4_vals else math.inf

        log_n = _logdet_table(a_n, d_zs, xs)
        c5 = float(np.max(np.abs(log_n - ref_logdet))) if log_n.size else 0.0

        reports.append(ConditionReport(
            n=n, c2_norm=c2, c3_sup=c3, c4_inf=c4, c5_sup=c5,
            params={**asdict(params),
                    "probes": int(zs.size), "near_probes": int(near_zs.size),
                    "reference_n": ladder[-1]}))
    return reports


def _logdet_table(a: np.ndarray, zs: np.ndarray, xs: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.empty((zs.size, xs.size))
    for i, z in enumerate(zs):
        atoms = nu_measure(a, complex(z)).atoms
        out[i] = [float(np.mean(np.log(atoms + x))) for x in xs]
    return out


def decay_rates(reports: list[ConditionReport]) -> dict:
    """Fitted log-log decay slopes of the sup-quantities across the ladder
    (the last, reference row is excluded since its sups are zero by design)."""
    rows = reports[:-1]
    out = {}
    for name in ("c3_sup", "c5_sup"):
        vals = np.array([getattr(r, name) for r in rows], dtype=float)
        ns = np.array([r.n for r in rows], dtype=float)
        good = vals > 0.0
        if good.sum() >= 2:
            slope, _ = np.polyfit(np.log(ns[good]), np.log(vals[good]), 1)
            out[name] = float(slope)
        else:
            out[name] = math.nan
    return out
