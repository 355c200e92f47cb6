"""Monte Carlo side: log-determinant potentials, empirical density fields,
linear eigenvalue statistics, and the n^{-1/2} rate experiment.

The empirical density never touches eigenvalues of X: it averages
log det(Y(z) + eps^2) over noise draws and applies a discrete Laplacian.
Noise streams are pre-assigned per sample index, so results are identical
for any worker count.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from ._threads import limit_blas_threads_in_worker, single_thread_blas
from .density import rho_limit
from .ensembles import EnsembleSpec, build_deformation, sample_ginibre
from .errors import NotPositiveDefiniteError, SupportEscapeError
from .grids import DensityField, GridSpec
from .spectral import spectral_backend


@dataclass(frozen=True)
class McConfig:
    """Knobs for one Monte Carlo run; eps defaults to n^{-1/2}."""

    n: int
    samples: int
    grid: GridSpec
    eps: float | None = None
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.eps is not None and self.eps <= 0.0:
            raise ValueError("eps must be positive")

    @property
    def resolved_eps(self) -> float:
        return self.eps if self.eps is not None else self.n ** -0.5


@dataclass(frozen=True)
class LinearStatistic:
    value: float
    std_error: float
    h_id: str


def log_potential(x_matrix: np.ndarray, z: complex, eps: float) -> float:
    """(1/n) log det((X - z)(X - z)* + eps^2), via a Cholesky factorization.

    With eps = 0 this raises NotPositiveDefiniteError whenever z sits
    numerically on the spectrum of X; callers jitter z and retry.
    """
    x_matrix = np.asarray(x_matrix, dtype=np.complex128)
    n = x_matrix.shape[0]
    b = x_matrix - z * np.eye(n)
    m = b @ b.conj().T + (eps * eps) * np.eye(n)
    return _chol_logdet(m) / n


def _chol_logdet(m: np.ndarray) -> float:
    try:
        lower = scipy.linalg.cholesky(m, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    return 2.0 * float(np.sum(np.log(np.real(np.diagonal(lower)))))


def _sample_matrix(a: np.ndarray, seed: int, stream: int) -> np.ndarray:
    return a + sample_ginibre(a.shape[0], seed, stream).matrix


def _logdets_at_nodes(x_matrix: np.ndarray, zs: np.ndarray, eps: float) -> np.ndarray:
    """(1/n) log det(Y(z) + eps^2) for each z, reusing P = X X* per sample."""
    n = x_matrix.shape[0]
    xh = x_matrix.conj().T
    p = x_matrix @ xh
    diag = np.arange(n)
    out = np.empty(zs.size)
    for k, z in enumerate(zs.ravel()):
        m = p - np.conj(z) * x_matrix
        m -= z * xh
        m[diag, diag] += (z.real * z.real + z.imag * z.imag) + eps * eps
        lower = scipy.linalg.cholesky(m, lower=True, overwrite_a=True, check_finite=False)
        out[k] = 2.0 * float(np.sum(np.log(np.real(np.diagonal(lower)))))
    return out.reshape(zs.shape) / n


_MC_CTX: dict = {}


def _mc_init(a, zs, eps, seed):
    _MC_CTX["args"] = (a, zs, eps, seed)


def _mc_pool_init(a, zs, eps, seed):
    limit_blas_threads_in_worker()
    _mc_init(a, zs, eps, seed)


def _mc_sample(stream: int) -> np.ndarray:
    a, zs, eps, seed = _MC_CTX["args"]
    return _logdets_at_nodes(_sample_matrix(a, seed, stream), zs, eps)


def _sample_fields(a: np.ndarray, zs: np.ndarray, cfg: McConfig) -> np.ndarray:
    """Per-sample log-potential arrays, stacked in sample order."""
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (cfg.n, cfg.n):
        raise ValueError(f"deformation is {a.shape}, config says n={cfg.n}")
    eps = cfg.resolved_eps
    if cfg.workers > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(cfg.workers, initializer=_mc_pool_init,
                      initargs=(a, zs, eps, cfg.seed)) as pool:
            fields = pool.map(_mc_sample, range(cfg.samples))
    else:
        _mc_init(a, zs, eps, cfg.seed)
        with single_thread_blas():
            fields = [_mc_sample(s) for s in range(cfg.samples)]
    return np.stack(fields, axis=0)


def laplacian_stencil(values: np.ndarray, h: float) -> np.ndarray:
    """Interior 5-point Laplacian / (4 pi); output shape shrinks by 2 per axis."""
    c = values[1:-1, 1:-1]
    stencil = (values[:-2, 1:-1] + values[2:, 1:-1]
               + values[1:-1, :-2] + values[1:-1, 2:] - 4.0 * c) / (h * h)
    return stencil / (4.0 * math.pi)


def empirical_density(a: np.ndarray, cfg: McConfig) -> DensityField:
    """Regularized empirical density: sample-mean log-potential, then the
    discrete Laplacian / (4 pi), reported on the interior nodes."""
    if cfg.grid.nx < 3 or cfg.grid.ny < 3:
        raise ValueError("grid too small for the 5-point stencil")
    zs = cfg.grid.nodes()
    mean_logdet = np.mean(_sample_fields(a, zs, cfg), axis=0)
    values = laplacian_stencil(mean_logdet, cfg.grid.h)
    return DensityField(grid=cfg.grid.interior(), values=values, kind="empirical",
                        eps=cfg.resolved_eps, samples=cfg.samples,
                        meta={"seed": cfg.seed, "n": cfg.n})


# -- test functions -------------------------------------------------------------


@dataclass(frozen=True)
class RadialBump:
    """Compactly supported radial bump (1 - |z-c|^2/R^2)^p with analytic
    Laplacian; p >= 3 keeps it C^2 across the support edge."""

    center: complex = 0.0
    radius: float = 0.8
    power: int = 3

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")
        if self.power < 3:
            raise ValueError("power must be >= 3 for a C^2 bump")

    @property
    def h_id(self) -> str:
        return f"radial_p{self.power}_R{self.radius:g}_c{self.center:g}"

    def _u(self, z):
        d = np.asarray(z) - self.center
        return (d.real ** 2 + d.imag ** 2) / (self.radius ** 2)

    def __call__(self, z):
        u = self._u(z)
        return np.where(u < 1.0, (1.0 - np.minimum(u, 1.0)) ** self.power, 0.0)

    def laplacian(self, z):
        u = self._u(z)
        p, rsq = self.power, self.radius ** 2
        core = (1.0 - np.minimum(u, 1.0)) ** (p - 2) * (p * u - 1.0)
        return np.where(u < 1.0, (4.0 * p / rsq) * core, 0.0)


def _quadrature_nodes(h, grid: GridSpec):
    """Grid nodes inside supp h, with their midpoint-rule Laplacian weights."""
    zs = grid.nodes()
    lap = h.laplacian(zs)
    mask = h(zs) > 0.0
    re_min, re_max, im_min, im_max = grid.window
    c, r = h.center, h.radius
    if not (re_min < c.real - r and c.real + r < re_max
            and im_min < c.imag - r and c.imag + r < im_max):
        raise SupportEscapeError("test-function support touches the window edge")
    weights = lap[mask] * grid.h ** 2 / (4.0 * math.pi)
    return zs[mask], weights, mask


class ZeroFunction:
    """Identically-zero test function, for degenerate-statistic checks."""

    center = 0.0 + 0.0j
    radius = 1e-9
    h_id = "zero"

    def __call__(self, z):
        return np.zeros(np.shape(z))

    def laplacian(self, z):
        return np.zeros(np.shape(z))


def linear_statistic(a: np.ndarray, h, cfg: McConfig) -> LinearStatistic:
    """Estimate E (1/n) sum h(eigenvalues) through the log-potential route:
    quadrature of (Laplacian h) * mean log-potential / (4 pi)."""
    nodes, weights, _ = _quadrature_nodes(h, cfg.grid)
    if nodes.size == 0 or not np.any(weights):
        return LinearStatistic(0.0, 0.0, getattr(h, "h_id", "zero"))
    fields = _sample_fields(a, nodes, cfg)
    per_sample = fields @ weights
    value = float(np.mean(per_sample))
    std_error = (float(np.std(per_sample, ddof=1)) / math.sqrt(cfg.samples)
                 if cfg.samples > 1 else 0.0)
    return LinearStatistic(value=value, std_error=std_error, h_id=h.h_id)


# -- rate experiment -------------------------------------------------------------


@dataclass(frozen=True)
class RateRow:
    n: int
    error: float
    std_error: float
    slope_running: float


@dataclass(frozen=True)
class RateTable:
    rows: tuple
    slope: float
    h_id: str
    references: tuple
    estimates: tuple


def respecify(spec: EnsembleSpec, n: int) -> EnsembleSpec:
    """Scale an ensemble template to size n (diagonal multiplicities pro rata)."""
    if spec.kind == "diagonal":
        total = sum(spec.multiplicities)
        mults = [max(1, round(m * n / total)) for m in spec.multiplicities]
        mults[-1] += n - sum(mults)
        return replace(spec, n=n, multiplicities=tuple(mults))
    return replace(spec, n=n)


def predicted_integral(a: np.ndarray, h, grid: GridSpec) -> float:
    """Quadrature of h * rho_limit over supp h (the deterministic reference)."""
    zs = grid.nodes()
    mask = h(zs) > 0.0
    backend = spectral_backend(a)
    total = 0.0
    hz = h(zs)
    for z, weight in zip(zs[mask].ravel(), hz[mask].ravel()):
        total += weight * rho_limit(a, complex(z), backend=backend)
    return total * grid.h ** 2


def fit_loglog_slope(ns, errors) -> float:
    ns = np.asarray(ns, dtype=float)
    errors = np.maximum(np.asarray(errors, dtype=float), 1e-300)
    slope, _ = np.polyfit(np.log(ns), np.log(errors), 1)
    return float(slope)


def rate_experiment(family: EnsembleSpec, h, n_ladder, cfg: McConfig) -> RateTable:
    """For each n: MC linear statistic vs quadrature of h * rho_limit, with a
    running log-log slope of |error| against n."""
    n_ladder = sorted(int(n) for n in n_ladder)
    rows, refs, ests = [], [], []
    for n in n_ladder:
        a = build_deformation(respecify(family, n))
        reference = predicted_integral(a, h, cfg.grid)
        stat = linear_statistic(a, h, replace(cfg, n=n))
        error = abs(stat.value - reference)
        ns_so_far = [r.n for r in rows] + [n]
        errs_so_far = [r.error for r in rows] + [error]
        slope = fit_loglog_slope(ns_so_far, errs_so_far) if len(ns_so_far) >= 2 else math.nan
        rows.append(RateRow(n=n, error=error, std_error=stat.std_error,
                            slope_running=slope))
        refs.append(reference)
        ests.append(stat.value)
    return RateTable(rows=tuple(rows), slope=rows[-1].slope_running,
                     h_id=getattr(h, "h_id", "?"),
                     references=tuple(refs), estimates=tuple(ests))
