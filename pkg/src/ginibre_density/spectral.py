"""Deterministic spectral backbone for a deformation matrix A.

Everything here is a function of the singular-value measure of A - z: the
per-z atom measure, its Stieltjes-type moment sums, the two scalar saddle
equations, membership in the support region D, and the level-set curve
tr_n Y0(z)^{-1} = 1 that bounds D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import hermitize
from .errors import BracketFailureError, EmptyBoundaryError
from .linalg import cholesky, hermitian_eigenvalues, max_abs, solve_hermitian_pd

RESIDUAL_TOL = 1e-10
BOUNDARY_TOL = 1e-8
_ATOM_CLAMP = 1e-10
NORMALITY_TOL = 1e-12


# -- atom measures ------------------------------------------------------------


@dataclass(frozen=True)
class SpectralMeasure:
    """Ascending nonnegative atoms with uniform weight 1/n.

    Construction sorts the atoms and clamps rounding-level negatives
    (within 1e-10 of the top atom's scale) to zero; anything more negative
    is rejected as a genuine PSD violation.
    """

    atoms: np.ndarray

    def __post_init__(self):
        a = np.sort(np.asarray(self.atoms, dtype=np.float64))
        if a.ndim != 1 or a.size == 0:
            raise ValueError("atoms must be a nonempty 1-D array")
        if not np.all(np.isfinite(a)):
            raise ValueError("atoms must be finite")
        scale = max(1.0, float(a[-1]))
        if a[0] < -_ATOM_CLAMP * scale:
            raise ValueError(f"atom {a[0]:.3e} is negative beyond the PSD clamp")
        object.__setattr__(self, "atoms", np.maximum(a, 0.0))

    @property
    def n(self) -> int:
        return self.atoms.size


def nu_measure(a: np.ndarray, z: complex) -> SpectralMeasure:
    """Singular-value-squared measure of A - z (eigenvalues of Y0(z))."""
    y0, _ = hermitize(a, z)
    return SpectralMeasure(hermitian_eigenvalues(y0))


def stieltjes(mu: SpectralMeasure, x: float, power: int = 1) -> float:
    """Moment sum (1/n) sum_i (atom_i + x)^(-power); strictly decreasing in x."""
    if x <= 0.0:
        raise ValueError("x must be positive")
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    return float(np.mean((mu.atoms + x) ** (-power)))


def inverse_moment(mu: SpectralMeasure) -> float:
    """tr_n Y0^{-1} as x -> 0+, with +inf when an atom sits at (numerical) zero."""
    if mu.atoms[0] <= singular_tolerance(mu):
        return math.inf
    return float(np.mean(1.0 / mu.atoms))


def singular_tolerance(mu: SpectralMeasure) -> float:
    """Scaled cushion below which an atom counts as an exact zero of Y0."""
    return 1e-12 * (1.0 + float(mu.atoms[-1]))


# -- saddle-point equations ----------------------------------------------------


@dataclass(frozen=True)
class SaddleSolution:
    """Positive root of one of the two scalar saddle equations."""

    x: float
    residual: float
    kind: str                      # "x0" or "x_eps"
    bracket: tuple[float, float]
    eps: float = 0.0


def _bisect_newton(f, dfdx, lo, hi, flo, fhi) -> tuple[float, float, tuple[float, float]]:
    """Bisection to width 1e-12 plus Newton polish, kept inside the bracket.

    The defining functions are strictly monotone, so the root is unique; Newton
    alone may escape the bracket near the boundary of D, hence the hybrid.
    """
    bracket = (lo, hi)
    for _ in range(200):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x = 0.5 * (lo + hi)
    fx = f(x)
    for _ in range(5):
        if abs(fx) <= 1e-13:
            break
        d = dfdx(x)
        if d == 0.0:
            break
        step = x - fx / d
        if not (bracket[0] < step < bracket[1]):
            break
        x, fx = step, f(step)
    return x, abs(fx), bracket


def _expand_bracket(f, lo, hi, want_sign_change=True):
    """Grow [lo, hi] by doubling hi / halving lo until f changes sign."""
    flo, fhi = f(lo), f(hi)
    for _ in range(60):
        if np.isnan(flo) or np.isnan(fhi):
            raise BracketFailureError("NaN encountered while bracketing")
        if flo == 0.0 or fhi == 0.0 or (flo > 0.0) != (fhi > 0.0):
            return lo, hi, flo, fhi
        if abs(flo) < abs(fhi):
            lo *= 0.5
            flo = f(lo)
        else:
            hi *= 2.0
            fhi = f(hi)
    if not want_sign_change:
        return None
    raise BracketFailureError(f"no sign change in [{lo}, {hi}] after 60 doublings")


def solve_x0(mu: SpectralMeasure) -> SaddleSolution | None:
    """Unique positive root of (1/n) sum (atom + x^2)^{-1} = 1, if any.

    Returns None when the inverse moment at 0+ is <= 1 (z outside the support
    region; the equation then has no nonnegative root).
    """
    if inverse_moment(mu) <= 1.0:
        return None

    def f(x):
        return stieltjes(mu, x * x, 1) - 1.0

    def dfdx(x):
        return -2.0 * x * stieltjes(mu, x * x, 2)

    # The root satisfies x <= 1 because the moment sum is bounded by 1/x^2.
    lo, hi, flo, fhi = _expand_bracket(f, 1e-8, 1.0 + 1e-9)
    x, residual, bracket = _bisect_newton(f, dfdx, lo, hi, flo, fhi)
    return SaddleSolution(x=x, residual=residual, kind="x0", bracket=bracket)


def solve_x_eps(mu: SpectralMeasure, eps: float) -> SaddleSolution:
    """Unique positive root of 1 - (1/n) sum (atom + x^2)^{-1} = eps / x.

    The left side increases and eps/x decreases, so exactly one positive
    solution exists for every z; it always satisfies x > eps.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")

    def f(x):
        return 1.0 - stieltjes(mu, x * x, 1) - eps / x

    def dfdx(x):
        return 2.0 * x * stieltjes(mu, x * x, 2) + eps / (x * x)

    # f(eps) < 0 and f(1 + eps) >= 0 (moment sum <= 1/x^2), so the root lies
    # in (eps, 1 + eps]; keep the expanding search as a NaN guard.
    lo, hi, flo, fhi = _expand_bracket(f, eps, 1.0 + eps + 1e-9)
    x, residual, bracket = _bisect_newton(f, dfdx, lo, hi, flo, fhi)
    return SaddleSolution(x=x, residual=residual, kind="x_eps", bracket=bracket, eps=eps)


# -- resolvent traces ----------------------------------------------------------


def trace_t1(a: np.ndarray, z: complex, x: float) -> complex:
    """tr_n (A - z) G(x)^2 with G(x) = (Y0(z) + x)^{-1}, via two PD solves."""
    if x <= 0.0:
        raise ValueError("x must be positive")
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    y0, _ = hermitize(a, z)
    fac = cholesky(y0 + x * np.eye(n))
    b = a - z * np.eye(n)
    m = solve_hermitian_pd(fac, solve_hermitian_pd(fac, b))
    return complex(np.trace(m) / n)


def trace_t2(a: np.ndarray, z: complex, x: float) -> float:
    """tr_n G(x) G~(x), the product of the two one-sided resolvents."""
    if x <= 0.0:
        raise ValueError("x must be positive")
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    y0, y0t = hermitize(a, z)
    g = solve_hermitian_pd(cholesky(y0 + x * eye), eye)
    gt = solve_hermitian_pd(cholesky(y0t + x * eye), eye)
    return float(np.real(np.sum(g * gt.T)) / n)


# -- evaluation backends -------------------------------------------------------


def is_normal(a: np.ndarray, tol: float = NORMALITY_TOL) -> bool:
    """True when A commutes with A* within tol * max(1, |A|_max)^2."""
    a = np.asarray(a, dtype=np.complex128)
    ah = a.conj().T
    scale = max(1.0, max_abs(a)) ** 2
    return max_abs(a @ ah - ah @ a) <= tol * scale


class NormalBackend:
    """Closed-form atoms and traces for a normal deformation.

    For normal A = U diag(a_i) U*, both Hermitizations diagonalize in the same
    basis with eigenvalues |a_i - z|^2, so every trace reduces to an O(n) sum.
    """

    def __init__(self, eigenvalues: np.ndarray):
        self.eigenvalues = np.asarray(eigenvalues, dtype=np.complex128)

    def measure(self, z: complex) -> SpectralMeasure:
        return SpectralMeasure(np.sort(np.abs(self.eigenvalues - z) ** 2))

    def t1(self, z: complex, x: float) -> complex:
        d = self.eigenvalues - z
        return complex(np.mean(d / (np.abs(d) ** 2 + x) ** 2))

    def t2(self, z: complex, x: float) -> float:
        d2 = np.abs(self.eigenvalues - z) ** 2
        return float(np.mean((d2 + x) ** (-2)))


class DenseBackend:
    """Generic dense-matrix evaluation (per-z eigensolve and PD solves)."""

    def __init__(self, a: np.ndarray):
        self.a = np.asarray(a, dtype=np.complex128)

    def measure(self, z: complex) -> SpectralMeasure:
        return nu_measure(self.a, z)

    def t1(self, z: complex, x: float) -> complex:
        return trace_t1(self.a, z, x)

    def t2(self, z: complex, x: float) -> float:
        return trace_t2(self.a, z, x)


def spectral_backend(a: np.ndarray, normal_tol: float = NORMALITY_TOL):
    """Pick the closed-form backend for normal A, the dense one otherwise."""
    a = np.asarray(a, dtype=np.complex128)
    if is_normal(a, normal_tol):
        return NormalBackend(np.linalg.eigvals(a))
    return DenseBackend(a)


# -- support region ------------------------------------------------------------


@dataclass(frozen=True)
class DomainVerdict:
    """Membership of z in the support region D."""

    in_D: bool
    min_eig_Y0: float
    inv_trace: float   # tr_n Y0^{-1}; +inf sentinel when Y0 is singular


def verdict_from_measure(mu: SpectralMeasure) -> DomainVerdict:
    min_eig = float(mu.atoms[0])
    inv = inverse_moment(mu)
    return DomainVerdict(in_D=bool(min_eig <= singular_tolerance(mu) or inv >= 1.0),
                         min_eig_Y0=min_eig, inv_trace=inv)


def domain_verdict(a: np.ndarray, z: complex) -> DomainVerdict:
    """Decide whether z lies in D = {Y0 singular} u {tr_n Y0^{-1} >= 1}."""
    return verdict_from_measure(nu_measure(a, z))


# -- boundary tracing ----------------------------------------------------------


@dataclass
class BoundaryPolyline:
    """Level-set polylines of tr_n Y0(z)^{-1} = 1, one list of points per loop."""

    segments: list          # list of np.ndarray of complex vertices
    closed: list            # bool per loop
    window: tuple
    resolution: int
    boundary_tol: float

    def to_csv(self, path) -> None:
        """Rows "loop_id,re,im", loops in traced order."""
        from pathlib import Path
        lines = ["loop_id,re,im"]
        for loop_id, pts in enumerate(self.segments):
            for p in pts:
                lines.append(f"{loop_id},{p.real:.17g},{p.imag:.17g}")
        Path(path).write_text("\n".join(lines) + "\n")

    def metadata(self) -> dict:
        return {"window": list(self.window), "resolution": self.resolution,
                "boundary_tol": self.boundary_tol,
                "loops": len(self.segments),
                "closed": [bool(c) for c in self.closed]}

    def to_json(self, path) -> None:
        import json
        from pathlib import Path
        Path(path).write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")


def _loop_is_ccw(points: np.ndarray) -> bool:
    x, y = points.real, points.imag
    area2 = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    return area2 > 0.0


def trace_boundary(a: np.ndarray, window, resolution: int,
                   boundary_tol: float = BOUNDARY_TOL,
                   backend=None) -> BoundaryPolyline:
    """March the level set tr_n Y0(z)^{-1} = 1 on a resolution^2 cell grid.

    Each crossing vertex is refined by bisection along its cell edge until
    |tr_n Y0^{-1} - 1| <= boundary_tol; saddle cells are disambiguated by the
    sign at the cell center; closed loops are oriented counterclockwise.
    """
    re_min, re_max, im_min, im_max = map(float, window)
    if not (re_max > re_min and im_max > im_min):
        raise ValueError("window must be a nonempty rectangle")
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    if backend is None:
        backend = spectral_backend(a)

    def level(z: complex) -> float:
        inv = inverse_moment(backend.measure(z))
        return inv - 1.0 if math.isfinite(inv) else math.inf

    xs = np.linspace(re_min, re_max, resolution + 1)
    ys = np.linspace(im_min, im_max, resolution + 1)
    f = np.empty((resolution + 1, resolution + 1))
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            f[j, i] = level(complex(x, y))
    pos = f > 0.0
    if pos.all() or (~pos).all():
        raise EmptyBoundaryError("level function has constant sign on the window")

    def refine(p_neg: complex, p_pos: complex) -> complex:
        for _ in range(100):
            mid = 0.5 * (p_neg + p_pos)
            fm = level(mid)
            if abs(fm) <= boundary_tol:
                return mid
            if fm > 0.0:
                p_pos = mid
            else:
                p_neg = mid
        return 0.5 * (p_neg + p_pos)

    # Edge ids: ("h", i, j) joins node (i,j)-(i+1,j); ("v", i, j) joins (i,j)-(i,j+1).
    vertex_cache: dict[tuple, complex] = {}

    def crossing(edge) -> complex:
        if edge in vertex_cache:
            return vertex_cache[edge]
        kind, i, j = edge
        if kind == "h":
            pa, pb = complex(xs[i], ys[j]), complex(xs[i + 1], ys[j])
            sa = pos[j, i]
        else:
            pa, pb = complex(xs[i], ys[j]), complex(xs[i], ys[j + 1])
            sa = pos[j, i]
        p = refine(pb, pa) if sa else refine(pa, pb)
        vertex_cache[edge] = p
        return p

    # Cell corner order: 0=(i,j), 1=(i+1,j), 2=(i+1,j+1), 3=(i,j+1); edge k
    # joins corners k and (k+1) % 4.
    def cell_edges(i, j):
        return (("h", i, j), ("v", i + 1, j), ("h", i, j + 1), ("v", i, j))

    segments: list[tuple] = []
    for j in range(resolution):
        for i in range(resolution):
            code = (int(pos[j, i]) | int(pos[j, i + 1]) << 1
                    | int(pos[j + 1, i + 1]) << 2 | int(pos[j + 1, i]) << 3)
            if code in (0, 15):
                continue
            edges = cell_edges(i, j)
            crossed = [k for k in range(4)
                       if _corner(pos, i, j, k) != _corner(pos, i, j, (k + 1) % 4)]
            if len(crossed) == 2:
                segments.append((edges[crossed[0]], edges[crossed[1]]))
            elif len(crossed) == 4:
                # Saddle cell: pair crossings so the positive region at the
                # cell center stays connected.
                center = complex(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))
                center_pos = level(center) > 0.0
                corner0_pos = bool(pos[j, i])
                if center_pos == corner0_pos:
                    segments.append((edges[0], edges[1]))
                    segments.append((edges[2], edges[3]))
                else:
                    segments.append((edges[3], edges[0]))
                    segments.append((edges[1], edges[2]))

    # Chain segments into polylines via shared edge ids.
    adjacency: dict[tuple, list[int]] = {}
    for idx, (e1, e2) in enumerate(segments):
        adjacency.setdefault(e1, []).append(idx)
        adjacency.setdefault(e2, []).append(idx)
    used = [False] * len(segments)
    loops, closed_flags = [], []
    for start in range(len(segments)):
        if used[start]:
            continue
        chain = list(segments[start])
        used[start] = True
        for head in (0, 1):
            while True:
                end = chain[-1] if head == 0 else chain[0]
                nxt = [k for k in adjacency.get(end, []) if not used[k]]
                if not nxt:
                    break
                k = nxt[0]
                used[k] = True
                e1, e2 = segments[k]
                new = e2 if e1 == end else e1
                if head == 0:
                    chain.append(new)
                else:
                    chain.insert(0, new)
            if chain[0] == chain[-1]:
                break
        is_closed = len(chain) > 2 and chain[0] == chain[-1]
        pts = np.array([crossing(e) for e in (chain[:-1] if is_closed else chain)])
        if is_closed and not _loop_is_ccw(pts):
            pts = pts[::-1]
        loops.append(pts)
        closed_flags.append(is_closed)

    return BoundaryPolyline(segments=loops, closed=closed_flags,
                            window=(re_min, re_max, im_min, im_max),
                            resolution=resolution, boundary_tol=boundary_tol)


def _corner(pos, i, j, k):
    if k == 0:
        return bool(pos[j, i])
    if k == 1:
        return bool(pos[j, i + 1])
    if k == 2:
        return bool(pos[j + 1, i + 1])
    return bool(pos[j + 1, i])
