"""Deformation matrices A and Ginibre noise H with E h = E h^2 = 0, E|h|^2 = 1/n.

Noise streams are counter-based (Philox keyed by (seed, stream)), so sampling
is reproducible bit-for-bit regardless of how work is split across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSpecError

KINDS = ("zero", "diagonal", "jordan", "wigner", "ginibre", "file")


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for a deformation matrix A.

    kind:
      zero      -- A = 0
      diagonal  -- diag of ``atoms`` repeated per ``multiplicities``
      jordan    -- block-diagonal 2x2 Jordan cells [[lam, 1], [0, lam]] (n even)
      wigner    -- Hermitian Gaussian matrix, semicircle support [-2, 2]
      ginibre   -- an independent Ginibre sample used as deformation
      file      -- dense matrix read from ``path`` (see read_matrix_file)
    """

    kind: str
    n: int
    atoms: tuple = ()          # diagonal: complex values
    multiplicities: tuple = () # diagonal: positive ints summing to n
    eigenvalue: complex = 0.0  # jordan cell eigenvalue
    seed: int = 0              # wigner / ginibre construction seed
    path: str = ""             # file kind
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpecError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1:
            raise InvalidSpecError("n must be a positive integer")
        if self.kind == "diagonal":
            if len(self.atoms) != len(self.multiplicities) or not self.atoms:
                raise InvalidSpecError("diagonal needs matching atoms/multiplicities")
            if any(m < 1 for m in self.multiplicities):
                raise InvalidSpecError("multiplicities must be positive")
            if sum(self.multiplicities) != self.n:
                raise InvalidSpecError(
                    f"multiplicities sum to {sum(self.multiplicities)}, expected n={self.n}"
                )
        if self.kind == "jordan" and self.n % 2 != 0:
            raise InvalidSpecError("jordan kind builds 2x2 cells and needs even n")
        if self.kind == "file" and not self.path:
            raise InvalidSpecError("file kind needs a path")


@dataclass(frozen=True)
class NoiseSample:
    """One Ginibre draw plus the (seed, stream) key that reproduces it."""

    matrix: np.ndarray
    seed: int
    stream_index: int


def _stream_rng(seed: int, stream: int) -> np.random.Generator:
    # Philox is counter-based; distinct (seed, stream) keys give independent,
    # worker-count-independent streams.
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF,
                                                     stream & 0xFFFFFFFFFFFFFFFF]))


def _complex_gaussian(rng: np.random.Generator, shape, var: float) -> np.ndarray:
    # Box-Muller in polar form: exact complex normal, fixed draw count.
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    radius = np.sqrt(-var * np.log1p(-u1))
    return radius * np.exp(2j * np.pi * u2)


def sample_ginibre(n: int, seed: int, stream: int = 0) -> NoiseSample:
    """Sample H with i.i.d. complex Gaussian entries, E|h_ij|^2 = 1/n."""
    if n < 1:
        raise InvalidSpecError("n must be >= 1")
    rng = _stream_rng(seed, stream)
    h = _complex_gaussian(rng, (n, n), 1.0 / n)
    return NoiseSample(matrix=h, seed=seed, stream_index=stream)


def random_unitary(n: int, seed: int, stream: int = 0) -> np.ndarray:
    """Haar-like unitary from the QR orthonormalization of a Ginibre sample."""
    g = sample_ginibre(n, seed, stream).matrix
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def build_deformation(spec: EnsembleSpec) -> np.ndarray:
    """Construct A from its spec; deterministic for a fixed spec."""
    n = spec.n
    if spec.kind == "zero":
        return np.zeros((n, n), dtype=np.complex128)
    if spec.kind == "diagonal":
        diag = np.concatenate(
            [np.full(m, complex(a)) for a, m in zip(spec.atoms, spec.multiplicities)]
        )
        return np.diag(diag).astype(np.complex128)
    if spec.kind == "jordan":
        cell = np.array([[spec.eigenvalue, 1.0], [0.0, spec.eigenvalue]],
                        dtype=np.complex128)
        blocks = [cell] * (n // 2)
        a = np.zeros((n, n), dtype=np.complex128)
        for k, b in enumerate(blocks):
            a[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = b
        return a
    if spec.kind == "wigner":
        # (G + G*)/sqrt(2) keeps E|a_ij|^2 = 1/n, so the eigenvalue
        # distribution converges to the semicircle supported on [-2, 2].
        g = sample_ginibre(n, spec.seed, stream=0).matrix
        return (g + g.conj().T) / np.sqrt(2.0)
    if spec.kind == "ginibre":
        return sample_ginibre(n, spec.seed, stream=0).matrix
    if spec.kind == "file":
        return read_matrix_file(spec.path, expected_n=n)
    raise InvalidSpecError(f"unknown ensemble kind {spec.kind!r}")


def hermitize(a: np.ndarray, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """Return Y0 = (A - z)(A - z)* and Y0~ = (A - z)*(A - z)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidSpecError(f"A must be square, got shape {a.shape}")
    b = a - z * np.eye(a.shape[0], dtype=np.complex128)
    bh = b.conj().T
    return b @ bh, bh @ b


# -- matrix file format -------------------------------------------------------
#
# Dense CSV, row-major. First line "n=<integer>", then n lines of n cells,
# each cell "re:im" with decimal reals (scientific notation accepted,
# surrounding whitespace ignored).


def read_matrix_file(path, expected_n: int | None = None) -> np.ndarray:
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].replace(" ", "").startswith("n="):
        raise InvalidSpecError(f"{path}: first line must be 'n=<integer>'")
    try:
        n = int(lines[0].split("=", 1)[1].strip())
    except ValueError as exc:
        raise InvalidSpecError(f"{path}: unreadable dimension line {lines[0]!r}") from exc
    if n < 1:
        raise InvalidSpecError(f"{path}: dimension must be positive")
    if expected_n is not None and n != expected_n:
        raise InvalidSpecError(f"{path}: file is {n}x{n}, spec says n={expected_n}")
    if len(lines) - 1 != n:
        raise InvalidSpecError(f"{path}: expected {n} rows, found {len(lines) - 1}")
    out = np.empty((n, n), dtype=np.complex128)
    for i, ln in enumerate(lines[1:]):
        cells = ln.split(",")
        if len(cells) != n:
            raise InvalidSpecError(f"{path}: row {i} has {len(cells)} cells, expected {n}")
        for j, cell in enumerate(cells):
            parts = cell.strip().split(":")
            if len(parts) != 2:
                raise InvalidSpecError(f"{path}: cell ({i},{j}) is not 're:im'")
            try:
                out[i, j] = complex(float(parts[0]), float(parts[1]))
            except ValueError as exc:
                raise InvalidSpecError(f"{path}: bad number in cell ({i},{j})") from exc
    return out


def write_matrix_file(path, a: np.ndarray) -> None:
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    rows = [f"n={n}"]
    for i in range(n):
        rows.append(",".join(f"{a[i, j].real:.17g}:{a[i, j].imag:.17g}" for j in range(n)))
    Path(path).write_text("\n".join(rows) + "\n")
