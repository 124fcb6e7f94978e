"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Operators on
the Hilbert-Schmidt space of ``d x d`` matrices are flattened in row-major
order, so that ``vec(a @ X @ b) == kron(a, b.T) @ vec(X)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np


class NumericalFailure(RuntimeError):
    """A numerical routine failed to produce a trustworthy result."""


def as_matrix(M, copy: bool = True) -> np.ndarray:
    """Return ``M`` as a read-only complex 2-D array, rejecting NaN/Inf."""
    A = np.array(M, dtype=complex, copy=copy)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    A.setflags(write=False)
    return A


def frozen(A: np.ndarray) -> np.ndarray:
    A = np.ascontiguousarray(A)
    A.setflags(write=False)
    return A


def dagger(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def spectral_norm(M) -> float:
    """Largest singular value of ``M`` (0 for an empty or zero matrix)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def hermiticity_defect(M: np.ndarray) -> float:
    return spectral_norm(M - dagger(M))


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in ascending order and the unitary of eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ dagger(U)


def eigh(M, tol: float = 1e-10) -> SpectralDecomposition:
    """Hermitian eigendecomposition with ascending eigenvalues.

    Raises ``ValueError`` when ``M`` is not Hermitian within
    ``tol * max(1, ||M||)`` and :class:`NumericalFailure` when LAPACK does
    not converge.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"eigh needs a square matrix, got shape {M.shape}")
    scale = max(1.0, spectral_norm(M))
    if hermiticity_defect(M) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    try:
        w, U = np.linalg.eigh(0.5 * (M + dagger(M)))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    return SpectralDecomposition(frozen(w), frozen(U))


def spectral_map(D: SpectralDecomposition, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``f`` through the spectral calculus: ``sum_k f(l_k) u_k u_k^*``.

    ``f`` receives the whole eigenvalue array and must return finite values.
    """
    with np.errstate(all="ignore"):
        fw = np.asarray(f(D.eigenvalues), dtype=complex)
    if fw.shape != D.eigenvalues.shape or not np.all(np.isfinite(fw)):
        raise ValueError("function is undefined at an eigenvalue")
    U = D.eigenvectors
    return frozen((U * fw) @ dagger(U))


def positive_power(D: SpectralDecomposition, s: complex, cutoff: float = 0.0) -> np.ndarray:
    """``M**s`` for positive semidefinite ``M``; the kernel maps to 0.

    Eigenvalues ``<= cutoff`` are treated as the kernel (support convention),
    which avoids ``0**(it)``.
    """
    w = D.eigenvalues
    keep = w > cutoff

    def f(lam):
        out = np.zeros_like(lam, dtype=complex)
        out[keep] = np.exp(s * np.log(lam[keep]))
        return out

    return spectral_map(D, f)


def hs_inner(X, Y) -> complex:
    """Hilbert-Schmidt inner product ``trace(X^* Y)``, antilinear in ``X``."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape:
        raise ValueError(f"shape mismatch {X.shape} vs {Y.shape}")
    return complex(np.vdot(X, Y))


def hs_norm(X) -> float:
    return float(np.linalg.norm(np.asarray(X)))


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis of a subspace of ``d x d`` matrices and its projector.

    ``basis`` has shape ``(m, d, d)``; ``columns`` is the same basis as a
    ``d^2 x m`` matrix of row-major vectorizations.
    """

    basis: np.ndarray
    columns: np.ndarray
    shape: tuple

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.columns @ dagger(self.columns)

    def project(self, X: np.ndarray) -> np.ndarray:
        v = np.asarray(X).reshape(-1)
        return (self.columns @ (dagger(self.columns) @ v)).reshape(self.shape)

    def coordinates(self, X: np.ndarray) -> np.ndarray:
        return dagger(self.columns) @ np.asarray(X).reshape(-1)

    def from_coordinates(self, c: np.ndarray) -> np.ndarray:
        return (self.columns @ c).reshape(self.shape)


def orthonormal_basis(vs: Sequence[np.ndarray], shape: tuple | None = None, rtol: float = 1e-10) -> Subspace:
    """Orthonormalize ``vs`` by SVD, dropping directions below ``rtol``.

    An empty input yields an empty basis and a zero projector; ``shape``
    is then required to size it.
    """
    vs = [np.asarray(v, dtype=complex) for v in vs]
    if not vs:
        if shape is None:
            raise ValueError("shape is required for an empty sequence")
        n = int(np.prod(shape))
        return Subspace(frozen(np.zeros((0,) + tuple(shape), complex)), frozen(np.zeros((n, 0), complex)), tuple(shape))
    shape = vs[0].shape
    A = np.stack([v.reshape(-1) for v in vs], axis=1)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > rtol * s[0]))
    cols = U[:, :rank]
    # fix the phase of every column so the frame is reproducible
    for j in range(rank):
        i = int(np.argmax(np.abs(cols[:, j]) > 1e-8 * np.abs(cols[:, j]).max()))
        cols[:, j] *= np.exp(-1j * np.angle(cols[i, j]))
    basis = np.stack([cols[:, j].reshape(shape) for j in range(rank)]) if rank else np.zeros((0,) + shape, complex)
    return Subspace(frozen(basis), frozen(cols), tuple(shape))


def richardson(values: Sequence, ratio: float = 2.0):
    """Extrapolate ``values[j] ~ L + c_1/n_j + c_2/n_j^2 + ...`` for ``n_j = n_0 ratio^j``.

    Returns the top entry of the Neville tableau; works for arrays.
    """
    col = [np.asarray(v) for v in values]
    if not col:
        raise ValueError("nothing to extrapolate")
    power = 1.0
    while len(col) > 1:
        power *= ratio
        col = [(power * b - a) / (power - 1.0) for a, b in zip(col, col[1:])]
    return col[0]


def matrix_units(d: int) -> list[np.ndarray]:
    """The ``d**2`` matrix units ``E_ij`` in row-major order."""
    units = []
    for i in range(d):
        for j in range(d):
            M = np.zeros((d, d), complex)
            M[i, j] = 1.0
            units.append(M)
    return units


def read_matrix_csv(path, dim: int | None = None) -> np.ndarray:
    """Read the sparse ``i,j,re,im`` interchange format (zero-based indices)."""
    path = Path(path)
    entries = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["i", "j", "re", "im"]:
            raise ValueError(f"{path}: header must be i,j,re,im")
        for line, row in enumerate(reader, start=2):
            try:
                i, j = int(row["i"]), int(row["j"])
                val = complex(float(row["re"]), float(row["im"]))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line}: malformed row") from exc
            if i < 0 or j < 0:
                raise ValueError(f"{path}:{line}: negative index")
            entries.append((i, j, val))
    n = dim if dim is not None else 1 + max([max(i, j) for i, j, _ in entries], default=-1)
    M = np.zeros((n, n), complex)
    for i, j, val in entries:
        if i >= n or j >= n:
            raise ValueError(f"{path}: index ({i},{j}) out of range for dimension {n}")
        M[i, j] += val
    return as_matrix(M, copy=False)


def write_matrix_csv(path, M, atol: float = 0.0) -> None:
    M = np.asarray(M, dtype=complex)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "re", "im"])
        for (i, j), val in np.ndenumerate(M):
            if abs(val) > atol:
                w.writerow([i, j, repr(float(val.real)), repr(float(val.imag))])
