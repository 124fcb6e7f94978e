"""Standard form of a full matrix algebra ``M_d`` with a faithful state.

The algebra acts by left multiplication on the Hilbert-Schmidt space of
``d x d`` matrices; the cyclic and separating vector is ``Omega = rho**(1/2)``.
With this choice

* ``Delta**(iz) X = rho**(iz) X rho**(-iz)``,
* ``J X = X^*``,
* the modular group is ``sigma_t(A) = rho**(it) A rho**(-it)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import (
    SpectralDecomposition,
    as_matrix,
    dagger,
    eigh,
    frozen,
    hs_inner,
    matrix_units,
    orthonormal_basis,
    spectral_map,
    spectral_norm,
)

FAITHFUL_RATIO = 1e-12


class NotFaithfulError(ValueError):
    """The density matrix is (numerically) not faithful."""


@dataclass(frozen=True)
class AlgebraSpec:
    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("algebra dimension must be >= 1")


def check_density(rho, tol: float = 1e-12, ratio: float = FAITHFUL_RATIO) -> SpectralDecomposition:
    """Validate a faithful density matrix and return its spectral data."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    D = eigh(rho)
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix has trace {np.trace(rho).real!r}, expected 1")
    lo, hi = D.eigenvalues[0], D.eigenvalues[-1]
    if lo <= 0 or lo / hi < ratio:
        raise NotFaithfulError(
            f"state not faithful: eigenvalue ratio {lo / hi:.3e} below guard {ratio:.0e}"
        )
    return D


@dataclass(frozen=True)
class StandardForm:
    spec: AlgebraSpec
    rho: np.ndarray
    spectrum: SpectralDecomposition
    omega: np.ndarray
    h: np.ndarray
    ratio: float

    @property
    def dim(self) -> int:
        return self.spec.dim

    def rho_power(self, s: complex) -> np.ndarray:
        """``rho**s`` for any complex ``s`` (``rho`` is strictly positive)."""
        return spectral_map(self.spectrum, lambda lam: np.exp(s * np.log(lam)))

    def vector(self, A) -> np.ndarray:
        """The vector ``A Omega`` of the representation space."""
        return np.asarray(A) @ self.omega


def build_standard_form(spec: AlgebraSpec | int, rho) -> StandardForm:
    if not isinstance(spec, AlgebraSpec):
        spec = AlgebraSpec(int(spec))
    rho = as_matrix(rho)
    if rho.shape != (spec.dim, spec.dim):
        raise ValueError(f"density matrix shape {rho.shape} does not match dim {spec.dim}")
    D = check_density(rho)
    omega = spectral_map(D, np.sqrt)
    h = spectral_map(D, np.log)
    ratio = float(D.eigenvalues[-1] / D.eigenvalues[0])
    sf = StandardForm(spec, frozen(0.5 * (rho + dagger(rho))), D, omega, h, ratio)
    # Omega is cyclic and separating iff {E_ij Omega} is a basis of the HS space
    frame = orthonormal_basis([sf.vector(u) for u in matrix_units(spec.dim)])
    if frame.dim != spec.dim ** 2:
        raise NotFaithfulError("state not faithful: Omega is not cyclic")
    return sf


def delta_power(sf: StandardForm, z: complex, X) -> np.ndarray:
    """``Delta**(iz) X = rho**(iz) X rho**(-iz)``."""
    return sf.rho_power(1j * z) @ np.asarray(X) @ sf.rho_power(-1j * z)


def modular_flow(sf: StandardForm, t: float, A) -> np.ndarray:
    u = sf.rho_power(1j * t)
    return u @ np.asarray(A) @ dagger(u)


def modular_conjugation(sf: StandardForm, X) -> np.ndarray:
    return dagger(np.asarray(X))


def tomita(sf: StandardForm, X) -> np.ndarray:
    """``S = J Delta**(1/2)``, mapping ``A Omega`` to ``A^* Omega``."""
    return modular_conjugation(sf, delta_power(sf, -0.5j, X))


def modular_condition_defect(sf: StandardForm, A, B) -> float:
    """``|<Delta^(1/2) A Omega, Delta^(1/2) B Omega> - <B^* Omega, A^* Omega>|``."""
    A = np.asarray(A)
    B = np.asarray(B)
    lhs = hs_inner(delta_power(sf, -0.5j, sf.vector(A)), delta_power(sf, -0.5j, sf.vector(B)))
    rhs = hs_inner(sf.vector(dagger(B)), sf.vector(dagger(A)))
    return abs(lhs - rhs)


def delta_norm(sf: StandardForm, z: complex) -> float:
    """Operator norm of ``Delta**(iz)`` computed from the materialized map."""
    a = sf.rho_power(1j * z)
    b = sf.rho_power(-1j * z)
    return spectral_norm(np.kron(a, b.T))
