"""The compressed algebra ``E A E`` and its modular data.

``A_E`` is identified with ``M_k`` through an isometry ``V`` with
``V V^* = E``.  The Tomita map of a candidate vector ``Omega_E`` is stored
as a linear matrix ``M`` acting on *conjugated* coordinates in an
orthonormal frame of ``H_E``: ``S(v) = M conj(v)``.  Then
``Delta_E = S^* S = M^T conj(M)`` is an ordinary Hermitian matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import SubspaceFrame, ZenoInstance, ZenoLimit, w_apply
from .numerics import dagger, richardson, eigh, frozen, hs_inner, hs_norm, spectral_map, spectral_norm


class NonCommutingError(ValueError):
    pass


class TomitaError(ValueError):
    pass


@dataclass(frozen=True)
class CompressedAlgebra:
    V: np.ndarray
    E: np.ndarray

    @property
    def k(self) -> int:
        return self.V.shape[1]

    def compress(self, A) -> np.ndarray:
        """``A_E -> V^* A_E V`` in ``M_k``."""
        return dagger(self.V) @ np.asarray(A) @ self.V

    def embed(self, a) -> np.ndarray:
        return self.V @ np.asarray(a) @ dagger(self.V)

    def basis(self) -> list:
        """Compressed matrix units ``V e_i e_j^T V^*``, row-major in ``(i, j)``."""
        k = self.k
        return [np.outer(self.V[:, i], self.V[:, j].conj()) for i in range(k) for j in range(k)]


def compress(inst: ZenoInstance, tol: float = 1e-10) -> CompressedAlgebra:
    D = eigh(inst.E)
    V = D.eigenvectors[:, ::-1][:, : inst.k]
    if abs(D.eigenvalues[-inst.k] - 1.0) > 1e-8 or (inst.k < inst.dim and abs(D.eigenvalues[-inst.k - 1]) > 1e-8):
        raise ValueError(f"projection rank is inconsistent with k={inst.k}")
    V = frozen(V)
    if spectral_norm(V @ dagger(V) - inst.E) > tol or spectral_norm(dagger(V) @ V - np.eye(inst.k)) > tol:
        raise ValueError("compression isometry failed its invariants")
    return CompressedAlgebra(V, inst.E)


def is_compressed(E: np.ndarray, A, tol: float = 1e-10) -> bool:
    A = np.asarray(A)
    return spectral_norm(A - E @ A @ E) <= tol


def tau_e(zl: ZenoLimit, t: float, A_E) -> np.ndarray:
    """``tau^E_t(A_E) = u_t A_E u_t^*`` with ``u_t = exp(i t h_E) E``."""
    A_E = np.asarray(A_E)
    if not is_compressed(zl.inst.E, A_E):
        raise ValueError("operator is not in E A E")
    u = zl.left(t)
    return u @ A_E @ dagger(u)


@dataclass(frozen=True)
class SubState:
    omega_e: np.ndarray
    provenance: str = "user-supplied"


def validate_state(ca: CompressedAlgebra, frame: SubspaceFrame, omega_e, provenance: str = "user-supplied",
                   tol: float = 1e-10) -> SubState:
    X = np.asarray(omega_e, dtype=complex)
    if abs(hs_norm(X) - 1.0) > tol:
        raise ValueError("Omega_E must have unit norm")
    if hs_norm(frame.he.project(X) - X) > tol:
        raise ValueError("Omega_E does not lie in H_E")
    coords = np.stack([frame.he.coordinates(a @ X) for a in ca.basis()], axis=1)
    s = np.linalg.svd(coords, compute_uv=False)
    if coords.shape[0] != coords.shape[1] or s[-1] <= 1e-10 * s[0]:
        raise TomitaError("Omega_E is not cyclic and separating for A_E")
    return SubState(frozen(X), provenance)


def commuting_default_state(inst: ZenoInstance, ca: CompressedAlgebra, frame: SubspaceFrame) -> SubState:
    """``E Omega / ||E Omega||``, sanctioned only when ``[E, rho] = 0``."""
    if not inst.commuting:
        raise NonCommutingError("non-commuting instance: no default Omega_E")
    X = inst.E @ inst.sf.omega
    return validate_state(ca, frame, X / hs_norm(X), "commuting-default")


@dataclass(frozen=True)
class TomitaData:
    S_matrix: np.ndarray
    Delta_E: np.ndarray
    coords: np.ndarray
    omega_coords: np.ndarray
    spectrum: object

    def apply_S(self, c: np.ndarray) -> np.ndarray:
        return self.S_matrix @ np.conj(c)

    def delta_power(self, s: complex, c: np.ndarray) -> np.ndarray:
        """``Delta_E**s`` on frame coordinates."""
        return spectral_map(self.spectrum, lambda lam: np.exp(s * np.log(lam))) @ c


def tomita_build(ca: CompressedAlgebra, frame: SubspaceFrame, st: SubState, tol: float = 1e-9) -> TomitaData:
    basis = ca.basis()
    k = ca.k
    X = np.stack([frame.he.coordinates(a @ st.omega_e) for a in basis], axis=1)
    # the adjoint of unit (i, j) is unit (j, i)
    swap = [j * k + i for i in range(k) for j in range(k)]
    Y = X[:, swap]
    try:
        M = Y @ np.linalg.inv(np.conj(X))
    except np.linalg.LinAlgError as exc:
        raise TomitaError("Omega_E is not cyclic and separating for A_E") from exc
    Delta = M.T @ np.conj(M)
    Delta = 0.5 * (Delta + dagger(Delta))
    D = eigh(Delta, tol=1e-8)
    w = frame.he.coordinates(st.omega_e)
    data = TomitaData(frozen(M), frozen(Delta), frozen(X), frozen(w), D)
    if spectral_norm(M @ np.conj(M) - np.eye(M.shape[0])) > tol * max(1.0, spectral_norm(M)) ** 2:
        raise TomitaError("Tomita map is not an involution")
    if np.linalg.norm(Delta @ w - w) > tol * max(1.0, spectral_norm(Delta)):
        raise TomitaError("Delta_E does not fix Omega_E")
    if D.eigenvalues[0] <= 0:
        raise TomitaError("Delta_E is not positive definite")
    return data


def tomita_modular_defect(ca: CompressedAlgebra, td: TomitaData) -> float:
    """Largest modular-condition defect of ``(A_E, Omega_E)`` over basis pairs."""
    k = ca.k
    half = np.stack([td.delta_power(0.5, td.coords[:, m]) for m in range(k * k)], axis=1)
    swap = [j * k + i for i in range(k) for j in range(k)]
    star = td.coords[:, swap]
    lhs = dagger(half) @ half
    # <B^* Omega_E, A^* Omega_E> for A = unit a, B = unit b
    rhs = (dagger(star) @ star).T
    return float(np.max(np.abs(lhs - rhs)))


# -- condition (iii) ------------------------------------------------------------

@dataclass(frozen=True)
class ConditionRecord:
    ts: tuple
    lhs: tuple
    extrapolated: complex
    error_estimate: float
    rhs: complex
    defect: float
    stable: bool


def condition_iii_lhs(zl: ZenoLimit, omega_e, A_E, B_E, t: float) -> complex:
    X = np.asarray(A_E) @ omega_e
    Y = np.asarray(B_E) @ omega_e
    return hs_inner(w_apply(zl, -t - 0.5j, X), w_apply(zl, t - 0.5j, Y))


def condition_iii_check(zl: ZenoLimit, frame: SubspaceFrame, st: SubState, td: TomitaData, A_E, B_E,
                        t_seq: Sequence[float] = (1 / 8, 1 / 16, 1 / 32, 1 / 64), slack: float = 1e-12) -> ConditionRecord:
    """Extrapolate the condition-(iii) inner product to ``t = 0`` and compare.

    The left side is averaged over ``+t`` and ``-t``, which leaves an even
    expansion in ``t``; the Richardson tableau then removes ``t^2, t^4, ...``.
    """
    ts = [float(t) for t in t_seq]
    if len(ts) < 4 or any(t <= 0 for t in ts) or any(abs(b - a / 2) > 1e-15 * a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_seq must be positive, halving, with at least four terms")
    vals = [0.5 * (condition_iii_lhs(zl, st.omega_e, A_E, B_E, t) + condition_iii_lhs(zl, st.omega_e, A_E, B_E, -t))
            for t in ts]
    # ratio 4 per halving for an expansion in t^2
    extrap = complex(richardson(vals, ratio=4.0))
    prev = complex(richardson(vals[:-1], ratio=4.0))
    err = abs(extrap - prev)
    residuals = [abs(v - extrap) for v in vals]
    stable = all(b <= a + slack for a, b in zip(residuals, residuals[1:]))
    a = frame.he.coordinates(np.asarray(A_E) @ st.omega_e)
    b = frame.he.coordinates(np.asarray(B_E) @ st.omega_e)
    rhs = complex(np.vdot(td.delta_power(0.5, a), td.delta_power(0.5, b)))
    return ConditionRecord(tuple(ts), tuple(vals), extrap, err, rhs, abs(extrap - rhs), stable)


# -- identification ---------------------------------------------------------------

@dataclass
class ModularMatch:
    defects: list = field(default_factory=list)
    threshold: float = 1e-8

    @property
    def max_defect(self) -> float:
        return max((d for *_, d in self.defects), default=0.0)

    @property
    def verdict(self) -> str:
        return "identified" if self.max_defect <= self.threshold else "not identified"


def modular_match(zl: ZenoLimit, ca: CompressedAlgebra, frame: SubspaceFrame, st: SubState, td: TomitaData,
                  t_grid: Sequence[float], threshold: float = 1e-8) -> ModularMatch:
    """Compare ``tau^E_t(A_E) Omega_E`` with ``Delta_E**(it) A_E Omega_E``."""
    out = ModularMatch(threshold=threshold)
    for t in t_grid:
        for m, a in enumerate(ca.basis()):
            lhs = tau_e(zl, t, a) @ st.omega_e
            rhs = frame.he.from_coordinates(td.delta_power(1j * t, td.coords[:, m]))
            out.defects.append((float(t), m, hs_norm(lhs - rhs)))
    return out
