"""Physically motivated instances: spin chains, Gibbs states, region projections,
and the Hamiltonian (Misra-Sudarshan) Zeno mode.

Sites are numbered from 1, site 1 being the leftmost tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .numerics import dagger, eigh, frozen, richardson, spectral_map, spectral_norm
from .standard_form import FAITHFUL_RATIO, NotFaithfulError

MAX_SITES = 10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

MODELS = ("transverse-ising", "heisenberg")


@dataclass(frozen=True)
class SpinChainSpec:
    n_sites: int
    model: str = "transverse-ising"
    J: float = 1.0
    g: float = 1.0
    periodic: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not 1 <= self.n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must be in 1..{MAX_SITES}")

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites


def site_operator(n_sites: int, site: int, op: np.ndarray) -> np.ndarray:
    """``op`` acting on ``site`` (1-based) of an ``n_sites`` chain."""
    factors = [op if s == site else I2 for s in range(1, n_sites + 1)]
    return reduce(np.kron, factors)


def bonds(spec: SpinChainSpec) -> list:
    n = spec.n_sites
    out = [(i, i + 1) for i in range(1, n)]
    if spec.periodic and n > 2:
        out.append((n, 1))
    return out


def build_spin_chain(spec: SpinChainSpec) -> np.ndarray:
    """Hamiltonian of an open (or periodic) chain.

    transverse-ising: ``H = -J sum Z_i Z_{i+1} - g sum X_i``
    heisenberg:       ``H = -J sum (X X + Y Y + Z Z)_{i,i+1} - g sum Z_i``
    """
    n = spec.n_sites
    H = np.zeros((spec.dim, spec.dim), complex)
    if spec.model == "transverse-ising":
        couplings, field = (SZ,), SX
    else:
        couplings, field = (SX, SY, SZ), SZ
    for i, j in bonds(spec):
        for P in couplings:
            H -= spec.J * site_operator(n, i, P) @ site_operator(n, j, P)
    for i in range(1, n + 1):
        H -= spec.g * site_operator(n, i, field)
    return frozen(0.5 * (H + dagger(H)))


def gibbs_state(H, beta: float, ratio: float = FAITHFUL_RATIO) -> np.ndarray:
    """``exp(-beta H) / Z``; refuses states whose eigenvalue ratio drops below ``ratio``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    D = eigh(H)
    spread = float(D.eigenvalues[-1] - D.eigenvalues[0])
    if beta * spread > -np.log(ratio):
        raise NotFaithfulError(
            f"Gibbs state not faithful: beta*spread = {beta * spread:.3f} exceeds {-np.log(ratio):.3f}"
        )
    shifted = D.eigenvalues - D.eigenvalues[0]
    w = np.exp(-beta * shifted)
    w /= w.sum()
    U = D.eigenvectors
    rho = (U * w) @ dagger(U)
    return frozen(0.5 * (rho + dagger(rho)))


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector")
    return v / n


def region_projection(n_sites: int, region: Iterable[int], phi: dict | Sequence | None = None) -> np.ndarray:
    """Identity on ``region`` and ``|phi_i><phi_i|`` on every other site.

    ``phi`` maps outside sites to single-site vectors (a sequence is taken in
    increasing site order); missing entries default to ``|0>``.
    """
    region = sorted(set(int(s) for s in region))
    if not region or len(region) >= n_sites or region[0] < 1 or region[-1] > n_sites:
        raise ValueError("region must be a nonempty proper subset of the sites 1..n_sites")
    outside = [s for s in range(1, n_sites + 1) if s not in region]
    if phi is None:
        phi = {}
    elif not isinstance(phi, dict):
        phi = list(phi)
        if len(phi) != len(outside):
            raise ValueError(f"expected {len(outside)} single-site vectors, got {len(phi)}")
        phi = dict(zip(outside, phi))
    factors = []
    for s in range(1, n_sites + 1):
        if s in region:
            factors.append(I2)
        else:
            v = _unit(phi.get(s, [1.0, 0.0]))
            if v.shape != (2,):
                raise ValueError("single-site vectors must have two components")
            factors.append(np.outer(v, v.conj()))
    return frozen(reduce(np.kron, factors))


# -- Hamiltonian Zeno mode -------------------------------------------------------

@dataclass(frozen=True)
class MSInstance:
    H: np.ndarray
    E: np.ndarray
    psi: np.ndarray | None = None

    def __post_init__(self):
        if spectral_norm(self.H - dagger(self.H)) > 1e-10 * max(1.0, spectral_norm(self.H)):
            raise ValueError("H must be Hermitian")
        if spectral_norm(self.E @ self.E - self.E) > 1e-10 or spectral_norm(self.E - dagger(self.E)) > 1e-10:
            raise ValueError("E must be an orthogonal projection")
        if self.psi is not None and abs(np.linalg.norm(self.psi) - 1.0) > 1e-10:
            raise ValueError("psi must be a unit vector")


@dataclass(frozen=True)
class MSLimit:
    ms: MSInstance
    B: np.ndarray
    spectrum: object

    def w(self, t: float) -> np.ndarray:
        """``W(t) = E exp(-i B t) E``."""
        u = spectral_map(self.spectrum, lambda lam: np.exp(-1j * t * lam))
        return self.ms.E @ u @ self.ms.E


def ms_zeno_limit(ms: MSInstance) -> MSLimit:
    B = ms.E @ ms.H @ ms.E
    B = frozen(0.5 * (B + dagger(B)))
    return MSLimit(ms, B, eigh(B))


def ms_product(ms: MSInstance, t: float, n: int) -> np.ndarray:
    """``[E exp(-i H t/n) E]**n``."""
    D = eigh(ms.H)
    step = ms.E @ spectral_map(D, lambda lam: np.exp(-1j * t * lam / n)) @ ms.E
    return np.linalg.matrix_power(step, n)


def ms_extrapolated(ms: MSInstance, t: float, n_max: int = 1024, levels: int = 7) -> np.ndarray:
    ns = [n_max >> (levels - 1 - j) for j in range(levels)]
    return richardson([ms_product(ms, t, n) for n in ns])


@dataclass(frozen=True)
class SurvivalCurve:
    ts: tuple
    probabilities: tuple
    fitted_c: float
    variance: float

    @property
    def relative_error(self) -> float:
        if self.variance <= 1e-14:
            return abs(self.fitted_c - self.variance)
        return abs(self.fitted_c - self.variance) / self.variance


def survival_probability(ms: MSInstance, t) -> np.ndarray:
    if ms.psi is None:
        raise ValueError("survival needs an initial state psi")
    D = eigh(ms.H)
    amps = dagger(D.eigenvectors) @ ms.psi
    weights = np.abs(amps) ** 2
    t = np.atleast_1d(np.asarray(t, dtype=float))
    overlap = np.exp(-1j * np.multiply.outer(t, D.eigenvalues)) @ weights
    return np.abs(overlap) ** 2


def survival_curve(ms: MSInstance, t_grid: Sequence[float], fit_points: int = 40) -> SurvivalCurve:
    """Survival probabilities on ``t_grid`` and the short-time quadratic coefficient.

    ``1 - p(t) ~ c t^2`` is fitted by least squares on ``0 < t <= 0.01 / ||H||``.
    """
    if ms.psi is None:
        raise ValueError("survival needs an initial state psi")
    p = survival_probability(ms, t_grid)
    scale = max(spectral_norm(ms.H), 1e-12)
    ts = np.linspace(0.0, 0.01 / scale, fit_points + 1)[1:]
    y = 1.0 - survival_probability(ms, ts)
    c = float(np.sum(ts ** 2 * y) / np.sum(ts ** 4))
    psi = ms.psi
    mean = np.vdot(psi, ms.H @ psi).real
    var = float(np.vdot(ms.H @ psi, ms.H @ psi).real - mean ** 2)
    return SurvivalCurve(tuple(float(t) for t in t_grid), tuple(float(x) for x in p), c, max(var, 0.0))


def pauli_locality(M, n_sites: int, max_sites: int = 6) -> dict:
    """Squared Pauli-string weight of ``M`` grouped by the range of each string.

    The range of a string is ``last - first + 1`` over its non-identity sites
    (0 for the identity string).  Weights are ``|tr(P M)|^2 / d^2`` and sum to
    ``||M||_HS^2 / d``.
    """
    if n_sites > max_sites:
        raise ValueError(f"Pauli decomposition limited to {max_sites} sites")
    M = np.asarray(M, dtype=complex)
    d = 2 ** n_sites
    paulis = (I2, SX, SY, SZ)
    weights: dict = {}
    for idx in np.ndindex(*(4,) * n_sites):
        P = reduce(np.kron, [paulis[i] for i in idx])
        c = np.trace(P @ M) / d
        active = [s for s, i in enumerate(idx) if i]
        span = active[-1] - active[0] + 1 if active else 0
        weights[span] = weights.get(span, 0.0) + float(abs(c) ** 2)
    return dict(sorted(weights.items()))
