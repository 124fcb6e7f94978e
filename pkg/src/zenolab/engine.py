"""Zeno products, their limit, and the verification checks built on them.

For a projection ``E`` of the algebra, one factor of the Zeno product acts as
``X -> E rho**(iz/n) (E X) rho**(-iz/n)``, so the ``n``-fold product is the
factored map ``X -> g_n(z) X rho**(-iz)`` with ``g_n(z) = [E rho**(iz/n) E]**n``.
Its limit is ``X -> exp(iz h_E) E X rho**(-iz)`` with ``h_E = E log(rho) E``;
this closed form is validated against the products before anything else
uses it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .numerics import (
    Subspace,
    dagger,
    eigh,
    frozen,
    hs_norm,
    matrix_units,
    orthonormal_basis,
    positive_power,
    richardson,
    spectral_map,
    spectral_norm,
)
from .standard_form import StandardForm
from .tolerances import Tolerances


class StripError(ValueError):
    pass


@dataclass(frozen=True)
class StripPoint:
    """A point of the closed strip ``-1/2 <= Im z <= 0``."""

    z: complex

    def __post_init__(self):
        im = complex(self.z).imag
        if not (-0.5 <= im <= 0.0):
            raise StripError(f"{self.z} lies outside the closed strip")

    @property
    def interior(self) -> bool:
        return -0.5 < complex(self.z).imag < 0.0


@dataclass(frozen=True)
class FactoredSuperOp:
    """The superoperator ``X -> left @ X @ right``."""

    left: np.ndarray
    right: np.ndarray

    def apply(self, X) -> np.ndarray:
        return self.left @ np.asarray(X) @ self.right

    def compose(self, other: "FactoredSuperOp") -> "FactoredSuperOp":
        """``self`` after ``other``."""
        return FactoredSuperOp(self.left @ other.left, other.right @ self.right)

    def adjoint(self) -> "FactoredSuperOp":
        return FactoredSuperOp(dagger(self.left), dagger(self.right))

    def materialize(self) -> np.ndarray:
        """``d^2 x d^2`` matrix acting on row-major vectorizations."""
        return np.kron(self.left, self.right.T)

    def on_frame(self, frame: Subspace) -> np.ndarray:
        """Images of the frame vectors, as a ``d^2 x m`` matrix of columns.

        Its spectral norm is the operator norm restricted to the frame.
        """
        if frame.dim == 0:
            return np.zeros((self.left.shape[0] * self.right.shape[1], 0), complex)
        imgs = np.einsum("ab,mbc,cd->mad", self.left, frame.basis, self.right)
        return imgs.reshape(frame.dim, -1).T


def left_mult(a) -> FactoredSuperOp:
    a = np.asarray(a, dtype=complex)
    return FactoredSuperOp(a, np.eye(a.shape[0], dtype=complex))


@dataclass(frozen=True)
class ZenoInstance:
    sf: StandardForm
    E: np.ndarray
    k: int
    tol: Tolerances = field(default_factory=Tolerances)
    instance_id: str = "instance"

    @property
    def dim(self) -> int:
        return self.sf.dim

    @property
    def commutator_norm(self) -> float:
        return spectral_norm(self.E @ self.sf.rho - self.sf.rho @ self.E)

    @property
    def commuting(self) -> bool:
        return self.commutator_norm <= self.tol.commuting


def make_instance(sf: StandardForm, E, tol: Tolerances | None = None, instance_id: str = "instance") -> ZenoInstance:
    tol = tol or Tolerances()
    E = np.asarray(E, dtype=complex)
    d = sf.dim
    if E.shape != (d, d):
        raise ValueError(f"projection shape {E.shape} does not match dim {d}")
    if spectral_norm(E - dagger(E)) > tol.projection or spectral_norm(E @ E - E) > tol.projection:
        raise ValueError("E is not an orthogonal projection")
    k = int(round(np.trace(E).real))
    if not 1 <= k <= d:
        raise ValueError(f"projection rank {k} outside 1..{d}")
    return ZenoInstance(sf, frozen(0.5 * (E + dagger(E))), k, tol, instance_id)


# -- Zeno products ---------------------------------------------------------

def fn_left(inst: ZenoInstance, z: complex, n: int) -> np.ndarray:
    """``g_n(z) = [E rho**(iz/n) E]**n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    step = inst.E @ inst.sf.rho_power(1j * z / n) @ inst.E
    return np.linalg.matrix_power(step, n)


def fn_product(inst: ZenoInstance, z: complex, n: int) -> FactoredSuperOp:
    return FactoredSuperOp(fn_left(inst, z, n), inst.sf.rho_power(-1j * z))


def fn_left_extrapolated(inst: ZenoInstance, z: complex, n_max: int = 4096, levels: int = 5) -> np.ndarray:
    """Richardson limit of ``g_n(z)`` from ``n = n_max / 2**(levels-1), ..., n_max``."""
    ns = [n_max >> (levels - 1 - j) for j in range(levels)]
    if ns[0] < 1:
        raise ValueError("too many levels for n_max")
    return richardson([fn_left(inst, z, n) for n in ns])


def fn_iterate(inst: ZenoInstance, z: complex, n: int, X) -> np.ndarray:
    """Apply ``E Delta**(iz/n) E`` to ``X`` ``n`` times, one factor at a time."""
    a = inst.sf.rho_power(1j * z / n)
    b = inst.sf.rho_power(-1j * z / n)
    Y = np.asarray(X, dtype=complex)
    for _ in range(n):
        Y = inst.E @ (a @ (inst.E @ Y) @ b)
    return Y


# -- the limit ---------------------------------------------------------------

@dataclass(frozen=True)
class ZenoLimit:
    inst: ZenoInstance
    h_E: np.ndarray
    G: np.ndarray
    gamma_left: np.ndarray
    gamma_right: np.ndarray
    h_E_spectrum: object

    @property
    def h_E_norm(self) -> float:
        return spectral_norm(self.h_E)

    @property
    def h_norm(self) -> float:
        return spectral_norm(self.inst.sf.h)

    def left(self, z: complex) -> np.ndarray:
        u = spectral_map(self.h_E_spectrum, lambda lam: np.exp(1j * z * lam))
        return u @ self.inst.E

    def w(self, z: complex) -> FactoredSuperOp:
        return FactoredSuperOp(self.left(z), self.inst.sf.rho_power(-1j * z))

    def gamma(self) -> FactoredSuperOp:
        return FactoredSuperOp(self.gamma_left, self.gamma_right)

    def gamma_power(self, s: complex) -> FactoredSuperOp:
        """``Gamma**s`` in factored form; zero on the kernel ``(1 - E) H``."""
        return self.w(-0.25j * s)


def zeno_limit(inst: ZenoInstance) -> ZenoLimit:
    E = inst.E
    h_E = E @ inst.sf.h @ E
    h_E = frozen(0.5 * (h_E + dagger(h_E)))
    D = eigh(h_E)
    gl = spectral_map(D, lambda lam: np.exp(0.25 * lam)) @ E
    gr = inst.sf.rho_power(-0.25)
    return ZenoLimit(inst, h_E, E, frozen(gl), gr, D)


def w_apply(zl: ZenoLimit, z: complex, X) -> np.ndarray:
    return zl.w(z).apply(X)


# -- frames -----------------------------------------------------------------

@dataclass(frozen=True)
class SubspaceFrame:
    eh: Subspace
    he: Subspace


def subspace_frames(inst: ZenoInstance) -> SubspaceFrame:
    E, omega = inst.E, inst.sf.omega
    units = matrix_units(inst.dim)
    eh = orthonormal_basis([E @ u @ omega for u in units])
    he = orthonormal_basis([E @ u @ E @ omega for u in units])
    return SubspaceFrame(eh, he)


def defect_on(frame: Subspace, a: FactoredSuperOp, b: FactoredSuperOp) -> float:
    """``||a - b||`` restricted to the subspace ``frame``."""
    return spectral_norm(a.on_frame(frame) - b.on_frame(frame))


# -- convergence ---------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRecord:
    t: float
    ns: tuple
    defects: tuple
    slope: float | None
    residual: float | None

    def rate_ok(self, n_lo: int, n_hi: int, factor: float = 16.0, floor: float = 1e-9) -> bool | None:
        """``defect(n_hi) <= defect(n_lo) / factor``, or ``None`` below ``floor``."""
        d = dict(zip(self.ns, self.defects))
        if d[n_lo] <= floor:
            return None
        return d[n_hi] <= d[n_lo] / factor


def fit_loglog(ns: Sequence[int], defects: Sequence[float], floor: float = 1e-13, min_points: int = 4):
    pts = [(n, e) for n, e in zip(ns, defects) if e > floor]
    if len(pts) < min_points:
        return None, None
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(np.sqrt(res[0] / len(pts))) if len(res) else 0.0
    return float(coef[0]), resid


def convergence_sweep(inst: ZenoInstance, t: float, ns: Sequence[int], zl: ZenoLimit | None = None,
                      frame: Subspace | None = None) -> ConvergenceRecord:
    ns = [int(n) for n in ns]
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be ascending with at least two entries")
    zl = zl or zeno_limit(inst)
    frame = frame or subspace_frames(inst).eh
    W = zl.w(t)
    defects = [defect_on(frame, fn_product(inst, t, n), W) for n in ns]
    slope, resid = fit_loglog(ns, defects, inst.tol.noise_floor)
    return ConvergenceRecord(float(t), tuple(ns), tuple(defects), slope, resid)


# -- strip bounds ----------------------------------------------------------------

@dataclass(frozen=True)
class ContractionPoint:
    z: complex
    n: int
    norm: float
    strip_bound: float

    @property
    def is_real(self) -> bool:
        return self.z.imag == 0.0


def contraction_scan(inst: ZenoInstance, n: int, grid: Iterable) -> dict:
    """Measured ``||F_n(z)||`` on a grid of strip points, keyed by ``z``."""
    out = {}
    for p in grid:
        z = complex(p.z if isinstance(p, StripPoint) else StripPoint(complex(p)).z)
        norm = spectral_norm(fn_product(inst, z, n).materialize())
        out[z] = ContractionPoint(z, int(n), norm, inst.sf.ratio ** (-z.imag))
    return out


# -- Cauchy representation -------------------------------------------------------

@dataclass(frozen=True)
class CauchyResult:
    z: complex
    interior: bool
    defect: float
    reference_norm: float
    tail_budget: float


def _stacked_power(M: np.ndarray, n: int) -> np.ndarray:
    result = None
    base = M
    while n:
        if n & 1:
            result = base if result is None else result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


def cauchy_integrals(inst: ZenoInstance, zs: Sequence[complex], n: int, As: Sequence, T: float = 1000.0,
                     quad_steps: int = 2_000_000, chunk: int = 50_000) -> list:
    """Two-line Cauchy integrals of ``F_n(.) A Omega`` by the composite midpoint rule.

    For ``z`` inside the strip the integral times ``(z+i)^2 / (2 pi i)`` must
    reproduce ``F_n(z) A Omega``; outside the closed strip the bare integral
    over ``2 pi i`` must vanish.  Results are ordered as ``(z, A)`` for ``z``
    in ``zs`` and ``A`` in ``As``.
    """
    zs = [complex(z) for z in zs]
    for z in zs:
        if z.imag in (0.0, -0.5):
            raise StripError("z lies on a boundary line of the strip")
    if T < 10:
        raise ValueError("T must be at least 10")
    sf = inst.sf
    U = sf.spectrum.eigenvectors
    logp = np.log(sf.spectrum.eigenvalues)
    Xs = [sf.vector(A) for A in As]
    # With E = V V^* and rho = U diag(p) U^*, let Vu = U^* V.  Then
    #   g_n(zeta) X rho**(-i zeta) = U Vu K(zeta)^n Z diag(p**(-i zeta)) U^*
    # where K(zeta) = Vu^* diag(p**(i zeta/n)) Vu is k x k and Z = Vu^* U^* X U.
    D = eigh(inst.E)
    V = D.eigenvectors[:, D.eigenvalues > 0.5]
    Vu = dagger(U) @ V
    k = Vu.shape[1]
    Zs = np.stack([dagger(Vu) @ dagger(U) @ X @ U for X in Xs])
    h = 2.0 * T / quad_steps
    acc = np.zeros((len(zs), k, k, len(logp)), complex)
    for start in range(0, quad_steps, chunk):
        t = -T + (np.arange(start, min(start + chunk, quad_steps)) + 0.5) * h
        for zeta, line in ((t - 0.5j, 0), (t + 0j, 1)):
            K = np.einsum("ia,ti,ib->tab", Vu.conj(), np.exp(1j * np.multiply.outer(zeta / n, logp)), Vu)
            P = _stacked_power(K, n).reshape(len(t), k * k)
            phase = np.exp(-1j * np.multiply.outer(zeta, logp))
            for iz, z in enumerate(zs):
                if line == 0:
                    weight = 1.0 / ((t + 0.5j) ** 2 * (t - 0.5j - z))
                else:
                    weight = -1.0 / ((t + 1j) ** 2 * (t - z))
                acc[iz] += h * (P.T @ (weight[:, None] * phase)).reshape(k, k, -1)
    # acc[z][a, b, c] = sum_t w_t K^n_t[a, b] phase_t[c]
    middle = np.einsum("zabc,mbc->zmac", acc, Zs)
    out = []
    for iz, z in enumerate(zs):
        interior = -0.5 < z.imag < 0.0
        for m, X in enumerate(Xs):
            integral = U @ Vu @ middle[iz, m] @ dagger(U)
            if interior:
                value = (z + 1j) ** 2 / (2j * np.pi) * integral
                reference = fn_product(inst, z, n).apply(X)
                prefactor = abs(z + 1j) ** 2
            else:
                value = integral / (2j * np.pi)
                reference = np.zeros_like(X)
                prefactor = 1.0
            # integrand is O(|t|^-3); norms are at most r^(1/2) ||A Omega|| on the lower line
            c = (T / (T - abs(z) - 1.0)) ** 3
            tail = prefactor / (2 * np.pi) * (sf.ratio ** 0.5 + 1.0) * hs_norm(X) * c / T ** 2
            out.append(CauchyResult(z, interior, hs_norm(value - reference), hs_norm(reference), float(tail)))
    return out


def cauchy_check(inst: ZenoInstance, z: complex, n: int, A, T: float = 1000.0,
                 quad_steps: int = 2_000_000) -> CauchyResult:
    return cauchy_integrals(inst, [z], n, [A], T, quad_steps)[0]


# -- boundary values and holomorphy ---------------------------------------------

@dataclass(frozen=True)
class BoundaryRecord:
    t: float
    etas: tuple
    upper: tuple
    lower: tuple
    upper_bounds: tuple
    lower_bounds: tuple


def boundary_value_check(zl: ZenoLimit, t: float, A, etas: Sequence[float]) -> BoundaryRecord:
    """Distances of ``W(t - i eta) A Omega`` from the two edge values.

    Bounds come from ``||exp(eta h_E) E - E|| <= exp(eta ||h_E||) - 1`` and the
    same estimate for ``rho**(-eta)``.
    """
    etas = [float(e) for e in etas]
    if any(not 0.0 < e < 0.5 for e in etas):
        raise ValueError("etas must lie in (0, 1/2)")
    X = zl.inst.sf.vector(A)
    top = w_apply(zl, t, X)
    bottom = w_apply(zl, t - 0.5j, X)
    lip = zl.h_E_norm + zl.h_norm
    upper, lower, ub, lb = [], [], [], []
    for eta in etas:
        upper.append(hs_norm(w_apply(zl, t - 1j * eta, X) - top))
        lower.append(hs_norm(w_apply(zl, t - 1j * (0.5 - eta), X) - bottom))
        ub.append(float(np.expm1(eta * lip) * hs_norm(top)))
        lb.append(float(np.expm1(eta * lip) * hs_norm(bottom)))
    return BoundaryRecord(float(t), tuple(etas), tuple(upper), tuple(lower), tuple(ub), tuple(lb))


def holomorphy_residual(zl: ZenoLimit, z: complex, A, step: float = 1e-4) -> float:
    """Central-difference Cauchy-Riemann residual of ``z -> W(z) A Omega``."""
    X = zl.inst.sf.vector(A)
    dx = (w_apply(zl, z + step, X) - w_apply(zl, z - step, X)) / (2 * step)
    dy = (w_apply(zl, z + 1j * step, X) - w_apply(zl, z - 1j * step, X)) / (2 * step)
    return hs_norm(dy - 1j * dx)


# -- Gamma ----------------------------------------------------------------------

@dataclass
class GammaReport:
    positivity: float = 0.0
    support: float = 0.0
    delta_quarter: float | None = None
    powers: list = field(default_factory=list)
    boundary: list = field(default_factory=list)
    functional: list = field(default_factory=list)

    def max_residual(self) -> float:
        vals = [self.positivity, self.support]
        vals += [r for *_, r in self.powers + self.boundary + self.functional]
        if self.delta_quarter is not None:
            vals.append(self.delta_quarter)
        return max(vals)


def gamma_check(zl: ZenoLimit, t_grid: Sequence[float], s_grid: Sequence[float]) -> GammaReport:
    """Compare the spectral calculus of the materialized ``Gamma`` with the closed form.

    Path one diagonalizes the ``d^2 x d^2`` matrix of ``Gamma`` and takes
    powers with the support convention; path two evaluates ``W`` directly.
    """
    inst = zl.inst
    d = inst.dim
    Gm = zl.gamma().materialize()
    rep = GammaReport()
    herm = spectral_norm(Gm - dagger(Gm))
    D = eigh(Gm, tol=1e-8)
    scale = max(1.0, float(D.eigenvalues[-1]))
    rep.positivity = max(herm, max(0.0, -float(D.eigenvalues[0])))
    cutoff = 1e-10 * scale
    support = spectral_map(D, lambda lam: (lam > cutoff).astype(float))
    EL = left_mult(inst.E).materialize()
    rep.support = spectral_norm(support - EL)
    if spectral_norm(inst.E - np.eye(d)) <= inst.tol.projection:
        dq = FactoredSuperOp(inst.sf.rho_power(0.25), inst.sf.rho_power(-0.25)).materialize()
        rep.delta_quarter = spectral_norm(Gm - dq)
    for s in s_grid:
        lhs = positive_power(D, 4 * s, cutoff)
        rep.powers.append((s, spectral_norm(lhs - zl.w(-1j * s).materialize())))
    for t in t_grid:
        g_it = positive_power(D, 4j * t, cutoff)
        rhs = EL @ g_it @ EL
        rep.boundary.append((t, spectral_norm(zl.w(t).materialize() - rhs)))
    for i, s in enumerate(s_grid):
        for s2 in s_grid[i:]:
            if 0 < s + s2 < 0.5:
                prod = zl.w(-1j * s).compose(zl.w(-1j * s2))
                rep.functional.append((s, s2, spectral_norm(prod.materialize() - zl.w(-1j * (s + s2)).materialize())))
    return rep


# -- invariance of H_E --------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceRecord:
    """Leakage of ``W(t)`` out of ``H_E`` along three evaluation paths.

    ``product`` uses the Richardson limit of ``F_m`` for ``m`` up to ``n``;
    ``raw_product`` uses ``F_n`` itself and carries its ``O(1/n)`` error.
    """

    t: float
    closed_form: float
    product: float
    raw_product: float
    n: int

    @property
    def path_gap(self) -> float:
        return abs(self.closed_form - self.product)

    @property
    def raw_gap(self) -> float:
        return abs(self.closed_form - self.raw_product)


def leakage(frame: SubspaceFrame, op: FactoredSuperOp) -> float:
    """``||(1 - Q) op Q||`` for the projector ``Q`` onto ``H_E``."""
    if frame.he.dim == 0:
        return 0.0
    imgs = op.on_frame(frame.he)
    Q = frame.he.columns
    return spectral_norm(imgs - Q @ (dagger(Q) @ imgs))


def invariance_defect(inst: ZenoInstance, zl: ZenoLimit, frame: SubspaceFrame, t: float,
                      n: int = 4096) -> InvarianceRecord:
    """``||(1 - Q_HE) W(t) Q_HE||`` by the closed form and by the products ``F_n(t)``."""
    right = inst.sf.rho_power(-1j * t)
    extrapolated = FactoredSuperOp(fn_left_extrapolated(inst, t, n), right)
    return InvarianceRecord(float(t), leakage(frame, zl.w(t)), leakage(frame, extrapolated),
                            leakage(frame, fn_product(inst, t, n)), int(n))


# -- group law ----------------------------------------------------------------------

@dataclass(frozen=True)
class GroupLawRecord:
    s: float
    t: float
    composition: float
    adjoint: float
    unitarity: float


def group_law_check(zl: ZenoLimit, pairs: Iterable[tuple]) -> list:
    EL = left_mult(zl.inst.E).materialize()
    out = []
    for s, t in pairs:
        Ws, Wt = zl.w(s), zl.w(t)
        comp = spectral_norm(Ws.compose(Wt).materialize() - zl.w(s + t).materialize())
        adj = spectral_norm(zl.w(-t).materialize() - Wt.adjoint().materialize())
        uni = spectral_norm(Wt.compose(Wt.adjoint()).materialize() - EL)
        out.append(GroupLawRecord(float(s), float(t), comp, adj, uni))
    return out


def continuity_check(zl: ZenoLimit, ts: Iterable[float]) -> list:
    """``(t, ||W(t) - W(0)||, (||h_E|| + ||h||) |t|)`` for each ``t``."""
    W0 = zl.w(0.0).materialize()
    lip = zl.h_E_norm + zl.h_norm
    return [(float(t), spectral_norm(zl.w(t).materialize() - W0), lip * abs(t)) for t in ts]
