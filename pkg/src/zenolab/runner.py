"""Run verification checks for one configured instance and write CSV tables and a JSON report.

Every check yields rows ``check,instance_id,param1,param2,defect,bound,pass``
with ``pass = defect <= bound``.  Rows whose check name is in ``RECORDED``
are measurements kept as data: they never change a check's status.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import CHECKS, ExperimentConfig, build_hamiltonian, build_omega_e, build_projection, build_standard
from .engine import (
    FactoredSuperOp,
    SubspaceFrame,
    ZenoInstance,
    ZenoLimit,
    boundary_value_check,
    cauchy_integrals,
    continuity_check,
    contraction_scan,
    convergence_sweep,
    fn_iterate,
    fn_left_extrapolated,
    fn_product,
    gamma_check,
    group_law_check,
    holomorphy_residual,
    invariance_defect,
    leakage,
    left_mult,
    make_instance,
    subspace_frames,
    zeno_limit,
)
from .models import MSInstance, ms_extrapolated, ms_product, ms_zeno_limit, pauli_locality, survival_curve
from .numerics import NumericalFailure, dagger, hs_norm, spectral_norm
from .rng import SplitMix64, random_matrix
from .subalgebra import (
    TomitaError,
    commuting_default_state,
    compress,
    condition_iii_check,
    modular_match,
    tomita_build,
    tomita_modular_defect,
    validate_state,
)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

CSV_HEADER = ("check", "instance_id", "param1", "param2", "defect", "bound", "pass")
COROLLARY_HEADER = ("corollary", "instance_id", "pair", "defect_lhs_rhs", "verdict")

RECORDED = frozenset({
    "contraction.unit_claim",
    "invariance.measured",
    "invariance.raw_paths",
    "corollary.condition_iii_measured",
    "corollary.condition_iii_unstable",
    "corollary.modular_match_measured",
})

NOT_INVARIANT = "not applicable (H_E not invariant)"
ORACLE_LIMIT = 1e-8


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return f"{z.real!r}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{abs(z.imag)!r}j"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class Row:
    check: str
    instance_id: str
    param1: object
    param2: object
    defect: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.defect <= self.bound)

    @property
    def recorded(self) -> bool:
        return self.check in RECORDED

    def cells(self) -> list:
        return [self.check, self.instance_id, fmt(self.param1), fmt(self.param2), fmt(self.defect),
                fmt(self.bound), "true" if self.passed else "false"]


@dataclass
class CheckResult:
    name: str
    status: str = "pass"
    rows: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    corollary_rows: list = field(default_factory=list)
    seconds: float = 0.0

    def failures(self) -> list:
        return [r for r in self.rows if not r.recorded and not r.passed]

    def finish(self) -> "CheckResult":
        if self.status == "pass" and self.failures():
            self.status = "fail"
        return self

    def summary(self) -> dict:
        fails = self.failures()
        out = {
            "status": self.status,
            "rows": len(self.rows),
            "failures": [r.cells() for r in fails[:20]],
            "n_failures": len(fails),
            "seconds": round(self.seconds, 3),
        }
        worst = [r for r in self.rows if not r.recorded]
        if worst:
            w = max(worst, key=lambda r: r.defect / r.bound if r.bound > 0 else (math.inf if r.defect > 0 else 0.0))
            out["worst"] = w.cells()
        out.update(self.details)
        return out


@dataclass
class Lab:
    """Everything the checks share for one instance."""

    cfg: ExperimentConfig
    inst: ZenoInstance
    zl: ZenoLimit
    frames: SubspaceFrame
    state_hamiltonian: np.ndarray | None

    @property
    def iid(self) -> str:
        return self.inst.instance_id

    @property
    def tol(self):
        return self.inst.tol

    @property
    def sweep(self):
        return self.cfg.sweep


def prepare(cfg: ExperimentConfig) -> Lab:
    sf, H = build_standard(cfg)
    inst = make_instance(sf, build_projection(cfg), cfg.tolerances, cfg.instance.id)
    return Lab(cfg, inst, zeno_limit(inst), subspace_frames(inst), H)


def check_seeds(seed: int) -> dict:
    """One child seed per check name, independent of which checks run."""
    root = SplitMix64(seed)
    return {name: root.next_u64() for name in ("oracle",) + CHECKS}


# -- shared helpers ----------------------------------------------------------------------

def _monotone_rows(res: CheckResult, name: str, lab: Lab, t, ns, defects) -> None:
    """One row per ``n``: the first bounded by 2, later ones by the previous defect plus slack."""
    tol = lab.tol
    prev = None
    for n, d in zip(ns, defects):
        bound = 2.0 if prev is None else prev + tol.monotone_slack
        res.rows.append(Row(name, lab.iid, t, n, d, bound))
        prev = d


def _rate_pair(ns) -> tuple:
    lo = next((n for n in ns if n >= 32), ns[0])
    return lo, ns[-1]


def _rate_row(res: CheckResult, name: str, lab: Lab, t, ns, defects) -> None:
    lo, hi = _rate_pair(ns)
    d = dict(zip(ns, defects))
    if hi >= 4 * lo and d[lo] > lab.tol.rate_floor:
        res.rows.append(Row(name, lab.iid, t, f"{lo}:{hi}", d[hi], d[lo] * 2.0 * lo / hi))


# -- checks -------------------------------------------------------------------------------

def check_oracle(lab: Lab, rng: SplitMix64) -> CheckResult:
    """Validate the closed-form limit against Zeno products before anything uses it."""
    res = CheckResult("oracle")
    inst, zl, tol = lab.inst, lab.zl, lab.tol
    ns = list(lab.sweep.oracle_ns)
    records = []
    for t in lab.sweep.t_grid:
        rec = convergence_sweep(inst, t, ns, zl, lab.frames.eh)
        records.append(rec)
        prev = None
        for n, d in zip(ns, rec.defects):
            if prev is not None:
                res.rows.append(Row("oracle.monotone", lab.iid, t, n, d, prev + tol.monotone_slack))
            prev = d
        lo, hi = ns[0], ns[-1]
        if rec.defects[0] > tol.rate_floor:
            res.rows.append(Row("oracle.rate", lab.iid, t, f"{lo}:{hi}", rec.defects[-1],
                                rec.defects[0] * 2.0 * lo / hi))
        levels = min(5, len(ns))
        limit = FactoredSuperOp(fn_left_extrapolated(inst, t, hi, levels), inst.sf.rho_power(-1j * t))
        gap = spectral_norm(limit.on_frame(lab.frames.eh) - zl.w(t).on_frame(lab.frames.eh))
        res.rows.append(Row("oracle.limit", lab.iid, t, hi, gap, ORACLE_LIMIT))
    for z in (lab.sweep.t_grid[0], -0.25j, lab.sweep.t_grid[-1] - 0.5j):
        for n in (1, 7, 32):
            X = random_matrix(rng, inst.dim)
            direct = fn_iterate(inst, z, n, X)
            factored = fn_product(inst, z, n).apply(X)
            res.rows.append(Row("oracle.factored", lab.iid, z, n, hs_norm(direct - factored),
                                tol.factored * max(1.0, hs_norm(direct))))
    res.details["defects"] = {fmt(r.t): [fmt(d) for d in r.defects] for r in records}
    res.details["ns"] = ns
    return res


def check_group_law(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("group_law")
    zl, tol, iid = lab.zl, lab.tol, lab.iid
    for rec in group_law_check(zl, lab.sweep.group_pairs()):
        res.rows.append(Row("group_law.composition", iid, rec.s, rec.t, rec.composition, tol.group_law))
        res.rows.append(Row("group_law.adjoint", iid, rec.s, rec.t, rec.adjoint, tol.group_law))
        res.rows.append(Row("group_law.unitarity", iid, rec.s, rec.t, rec.unitarity, tol.group_law))
    initial = spectral_norm(zl.w(0.0).materialize() - left_mult(lab.inst.E).materialize())
    res.rows.append(Row("group_law.initial", iid, 0.0, "", initial, tol.group_law))
    for t, dist, lip in continuity_check(zl, lab.sweep.small_t):
        res.rows.append(Row("group_law.continuity", iid, t, "", dist, lip + tol.group_law))
    return res


def check_contraction(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("contraction")
    tol, iid = lab.tol, lab.iid
    ns = sorted({1, lab.sweep.n_list[0], lab.sweep.n_list[-1]})
    worst_claim = 0.0
    for n in ns:
        for z, p in contraction_scan(lab.inst, n, lab.sweep.z_grid).items():
            if p.is_real:
                res.rows.append(Row("contraction.real", iid, z, n, p.norm, 1.0 + tol.real_contraction))
            res.rows.append(Row("contraction.strip", iid, z, n, p.norm, p.strip_bound + tol.strip_bound))
            res.rows.append(Row("contraction.unit_claim", iid, z, n, p.norm, 1.0 + tol.real_contraction))
            worst_claim = max(worst_claim, p.norm)
    res.details["unit_claim_max_norm"] = worst_claim
    res.details["ratio"] = lab.inst.sf.ratio
    return res


def check_convergence(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("convergence")
    ns = list(lab.sweep.n_list)
    slopes = {}
    for t in lab.sweep.t_grid:
        rec = convergence_sweep(lab.inst, t, ns, lab.zl, lab.frames.eh)
        _monotone_rows(res, "convergence", lab, t, ns, rec.defects)
        lo, _ = _rate_pair(ns)
        if dict(zip(ns, rec.defects))[lo] > lab.tol.rate_floor:
            _rate_row(res, "convergence.rate", lab, t, ns, rec.defects)
            if rec.slope is not None:
                res.rows.append(Row("convergence.slope", lab.iid, t, rec.slope, abs(rec.slope + 1.0), lab.tol.rate_slope))
        slopes[fmt(t)] = None if rec.slope is None else fmt(rec.slope)
    res.details["slopes"] = slopes
    return res


def check_cauchy(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("cauchy")
    sw, d = lab.sweep, lab.inst.dim
    As = [np.eye(d, dtype=complex), random_matrix(rng, d), random_matrix(rng, d)]
    labels = ["I", "R1", "R2"]
    out = cauchy_integrals(lab.inst, sw.cauchy_z, sw.cauchy_n, As, sw.cauchy_T, sw.cauchy_panels)
    budgets = []
    for i, r in enumerate(out):
        label = labels[i % len(As)]
        name = "cauchy.interior" if r.interior else "cauchy.exterior"
        res.rows.append(Row(name, lab.iid, r.z, label, r.defect, lab.tol.cauchy))
        budgets.append([fmt(r.z), label, fmt(r.tail_budget)])
    res.details.update(T=sw.cauchy_T, panels=sw.cauchy_panels, n=sw.cauchy_n, tail_budgets=budgets)
    return res


def check_boundary(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("boundary")
    zl, tol, iid = lab.zl, lab.tol, lab.iid
    d = lab.inst.dim
    As = [np.eye(d, dtype=complex), random_matrix(rng, d)]
    for t in lab.sweep.t_grid:
        for A in As:
            rec = boundary_value_check(zl, t, A, lab.sweep.eta_list)
            for edge, vals, bounds in (("upper", rec.upper, rec.upper_bounds), ("lower", rec.lower, rec.lower_bounds)):
                prev = None
                for eta, v, b in zip(rec.etas, vals, bounds):
                    res.rows.append(Row(f"boundary.{edge}", iid, t, eta, v, b + tol.monotone_slack))
                    if prev is not None:
                        res.rows.append(Row(f"boundary.{edge}_monotone", iid, t, eta, v, prev + tol.monotone_slack))
                    prev = v
    for z in lab.sweep.z_grid:
        if -0.5 < z.imag < 0.0:
            res.rows.append(Row("boundary.holomorphy", iid, z, "I", holomorphy_residual(zl, z, As[0]), tol.holomorphy))
    return res


def check_gamma(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("gamma")
    tol, iid = lab.tol, lab.iid
    rep = gamma_check(lab.zl, lab.sweep.t_grid, lab.sweep.s_grid)
    res.rows.append(Row("gamma.positivity", iid, "", "", rep.positivity, tol.gamma))
    res.rows.append(Row("gamma.support", iid, "", "", rep.support, tol.gamma))
    if rep.delta_quarter is not None:
        res.rows.append(Row("gamma.delta_quarter", iid, "", "", rep.delta_quarter, tol.gamma_delta))
    for s, r in rep.powers:
        res.rows.append(Row("gamma.power", iid, s, "", r, tol.gamma))
    for t, r in rep.boundary:
        res.rows.append(Row("gamma.boundary", iid, t, "", r, tol.gamma))
    for s, s2, r in rep.functional:
        res.rows.append(Row("gamma.functional", iid, s, s2, r, tol.gamma))
    return res


def _identity_projection(lab: Lab) -> bool:
    return spectral_norm(lab.inst.E - np.eye(lab.inst.dim)) <= lab.tol.projection


def check_invariance(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("invariance")
    tol, iid = lab.tol, lab.iid
    asserted = lab.inst.commuting or _identity_projection(lab)
    n = lab.sweep.oracle_ns[-1]
    values = {}
    for t in lab.sweep.t_grid:
        rec = invariance_defect(lab.inst, lab.zl, lab.frames, t, n)
        name = "invariance.defect" if asserted else "invariance.measured"
        res.rows.append(Row(name, iid, t, "closed_form", rec.closed_form, tol.invariance))
        res.rows.append(Row("invariance.paths", iid, t, n, rec.path_gap, tol.invariance_paths))
        res.rows.append(Row("invariance.raw_paths", iid, t, n, rec.raw_gap, tol.invariance_paths))
        values[fmt(t)] = {"closed_form": fmt(rec.closed_form), "extrapolated_product": fmt(rec.product),
                          f"product_n{n}": fmt(rec.raw_product)}
    res.details["measured"] = values
    return res


def invariance_gate(lab: Lab) -> float:
    return max((leakage(lab.frames, lab.zl.w(t)) for t in lab.sweep.t_grid), default=0.0)


def check_corollary(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("corollary")
    tol, iid = lab.tol, lab.iid
    gate = invariance_gate(lab)
    res.details["invariance_gate"] = fmt(gate)
    if gate > tol.invariance_gate:
        res.status = NOT_INVARIANT
        res.corollary_rows.append(("corollary", iid, "all", fmt(gate), NOT_INVARIANT))
        return res
    ca = compress(lab.inst)
    user = build_omega_e(lab.cfg)
    if user is not None:
        st = validate_state(ca, lab.frames, user, "user-supplied")
    elif lab.inst.commuting:
        st = commuting_default_state(lab.inst, ca, lab.frames)
    else:
        res.status = "not applicable (no sanctioned Omega_E)"
        res.corollary_rows.append(("corollary", iid, "all", "", res.status))
        return res
    sanctioned = st.provenance == "commuting-default"
    res.details["omega_e"] = st.provenance
    try:
        td = tomita_build(ca, lab.frames, st, tol.tomita)
    except TomitaError as exc:
        res.status = f"not applicable ({exc})"
        res.corollary_rows.append(("corollary", iid, "all", "", res.status))
        return res
    res.rows.append(Row("corollary.tomita", iid, "", "", tomita_modular_defect(ca, td), tol.tomita))
    k2 = ca.k ** 2
    basis = ca.basis()
    for a in range(k2):
        for b in range(k2):
            rec = condition_iii_check(lab.zl, lab.frames, st, td, basis[a], basis[b], lab.sweep.condition_t,
                                      tol.monotone_slack)
            pair = f"{a}:{b}"
            if not rec.stable:
                name, verdict = "corollary.condition_iii_unstable", "unstable"
            elif sanctioned:
                name = "corollary.condition_iii"
                verdict = "pass" if rec.defect <= tol.condition_iii else "fail"
            else:
                name, verdict = "corollary.condition_iii_measured", "measured"
            res.rows.append(Row(name, iid, pair, fmt(rec.error_estimate), rec.defect, tol.condition_iii))
            res.corollary_rows.append(("condition_iii", iid, pair, fmt(rec.defect), verdict))
    mm = modular_match(lab.zl, ca, lab.frames, st, td, lab.sweep.t_grid, tol.modular_match)
    name = "corollary.modular_match" if sanctioned else "corollary.modular_match_measured"
    for t, m, dval in mm.defects:
        res.rows.append(Row(name, iid, t, m, dval, tol.modular_match))
    res.corollary_rows.append(("modular_match", iid, "basis", fmt(mm.max_defect), mm.verdict))
    res.details["verdict"] = mm.verdict
    return res


def ms_instance(lab: Lab) -> MSInstance:
    H = build_hamiltonian(lab.cfg, lab.state_hamiltonian)
    if H is None:
        H = -lab.inst.sf.h
    psi = lab.cfg.instance.psi
    if psi is None:
        psi = compress(lab.inst).V[:, 0]
    else:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
    return MSInstance(np.asarray(H), lab.inst.E, np.asarray(psi))


def check_ms(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("ms")
    tol, iid, sw = lab.tol, lab.iid, lab.sweep
    ms = ms_instance(lab)
    lim = ms_zeno_limit(ms)
    E = ms.E
    out = np.eye(E.shape[0]) - E
    for t in sw.t_grid:
        W = lim.w(t)
        ext = ms_extrapolated(ms, t, sw.ms_n_max, sw.ms_levels)
        res.rows.append(Row("ms.limit", iid, t, sw.ms_n_max, spectral_norm(ext - W), tol.ms_limit))
        res.rows.append(Row("ms.invariance", iid, t, "", spectral_norm(out @ W) + spectral_norm(W @ out), tol.ms_invariance))
        res.rows.append(Row("ms.unitarity", iid, t, "", spectral_norm(W @ dagger(W) - E), tol.ms_limit))
        d32 = spectral_norm(ms_product(ms, t, 32) - W)
        if d32 > tol.rate_floor:
            res.rows.append(Row("ms.rate", iid, t, "32:1024", spectral_norm(ms_product(ms, t, 1024) - W), d32 / 16.0))
    res.details["B_norm"] = spectral_norm(lim.B)
    return res


def check_survival(lab: Lab, rng: SplitMix64) -> CheckResult:
    res = CheckResult("survival")
    tol, iid = lab.tol, lab.iid
    ms = ms_instance(lab)
    ts = list(lab.sweep.t_grid)
    curve = survival_curve(ms, [0.0] + ts + [-t for t in ts])
    p = dict(zip(curve.ts, curve.probabilities))
    res.rows.append(Row("survival.initial", iid, 0.0, "", abs(p[0.0] - 1.0), tol.zeno_survival))
    for t in ts:
        res.rows.append(Row("survival.even", iid, t, "", abs(p[t] - p[-t]), tol.zeno_survival))
    res.rows.append(Row("survival.fit", iid, curve.fitted_c, curve.variance, curve.relative_error, tol.survival_rel))
    lim = ms_zeno_limit(ms)
    for t in ts:
        v = lim.w(t) @ ms.psi
        res.rows.append(Row("survival.zeno", iid, t, "", abs(np.vdot(v, v).real - 1.0), tol.zeno_survival))
    res.details.update(fitted_c=curve.fitted_c, variance=curve.variance,
                       probabilities={fmt(t): fmt(p[t]) for t in ts})
    return res


CHECK_FUNCS = {
    "group_law": check_group_law,
    "contraction": check_contraction,
    "convergence": check_convergence,
    "cauchy": check_cauchy,
    "boundary": check_boundary,
    "gamma": check_gamma,
    "invariance": check_invariance,
    "corollary": check_corollary,
    "ms": check_ms,
    "survival": check_survival,
}


def _run_one(name: str, lab: Lab, seed: int) -> CheckResult:
    start = time.perf_counter()
    func = check_oracle if name == "oracle" else CHECK_FUNCS[name]
    try:
        res = func(lab, SplitMix64(seed)).finish()
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        res = CheckResult(name, status="numerical failure", details={"error": str(exc)})
    res.seconds = time.perf_counter() - start
    return res


# -- report ---------------------------------------------------------------------------------

@dataclass
class ReportDocument:
    header: dict
    seed: int
    instance: dict
    tolerances: dict
    oracle: dict | None
    checks: dict
    overall: str
    exit_code: int

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, default=str) + "\n"


def instance_summary(lab: Lab) -> dict:
    inst = lab.inst
    out = {
        "id": inst.instance_id,
        "d": inst.dim,
        "k": inst.k,
        "r": inst.sf.ratio,
        "commuting": inst.commuting,
        "commutator_norm": inst.commutator_norm,
        "h_norm": lab.zl.h_norm,
        "h_E_norm": lab.zl.h_E_norm,
        "dim_EH": lab.frames.eh.dim,
        "dim_HE": lab.frames.he.dim,
    }
    if "region" in lab.cfg.instance.projection:
        n_sites = int(round(math.log2(inst.dim)))
        if n_sites <= 6:
            out["h_E_pauli_weight_by_range"] = {str(k): v for k, v in pauli_locality(lab.zl.h_E, n_sites).items()}
    return out


@dataclass
class RunOutcome:
    report: ReportDocument
    results: list
    exit_code: int
    out_dir: Path


def _overall(results: list) -> tuple:
    if any(r.status == "numerical failure" for r in results):
        return "numerical failure", EXIT_NUMERICAL
    if any(r.status == "fail" for r in results):
        return "fail", EXIT_FAIL
    return "pass", EXIT_PASS


def write_outputs(out_dir: Path, results: list, report: ReportDocument) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "results.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for res in results:
            for row in res.rows:
                w.writerow(row.cells())
    cor = [r for res in results for r in res.corollary_rows]
    if any(res.name == "corollary" for res in results):
        with (out_dir / "corollary.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COROLLARY_HEADER)
            w.writerows(cor)
    (out_dir / "report.json").write_text(report.to_json())


def run_checks(cfg: ExperimentConfig, checks=None, out_dir: Path | None = None, jobs: int = 1,
               oracle_only: bool = False) -> RunOutcome:
    """Run the oracle validation and then ``checks`` (default: the configured ones)."""
    checks = tuple(cfg.checks if checks is None else checks)
    out_dir = Path(out_dir or cfg.output_dir)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    header = {"tool": "zenolab", "version": __version__, "generated": started, "config": cfg.source}
    lab = prepare(cfg)
    seeds = check_seeds(cfg.seed)
    results = []
    oracle = None
    if checks or oracle_only:
        oracle = _run_one("oracle", lab, seeds["oracle"])
        results.append(oracle)
    if oracle is not None and not oracle_only:
        if oracle.status != "pass":
            results += [CheckResult(n, status="skipped (oracle validation failed)") for n in checks]
        else:
            names = [n for n in CHECKS if n in checks]
            with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
                futures = [pool.submit(_run_one, n, lab, seeds[n]) for n in names]
                results += [f.result() for f in futures]
    overall, code = _overall(results)
    report = ReportDocument(
        header=header,
        seed=cfg.seed,
        instance=instance_summary(lab),
        tolerances=cfg.tolerances.as_dict(),
        oracle=oracle.summary() if oracle else None,
        checks={r.name: r.summary() for r in results if r.name != "oracle"},
        overall=overall,
        exit_code=code,
    )
    write_outputs(out_dir, results, report)
    return RunOutcome(report, results, code, out_dir)


def run_experiment(cfg: ExperimentConfig, out_dir: Path | None = None, jobs: int = 1) -> RunOutcome:
    return run_checks(cfg, None, out_dir, jobs)


def verify_suite(cfg: ExperimentConfig, out_dir: Path | None = None, jobs: int = 1) -> int:
    """Full suite; returns the exit code."""
    return run_checks(cfg, CHECKS, out_dir, jobs).exit_code
