"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""
import dataclasses
import json
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_LINES, identity_instance, nc2_instance, q3_instance  # noqa: E402
from zenolab.config import parse_config  # noqa: E402
from zenolab.engine import (  # noqa: E402
    cauchy_integrals,
    continuity_check,
    contraction_scan,
    convergence_sweep,
    gamma_check,
    group_law_check,
    invariance_defect,
    make_instance,
    subspace_frames,
    zeno_limit,
)
from zenolab.models import MSInstance, ms_extrapolated, ms_zeno_limit, survival_curve  # noqa: E402
from zenolab.rng import SplitMix64, random_density, random_matrix, random_projection  # noqa: E402
from zenolab.runner import run_checks, verify_suite  # noqa: E402
from zenolab.standard_form import build_standard_form  # noqa: E402
from zenolab.subalgebra import (  # noqa: E402
    commuting_default_state,
    compress,
    condition_iii_check,
    modular_match,
    tomita_build,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SEED = 20240917
T_VALUES = (0.25, 0.5, 1.0, 2.0, 3.0)


def random_instances(count=20, seed=SEED):
    rng = SplitMix64(seed)
    out = []
    for i in range(count):
        d = rng.integer(2, 6)
        k = rng.integer(1, d - 1)
        sf = build_standard_form(d, random_density(rng, d))
        out.append(make_instance(sf, random_projection(rng, d, k), instance_id=f"rand{i}"))
    return out


def commuting_instances(count=8, seed=SEED + 1):
    rng = SplitMix64(seed)
    out = [q3_instance()]
    for i in range(count):
        d = rng.integer(2, 5)
        k = rng.integer(1, d)
        rho = random_density(rng, d)
        _, U = np.linalg.eigh(rho)
        cols = U[:, :k]
        out.append(make_instance(build_standard_form(d, rho), cols @ cols.conj().T, instance_id=f"comm{i}"))
    return out


def record(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


# -- criteria ----------------------------------------------------------------------

def criterion_1():
    start = time.perf_counter()
    ns = [32, 64, 128, 256, 512, 1024]
    worst_ratio, slopes, rated = 0.0, [], 0
    ok = True
    for inst in random_instances():
        zl = zeno_limit(inst)
        frame = subspace_frames(inst).eh
        for t in T_VALUES:
            rec = convergence_sweep(inst, t, ns, zl, frame)
            if rec.defects[0] > 1e-9:
                rated += 1
                ratio = rec.defects[-1] / rec.defects[0]
                worst_ratio = max(worst_ratio, ratio)
                ok &= ratio <= 1 / 16
                ok &= rec.slope is not None and abs(rec.slope + 1) <= 0.3
                if rec.slope is not None:
                    slopes.append(rec.slope)
    elapsed = time.perf_counter() - start
    ok &= elapsed <= 30
    return ok, (f"{rated} rated sweeps, worst d(1024)/d(32) = {worst_ratio:.4f} (<= 0.0625), "
                f"slopes in [{min(slopes):.3f}, {max(slopes):.3f}], {elapsed:.1f}s")


def criterion_2():
    worst = 0.0
    pairs = [(s, t) for s in (-1.0, 0.3, 2.0) for t in (-0.7, 0.5, 3.0)]
    for inst in random_instances():
        zl = zeno_limit(inst)
        for rec in group_law_check(zl, pairs):
            worst = max(worst, rec.composition, rec.adjoint, rec.unitarity)
        for t, dist, bound in continuity_check(zl, (1e-3, -1e-3, 5e-4, 1e-5)):
            worst = max(worst, dist - bound)
    return worst <= 1e-10, f"max residual {worst:.2e} (<= 1e-10)"


def criterion_3():
    grid = [complex(re, -im) for im in (0.0, 0.125, 0.25, 0.375, 0.5) for re in (-2.0, -1.0, 0.0, 1.0, 2.0)]
    real_worst, strip_worst = 0.0, -np.inf
    claim_fail = []
    insts = random_instances() + [identity_instance(np.diag([1 / 2, 1 / 3, 1 / 6]))]
    for inst in insts:
        for n in (1, 32):
            for z, p in contraction_scan(inst, n, grid).items():
                if p.is_real:
                    real_worst = max(real_worst, p.norm)
                strip_worst = max(strip_worst, p.norm - p.strip_bound)
                if p.norm > 1 + 1e-10:
                    claim_fail.append((inst.instance_id, z, n))
    identity_fails = [c for c in claim_fail if c[0] == "identity" and c[1] == -0.5j and c[2] == 1]
    ok = real_worst <= 1 + 1e-10 and strip_worst <= 1e-8
    return ok, (f"max real-line norm {real_worst:.12f}, max excess over r^(-Im z) {strip_worst:.1e}; "
                f"unit-bound claim recorded failing at {len(claim_fail)} points "
                f"(E = I, z = -i/2, n = 1 among them: {bool(identity_fails)})")


def criterion_4():
    start = time.perf_counter()
    inst = q3_instance()
    rng = SplitMix64(SEED)
    As = [np.eye(3, dtype=complex), random_matrix(rng, 3), random_matrix(rng, 3)]
    out = cauchy_integrals(inst, [-0.25j, 0.25j], 4, As, T=1000.0, quad_steps=2_000_000)
    interior = max(r.defect for r in out if r.interior)
    exterior = max(r.defect for r in out if not r.interior)
    elapsed = time.perf_counter() - start
    ok = interior <= 1e-4 and exterior <= 1e-4 and elapsed <= 60
    return ok, f"interior {interior:.1e}, exterior {exterior:.1e} (<= 1e-4), {elapsed:.1f}s"


def criterion_5():
    ts, ss = (0.5, 1.0, 2.0, 3.0), (0.05, 0.1, 0.2, 0.25, 0.3, 0.45)
    worst = max(gamma_check(zeno_limit(f()), ts, ss).max_residual() for f in (q3_instance, nc2_instance))
    rep = gamma_check(zeno_limit(identity_instance(np.diag([1 / 2, 1 / 3, 1 / 6]))), ts, ss)
    ok = worst <= 1e-9 and rep.delta_quarter <= 1e-10
    return ok, f"Q3/NC2 max residual {worst:.1e} (<= 1e-9), E = I: |Gamma - Delta^(1/4)| = {rep.delta_quarter:.1e}"


def criterion_6():
    worst_iii, worst_match, verdicts = 0.0, 0.0, set()
    for inst in commuting_instances():
        zl, ca, frame = zeno_limit(inst), compress(inst), subspace_frames(inst)
        st = commuting_default_state(inst, ca, frame)
        td = tomita_build(ca, frame, st)
        basis = ca.basis()
        for A in basis:
            for B in basis:
                rec = condition_iii_check(zl, frame, st, td, A, B)
                worst_iii = max(worst_iii, rec.defect if rec.stable else np.inf)
        mm = modular_match(zl, ca, frame, st, td, T_VALUES)
        worst_match = max(worst_match, mm.max_defect)
        verdicts.add(mm.verdict)
    ok = worst_iii <= 1e-6 and worst_match <= 1e-8 and verdicts == {"identified"}
    return ok, f"condition (iii) max defect {worst_iii:.1e} (<= 1e-6), modular match max {worst_match:.1e}, {sorted(verdicts)}"


def criterion_7():
    worst = 0.0
    for inst in commuting_instances() + [identity_instance(np.diag([0.5, 0.3, 0.2]))]:
        zl, frame = zeno_limit(inst), subspace_frames(inst)
        for t in (0.5, 1.0, 3.0):
            worst = max(worst, invariance_defect(inst, zl, frame, t).closed_form)
    with tempfile.TemporaryDirectory() as tmp:
        cfg = dataclasses.replace(parse_config(CONFIGS / "nc2.json"), checks=("invariance",))
        run_checks(cfg, out_dir=Path(tmp))
        report = json.loads((Path(tmp) / "report.json").read_text())
    inv = report["checks"]["invariance"]
    value = float(inv["measured"]["1.0"]["closed_form"])
    gap = float(inv["worst"][4])
    nc2 = nc2_instance()
    rec = invariance_defect(nc2, zeno_limit(nc2), subspace_frames(nc2), 1.0, 4096)
    ok = worst <= 1e-10 and rec.path_gap <= 1e-6 and value > 0 and inv["status"] == "pass"
    return ok, (f"commuting/E = I max {worst:.1e} (<= 1e-10); NC2 t = 1 value {value:.5f} recorded, "
                f"path gap {rec.path_gap:.1e} (<= 1e-6, worst report row {gap:.1e})")


def criterion_8():
    rng = SplitMix64(SEED + 8)
    worst_limit = 0.0
    for _ in range(10):
        A = random_matrix(rng, 4)
        ms = MSInstance(A + A.conj().T, random_projection(rng, 4, rng.integer(1, 3)))
        lim = ms_zeno_limit(ms)
        for t in (0.5, 1.0, 2.0):
            worst_limit = max(worst_limit, np.linalg.norm(ms_extrapolated(ms, t, 1024, 7) - lim.w(t), 2))
    A = random_matrix(rng, 4)
    psi = rng.complex_normal(4, 1).reshape(-1)
    psi /= np.linalg.norm(psi)
    ms1 = MSInstance(A + A.conj().T, np.outer(psi, psi.conj()), psi)
    lim1 = ms_zeno_limit(ms1)
    survival = max(abs(abs(np.vdot(psi, lim1.w(t) @ psi)) ** 2 - 1) for t in np.linspace(0, 10, 21))
    rel = 0.0
    for _ in range(5):
        B = random_matrix(rng, 6)
        phi = rng.complex_normal(6, 1).reshape(-1)
        phi /= np.linalg.norm(phi)
        rel = max(rel, survival_curve(MSInstance(B + B.conj().T, np.eye(6), phi), [0.1]).relative_error)
    ok = worst_limit <= 1e-10 and survival <= 1e-10 and rel <= 0.01
    return ok, (f"limit defect {worst_limit:.1e} (<= 1e-10), rank-1 survival defect {survival:.1e}, "
                f"quadratic coefficient rel. error {rel:.1e} (<= 1%)")


def criterion_9():
    start = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        code = verify_suite(parse_config(CONFIGS / "tfim3.json"), Path(tmp))
        report = json.loads((Path(tmp) / "report.json").read_text())
    elapsed = time.perf_counter() - start
    corollary = report["checks"]["corollary"]["status"]
    ok = code == 0 and elapsed <= 60
    return ok, f"exit {code}, corollary {corollary!r}, {elapsed:.1f}s (<= 60s)"


def criterion_10():
    bodies = []
    with tempfile.TemporaryDirectory() as tmp:
        cfg = parse_config(CONFIGS / "q3.json")
        for run in ("a", "b"):
            out = Path(tmp) / run
            verify_suite(cfg, out, jobs=2 if run == "b" else 1)
            bodies.append(((out / "results.csv").read_bytes(), (out / "corollary.csv").read_bytes()))
    same = bodies[0] == bodies[1]
    return same, f"results.csv and corollary.csv byte-identical across runs: {same}"


CRITERIA = [
    (1, "oracle equivalence on 20 random instances", criterion_1),
    (2, "group structure", criterion_2),
    (3, "strip bounds", criterion_3),
    (4, "Cauchy representation on Q3", criterion_4),
    (5, "Gamma identities", criterion_5),
    (6, "corollary on commuting instances", criterion_6),
    (7, "invariance diagnostic", criterion_7),
    (8, "Misra-Sudarshan mode", criterion_8),
    (9, "3-site transverse Ising end to end", criterion_9),
    (10, "determinism", criterion_10),
]


@pytest.mark.parametrize("number, title, func", CRITERIA, ids=[f"criterion_{n}" for n, *_ in CRITERIA])
def test_criterion(number, title, func):
    ok, detail = func()
    assert record(number, title, ok, detail), detail


if __name__ == "__main__":
    results = [record(n, title, *func()) for n, title, func in CRITERIA]
    sys.exit(0 if all(results) else 1)
