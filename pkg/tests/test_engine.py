import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from conftest import commuting_instance, identity_instance, nc2_instance, q3_instance, random_instance
from zenolab.engine import (
    FactoredSuperOp,
    StripError,
    StripPoint,
    boundary_value_check,
    cauchy_check,
    contraction_scan,
    convergence_sweep,
    fit_loglog,
    fn_iterate,
    fn_left,
    fn_product,
    gamma_check,
    group_law_check,
    holomorphy_residual,
    invariance_defect,
    make_instance,
    subspace_frames,
    w_apply,
    zeno_limit,
)
from zenolab.numerics import hs_norm, spectral_norm
from zenolab.rng import SplitMix64, random_density, random_matrix
from zenolab.standard_form import build_standard_form, delta_power, modular_flow

seeds = st.integers(0, 2**32)
strip_z = st.builds(complex, st.floats(-2, 2), st.floats(-0.5, 0.0))


def test_strip_point_validation():
    assert StripPoint(-0.25j).interior
    assert not StripPoint(-0.5j).interior
    with pytest.raises(StripError):
        StripPoint(0.1j)


def test_factored_superop_matches_materialized():
    rng = SplitMix64(3)
    a, b, X = (random_matrix(rng, 3) for _ in range(3))
    op = FactoredSuperOp(a, b)
    assert_allclose(op.materialize() @ X.reshape(-1), op.apply(X).reshape(-1), atol=1e-14)
    c, e = random_matrix(rng, 3), random_matrix(rng, 3)
    other = FactoredSuperOp(c, e)
    assert_allclose(op.compose(other).apply(X), op.apply(other.apply(X)), atol=1e-14)
    assert_allclose(op.adjoint().materialize(), op.materialize().conj().T, atol=1e-14)


def test_make_instance_rejects_non_projection():
    sf = build_standard_form(2, np.eye(2) / 2)
    with pytest.raises(ValueError, match="projection"):
        make_instance(sf, np.array([[1, 1], [0, 0]]))


@settings(max_examples=25, deadline=None)
@given(seeds, strip_z, st.integers(1, 40))
def test_factored_form_equals_direct_iteration(seed, z, n):
    inst = random_instance(seed)
    rng = SplitMix64(seed ^ 0xABCDEF)
    for _ in range(3):
        X = random_matrix(rng, inst.dim)
        direct = fn_iterate(inst, z, n, X)
        assert hs_norm(direct - fn_product(inst, z, n).apply(X)) <= 1e-10 * max(1.0, hs_norm(direct))


def test_fn_product_at_zero_is_left_projection(nc2):
    X = random_matrix(SplitMix64(1), 2)
    for n in (1, 5, 64):
        assert_allclose(fn_product(nc2, 0.0, n).apply(X), nc2.E @ X, atol=1e-14)


def test_identity_projection_gives_delta_power():
    inst = identity_instance(random_density(SplitMix64(5), 3))
    X = random_matrix(SplitMix64(6), 3)
    for n in (1, 3, 17):
        assert_allclose(fn_product(inst, 0.3 - 0.2j, n).apply(X), delta_power(inst.sf, 0.3 - 0.2j, X), atol=1e-12)


def test_commuting_products_are_n_independent(q3):
    g1 = fn_left(q3, 1.3, 1)
    for n in (2, 10, 1024):
        assert_allclose(fn_left(q3, 1.3, n), g1, atol=1e-12)
    assert_allclose(g1, q3.E @ q3.sf.rho_power(1.3j), atol=1e-14)


def test_nc2_generator():
    zl = zeno_limit(nc2_instance())
    mu = 0.5 * np.log(3 / 16)
    assert_allclose(zl.h_E, mu * zl.inst.E, atol=1e-14)


def test_closed_form_against_scipy():
    inst = random_instance(77, d=4, k=2)
    zl = zeno_limit(inst)
    E = inst.E
    hE = E @ scipy.linalg.logm(inst.sf.rho) @ E
    z = 0.7 - 0.2j
    left = scipy.linalg.expm(1j * z * hE) @ E
    right = scipy.linalg.expm(-1j * z * scipy.linalg.logm(inst.sf.rho))
    assert_allclose(zl.w(z).left, left, atol=1e-10)
    assert_allclose(zl.w(z).right, right, atol=1e-10)


def test_large_n_product_approaches_limit():
    inst = random_instance(8, d=4, k=2)
    zl = zeno_limit(inst)
    frame = subspace_frames(inst).eh
    rec = convergence_sweep(inst, 1.0, [256, 512, 1024, 2048, 4096], zl, frame)
    assert rec.defects[-1] < 1e-3
    assert all(b <= a + 1e-12 for a, b in zip(rec.defects, rec.defects[1:]))


def test_commuting_closed_form_is_compressed_modular_flow(q3):
    zl = zeno_limit(q3)
    A = random_matrix(SplitMix64(2), 3)
    AE = q3.E @ A @ q3.E
    X = AE @ q3.sf.omega
    expected = q3.E @ modular_flow(q3.sf, 0.8, AE) @ q3.sf.omega
    assert_allclose(w_apply(zl, 0.8, X), expected, atol=1e-10)


def test_w_is_isometric_on_eh():
    inst = random_instance(21, d=4, k=3)
    zl = zeno_limit(inst)
    X = inst.E @ random_matrix(SplitMix64(0), 4)
    assert hs_norm(w_apply(zl, 2.5, X)) == pytest.approx(hs_norm(X), abs=1e-10)


def test_convergence_first_order_on_nc2(nc2):
    rec = convergence_sweep(nc2, 1.0, [2 ** j for j in range(1, 11)])
    assert rec.slope == pytest.approx(-1.0, abs=0.3)
    assert rec.rate_ok(32, 1024)


def test_convergence_exact_for_identity_and_commuting(q3):
    inst = identity_instance(random_density(SplitMix64(4), 3))
    for case in (inst, q3):
        rec = convergence_sweep(case, 1.5, [2, 8, 32, 128])
        assert max(rec.defects) <= 1e-12
        assert rec.slope is None


def test_fit_loglog_discards_noise():
    assert fit_loglog([1, 2, 4, 8], [1e-14] * 4) == (None, None)
    slope, resid = fit_loglog([1, 2, 4, 8], [1.0, 0.5, 0.25, 0.125])
    assert slope == pytest.approx(-1.0) and resid < 1e-12


def test_contraction_identity_delta_half():
    inst = identity_instance(np.diag([1 / 2, 1 / 3, 1 / 6]))
    p = contraction_scan(inst, 1, [-0.5j])[-0.5j]
    assert p.norm == pytest.approx(np.sqrt(3.0), rel=1e-12)
    assert p.norm > 1.0
    assert p.norm <= p.strip_bound + 1e-8


@settings(max_examples=15, deadline=None)
@given(seeds, st.lists(strip_z, min_size=1, max_size=4), st.sampled_from([1, 4, 32]))
def test_strip_and_real_bounds(seed, zs, n):
    inst = random_instance(seed)
    for z, p in contraction_scan(inst, n, zs + [1.1]).items():
        assert p.norm <= p.strip_bound + 1e-8
        if z.imag == 0:
            assert p.norm <= 1 + 1e-10


def test_contraction_tracial_is_contractive():
    sf = build_standard_form(3, np.eye(3) / 3)
    inst = make_instance(sf, np.diag([1.0, 0.0, 1.0]))
    for p in contraction_scan(inst, 5, [-0.5j, 1 - 0.25j, 0.0]).values():
        assert p.norm <= 1 + 1e-10


def test_cauchy_rejects_boundary_lines(q3):
    with pytest.raises(StripError):
        cauchy_check(q3, -0.5j, 2, np.eye(3))
    with pytest.raises(ValueError):
        cauchy_check(q3, -0.25j, 2, np.eye(3), T=5)


def test_cauchy_small_quadrature(q3):
    # coarse rule: defect bounded by the tail budget plus a discretization term
    r = cauchy_check(q3, -0.25j, 2, np.eye(3), T=200, quad_steps=200_000)
    assert r.interior
    assert r.defect <= 10 * r.tail_budget + 1e-5
    ext = cauchy_check(q3, 0.25j, 2, np.eye(3), T=200, quad_steps=200_000)
    assert not ext.interior and ext.defect <= 10 * ext.tail_budget + 1e-5


def test_boundary_values_q3(q3):
    zl = zeno_limit(q3)
    A = np.eye(3)
    rec = boundary_value_check(zl, 1.0, A, [10.0 ** -j for j in range(1, 7)])
    norm = hs_norm(q3.sf.vector(A))
    assert rec.upper[-1] <= 1e-5 * norm
    assert rec.lower[-1] <= 1e-5 * norm
    for vals, bounds in ((rec.upper, rec.upper_bounds), (rec.lower, rec.lower_bounds)):
        assert all(v <= b + 1e-12 for v, b in zip(vals, bounds))
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_boundary_identity_linear_in_eta():
    inst = identity_instance(np.diag([0.7, 0.3]))
    zl = zeno_limit(inst)
    rec = boundary_value_check(zl, 0.4, random_matrix(SplitMix64(2), 2), [1e-3, 5e-4, 2.5e-4])
    ratios = [a / b for a, b in zip(rec.upper, rec.upper[1:])]
    assert ratios == pytest.approx([2.0, 2.0], rel=1e-2)


@pytest.mark.parametrize("z", [0.3 - 0.1j, -1 - 0.25j, 2 - 0.4j])
def test_holomorphy(z):
    zl = zeno_limit(random_instance(9, d=4, k=2))
    assert holomorphy_residual(zl, z, random_matrix(SplitMix64(1), 4)) <= 1e-6


@pytest.mark.parametrize("make", [q3_instance, nc2_instance])
def test_gamma_identities(make):
    rep = gamma_check(zeno_limit(make()), [0.5, 1.0, 3.0], [0.05, 0.1, 0.2, 0.3])
    assert rep.max_residual() <= 1e-9
    assert rep.delta_quarter is None


def test_gamma_identity_projection_is_delta_quarter():
    rep = gamma_check(zeno_limit(identity_instance(np.diag([1 / 2, 1 / 3, 1 / 6]))), [1.0], [0.1])
    assert rep.delta_quarter <= 1e-10


@pytest.mark.parametrize("make, dims", [(q3_instance, (6, 4)), (nc2_instance, (2, 1))])
def test_frame_dimensions(make, dims):
    fr = subspace_frames(make())
    assert (fr.eh.dim, fr.he.dim) == dims


def test_frames_full_for_identity():
    fr = subspace_frames(identity_instance(np.diag([0.2, 0.3, 0.5])))
    assert fr.eh.dim == fr.he.dim == 9


def test_invariance_commuting_and_identity(q3):
    for inst in (q3, identity_instance(random_density(SplitMix64(3), 3)), commuting_instance(5)):
        zl = zeno_limit(inst)
        rec = invariance_defect(inst, zl, subspace_frames(inst), 1.0)
        assert rec.closed_form <= 1e-10
        assert rec.path_gap <= 1e-6


def test_invariance_nc2_is_positive(nc2):
    zl = zeno_limit(nc2)
    rec = invariance_defect(nc2, zl, subspace_frames(nc2), 1.0)
    assert rec.closed_form > 1e-3
    assert rec.path_gap <= 1e-6
    # the bare n = 4096 product carries its O(1/n) error
    assert rec.raw_gap > rec.path_gap


def test_group_law_nc2():
    zl = zeno_limit(nc2_instance())
    (rec,) = group_law_check(zl, [(0.3, 0.7)])
    assert max(rec.composition, rec.adjoint, rec.unitarity) <= 1e-10
    (zero,) = group_law_check(zl, [(0.0, 0.0)])
    assert max(zero.composition, zero.adjoint, zero.unitarity) <= 1e-14


@settings(max_examples=10, deadline=None)
@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_group_law_random(seed, s, t):
    zl = zeno_limit(random_instance(seed))
    (rec,) = group_law_check(zl, [(s, t)])
    assert max(rec.composition, rec.adjoint, rec.unitarity) <= 1e-10
    assert spectral_norm(zl.w(0).materialize() - np.kron(zl.inst.E, np.eye(zl.inst.dim))) <= 1e-12
