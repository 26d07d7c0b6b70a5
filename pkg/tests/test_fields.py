"""Coefficient-space field algebra: norms, curls, projection, traces."""

import numpy as np
import pytest

from mhdflat.fields import (
    SpectralField,
    boundary_trace_residual,
    curl,
    divergence_max,
    hermitian_defect,
    hermitian_symmetrize,
    inner,
    laplacian_apply,
    leray_project,
    norm,
    random_divfree,
    sobolev_norm,
    zero,
)
from mhdflat.modes import FieldParity, dealias_cutoffs
from mhdflat.transforms import GridSpec, to_physical

from oracles import eval_field, fd_curl, quad_inner


def _shear(K=2, M=3):
    f = zero(FieldParity.VELOCITY, K, M)
    f.coeffs[0, K, K, 1] = 1.0
    return f


def test_zero_field():
    f = zero(FieldParity.MAGNETIC, 3, 2)
    assert f.coeffs.shape == (3, 7, 7, 3)
    assert norm(f) == 0.0


def test_spectral_field_shape_validation():
    with pytest.raises(ValueError):
        SpectralField(FieldParity.VELOCITY, 2, 2, np.zeros((3, 5, 5, 2), dtype=complex))


def test_inner_shear_value():
    # integral of cos^2(pi z) over the channel is (2 pi)^2 / 2
    f = _shear()
    assert inner(f, f) == pytest.approx((2 * np.pi) ** 2 / 2, rel=1e-15)


def test_inner_mean_mode_weight():
    f = zero(FieldParity.VELOCITY, 1, 1)
    f.coeffs[0, 1, 1, 0] = 1.0   # constant field u = (1, 0, 0)
    assert inner(f, f) == pytest.approx((2 * np.pi) ** 2, rel=1e-15)


def test_inner_parity_mismatch_rejected():
    u = zero(FieldParity.VELOCITY, 2, 2)
    B = zero(FieldParity.MAGNETIC, 2, 2)
    with pytest.raises(ValueError):
        inner(u, B)


@pytest.mark.parametrize("parity", list(FieldParity))
def test_inner_matches_quadrature(parity):
    f = random_divfree(parity, 3, 4, seed=41)
    g = random_divfree(parity, 3, 4, seed=42)
    grid = GridSpec(12, 12, 8)
    q = quad_inner(to_physical(f, grid), to_physical(g, grid), 12, 12, 8)
    assert inner(f, g) == pytest.approx(q, rel=1e-10, abs=1e-12)


def test_sobolev_norm_single_mode():
    f = _shear()
    f.coeffs /= norm(f)
    lam = np.pi ** 2
    for s in (1, 2, 3):
        assert sobolev_norm(f, s) == pytest.approx(np.sqrt(1 + lam ** s), rel=1e-13)
    assert sobolev_norm(f, 0) == pytest.approx(norm(f), rel=1e-15)


@pytest.mark.parametrize("parity", list(FieldParity))
def test_sobolev_norm_matches_repeated_curls(parity):
    f = random_divfree(parity, 4, 4, seed=7)
    g = f
    for s in (1, 2, 3):
        g = curl(g)
        want = np.sqrt(norm(f) ** 2 + norm(g) ** 2)
        assert sobolev_norm(f, s) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("parity", list(FieldParity))
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_random_divfree_contract(parity, seed):
    K, M = 5, 6
    f = random_divfree(parity, K, M, seed)
    again = random_divfree(parity, K, M, seed)
    assert np.array_equal(f.coeffs, again.coeffs)
    assert norm(f) == pytest.approx(1.0, rel=1e-12)
    assert divergence_max(f) < 1e-13
    assert hermitian_defect(f) < 1e-14
    # forced slots and dealias support
    kc, mc = dealias_cutoffs(K, M)
    for c, kind in enumerate(parity.z_bases):
        if kind == "sin":
            assert np.all(f.coeffs[c, :, :, 0] == 0.0)
    out_k = np.abs(np.arange(-K, K + 1)) > kc
    assert np.all(f.coeffs[:, out_k, :, :] == 0.0)
    assert np.all(f.coeffs[:, :, out_k, :] == 0.0)
    assert np.all(f.coeffs[:, :, :, mc + 1:] == 0.0)


def test_random_divfree_independent_parities():
    u = random_divfree(FieldParity.VELOCITY, 4, 4, seed=10)
    B = random_divfree(FieldParity.MAGNETIC, 4, 4, seed=10)
    # same seed must not produce the frozen u = B configuration
    assert np.abs(u.coeffs - B.coeffs).max() > 1e-3


def test_random_divfree_rejects_weak_decay():
    with pytest.raises(ValueError):
        random_divfree(FieldParity.VELOCITY, 3, 3, seed=1, decay_power=1.5)


def test_random_divfree_spectrum_stability():
    # smoothness ratio varies little across seeds at fixed decay power
    vals = []
    for seed in range(1, 11):
        f = random_divfree(FieldParity.VELOCITY, 8, 8, seed)
        vals.append(sobolev_norm(f, 3) / norm(f))
    vals = np.array(vals)
    assert np.isfinite(vals).all()
    assert np.abs(vals - vals.mean()).max() < 0.2 * vals.mean()


def test_hermitian_symmetrize():
    rng = np.random.default_rng(2)
    shape = (3, 5, 5, 3)
    raw = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    asym = SpectralField(FieldParity.VELOCITY, 2, 2, raw.copy())
    assert hermitian_defect(asym) > 0.1
    c = hermitian_symmetrize(raw)
    f = SpectralField(FieldParity.VELOCITY, 2, 2, c)
    assert hermitian_defect(f) < 1e-15
    assert np.abs(hermitian_symmetrize(c) - c).max() < 1e-15


@pytest.mark.parametrize("parity", list(FieldParity))
def test_curl_matches_finite_differences(parity):
    K, M = 3, 3
    f = random_divfree(parity, K, M, seed=23)
    w = curl(f)
    N = 96
    got = to_physical(w, GridSpec(N, N, N))

    def eval_at(x, y, z):
        return eval_field(f.coeffs, parity.z_bases, K, M, x, y, z)

    want = fd_curl(eval_at, N, N, N)
    scale = np.abs(want).max()
    # bound set by the 6th-order stencil's own truncation error at N=96;
    # any sign or factor defect in the curl tables shows up at O(scale)
    assert np.abs(got - want).max() < 5e-8 * scale


@pytest.mark.parametrize("parity", list(FieldParity))
def test_curl_parity_flip_and_solenoidal(parity):
    f = random_divfree(parity, 4, 4, seed=31)
    w = curl(f)
    assert w.parity is parity.dual
    assert divergence_max(w) < 1e-12


def test_curl_squared_equals_minus_laplacian():
    for parity in FieldParity:
        f = random_divfree(parity, 4, 5, seed=3)
        cc = curl(curl(f))
        lap = laplacian_apply(f)
        assert np.abs(cc.coeffs + lap.coeffs).max() < 1e-12 * np.abs(lap.coeffs).max()


def test_laplacian_of_shear():
    f = _shear()
    lap = laplacian_apply(f)
    assert np.abs(lap.coeffs + np.pi ** 2 * f.coeffs).max() < 1e-14


def test_leray_project_field_level():
    rng = np.random.default_rng(12)
    K, M = 3, 3
    shape = (3, 7, 7, 4)
    c = hermitian_symmetrize(rng.normal(size=shape) + 1j * rng.normal(size=shape))
    f = SpectralField(FieldParity.VELOCITY, K, M, c)
    p = leray_project(f)
    assert divergence_max(p) < 1e-13 * np.abs(p.coeffs).max()
    pp = leray_project(p)
    assert np.abs(pp.coeffs - p.coeffs).max() < 1e-14
    assert norm(p) <= norm(f) * (1 + 1e-13)


@pytest.mark.parametrize("parity", list(FieldParity))
def test_boundary_trace_clean_fields(parity):
    f = random_divfree(parity, 4, 4, seed=19)
    assert boundary_trace_residual(f) < 1e-12 * np.abs(f.coeffs).max()
    assert boundary_trace_residual(zero(parity, 3, 3)) == 0.0


def test_boundary_trace_detects_corrupted_slot():
    f = random_divfree(FieldParity.VELOCITY, 4, 4, seed=19)
    f.coeffs[2, 4, 4, 0] = 0.7   # forced-zero slot of the normal component
    assert boundary_trace_residual(f) == pytest.approx(0.7, rel=1e-12)

    g = random_divfree(FieldParity.MAGNETIC, 4, 4, seed=20)
    g.coeffs[0, 4, 4, 0] = 0.3   # forced-zero slot of a tangential component
    assert boundary_trace_residual(g) == pytest.approx(0.3, rel=1e-12)


def test_boundary_trace_detects_parity_violation():
    # legal slot, wrong physics: a cos-content normal component
    f = zero(FieldParity.MAGNETIC, 2, 2)
    f.coeffs[0, 2, 2, 1] = 0.5   # B_1 ~ sin(pi z) vanishes at walls: clean
    assert boundary_trace_residual(f) < 1e-15
    f.coeffs[0, 2, 2, 0] = 0.5   # constant tangential part: trace 0.5
    assert boundary_trace_residual(f) == pytest.approx(0.5, rel=1e-12)


def test_velocity_trace_includes_normal_derivative():
    # the slip condition screens d(u_tangential)/dz at the walls, which
    # every cosine profile satisfies structurally
    f = zero(FieldParity.VELOCITY, 2, 4)
    f.coeffs[0, 2, 2, 2] = 1.0   # u1 = cos(2 pi z): du1/dz = 0 at walls
    assert boundary_trace_residual(f) < 1e-15
