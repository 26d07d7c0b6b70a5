"""Grid synthesis/analysis: exactness, round trips, boundary screening."""

import numpy as np
import pytest

from mhdflat.fields import SpectralField, inner, random_divfree, zero
from mhdflat.modes import FieldParity, dealias_cutoffs
from mhdflat.transforms import GridSpec, dealias, to_physical, to_spectral

from oracles import eval_field, quad_inner


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(7, 8, 4)   # odd Nx
    with pytest.raises(ValueError):
        GridSpec(8, 6, 0)   # empty z
    with pytest.raises(ValueError):
        GridSpec(0, 8, 4)


def test_gridspec_nodes():
    g = GridSpec(8, 4, 5)
    assert g.x_nodes.shape == (8,)
    assert g.x_nodes[1] == pytest.approx(2 * np.pi / 8)
    assert g.z_nodes[0] == 0.0 and g.z_nodes[-1] == 1.0
    assert len(g.z_nodes) == 6


def test_dealias_bound_edge():
    # K=M=8 needs 2Nx >= 51 and 2Nz >= 26
    assert GridSpec(26, 26, 13).meets_dealias_bound(8, 8)
    assert not GridSpec(24, 26, 13).meets_dealias_bound(8, 8)
    assert not GridSpec(26, 26, 12).meets_dealias_bound(8, 8)
    with pytest.raises(ValueError, match="dealias"):
        GridSpec(26, 26, 12).require_dealias_bound(8, 8)


def test_refine():
    g = GridSpec(8, 10, 4).refine(2)
    assert (g.Nx, g.Ny, g.Nz) == (16, 20, 8)


def test_synthesis_of_zero_field():
    g = GridSpec(8, 8, 4)
    v = to_physical(zero(FieldParity.VELOCITY, 2, 3), g)
    assert v.shape == (3, 8, 8, 5)
    assert np.all(v == 0.0)


def test_synthesis_shear_profile():
    K, M = 2, 3
    f = zero(FieldParity.VELOCITY, K, M)
    f.coeffs[0, K, K, 1] = 1.0
    g = GridSpec(8, 8, 6)
    v = to_physical(f, g)
    want = np.cos(np.pi * g.z_nodes)
    assert np.abs(v[0] - want[None, None, :]).max() < 1e-14
    assert np.abs(v[1:]).max() == 0.0


@pytest.mark.parametrize("parity", list(FieldParity))
def test_synthesis_matches_direct_summation(parity):
    K, M = 4, 4
    f = random_divfree(parity, K, M, seed=13)
    g = GridSpec(16, 12, 8)
    got = to_physical(f, g)
    want = eval_field(f.coeffs, parity.z_bases, K, M, g.x_nodes, g.y_nodes, g.z_nodes)
    assert np.abs(got - want).max() < 1e-12 * np.abs(want).max()


@pytest.mark.parametrize("parity", list(FieldParity))
def test_round_trip_on_basic_grid(parity):
    # full-band content survives analysis on the smallest legal grid
    K, M = 4, 4
    from mhdflat.fields import hermitian_symmetrize, _forced_zero_slots
    from mhdflat.modes import leray_coeffs

    rng = np.random.default_rng(3)
    shape = (3, 2 * K + 1, 2 * K + 1, M + 1)
    c = hermitian_symmetrize(rng.normal(size=shape) + 1j * rng.normal(size=shape))
    f = SpectralField(parity, K, M, leray_coeffs(c, K, M, parity))
    _forced_zero_slots(f)
    g = GridSpec(10, 10, 5)
    back = to_spectral(to_physical(f, g), parity, K, M, g)
    assert np.abs(back.coeffs - f.coeffs).max() < 1e-12 * np.abs(f.coeffs).max()


def test_analysis_of_pointwise_square():
    # cos^2(pi z) = 1/2 + cos(2 pi z)/2 lands on the m=0 and m=2 slots
    K, M = 2, 3
    f = zero(FieldParity.VELOCITY, K, M)
    f.coeffs[0, K, K, 1] = 1.0
    g = GridSpec(8, 8, 6)
    v = to_physical(f, g)
    sq = np.zeros_like(v)
    sq[0] = v[0] ** 2
    back = to_spectral(sq, FieldParity.VELOCITY, K, M, g)
    want = zero(FieldParity.VELOCITY, K, M)
    want.coeffs[0, K, K, 0] = 0.5
    want.coeffs[0, K, K, 2] = 0.5
    assert np.abs(back.coeffs - want.coeffs).max() < 1e-14


@pytest.mark.parametrize("parity", list(FieldParity))
def test_parseval_against_quadrature(parity):
    K, M = 4, 5
    f = random_divfree(parity, K, M, seed=29)
    for g in (GridSpec(12, 12, 6), GridSpec(16, 14, 9)):
        v = to_physical(f, g)
        q = quad_inner(v, v, g.Nx, g.Ny, g.Nz)
        assert q == pytest.approx(inner(f, f), rel=1e-10)


def test_boundary_screening_velocity():
    K, M = 2, 2
    g = GridSpec(8, 8, 4)
    v = np.zeros((3, 8, 8, 5))
    v[2, :, :, 0] = 1e-6  # normal flow through the bottom wall
    with pytest.raises(ValueError, match="component 3"):
        to_spectral(v, FieldParity.VELOCITY, K, M, g)


def test_boundary_screening_magnetic():
    K, M = 2, 2
    g = GridSpec(8, 8, 4)
    v = np.zeros((3, 8, 8, 5))
    v[0, :, :, -1] = 1e-6  # tangential field on the top wall
    with pytest.raises(ValueError, match="component 1"):
        to_spectral(v, FieldParity.MAGNETIC, K, M, g)


def test_boundary_screening_scales_with_field():
    # interior magnitude sets the tolerance; a clean large field passes
    K, M = 3, 3
    g = GridSpec(12, 12, 6)
    f = random_divfree(FieldParity.VELOCITY, K, M, seed=8)
    v = 1e8 * to_physical(f, g)
    to_spectral(v, FieldParity.VELOCITY, K, M, g)  # must not raise


def test_analysis_rejects_bad_shapes():
    g = GridSpec(8, 8, 4)
    with pytest.raises(ValueError):
        to_spectral(np.zeros((3, 8, 8, 4)), FieldParity.VELOCITY, 2, 2, g)
    with pytest.raises(ValueError):
        to_spectral(np.zeros((2, 8, 8, 5)), FieldParity.VELOCITY, 2, 2, g)


def test_analysis_rejects_undersized_grid():
    with pytest.raises(ValueError):
        # Nz = 4 cannot separate m = 0..4
        to_spectral(np.zeros((3, 12, 12, 5)), FieldParity.VELOCITY, 4, 4, GridSpec(12, 12, 4))


def test_dealias_zeroes_top_third():
    K, M = 4, 6
    kc, mc = dealias_cutoffs(K, M)
    f = random_divfree(FieldParity.VELOCITY, K, M, seed=5)
    g = SpectralField(f.parity, K, M, f.coeffs + 0.1)  # fill every slot
    d = dealias(g)
    k = np.arange(-K, K + 1)
    keep = ((np.abs(k)[:, None, None] <= kc)
            & (np.abs(k)[None, :, None] <= kc)
            & (np.arange(M + 1)[None, None, :] <= mc))
    assert np.all(d.coeffs[:, ~keep] == 0.0)
    assert np.array_equal(d.coeffs[:, keep], g.coeffs[:, keep])
    # idempotent and energy nonincreasing
    assert np.array_equal(dealias(d).coeffs, d.coeffs)
    assert np.sum(np.abs(d.coeffs) ** 2) <= np.sum(np.abs(g.coeffs) ** 2)


@pytest.mark.parametrize("parity", list(FieldParity))
def test_quadratic_products_analyze_exactly(parity):
    # alias-free bound: products of dealiased fields have every retained
    # coefficient recovered exactly on the 3/2-rule grid
    K, M = 4, 4
    f = dealias(random_divfree(parity, K, M, seed=17))
    h = dealias(random_divfree(parity, K, M, seed=18))
    g = GridSpec(16, 16, 8)   # 2*16 >= 3*9, 2*8 >= 14
    fine = GridSpec(32, 32, 16)
    fv, hv = to_physical(f, g), to_physical(h, g)
    prod = np.zeros_like(fv)
    prod[0] = fv[0] * hv[0]   # cos*cos (velocity) or sin*sin (magnetic): cos tagging
    got = to_spectral(prod, FieldParity.VELOCITY, K, M, g)
    fvf, hvf = to_physical(f, fine), to_physical(h, fine)
    prodf = np.zeros_like(fvf)
    prodf[0] = fvf[0] * hvf[0]
    want = to_spectral(prodf, FieldParity.VELOCITY, K, M, fine)
    assert np.abs(got.coeffs - want.coeffs).max() < 1e-13 * max(np.abs(want.coeffs).max(), 1e-30)
