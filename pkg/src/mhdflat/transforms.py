"""Grid <-> coefficient transforms.

Horizontal legs use the FFT with the exp(i(k1 x + k2 y)) convention and
1/(Nx Ny) on analysis.  Vertical legs evaluate / invert the half-wave
series on the endpoint-inclusive uniform grid z_l = l/Nz via trapezoid
weights, which are exact for the retained cos/sin families when
Nz >= M + 1.  Products of two dealiased fields are analyzed exactly up to
(K, M) when the grid meets the dealiasing bounds, so the 2/3-rule
truncation below is the only spectral surgery the dynamics ever needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import SpectralField, hermitian_symmetrize
from .modes import FieldParity, dealias_mask

__all__ = ["GridSpec", "to_physical", "to_spectral", "dealias"]

#: A physical-space vector field: real array of shape (3, Nx, Ny, Nz+1).
PhysicalField = np.ndarray


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid: Nx x Ny periodic nodes, Nz+1 endpoint z nodes."""

    Nx: int
    Ny: int
    Nz: int

    def __post_init__(self) -> None:
        if self.Nx <= 0 or self.Nx % 2 or self.Ny <= 0 or self.Ny % 2:
            raise ValueError(
                f"Nx, Ny must be even positive integers, got {self.Nx}, {self.Ny}"
            )
        if self.Nz <= 0:
            raise ValueError(f"Nz must be a positive integer, got {self.Nz}")

    @property
    def x_nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.Nx) / self.Nx

    @property
    def y_nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.Ny) / self.Ny

    @property
    def z_nodes(self) -> np.ndarray:
        return np.arange(self.Nz + 1) / self.Nz

    def meets_basic_bound(self, K: int, M: int) -> bool:
        # exact synthesis/analysis of the truncated family itself
        return self.Nx >= 2 * K + 2 and self.Ny >= 2 * K + 2 and self.Nz >= M + 1

    def meets_dealias_bound(self, K: int, M: int) -> bool:
        # alias-free analysis of quadratic products up to (K, M)
        return (
            2 * self.Nx >= 3 * (2 * K + 1)
            and 2 * self.Ny >= 3 * (2 * K + 1)
            and 2 * self.Nz >= 3 * M + 2
        )

    def require_dealias_bound(self, K: int, M: int) -> None:
        if not self.meets_dealias_bound(K, M):
            raise ValueError(
                f"grid ({self.Nx},{self.Ny},{self.Nz}) is below the dealiasing "
                f"bound for K={K}, M={M}: need Nx,Ny >= 3(2K+1)/2 = "
                f"{3 * (2 * K + 1) / 2:g} and Nz >= 3M/2+1 = {3 * M / 2 + 1:g}"
            )

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(factor * self.Nx, factor * self.Ny, factor * self.Nz)


@lru_cache(maxsize=64)
def _z_synthesis(M: int, Nz: int) -> tuple[np.ndarray, np.ndarray]:
    # (M+1, Nz+1) tables of cos(m pi z_l) and sin(m pi z_l)
    phase = np.pi * np.outer(np.arange(M + 1), np.arange(Nz + 1) / Nz)
    cos_t = np.cos(phase)
    sin_t = np.sin(phase)
    cos_t.setflags(write=False)
    sin_t.setflags(write=False)
    return cos_t, sin_t


@lru_cache(maxsize=64)
def _z_analysis(M: int, Nz: int) -> tuple[np.ndarray, np.ndarray]:
    # (Nz+1, M+1) trapezoid analysis tables; exact for m, m' <= Nz-1
    if Nz < M + 1:
        raise ValueError(f"Nz={Nz} too small to analyze M={M} (need Nz >= M+1)")
    cos_t, sin_t = _z_synthesis(M, Nz)
    w = np.ones(Nz + 1)
    w[0] = w[-1] = 0.5
    scale = np.full(M + 1, 2.0 / Nz)
    scale[0] = 1.0 / Nz
    a_cos = (cos_t * w).T * scale
    a_sin = (sin_t * w).T * (2.0 / Nz)
    a_sin[:, 0] = 0.0
    a_cos.setflags(write=False)
    a_sin.setflags(write=False)
    return a_cos, a_sin


def _k_bins(K: int, N: int) -> np.ndarray:
    return np.arange(-K, K + 1) % N


def to_physical(field: SpectralField, grid: GridSpec) -> PhysicalField:
    """Evaluate the field on the tensor grid; returns (3, Nx, Ny, Nz+1)."""
    K, M = field.K, field.M
    if not grid.meets_basic_bound(K, M):
        raise ValueError(
            f"grid ({grid.Nx},{grid.Ny},{grid.Nz}) cannot represent K={K}, M={M}"
        )
    cos_t, sin_t = _z_synthesis(M, grid.Nz)
    zbasis = np.stack(
        [cos_t if kind == "cos" else sin_t for kind in field.parity.z_bases]
    )
    profiles = np.einsum("cabm,cml->cabl", field.coeffs, zbasis)
    spec = np.zeros(
        (3, grid.Nx, grid.Ny, grid.Nz + 1), dtype=np.complex128
    )
    ix, iy = _k_bins(K, grid.Nx), _k_bins(K, grid.Ny)
    spec[:, ix[:, None], iy[None, :], :] = profiles
    vals = np.fft.ifft2(spec, axes=(1, 2)) * (grid.Nx * grid.Ny)
    return np.ascontiguousarray(vals.real)


def _check_boundary_parity(
    values: PhysicalField, parity: FieldParity, grid: GridSpec
) -> None:
    # wall values that the parity family forces to zero
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return
    tol = 1e-10 * scale
    zero_comps = [2] if parity is FieldParity.VELOCITY else [0, 1]
    for c in zero_comps:
        for face, l in (("z=0", 0), ("z=1", grid.Nz)):
            worst = float(np.max(np.abs(values[c, :, :, l])))
            if worst > tol:
                raise ValueError(
                    f"boundary values inconsistent with {parity.value} parity: "
                    f"|component {c + 1}| = {worst:.3e} at {face} "
                    f"(tolerance {tol:.3e})"
                )


def to_spectral(
    values: PhysicalField,
    parity: FieldParity,
    K: int,
    M: int,
    grid: GridSpec,
) -> SpectralField:
    """Analyze grid values into coefficients up to (K, M).

    Rejects data whose wall values are inconsistent with the parity
    family (relative tolerance 1e-10).  Output is conjugate-symmetrized,
    so real input yields a real field exactly.
    """
    values = np.asarray(values, dtype=np.float64)
    expected = (3, grid.Nx, grid.Ny, grid.Nz + 1)
    if values.shape != expected:
        raise ValueError(f"values have shape {values.shape}, expected {expected}")
    if not grid.meets_basic_bound(K, M):
        raise ValueError(
            f"grid ({grid.Nx},{grid.Ny},{grid.Nz}) cannot analyze K={K}, M={M}"
        )
    _check_boundary_parity(values, parity, grid)
    ft = np.fft.fft2(values, axes=(1, 2)) / (grid.Nx * grid.Ny)
    ix, iy = _k_bins(K, grid.Nx), _k_bins(K, grid.Ny)
    win = ft[:, ix[:, None], iy[None, :], :]
    a_cos, a_sin = _z_analysis(M, grid.Nz)
    zanalysis = np.stack(
        [a_cos if kind == "cos" else a_sin for kind in parity.z_bases]
    )
    coeffs = np.einsum("cabl,clm->cabm", win, zanalysis)
    coeffs = hermitian_symmetrize(coeffs)
    return SpectralField(parity, K, M, coeffs)


def dealias(field: SpectralField) -> SpectralField:
    """Two-thirds rule: zero blocks with |k1|, |k2| > 2K/3 or m > 2M/3."""
    return SpectralField(
        field.parity,
        field.K,
        field.M,
        field.coeffs * dealias_mask(field.K, field.M),
    )
