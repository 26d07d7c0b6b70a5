"""Spectral vector fields: construction, inner products, norms, traces.

A SpectralField is the complex coefficient tensor of one vector field in
the mixed basis, tagged with its parity family and truncation.  Real
fields satisfy the conjugate symmetry c[-k1,-k2,m] = conj(c[k1,k2,m]);
every constructor here maintains it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .modes import (
    FieldParity,
    curl_coeffs,
    dealias_mask,
    divergence_coeffs,
    laplacian_coeffs,
    leray_coeffs,
    wavenumber_arrays,
)

__all__ = [
    "SpectralField",
    "zero",
    "random_divfree",
    "inner",
    "norm",
    "sobolev_norm",
    "curl",
    "laplacian_apply",
    "leray_project",
    "divergence_max",
    "hermitian_defect",
    "boundary_trace_residual",
]

#: Horizontal cross-section area of the channel T^2 x (0,1).
AREA_XY = (2.0 * np.pi) ** 2


@dataclass
class SpectralField:
    """Coefficient tensor of shape (3, 2K+1, 2K+1, M+1), k-axes -K..K."""

    parity: FieldParity
    K: int
    M: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        expected = (3, 2 * self.K + 1, 2 * self.K + 1, self.M + 1)
        if self.coeffs.shape != expected:
            raise ValueError(
                f"coefficient tensor has shape {self.coeffs.shape}, "
                f"expected {expected} for K={self.K}, M={self.M}"
            )
        if self.coeffs.dtype != np.complex128:
            self.coeffs = self.coeffs.astype(np.complex128)

    def copy(self) -> "SpectralField":
        return SpectralField(self.parity, self.K, self.M, self.coeffs.copy())


def zero(parity: FieldParity, K: int, M: int) -> SpectralField:
    """The zero field at truncation (K, M)."""
    shape = (3, 2 * K + 1, 2 * K + 1, M + 1)
    return SpectralField(parity, K, M, np.zeros(shape, dtype=np.complex128))


def _forced_zero_slots(field: SpectralField) -> None:
    """Zero the m=0 coefficients of sine-basis components, in place."""
    for c, kind in enumerate(field.parity.z_bases):
        if kind == "sin":
            field.coeffs[c, :, :, 0] = 0.0


def hermitian_symmetrize(c: np.ndarray) -> np.ndarray:
    """Average the tensor with its conjugate mirror image in (k1, k2)."""
    return 0.5 * (c + np.conj(c[:, ::-1, ::-1, :]))


def hermitian_defect(field: SpectralField) -> float:
    """Max deviation from the real-field conjugate symmetry."""
    c = field.coeffs
    return float(np.max(np.abs(c - np.conj(c[:, ::-1, ::-1, :]))))


def random_divfree(
    parity: FieldParity, K: int, M: int, seed: int, decay_power: float = 2.0
) -> SpectralField:
    """Deterministic random solenoidal field with unit L2 norm.

    Each retained block gets a random orientation and an exact modulus
    (1 + eigenvalue)^(-p): random-phase draws are conjugate-symmetrized,
    cleared in the parity-forced slots, projected solenoidal, dealiased
    (so products formed later stay alias-free), then rescaled per block
    to the target modulus and normalized.  Pinning the moduli makes the
    spectrum shape, hence any derived norm ratio, independent of the
    seed; only phases and block orientations vary.  Mirror blocks stay
    exact conjugates because they share the same modulus.  The generator
    stream is keyed by (seed, parity) so one seed yields independent
    velocity and magnetic draws; identical calls are bit-identical.
    """
    if decay_power < 2.0:
        raise ValueError(f"decay_power must be >= 2, got {decay_power}")
    parity_idx = 0 if parity is FieldParity.VELOCITY else 1
    rng = np.random.default_rng([seed % (2 ** 63), parity_idx])
    shape = (3, 2 * K + 1, 2 * K + 1, M + 1)
    c = hermitian_symmetrize(np.exp(2j * np.pi * rng.random(shape)))
    field = SpectralField(parity, K, M, c)
    _forced_zero_slots(field)
    field.coeffs = leray_coeffs(field.coeffs, K, M, parity)
    field.coeffs *= dealias_mask(K, M)
    _, _, _, lam = wavenumber_arrays(K, M)
    mag = np.sqrt(np.sum(np.abs(field.coeffs) ** 2, axis=0))
    target = (1.0 + lam) ** (-decay_power)
    with np.errstate(invalid="ignore", divide="ignore"):
        rescale = np.where(mag > 0.0, target / np.where(mag > 0.0, mag, 1.0), 0.0)
    field.coeffs *= rescale
    n = norm(field)
    if n == 0.0:
        raise ValueError("degenerate draw: field vanished after projection")
    field.coeffs /= n
    return field


@lru_cache(maxsize=32)
def _l2_weights(parity: FieldParity, M: int) -> np.ndarray:
    """Per-slot L2 weight of the z-basis functions on (0,1).

    cos(m pi z) has squared norm 1 for m=0 and 1/2 otherwise; sin slots
    get 1/2 throughout (their m=0 coefficient is structurally zero).
    """
    w = np.full((3, 1, 1, M + 1), 0.5)
    for c, kind in enumerate(parity.z_bases):
        if kind == "cos":
            w[c, 0, 0, 0] = 1.0
    w.setflags(write=False)
    return w


def _check_compatible(f: SpectralField, g: SpectralField) -> None:
    if f.parity is not g.parity:
        raise ValueError(f"parity mismatch: {f.parity} vs {g.parity}")
    if (f.K, f.M) != (g.K, g.M):
        raise ValueError(
            f"truncation mismatch: ({f.K},{f.M}) vs ({g.K},{g.M})"
        )


def inner(f: SpectralField, g: SpectralField) -> float:
    """L2(T^2 x (0,1)) inner product, evaluated in coefficient space."""
    _check_compatible(f, g)
    w = _l2_weights(f.parity, f.M)
    return float(AREA_XY * np.sum(w * (f.coeffs * np.conj(g.coeffs)).real))


def norm(f: SpectralField) -> float:
    """L2 norm."""
    return float(np.sqrt(max(inner(f, f), 0.0)))


def sobolev_norm(f: SpectralField, s: int) -> float:
    """sqrt(||f||^2 + ||curl^s f||^2); s = 0 gives the plain L2 norm.

    Valid for solenoidal fields, where repeated curls act per block as
    eigenvalue^(s/2) rotations and the norm reduces to a weighted sum.
    """
    if s < 0:
        raise ValueError(f"s must be a nonnegative integer, got {s}")
    w = _l2_weights(f.parity, f.M)
    mag2 = w * np.abs(f.coeffs) ** 2
    base = AREA_XY * float(np.sum(mag2))
    if s == 0:
        return float(np.sqrt(max(base, 0.0)))
    _, _, _, lam = wavenumber_arrays(f.K, f.M)
    curl_s = AREA_XY * float(np.sum(lam ** s * mag2))
    return float(np.sqrt(max(base + curl_s, 0.0)))


def curl(f: SpectralField) -> SpectralField:
    """Curl; lands in the dual parity family."""
    return SpectralField(
        f.parity.dual, f.K, f.M, curl_coeffs(f.coeffs, f.K, f.M, f.parity)
    )


def laplacian_apply(f: SpectralField) -> SpectralField:
    """Component-wise Laplacian: -eigenvalue per block, parity kept."""
    return SpectralField(f.parity, f.K, f.M, laplacian_coeffs(f.coeffs, f.K, f.M))


def leray_project(f: SpectralField) -> SpectralField:
    """Per-block solenoidal projection of the whole field."""
    return SpectralField(
        f.parity, f.K, f.M, leray_coeffs(f.coeffs, f.K, f.M, f.parity)
    )


def divergence_max(f: SpectralField) -> float:
    """Max per-block divergence magnitude |d . c| over all modes."""
    return float(np.max(np.abs(divergence_coeffs(f.coeffs, f.K, f.M, f.parity))))


def _surface_max(trace: np.ndarray, K: int) -> float:
    """Max magnitude of a (2K+1, 2K+1) horizontal trace over a fine grid."""
    n = max(8, 4 * K + 4)
    grid = np.zeros((n, n), dtype=np.complex128)
    idx = np.arange(-K, K + 1) % n
    grid[np.ix_(idx, idx)] = trace
    vals = np.fft.ifft2(grid) * (n * n)
    return float(np.max(np.abs(vals)))


def boundary_trace_residual(f: SpectralField) -> float:
    """Worst boundary-condition violation over both walls z in {0, 1}.

    Velocity parity measures |dz f1|, |dz f2|, |f3|; magnetic parity
    measures |f1|, |f2|, |dz f3|.  Traces are direct z-series sums at the
    walls, maximized over a fine surface grid.  sin(m pi z) is zero at
    integer z exactly, not to roundoff, so the sums are taken with exact
    face values; what remains is the m = 0 slot of each sine component --
    structurally zero, read here as constant (cos, m = 0) content -- so a
    coefficient injected there shows up with its full magnitude.
    """
    K, M = f.K, f.M
    sin_face = np.zeros(M + 1)  # sin(m pi z) at z in {0, 1}, exactly
    traces: list[np.ndarray] = []
    for c, kind in enumerate(f.parity.z_bases):
        if kind == "cos":
            # dz cos(m pi z) = -m pi sin(m pi z): slip / flux condition
            traces.append(f.coeffs[c] @ sin_face)
        else:
            # value trace; m = 0 slot read as constant content
            traces.append(f.coeffs[c] @ sin_face + f.coeffs[c, :, :, 0])
    return max(_surface_max(t, K) for t in traces)
