"""Mode bookkeeping and per-mode linear algebra for the mixed basis.

Fields live on the periodic channel T^2 x (0,1): Fourier waves
exp(i(k1 x + k2 y)) horizontally (period 2 pi, integer wavenumbers) and
half-wave profiles cos(m pi z) / sin(m pi z) vertically.  Which profile a
vector component carries is fixed by its parity family:

* velocity parity: (cos, cos, sin) -- slip walls, dz u1 = dz u2 = u3 = 0
* magnetic parity: (sin, sin, cos) -- insulating walls, B1 = B2 = 0

With the sign conventions d/dz cos(m pi z) = -m pi sin(m pi z) and
d/dz sin(m pi z) = +m pi cos(m pi z), curl maps each family onto the other
and curl twice equals -Laplacian = eigenvalue(mode) on solenoidal blocks.

Everything in this module acts on a single (k1, k2, m) coefficient block
(3-vectors) or, in the vectorized helpers, on the full coefficient tensor
of shape (3, 2K+1, 2K+1, M+1) with k-axes ordered -K..K and m-axis 0..M.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

__all__ = [
    "FieldParity",
    "ModeIndex",
    "enumerate_modes",
    "eigenvalue",
    "divergence_vector",
    "leray_project_block",
    "curl_block",
    "wavenumber_arrays",
    "curl_coeffs",
    "divergence_coeffs",
    "leray_coeffs",
    "laplacian_coeffs",
    "dealias_cutoffs",
    "dealias_mask",
]


class FieldParity(Enum):
    """Boundary-condition family of a vector field."""

    VELOCITY = "velocity"
    MAGNETIC = "magnetic"

    @property
    def z_bases(self) -> tuple[str, str, str]:
        """Vertical basis kind ("cos" or "sin") of each component."""
        if self is FieldParity.VELOCITY:
            return ("cos", "cos", "sin")
        return ("sin", "sin", "cos")

    @property
    def dual(self) -> "FieldParity":
        """The parity family curl maps this one onto."""
        if self is FieldParity.VELOCITY:
            return FieldParity.MAGNETIC
        return FieldParity.VELOCITY


class ModeIndex(NamedTuple):
    """A single (k1, k2, m) mode; |k1|, |k2| <= K and 0 <= m <= M."""

    k1: int
    k2: int
    m: int


def enumerate_modes(K: int, M: int) -> list[ModeIndex]:
    """All retained modes in lexicographic (k1, k2, m) order.

    The count is (2K+1)^2 (M+1) and the first entry is (-K, -K, 0); the
    order matches C-order iteration of the coefficient tensor.
    """
    if K < 0 or M < 0:
        raise ValueError(f"truncation must be nonnegative, got K={K}, M={M}")
    return [
        ModeIndex(k1, k2, m)
        for k1 in range(-K, K + 1)
        for k2 in range(-K, K + 1)
        for m in range(M + 1)
    ]


def eigenvalue(mode: ModeIndex) -> float:
    """-Laplacian eigenvalue k1^2 + k2^2 + (m pi)^2 of the mode."""
    k1, k2, m = mode
    return float(k1 * k1 + k2 * k2 + (m * np.pi) ** 2)


def divergence_vector(mode: ModeIndex, parity: FieldParity) -> np.ndarray:
    """Vector d with div(block) = d . u_hat (plain, unconjugated dot).

    The sign of the third entry follows the z-derivative of that
    component's basis: +m pi for velocity parity (sin slot), -m pi for
    magnetic parity (cos slot).
    """
    k1, k2, m = mode
    sign = 1.0 if parity is FieldParity.VELOCITY else -1.0
    return np.array([1j * k1, 1j * k2, sign * m * np.pi], dtype=np.complex128)


def leray_project_block(
    u_hat: np.ndarray, mode: ModeIndex, parity: FieldParity
) -> np.ndarray:
    """Orthogonal projection of one coefficient block onto d . u = 0.

    Gradient blocks are parallel to conj(d), so the projection subtracts
    the component along conj(d):

        u - (d . u / |d|^2) conj(d)

    which annihilates discrete gradients, leaves solenoidal blocks
    untouched, and is idempotent and self-adjoint.  The (0,0,0) block has
    d = 0 and is returned unchanged (retained mean mode).
    """
    u_hat = np.asarray(u_hat, dtype=np.complex128)
    d = divergence_vector(mode, parity)
    lam = float(np.real(np.vdot(d, d)))
    if lam == 0.0:
        return u_hat.copy()
    return u_hat - (np.dot(d, u_hat) / lam) * np.conj(d)


def curl_block(
    u_hat: np.ndarray, mode: ModeIndex, parity: FieldParity
) -> tuple[np.ndarray, FieldParity]:
    """Curl of one coefficient block; the output lives in the dual parity.

    The m pi terms carry the sign of the z-derivative acting on the input
    component's basis (cos slots differentiate to -m pi sin, sin slots to
    +m pi cos).
    """
    u_hat = np.asarray(u_hat, dtype=np.complex128)
    k1, k2, m = mode
    mpi = m * np.pi
    c1, c2, c3 = u_hat
    if parity is FieldParity.VELOCITY:
        w = np.array(
            [
                mpi * c2 + 1j * k2 * c3,
                -mpi * c1 - 1j * k1 * c3,
                1j * k1 * c2 - 1j * k2 * c1,
            ],
            dtype=np.complex128,
        )
    else:
        w = np.array(
            [
                -mpi * c2 + 1j * k2 * c3,
                mpi * c1 - 1j * k1 * c3,
                1j * k1 * c2 - 1j * k2 * c1,
            ],
            dtype=np.complex128,
        )
    return w, parity.dual


# ----------------------------------------------------------------------
# Vectorized forms over the full coefficient tensor (3, 2K+1, 2K+1, M+1).
# ----------------------------------------------------------------------


@lru_cache(maxsize=32)
def wavenumber_arrays(
    K: int, M: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Broadcastable (k1, k2, m pi, eigenvalue) meshes for truncation (K, M).

    Shapes are (2K+1,1,1), (1,2K+1,1), (1,1,M+1) and (2K+1,2K+1,M+1); the
    returned arrays are read-only and shared between callers.
    """
    k1 = np.arange(-K, K + 1, dtype=np.float64).reshape(-1, 1, 1)
    k2 = np.arange(-K, K + 1, dtype=np.float64).reshape(1, -1, 1)
    mpi = np.pi * np.arange(0, M + 1, dtype=np.float64).reshape(1, 1, -1)
    lam = k1 ** 2 + k2 ** 2 + mpi ** 2
    for a in (k1, k2, mpi, lam):
        a.setflags(write=False)
    return k1, k2, mpi, lam


def curl_coeffs(c: np.ndarray, K: int, M: int, parity: FieldParity) -> np.ndarray:
    """curl on the whole tensor; see curl_block for the sign table."""
    k1, k2, mpi, _ = wavenumber_arrays(K, M)
    s = 1.0 if parity is FieldParity.VELOCITY else -1.0
    out = np.empty_like(c)
    out[0] = s * mpi * c[1] + 1j * k2 * c[2]
    out[1] = -s * mpi * c[0] - 1j * k1 * c[2]
    out[2] = 1j * k1 * c[1] - 1j * k2 * c[0]
    return out


def divergence_coeffs(
    c: np.ndarray, K: int, M: int, parity: FieldParity
) -> np.ndarray:
    """Per-block divergence d . c over the whole tensor."""
    k1, k2, mpi, _ = wavenumber_arrays(K, M)
    s = 1.0 if parity is FieldParity.VELOCITY else -1.0
    return 1j * k1 * c[0] + 1j * k2 * c[1] + s * mpi * c[2]


def leray_coeffs(c: np.ndarray, K: int, M: int, parity: FieldParity) -> np.ndarray:
    """Vectorized solenoidal projection; identity on the d = 0 mean block."""
    k1, k2, mpi, lam = wavenumber_arrays(K, M)
    s = 1.0 if parity is FieldParity.VELOCITY else -1.0
    div = divergence_coeffs(c, K, M, parity)
    lam_safe = np.where(lam > 0.0, lam, 1.0)
    alpha = np.where(lam > 0.0, div / lam_safe, 0.0)
    out = c.copy()
    # conj(d) = (-i k1, -i k2, s m pi)
    out[0] -= alpha * (-1j * k1)
    out[1] -= alpha * (-1j * k2)
    out[2] -= alpha * (s * mpi)
    return out


def laplacian_coeffs(c: np.ndarray, K: int, M: int) -> np.ndarray:
    """Laplacian: each block scaled by -eigenvalue, parity preserved."""
    _, _, _, lam = wavenumber_arrays(K, M)
    return -lam * c


def dealias_cutoffs(K: int, M: int) -> tuple[int, int]:
    """Two-thirds-rule cutoffs (floor(2K/3), floor(2M/3))."""
    return (2 * K) // 3, (2 * M) // 3


@lru_cache(maxsize=32)
def dealias_mask(K: int, M: int) -> np.ndarray:
    """Boolean keep-mask of shape (2K+1, 2K+1, M+1) for the 2/3 rule."""
    kc, mc = dealias_cutoffs(K, M)
    k = np.abs(np.arange(-K, K + 1))
    m = np.arange(M + 1)
    mask = (
        (k[:, None, None] <= kc)
        & (k[None, :, None] <= kc)
        & (m[None, None, :] <= mc)
    )
    mask.setflags(write=False)
    return mask
