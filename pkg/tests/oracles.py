"""Independent reference computations for the test suite.

Nothing here shares code paths with the package: fields are evaluated
by explicit phase-matrix summation instead of FFTs, derivatives by
high-order finite differences, projections by dense linear algebra, and
integrals by raw quadrature.  Agreement between these routes and the
package is what the derived-value tests assert.
"""

from __future__ import annotations

import numpy as np

# weights of the centered 6th-order first-derivative stencil
_STENCIL6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


def eval_field(coeffs: np.ndarray, z_bases, K: int, M: int,
               x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Direct summation of the mixed Fourier/half-wave series.

    coeffs has shape (3, 2K+1, 2K+1, M+1) with wavenumbers -K..K on both
    horizontal axes; z_bases gives 'cos' or 'sin' per component.
    Returns real values of shape (3, len(x), len(y), len(z)).
    """
    k = np.arange(-K, K + 1)
    ex = np.exp(1j * np.outer(k, np.asarray(x, dtype=float)))
    ey = np.exp(1j * np.outer(k, np.asarray(y, dtype=float)))
    phase = np.pi * np.outer(np.arange(M + 1), np.asarray(z, dtype=float))
    out = np.empty((3, len(x), len(y), len(z)))
    for c, kind in enumerate(z_bases):
        zb = np.cos(phase) if kind == "cos" else np.sin(phase)
        t = np.einsum("abm,ml->abl", coeffs[c], zb)
        t = np.einsum("abl,ai->ibl", t, ex)
        t = np.einsum("ibl,bj->ijl", t, ey)
        out[c] = t.real
    return out


def fd_derivative_periodic(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """6th-order centered first derivative along a periodic axis."""
    out = np.zeros_like(values)
    for offset, w in zip(range(-3, 4), _STENCIL6):
        if w != 0.0:
            out += w * np.roll(values, -offset, axis=axis)
    return out / h


def fd_derivative_open(values_ext: np.ndarray, h: float) -> np.ndarray:
    """6th-order first derivative along the last axis of ghost-padded data.

    values_ext must carry three extra nodes on each end of the last
    axis; the derivative is returned on the interior nodes only.
    """
    n = values_ext.shape[-1] - 6
    out = np.zeros(values_ext.shape[:-1] + (n,))
    for j, w in enumerate(_STENCIL6):
        if w != 0.0:
            out += w * values_ext[..., j:j + n]
    return out / h


def fd_curl(eval_at, Nx: int, Ny: int, Nz: int) -> np.ndarray:
    """Finite-difference curl of a field given by a pointwise evaluator.

    eval_at(x, y, z) must return values of shape (3, nx, ny, nz) for
    arbitrary node vectors, which lets the z-derivative use ghost nodes
    outside [0, 1] (the series extends smoothly).  Returns the curl on
    the (Nx, Ny, Nz+1) product grid.
    """
    x = 2.0 * np.pi * np.arange(Nx) / Nx
    y = 2.0 * np.pi * np.arange(Ny) / Ny
    hz = 1.0 / Nz
    z_ext = hz * np.arange(-3, Nz + 4)
    vals = eval_at(x, y, z_ext)

    hx = 2.0 * np.pi / Nx
    hy = 2.0 * np.pi / Ny
    core = vals[..., 3:-3]
    ddx = fd_derivative_periodic(core, axis=1, h=hx)
    ddy = fd_derivative_periodic(core, axis=2, h=hy)
    ddz = fd_derivative_open(vals, h=hz)
    return np.stack([
        ddy[2] - ddz[1],
        ddz[0] - ddx[2],
        ddx[1] - ddy[0],
    ])


def quad_inner(fv: np.ndarray, gv: np.ndarray, Nx: int, Ny: int, Nz: int) -> float:
    """Trapezoid-in-z, rectangle-in-xy quadrature of sum_c f_c g_c."""
    wz = np.ones(Nz + 1)
    wz[0] = wz[-1] = 0.5
    cell = (2.0 * np.pi / Nx) * (2.0 * np.pi / Ny) / Nz
    return cell * float(np.einsum("cijl,cijl,l->", fv, gv, wz))


def dense_leray(u_hat: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto {v : d . v = 0} via an SVD null basis."""
    d = np.asarray(d, dtype=complex)
    if np.allclose(d, 0.0):
        return np.asarray(u_hat, dtype=complex)
    a = d.reshape(1, 3)
    _, _, vh = np.linalg.svd(a)
    null_basis = vh[1:].conj().T  # (3, 2), columns orthonormal, a @ cols = 0
    return null_basis @ (null_basis.conj().T @ np.asarray(u_hat, dtype=complex))
