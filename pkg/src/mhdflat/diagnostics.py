"""Verification diagnostics computed alongside a run.

Most quantities here are residuals of identities that hold exactly for
the semi-discrete system, so their sampled values measure nothing but
roundoff and time-discretization error:

  * the energy law  d/dt (E_u + E_B) = -2 nu ||curl u||^2 - 2 mu ||curl B||^2,
    checked in endpoint-averaged finite-difference form between
    consecutive records;
  * the nonlinear cancellation <h1, u> + <h2, B> = 0;
  * the interchange pairing <B . grad a, b> + <B . grad b, a> = 0 with
    a = curl^3 u and b = curl^3 B, which survives integration by parts
    because at the walls a is purely normal and b purely tangential;
  * vanishing tangential wall traces of the curls of the three
    quadratic fluxes B x u, (curl u) x u, (curl B) x B, and of the
    triple curl of B x u.

Everything is evaluated on a refined grid (factor 2 in each direction)
so that quadratures of cubic products are exact and the product fields
themselves are analyzed alias-free.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .fields import (
    SpectralField,
    _surface_max,
    boundary_trace_residual,
    curl,
    inner,
    laplacian_apply,
    sobolev_norm,
)
from .modes import FieldParity, wavenumber_arrays
from .transforms import GridSpec, dealias, to_physical, to_spectral

__all__ = [
    "DiagnosticsRecord",
    "BoundaryLemmaResiduals",
    "sample_record",
    "energy_law_residual",
    "star_cancellation_residual",
    "boundary_lemma_residuals",
    "StudyResult",
    "convergence_study",
    "fit_loglog",
]

log = logging.getLogger("mhdflat")

_FLOOR = 1e-30


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One sampled row of the run history.

    Field names match the CSV columns one to one.  Energies are squared
    L2 norms; Hu_s and HB_s are the order-s Sobolev norms themselves
    (not squared).  All res_* entries are nonnegative and, apart from
    res_energy, dimensionless.
    """

    t: float
    E_u: float
    E_B: float
    Hu1: float
    Hu2: float
    Hu3: float
    HB1: float
    HB2: float
    HB3: float
    res_energy: float
    res_cancel: float
    res_star: float
    res_bc_u: float
    res_bc_B: float
    res_lem1: float
    res_lem2: float
    res_lem3: float


@dataclass(frozen=True)
class BoundaryLemmaResiduals:
    """Relative tangential wall traces of four derived solenoidal fields.

    Each entry is max over both walls and both tangential components of
    the trace magnitude, normalized by the interior maximum of the same
    field (floored to avoid 0/0 on trivial states).
    """

    cross_bu: float        # curl(B x u)
    cross_curlu_u: float   # curl((curl u) x u)
    cross_curlb_b: float   # curl((curl B) x B)
    triple_cross_bu: float  # curl^3(B x u)


def energy_law_residual(r0: DiagnosticsRecord, r1: DiagnosticsRecord,
                        nu: float, mu: float) -> float:
    """|Delta E / Delta t + nu (C_u0 + C_u1) + mu (C_B0 + C_B1)|.

    C = ||curl f||^2 is recovered from the stored norms as H1^2 - E, and
    the dissipation is endpoint-averaged, i.e. the trapezoid rule in
    time; the residual is second order in the record spacing.
    """
    dt = r1.t - r0.t
    if dt <= 0.0:
        raise ValueError(f"records must be time-ordered, got dt = {dt}")
    e0 = r0.E_u + r0.E_B
    e1 = r1.E_u + r1.E_B
    cu = (r0.Hu1 ** 2 - r0.E_u) + (r1.Hu1 ** 2 - r1.E_u)
    cb = (r0.HB1 ** 2 - r0.E_B) + (r1.HB1 ** 2 - r1.E_B)
    return abs((e1 - e0) / dt + nu * cu + mu * cb)


def _quad_weights_z(nz: int) -> np.ndarray:
    w = np.ones(nz + 1)
    w[0] = w[-1] = 0.5
    return w


def _quad_scalar(values: np.ndarray, grid: GridSpec) -> float:
    """Trapezoid-in-z, rectangle-in-xy quadrature of grid scalar values."""
    cell = (2.0 * np.pi / grid.Nx) * (2.0 * np.pi / grid.Ny) / grid.Nz
    return cell * float(np.einsum("ijl,l->", values, _quad_weights_z(grid.Nz)))


def _dx(f: SpectralField) -> SpectralField:
    k1, _, _, _ = wavenumber_arrays(f.K, f.M)
    return SpectralField(f.parity, f.K, f.M, 1j * k1 * f.coeffs)


def _dy(f: SpectralField) -> SpectralField:
    _, k2, _, _ = wavenumber_arrays(f.K, f.M)
    return SpectralField(f.parity, f.K, f.M, 1j * k2 * f.coeffs)


def _dz(f: SpectralField) -> SpectralField:
    # d/dz swaps the cos/sin tagging: the result carries the dual parity
    _, _, mpi, _ = wavenumber_arrays(f.K, f.M)
    out = np.empty_like(f.coeffs)
    s = 1.0 if f.parity is FieldParity.VELOCITY else -1.0
    out[0] = -s * mpi * f.coeffs[0]
    out[1] = -s * mpi * f.coeffs[1]
    out[2] = s * mpi * f.coeffs[2]
    return SpectralField(f.parity.dual, f.K, f.M, out)


def _advect(bg: np.ndarray, f: SpectralField, grid: GridSpec) -> np.ndarray:
    """(B . grad) f on the grid, B given as grid values."""
    gx = to_physical(_dx(f), grid)
    gy = to_physical(_dy(f), grid)
    gz = to_physical(_dz(f), grid)
    return bg[0] * gx + bg[1] * gy + bg[2] * gz


def _star_pairings(u: SpectralField, B: SpectralField,
                   grid: GridSpec) -> tuple[float, float]:
    """(<B.grad curl^3 u, curl^3 B>, <B.grad curl^3 B, curl^3 u>) by quadrature."""
    fine = grid.refine(2)
    a = curl(curl(curl(u)))
    b = curl(curl(curl(B)))
    bg = to_physical(B, fine)
    ag = to_physical(a, fine)
    bgv = to_physical(b, fine)
    adv_a = _advect(bg, a, fine)
    adv_b = _advect(bg, b, fine)
    t1 = _quad_scalar((adv_a * bgv).sum(axis=0), fine)
    t2 = _quad_scalar((adv_b * ag).sum(axis=0), fine)
    return t1, t2


def star_cancellation_residual(u: SpectralField, B: SpectralField,
                               grid: GridSpec) -> float:
    """Relative defect of <B.grad curl^3 u, curl^3 B> + <B.grad curl^3 B, curl^3 u>.

    The pairing is formed by quadrature on the refined grid, where the
    cubic integrands are integrated exactly, so the returned value is
    pure roundoff whenever the wall structure of the two triple curls
    (normal-only vs tangential-only) holds: integrating by parts leaves
    only the wall flux of (B.n)(curl^3 u . curl^3 B), whose integrand
    vanishes pointwise.
    """
    t1, t2 = _star_pairings(u, B, grid)
    return abs(t1 + t2) / max(abs(t1) + abs(t2), _FLOOR)


def _tangential_face_max(g: SpectralField) -> float:
    """Max tangential trace of a magnetic-parity field over both walls."""
    m = np.arange(g.M + 1)
    worst = 0.0
    for z in (0.0, 1.0):
        sin_face = np.sin(np.pi * m * z)
        for c in (0, 1):
            trace = g.coeffs[c] @ sin_face
            worst = max(worst, _surface_max(trace, g.K))
    return worst


def _wall_trace_residual(g: SpectralField, grid: GridSpec) -> float:
    face = _tangential_face_max(g)
    gv = to_physical(g, grid)
    interior = float(np.abs(gv[0:2, :, :, 1:-1]).max()) if grid.Nz >= 2 else 0.0
    return face / max(interior, _FLOOR)


def boundary_lemma_residuals(u: SpectralField, B: SpectralField,
                             grid: GridSpec) -> BoundaryLemmaResiduals:
    """Tangential wall traces of the four derived fields, relative to interior size.

    The quadratic products are formed pointwise on the refined grid and
    analyzed alias-free; curls are then taken in coefficient space, so
    each trace is evaluated from the exact Galerkin representation of
    the derived field rather than from one-sided grid differences.
    """
    K, M = u.K, u.M
    fine = grid.refine(2)
    ug = to_physical(u, fine)
    bg = to_physical(B, fine)
    wg = to_physical(curl(u), fine)
    wbg = to_physical(curl(B), fine)

    def analyzed(valuespec: np.ndarray) -> SpectralField:
        return dealias(to_spectral(valuespec, FieldParity.VELOCITY, K, M, fine))

    g1 = curl(analyzed(np.cross(bg, ug, axis=0)))
    g2 = curl(analyzed(np.cross(wg, ug, axis=0)))
    g3 = curl(analyzed(np.cross(wbg, bg, axis=0)))
    g4 = curl(curl(g1))
    return BoundaryLemmaResiduals(
        cross_bu=_wall_trace_residual(g1, fine),
        cross_curlu_u=_wall_trace_residual(g2, fine),
        cross_curlb_b=_wall_trace_residual(g3, fine),
        triple_cross_bu=_wall_trace_residual(g4, fine),
    )


def sample_record(state, config, prev: DiagnosticsRecord | None) -> DiagnosticsRecord:
    """Assemble the full diagnostics row for one sampled state."""
    from .dynamics import nonlinear_terms

    u, B, grid = state.u, state.B, config.grid
    h1f, h2f = nonlinear_terms(u, B, grid)
    pu = inner(h1f, u)
    pb = inner(h2f, B)
    lem = boundary_lemma_residuals(u, B, grid)
    umax = float(np.abs(u.coeffs).max())
    bmax = float(np.abs(B.coeffs).max())
    rec = DiagnosticsRecord(
        t=state.t,
        E_u=inner(u, u),
        E_B=inner(B, B),
        Hu1=sobolev_norm(u, 1),
        Hu2=sobolev_norm(u, 2),
        Hu3=sobolev_norm(u, 3),
        HB1=sobolev_norm(B, 1),
        HB2=sobolev_norm(B, 2),
        HB3=sobolev_norm(B, 3),
        res_energy=0.0,
        res_cancel=abs(pu + pb) / max(abs(pu) + abs(pb), _FLOOR),
        res_star=star_cancellation_residual(u, B, grid),
        res_bc_u=boundary_trace_residual(u) / max(umax, _FLOOR),
        res_bc_B=boundary_trace_residual(B) / max(bmax, _FLOOR),
        res_lem1=max(lem.cross_bu, lem.cross_curlu_u),
        res_lem2=lem.cross_curlb_b,
        res_lem3=lem.triple_cross_bu,
    )
    if prev is not None:
        rec = replace(rec, res_energy=energy_law_residual(prev, rec, state.nu, state.mu))
    return rec


@dataclass
class StudyResult:
    """Outcome of a vanishing-dissipation sweep.

    sup_err_H2sq[i] is the supremum over common sample times of
    ||Lap(u_eps - u_ideal)||^2 + ||Lap(B_eps - B_ideal)||^2; sup_H3[i]
    is the supremum of Hu3 + HB3 along the dissipative run.  Entries for
    runs that blew up are NaN and are excluded from the fit.  slope and
    intercept are NaN when fewer than two usable points remain.
    reference_state is the final state of the ideal run.
    """

    eps: list
    sup_err_H2sq: list
    sup_H3: list
    slope: float
    intercept: float
    reference_state: object


def fit_loglog(eps, errors) -> tuple[float, float]:
    """Least-squares line through (log eps, log err); returns (slope, intercept)."""
    e = np.asarray(eps, dtype=float)
    r = np.asarray(errors, dtype=float)
    if e.shape != r.shape or e.size < 2:
        raise ValueError("need at least two (eps, error) pairs")
    if not (np.all(e > 0) and np.all(r > 0) and np.all(np.isfinite(e)) and np.all(np.isfinite(r))):
        raise ValueError("log-log fit needs positive finite data")
    slope, intercept = np.polyfit(np.log(e), np.log(r), 1)
    return float(slope), float(intercept)


def _h2sq_of_difference(a: SpectralField, b: SpectralField) -> float:
    d = SpectralField(a.parity, a.K, a.M, a.coeffs - b.coeffs)
    ld = laplacian_apply(d)
    return inner(ld, ld)


def convergence_study(run_cfg, eps_list) -> StudyResult:
    """Compare dissipative runs against the shared ideal run.

    All runs start from the same initial pair and share dt, truncation,
    grid and sampling stride; the only varied quantity is nu = mu = eps.
    A run that blows up contributes NaN entries instead of aborting the
    sweep.
    """
    from .dynamics import BlowupError, initial_fields, simulate

    eps_list = [float(e) for e in eps_list]
    for e in eps_list:
        if not (np.isfinite(e) and e >= 0.0):
            raise ValueError(f"eps values must be finite and >= 0, got {e}")
    base = run_cfg.solver_config()
    u0, B0 = initial_fields(run_cfg.K, run_cfg.M, run_cfg.seed, run_cfg.decay_power)

    ref_snaps: list[tuple[np.ndarray, np.ndarray]] = []
    ideal = replace(base, nu=0.0, mu=0.0)
    ref_state, _ = simulate(
        ideal, u0, B0,
        on_sample=lambda s: ref_snaps.append((s.u.coeffs.copy(), s.B.coeffs.copy())),
    )

    sup_err: list[float] = []
    sup_h3: list[float] = []
    for e in eps_list:
        cfg = replace(base, nu=e, mu=e)
        snaps: list[tuple[np.ndarray, np.ndarray]] = []
        try:
            _, records = simulate(
                cfg, u0, B0,
                on_sample=lambda s: snaps.append((s.u.coeffs.copy(), s.B.coeffs.copy())),
            )
        except BlowupError as err:
            log.warning("eps=%.3g blew up at t=%.6g; recording NaN", e, err.t)
            sup_err.append(float("nan"))
            sup_h3.append(float("nan"))
            continue
        worst = 0.0
        for (uc, bc), (ru, rb) in zip(snaps, ref_snaps):
            worst = max(
                worst,
                _h2sq_of_difference(
                    SpectralField(FieldParity.VELOCITY, run_cfg.K, run_cfg.M, uc),
                    SpectralField(FieldParity.VELOCITY, run_cfg.K, run_cfg.M, ru),
                )
                + _h2sq_of_difference(
                    SpectralField(FieldParity.MAGNETIC, run_cfg.K, run_cfg.M, bc),
                    SpectralField(FieldParity.MAGNETIC, run_cfg.K, run_cfg.M, rb),
                ),
            )
        sup_err.append(worst)
        sup_h3.append(max(r.Hu3 + r.HB3 for r in records))

    usable = [
        (e, v) for e, v in zip(eps_list, sup_err)
        if e > 0.0 and np.isfinite(v) and v > 0.0
    ]
    if len(usable) >= 2:
        slope, intercept = fit_loglog([p[0] for p in usable], [p[1] for p in usable])
    else:
        slope = intercept = float("nan")
    return StudyResult(
        eps=eps_list,
        sup_err_H2sq=sup_err,
        sup_H3=sup_h3,
        slope=slope,
        intercept=intercept,
        reference_state=ref_state,
    )
