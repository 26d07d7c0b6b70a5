"""Semi-discrete dynamics and time integration.

Per solenoidal coefficient block the resolved system is

    du/dt = nu  Lap u - h1(u, B)
    dB/dt = mu  Lap B - h2(u, B)

where h1 is the solenoidal projection of (curl u) x u + B x (curl B) and
h2 = curl(B x u).  Both products are evaluated pointwise on the grid,
analyzed (exactly, on a grid meeting the dealiasing bound), truncated by
the 2/3 rule, and finished in coefficient space.  This keeps the energy
mechanism of the pair exact: <h1, u> + <h2, B> = 0 in exact arithmetic,
because the integrand (B x curlB) . u + (B x u) . curlB vanishes
pointwise and (curl u x u) . u is identically zero.

Time integration is an integrating-factor strong-stability-preserving
RK3.  Writing E(s) = exp(-nu lam s) per block (and the mu analogue for
B), one step from y0 with nonlinearity N = -h is

    y1 = E(dt)   (y0 + dt N(y0))
    y2 = 3/4 E(dt/2) y0 + 1/4 E(-dt/2) (y1 + dt N(y1))
    y+ = 1/3 E(dt)   y0 + 2/3 E(dt/2)  (y2 + dt N(y2))

With N = 0 every stage collapses to the exact per-block decay, so pure
diffusion is integrated exactly; with nu = mu = 0 all factors are 1 and
the scheme is the plain explicit third-order method.  After the final
stage the state is re-dealiased and re-projected once to quench roundoff
drift out of the solenoidal, alias-free set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .fields import (
    SpectralField,
    curl,
    leray_project,
    zero,
    random_divfree,
)
from .modes import FieldParity, dealias_mask, leray_coeffs, wavenumber_arrays
from .transforms import GridSpec, dealias, to_physical, to_spectral

__all__ = [
    "SolverConfig",
    "SimState",
    "BlowupError",
    "initial_fields",
    "h1",
    "h2",
    "nonlinear_terms",
    "rhs",
    "step",
    "simulate",
]

log = logging.getLogger("mhdflat")


@dataclass(frozen=True)
class SolverConfig:
    """Truncation, grid, coefficients and stepping for one run."""

    K: int
    M: int
    grid: GridSpec
    nu: float
    mu: float
    dt: float
    T: float
    sample_every: int = 10

    def __post_init__(self) -> None:
        if self.K < 0 or self.M < 0:
            raise ValueError(f"truncation must be nonnegative, got K={self.K}, M={self.M}")
        if not (np.isfinite(self.nu) and self.nu >= 0.0):
            raise ValueError(f"nu must be finite and >= 0, got {self.nu}")
        if not (np.isfinite(self.mu) and self.mu >= 0.0):
            raise ValueError(f"mu must be finite and >= 0, got {self.mu}")
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and positive, got {self.dt}")
        if not (np.isfinite(self.T) and self.T >= 0.0):
            raise ValueError(f"T must be finite and >= 0, got {self.T}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be >= 1, got {self.sample_every}")
        self.grid.require_dealias_bound(self.K, self.M)


@dataclass
class SimState:
    """Instantaneous solver state; u is velocity parity, B magnetic."""

    t: float
    u: SpectralField
    B: SpectralField
    nu: float
    mu: float


class BlowupError(RuntimeError):
    """Nonfinite coefficients appeared while stepping."""

    def __init__(self, t: float, detail: str):
        super().__init__(f"solution blew up at t = {t:.6g}: {detail}")
        self.t = t
        self.detail = detail
        self.records: list = []


def initial_fields(
    K: int, M: int, seed: int, decay_power: float = 2.0
) -> tuple[SpectralField, SpectralField]:
    """Initial (u, B) pair for a run seed.

    seed 0 is the built-in shear test pair u = (cos(pi z), 0, 0), B = 0;
    seed -1 is the stationary pair u = 0, B = (0, 0, 1); any other seed
    draws independent unit-norm random solenoidal fields.
    """
    if seed == 0:
        if (2 * M) // 3 < 1:
            raise ValueError(f"shear seed 0 needs M >= 2 to survive dealiasing, got M={M}")
        u = zero(FieldParity.VELOCITY, K, M)
        u.coeffs[0, K, K, 1] = 1.0
        return u, zero(FieldParity.MAGNETIC, K, M)
    if seed == -1:
        B = zero(FieldParity.MAGNETIC, K, M)
        B.coeffs[2, K, K, 0] = 1.0
        return zero(FieldParity.VELOCITY, K, M), B
    u = random_divfree(FieldParity.VELOCITY, K, M, seed, decay_power)
    B = random_divfree(FieldParity.MAGNETIC, K, M, seed, decay_power)
    return u, B


def _product_to_velocity(
    values: np.ndarray, K: int, M: int, grid: GridSpec
) -> SpectralField:
    # analyze a velocity-parity grid product and truncate it alias-free
    return dealias(to_spectral(values, FieldParity.VELOCITY, K, M, grid))


def nonlinear_terms(
    u: SpectralField, B: SpectralField, grid: GridSpec
) -> tuple[SpectralField, SpectralField]:
    """(h1, h2) sharing one set of grid evaluations.

    All three pointwise cross products have velocity parity by the
    cos/sin product algebra, so a single analysis family serves both
    terms; h2 takes its curl after the truncation (the order is part of
    the discretization contract).
    """
    K, M = u.K, u.M
    ug = to_physical(u, grid)
    bg = to_physical(B, grid)
    wg = to_physical(curl(u), grid)
    wbg = to_physical(curl(B), grid)
    q1 = np.cross(wg, ug, axis=0) + np.cross(bg, wbg, axis=0)
    h1f = leray_project(_product_to_velocity(q1, K, M, grid))
    q2 = np.cross(bg, ug, axis=0)
    h2f = curl(_product_to_velocity(q2, K, M, grid))
    return h1f, h2f


def h1(u: SpectralField, B: SpectralField, grid: GridSpec) -> SpectralField:
    """Solenoidal projection of (curl u) x u + B x (curl B)."""
    return nonlinear_terms(u, B, grid)[0]


def h2(u: SpectralField, B: SpectralField, grid: GridSpec) -> SpectralField:
    """curl(B x u), the sign convention matching dB/dt = mu Lap B - h2."""
    K, M = u.K, u.M
    ug = to_physical(u, grid)
    bg = to_physical(B, grid)
    return curl(_product_to_velocity(np.cross(bg, ug, axis=0), K, M, grid))


def rhs(state: SimState, config: SolverConfig) -> tuple[SpectralField, SpectralField]:
    """(du/dt, dB/dt) at the given state."""
    h1f, h2f = nonlinear_terms(state.u, state.B, config.grid)
    _, _, _, lam = wavenumber_arrays(config.K, config.M)
    du = -config.nu * lam * state.u.coeffs - h1f.coeffs
    db = -config.mu * lam * state.B.coeffs - h2f.coeffs
    return (
        SpectralField(FieldParity.VELOCITY, config.K, config.M, du),
        SpectralField(FieldParity.MAGNETIC, config.K, config.M, db),
    )


def _wrap(parity: FieldParity, K: int, M: int, coeffs: np.ndarray) -> SpectralField:
    return SpectralField(parity, K, M, coeffs)


def step(state: SimState, config: SolverConfig) -> SimState:
    """One integrating-factor SSP-RK3 step of length config.dt."""
    K, M, grid, dt = config.K, config.M, config.grid, config.dt
    _, _, _, lam = wavenumber_arrays(K, M)
    eu_full, eu_half = np.exp(-config.nu * lam * dt), np.exp(-config.nu * lam * dt / 2)
    eb_full, eb_half = np.exp(-config.mu * lam * dt), np.exp(-config.mu * lam * dt / 2)

    def nonlin(uc: np.ndarray, bc: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h1f, h2f = nonlinear_terms(
            _wrap(FieldParity.VELOCITY, K, M, uc),
            _wrap(FieldParity.MAGNETIC, K, M, bc),
            grid,
        )
        return -h1f.coeffs, -h2f.coeffs

    u0, b0 = state.u.coeffs, state.B.coeffs
    nu0, nb0 = nonlin(u0, b0)
    u1 = eu_full * (u0 + dt * nu0)
    b1 = eb_full * (b0 + dt * nb0)
    nu1, nb1 = nonlin(u1, b1)
    u2 = 0.75 * eu_half * u0 + 0.25 * (u1 + dt * nu1) / eu_half
    b2 = 0.75 * eb_half * b0 + 0.25 * (b1 + dt * nb1) / eb_half
    nu2, nb2 = nonlin(u2, b2)
    u3 = (eu_full * u0 + 2.0 * eu_half * (u2 + dt * nu2)) / 3.0
    b3 = (eb_full * b0 + 2.0 * eb_half * (b2 + dt * nb2)) / 3.0

    mask = dealias_mask(K, M)
    u3 = leray_coeffs(u3 * mask, K, M, FieldParity.VELOCITY)
    b3 = leray_coeffs(b3 * mask, K, M, FieldParity.MAGNETIC)
    t_new = state.t + dt
    for name, c in (("u", u3), ("B", b3)):
        if not np.isfinite(c).all():
            bad = int(np.count_nonzero(~np.isfinite(c)))
            raise BlowupError(t_new, f"{bad} nonfinite coefficients in {name}")
    return SimState(
        t_new,
        _wrap(FieldParity.VELOCITY, K, M, u3),
        _wrap(FieldParity.MAGNETIC, K, M, b3),
        config.nu,
        config.mu,
    )


def _cfl_limit(state: SimState, grid: GridSpec) -> float:
    """Advisory step bound 0.5 min(dx, dy, dz) / max |u| + |B|."""
    ug = to_physical(state.u, grid)
    bg = to_physical(state.B, grid)
    speed = np.sqrt((ug ** 2).sum(axis=0)) + np.sqrt((bg ** 2).sum(axis=0))
    vmax = float(speed.max())
    if vmax == 0.0:
        return np.inf
    h = min(2.0 * np.pi / grid.Nx, 2.0 * np.pi / grid.Ny, 1.0 / grid.Nz)
    return 0.5 * h / vmax


def _cfl_check(state: SimState, config: SolverConfig, k: int) -> None:
    limit = _cfl_limit(state, config.grid)
    if config.dt > limit:
        log.warning(
            "step %d (t=%.6g): dt=%.3g exceeds the advisory CFL bound %.3g",
            k, state.t, config.dt, limit,
        )


def simulate(
    config: SolverConfig,
    u0: SpectralField,
    B0: SpectralField,
    on_sample: Callable[[SimState], None] | None = None,
) -> tuple[SimState, list]:
    """Advance (u0, B0) to T; returns the final state and sampled records.

    Records are taken at t = 0, every sample_every-th step, and at the
    final step.  The horizon is traversed in round(T/dt) uniform steps
    and sample times are exact multiples of dt, so two runs sharing dt
    and sampling stride produce directly comparable histories.  Initial
    fields are dealiased and projected (a no-op for well-formed input)
    rather than trusted.  A blow-up propagates as BlowupError with the
    records collected so far attached.
    """
    from .diagnostics import sample_record

    if u0.parity is not FieldParity.VELOCITY or B0.parity is not FieldParity.MAGNETIC:
        raise ValueError("simulate expects (velocity, magnetic) parity fields")
    if (u0.K, u0.M) != (config.K, config.M) or (B0.K, B0.M) != (config.K, config.M):
        raise ValueError("initial fields do not match the configured truncation")

    state = SimState(
        0.0,
        leray_project(dealias(u0)),
        leray_project(dealias(B0)),
        config.nu,
        config.mu,
    )
    n_steps = int(round(config.T / config.dt))
    if abs(n_steps * config.dt - config.T) > 1e-9 * max(config.T, config.dt):
        log.warning(
            "horizon T=%.6g is not a multiple of dt=%.6g; integrating to %.6g",
            config.T, config.dt, n_steps * config.dt,
        )

    records: list = []

    def emit(s: SimState) -> None:
        prev = records[-1] if records else None
        records.append(sample_record(s, config, prev))
        if on_sample is not None:
            on_sample(s)

    _cfl_check(state, config, 0)
    emit(state)
    for k in range(1, n_steps + 1):
        try:
            state = step(state, config)
        except BlowupError as err:
            err.records = records
            raise
        state = replace(state, t=k * config.dt)
        if k % 100 == 0:
            _cfl_check(state, config, k)
        if k % config.sample_every == 0 or k == n_steps:
            emit(state)
    return state, records
