"""Run configuration, checkpoint files, and delimited output.

All on-disk artifacts are bit-deterministic: floats are rendered with a
fixed 17-significant-digit format, lines end with a bare newline, and
checkpoint tensors are written as little-endian complex128 in the
natural (component, k1, k2, m) order.  Re-running the same configuration
must reproduce every byte.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fields import SpectralField
from .modes import FieldParity
from .transforms import GridSpec

__all__ = [
    "RunConfig",
    "ConfigError",
    "parse_config",
    "Checkpoint",
    "CheckpointFormatError",
    "write_checkpoint",
    "read_checkpoint",
    "DIAG_COLUMNS",
    "write_diagnostics_csv",
    "write_study_csv",
    "write_slope_file",
]

log = logging.getLogger("mhdflat")

_MAGIC = b"MHDS"
_VERSION = 1
_HEADER = struct.Struct("<4sIIIIIIddd")  # magic, version, K, M, Nx, Ny, Nz, t, nu, mu

DIAG_COLUMNS = (
    "t", "E_u", "E_B",
    "Hu1", "Hu2", "Hu3", "HB1", "HB2", "HB3",
    "res_energy", "res_cancel", "res_star",
    "res_bc_u", "res_bc_B",
    "res_lem1", "res_lem2", "res_lem3",
)

_INT_KEYS = {"K", "M", "Nx", "Ny", "Nz", "seed", "sample_every"}
_FLOAT_KEYS = {"dt", "T", "nu", "mu", "decay_power"}
_STR_KEYS = {"out_dir"}
_REQUIRED = {"K", "M", "Nx", "Ny", "Nz", "dt", "T", "nu", "mu", "seed", "out_dir"}
_DEFAULTS = {"sample_every": 10, "decay_power": 2.0}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


@dataclass(frozen=True)
class RunConfig:
    """Validated contents of a key=value run configuration."""

    K: int
    M: int
    Nx: int
    Ny: int
    Nz: int
    dt: float
    T: float
    nu: float
    mu: float
    seed: int
    out_dir: str
    sample_every: int = 10
    decay_power: float = 2.0

    def grid(self) -> GridSpec:
        return GridSpec(self.Nx, self.Ny, self.Nz)

    def solver_config(self):
        from .dynamics import SolverConfig

        return SolverConfig(
            K=self.K, M=self.M, grid=self.grid(),
            nu=self.nu, mu=self.mu, dt=self.dt, T=self.T,
            sample_every=self.sample_every,
        )


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


def _convert(key: str, value: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(value, 10)
        if key in _FLOAT_KEYS:
            x = float(value)
            if not np.isfinite(x):
                raise ValueError("not finite")
            return x
        if not value:
            raise ValueError("empty value")
        return value
    except ValueError as exc:
        kind = "an integer" if key in _INT_KEYS else "a finite number"
        raise ConfigError(
            f"line {lineno}: key '{key}' needs {kind}, got {value!r} ({exc})"
        ) from None


def parse_config(path) -> RunConfig:
    """Read and validate a key=value configuration file.

    Comments start with '#'; blank lines are skipped; later duplicates
    win with a warning; unknown keys and missing required keys are
    errors, the latter reported all at once.
    """
    text = Path(path).read_text(encoding="utf-8")
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in values:
            log.warning("config line %d: duplicate key '%s' overrides the earlier value",
                        lineno, key)
        values[key] = _convert(key, value, lineno)

    missing = sorted(_REQUIRED - values.keys())
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))
    for key, default in _DEFAULTS.items():
        values.setdefault(key, default)

    cfg = RunConfig(**values)
    _validate_semantics(cfg)
    return cfg


def _validate_semantics(cfg: RunConfig) -> None:
    if cfg.K < 0 or cfg.M < 0:
        raise ConfigError(f"K and M must be >= 0, got K={cfg.K}, M={cfg.M}")
    if cfg.dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {cfg.dt}")
    if cfg.T < 0.0:
        raise ConfigError(f"T must be >= 0, got {cfg.T}")
    if cfg.nu < 0.0 or cfg.mu < 0.0:
        raise ConfigError(f"nu and mu must be >= 0, got nu={cfg.nu}, mu={cfg.mu}")
    if cfg.sample_every < 1:
        raise ConfigError(f"sample_every must be >= 1, got {cfg.sample_every}")
    if cfg.decay_power < 2.0:
        raise ConfigError(f"decay_power must be >= 2, got {cfg.decay_power}")
    try:
        grid = GridSpec(cfg.Nx, cfg.Ny, cfg.Nz)
        grid.require_dealias_bound(cfg.K, cfg.M)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


class CheckpointFormatError(ValueError):
    """Checkpoint bytes violate the container format."""


@dataclass(frozen=True)
class Checkpoint:
    """Decoded checkpoint: truncation, grid sizes, time, coefficients."""

    K: int
    M: int
    Nx: int
    Ny: int
    Nz: int
    t: float
    nu: float
    mu: float
    u: SpectralField
    B: SpectralField

    def grid(self) -> GridSpec:
        return GridSpec(self.Nx, self.Ny, self.Nz)

    def state(self):
        from .dynamics import SimState

        return SimState(self.t, self.u, self.B, self.nu, self.mu)


def _tensor_bytes(K: int, M: int) -> int:
    return 3 * (2 * K + 1) ** 2 * (M + 1) * 16


def write_checkpoint(state, grid: GridSpec, path) -> None:
    """Serialize a solver state; the layout is fixed little-endian binary."""
    u, B = state.u, state.B
    if (u.K, u.M) != (B.K, B.M):
        raise ValueError("u and B truncations disagree")
    header = _HEADER.pack(
        _MAGIC, _VERSION, u.K, u.M, grid.Nx, grid.Ny, grid.Nz,
        float(state.t), float(state.nu), float(state.mu),
    )
    ub = np.ascontiguousarray(u.coeffs).astype("<c16", copy=False).tobytes()
    bb = np.ascontiguousarray(B.coeffs).astype("<c16", copy=False).tobytes()
    Path(path).write_bytes(header + ub + bb)


def read_checkpoint(path) -> Checkpoint:
    """Decode a checkpoint, validating structure before allocating tensors."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CheckpointFormatError(
            f"truncated header: expected at least {_HEADER.size} bytes, got {len(data)}"
        )
    magic, version, K, M, Nx, Ny, Nz, t, nu, mu = _HEADER.unpack_from(data, 0)
    if magic != _MAGIC:
        raise CheckpointFormatError(f"bad magic {magic!r}, expected {_MAGIC!r}")
    if version != _VERSION:
        raise CheckpointFormatError(f"unsupported version {version}, expected {_VERSION}")
    try:
        GridSpec(Nx, Ny, Nz)
    except ValueError as exc:
        raise CheckpointFormatError(f"invalid grid sizes in header: {exc}") from None
    nbytes = _tensor_bytes(K, M)
    expected = _HEADER.size + 2 * nbytes
    if len(data) < expected:
        raise CheckpointFormatError(
            f"truncated payload: expected {expected} bytes total, got {len(data)}"
        )
    if len(data) > expected:
        raise CheckpointFormatError(
            f"{len(data) - expected} trailing bytes after the expected {expected}"
        )
    shape = (3, 2 * K + 1, 2 * K + 1, M + 1)
    count = int(np.prod(shape))
    uc = np.frombuffer(data, dtype="<c16", count=count, offset=_HEADER.size)
    bc = np.frombuffer(data, dtype="<c16", count=count, offset=_HEADER.size + nbytes)
    u = SpectralField(FieldParity.VELOCITY, K, M, uc.reshape(shape).copy())
    B = SpectralField(FieldParity.MAGNETIC, K, M, bc.reshape(shape).copy())
    return Checkpoint(K=K, M=M, Nx=Nx, Ny=Ny, Nz=Nz, t=t, nu=nu, mu=mu, u=u, B=B)


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_diagnostics_csv(records, path) -> None:
    """One row per sampled record, columns fixed by DIAG_COLUMNS."""
    lines = [",".join(DIAG_COLUMNS)]
    for rec in records:
        lines.append(",".join(_fmt(getattr(rec, name)) for name in DIAG_COLUMNS))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def write_study_csv(result, path) -> None:
    lines = ["eps,sup_err_H2sq,sup_H3"]
    for e, err, h3 in zip(result.eps, result.sup_err_H2sq, result.sup_H3):
        lines.append(",".join((_fmt(e), _fmt(err), _fmt(h3))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def write_slope_file(slope: float, intercept: float, path) -> None:
    text = f"slope={_fmt(slope)}\nintercept={_fmt(intercept)}\n"
    Path(path).write_text(text, encoding="ascii", newline="\n")
