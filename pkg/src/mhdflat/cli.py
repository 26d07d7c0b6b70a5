"""Command line entry points: run, study, verify.

run     integrate one configuration and write diagnostics.csv, final.ckpt
        and diagnostics.png into the output directory;
study   sweep nu = mu = eps against the shared ideal run and write
        study.csv, slope.txt, reference.ckpt and study.png;
verify  exercise the self-check battery on derived random fields and
        print a pass/fail table without writing anything.

Exit codes: 0 success, 1 runtime failure (blow-up, failed check, or a
study row that could not be measured), 2 configuration or usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagnostics import _quad_scalar, convergence_study
from .dynamics import BlowupError, initial_fields, nonlinear_terms, simulate
from .fields import (
    SpectralField,
    boundary_trace_residual,
    curl,
    divergence_max,
    inner,
    leray_project,
    random_divfree,
)
from .modes import FieldParity, wavenumber_arrays
from .storage import (
    ConfigError,
    parse_config,
    write_checkpoint,
    write_diagnostics_csv,
    write_slope_file,
    write_study_csv,
)
from .transforms import to_physical, to_spectral

__all__ = ["main", "verification_battery", "CheckResult"]

log = logging.getLogger("mhdflat")

_VERIFY_SEEDS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold


def _rel_max(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.abs(b).max())
    if scale == 0.0:
        return float(np.abs(a - b).max())
    return float(np.abs(a - b).max()) / scale


def _gradient_field(f: SpectralField) -> SpectralField:
    # gradient of a scalar sharing f's cos/sin tagging; exact Leray kernel
    k1, k2, mpi, _ = wavenumber_arrays(f.K, f.M)
    p = f.coeffs[0]
    s = -1.0 if f.parity is FieldParity.VELOCITY else 1.0
    g = np.stack([1j * k1 * p, 1j * k2 * p, s * mpi * p])
    return SpectralField(f.parity, f.K, f.M, g)


def verification_battery(cfg) -> list[CheckResult]:
    """Max residual of each self-check over seeds 1..5 and both parities."""
    grid = cfg.grid()
    worst = {
        "round": 0.0, "parseval": 0.0, "leray": 0.0,
        "curlcurl": 0.0, "div": 0.0, "cancel": 0.0, "bc_u": 0.0, "bc_b": 0.0,
    }
    _, _, _, lam = wavenumber_arrays(cfg.K, cfg.M)
    for seed in _VERIFY_SEEDS:
        u = random_divfree(FieldParity.VELOCITY, cfg.K, cfg.M, seed, cfg.decay_power)
        B = random_divfree(FieldParity.MAGNETIC, cfg.K, cfg.M, seed, cfg.decay_power)
        for f in (u, B):
            fv = to_physical(f, grid)
            back = to_spectral(fv, f.parity, cfg.K, cfg.M, grid)
            worst["round"] = max(worst["round"], _rel_max(back.coeffs, f.coeffs))

            quad = _quad_scalar((fv * fv).sum(axis=0), grid)
            exact = inner(f, f)
            worst["parseval"] = max(worst["parseval"], abs(quad - exact) / exact)

            g = SpectralField(f.parity, f.K, f.M, f.coeffs + _gradient_field(f).coeffs)
            p1 = leray_project(g)
            p2 = leray_project(p1)
            worst["leray"] = max(worst["leray"], _rel_max(p2.coeffs, p1.coeffs))

            rel_div = divergence_max(p1) / max(float(np.abs(p1.coeffs).max()), 1e-30)
            worst["div"] = max(worst["div"], rel_div)

            cc = curl(curl(f))
            worst["curlcurl"] = max(
                worst["curlcurl"], _rel_max(cc.coeffs, lam * f.coeffs)
            )

            key = "bc_u" if f.parity is FieldParity.VELOCITY else "bc_b"
            rel_bc = boundary_trace_residual(f) / float(np.abs(f.coeffs).max())
            worst[key] = max(worst[key], rel_bc)

        h1f, h2f = nonlinear_terms(u, B, grid)
        pu, pb = inner(h1f, u), inner(h2f, B)
        worst["cancel"] = max(
            worst["cancel"], abs(pu + pb) / max(abs(pu) + abs(pb), 1e-30)
        )

    return [
        CheckResult("transform round trip", worst["round"], 1e-12),
        CheckResult("Parseval identity", worst["parseval"], 1e-10),
        CheckResult("Leray idempotency", worst["leray"], 1e-13),
        CheckResult("divergence after projection", worst["div"], 1e-12),
        CheckResult("curl curl = -laplacian", worst["curlcurl"], 1e-12),
        CheckResult("nonlinear cancellation", worst["cancel"], 1e-11),
        CheckResult("wall trace (velocity)", worst["bc_u"], 1e-11),
        CheckResult("wall trace (magnetic)", worst["bc_b"], 1e-11),
    ]


def _print_check_table(rows: list[CheckResult]) -> None:
    width = max(len(r.name) for r in rows)
    print(f"{'check':<{width}}  {'residual':>12}  {'threshold':>12}  status")
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {r.residual:>12.3e}  {r.threshold:>12.1e}  {status}")


def _out_dir(args, cfg) -> Path:
    out = Path(args.out) if args.out else Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_run(args) -> int:
    from .report import render_run_report

    cfg = parse_config(args.config)
    out = _out_dir(args, cfg)
    solver = cfg.solver_config()
    u0, B0 = initial_fields(cfg.K, cfg.M, cfg.seed, cfg.decay_power)
    try:
        final, records = simulate(solver, u0, B0)
    except BlowupError as err:
        log.error("%s", err)
        write_diagnostics_csv(err.records, out / "diagnostics.csv")
        if err.records:
            render_run_report(err.records, out / "diagnostics.png")
        return 1
    write_diagnostics_csv(records, out / "diagnostics.csv")
    write_checkpoint(final, solver.grid, out / "final.ckpt")
    render_run_report(records, out / "diagnostics.png")
    log.info("run complete: t=%.6g, outputs in %s", final.t, out)
    return 0


def _parse_eps(spec: str) -> list[float]:
    try:
        eps = [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"could not parse --eps list {spec!r}") from None
    if not eps:
        raise ConfigError("--eps list is empty")
    for e in eps:
        if not (np.isfinite(e) and e >= 0.0):
            raise ConfigError(f"eps values must be finite and >= 0, got {e}")
    return eps


def _cmd_study(args) -> int:
    from .report import render_study_report

    cfg = parse_config(args.config)
    eps = _parse_eps(args.eps)
    out = _out_dir(args, cfg)
    try:
        result = convergence_study(cfg, eps)
    except BlowupError as err:
        # without a surviving ideal reference there is nothing to compare
        log.error("reference run failed: %s", err)
        return 1
    write_study_csv(result, out / "study.csv")
    write_slope_file(result.slope, result.intercept, out / "slope.txt")
    write_checkpoint(result.reference_state, cfg.grid(), out / "reference.ckpt")
    render_study_report(result, out / "study.png")
    log.info("study complete: slope=%.4f, outputs in %s", result.slope, out)
    if not all(np.isfinite(v) for v in result.sup_err_H2sq):
        return 1
    return 0


def _cmd_verify(args) -> int:
    cfg = parse_config(args.config)
    rows = verification_battery(cfg)
    _print_check_table(rows)
    return 0 if all(r.passed for r in rows) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhdflat",
        description="Spectral channel MHD solver and verification suite.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configuration")
    p_run.add_argument("--config", required=True, help="path to key=value config")
    p_run.add_argument("--out", default=None, help="override out_dir from the config")
    p_run.set_defaults(func=_cmd_run)

    p_study = sub.add_parser("study", help="vanishing-dissipation sweep")
    p_study.add_argument("--config", required=True, help="path to key=value config")
    p_study.add_argument("--eps", required=True,
                         help="comma-separated dissipation values, e.g. 1e-1,3e-2")
    p_study.add_argument("--out", default=None, help="override out_dir from the config")
    p_study.set_defaults(func=_cmd_study)

    p_verify = sub.add_parser("verify", help="run the self-check battery")
    p_verify.add_argument("--config", required=True, help="path to key=value config")
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
