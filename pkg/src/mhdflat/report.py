"""Figure rendering for run and study outputs.

Figures are a convenience companion to the delimited files, never a
replacement: everything plotted here is read back from the same record
and result objects that feed the CSV writers.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_run_report", "render_study_report"]

_RESIDUAL_SERIES = (
    ("res_energy", "energy law"),
    ("res_cancel", "nonlinear cancellation"),
    ("res_star", "interchange pairing"),
    ("res_bc_u", "u wall trace"),
    ("res_bc_B", "B wall trace"),
    ("res_lem1", "flux curls (velocity)"),
    ("res_lem2", "flux curl (magnetic)"),
    ("res_lem3", "triple curl"),
)


def render_run_report(records, path) -> None:
    """Two panels: energy history and residual history."""
    t = np.array([r.t for r in records])
    fig, (ax_e, ax_r) = plt.subplots(1, 2, figsize=(10.0, 4.0))

    ax_e.plot(t, [r.E_u for r in records], label="E_u")
    ax_e.plot(t, [r.E_B for r in records], label="E_B")
    ax_e.plot(t, [r.E_u + r.E_B for r in records], label="total", color="k", lw=0.8)
    ax_e.set_xlabel("t")
    ax_e.set_ylabel("energy")
    ax_e.legend(fontsize=8)
    ax_e.set_title("energy history")

    floor = 1e-20
    for name, label in _RESIDUAL_SERIES:
        vals = np.array([getattr(r, name) for r in records], dtype=float)
        ax_r.semilogy(t, np.maximum(vals, floor), label=label, lw=0.9)
    ax_r.set_xlabel("t")
    ax_r.set_ylabel("residual")
    ax_r.legend(fontsize=7, ncol=2)
    ax_r.set_title("verification residuals")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_study_report(result, path) -> None:
    """Log-log error decay with the fitted line, plus the H3 suprema."""
    eps = np.array(result.eps, dtype=float)
    err = np.array(result.sup_err_H2sq, dtype=float)
    h3 = np.array(result.sup_H3, dtype=float)
    ok = (eps > 0) & np.isfinite(err) & (err > 0)

    fig, (ax_e, ax_h) = plt.subplots(1, 2, figsize=(10.0, 4.0))
    ax_e.loglog(eps[ok], err[ok], "o", label="measured")
    if np.isfinite(result.slope) and ok.sum() >= 2:
        xs = np.array([eps[ok].min(), eps[ok].max()])
        ax_e.loglog(xs, np.exp(result.intercept) * xs ** result.slope,
                    "--", label=f"slope {result.slope:.3f}")
    ax_e.set_xlabel("eps")
    ax_e.set_ylabel("sup error (squared H2 seminorm)")
    ax_e.legend(fontsize=8)
    ax_e.set_title("vanishing-dissipation error")

    okh = np.isfinite(h3)
    ax_h.semilogx(eps[okh], h3[okh], "s-")
    ax_h.set_xlabel("eps")
    ax_h.set_ylabel("sup_t (Hu3 + HB3)")
    ax_h.set_title("regularity along the sweep")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
