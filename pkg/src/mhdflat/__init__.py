"""Spectral Galerkin solver for incompressible viscous MHD in a flat
channel with free-slip velocity and insulating-wall magnetic boundary
conditions, plus the verification suite built around its exact discrete
identities."""

from .modes import (
    FieldParity,
    ModeIndex,
    curl_block,
    dealias_cutoffs,
    divergence_vector,
    eigenvalue,
    enumerate_modes,
    leray_project_block,
)
from .fields import (
    SpectralField,
    boundary_trace_residual,
    curl,
    divergence_max,
    hermitian_defect,
    inner,
    laplacian_apply,
    leray_project,
    norm,
    random_divfree,
    sobolev_norm,
    zero,
)
from .transforms import GridSpec, dealias, to_physical, to_spectral
from .dynamics import (
    BlowupError,
    SimState,
    SolverConfig,
    h1,
    h2,
    initial_fields,
    nonlinear_terms,
    rhs,
    simulate,
    step,
)
from .diagnostics import (
    BoundaryLemmaResiduals,
    DiagnosticsRecord,
    StudyResult,
    boundary_lemma_residuals,
    convergence_study,
    energy_law_residual,
    fit_loglog,
    sample_record,
    star_cancellation_residual,
)
from .storage import (
    Checkpoint,
    CheckpointFormatError,
    ConfigError,
    DIAG_COLUMNS,
    RunConfig,
    parse_config,
    read_checkpoint,
    write_checkpoint,
    write_diagnostics_csv,
    write_slope_file,
    write_study_csv,
)
from .cli import main, verification_battery

__version__ = "0.1.0"

__all__ = [
    "FieldParity", "ModeIndex", "curl_block", "dealias_cutoffs",
    "divergence_vector", "eigenvalue", "enumerate_modes", "leray_project_block",
    "SpectralField", "boundary_trace_residual", "curl", "divergence_max",
    "hermitian_defect", "inner", "laplacian_apply", "leray_project", "norm",
    "random_divfree", "sobolev_norm", "zero",
    "GridSpec", "dealias", "to_physical", "to_spectral",
    "BlowupError", "SimState", "SolverConfig", "h1", "h2", "initial_fields",
    "nonlinear_terms", "rhs", "simulate", "step",
    "BoundaryLemmaResiduals", "DiagnosticsRecord", "StudyResult",
    "boundary_lemma_residuals", "convergence_study", "energy_law_residual",
    "fit_loglog", "sample_record", "star_cancellation_residual",
    "Checkpoint", "CheckpointFormatError", "ConfigError", "DIAG_COLUMNS",
    "RunConfig", "parse_config", "read_checkpoint", "write_checkpoint",
    "write_diagnostics_csv", "write_slope_file", "write_study_csv",
    "main", "verification_battery",
    "__version__",
]
