from .backend import (
    BackendConfig,
    BackendError,
    InternalVerificationError,
    ProbeResult,
    Propagation,
    SolverOutputError,
    SolverResult,
    SolverSpawnError,
    failed_literal_probe,
    probe_failed_literals,
    propagate,
    run_builtin,
    solve,
    solve_builtin,
    solve_external,
    verify_model,
)
from .solver import CDCLSolver

__all__ = [
    "BackendConfig",
    "BackendError",
    "CDCLSolver",
    "InternalVerificationError",
    "ProbeResult",
    "Propagation",
    "SolverOutputError",
    "SolverResult",
    "SolverSpawnError",
    "failed_literal_probe",
    "probe_failed_literals",
    "propagate",
    "run_builtin",
    "solve",
    "solve_builtin",
    "solve_external",
    "verify_model",
]
