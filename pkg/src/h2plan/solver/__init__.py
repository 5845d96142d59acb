"""LP representation, a revised simplex solver, MPS I/O and solution checks."""
from .lp import (
    LinearProgram,
    LPBuilder,
    LPValidationError,
    SolveOptions,
    SolveResult,
    from_dense,
    result_from_maps,
)
from .mps import export_model, from_mps, import_model, to_mps
from .simplex import NumericalBreakdown, solve
from .verify import (
    VerificationReport,
    check_farkas,
    check_ray,
    read_solution,
    verify_solution,
    write_solution,
)

__all__ = [
    "LinearProgram",
    "LPBuilder",
    "LPValidationError",
    "NumericalBreakdown",
    "SolveOptions",
    "SolveResult",
    "VerificationReport",
    "check_farkas",
    "check_ray",
    "export_model",
    "from_dense",
    "from_mps",
    "import_model",
    "read_solution",
    "result_from_maps",
    "solve",
    "to_mps",
    "verify_solution",
    "write_solution",
]
