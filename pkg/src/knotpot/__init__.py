"""Dilogarithm potentials for hyperbolic Dehn fillings.

The package evaluates a holomorphic potential function built from
dilogarithm and log-product terms, finds its critical points (the
complete hyperbolic structure and its Dehn-filling deformations by
Newton continuation), and extracts geometric invariants: volume,
Chern-Simons modulo 1/2, and the core geodesic length and torsion.
A five-crossing knot complement is built in; other potentials load
from a JSON spec file.
"""

from .dilog import (
    BACKEND,
    ContinuedLog,
    bloch_wigner_d,
    continue_log,
    continued,
    li2,
    principal_log,
    rogers_r,
)
from .errors import (
    DegenerateModulusError,
    DomainError,
    KnotpotError,
    NoConvergenceError,
    NoGeometricRootError,
    PathObstructionError,
    SingularJacobianError,
    SingularPointError,
    SpecFormatError,
    StepTooLargeError,
    ValidationError,
    ZeroDenominatorError,
)
from .invariants import (
    InvariantReport,
    chern_simons_of,
    core_geodesic_of,
    eval_v_alpha,
    im_v_alpha_parts,
    report_for,
    rogers_combo,
    volume_from_shapes,
    volume_of,
)
from .potential import (
    BUILTINS,
    DilogTerm,
    LongitudeExpr,
    LongitudeSpec,
    Monomial,
    ParamPoint,
    PotentialSpec,
    QuadLogTerm,
    Shapes,
    advance_point,
    builtin_five_two,
    dump_spec,
    edge_residuals,
    eta_log,
    eval_eta,
    eval_v,
    load_spec,
    log_gradient,
    log_hessian,
    make_point,
    reduced_residual,
    shapes_from_point,
)
from .solver import (
    CriticalPoint,
    DeformationSample,
    FillingSolution,
    NewtonResult,
    Slope,
    newton_refine,
    normalize_slope,
    solve_complete,
    solve_filling,
    trace_deformation,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BUILTINS",
    "ContinuedLog",
    "CriticalPoint",
    "DeformationSample",
    "DegenerateModulusError",
    "DilogTerm",
    "DomainError",
    "FillingSolution",
    "InvariantReport",
    "KnotpotError",
    "LongitudeExpr",
    "LongitudeSpec",
    "Monomial",
    "NewtonResult",
    "NoConvergenceError",
    "NoGeometricRootError",
    "ParamPoint",
    "PathObstructionError",
    "PotentialSpec",
    "QuadLogTerm",
    "Shapes",
    "SingularJacobianError",
    "SingularPointError",
    "Slope",
    "SpecFormatError",
    "StepTooLargeError",
    "ValidationError",
    "ZeroDenominatorError",
    "advance_point",
    "bloch_wigner_d",
    "builtin_five_two",
    "chern_simons_of",
    "continue_log",
    "continued",
    "core_geodesic_of",
    "dump_spec",
    "edge_residuals",
    "eta_log",
    "eval_eta",
    "eval_v",
    "eval_v_alpha",
    "im_v_alpha_parts",
    "li2",
    "load_spec",
    "log_gradient",
    "log_hessian",
    "make_point",
    "newton_refine",
    "normalize_slope",
    "principal_log",
    "reduced_residual",
    "report_for",
    "rogers_combo",
    "rogers_r",
    "shapes_from_point",
    "solve_complete",
    "solve_filling",
    "trace_deformation",
    "volume_from_shapes",
    "volume_of",
    "__version__",
]
