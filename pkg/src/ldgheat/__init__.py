"""1-D local discontinuous Galerkin heat solver with alternating fluxes and
a superconvergence verification harness."""

__version__ = "0.1.0"

from .legendre import QuadratureRule, RefPoly, ds_inverse, eval_legendre, gauss_rule, radau_points
from .mesh import (
    BCKind,
    BoundaryCondition,
    FluxChoice,
    Mesh1D,
    PiecewisePoly,
    broken_l2_norm,
    build_mesh,
    l2_inner,
    trace,
)
from .projection import SmoothFn, mode_k_deficiency, project_l2, project_minus, project_plus
from .correction import build_chain, build_correction, build_bundle, initial_interpolant
from .problems import ProblemSpec, builtin_problem, make_problem
from .solver import SemidiscreteOp, energy_identity_gap
from .timestep import StepPolicy, integrate
from .metrics import ErrorReport, error_report, rate
from .study import StudyConfig, StudyRecord, preset_config, run_study, emit

__all__ = [
    "QuadratureRule",
    "RefPoly",
    "ds_inverse",
    "eval_legendre",
    "gauss_rule",
    "radau_points",
    "BCKind",
    "BoundaryCondition",
    "FluxChoice",
    "Mesh1D",
    "PiecewisePoly",
    "broken_l2_norm",
    "build_mesh",
    "l2_inner",
    "trace",
    "SmoothFn",
    "mode_k_deficiency",
    "project_l2",
    "project_minus",
    "project_plus",
    "build_chain",
    "build_correction",
    "build_bundle",
    "initial_interpolant",
    "ProblemSpec",
    "builtin_problem",
    "make_problem",
    "SemidiscreteOp",
    "energy_identity_gap",
    "StepPolicy",
    "integrate",
    "ErrorReport",
    "error_report",
    "rate",
    "StudyConfig",
    "StudyRecord",
    "preset_config",
    "run_study",
    "emit",
]
