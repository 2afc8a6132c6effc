"""Kinematics and static-force toolkit for a tendon-driven linkage finger."""

from .config import FingerConfig, default_config, load_config, parse_config
from .errors import (
    ConfigError,
    DegenerateGeometryError,
    FingerkitError,
    NoClosureError,
    OutOfRangeError,
    RuleViolationError,
)
from .finger import (
    CylinderObject,
    FingerGeometry,
    FlatObject,
    ForceContext,
    GraspReport,
    TendonModel,
    TipSample,
    WorkspaceResult,
    grasp_assess,
    static_tip_force,
    tendon_excursion,
    tip_position,
    tip_trace,
    tip_velocity,
    workspace,
)
from .linkage import (
    BranchPolicy,
    ChainSweep,
    JointState,
    LinkageGeometry,
    LoopCoefficients,
    QuadraticCoefficients,
    bisect_loop,
    chain_derivatives,
    compute_mobility,
    count_loops,
    loop_coefficients,
    loop_residual,
    quadratic_coefficients,
    solve_chain,
    solve_chain_numeric,
    solve_loop,
    sweep_chain,
)
from .registry import (
    ReferenceRegistry,
    build_default_registry,
    default_registry,
    registry_verify,
)
from .safety import (
    ClearanceResult,
    SafetyVerdict,
    StrokeResult,
    clearance_check,
    iso_contact_check,
    stroke_check,
)

__version__ = "0.1.0"

__all__ = [
    "BranchPolicy",
    "ChainSweep",
    "ClearanceResult",
    "ConfigError",
    "CylinderObject",
    "DegenerateGeometryError",
    "FingerConfig",
    "FingerGeometry",
    "FingerkitError",
    "FlatObject",
    "ForceContext",
    "GraspReport",
    "JointState",
    "LinkageGeometry",
    "LoopCoefficients",
    "NoClosureError",
    "OutOfRangeError",
    "QuadraticCoefficients",
    "ReferenceRegistry",
    "RuleViolationError",
    "SafetyVerdict",
    "StrokeResult",
    "TendonModel",
    "TipSample",
    "WorkspaceResult",
    "bisect_loop",
    "build_default_registry",
    "chain_derivatives",
    "clearance_check",
    "compute_mobility",
    "count_loops",
    "default_config",
    "default_registry",
    "grasp_assess",
    "iso_contact_check",
    "load_config",
    "loop_coefficients",
    "loop_residual",
    "parse_config",
    "quadratic_coefficients",
    "registry_verify",
    "solve_chain",
    "solve_chain_numeric",
    "solve_loop",
    "static_tip_force",
    "stroke_check",
    "sweep_chain",
    "tendon_excursion",
    "tip_position",
    "tip_trace",
    "tip_velocity",
    "workspace",
    "__version__",
]
