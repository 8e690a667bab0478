"""Feasible capacity sets for remote solar plants.

Compiles the storage/line/spillage operation model into a parametric
polyhedron A x + B theta <= b and projects it onto the capacity (or
spillage/budget) parameters with an LP-based cutting-plane algorithm.
"""

from .model import (
    AmbiguitySet,
    Budget,
    CapacityPoint,
    CostVector,
    DispatchSchedule,
    DualCertificate,
    ScenarioSet,
    SocBoundary,
    StorageSpec,
    compute_gamma,
    realize_schedule,
    validate_schedule,
    worst_case_spillage,
)
from .compiler import (
    CompiledPolyhedron,
    OracleVerdict,
    ParameterMode,
    compile_polyhedron,
    extract_operation_point,
    feasibility_oracle,
)
from .projection import ProjectionOptions, ProjectionResult, project
from .analysis import (
    min_cost_sizing,
    pareto_front,
    slice_fixed_ratio,
    tradeoff_sigma_budget,
)

__version__ = "0.1.0"
