"""Linear programming contract: problem/solution types, backend dispatch,
and the dual-cone vertex subproblem used by the projection driver."""

from .core import (
    LinearProgram,
    LpSolution,
    LpStatus,
    solve,
    solve_vertex_subproblem,
    VertexSubproblemError,
)

__all__ = [
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "solve",
    "solve_vertex_subproblem",
    "VertexSubproblemError",
]
