"""LP problem/solution types and backend dispatch."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from . import simplex

# above this many tableau cells the dense reference simplex hands over
# to the sparse scipy backend
_AUTO_CELLS = 500_000


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class LinearProgram:
    """min/max objective.x subject to eq_mat x = eq_rhs and box bounds."""

    sense: str  # "min" | "max"
    objective: np.ndarray
    eq_mat: object  # (m, n) array or scipy sparse
    eq_rhs: np.ndarray
    lb: np.ndarray  # -inf allowed
    ub: np.ndarray  # +inf allowed

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        n = np.asarray(self.objective).size
        if np.asarray(self.lb).shape != (n,) or np.asarray(self.ub).shape != (n,):
            raise ValueError("bounds must match the objective length")
        if np.any(np.asarray(self.lb) > np.asarray(self.ub)):
            # still a valid (infeasible) program; solver reports it
            pass


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective_value: float | None = None


_SCIPY_STATUS = {
    0: LpStatus.OPTIMAL,
    2: LpStatus.INFEASIBLE,
    3: LpStatus.UNBOUNDED,
}


def _solve_scipy(c, a, rhs, lb, ub) -> tuple[str, np.ndarray | None]:
    bounds = [
        (li if np.isfinite(li) else None, ui if np.isfinite(ui) else None)
        for li, ui in zip(lb, ub)
    ]
    a_eq = sp.csr_matrix(a) if a is not None and a.shape[0] else None
    res = linprog(
        c,
        A_eq=a_eq,
        b_eq=rhs if a_eq is not None else None,
        bounds=bounds,
        method="highs",
        # defaults (1e-7) leave row residuals that exceed downstream
        # certificate tolerances once row scaling is undone
        options={
            "primal_feasibility_tolerance": 1e-9,
            "dual_feasibility_tolerance": 1e-9,
        },
    )
    status = _SCIPY_STATUS.get(res.status, LpStatus.NUMERICAL_FAILURE)
    return status, (res.x if status is LpStatus.OPTIMAL else None)


def solve(lp: LinearProgram, backend: str = "auto") -> LpSolution:
    """Solve an LP; never raises on solver trouble, reports a status.

    backend: "simplex" (self-contained reference), "scipy" (HiGHS),
    or "auto" (reference for small dense problems, scipy otherwise).
    """
    c = np.asarray(lp.objective, dtype=float)
    if lp.sense == "max":
        c = -c
    a = lp.eq_mat
    m = 0 if a is None else a.shape[0]
    rhs = np.asarray(lp.eq_rhs, dtype=float) if m else np.zeros(0)
    lb = np.asarray(lp.lb, dtype=float)
    ub = np.asarray(lp.ub, dtype=float)

    if backend == "auto":
        backend = "simplex" if (m + 1) * (c.size + m + 1) <= _AUTO_CELLS else "scipy"
    if backend == "scipy":
        a_arr = None if a is None else (a if sp.issparse(a) else np.asarray(a))
        status, x = _solve_scipy(c, a_arr, rhs, lb, ub)
    elif backend == "simplex":
        a_dense = np.zeros((0, c.size)) if a is None else (
            a.toarray() if sp.issparse(a) else np.asarray(a, dtype=float)
        )
        st, x = simplex.solve_bounded(c, a_dense, rhs, lb, ub)
        status = LpStatus(st)
    else:
        raise ValueError(f"unknown backend {backend!r}")

    if status is not LpStatus.OPTIMAL:
        return LpSolution(status=status)
    # residual contract: trust but verify
    if m:
        a_op = sp.csr_matrix(a) if sp.issparse(a) else np.asarray(a)
        resid = np.abs(a_op @ x - rhs).max()
        if resid > 1e-8 * (1.0 + np.abs(rhs).max(initial=0.0)):
            return LpSolution(status=LpStatus.NUMERICAL_FAILURE)
    if np.any(x < lb - 1e-7) or np.any(x > ub + 1e-7):
        return LpSolution(status=LpStatus.NUMERICAL_FAILURE)
    obj = float(np.asarray(lp.objective, dtype=float) @ x)
    return LpSolution(status=LpStatus.OPTIMAL, x=x, objective_value=obj)


class VertexSubproblemError(RuntimeError):
    """Solver failure on the dual-cone subproblem; carries the vertex."""

    def __init__(self, theta_k, status):
        super().__init__(f"subproblem failed at vertex {theta_k} ({status})")
        self.theta_k = np.asarray(theta_k, dtype=float)
        self.status = status


def solve_vertex_subproblem(compiled, theta_k, backend: str = "auto"):
    """max gamma.(b - B theta_k)  s.t.  A^T gamma = 0,  -1 <= gamma <= 0.

    gamma = 0 is always feasible and the box keeps the LP bounded, so the
    optimum v_k is >= 0; v_k > 0 certifies that theta_k is outside the
    projected set and gamma yields a separating cut.
    """
    theta_k = np.asarray(theta_k, dtype=float)
    rhs = compiled.b_vec - compiled.b_mat @ theta_k
    m = compiled.a_mat.shape[0]
    lp = LinearProgram(
        sense="max",
        objective=rhs,
        eq_mat=compiled.a_mat.T.tocsr(),
        eq_rhs=np.zeros(compiled.a_mat.shape[1]),
        lb=np.full(m, -1.0),
        ub=np.zeros(m),
    )
    sol = solve(lp, backend=backend)
    if sol.status is not LpStatus.OPTIMAL:
        raise VertexSubproblemError(theta_k, sol.status)
    return float(sol.objective_value), sol.x
