"""Assemble the operation model and the robust dual rows into the
parametric polyhedron  A x + B theta <= b.

Two parameterizations: CAPACITIES keeps theta = (p_m, e_m, f_m) with the
spillage cap and budget as fixed data; TRADEOFF moves the capacities into
x and parameterizes theta = (sigma, xi_m), with the budget as a row.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .lp import LinearProgram, LpStatus, solve
from .model import (
    AmbiguitySet,
    Budget,
    CostVector,
    ScenarioSet,
    SocBoundary,
    StorageSpec,
)


class ParameterMode(Enum):
    CAPACITIES = "capacities"  # theta = (p_m, e_m, f_m)
    TRADEOFF = "tradeoff"  # theta = (sigma, xi_m)


class OracleVerdict(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    SOLVER_FAILURE = "solver_failure"


@dataclass(frozen=True)
class CompiledPolyhedron:
    a_mat: sp.csr_matrix  # rows x n_x
    b_mat: np.ndarray  # rows x dim(theta), dense (dim <= 3)
    b_vec: np.ndarray  # rows
    var_index: dict  # (symbol, day, period) -> column
    row_labels: list  # (family, day, period) per row
    row_scale: np.ndarray  # divisor applied to each source row
    mode: ParameterMode
    n_days: int
    n_periods: int

    @property
    def n_x(self) -> int:
        return self.a_mat.shape[1]

    @property
    def n_rows(self) -> int:
        return self.a_mat.shape[0]

    @property
    def theta_dim(self) -> int:
        return self.b_mat.shape[1]


class _Builder:
    def __init__(self, n_x, theta_dim):
        self.rows_i, self.cols, self.vals = [], [], []
        self.b_rows = []
        self.rhs = []
        self.labels = []
        self.n_x = n_x
        self.theta_dim = theta_dim

    def add(self, a_entries, b_entries, rhs, label):
        """One row of A x + B theta <= rhs."""
        r = len(self.rhs)
        for col, val in a_entries:
            if val != 0.0:
                self.rows_i.append(r)
                self.cols.append(col)
                self.vals.append(float(val))
        brow = np.zeros(self.theta_dim)
        for col, val in b_entries:
            brow[col] += val
        self.b_rows.append(brow)
        self.rhs.append(float(rhs))
        self.labels.append(label)

    def add_eq(self, a_entries, b_entries, rhs, label):
        self.add(a_entries, b_entries, rhs, label + "=le")
        self.add(
            [(c, -v) for c, v in a_entries],
            [(c, -v) for c, v in b_entries],
            -rhs,
            label + "=ge",
        )


def compile_polyhedron(
    scenarios: ScenarioSet,
    storage: StorageSpec,
    ambiguity: AmbiguitySet,
    sigma: float | None,
    costs: CostVector | None = None,
    budget: Budget | None = None,
    mode: ParameterMode = ParameterMode.CAPACITIES,
    scale_rows: bool = True,
) -> CompiledPolyhedron:
    """Build the sparse (A, B, b) triple for the operation model.

    In CAPACITIES mode sigma is fixed data and the budget is NOT a row
    (it seeds the initial outer polytope of the projection); in TRADEOFF
    mode sigma/xi_m are the parameters, capacities join x, and the budget
    becomes a row.
    """
    n, t = scenarios.n_days, scenarios.n_periods
    if n < 1 or t < 1:
        raise ValueError("scenario set must have at least one day and period")
    if mode is ParameterMode.CAPACITIES:
        if sigma is None or not (0.0 <= sigma <= 1.0):
            raise ValueError("capacities mode needs sigma in [0,1]")
    else:
        if costs is None:
            raise ValueError("tradeoff mode needs a cost vector")
    dt = scenarios.delta_t
    gamma = ambiguity.gamma
    rho0 = scenarios.rho0

    per_day = 5 * t + 1
    var_index: dict = {}
    for i in range(n):
        off = i * per_day
        for j in range(t):
            var_index[("p_rs", i, j)] = off + j
            var_index[("p_sg", i, j)] = off + t + j
            var_index[("p_rg", i, j)] = off + 2 * t + j
            var_index[("dp_r", i, j)] = off + 3 * t + j
        for j in range(t + 1):
            var_index[("e", i, j)] = off + 4 * t + j
    dual_off = n * per_day
    for i in range(n):
        var_index[("mu_plus", i, None)] = dual_off + i
        var_index[("mu_minus", i, None)] = dual_off + n + i
    var_index[("lam", None, None)] = dual_off + 2 * n
    n_x = dual_off + 2 * n + 1

    tradeoff = mode is ParameterMode.TRADEOFF
    if tradeoff:
        var_index[("p_m", None, None)] = n_x
        var_index[("e_m", None, None)] = n_x + 1
        var_index[("f_m", None, None)] = n_x + 2
        n_x += 3
        theta_dim = 2  # (sigma, xi_m)
    else:
        theta_dim = 3  # (p_m, e_m, f_m)

    v = var_index

    def cap(sym):
        """Capacity coefficient entry: lands in A (tradeoff) or B."""
        col = v[(sym, None, None)] if tradeoff else {"p_m": 0, "e_m": 1, "f_m": 2}[sym]
        return col

    bl = _Builder(n_x, theta_dim)
    for i in range(n):
        for j in range(t):
            # SoC dynamics (equality)
            bl.add_eq(
                [
                    (v[("e", i, j + 1)], 1.0),
                    (v[("e", i, j)], -1.0),
                    (v[("p_rs", i, j)], -storage.eta_c * dt),
                    (v[("p_sg", i, j)], dt / storage.eta_d),
                ],
                [],
                0.0,
                f"soc_dynamics[{i},{j}]",
            )
        # day-boundary condition on the SoC: anchored cycle unless FREE
        if storage.soc_boundary is not SocBoundary.FREE:
            bl.add_eq(
                [(v[("e", i, t)], 1.0), (v[("e", i, 0)], -1.0)],
                [],
                0.0,
                f"soc_cycle[{i}]",
            )
            frac = (
                storage.alpha_l
                if storage.soc_boundary is SocBoundary.PERIODIC
                else storage.soc_initial_fraction
            )
            a_part = [(v[("e", i, 0)], 1.0)]
            b_part = []
            if tradeoff:
                a_part.append((cap("e_m"), -frac))
            else:
                b_part.append((cap("e_m"), -frac))
            bl.add_eq(a_part, b_part, 0.0, f"soc_anchor[{i}]")
        for j in range(t + 1):
            # SoC window
            e_col = v[("e", i, j)]
            if tradeoff:
                bl.add([(e_col, -1.0), (cap("e_m"), storage.alpha_l)], [], 0.0,
                       f"soc_lower[{i},{j}]")
                bl.add([(e_col, 1.0), (cap("e_m"), -storage.alpha_h)], [], 0.0,
                       f"soc_upper[{i},{j}]")
            else:
                bl.add([(e_col, -1.0)], [(cap("e_m"), storage.alpha_l)], 0.0,
                       f"soc_lower[{i},{j}]")
                bl.add([(e_col, 1.0)], [(cap("e_m"), -storage.alpha_h)], 0.0,
                       f"soc_upper[{i},{j}]")
        for j in range(t):
            bl.add([(v[("p_rs", i, j)], -1.0)], [], 0.0, f"charge_nonneg[{i},{j}]")
            bl.add([(v[("p_sg", i, j)], -1.0)], [], 0.0, f"discharge_nonneg[{i},{j}]")
            pm_a = [(v[("p_rs", i, j)], 1.0), (v[("p_sg", i, j)], 1.0)]
            if tradeoff:
                bl.add(pm_a + [(cap("p_m"), -1.0)], [], 0.0,
                       f"storage_power_cap[{i},{j}]")
            else:
                bl.add(pm_a, [(cap("p_m"), -1.0)], 0.0,
                       f"storage_power_cap[{i},{j}]")
            line_a = [(v[("p_sg", i, j)], 1.0), (v[("p_rg", i, j)], 1.0)]
            if tradeoff:
                bl.add(line_a + [(cap("f_m"), -1.0)], [], 0.0, f"line_cap[{i},{j}]")
            else:
                bl.add(line_a, [(cap("f_m"), -1.0)], 0.0, f"line_cap[{i},{j}]")
            bl.add([(v[("p_rg", i, j)], -1.0)], [], 0.0, f"direct_nonneg[{i},{j}]")
            bl.add_eq(
                [
                    (v[("p_rg", i, j)], 1.0),
                    (v[("p_rs", i, j)], 1.0),
                    (v[("dp_r", i, j)], 1.0),
                ],
                [],
                scenarios.p_r[i, j],
                f"power_balance[{i},{j}]",
            )
            bl.add([(v[("dp_r", i, j)], -1.0)], [], 0.0, f"spill_nonneg[{i},{j}]")

    # robust dual rows: worst-case spillage <= 0 certified by multipliers
    bl.add(
        [(v[("mu_plus", i, None)], gamma + rho0[i]) for i in range(n)]
        + [(v[("mu_minus", i, None)], -gamma + rho0[i]) for i in range(n)]
        + [(v[("lam", None, None)], 1.0)],
        [],
        0.0,
        "dual_objective",
    )
    for i in range(n):
        bl.add([(v[("mu_plus", i, None)], -1.0)], [], 0.0, f"mu_plus_sign[{i}]")
        bl.add([(v[("mu_minus", i, None)], 1.0)], [], 0.0, f"mu_minus_sign[{i}]")
        day_energy = float(scenarios.p_r[i].sum())
        a_part = (
            [(v[("dp_r", i, j)], 1.0) for j in range(t)]
            + [
                (v[("mu_plus", i, None)], -1.0),
                (v[("mu_minus", i, None)], -1.0),
                (v[("lam", None, None)], -1.0),
            ]
        )
        if tradeoff:
            # sigma is a parameter column multiplying -sum_t p_r
            bl.add(a_part, [(0, -day_energy)], 0.0, f"dual_day[{i}]")
        else:
            bl.add(a_part, [], sigma * day_energy, f"dual_day[{i}]")

    if tradeoff:
        bl.add(
            [
                (cap("p_m"), costs.c_p),
                (cap("e_m"), costs.c_e),
                (cap("f_m"), costs.c_l),
            ],
            [(1, -1.0)],
            0.0,
            "budget",
        )
        for sym in ("p_m", "e_m", "f_m"):
            bl.add([(cap(sym), -1.0)], [], 0.0, f"{sym}_nonneg")

    m = len(bl.rhs)
    a_mat = sp.csr_matrix(
        (bl.vals, (bl.rows_i, bl.cols)), shape=(m, n_x), dtype=float
    )
    b_mat = np.vstack(bl.b_rows)
    b_vec = np.asarray(bl.rhs)
    if scale_rows:
        # divide each row by its largest coefficient for LP conditioning
        amax = np.zeros(m)
        abs_a = sp.csr_matrix(
            (np.abs(a_mat.data), a_mat.indices, a_mat.indptr), shape=a_mat.shape
        )
        nz = np.diff(abs_a.indptr) > 0
        amax[nz] = abs_a.max(axis=1).toarray().ravel()[nz]
        scale = np.maximum(amax, np.abs(b_mat).max(axis=1))
        scale[scale == 0] = 1.0
        d_inv = sp.diags(1.0 / scale)
        a_mat = (d_inv @ a_mat).tocsr()
        b_mat = b_mat / scale[:, None]
        b_vec = b_vec / scale
    else:
        scale = np.ones(m)
    return CompiledPolyhedron(
        a_mat=a_mat,
        b_mat=b_mat,
        b_vec=b_vec,
        var_index=var_index,
        row_labels=bl.labels,
        row_scale=scale,
        mode=mode,
        n_days=n,
        n_periods=t,
    )


# the relaxation LP skeleton depends only on A, so cache it per compiled
# polyhedron (weakref-validated to survive id() reuse)
_relaxation_cache: dict = {}


def _relaxation_skeleton(compiled: CompiledPolyhedron):
    import weakref

    entry = _relaxation_cache.get(id(compiled))
    if entry is not None and entry[0]() is compiled:
        return entry[1:]
    m, n_x = compiled.a_mat.shape
    # equality form: A x - s 1 + w = rhs, w >= 0 slack, s >= 0
    eye = sp.identity(m, format="csr")
    ones = sp.csr_matrix(-np.ones((m, 1)))
    eq = sp.hstack([compiled.a_mat, ones, eye], format="csr")
    nv = n_x + 1 + m
    obj = np.zeros(nv)
    obj[n_x] = 1.0
    lb = np.full(nv, -np.inf)
    lb[n_x:] = 0.0
    ub = np.full(nv, np.inf)
    parts = (eq, obj, lb, ub)
    _relaxation_cache.clear()  # keep at most one skeleton alive
    _relaxation_cache[id(compiled)] = (weakref.ref(compiled),) + parts
    return parts


def feasibility_oracle(
    compiled: CompiledPolyhedron,
    theta,
    tol: float = 1e-7,
    backend: str = "scipy",
) -> OracleVerdict:
    """Ground-truth membership test: is {x | A x <= b - B theta} nonempty?

    Phase-1 style LP: minimize the single relaxation s >= 0 in
    A x - s 1 <= b - B theta; feasible iff the optimum is ~0.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (compiled.theta_dim,):
        raise ValueError(
            f"theta must have dimension {compiled.theta_dim}, got {theta.shape}"
        )
    rhs = compiled.b_vec - compiled.b_mat @ theta
    eq, obj, lb, ub = _relaxation_skeleton(compiled)
    sol = solve(
        LinearProgram("min", obj, eq, rhs, lb, ub),
        backend=backend,
    )
    if sol.status is LpStatus.OPTIMAL:
        limit = tol * (1.0 + np.abs(rhs).max(initial=0.0))
        return (
            OracleVerdict.FEASIBLE
            if sol.objective_value <= limit
            else OracleVerdict.INFEASIBLE
        )
    if sol.status is LpStatus.UNBOUNDED:
        # the relaxation objective is bounded below by 0; cannot happen
        return OracleVerdict.SOLVER_FAILURE
    return OracleVerdict.SOLVER_FAILURE


def extract_operation_point(
    compiled: CompiledPolyhedron,
    theta,
    tol: float = 1e-7,
    backend: str = "scipy",
) -> np.ndarray | None:
    """A concrete x in {x | A x <= b - B theta}, or None when empty.

    Same relaxation LP as the oracle; returns the x block of the solution
    when the relaxation closes to ~0.
    """
    theta = np.asarray(theta, dtype=float)
    rhs = compiled.b_vec - compiled.b_mat @ theta
    n_x = compiled.n_x
    eq, obj, lb, ub = _relaxation_skeleton(compiled)
    sol = solve(LinearProgram("min", obj, eq, rhs, lb, ub), backend=backend)
    if sol.status is not LpStatus.OPTIMAL:
        return None
    limit = tol * (1.0 + np.abs(rhs).max(initial=0.0))
    if sol.objective_value > limit:
        return None
    return sol.x[:n_x]


def schedule_to_x(compiled: CompiledPolyhedron, schedule, certificate) -> np.ndarray:
    """Pack a dispatch schedule and dual certificate into an x vector."""
    x = np.zeros(compiled.n_x)
    v = compiled.var_index
    n, t = compiled.n_days, compiled.n_periods
    for i in range(n):
        for j in range(t):
            x[v[("p_rs", i, j)]] = schedule.p_rs[i, j]
            x[v[("p_sg", i, j)]] = schedule.p_sg[i, j]
            x[v[("p_rg", i, j)]] = schedule.p_rg[i, j]
            x[v[("dp_r", i, j)]] = schedule.dp_r[i, j]
        for j in range(t + 1):
            x[v[("e", i, j)]] = schedule.e[i, j]
        x[v[("mu_plus", i, None)]] = certificate.mu_plus[i]
        x[v[("mu_minus", i, None)]] = certificate.mu_minus[i]
    x[v[("lam", None, None)]] = certificate.lam
    return x


def x_to_schedule(compiled: CompiledPolyhedron, x):
    """Unpack an x vector into (DispatchSchedule, DualCertificate)."""
    from .model import DispatchSchedule, DualCertificate

    v = compiled.var_index
    n, t = compiled.n_days, compiled.n_periods
    mats = {k: np.zeros((n, t)) for k in ("p_rs", "p_sg", "p_rg", "dp_r")}
    e = np.zeros((n, t + 1))
    for i in range(n):
        for j in range(t):
            for k in mats:
                mats[k][i, j] = x[v[(k, i, j)]]
        for j in range(t + 1):
            e[i, j] = x[v[("e", i, j)]]
    sched = DispatchSchedule(e=e, **mats)
    cert = DualCertificate(
        mu_plus=np.array([x[v[("mu_plus", i, None)]] for i in range(n)]),
        mu_minus=np.array([x[v[("mu_minus", i, None)]] for i in range(n)]),
        lam=float(x[v[("lam", None, None)]]),
    )
    return sched, cert


def dump_triplets(compiled: CompiledPolyhedron, path) -> None:
    """Debug dump of (A, B, b) as sparse triplets."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["block", "row", "col", "val"])
        coo = compiled.a_mat.tocoo()
        for r, c, val in zip(coo.row, coo.col, coo.data):
            w.writerow(["A", int(r), int(c), repr(float(val))])
        for r in range(compiled.n_rows):
            for c in range(compiled.theta_dim):
                if compiled.b_mat[r, c] != 0.0:
                    w.writerow(["B", r, c, repr(float(compiled.b_mat[r, c]))])
        for r, val in enumerate(compiled.b_vec):
            w.writerow(["b", r, 0, repr(float(val))])
