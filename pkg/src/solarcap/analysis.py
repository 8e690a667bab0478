"""Downstream products of the projected feasible set.

Minimum-cost sizing, fixed-ratio 2-D slices, cost-gradient vertex
candidates, the storage/line Pareto front, and the spillage/budget
trade-off region.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from . import polytope
from .compiler import CompiledPolyhedron, ParameterMode, compile_polyhedron
from .lp import LinearProgram, LpStatus, solve
from .model import AmbiguitySet, Budget, CapacityPoint, CostVector, ScenarioSet, StorageSpec
from .projection import ProjectionOptions, ProjectionResult, project


class EmptyFeasibleSetError(ValueError):
    """The projected set has no points to optimize over."""


@dataclass(frozen=True)
class SizingStrategy:
    theta: CapacityPoint
    cost: float
    active_facets: list


def _vertices_or_raise(theta_set: polytope.HalfspaceSet) -> np.ndarray:
    enum = polytope.enumerate_vertices(theta_set)
    if enum.vertices.shape[0] == 0:
        raise EmptyFeasibleSetError("feasible set is empty or degenerate")
    return enum.vertices


def min_cost_sizing(
    theta_set: polytope.HalfspaceSet, costs: CostVector
) -> SizingStrategy:
    """argmin of the investment cost over the projected set.

    Vertex-based (the set is a bounded polytope); ties broken by the
    lexicographically smallest point.
    """
    if theta_set.dim != 3:
        raise ValueError("sizing runs on the 3-D capacity set")
    verts = _vertices_or_raise(theta_set)
    c = costs.as_array()
    vals = verts @ c
    best = np.min(vals)
    tied = verts[vals <= best + 1e-9 * (1.0 + abs(best))]
    theta = np.array(sorted(map(tuple, tied))[0])
    active = [
        h.provenance
        for h in theta_set.halfspaces
        if abs(h.a @ theta - h.b) <= 1e-6 * (1.0 + abs(h.b))
    ]
    return SizingStrategy(
        theta=CapacityPoint(*np.maximum(theta, 0.0)),
        cost=float(c @ theta),
        active_facets=active,
    )


def min_cost_direct(
    compiled: CompiledPolyhedron, costs: CostVector, budget: Budget
) -> float | None:
    """Minimum cost over the joint polyhedron (dispatch and capacities
    together), bypassing the projection. Independent reference for the
    projected optimum. Returns None when infeasible."""
    if compiled.mode is not ParameterMode.CAPACITIES:
        raise ValueError("direct sizing needs a capacities-mode compilation")
    m, n_x = compiled.a_mat.shape
    dim = compiled.theta_dim
    c_arr = costs.as_array()
    # rows: [A B][x;theta] + s = b, plus budget row c.theta + s_b = xi
    top = sp.hstack(
        [compiled.a_mat, sp.csr_matrix(compiled.b_mat), sp.identity(m)],
        format="csr",
    )
    bottom = sp.hstack(
        [sp.csr_matrix((1, n_x)), sp.csr_matrix(c_arr), sp.csr_matrix((1, m))],
        format="csr",
    )
    eq = sp.vstack([sp.hstack([top, sp.csr_matrix((m, 1))]),
                    sp.hstack([bottom, sp.csr_matrix(np.ones((1, 1)))])],
                   format="csr")
    rhs = np.concatenate([compiled.b_vec, [budget.xi_m]])
    nv = n_x + dim + m + 1
    obj = np.zeros(nv)
    obj[n_x : n_x + dim] = c_arr
    lb = np.full(nv, -np.inf)
    lb[n_x:] = 0.0  # theta >= 0 and slacks >= 0
    ub = np.full(nv, np.inf)
    sol = solve(LinearProgram("min", obj, eq, rhs, lb, ub), backend="scipy")
    if sol.status is LpStatus.INFEASIBLE:
        return None
    if sol.status is not LpStatus.OPTIMAL:
        raise RuntimeError(f"joint sizing LP failed: {sol.status}")
    return float(sol.objective_value)


def slice_compiled(compiled: CompiledPolyhedron, ratio: float) -> CompiledPolyhedron:
    """Fix the energy/power ratio: substitute p_m = e_m / ratio.

    Merges the p_m parameter column into the e_m column, leaving a 2-D
    parameter (e_m, f_m)."""
    if compiled.mode is not ParameterMode.CAPACITIES:
        raise ValueError("slicing applies to capacities-mode compilations")
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    b_new = np.column_stack(
        [compiled.b_mat[:, 1] + compiled.b_mat[:, 0] / ratio, compiled.b_mat[:, 2]]
    )
    return replace(compiled, b_mat=b_new)


@dataclass
class SliceResult:
    projection: ProjectionResult
    combined_storage_cost: float  # per MWh, includes the converter share
    ratio: float


def slice_fixed_ratio(
    scenarios: ScenarioSet,
    storage: StorageSpec,
    ambiguity: AmbiguitySet,
    sigma: float,
    costs: CostVector,
    budget: Budget,
    ratio: float,
    options: ProjectionOptions | None = None,
) -> SliceResult:
    """Project the feasible set onto (e_m, f_m) with p_m = e_m / ratio.

    Recompiles and reprojects in 2-D rather than slicing the 3-D result,
    which avoids degenerate plane/facet intersections."""
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    compiled = slice_compiled(
        compile_polyhedron(
            scenarios, storage, ambiguity, sigma, costs, budget,
            mode=ParameterMode.CAPACITIES,
        ),
        ratio,
    )
    c_s = costs.c_e + costs.c_p / ratio
    xi = budget.xi_m
    scale = np.array([xi / c_s, xi / costs.c_l])
    cmax = max(c_s, costs.c_l)
    hs = tuple(
        [
            polytope.Halfspace(np.array([-1.0, 0.0]), 0.0, "init_box"),
            polytope.Halfspace(np.array([0.0, -1.0]), 0.0, "init_box"),
            polytope.Halfspace(
                np.array([c_s / cmax, costs.c_l / cmax]), xi / cmax, "budget"
            ),
        ]
    )
    init = polytope.HalfspaceSet(2, hs, scale=scale)
    res = project(compiled, options=options, init_set=init)
    return SliceResult(projection=res, combined_storage_cost=c_s, ratio=ratio)


def slice_3d_set(
    theta_set: polytope.HalfspaceSet, ratio: float
) -> polytope.HalfspaceSet:
    """Geometric alternative: intersect a 3-D set with p_m = e_m / ratio."""
    if theta_set.dim != 3:
        raise ValueError("expected a 3-D set")
    hs = []
    for h in theta_set.halfspaces:
        a = np.array([h.a[1] + h.a[0] / ratio, h.a[2]])
        if not np.any(a):
            continue  # halfspace independent of (e_m, f_m) after substitution
        hs.append(polytope.Halfspace(a, h.b, h.provenance))
    scale = np.array([theta_set.scale[1], theta_set.scale[2]])
    return polytope.HalfspaceSet(2, tuple(hs), scale=scale)


def _southwest_chain(vertices: np.ndarray) -> np.ndarray:
    """Non-dominated (both coordinates minimal) vertices, sorted by the
    first coordinate increasing; the second is then decreasing."""
    keep = []
    for i, v in enumerate(vertices):
        dominated = False
        for j, u in enumerate(vertices):
            if j == i:
                continue
            if (
                u[0] <= v[0] + 1e-12
                and u[1] <= v[1] + 1e-12
                and (u[0] < v[0] - 1e-12 or u[1] < v[1] - 1e-12)
            ):
                dominated = True
                break
        if not dominated:
            keep.append(tuple(v))
    return np.array(sorted(set(keep)))


def pareto_front(theta_set_2d: polytope.HalfspaceSet) -> np.ndarray:
    """Southwest boundary chain: points where storage energy and line
    capacity cannot both be reduced. Cost-independent."""
    verts = _vertices_or_raise(theta_set_2d)
    return _southwest_chain(verts)


@dataclass
class CandidateOptimum:
    vertex: np.ndarray
    cost_range: tuple[float, float]  # sub-interval of c_s where it wins


def candidate_optima(
    theta_set_2d: polytope.HalfspaceSet,
    c_s_range: tuple[float, float],
    c_l: float,
) -> list[CandidateOptimum]:
    """Vertices attainable as cost minimizers while the combined storage
    cost c_s sweeps its range (line cost c_l fixed).

    The optimal vertex switches where the cost gradient is orthogonal to
    a Pareto edge, i.e. at c_s = c_l * |slope|; evaluating the argmin on
    each resulting sub-interval enumerates all candidates."""
    lo, hi = c_s_range
    if lo > hi or lo <= 0:
        raise ValueError("need 0 < lo <= hi in the cost range")
    verts = _vertices_or_raise(theta_set_2d)
    chain = _southwest_chain(verts)
    breaks = {lo, hi}
    for p, q in zip(chain[:-1], chain[1:]):
        de = q[0] - p[0]
        df = p[1] - q[1]
        if de > 1e-12:
            cs = c_l * df / de
            if lo < cs < hi:
                breaks.add(float(cs))
    pts = sorted(breaks)
    segments = list(zip(pts[:-1], pts[1:])) or [(lo, hi)]
    found: dict[tuple, list] = {}
    for a, b in segments:
        c = np.array([0.5 * (a + b), c_l])
        vals = verts @ c
        # deterministic tie-break: lexicographic smallest among optima
        tied = verts[vals <= vals.min() + 1e-9 * (1 + abs(vals.min()))]
        best = np.array(sorted(map(tuple, tied))[0])
        key = tuple(np.round(best, 9))
        found.setdefault(key, []).extend((a, b))
    return [
        CandidateOptimum(np.array(k), (min(v), max(v)))
        for k, v in sorted(found.items())
    ]


def tradeoff_sigma_budget(
    scenarios: ScenarioSet,
    storage: StorageSpec,
    ambiguity: AmbiguitySet,
    costs: CostVector,
    sigma_box: tuple[float, float] = (0.0, 1.0),
    budget_box: tuple[float, float] = (1e9, 1e10),
    options: ProjectionOptions | None = None,
) -> ProjectionResult:
    """Project the joint polyhedron onto (sigma, xi_m).

    The lower envelope of the result gives the minimum budget required
    for each spillage cap."""
    options = options or ProjectionOptions()
    options.sigma_box = sigma_box
    options.budget_box = budget_box
    compiled = compile_polyhedron(
        scenarios, storage, ambiguity, sigma=None, costs=costs,
        budget=None, mode=ParameterMode.TRADEOFF,
    )
    return project(compiled, options=options)


def budget_lower_envelope(theta_set_2d: polytope.HalfspaceSet) -> np.ndarray:
    """Breakpoints (sigma, xi_min) of the minimum-budget curve."""
    verts = _vertices_or_raise(theta_set_2d)
    return _southwest_chain(verts)
