"""Cutting-plane driver for the parametric projection.

Iterates: enumerate vertices of the outer approximation, solve the
dual-cone LP at each unvisited vertex, take the worst violation v*, and
either terminate (v* = 0: every vertex lies in the projected set, so the
outer approximation equals it) or add the separating cut and repeat.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import polytope
from .compiler import CompiledPolyhedron, ParameterMode
from .lp import solve_vertex_subproblem, VertexSubproblemError
from .model import Budget, CostVector

log = logging.getLogger("solarcap.projection")

CONVERGED = "converged"
EMPTY_SET = "empty_set"
ITERATION_LIMIT = "iteration_limit"
NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class ProjectionOptions:
    max_iterations: int = 500
    wall_clock_limit: float | None = None  # seconds
    eps_term: float = 1e-7  # v* <= eps_term*(1+max|b|) counts as zero
    multi_cut: bool = False  # cut every violated vertex, not just the argmax
    lp_backend: str = "auto"
    threads: int = 1  # parallel per-vertex subproblem solves
    sigma_box: tuple[float, float] = (0.0, 1.0)  # tradeoff mode only
    budget_box: tuple[float, float] = (1e9, 1e10)  # tradeoff mode only


@dataclass
class CutRecord:
    iteration: int
    vertex: np.ndarray
    v_star: float
    normal: np.ndarray
    offset: float
    accepted: bool


@dataclass
class ProjectionResult:
    theta_set: polytope.HalfspaceSet
    iterations: int
    cut_log: list[CutRecord] = field(default_factory=list)
    status: str = CONVERGED
    vertices: np.ndarray | None = None


def initial_set(
    compiled: CompiledPolyhedron,
    costs: CostVector | None,
    budget: Budget | None,
    options: ProjectionOptions,
) -> polytope.HalfspaceSet:
    if compiled.mode is ParameterMode.CAPACITIES:
        if costs is None or budget is None:
            raise ValueError("capacities mode needs costs and a budget")
        c = costs.as_array()
        xi = budget.xi_m
        scale = xi / c  # per-axis extent of the budget simplex
        hs = []
        for i in range(3):
            e = np.zeros(3)
            e[i] = -1.0
            hs.append(polytope.Halfspace(e, 0.0, "init_box"))
        cmax = c.max()
        hs.append(polytope.Halfspace(c / cmax, xi / cmax, "budget"))
        return polytope.HalfspaceSet(3, tuple(hs), scale=scale)
    lo = np.array([options.sigma_box[0], options.budget_box[0]])
    hi = np.array([options.sigma_box[1], options.budget_box[1]])
    return polytope.make_box(lo, hi)


def project(
    compiled: CompiledPolyhedron,
    costs: CostVector | None = None,
    budget: Budget | None = None,
    options: ProjectionOptions | None = None,
    init_set: polytope.HalfspaceSet | None = None,
) -> ProjectionResult:
    """Compute the exact projection of the compiled polyhedron onto theta."""
    options = options or ProjectionOptions()
    hs = init_set if init_set is not None else initial_set(
        compiled, costs, budget, options
    )
    if hs.dim != compiled.theta_dim:
        raise ValueError("initial set dimension does not match the parameters")
    bscale = 1.0 + np.abs(compiled.b_vec).max(initial=0.0)
    threshold = options.eps_term * bscale
    registry = polytope.VertexRegistry(scale=hs.scale)
    cut_log: list[CutRecord] = []
    t0 = time.monotonic()

    for it in range(1, options.max_iterations + 1):
        enum = polytope.enumerate_vertices(hs)
        verts = enum.vertices
        if verts.shape[0] == 0:
            # provably empty, or degenerate to a lower-dimensional set
            log.info("iter=%d vertices=0 unvisited=0 v*=nan cut=terminated", it)
            return ProjectionResult(hs, it, cut_log, EMPTY_SET, verts)
        unvisited = [v for v in verts if not registry.seen(v)]
        try:
            if options.threads > 1 and len(unvisited) > 1:
                with ThreadPoolExecutor(max_workers=options.threads) as ex:
                    solved = list(
                        ex.map(
                            lambda v: solve_vertex_subproblem(
                                compiled, v, backend=options.lp_backend
                            ),
                            unvisited,
                        )
                    )
            else:
                solved = [
                    solve_vertex_subproblem(compiled, v, backend=options.lp_backend)
                    for v in unvisited
                ]
        except VertexSubproblemError:
            log.info(
                "iter=%d vertices=%d unvisited=%d v*=nan cut=terminated",
                it, verts.shape[0], len(unvisited),
            )
            return ProjectionResult(hs, it, cut_log, NUMERICAL_FAILURE, verts)
        for v, (vk, gamma) in zip(unvisited, solved):
            registry.mark(v, (max(vk, 0.0), gamma))
        # argmax over all current vertices; deterministic lexicographic
        # tie-break on vertex coordinates
        best = None
        for v in verts:
            vk, gamma = registry.get(v)
            if best is None or vk > best[0] or (
                vk == best[0] and tuple(v) < tuple(best[1])
            ):
                best = (vk, v, gamma)
        v_star, v_arg, gamma_star = best
        if v_star <= threshold:
            log.info(
                "iter=%d vertices=%d unvisited=%d v*=%.3e cut=terminated",
                it, verts.shape[0], len(unvisited), v_star,
            )
            return ProjectionResult(hs, it, cut_log, CONVERGED, verts)

        to_cut = [(v_star, v_arg, gamma_star)]
        if options.multi_cut:
            to_cut = [
                (vk, v, g)
                for v in verts
                for vk, g in [registry.get(v)]
                if vk > threshold
            ]
        accepted_any = False
        for vk, v, gamma in to_cut:
            gnorm = np.abs(gamma @ compiled.b_mat).max()
            if gnorm <= 1e-14:
                # cut reads 0 >= positive constant: nothing survives
                log.info(
                    "iter=%d vertices=%d unvisited=%d v*=%.3e cut=terminated",
                    it, verts.shape[0], len(unvisited), v_star,
                )
                return ProjectionResult(hs, it, cut_log, EMPTY_SET, verts)
            gamma = gamma / gnorm
            new_hs, cut_status = polytope.add_cut(
                hs, gamma, compiled.b_vec, compiled.b_mat, provenance=f"cut:{it}"
            )
            accepted = cut_status == polytope.CutStatus.ADDED
            cut_log.append(
                CutRecord(
                    it, np.asarray(v, dtype=float), float(vk),
                    -(gamma @ compiled.b_mat), float(-(gamma @ compiled.b_vec)),
                    accepted,
                )
            )
            if accepted:
                hs = new_hs
                accepted_any = True
            else:
                # duplicate hyperplane: the vertex sits on the wrong side
                # of an existing facet by at most the enumeration slack,
                # so its violation is below geometric resolution
                registry.mark(v, (0.0, gamma))
        log.info(
            "iter=%d vertices=%d unvisited=%d v*=%.3e cut=%s",
            it, verts.shape[0], len(unvisited), v_star,
            "accepted" if accepted_any else "resolved-duplicate",
        )
        if (
            options.wall_clock_limit is not None
            and time.monotonic() - t0 > options.wall_clock_limit
        ):
            return ProjectionResult(hs, it, cut_log, ITERATION_LIMIT, None)
    enum = polytope.enumerate_vertices(hs)
    return ProjectionResult(
        hs, options.max_iterations, cut_log, ITERATION_LIMIT, enum.vertices
    )
