"""Shared instance builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from solarcap.compiler import (
    OracleVerdict,
    ParameterMode,
    compile_polyhedron,
    feasibility_oracle,
)
from solarcap.model import (
    AmbiguitySet,
    Budget,
    CostVector,
    ScenarioSet,
    StorageSpec,
)
from solarcap.projection import ProjectionOptions, project
from solarcap import polytope


def canonical_instance(sigma=0.0, gamma=0.0):
    """1 day, 3 hours, 10 MW burst in the middle, lossless storage.

    The projected set at sigma=0 is {F >= 5, p + F >= 10, e + F >= 10}
    intersected with the init simplex (hand-checkable).
    """
    scenarios = ScenarioSet.uniform(np.array([[0.0, 10.0, 0.0]]))
    storage = StorageSpec(eta_c=1.0, eta_d=1.0, alpha_l=0.0, alpha_h=1.0)
    return {
        "scenarios": scenarios,
        "storage": storage,
        "ambiguity": AmbiguitySet(gamma, scenarios.rho0),
        "sigma": sigma,
        "costs": CostVector(1.0, 1.2, 11.0),
        "budget": Budget(200.0),
    }


def random_instance(seed, sigma=0.0, gamma=0.0):
    """Small random instance (N <= 3, T <= 6) with gamma < min rho0."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    t = int(rng.integers(2, 7))
    p_r = rng.uniform(0.0, 20.0, size=(n, t))
    p_r[rng.uniform(size=(n, t)) < 0.3] = 0.0  # night hours
    scenarios = ScenarioSet.uniform(p_r)
    storage = StorageSpec(
        eta_c=float(rng.uniform(0.85, 1.0)),
        eta_d=float(rng.uniform(0.85, 1.0)),
        alpha_l=float(rng.uniform(0.0, 0.3)),
        alpha_h=float(rng.uniform(0.7, 1.0)),
    )
    costs = CostVector(1.0, float(rng.uniform(0.5, 2.0)), float(rng.uniform(2, 15)))
    # budget generous enough that the simplex contains the whole envelope
    budget = Budget(float(costs.c_l * 4 * p_r.max() + 100.0))
    return {
        "scenarios": scenarios,
        "storage": storage,
        "ambiguity": AmbiguitySet(gamma, scenarios.rho0),
        "sigma": sigma,
        "costs": costs,
        "budget": budget,
    }


def compile_instance(inst, mode=ParameterMode.CAPACITIES):
    return compile_polyhedron(
        inst["scenarios"], inst["storage"], inst["ambiguity"], inst["sigma"],
        inst["costs"], inst["budget"], mode=mode,
    )


def project_instance(inst, **opt_kwargs):
    compiled = compile_instance(inst)
    options = ProjectionOptions(**opt_kwargs) if opt_kwargs else None
    return compiled, project(compiled, inst["costs"], inst["budget"],
                             options=options)


def sample_agreement(compiled, theta_set, init_set, n_samples, rng, band=1e-4):
    """Compare set membership with the feasibility oracle on samples.

    Returns (checked, soundness_violations, tightness_violations) where a
    soundness violation is a contained-but-infeasible point and a
    tightness violation an excluded-but-feasible one; points within the
    relative band of any facet are skipped.
    """
    checked = unsound = untight = 0
    for _ in range(n_samples):
        point = rng.uniform(0.0, 1.0, size=theta_set.dim) * init_set.scale
        if not polytope.contains(init_set, point):
            continue
        if any(
            abs(h.a @ point - h.b) <= band * (1.0 + abs(h.b))
            for h in theta_set.halfspaces
        ):
            continue
        member = polytope.contains(theta_set, point)
        verdict = feasibility_oracle(compiled, point)
        assert verdict is not OracleVerdict.SOLVER_FAILURE
        feasible = verdict is OracleVerdict.FEASIBLE
        checked += 1
        if member and not feasible:
            unsound += 1
        elif feasible and not member:
            untight += 1
    return checked, unsound, untight
