import numpy as np
import pytest

from solarcap import polytope
from solarcap.compiler import ParameterMode, compile_polyhedron
from solarcap.model import Budget, CostVector
from solarcap.projection import (
    CONVERGED,
    EMPTY_SET,
    ProjectionOptions,
    initial_set,
    project,
)

from conftest import (
    canonical_instance,
    compile_instance,
    project_instance,
    random_instance,
    sample_agreement,
)


def _facet_present(theta_set, normal, offset, tol=1e-5):
    """Match a target facet a.theta <= b up to positive rescaling."""
    normal = np.asarray(normal, dtype=float)
    for h in theta_set.halfspaces:
        s = np.abs(h.a).max()
        if (
            np.abs(h.a / s - normal).max() <= tol
            and abs(h.b / s - offset) <= tol * (1 + abs(offset))
        ):
            return True
    return False


class TestInitialSet:
    def test_capacities_simplex(self):
        inst = canonical_instance()
        compiled = compile_instance(inst)
        init = initial_set(compiled, inst["costs"], inst["budget"],
                           ProjectionOptions())
        enum = polytope.enumerate_vertices(init)
        assert enum.vertices.shape == (4, 3)  # origin + 3 budget corners
        xi = inst["budget"].xi_m
        c = inst["costs"].as_array()
        np.testing.assert_allclose(sorted(enum.vertices @ c)[-3:], [xi] * 3)

    def test_tradeoff_box(self):
        inst = canonical_instance()
        compiled = compile_polyhedron(
            inst["scenarios"], inst["storage"], inst["ambiguity"], None,
            inst["costs"], None, mode=ParameterMode.TRADEOFF,
        )
        opts = ProjectionOptions(sigma_box=(0, 1), budget_box=(10.0, 100.0))
        init = initial_set(compiled, None, None, opts)
        enum = polytope.enumerate_vertices(init)
        assert enum.vertices.shape == (4, 2)

    def test_capacities_needs_costs_and_budget(self):
        compiled = compile_instance(canonical_instance())
        with pytest.raises(ValueError):
            initial_set(compiled, None, None, ProjectionOptions())


class TestCanonicalEnvelope:
    def test_exact_facets(self):
        inst = canonical_instance()
        compiled, res = project_instance(inst)
        assert res.status == CONVERGED
        assert _facet_present(res.theta_set, [0, 0, -1], -5.0)  # F >= 5
        assert _facet_present(res.theta_set, [-1, 0, -1], -10.0)  # p+F >= 10
        assert _facet_present(res.theta_set, [0, -1, -1], -10.0)  # e+F >= 10

    def test_membership_examples(self):
        inst = canonical_instance()
        _, res = project_instance(inst)
        assert polytope.contains(res.theta_set, [5, 5, 5])
        assert polytope.contains(res.theta_set, [10, 10, 10])
        assert not polytope.contains(res.theta_set, [0, 0, 5.0 - 1e-3])
        assert not polytope.contains(res.theta_set, [4, 10, 5.9])  # p+F < 10


class TestDegenerateCases:
    def test_sigma_one_no_cuts(self):
        inst = canonical_instance(sigma=1.0)
        compiled, res = project_instance(inst)
        assert res.status == CONVERGED
        assert res.iterations == 1
        assert all(
            h.provenance in ("init_box", "budget")
            for h in res.theta_set.halfspaces
        )

    def test_tiny_budget_empty(self):
        inst = canonical_instance()
        inst["budget"] = Budget(10.0)  # min cost is 66
        compiled, res = project_instance(inst)
        assert res.status == EMPTY_SET

    def test_iteration_cap_reported(self):
        inst = canonical_instance()
        compiled, res = project_instance(inst, max_iterations=2)
        assert res.status == "iteration_limit"
        assert res.iterations == 2


class TestAlgorithmInvariants:
    def test_v_star_nonnegative_and_cuts_exclude_generators(self):
        inst = canonical_instance()
        compiled, res = project_instance(inst)
        assert res.cut_log, "expected at least one cut"
        for rec in res.cut_log:
            assert rec.v_star >= 0.0
            if rec.accepted:
                # the separating halfspace excludes its generating vertex
                assert rec.normal @ rec.vertex > rec.offset - 1e-9

    def test_outer_approximation_soundness_during_run(self):
        """Every interior feasible point stays inside after every cut."""
        inst = canonical_instance()
        compiled, res = project_instance(inst)
        feasible_probes = [(5, 5, 5), (10, 10, 10), (6, 6, 5.5), (0, 0, 10)]
        # rebuild the outer approximation cut by cut
        hs = initial_set(compiled, inst["costs"], inst["budget"],
                         ProjectionOptions())
        for rec in res.cut_log:
            if not rec.accepted:
                continue
            hs = polytope.HalfspaceSet(
                hs.dim,
                hs.halfspaces
                + (polytope.Halfspace(rec.normal, rec.offset, "cut"),),
                hs.scale,
            )
            for p in feasible_probes:
                assert polytope.contains(hs, p)

    def test_deterministic_projection(self):
        inst = canonical_instance()
        _, r1 = project_instance(inst)
        _, r2 = project_instance(inst)
        assert r1.iterations == r2.iterations
        assert r1.vertices.tobytes() == r2.vertices.tobytes()
        for h1, h2 in zip(r1.theta_set.halfspaces, r2.theta_set.halfspaces):
            assert h1.a.tobytes() == h2.a.tobytes() and h1.b == h2.b

    def test_multi_cut_same_set(self):
        inst = canonical_instance()
        _, r1 = project_instance(inst)
        _, r2 = project_instance(inst, multi_cut=True)
        assert r1.status == r2.status == CONVERGED
        assert r2.iterations <= r1.iterations
        k1 = sorted(map(tuple, np.round(r1.vertices, 6)))
        k2 = sorted(map(tuple, np.round(r2.vertices, 6)))
        assert k1 == k2


class TestSampledAgreement:
    @pytest.mark.parametrize("seed", [0, 1])
    def test_small_random_instances(self, seed):
        inst = random_instance(seed, sigma=0.05, gamma=0.0)
        compiled, res = project_instance(inst)
        assert res.status == CONVERGED
        init = initial_set(compiled, inst["costs"], inst["budget"],
                           ProjectionOptions())
        rng = np.random.default_rng(seed + 10)
        checked, unsound, untight = sample_agreement(
            compiled, res.theta_set, init, 80, rng
        )
        assert checked > 0
        assert unsound == 0
        assert untight == 0


class TestMonotonicityInParameters:
    def test_sigma_nesting_canonical(self):
        sets = []
        for sigma in (0.0, 0.05, 0.10):
            _, res = project_instance(canonical_instance(sigma=sigma))
            assert res.status == CONVERGED
            sets.append(res)
        for smaller, larger in zip(sets, sets[1:]):
            for v in smaller.vertices:
                assert polytope.contains(larger.theta_set, v)

    def test_gamma_shrinks_set(self):
        _, loose = project_instance(canonical_instance(sigma=0.2, gamma=0.0))
        _, tight = project_instance(canonical_instance(sigma=0.2, gamma=0.05))
        for v in tight.vertices:
            assert polytope.contains(loose.theta_set, v)
