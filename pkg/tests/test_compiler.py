import numpy as np
import pytest

from solarcap.compiler import (
    OracleVerdict,
    ParameterMode,
    compile_polyhedron,
    dump_triplets,
    extract_operation_point,
    feasibility_oracle,
    schedule_to_x,
    x_to_schedule,
)
from solarcap.model import (
    AmbiguitySet,
    CapacityPoint,
    DispatchSchedule,
    DualCertificate,
    ScenarioSet,
    StorageSpec,
    validate_schedule,
    worst_case_probabilities,
)

from conftest import canonical_instance, compile_instance, random_instance


class TestShapes:
    def test_column_count_formula(self):
        compiled = compile_instance(canonical_instance())
        # per day: 4T flows + (T+1) SoC; plus mu+-, lambda
        assert compiled.n_x == 1 * (5 * 3 + 1) + 2 * 1 + 1 == 19
        assert compiled.theta_dim == 3

    def test_tradeoff_adds_capacity_columns(self):
        inst = canonical_instance()
        compiled = compile_polyhedron(
            inst["scenarios"], inst["storage"], inst["ambiguity"], None,
            inst["costs"], None, mode=ParameterMode.TRADEOFF,
        )
        assert compiled.n_x == 19 + 3
        assert compiled.theta_dim == 2

    def test_row_labels_cover_all_rows(self):
        compiled = compile_instance(canonical_instance())
        assert len(compiled.row_labels) == compiled.n_rows
        assert len(set(compiled.row_labels)) == compiled.n_rows

    def test_zero_size_rejected(self):
        with pytest.raises(ValueError):
            ScenarioSet.uniform(np.empty((0, 3)))

    def test_row_scaling_bounds_coefficients(self):
        compiled = compile_instance(random_instance(3, sigma=0.05, gamma=0.05))
        joint = np.hstack([compiled.a_mat.toarray(), compiled.b_mat])
        assert np.abs(joint).max() <= 1.0 + 1e-12


class TestScheduleRoundTrip:
    def test_canonical_schedule_maps_into_polyhedron(self):
        inst = canonical_instance()
        compiled = compile_instance(inst)
        sched = DispatchSchedule(
            p_rs=np.array([[0.0, 5.0, 0.0]]),
            p_sg=np.array([[0.0, 0.0, 5.0]]),
            p_rg=np.array([[0.0, 5.0, 0.0]]),
            dp_r=np.zeros((1, 3)),
            e=np.array([[0.0, 0.0, 5.0, 0.0]]),
        )
        cert = DualCertificate(np.zeros(1), np.zeros(1), 0.0)
        x = schedule_to_x(compiled, sched, cert)
        theta = np.array([5.0, 5.0, 5.0])
        resid = compiled.a_mat @ x + compiled.b_mat @ theta - compiled.b_vec
        assert resid.max() <= 1e-9

    @pytest.mark.parametrize("seed", range(6))
    def test_roundtrip_random(self, seed):
        inst = random_instance(seed)
        compiled = compile_instance(inst)
        rng = np.random.default_rng(seed)
        x = rng.normal(size=compiled.n_x)
        sched, cert = x_to_schedule(compiled, x)
        back = schedule_to_x(compiled, sched, cert)
        np.testing.assert_array_equal(x, back)

    @pytest.mark.parametrize("seed", range(4))
    def test_extracted_x_validates(self, seed):
        """Both directions: a polyhedron point passes the schedule
        validator, and its repacking satisfies the rows."""
        inst = random_instance(seed, sigma=0.1, gamma=0.0)
        compiled = compile_instance(inst)
        pmax = inst["scenarios"].p_r.max()
        theta = np.array([2 * pmax, 8 * pmax, 2 * pmax])
        x = extract_operation_point(compiled, theta)
        assert x is not None
        sched, cert = x_to_schedule(compiled, x)
        report = validate_schedule(
            sched, CapacityPoint(*theta), inst["scenarios"], inst["storage"],
            inst["sigma"], inst["ambiguity"], tol=1e-5,
        )
        assert report.valid, report.violations


class TestOracle:
    def test_canonical_verdicts(self):
        compiled = compile_instance(canonical_instance())
        assert feasibility_oracle(compiled, [5, 5, 5]) is OracleVerdict.FEASIBLE
        assert feasibility_oracle(compiled, [0, 0, 5]) is OracleVerdict.INFEASIBLE

    def test_full_spillage_always_feasible(self):
        compiled = compile_instance(canonical_instance(sigma=1.0))
        assert feasibility_oracle(compiled, [0, 0, 0]) is OracleVerdict.FEASIBLE

    def test_dimension_guard(self):
        compiled = compile_instance(canonical_instance())
        with pytest.raises(ValueError):
            feasibility_oracle(compiled, [1.0, 2.0])

    def test_backends_agree(self):
        compiled = compile_instance(canonical_instance())
        for theta in ([5, 5, 5], [0, 0, 5], [4, 4, 6], [0, 10, 5]):
            v1 = feasibility_oracle(compiled, theta, backend="scipy")
            v2 = feasibility_oracle(compiled, theta, backend="simplex")
            assert v1 is v2


class TestGammaZeroReduction:
    def test_matches_deterministic_variant_on_grid(self):
        """With gamma=0 the robust rows collapse to the single expected
        spillage constraint; compare against an explicit deterministic
        oracle on a grid."""
        inst = canonical_instance(sigma=0.1)
        compiled = compile_instance(inst)
        scen = inst["scenarios"]

        def deterministic_feasible(theta):
            # brute force: the single day must ship all but sigma of the
            # 10 MWh burst through line/storage
            from scipy.optimize import linprog

            p, e_m, f = theta
            t = 3
            # vars: p_rs, p_sg, p_rg, dp (each t), e (t+1)
            nv = 4 * t + (t + 1)
            a_eq, b_eq, a_ub, b_ub = [], [], [], []
            for j in range(t):
                row = np.zeros(nv)
                row[3 * t + j] = 1.0  # dp
                row[j] = 1.0  # p_rs
                row[2 * t + j] = 1.0  # p_rg
                a_eq.append(row)
                b_eq.append(scen.p_r[0, j])
                row = np.zeros(nv)
                row[4 * t + j + 1] = 1.0
                row[4 * t + j] = -1.0
                row[j] = -1.0
                row[t + j] = 1.0
                a_eq.append(row)
                b_eq.append(0.0)
                row = np.zeros(nv)
                row[j] = 1.0
                row[t + j] = 1.0
                a_ub.append(row)
                b_ub.append(p)
                row = np.zeros(nv)
                row[t + j] = 1.0
                row[2 * t + j] = 1.0
                a_ub.append(row)
                b_ub.append(f)
            row = np.zeros(nv)
            row[3 * t : 4 * t] = 1.0
            a_ub.append(row)
            b_ub.append(0.1 * scen.p_r.sum())
            # anchored cycle at the lower SoC bound (0 here)
            anchor = np.zeros(nv)
            anchor[4 * t] = 1.0
            a_eq.append(anchor)
            b_eq.append(0.0)
            anchor = np.zeros(nv)
            anchor[5 * t] = 1.0
            a_eq.append(anchor)
            b_eq.append(0.0)
            bounds = [(0, None)] * (4 * t) + [(0, e_m)] * (t + 1)
            res = linprog(
                np.zeros(nv), A_ub=np.array(a_ub), b_ub=np.array(b_ub),
                A_eq=np.array(a_eq), b_eq=np.array(b_eq), bounds=bounds,
                method="highs",
            )
            return res.status == 0

        for p in (0.0, 3.0, 6.0):
            for e in (0.0, 4.0, 8.0):
                for f in (2.0, 4.5, 6.0, 10.0):
                    got = feasibility_oracle(compiled, [p, e, f])
                    want = deterministic_feasible((p, e, f))
                    assert (got is OracleVerdict.FEASIBLE) == want, (p, e, f)


class TestMonotonicity:
    @pytest.mark.parametrize("seed", range(4))
    def test_componentwise_monotone(self, seed):
        """Feasibility is preserved when any capacity increases."""
        inst = random_instance(seed, sigma=0.05)
        compiled = compile_instance(inst)
        rng = np.random.default_rng(seed + 77)
        pmax = inst["scenarios"].p_r.max()
        found = 0
        for _ in range(12):
            theta = rng.uniform(0, 2 * pmax, size=3)
            if feasibility_oracle(compiled, theta) is OracleVerdict.FEASIBLE:
                found += 1
                bigger = theta + rng.uniform(0, pmax, size=3)
                assert (
                    feasibility_oracle(compiled, bigger)
                    is OracleVerdict.FEASIBLE
                )
        assert found > 0


def test_dump_triplets(tmp_path):
    compiled = compile_instance(canonical_instance())
    out = tmp_path / "rows.csv"
    dump_triplets(compiled, out)
    text = out.read_text().splitlines()
    assert text[0].split(",")[:3] == ["block", "row", "col"]
    assert len(text) > compiled.n_rows  # at least one entry per row
