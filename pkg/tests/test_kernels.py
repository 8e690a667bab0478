import subprocess
import sys

import numpy as np
import pytest

from solarcap import _kernels
from solarcap._kernels import _py


def _impls():
    impls = [("py", _py)]
    if _kernels.HAVE_COMPILED:
        from solarcap._kernels import _cy

        impls.append(("cy", _cy))
    return impls


@pytest.mark.parametrize("name,impl", _impls())
class TestPivot:
    def test_unit_pivot(self, name, impl):
        t = np.eye(3)
        impl.pivot_inplace(t, 0, 0)
        np.testing.assert_allclose(t, np.eye(3))

    def test_matches_manual_elimination(self, name, impl):
        rng = np.random.default_rng(3)
        t = rng.normal(size=(5, 8))
        expected = t.copy()
        expected[2] /= expected[2, 4]
        for i in range(5):
            if i != 2:
                expected[i] -= expected[i, 4] * expected[2]
        impl.pivot_inplace(t, 2, 4)
        np.testing.assert_allclose(t, expected, atol=1e-12)
        # pivot column becomes a unit vector
        np.testing.assert_allclose(t[:, 4], np.eye(5)[2], atol=1e-12)


@pytest.mark.parametrize("name,impl", _impls())
class TestEnumerate:
    def test_unit_cube(self, name, impl):
        a = np.vstack([np.eye(3), -np.eye(3)])
        b = np.array([1.0, 1, 1, 0, 0, 0])
        pts = impl.enumerate_candidates(a, b, np.full(6, 1e-9))
        uniq = {tuple(np.round(p, 9)) for p in pts}
        assert uniq == {
            (x, y, z) for x in (0.0, 1.0) for y in (0.0, 1.0) for z in (0.0, 1.0)
        }

    def test_square_2d(self, name, impl):
        a = np.vstack([np.eye(2), -np.eye(2)])
        b = np.array([2.0, 3, 0, 0])
        pts = impl.enumerate_candidates(a, b, np.full(4, 1e-9))
        uniq = {tuple(np.round(p, 9)) for p in pts}
        assert uniq == {(0.0, 0.0), (2.0, 0.0), (0.0, 3.0), (2.0, 3.0)}

    def test_infeasible_subsets_filtered(self, name, impl):
        # x <= 1, -x <= -2 (empty): intersection points violate a constraint
        a = np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]])
        b = np.array([1.0, -2.0, 1.0, 0.0])
        pts = impl.enumerate_candidates(a, b, np.full(4, 1e-9))
        assert pts.shape[0] == 0


@pytest.mark.parametrize("name,impl", _impls())
class TestRatioTest:
    def test_blocking_lower_bound(self, name, impl):
        col = np.array([2.0, -1.0, 0.0])
        rhs = np.array([4.0, 1.0, 5.0])
        ub = np.array([np.inf, np.inf, np.inf])
        basis = np.arange(3)
        row, t = impl.ratio_test(col, rhs, ub, basis, 1e-9, 1e-12)
        assert row == 0 and t == pytest.approx(2.0)

    def test_blocking_upper_bound(self, name, impl):
        col = np.array([0.5, -2.0])
        rhs = np.array([10.0, 1.0])
        ub = np.array([np.inf, 4.0])
        basis = np.arange(2)
        row, t = impl.ratio_test(col, rhs, ub, basis, 1e-9, 1e-12)
        assert row == 1 and t == pytest.approx(1.5)

    def test_no_blocking_row(self, name, impl):
        col = np.array([-1.0, 0.0])
        rhs = np.array([1.0, 2.0])
        ub = np.array([np.inf, np.inf])
        basis = np.arange(2)
        row, t = impl.ratio_test(col, rhs, ub, basis, 1e-9, 1e-12)
        assert row == -1 and t == np.inf

    def test_tie_breaks_to_smallest_basis_index(self, name, impl):
        col = np.array([1.0, 1.0, 1.0])
        rhs = np.array([3.0, 3.0, 3.0])
        ub = np.full(3, np.inf)
        basis = np.array([7, 2, 5])
        row, t = impl.ratio_test(col, rhs, ub, basis, 1e-9, 1e-12)
        assert row == 1 and t == pytest.approx(3.0)

    def test_negative_rhs_clamped(self, name, impl):
        # slightly infeasible basic value must give a zero-length step
        col = np.array([1.0])
        rhs = np.array([-1e-13])
        row, t = impl.ratio_test(
            col, rhs, np.array([np.inf]), np.arange(1), 1e-9, 1e-12
        )
        assert row == 0 and t == 0.0


def test_ratio_test_impl_agreement_random():
    if not _kernels.HAVE_COMPILED:
        pytest.skip("compiled extension unavailable")
    from solarcap._kernels import _cy

    rng = np.random.default_rng(5)
    for _ in range(300):
        m = int(rng.integers(1, 25))
        col = rng.normal(size=m)
        col[rng.uniform(size=m) < 0.3] = 0.0
        rhs = rng.normal(size=m)
        ub = rng.uniform(0.0, 5.0, size=m)
        ub[rng.uniform(size=m) < 0.5] = np.inf
        basis = rng.permutation(m)
        got_py = _py.ratio_test(col, rhs, ub, basis, 1e-9, 1e-12)
        got_cy = _cy.ratio_test(col, rhs, ub, basis, 1e-9, 1e-12)
        assert got_py == got_cy


def test_impl_agreement_random():
    if not _kernels.HAVE_COMPILED:
        pytest.skip("compiled extension unavailable")
    from solarcap._kernels import _cy

    rng = np.random.default_rng(11)
    for _ in range(20):
        m = int(rng.integers(4, 30))
        dim = int(rng.integers(2, 4))
        normals = rng.normal(size=(m, dim))
        offsets = rng.uniform(0.5, 2.0, size=m)
        a = np.vstack([normals, np.eye(dim), -np.eye(dim)])
        b = np.concatenate([offsets, np.full(2 * dim, 3.0)])
        slack = 1e-9 * (1.0 + np.abs(b))
        p1 = _py.enumerate_candidates(a, b, slack)
        p2 = _cy.enumerate_candidates(a, b, slack)
        k1 = sorted(tuple(np.round(p, 8)) for p in p1)
        k2 = sorted(tuple(np.round(p, 8)) for p in p2)
        assert k1 == k2


def test_pure_env_var_forces_fallback():
    code = (
        "import solarcap._kernels as k; "
        "assert not k.HAVE_COMPILED; "
        "import numpy as np; "
        "t = np.eye(2); k.pivot_inplace(t, 0, 0); "
        "print('ok')"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"SOLARCAP_PURE": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "ok"
