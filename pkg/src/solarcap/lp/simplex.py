"""Self-contained bounded-variable tableau simplex.

Reference backend: dense, two-phase, deterministic. Upper bounds are
handled by the flip substitution x -> u - x so every nonbasic variable
sits at zero; Dantzig pricing switches to Bland's rule after a run of
degenerate steps to prevent cycling. Intended for the small/medium LPs
in this package; large instances go through the scipy adapter.
"""

from __future__ import annotations

import numpy as np

from .._kernels import pivot_inplace, ratio_test

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical_failure"

_TOL = 1e-9
_TIE = 1e-12
_DEGEN_SWITCH = 60  # degenerate steps before switching to Bland's rule


def solve_bounded(c, a_mat, b_vec, lb, ub, max_iter=None):
    """min c.x  s.t.  a_mat x = b_vec,  lb <= x <= ub.

    Infinite bounds allowed. Returns (status, x).
    """
    c0 = np.asarray(c, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    n0 = c0.size
    if np.any(lb > ub + _TOL):
        return INFEASIBLE, None
    a = np.asarray(a_mat, dtype=float).reshape(-1, n0).copy()
    b = np.asarray(b_vec, dtype=float).copy()
    m = a.shape[0]
    if m == 0:
        x = np.where(
            c0 > 0, lb, np.where(c0 < 0, ub, np.where(np.isfinite(lb), lb, 0.0))
        )
        if not np.all(np.isfinite(x[c0 != 0])):
            return UNBOUNDED, None
        return OPTIMAL, np.where(np.isfinite(x), x, 0.0)

    c = c0.copy()
    lo = lb.copy()
    hi = ub.copy()
    # mirror variables bounded above only: x = ub - y with y >= 0
    mirror = np.isinf(lb) & np.isfinite(ub)
    if np.any(mirror):
        b = b - a[:, mirror] @ ub[mirror]
        a[:, mirror] *= -1.0
        c[mirror] *= -1.0
        lo[mirror], hi[mirror] = 0.0, np.inf
    # split fully free variables: x = y_pos - y_neg
    free = np.isinf(lo) & np.isinf(hi)
    n_free = int(free.sum())
    if n_free:
        a = np.hstack([a, -a[:, free]])
        c = np.concatenate([c, -c[free]])
        lo = np.concatenate([lo, np.zeros(n_free)])
        hi = np.concatenate([hi, np.full(n_free, np.inf)])
        lo[np.where(free)[0]] = 0.0
    # shift so every lower bound is zero
    shift = lo  # all finite now
    b = b - a @ shift
    u = hi - shift

    status, y = _two_phase(c, a, b, u, max_iter)
    if status != OPTIMAL:
        return status, None
    y = y + shift
    x = y[:n0].copy()
    if n_free:
        x[free] = y[:n0][free] - y[n0:]
    if np.any(mirror):
        x[mirror] = ub[mirror] - x[mirror]
    return OPTIMAL, x


def _two_phase(c, a, b, u, max_iter):
    """Core simplex on: min c.y, a y = b, 0 <= y <= u (u may be inf)."""
    m, n = a.shape
    if max_iter is None:
        max_iter = 200 * (m + n) + 2000
    # orient rows so rhs >= 0, then append artificial variables
    sign = np.where(b < 0, -1.0, 1.0)
    a = a * sign[:, None]
    b = b * sign
    ntot = n + m
    tab = np.zeros((m + 1, ntot + 1))
    tab[:m, :n] = a
    tab[:m, n:ntot] = np.eye(m)
    tab[:m, -1] = b
    basis = np.arange(n, ntot)
    flipped = np.zeros(ntot, dtype=bool)
    in_basis = np.zeros(ntot, dtype=bool)
    in_basis[basis] = True
    bscale = 1.0 + (np.abs(b).max() if m else 0.0)

    # phase 1: minimize the sum of artificials
    u1 = np.concatenate([u, np.full(m, np.inf)])
    tab[m, :ntot] = 0.0
    tab[m, n:ntot] = 1.0
    tab[m, :] -= tab[:m, :].sum(axis=0)  # price out the basic artificials
    st = _iterate(tab, basis, u1, flipped, in_basis, ntot, max_iter)
    if st != OPTIMAL:
        return NUMERICAL_FAILURE, None
    art = basis >= n
    if art.any() and tab[:m, -1][art].sum() > 1e-7 * bscale:
        return INFEASIBLE, None

    # phase 2: true costs; artificials frozen (not enterable, ub 0)
    u2 = np.concatenate([u, np.zeros(m)])
    ceff = np.where(flipped[:n], -c, c)
    tab[m, :] = 0.0
    tab[m, :n] = ceff
    for i in range(m):
        cb = tab[m, basis[i]]
        if cb != 0.0:
            tab[m, :] -= cb * tab[i, :]
    st = _iterate(tab, basis, u2, flipped, in_basis, n, max_iter)
    if st != OPTIMAL:
        return st, None

    y = np.zeros(ntot)
    y[basis] = tab[:m, -1]
    ufin = np.where(np.isfinite(u2), u2, 0.0)
    y = np.where(flipped, ufin - y, y)
    return OPTIMAL, y[:n]


def _iterate(tab, basis, u, flipped, in_basis, n_enterable, max_iter):
    m = tab.shape[0] - 1
    degen = 0
    for _ in range(max_iter):
        d = tab[m, :n_enterable]
        cand = np.where(~in_basis[:n_enterable] & (d < -_TOL))[0]
        if cand.size == 0:
            return OPTIMAL
        if degen > _DEGEN_SWITCH:
            j = int(cand[0])  # Bland
        else:
            j = int(cand[np.argmin(d[cand])])  # Dantzig, first on ties
        col = tab[:m, j]
        rhs = tab[:m, -1]
        # ratio test: step to a basic lower bound (col > 0), a basic
        # upper bound (col < 0, finite ub), or flip the entering
        # variable to its own upper bound, whichever binds first;
        # row ties break to the smallest basic variable index
        row, t_row = ratio_test(col, rhs, u[basis], basis, _TOL, _TIE)
        t_enter = u[j] if np.isfinite(u[j]) else np.inf
        if row >= 0 and t_row <= t_enter + _TIE:
            t_best = t_row
            kind = "lower" if col[row] > _TOL else "upper"
        else:
            t_best, kind, row = t_enter, "flip", -1
        if not np.isfinite(t_best):
            return UNBOUNDED
        degen = degen + 1 if t_best <= _TOL else 0
        if kind == "flip":
            # entering variable travels to its upper bound; no basis change
            tab[:, -1] -= u[j] * tab[:, j]
            tab[:, j] *= -1.0
            flipped[j] = ~flipped[j]
            continue
        if kind == "upper":
            # leaving basic hits its upper bound: substitute it first
            k = basis[row]
            tab[row, :] *= -1.0
            tab[row, -1] += u[k]
            tab[row, k] = 1.0  # column and row negation cancel on (row, k)
            flipped[k] = ~flipped[k]
        pivot_inplace(tab, row, j)
        in_basis[basis[row]] = False
        in_basis[j] = True
        basis[row] = j
    return NUMERICAL_FAILURE
