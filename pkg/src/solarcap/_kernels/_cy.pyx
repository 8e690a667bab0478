# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def pivot_inplace(double[:, ::1] t, Py_ssize_t pr, Py_ssize_t pc):
    """Gauss-Jordan pivot of a dense C-contiguous tableau on (pr, pc)."""
    cdef Py_ssize_t nrow = t.shape[0]
    cdef Py_ssize_t ncol = t.shape[1]
    cdef double piv = t[pr, pc]
    cdef Py_ssize_t i, j
    cdef double f
    for j in range(ncol):
        t[pr, j] /= piv
    for i in range(nrow):
        if i == pr:
            continue
        f = t[i, pc]
        if f == 0.0:
            continue
        for j in range(ncol):
            t[i, j] -= f * t[pr, j]
    for i in range(nrow):
        t[i, pc] = 0.0
    t[pr, pc] = 1.0


def ratio_test(double[:] col, double[:] rhs, double[:] ub_basis,
               Py_ssize_t[:] basis, double tol, double tie):
    """Bounded-variable simplex ratio test over the tableau rows.

    Same contract as the pure-numpy fallback: returns (row, t) with the
    blocking row and its step length, or (-1, inf) when no row blocks;
    ties within `tie` break to the smallest basic variable index.
    """
    cdef Py_ssize_t m = col.shape[0]
    cdef Py_ssize_t i, row = -1
    cdef double ci, ti, t_min = float("inf")
    cdef double INF = float("inf")
    for i in range(m):
        ci = col[i]
        if ci > tol:
            ti = rhs[i]
            if ti < 0.0:
                ti = 0.0
            ti = ti / ci
        elif ci < -tol and ub_basis[i] != INF:
            ti = ub_basis[i] - rhs[i]
            if ti < 0.0:
                ti = 0.0
            ti = ti / (-ci)
        else:
            continue
        if ti < t_min:
            t_min = ti
    if t_min == INF:
        return -1, INF
    # second pass: smallest basis index among the near-ties
    cdef Py_ssize_t best = -1
    cdef double t_best = INF
    for i in range(m):
        ci = col[i]
        if ci > tol:
            ti = rhs[i]
            if ti < 0.0:
                ti = 0.0
            ti = ti / ci
        elif ci < -tol and ub_basis[i] != INF:
            ti = ub_basis[i] - rhs[i]
            if ti < 0.0:
                ti = 0.0
            ti = ti / (-ci)
        else:
            continue
        if ti <= t_min + tie and (best == -1 or basis[i] < basis[best]):
            best = i
            t_best = ti
    return best, t_best


def enumerate_candidates(normals, offsets, slack):
    """Intersection points of dim-subsets of halfspace boundaries that
    satisfy every halfspace within the per-row slack.

    Same contract as the pure-numpy fallback.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(
        normals, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = np.ascontiguousarray(
        offsets, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lim = np.ascontiguousarray(
        np.asarray(offsets, dtype=np.float64) + np.asarray(slack, dtype=np.float64))
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t dim = a.shape[1]
    if m < dim or (dim != 2 and dim != 3):
        if m < dim:
            return np.empty((0, dim))
        raise ValueError("dim must be 2 or 3")
    out = []
    cdef double[:, ::1] av = a
    cdef double[::1] bv = b
    cdef double[::1] lv = lim
    cdef Py_ssize_t i, j, k, r
    cdef double det, scale, x, y, z, lhs
    cdef double a00, a01, a02, a10, a11, a12, a20, a21, a22, b0, b1, b2
    cdef double c00, c01, c02
    cdef bint ok
    if dim == 2:
        for i in range(m):
            for j in range(i + 1, m):
                a00 = av[i, 0]; a01 = av[i, 1]
                a10 = av[j, 0]; a11 = av[j, 1]
                det = a00 * a11 - a01 * a10
                scale = max(max(abs(a00), abs(a01)), max(abs(a10), abs(a11)))
                if abs(det) <= 1e-10 * scale * scale + 1e-300:
                    continue
                b0 = bv[i]; b1 = bv[j]
                x = (b0 * a11 - b1 * a01) / det
                y = (a00 * b1 - a10 * b0) / det
                ok = True
                for r in range(m):
                    lhs = av[r, 0] * x + av[r, 1] * y
                    if lhs > lv[r]:
                        ok = False
                        break
                if ok:
                    out.append((x, y))
        if not out:
            return np.empty((0, 2))
        return np.asarray(out, dtype=np.float64)
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                a00 = av[i, 0]; a01 = av[i, 1]; a02 = av[i, 2]
                a10 = av[j, 0]; a11 = av[j, 1]; a12 = av[j, 2]
                a20 = av[k, 0]; a21 = av[k, 1]; a22 = av[k, 2]
                c00 = a11 * a22 - a12 * a21
                c01 = a12 * a20 - a10 * a22
                c02 = a10 * a21 - a11 * a20
                det = a00 * c00 + a01 * c01 + a02 * c02
                scale = max(max(abs(a00), abs(a01)), abs(a02))
                scale = max(scale, max(max(abs(a10), abs(a11)), abs(a12)))
                scale = max(scale, max(max(abs(a20), abs(a21)), abs(a22)))
                if abs(det) <= 1e-10 * scale * scale * scale + 1e-300:
                    continue
                b0 = bv[i]; b1 = bv[j]; b2 = bv[k]
                x = (b0 * c00 + b1 * (a02 * a21 - a01 * a22)
                     + b2 * (a01 * a12 - a02 * a11)) / det
                y = (b0 * c01 + b1 * (a00 * a22 - a02 * a20)
                     + b2 * (a02 * a10 - a00 * a12)) / det
                z = (b0 * c02 + b1 * (a01 * a20 - a00 * a21)
                     + b2 * (a00 * a11 - a01 * a10)) / det
                ok = True
                for r in range(m):
                    lhs = av[r, 0] * x + av[r, 1] * y + av[r, 2] * z
                    if lhs > lv[r]:
                        ok = False
                        break
                if ok:
                    out.append((x, y, z))
    if not out:
        return np.empty((0, 3))
    return np.asarray(out, dtype=np.float64)
