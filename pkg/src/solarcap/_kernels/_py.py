"""Pure-numpy implementations of the hot kernels."""

from itertools import combinations

import numpy as np

_CHUNK = 65536


def pivot_inplace(tableau: np.ndarray, pr: int, pc: int) -> None:
    """Gauss-Jordan pivot of a dense tableau on (pr, pc), in place."""
    row = tableau[pr]
    row /= row[pc]
    col = tableau[:, pc].copy()
    col[pr] = 0.0
    tableau -= np.outer(col, row)
    # kill round-off in the pivot column
    tableau[:, pc] = 0.0
    tableau[pr, pc] = 1.0


def ratio_test(col, rhs, ub_basis, basis, tol, tie):
    """Bounded-variable simplex ratio test over the tableau rows.

    col: entering column; rhs: current basic values; ub_basis: upper
    bounds of the basic variables (inf allowed); basis: basic variable
    indices for deterministic tie-breaking.  Returns (row, t) with the
    blocking row and its step length, or (-1, inf) when no row blocks.
    """
    col = np.asarray(col)
    rhs = np.asarray(rhs)
    ub_basis = np.asarray(ub_basis)
    m = col.shape[0]
    t = np.full(m, np.inf)
    pos = col > tol
    if pos.any():
        t[pos] = np.maximum(rhs[pos], 0.0) / col[pos]
    neg = (col < -tol) & np.isfinite(ub_basis)
    if neg.any():
        t[neg] = np.maximum(ub_basis[neg] - rhs[neg], 0.0) / (-col[neg])
    t_min = t.min() if m else np.inf
    if not np.isfinite(t_min):
        return -1, np.inf
    tied = np.where(t <= t_min + tie)[0]
    row = int(tied[np.argmin(np.asarray(basis)[tied])])
    return row, float(t[row])


def _solve_subsets(normals: np.ndarray, offsets: np.ndarray, idx: np.ndarray):
    """Solve the square systems for each row subset via Cramer's rule.

    Returns (points, ok) where ok flags nonsingular subsets.
    """
    dim = idx.shape[1]
    a = normals[idx]  # (k, dim, dim)
    b = offsets[idx]  # (k, dim)
    if dim == 2:
        det = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
        scale = np.abs(a).max(axis=(1, 2)) ** 2 + 1e-300
        ok = np.abs(det) > 1e-10 * scale
        d = np.where(ok, det, 1.0)
        x = (b[:, 0] * a[:, 1, 1] - b[:, 1] * a[:, 0, 1]) / d
        y = (a[:, 0, 0] * b[:, 1] - a[:, 1, 0] * b[:, 0]) / d
        return np.stack([x, y], axis=1), ok
    # dim == 3
    c00 = a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1]
    c01 = a[:, 1, 2] * a[:, 2, 0] - a[:, 1, 0] * a[:, 2, 2]
    c02 = a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0]
    det = a[:, 0, 0] * c00 + a[:, 0, 1] * c01 + a[:, 0, 2] * c02
    scale = np.abs(a).max(axis=(1, 2)) ** 3 + 1e-300
    ok = np.abs(det) > 1e-10 * scale
    d = np.where(ok, det, 1.0)
    # columns of the adjugate, applied to b
    x = (
        b[:, 0] * c00
        + b[:, 1] * (a[:, 0, 2] * a[:, 2, 1] - a[:, 0, 1] * a[:, 2, 2])
        + b[:, 2] * (a[:, 0, 1] * a[:, 1, 2] - a[:, 0, 2] * a[:, 1, 1])
    ) / d
    y = (
        b[:, 0] * c01
        + b[:, 1] * (a[:, 0, 0] * a[:, 2, 2] - a[:, 0, 2] * a[:, 2, 0])
        + b[:, 2] * (a[:, 0, 2] * a[:, 1, 0] - a[:, 0, 0] * a[:, 1, 2])
    ) / d
    z = (
        b[:, 0] * c02
        + b[:, 1] * (a[:, 0, 1] * a[:, 2, 0] - a[:, 0, 0] * a[:, 2, 1])
        + b[:, 2] * (a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0])
    ) / d
    return np.stack([x, y, z], axis=1), ok


def enumerate_candidates(
    normals: np.ndarray, offsets: np.ndarray, slack: np.ndarray
) -> np.ndarray:
    """Intersection points of dim-subsets of halfspace boundaries that
    satisfy every halfspace within the per-row slack.

    normals: (m, dim) with dim in {2, 3}; offsets: (m,); slack: (m,).
    Returns a (k, dim) array of candidate vertices (may contain duplicates).
    """
    normals = np.ascontiguousarray(normals, dtype=float)
    offsets = np.ascontiguousarray(offsets, dtype=float)
    m, dim = normals.shape
    if m < dim:
        return np.empty((0, dim))
    combos = np.fromiter(
        (i for c in combinations(range(m), dim) for i in c), dtype=np.intp
    ).reshape(-1, dim)
    limit = offsets + slack
    found = []
    for start in range(0, combos.shape[0], _CHUNK):
        idx = combos[start : start + _CHUNK]
        pts, ok = _solve_subsets(normals, offsets, idx)
        pts = pts[ok]
        if pts.size == 0:
            continue
        sat = np.all(pts @ normals.T <= limit[None, :], axis=1)
        if np.any(sat):
            found.append(pts[sat])
    if not found:
        return np.empty((0, dim))
    return np.vstack(found)
