"""Low-dimensional (dim <= 3) polytope bookkeeping.

Halfspace sets with cut provenance, combinatorial vertex enumeration,
membership tests, and the visited-vertex registry used by the projection
driver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import enumerate_candidates
from .lp import LinearProgram, LpStatus, solve

DEFAULT_TOL = 1e-7


@dataclass(frozen=True)
class Halfspace:
    """a . theta <= b"""

    a: np.ndarray
    b: float
    provenance: str  # "init_box" | "budget" | "cut:<iteration>"

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if not np.any(a):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class HalfspaceSet:
    dim: int
    halfspaces: tuple
    scale: np.ndarray  # per-axis length scale, typically the init box extents

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("only 2- and 3-dimensional sets are supported")
        scale = np.broadcast_to(
            np.asarray(self.scale, dtype=float), (self.dim,)
        ).copy()
        if np.any(scale <= 0):
            raise ValueError("axis scales must be positive")
        object.__setattr__(self, "scale", scale)
        for h in self.halfspaces:
            if h.a.shape != (self.dim,):
                raise ValueError("halfspace dimension mismatch")

    def normals(self) -> np.ndarray:
        return np.array([h.a for h in self.halfspaces])

    def offsets(self) -> np.ndarray:
        return np.array([h.b for h in self.halfspaces])


@dataclass
class VertexEnumeration:
    vertices: np.ndarray  # (k, dim)
    feasible: bool  # False only when the set is provably empty


class CutStatus:
    ADDED = "added"
    DUPLICATE = "duplicate"


def make_box(lo, hi, provenance: str = "init_box") -> HalfspaceSet:
    """Axis-aligned box as a halfspace set."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    dim = lo.size
    hs = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        hs.append(Halfspace(e.copy(), float(hi[i]), provenance))
        hs.append(Halfspace(-e, float(-lo[i]), provenance))
    return HalfspaceSet(dim, tuple(hs), scale=hi - lo)


def dedup_key(point: np.ndarray, scale: np.ndarray) -> tuple:
    """Rounding key used for vertex dedup and visited bookkeeping."""
    q = DEFAULT_TOL * np.maximum(np.asarray(scale, dtype=float), 1e-30)
    return tuple(int(round(c / qi)) for c, qi in zip(point, q))


@dataclass
class VertexRegistry:
    """Visited flags keyed on rounded vertex coordinates."""

    scale: np.ndarray
    visited: dict = field(default_factory=dict)

    def seen(self, point) -> bool:
        return dedup_key(np.asarray(point, dtype=float), self.scale) in self.visited

    def mark(self, point, payload=None) -> None:
        self.visited[dedup_key(np.asarray(point, dtype=float), self.scale)] = payload

    def get(self, point):
        return self.visited[dedup_key(np.asarray(point, dtype=float), self.scale)]


def _is_empty_lp(hs: HalfspaceSet) -> bool:
    """LP emptiness check for degenerate cases without vertices."""
    a = hs.normals()
    b = hs.offsets()
    m, dim = a.shape
    # A theta + s = b with slack s >= 0; theta free
    eq = np.hstack([a, np.eye(m)])
    lb = np.concatenate([np.full(dim, -np.inf), np.zeros(m)])
    ub = np.full(dim + m, np.inf)
    sol = solve(
        LinearProgram("min", np.zeros(dim + m), eq, b, lb, ub), backend="scipy"
    )
    return sol.status is LpStatus.INFEASIBLE


def enumerate_vertices(
    hs: HalfspaceSet, tol: float = DEFAULT_TOL
) -> VertexEnumeration:
    """All vertices of the halfspace intersection, deduplicated.

    Every dim-subset of facets is intersected; points violating any
    halfspace beyond a relative tolerance are dropped. An empty vertex
    list with feasible=True means the set is degenerate (lower
    dimensional or unbounded without corners), not empty.
    """
    a = hs.normals()
    b = hs.offsets()
    if a.shape[0] < hs.dim:
        return VertexEnumeration(
            np.empty((0, hs.dim)), feasible=not _is_empty_lp(hs)
        )
    # slack scales with both the offset and the geometry scale
    slack = tol * (1.0 + np.abs(b) + np.abs(a) @ hs.scale)
    pts = enumerate_candidates(a, b, slack)
    if pts.shape[0] == 0:
        return VertexEnumeration(
            np.empty((0, hs.dim)), feasible=not _is_empty_lp(hs)
        )
    seen = {}
    for p in pts:
        k = dedup_key(p, hs.scale)
        if k not in seen:
            seen[k] = p
    verts = np.array(sorted(seen.values(), key=tuple))
    return VertexEnumeration(verts, feasible=True)


def contains(hs: HalfspaceSet, theta, tol: float = 1e-6) -> bool:
    """Membership with relative slack per halfspace."""
    theta = np.asarray(theta, dtype=float)
    for h in hs.halfspaces:
        if h.a @ theta > h.b + tol * (1.0 + abs(h.b)):
            return False
    return True


def add_cut(
    hs: HalfspaceSet,
    gamma: np.ndarray,
    b_vec: np.ndarray,
    b_mat: np.ndarray,
    provenance: str = "cut",
) -> tuple[HalfspaceSet, str]:
    """Append the separating halfspace -(gamma.B) theta <= -gamma.b.

    gamma must be normalized upstream so max|B^T gamma| = 1. Near
    duplicates of an existing halfspace are rejected (they signal a
    stalled driver) and reported via the status.
    """
    gamma = np.asarray(gamma, dtype=float)
    normal = -(gamma @ b_mat)
    offset = float(-(gamma @ b_vec))
    norm = np.abs(normal).max()
    if not (abs(norm - 1.0) < 1e-6):
        raise ValueError("cut normal must be normalized to unit max-abs")
    for h in hs.halfspaces:
        if (
            np.abs(h.a - normal).max() <= 1e-9
            and abs(h.b - offset) <= 1e-9 * (1.0 + abs(h.b))
        ):
            return hs, CutStatus.DUPLICATE
    new = HalfspaceSet(
        hs.dim,
        hs.halfspaces + (Halfspace(normal, offset, provenance),),
        hs.scale,
    )
    return new, CutStatus.ADDED
