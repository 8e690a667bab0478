"""Domain types and equation-level primitives.

Storage physics, the L-infinity ambiguity set around the empirical day
probabilities, the worst-case spillage oracle, and schedule validation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class InfeasibleAmbiguitySetError(ValueError):
    """The probability box is incompatible with the simplex (no valid rho)."""


class SocBoundary(Enum):
    """End-of-horizon condition on the state of charge of each day.

    PERIODIC anchors the cycle at the lower SoC limit (e[0] = alpha_l*e_m,
    e[T] = e[0]): each day starts with no usable energy carried in and must
    return what it borrows. FREE imposes nothing, which lets the storage
    swallow energy for free at the end of the day. FIXED anchors the cycle
    at a configurable fraction of e_m instead of alpha_l.
    """

    PERIODIC = "periodic"
    FREE = "free"
    FIXED = "fixed"


@dataclass(frozen=True)
class StorageSpec:
    """Battery parameters: efficiencies, SoC window, boundary condition."""

    eta_c: float = 0.95
    eta_d: float = 0.95
    alpha_l: float = 0.25
    alpha_h: float = 0.95
    soc_boundary: SocBoundary = SocBoundary.PERIODIC
    soc_initial_fraction: float | None = None  # only for FIXED

    def __post_init__(self):
        if not (0.0 < self.eta_c <= 1.0):
            raise ValueError(f"eta_c must be in (0,1], got {self.eta_c}")
        if not (0.0 < self.eta_d <= 1.0):
            raise ValueError(f"eta_d must be in (0,1], got {self.eta_d}")
        if not (0.0 <= self.alpha_l < self.alpha_h <= 1.0):
            raise ValueError(
                f"need 0 <= alpha_l < alpha_h <= 1, got "
                f"({self.alpha_l}, {self.alpha_h})"
            )
        if self.alpha_l >= 0.5 or self.alpha_h <= 0.9:
            warnings.warn(
                "SoC window outside the usual alpha_l<0.5 / alpha_h>0.9 range",
                stacklevel=2,
            )
        if self.soc_boundary is SocBoundary.FIXED:
            frac = self.soc_initial_fraction
            if frac is None or not (self.alpha_l <= frac <= self.alpha_h):
                raise ValueError(
                    "fixed SoC boundary needs soc_initial_fraction in "
                    "[alpha_l, alpha_h]"
                )


@dataclass(frozen=True)
class ScenarioSet:
    """N days of T-period solar output with empirical day probabilities."""

    p_r: np.ndarray  # (N, T) MW, >= 0
    rho0: np.ndarray  # (N,) probabilities
    delta_t: float = 1.0  # hours

    def __post_init__(self):
        p_r = np.asarray(self.p_r, dtype=float)
        object.__setattr__(self, "p_r", p_r)
        if p_r.ndim != 2 or p_r.size == 0:
            raise ValueError("p_r must be a nonempty N x T matrix")
        if np.any(p_r < 0):
            raise ValueError("solar output must be nonnegative")
        rho0 = np.asarray(self.rho0, dtype=float)
        object.__setattr__(self, "rho0", rho0)
        if rho0.shape != (p_r.shape[0],):
            raise ValueError("rho0 length must equal the number of days")
        if np.any(rho0 < 0) or abs(rho0.sum() - 1.0) > 1e-9:
            raise ValueError("rho0 must be nonnegative and sum to 1")
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")

    @property
    def n_days(self) -> int:
        return self.p_r.shape[0]

    @property
    def n_periods(self) -> int:
        return self.p_r.shape[1]

    @classmethod
    def uniform(cls, p_r, delta_t: float = 1.0) -> "ScenarioSet":
        p_r = np.asarray(p_r, dtype=float)
        if p_r.ndim != 2 or p_r.size == 0:
            raise ValueError("p_r must be a nonempty N x T matrix")
        n = p_r.shape[0]
        return cls(p_r=p_r, rho0=np.full(n, 1.0 / n), delta_t=delta_t)


@dataclass(frozen=True)
class AmbiguitySet:
    """All probability vectors within L-inf distance gamma of rho0."""

    gamma: float
    rho0: np.ndarray

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        object.__setattr__(self, "rho0", np.asarray(self.rho0, dtype=float))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-day probability bounds, clipped to [0, 1]."""
        lo = np.maximum(self.rho0 - self.gamma, 0.0)
        hi = np.minimum(self.rho0 + self.gamma, 1.0)
        return lo, hi


@dataclass(frozen=True)
class CapacityPoint:
    """theta = (storage power MW, storage energy MWh, line capacity MW)."""

    p_m: float
    e_m: float
    f_m: float

    def __post_init__(self):
        if self.p_m < 0 or self.e_m < 0 or self.f_m < 0:
            raise ValueError("capacities must be nonnegative")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_m, self.e_m, self.f_m], dtype=float)


@dataclass(frozen=True)
class CostVector:
    """Unit capacity costs (converter, battery, line)."""

    c_p: float
    c_e: float
    c_l: float

    def __post_init__(self):
        if min(self.c_p, self.c_e, self.c_l) <= 0:
            # positive costs keep the initial budget polytope bounded
            raise ValueError("all unit costs must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.c_p, self.c_e, self.c_l], dtype=float)


@dataclass(frozen=True)
class Budget:
    xi_m: float

    def __post_init__(self):
        if self.xi_m <= 0:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class DispatchSchedule:
    """Per-(day, period) flows and the SoC trajectory.

    p_rs: solar -> storage, p_sg: storage -> grid, p_rg: solar -> grid,
    dp_r: curtailed solar; all (N, T) in MW. e is (N, T+1) in MWh.
    """

    p_rs: np.ndarray
    p_sg: np.ndarray
    p_rg: np.ndarray
    dp_r: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        mats = {k: np.asarray(getattr(self, k), dtype=float)
                for k in ("p_rs", "p_sg", "p_rg", "dp_r", "e")}
        for k, v in mats.items():
            object.__setattr__(self, k, v)
        n, t = mats["p_rs"].shape
        for k in ("p_sg", "p_rg", "dp_r"):
            if mats[k].shape != (n, t):
                raise ValueError(f"{k} shape mismatch")
        if mats["e"].shape != (n, t + 1):
            raise ValueError("e must be N x (T+1)")


@dataclass(frozen=True)
class DualCertificate:
    """Multipliers (mu_plus >= 0, mu_minus <= 0, lambda) for the robust cap."""

    mu_plus: np.ndarray
    mu_minus: np.ndarray
    lam: float


@dataclass
class Violation:
    constraint: str
    where: tuple
    magnitude: float


@dataclass
class ValidationReport:
    valid: bool
    violations: list[Violation] = field(default_factory=list)


def compute_gamma(n_days: int, beta: float) -> float:
    """Ambiguity radius giving confidence beta that the true distribution
    lies in the set: (1/2N) * ln(2N / (1 - beta))."""
    if n_days < 1:
        raise ValueError("n_days must be >= 1")
    if not (0.0 < beta < 1.0):
        raise ValueError("beta must be in (0,1)")
    n = float(n_days)
    return math.log(2.0 * n / (1.0 - beta)) / (2.0 * n)


def worst_case_probabilities(d: np.ndarray, ambiguity: AmbiguitySet) -> np.ndarray:
    """Distribution in the ambiguity set maximizing rho . d.

    Greedy fractional-knapsack: start every day at its lower bound and pour
    the remaining mass into days in decreasing order of d.
    """
    d = np.asarray(d, dtype=float)
    lo, hi = ambiguity.bounds()
    if d.shape != lo.shape:
        raise ValueError("value vector length must equal the number of days")
    lo_sum, hi_sum = lo.sum(), hi.sum()
    if lo_sum > 1.0 + 1e-9 or hi_sum < 1.0 - 1e-9:
        raise InfeasibleAmbiguitySetError(
            f"probability box incompatible with the simplex "
            f"(sum lo={lo_sum:.6g}, sum hi={hi_sum:.6g})"
        )
    rho = lo.copy()
    remaining = 1.0 - lo_sum
    # stable sort keeps the result deterministic under ties
    for n in sorted(range(d.size), key=lambda i: (-d[i], i)):
        if remaining <= 0:
            break
        take = min(hi[n] - lo[n], remaining)
        rho[n] += take
        remaining -= take
    return rho


def worst_case_spillage(
    schedule: DispatchSchedule,
    scenarios: ScenarioSet,
    sigma: float,
    ambiguity: AmbiguitySet,
) -> float:
    """Worst case over the ambiguity set of sum_n rho_n sum_t (dp_r - sigma p_r).

    A result <= 0 certifies the robust spillage cap.
    """
    if schedule.dp_r.shape != scenarios.p_r.shape:
        raise ValueError("schedule dimensions do not match the scenario set")
    d = (schedule.dp_r - sigma * scenarios.p_r).sum(axis=1)
    rho = worst_case_probabilities(d, ambiguity)
    return float(rho @ d)


def realize_schedule(
    p_c: float, p_d: float, p_m: float, delta_t: float = 1.0
) -> tuple[float, float, float, float]:
    """Split a period into physical charge/discharge intervals.

    Returns (interval_c, interval_d, power_c, power_d) with both physical
    powers pinned at p_m, so interval_c + interval_d <= delta_t whenever
    p_c + p_d <= p_m.
    """
    if p_c < 0 or p_d < 0:
        raise ValueError("average powers must be nonnegative")
    if p_m <= 0:
        raise ValueError("p_m must be positive")
    if p_c + p_d > p_m * (1 + 1e-12):
        raise ValueError("p_c + p_d exceeds the storage power capacity")
    return p_c * delta_t / p_m, p_d * delta_t / p_m, p_m, p_m


def validate_schedule(
    schedule: DispatchSchedule,
    theta: CapacityPoint,
    scenarios: ScenarioSet,
    storage: StorageSpec,
    sigma: float,
    ambiguity: AmbiguitySet,
    tol: float = 1e-6,
) -> ValidationReport:
    """Check every operation constraint and the robust spillage cap.

    Returns all violated rows with magnitudes; an empty list means the
    schedule is feasible for capacities theta.
    """
    n, t = scenarios.n_days, scenarios.n_periods
    if schedule.p_rs.shape != (n, t):
        raise ValueError("schedule dimensions do not match the scenario set")
    out: list[Violation] = []
    dt = scenarios.delta_t

    def check(name, where, value):
        # convention: value > tol means violated by `value`
        if value > tol:
            out.append(Violation(name, where, float(value)))

    e = schedule.e
    for i in range(n):
        for j in range(t):
            resid = abs(
                e[i, j + 1]
                - e[i, j]
                - storage.eta_c * schedule.p_rs[i, j] * dt
                + schedule.p_sg[i, j] * dt / storage.eta_d
            )
            check("soc_dynamics", (i, j), resid)
        if storage.soc_boundary is not SocBoundary.FREE:
            frac = (
                storage.alpha_l
                if storage.soc_boundary is SocBoundary.PERIODIC
                else storage.soc_initial_fraction
            )
            lvl = frac * theta.e_m
            check("soc_boundary", (i,), abs(e[i, 0] - lvl))
            check("soc_boundary", (i,), abs(e[i, t] - lvl))
    for i in range(n):
        for j in range(t + 1):
            check("soc_lower", (i, j), storage.alpha_l * theta.e_m - e[i, j])
            check("soc_upper", (i, j), e[i, j] - storage.alpha_h * theta.e_m)
    for i in range(n):
        for j in range(t):
            check("charge_nonneg", (i, j), -schedule.p_rs[i, j])
            check("discharge_nonneg", (i, j), -schedule.p_sg[i, j])
            check(
                "storage_power_cap",
                (i, j),
                schedule.p_rs[i, j] + schedule.p_sg[i, j] - theta.p_m,
            )
            check(
                "line_cap",
                (i, j),
                schedule.p_sg[i, j] + schedule.p_rg[i, j] - theta.f_m,
            )
            check("direct_nonneg", (i, j), -schedule.p_rg[i, j])
            check("spill_nonneg", (i, j), -schedule.dp_r[i, j])
            check(
                "power_balance",
                (i, j),
                abs(
                    schedule.p_rg[i, j]
                    + schedule.p_rs[i, j]
                    + schedule.dp_r[i, j]
                    - scenarios.p_r[i, j]
                ),
            )
    wc = worst_case_spillage(schedule, scenarios, sigma, ambiguity)
    check("robust_spillage_cap", (), wc)
    return ValidationReport(valid=not out, violations=out)
