"""Scenario ingestion, synthetic data, run configuration, and the JSON
serialization of projected sets."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import polytope
from .model import (
    AmbiguitySet,
    Budget,
    CostVector,
    ScenarioSet,
    SocBoundary,
    StorageSpec,
    compute_gamma,
)


class InputError(ValueError):
    """Malformed user input (CSV/JSON); maps to CLI exit code 2."""


def load_scenarios(path) -> ScenarioSet:
    """Read a `day,hour,p_mw[,prob]` CSV into a ScenarioSet.

    Hours must be 1..T contiguous within each day; probabilities default
    to uniform when no prob column is present.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path}: empty file")
        header = [h.strip().lower() for h in header]
        if header[:3] != ["day", "hour", "p_mw"]:
            raise InputError(
                f"{path}: expected header day,hour,p_mw[,prob], got {header}"
            )
        has_prob = len(header) > 3 and header[3] == "prob"
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                day = int(rec[0])
                hour = int(rec[1])
                p = float(rec[2])
                prob = float(rec[3]) if has_prob else None
            except (ValueError, IndexError) as exc:
                raise InputError(f"{path}:{lineno}: unparseable row {rec}") from exc
            if p < 0:
                raise InputError(
                    f"{path}:{lineno}: negative power {p} (day {day}, hour {hour})"
                )
            rows.append((day, hour, p, prob, lineno))
    if not rows:
        raise InputError(f"{path}: no data rows")
    days = sorted({r[0] for r in rows})
    by_day = {d: {} for d in days}
    for day, hour, p, prob, lineno in rows:
        if hour in by_day[day]:
            raise InputError(f"{path}:{lineno}: duplicate hour {hour} in day {day}")
        by_day[day][hour] = (p, prob)
    t = max(len(v) for v in by_day.values())
    for d in days:
        hours = sorted(by_day[d])
        if hours != list(range(1, t + 1)):
            missing = sorted(set(range(1, t + 1)) - set(hours))
            raise InputError(
                f"{path}: day {d} is ragged (expected hours 1..{t}, "
                f"missing {missing[:5]})"
            )
    p_r = np.array([[by_day[d][h][0] for h in range(1, t + 1)] for d in days])
    if any(r[3] is not None for r in rows):
        rho0 = np.array([by_day[d][1][1] for d in days], dtype=float)
    else:
        rho0 = np.full(len(days), 1.0 / len(days))
    try:
        return ScenarioSet(p_r=p_r, rho0=rho0)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def synthetic_scenarios(
    n_days: int,
    n_periods: int = 24,
    seed: int = 0,
    peak_mw: float = 1000.0,
) -> ScenarioSet:
    """Stand-in solar data: diurnal bell curve, seasonal amplitude, and
    seeded day-to-day cloudiness."""
    if n_days < 1 or n_periods < 1:
        raise InputError("need at least one day and one period")
    rng = np.random.default_rng(seed)
    doy = np.linspace(0.0, 365.0, n_days, endpoint=False)
    seasonal = 0.75 + 0.25 * np.cos(2.0 * np.pi * (doy - 172.0) / 365.0)
    hours = np.arange(1, n_periods + 1)
    noon = (n_periods + 1) / 2.0
    bell = np.exp(-(((hours - noon) / (0.16 * n_periods + 1e-9)) ** 2))
    bell[bell < 0.02] = 0.0
    cloud = rng.uniform(0.35, 1.0, size=n_days)
    jitter = np.clip(rng.normal(1.0, 0.05, size=(n_days, n_periods)), 0.0, None)
    p_r = peak_mw * seasonal[:, None] * cloud[:, None] * bell[None, :] * jitter
    return ScenarioSet.uniform(np.clip(p_r, 0.0, None))


@dataclass
class RunConfig:
    scenarios: ScenarioSet
    storage: StorageSpec
    gamma: float
    sigma: float
    costs: CostVector
    budget: Budget
    ratio: float | None = None
    sigma_box: tuple = (0.0, 1.0)
    budget_box: tuple = (1e9, 1e10)
    max_iterations: int = 500
    eps_term: float = 1e-7
    multi_cut: bool = False
    lp_backend: str = "auto"
    seed: int = 0
    raw: dict = field(default_factory=dict)

    @property
    def ambiguity(self) -> AmbiguitySet:
        return AmbiguitySet(self.gamma, self.scenarios.rho0)


def load_config(path) -> RunConfig:
    """Parse a JSON run configuration."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    base = Path(path).parent
    try:
        scen_cfg = cfg["scenarios"]
        if "path" in scen_cfg:
            sc_path = Path(scen_cfg["path"])
            if not sc_path.is_absolute():
                sc_path = base / sc_path
            if not sc_path.exists():
                raise InputError(f"scenario file not found: {sc_path}")
            scenarios = load_scenarios(sc_path)
        elif "synthetic" in scen_cfg:
            s = scen_cfg["synthetic"]
            scenarios = synthetic_scenarios(
                n_days=int(s["days"]),
                n_periods=int(s.get("periods", 24)),
                seed=int(s.get("seed", cfg.get("seed", 0))),
                peak_mw=float(s.get("peak_mw", 1000.0)),
            )
        else:
            raise InputError("scenarios must declare 'path' or 'synthetic'")

        if ("beta" in cfg) == ("gamma" in cfg):
            raise InputError("exactly one of beta/gamma must be set")
        gamma = (
            float(cfg["gamma"])
            if "gamma" in cfg
            else compute_gamma(scenarios.n_days, float(cfg["beta"]))
        )
        st = cfg.get("storage", {})
        storage = StorageSpec(
            eta_c=float(st.get("eta_c", 0.95)),
            eta_d=float(st.get("eta_d", 0.95)),
            alpha_l=float(st.get("alpha_l", 0.25)),
            alpha_h=float(st.get("alpha_h", 0.95)),
            soc_boundary=SocBoundary(st.get("soc_boundary", "periodic")),
            soc_initial_fraction=st.get("soc_initial_fraction"),
        )
        co = cfg["costs"]
        costs = CostVector(float(co["c_p"]), float(co["c_e"]), float(co["c_l"]))
        return RunConfig(
            scenarios=scenarios,
            storage=storage,
            gamma=gamma,
            sigma=float(cfg.get("sigma", 0.05)),
            costs=costs,
            budget=Budget(float(cfg["budget"])),
            ratio=float(cfg["ratio"]) if "ratio" in cfg else None,
            sigma_box=tuple(cfg.get("sigma_box", (0.0, 1.0))),
            budget_box=tuple(cfg.get("budget_box", (1e9, 1e10))),
            max_iterations=int(cfg.get("max_iterations", 500)),
            eps_term=float(cfg.get("eps_term", 1e-7)),
            multi_cut=bool(cfg.get("multi_cut", False)),
            lp_backend=str(cfg.get("lp_backend", "auto")),
            seed=int(cfg.get("seed", 0)),
            raw=cfg,
        )
    except KeyError as exc:
        raise InputError(f"{path}: missing config key {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{path}: {exc}") from exc


def set_to_dict(
    theta_set: polytope.HalfspaceSet,
    mode: str,
    iterations: int,
    status: str,
    vertices: np.ndarray | None = None,
) -> dict:
    if vertices is None:
        vertices = polytope.enumerate_vertices(theta_set).vertices
    return {
        "mode": mode,
        "dim": theta_set.dim,
        "halfspaces": [
            {"a": [float(v) for v in h.a], "b": float(h.b), "provenance": h.provenance}
            for h in theta_set.halfspaces
        ],
        "vertices": [[float(c) for c in v] for v in vertices],
        "iterations": iterations,
        "status": status,
        "scale": [float(s) for s in theta_set.scale],
    }


def save_set(path, theta_set, mode, iterations, status, vertices=None) -> None:
    with open(path, "w") as fh:
        json.dump(
            set_to_dict(theta_set, mode, iterations, status, vertices),
            fh,
            sort_keys=True,
            indent=1,
        )
        fh.write("\n")


def load_set(path) -> tuple[polytope.HalfspaceSet, dict]:
    try:
        with open(path) as fh:
            d = json.load(fh)
        hs = tuple(
            polytope.Halfspace(np.array(h["a"], dtype=float), float(h["b"]),
                               h.get("provenance", "unknown"))
            for h in d["halfspaces"]
        )
        theta_set = polytope.HalfspaceSet(
            int(d["dim"]), hs, scale=np.array(d["scale"], dtype=float)
        )
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: bad set file ({exc})") from exc
    return theta_set, d


def write_vertex_csv(path, vertices: np.ndarray, columns: list[str]) -> None:
    """Plot-ready CSV of a vertex chain."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for v in vertices:
            w.writerow([repr(float(c)) for c in v])


def render_set_svg(path, theta_set, vertices, axis_labels) -> None:
    """Optional SVG rendering of a 2-D set (requires matplotlib)."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise InputError("SVG rendering requires matplotlib") from exc
    if theta_set.dim != 2:
        raise InputError("SVG rendering supports 2-D sets only")
    fig, ax = plt.subplots(figsize=(5, 4))
    if vertices.shape[0] >= 3:
        centroid = vertices.mean(axis=0)
        order = np.argsort(
            np.arctan2(vertices[:, 1] - centroid[1], vertices[:, 0] - centroid[0])
        )
        poly = vertices[order]
        ax.fill(poly[:, 0], poly[:, 1], alpha=0.4)
        ax.plot(
            np.append(poly[:, 0], poly[0, 0]),
            np.append(poly[:, 1], poly[0, 1]),
            "o-",
        )
    elif vertices.shape[0]:
        ax.plot(vertices[:, 0], vertices[:, 1], "o")
    ax.set_xlabel(axis_labels[0])
    ax.set_ylabel(axis_labels[1])
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
