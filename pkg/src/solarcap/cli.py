"""Command-line surface.

Exit codes: 0 success, 1 domain infeasibility (empty feasible set or an
invalid schedule), 2 input errors, 3 numerical failure. The projection
iteration log goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import io as sio
from . import polytope
from .analysis import (
    EmptyFeasibleSetError,
    budget_lower_envelope,
    candidate_optima,
    min_cost_sizing,
    pareto_front,
    slice_fixed_ratio,
    tradeoff_sigma_budget,
)
from .compiler import (
    OracleVerdict,
    ParameterMode,
    compile_polyhedron,
    feasibility_oracle,
)
from .model import (
    AmbiguitySet,
    CapacityPoint,
    CostVector,
    DispatchSchedule,
    compute_gamma,
    validate_schedule,
)
from .projection import (
    CONVERGED,
    EMPTY_SET,
    ITERATION_LIMIT,
    NUMERICAL_FAILURE,
    ProjectionOptions,
    initial_set,
    project,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_STATUS_EXIT = {
    CONVERGED: EXIT_OK,
    EMPTY_SET: EXIT_INFEASIBLE,
    ITERATION_LIMIT: EXIT_NUMERICAL,
    NUMERICAL_FAILURE: EXIT_NUMERICAL,
}


def _floats(text: str, n: int, what: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != n:
        raise sio.InputError(f"{what} needs {n} comma-separated numbers")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise sio.InputError(f"{what}: {exc}") from exc


def _options(cfg: sio.RunConfig, args) -> ProjectionOptions:
    return ProjectionOptions(
        max_iterations=cfg.max_iterations,
        eps_term=cfg.eps_term,
        multi_cut=cfg.multi_cut,
        lp_backend=cfg.lp_backend,
        sigma_box=tuple(cfg.sigma_box),
        budget_box=tuple(cfg.budget_box),
        threads=args.threads,
    )


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


def _cmd_gamma(args) -> int:
    gamma = compute_gamma(args.days, args.beta)
    print(f"gamma={gamma:.4f}")
    print(f"max_day_probability={1.0 / args.days + gamma:.6f}")
    return EXIT_OK


def _cmd_project(args) -> int:
    cfg = sio.load_config(args.config)
    compiled = compile_polyhedron(
        cfg.scenarios, cfg.storage, cfg.ambiguity, cfg.sigma,
        cfg.costs, cfg.budget, mode=ParameterMode.CAPACITIES,
    )
    res = project(compiled, cfg.costs, cfg.budget, options=_options(cfg, args))
    sio.save_set(
        args.out, res.theta_set, "capacities", res.iterations, res.status,
        res.vertices,
    )
    print(f"status={res.status} iterations={res.iterations} "
          f"facets={len(res.theta_set.halfspaces)}")
    return _STATUS_EXIT[res.status]


def _cmd_size(args) -> int:
    theta_set, _meta = sio.load_set(args.set)
    costs = _floats(args.costs, 3, "--costs")
    strategy = min_cost_sizing(theta_set, CostVector(*costs))
    record = {
        "p_m": strategy.theta.p_m,
        "e_m": strategy.theta.e_m,
        "f_m": strategy.theta.f_m,
        "cost": strategy.cost,
        "active_facets": strategy.active_facets,
    }
    text = _dump(record)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def _cmd_slice(args) -> int:
    cfg = sio.load_config(args.config)
    ratio = args.ratio if args.ratio is not None else cfg.ratio
    if ratio is None:
        raise sio.InputError("slice needs --ratio or a ratio config field")
    res = slice_fixed_ratio(
        cfg.scenarios, cfg.storage, cfg.ambiguity, cfg.sigma,
        cfg.costs, cfg.budget, ratio, options=_options(cfg, args),
    )
    proj = res.projection
    sio.save_set(
        args.out, proj.theta_set, "capacities_slice", proj.iterations,
        proj.status, proj.vertices,
    )
    print(f"status={proj.status} iterations={proj.iterations} "
          f"combined_storage_cost={res.combined_storage_cost!r}")
    if args.csv and proj.vertices is not None:
        sio.write_vertex_csv(args.csv, proj.vertices, ["e_m", "f_m"])
    if args.svg and proj.vertices is not None:
        sio.render_set_svg(args.svg, proj.theta_set, proj.vertices,
                           ["storage energy e_m (MWh)", "line capacity F_m (MW)"])
    return _STATUS_EXIT[proj.status]


def _cmd_pareto(args) -> int:
    theta_set, meta = sio.load_set(args.set)
    if theta_set.dim != 2:
        raise sio.InputError("pareto expects a 2-D set file")
    chain = pareto_front(theta_set)
    for v in chain:
        print(f"{float(v[0])!r},{float(v[1])!r}")
    if args.csv:
        sio.write_vertex_csv(args.csv, chain, ["e_m", "f_m"])
    if args.svg:
        sio.render_set_svg(args.svg, theta_set, chain,
                           ["storage energy e_m (MWh)", "line capacity F_m (MW)"])
    if args.cost_range:
        lo_hi = _floats(args.cost_range, 2, "--cost-range")
        if args.c_l is None:
            raise sio.InputError("--cost-range needs --c-l")
        for cand in candidate_optima(theta_set, (lo_hi[0], lo_hi[1]), args.c_l):
            print(f"candidate e_m={float(cand.vertex[0])!r} "
                  f"f_m={float(cand.vertex[1])!r} "
                  f"c_s_range=[{float(cand.cost_range[0])!r},"
                  f"{float(cand.cost_range[1])!r}]")
    return EXIT_OK


def _cmd_tradeoff(args) -> int:
    cfg = sio.load_config(args.config)
    res = tradeoff_sigma_budget(
        cfg.scenarios, cfg.storage, cfg.ambiguity, cfg.costs,
        sigma_box=tuple(cfg.sigma_box), budget_box=tuple(cfg.budget_box),
        options=_options(cfg, args),
    )
    sio.save_set(
        args.out, res.theta_set, "tradeoff", res.iterations, res.status,
        res.vertices,
    )
    print(f"status={res.status} iterations={res.iterations}")
    if res.status == CONVERGED:
        for sigma, xi in budget_lower_envelope(res.theta_set):
            print(f"sigma={float(sigma)!r} min_budget={float(xi)!r}")
    if args.csv and res.vertices is not None:
        sio.write_vertex_csv(args.csv, res.vertices, ["sigma", "xi_m"])
    if args.svg and res.vertices is not None:
        sio.render_set_svg(args.svg, res.theta_set, res.vertices,
                           ["spillage cap sigma", "budget xi_m"])
    return _STATUS_EXIT[res.status]


def _cmd_validate(args) -> int:
    cfg = sio.load_config(args.config)
    theta = CapacityPoint(*_floats(args.theta, 3, "--theta"))
    try:
        with open(args.schedule) as fh:
            raw = json.load(fh)
        schedule = DispatchSchedule(
            p_rs=np.array(raw["p_rs"], dtype=float),
            p_sg=np.array(raw["p_sg"], dtype=float),
            p_rg=np.array(raw["p_rg"], dtype=float),
            dp_r=np.array(raw["dp_r"], dtype=float),
            e=np.array(raw["e"], dtype=float),
        )
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise sio.InputError(f"{args.schedule}: bad schedule file ({exc})") from exc
    report = validate_schedule(
        schedule, theta, cfg.scenarios, cfg.storage, cfg.sigma, cfg.ambiguity
    )
    if report.valid:
        print("valid")
        return EXIT_OK
    for v in report.violations:
        print(f"violated {v.constraint} at {v.where}: {v.magnitude:.6g}")
    return EXIT_INFEASIBLE


def _cmd_oracle_check(args) -> int:
    cfg = sio.load_config(args.config)
    theta_set, meta = sio.load_set(args.set)
    mode = (
        ParameterMode.TRADEOFF if meta.get("mode") == "tradeoff"
        else ParameterMode.CAPACITIES
    )
    if mode is ParameterMode.CAPACITIES and theta_set.dim != 3:
        raise sio.InputError("capacities-mode sets are 3-D")
    compiled = compile_polyhedron(
        cfg.scenarios, cfg.storage, cfg.ambiguity,
        cfg.sigma if mode is ParameterMode.CAPACITIES else None,
        cfg.costs, cfg.budget if mode is ParameterMode.CAPACITIES else None,
        mode=mode,
    )
    opts = _options(cfg, args)
    init = initial_set(compiled, cfg.costs, cfg.budget, opts)
    rng = np.random.default_rng(args.seed)
    agree = disagree = skipped = 0
    band = 1e-4
    for _ in range(args.samples):
        point = rng.uniform(0.0, 1.0, size=theta_set.dim) * init.scale
        if not polytope.contains(init, point):
            skipped += 1
            continue
        # skip the tolerance band around any facet of the final set
        near = any(
            abs(h.a @ point - h.b) <= band * (1.0 + abs(h.b))
            for h in theta_set.halfspaces
        )
        if near:
            skipped += 1
            continue
        member = polytope.contains(theta_set, point)
        verdict = feasibility_oracle(compiled, point)
        if verdict is OracleVerdict.SOLVER_FAILURE:
            return EXIT_NUMERICAL
        if member == (verdict is OracleVerdict.FEASIBLE):
            agree += 1
        else:
            disagree += 1
    print(f"samples={args.samples} agree={agree} disagree={disagree} "
          f"skipped={skipped}")
    return EXIT_OK if disagree == 0 else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solarcap",
        description="Exact feasible capacity sets for a remote solar plant "
                    "with storage, a transmission line, and a robust "
                    "spillage cap.",
    )
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="suppress the stderr iteration log")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--threads", type=int, default=1,
                        help="parallel subproblem solves per iteration")
    shared.add_argument("--seed", type=int, default=0,
                        help="seed for sampling commands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "gamma", parents=[shared], help="ambiguity radius from days and confidence")
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=_cmd_gamma)

    p = sub.add_parser(
        "project", parents=[shared], help="project onto (p_m, e_m, F_m)")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser(
        "size", parents=[shared], help="minimum-cost capacities over a set file")
    p.add_argument("--set", required=True)
    p.add_argument("--costs", required=True, help="c_p,c_e,c_l")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_size)

    p = sub.add_parser(
        "slice", parents=[shared], help="2-D (e_m, F_m) set at a fixed e_m/p_m ratio")
    p.add_argument("--config", required=True)
    p.add_argument("--ratio", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.add_argument("--svg")
    p.set_defaults(func=_cmd_slice)

    p = sub.add_parser(
        "pareto", parents=[shared], help="southwest vertex chain of a 2-D set")
    p.add_argument("--set", required=True)
    p.add_argument("--csv")
    p.add_argument("--svg")
    p.add_argument("--cost-range", help="lo,hi sweep of the combined storage cost")
    p.add_argument("--c-l", type=float, help="line cost for the sweep")
    p.set_defaults(func=_cmd_pareto)

    p = sub.add_parser(
        "tradeoff", parents=[shared], help="feasible (sigma, budget) region")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.add_argument("--svg")
    p.set_defaults(func=_cmd_tradeoff)

    p = sub.add_parser(
        "validate", parents=[shared], help="check a dispatch schedule")
    p.add_argument("--config", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--theta", required=True, help="p_m,e_m,f_m")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser(
        "oracle-check", parents=[shared], help="membership vs feasibility-LP agreement on samples")
    p.add_argument("--config", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching the input-error code
        return int(exc.code or 0)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(message)s",
    )
    try:
        return args.func(args)
    except sio.InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyFeasibleSetError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
