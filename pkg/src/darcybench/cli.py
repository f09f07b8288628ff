"""Command-line driver: generate | verify | eoc | mc | diagnose.

Each run is described by a flat JSON config; command-line flags override
config keys.  Every output file carries a machine-readable provenance header
('#'-prefixed key=value lines in CSVs, a "provenance" object in JSON) with
the config hash, seeds, and tool version.  Reruns with identical configs
produce identical outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, chebyshev, fdm, fem, grw, mc, postproc, randfield
from .grids import GridSpec
from .grw import GrwConfig
from .manufactured import head_1d, head_2d
from .randfield import RandomFieldModel

_TABLE_FMT = ".6g"
_ENV_WORKERS = "DARCYBENCH_WORKERS"

_SOLVERS_1D = ("fdm1d", "fem1d", "grw1d", "csm1d")
_SOLVERS_2D = ("fdm2d", "fem2d", "grw2d")


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _provenance(cfg: dict) -> dict:
    return {"tool": "darcybench", "version": __version__, "config_hash": _config_hash(cfg)}


def _write_table(path: Path, cfg: dict, columns, rows, extra_header=()):
    lines = [f"# {k}={v}" for k, v in _provenance(cfg).items()]
    lines += [f"# {line}" for line in extra_header]
    lines.append(",".join(str(c) for c in columns))
    for row in rows:
        cells = [c if isinstance(c, str) else format(c, _TABLE_FMT) for c in row]
        lines.append(",".join(cells))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        cfg.update(json.loads(Path(args.config).read_text()))
    for key, value in vars(args).items():
        if key in ("config", "func", "command") or value is None:
            continue
        cfg[key] = value
    return cfg


def _model(cfg: dict) -> RandomFieldModel:
    return RandomFieldModel(
        correlation=randfield.Correlation.parse(cfg.get("correlation", "gaussian")),
        sigma2=float(cfg.get("sigma2", 1.0)),
        lam=float(cfg.get("lam", 1.0)),
        mean_k=float(cfg.get("mean_k", 15.0)),
    )


def _modes_for(cfg: dict, model: RandomFieldModel, n_needed: int):
    if cfg.get("modes_file"):
        modes = randfield.read_modes(cfg["modes_file"])
        if modes.n_max < n_needed:
            raise ValueError(f"mode file has {modes.n_max} modes, need {n_needed}")
        # wavenumbers encode the correlation structure; a mismatch would
        # silently mislabel the whole sweep
        if modes.model.correlation is not model.correlation or modes.model.lam != model.lam:
            raise ValueError(
                f"mode file was sampled for {modes.model.correlation.value} "
                f"correlation with lambda={modes.model.lam}, run requests "
                f"{model.correlation.value} with lambda={model.lam}")
        return modes
    return randfield.sample_modes(model, n_needed, int(cfg.get("seed", 0)))


def _grw_config(cfg: dict) -> GrwConfig:
    return GrwConfig(
        r_max=cfg.get("r_max"),
        t_max=int(cfg.get("t_max", 10_000_000)),
        check_every=int(cfg.get("check_every", 1000)),
        steady_tol=float(cfg.get("steady_tol", 1e-8)),
    )


# -- generate ---------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = _load_config(args)
    n_max = int(cfg.get("n_max", 10_000))
    if n_max < 1:
        print("error: n_max must be >= 1", file=sys.stderr)
        return 2
    model = _model(cfg)
    modes = randfield.sample_modes(model, n_max, int(cfg.get("seed", 0)))
    out = Path(cfg.get("output", "modes.csv"))
    out.parent.mkdir(parents=True, exist_ok=True)
    randfield.write_modes(modes, out)
    print(f"wrote {n_max} modes to {out}")
    return 0


# -- verify -----------------------------------------------------------------

def _verify_cell(solver: str, cfg: dict, modes, n: int, model, grw_history_path=None):
    """Solve one (N, sigma^2) cell against the closed-form head; returns the error."""
    if solver in ("fdm1d", "fem1d", "grw1d"):
        grid = GridSpec.interval(float(cfg.get("length", 200.0)), float(cfg.get("dx", 1e-3)))
        if solver == "fdm1d":
            head = fdm.solve_head_1d(grid, modes, n, model, case="manufactured")
        elif solver == "fem1d":
            head = fem.solve_fem_1d(grid, modes, n, model, case="manufactured")
        else:
            head, report = grw.run_to_steady_1d(grid, modes, n, model,
                                                case="manufactured", config=_grw_config(cfg))
            if grw_history_path is not None:
                grw.write_history(report.history, grw_history_path)
            if not report.converged:
                print(f"warning: GRW not stationary after {report.iterations} iterations",
                      file=sys.stderr)
        return postproc.l2_error_1d(head, head_1d)
    if solver == "csm1d":
        lo = int(cfg.get("n_colloc_min", 140))
        hi = int(cfg.get("n_colloc_max", 200))
        best_n, best_err = chebyshev.optimal_n_scan(
            modes, n, model, range(lo, hi + 1), length=float(cfg.get("length", 200.0)))
        return best_err, best_n
    grid = GridSpec.box(float(cfg.get("lx", 20.0)), float(cfg.get("ly", 10.0)),
                        float(cfg.get("dx", 2e-2)))
    if solver == "fdm2d":
        head = fdm.solve_head_2d(grid, modes, n, model, case="manufactured")
    elif solver == "fem2d":
        head = fem.solve_fem_2d(grid, modes, n, model, case="manufactured")
    else:
        head, report = grw.run_to_steady_2d(grid, modes, n, model,
                                            case="manufactured", config=_grw_config(cfg))
        if grw_history_path is not None:
            grw.write_history(report.history, grw_history_path)
        if not report.converged:
            print(f"warning: GRW not stationary after {report.iterations} iterations",
                  file=sys.stderr)
    return postproc.l2_error_2d(head, head_2d)


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    solver = cfg.get("solver", "fdm1d")
    if solver not in _SOLVERS_1D + _SOLVERS_2D:
        print(f"error: unknown solver {solver!r}", file=sys.stderr)
        return 2
    sigma2_list = [float(s) for s in cfg.get("sigma2_list", [0.1, 1, 2, 4, 6, 8, 10])]
    n_list = [int(n) for n in cfg.get("n_modes_list", [100, 1000, 10000])]
    base_model = _model(cfg)
    modes = _modes_for(cfg, base_model, max(n_list))
    out_dir = Path(cfg.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)

    single_cell = len(sigma2_list) == 1 and len(n_list) == 1
    rows = []
    optimal_rows = []
    csm_cells = None
    if solver == "csm1d":
        lo = int(cfg.get("n_colloc_min", 140))
        hi = int(cfg.get("n_colloc_max", 200))
        csm_cells = chebyshev.optimal_n_sweep(modes, n_list, sigma2_list, base_model,
                                              range(lo, hi + 1),
                                              length=float(cfg.get("length", 200.0)))
    for n in n_list:
        row = [str(n)]
        opt_row = [str(n)]
        for s2 in sigma2_list:
            model = base_model.with_sigma2(s2)
            if csm_cells is not None:
                best_n, err = csm_cells[(n, float(s2))]
                row.append(format(err, _TABLE_FMT))
                opt_row.append(str(best_n))
                continue
            hist = None
            if solver in ("grw1d", "grw2d"):
                name = ("convergence_history.csv" if single_cell
                        else f"convergence_history_N{n}_s2{s2:g}.csv")
                hist = out_dir / name
            try:
                result = _verify_cell(solver, cfg, modes, n, model, hist)
            except Exception as exc:
                print(f"warning: cell N={n} sigma2={s2} failed: {exc}", file=sys.stderr)
                row.append("nan")
                opt_row.append("nan")
                continue
            row.append(format(result, _TABLE_FMT))
        rows.append(row)
        optimal_rows.append(opt_row)

    header = [f"solver={solver}", f"seed={cfg.get('seed', 0)}",
              "rows=n_modes, columns=sigma2"]
    _write_table(out_dir / "errors.csv", cfg, ["n_modes"] + [f"{s:g}" for s in sigma2_list],
                 rows, header)
    if solver == "csm1d":
        _write_table(out_dir / "optimal_n.csv", cfg,
                     ["n_modes"] + [f"{s:g}" for s in sigma2_list], optimal_rows, header)
    print(f"wrote {out_dir / 'errors.csv'}")
    return 0


# -- eoc ----------------------------------------------------------------------

def cmd_eoc(args) -> int:
    cfg = _load_config(args)
    solver = cfg.get("solver", "fdm1d")
    case = cfg.get("case", "homogeneous")
    sigma2_list = [float(s) for s in cfg.get("sigma2_list", [0.1, 4, 10])]
    n_list = [int(n) for n in cfg.get("n_modes_list", [100, 1000, 10000])]
    levels = int(cfg.get("levels", 6))
    base_model = _model(cfg)
    modes = _modes_for(cfg, base_model, max(n_list))

    if solver in ("fdm1d", "fem1d", "grw1d"):
        base_grid = GridSpec.interval(float(cfg.get("length", 200.0)),
                                      float(cfg.get("base_dx", 0.1)))
    elif solver in ("fdm2d", "fem2d"):
        base_grid = GridSpec.box(float(cfg.get("lx", 20.0)), float(cfg.get("ly", 10.0)),
                                 float(cfg.get("base_dx", 0.4)))
    else:
        print(f"error: unknown solver {solver!r}", file=sys.stderr)
        return 2

    def make_solver(model, n):
        def run(grid):
            if solver == "fdm1d":
                return fdm.solve_head_1d(grid, modes, n, model, case=case)
            if solver == "fem1d":
                return fem.solve_fem_1d(grid, modes, n, model, case=case)
            if solver == "grw1d":
                head, _ = grw.run_to_steady_1d(grid, modes, n, model, case=case,
                                               config=_grw_config(cfg))
                return head
            if solver == "fdm2d":
                return fdm.solve_head_2d(grid, modes, n, model, case=case)
            return fem.solve_fem_2d(grid, modes, n, model, case=case)
        return run

    rows = []
    any_flagged = False
    for n in n_list:
        for s2 in sigma2_list:
            table = postproc.eoc_study(make_solver(base_model.with_sigma2(s2), n),
                                       base_grid, levels)
            any_flagged = any_flagged or table.flagged
            row = [str(n), f"{s2:g}"]
            for k in range(table.errors.size):
                row.append(format(table.errors[k], _TABLE_FMT))
                if k < table.eoc.size:
                    row.append("nan" if not np.isfinite(table.eoc[k])
                               else format(table.eoc[k], ".3g"))
            if table.flagged:
                row.append("flagged: " + "; ".join(table.notes))
            rows.append(row)

    columns = ["n_modes", "sigma2"]
    for k in range(levels - 1):
        columns.append(f"eps{k + 1}")
        if k < levels - 2:
            columns.append("eoc")
    out = Path(cfg.get("output", "eoc.csv"))
    _write_table(out, cfg, columns, rows,
                 [f"solver={solver}", f"case={case}", f"seed={cfg.get('seed', 0)}",
                  f"base_dx={base_grid.dx}", f"levels={levels}"])
    print(f"wrote {out}" + (" (flagged entries present)" if any_flagged else ""))
    return 0


# -- mc -----------------------------------------------------------------------

def cmd_mc(args) -> int:
    cfg = _load_config(args)
    workers = int(cfg.get("workers", os.environ.get(_ENV_WORKERS, "1")))
    model = _model(cfg)
    grid = GridSpec.box(float(cfg.get("lx", 20.0)), float(cfg.get("ly", 10.0)),
                        float(cfg.get("dx", 5e-2)))
    try:
        config = mc.McConfig(
            solver=cfg.get("solver", "fdm").removesuffix("2d"),
            model=model,
            grid=grid,
            realizations=int(cfg.get("realizations", 100)),
            n_modes=int(cfg.get("n_modes", 100)),
            base_seed=int(cfg.get("seed", 0)),
            margin_x=float(cfg.get("margin_x", 4.0)),
            margin_y=float(cfg.get("margin_y", 2.0)),
            h_inflow=float(cfg.get("h_inflow", 1.0)),
            workers=workers,
            grw_config=_grw_config(cfg) if cfg.get("solver", "fdm").startswith("grw") else None,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    result = mc.run_ensemble(config)
    kept, rejected = mc.sanity_filter(result.fields, h_min=0.0, h_max=config.h_inflow)
    fields = [result.fields[i] for i in kept]
    summary = mc.ensemble_space_stats(fields, config.margin_x, config.margin_y,
                                      lam=model.lam)
    pred_vx, pred_vy, head_scale = mc.first_order_predictions(
        model.sigma2, lam=model.lam, mean_slope=config.h_inflow / grid.lx)

    out_dir = Path(cfg.get("output_dir", "."))
    (out_dir / "profiles").mkdir(parents=True, exist_ok=True)
    for axis in ("x", "y"):
        prof = mc.boundary_profiles(fields, axis)
        _write_table(out_dir / "profiles" / f"variance_{axis}.csv", cfg,
                     [axis, "var_h", "var_vx", "var_vy"],
                     [[format(p, ".10g"), format(a, _TABLE_FMT), format(b, _TABLE_FMT),
                       format(c, _TABLE_FMT)]
                      for p, a, b, c in zip(prof.positions, prof.var_h,
                                            prof.var_vx, prof.var_vy)])

    payload = {
        "provenance": {**_provenance(cfg), "seeds": result.seeds},
        "config": {
            "solver": config.solver, "correlation": model.correlation.value,
            "sigma2": model.sigma2, "lam": model.lam, "mean_k": model.mean_k,
            "lx": grid.lx, "ly": grid.ly, "dx": grid.dx,
            "realizations": config.realizations, "n_modes": config.n_modes,
            "base_seed": config.base_seed, "margin_x": config.margin_x,
            "margin_y": config.margin_y, "h_inflow": config.h_inflow,
        },
        "summary": summary.as_dict(),
        "first_order": {"var_vx": pred_vx, "var_vy": pred_vy,
                        "var_h_scale": head_scale},
        "rejected_realizations": [result.indices[i] for i in rejected],
        "failures": result.failures,
        "warnings": result.warnings,
    }
    out = out_dir / "mc_summary.json"
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    return 0


# -- diagnose -------------------------------------------------------------------

def cmd_diagnose(args) -> int:
    cfg = _load_config(args)
    model = _model(cfg)
    n = int(cfg.get("n_modes", 1_000_000))
    modes = _modes_for(cfg, model, n)
    out_dir = Path(cfg.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = cfg.get("kind", "derivative")

    if kind == "derivative":
        dx_levels = [float(v) for v in cfg.get("dx_levels", [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])]
        report = randfield.derivative_profile(modes, model, n, float(cfg.get("x0", 1.0)),
                                              dx_levels, int(cfg.get("n_points", 100)))
        rows = []
        for lvl, dx in enumerate(report.dx_levels):
            for i in range(report.abscissae.size):
                rows.append([format(dx, ".6g"), str(i),
                             format(report.derivative_estimates[lvl, i], _TABLE_FMT)])
        _write_table(out_dir / "derivative_profile.csv", cfg,
                     ["dx", "offset_index", "estimate"], rows,
                     [f"x0={cfg.get('x0', 1.0)}", f"n_modes={n}"])
        print(f"wrote {out_dir / 'derivative_profile.csv'}")
    elif kind == "lipschitz":
        n_values = [int(v) for v in cfg.get("n_values", [100, 1000, 10000, 100000, 1000000])]
        report = randfield.lipschitz_profile(modes, model, n_values,
                                             float(cfg.get("dx", 1e-4)),
                                             int(cfg.get("n_points", 100)))
        rows = [[str(int(nv)), format(est, _TABLE_FMT)]
                for nv, est in zip(report.n_values, report.lipschitz_estimates)]
        _write_table(out_dir / "lipschitz_profile.csv", cfg, ["n_modes", "estimate"], rows,
                     [f"dx={cfg.get('dx', 1e-4)}"])
        print(f"wrote {out_dir / 'lipschitz_profile.csv'}")
    elif kind == "coefficients":
        # spectral-coefficient decay of one collocation solution (plateau plot)
        n_colloc = int(cfg.get("n_colloc", 200))
        sol = chebyshev.solve_csm_1d(modes, n, model, n_colloc,
                                     case=cfg.get("case", "manufactured"),
                                     length=float(cfg.get("length", 200.0)))
        rows = [[str(k), format(abs(c), ".10e")]
                for k, c in enumerate(sol.coefficients)]
        _write_table(out_dir / "coefficient_decay.csv", cfg,
                     ["degree", "abs_coefficient"], rows,
                     [f"n_colloc={n_colloc}", f"n_modes={n}"])
        print(f"wrote {out_dir / 'coefficient_decay.csv'}")
    else:
        print(f"error: unknown diagnostic {kind!r}", file=sys.stderr)
        return 2
    return 0


# -- parser ---------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--correlation", choices=["gaussian", "exponential"])
    p.add_argument("--sigma2", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--mean-k", dest="mean_k", type=float)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darcybench",
        description="Steady Darcy-flow benchmark: field generation, solver "
                    "verification, convergence studies, Monte Carlo validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a mode table and write it to CSV")
    _add_common(p)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="manufactured-solution error table over (sigma2, N)")
    _add_common(p)
    p.add_argument("--solver", choices=_SOLVERS_1D + _SOLVERS_2D)
    p.add_argument("--sigma2-list", dest="sigma2_list", type=float, nargs="+")
    p.add_argument("--n-modes-list", dest="n_modes_list", type=int, nargs="+")
    p.add_argument("--modes-file", dest="modes_file")
    p.add_argument("--dx", type=float)
    p.add_argument("--length", type=float)
    p.add_argument("--lx", type=float)
    p.add_argument("--ly", type=float)
    p.add_argument("--t-max", dest="t_max", type=int)
    p.add_argument("--steady-tol", dest="steady_tol", type=float)
    p.add_argument("--output-dir", dest="output_dir")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eoc", help="grid-refinement convergence orders")
    _add_common(p)
    p.add_argument("--solver", choices=("fdm1d", "fem1d", "grw1d", "fdm2d", "fem2d"))
    p.add_argument("--case", choices=("homogeneous", "manufactured"))
    p.add_argument("--sigma2-list", dest="sigma2_list", type=float, nargs="+")
    p.add_argument("--n-modes-list", dest="n_modes_list", type=int, nargs="+")
    p.add_argument("--modes-file", dest="modes_file")
    p.add_argument("--base-dx", dest="base_dx", type=float)
    p.add_argument("--levels", type=int)
    p.add_argument("--length", type=float)
    p.add_argument("--lx", type=float)
    p.add_argument("--ly", type=float)
    p.add_argument("--t-max", dest="t_max", type=int)
    p.add_argument("--output")
    p.set_defaults(func=cmd_eoc)

    p = sub.add_parser("mc", help="Monte Carlo ensemble and first-order comparison")
    _add_common(p)
    p.add_argument("--solver", choices=("fdm", "fem", "grw"))
    p.add_argument("--realizations", type=int)
    p.add_argument("--n-modes", dest="n_modes", type=int)
    p.add_argument("--dx", type=float)
    p.add_argument("--lx", type=float)
    p.add_argument("--ly", type=float)
    p.add_argument("--margin-x", dest="margin_x", type=float)
    p.add_argument("--margin-y", dest="margin_y", type=float)
    p.add_argument("--workers", type=int,
                   help=f"worker processes (default: ${_ENV_WORKERS} or 1)")
    p.add_argument("--t-max", dest="t_max", type=int)
    p.add_argument("--output-dir", dest="output_dir")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("diagnose", help="field and spectral diagnostics (CSV for plots)")
    _add_common(p)
    p.add_argument("--kind", choices=("derivative", "lipschitz", "coefficients"))
    p.add_argument("--n-modes", dest="n_modes", type=int)
    p.add_argument("--x0", type=float)
    p.add_argument("--dx", type=float)
    p.add_argument("--n-points", dest="n_points", type=int)
    p.add_argument("--n-colloc", dest="n_colloc", type=int)
    p.add_argument("--length", type=float)
    p.add_argument("--output-dir", dest="output_dir")
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # completed == exit 0; anything else is nonzero
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
