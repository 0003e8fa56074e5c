"""Command-line front end: solve, optimize, simulate, sweep, figure tables.

Every numeric printed here is the unmodified library result formatted to 12
significant digits.  Exit codes: 0 success, 2 usage error, 3 numeric
non-convergence, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from .aoi import (
    VerificationError,
    analytical_peak_aoi,
    optimize_joint,
    optimize_q,
    optimize_xi,
    peak_aoi,
)
from .fixed_point import ConvergenceError, classify_regime, solve_fixed_point
from .params import SystemParams, compute_c, derive_constants
from .sim import SimConfig, run_simulation

EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

SWEEP_COLUMNS = [
    "axis_name", "axis_value", "p_A", "p_S", "p_L", "regime",
    "a_p_analytical", "q_star", "xi_star", "a_p_opt", "branch",
    "a_p_sim", "ci95", "success_rate_sim",
]

SWEEP_TASKS = ("solve", "aoi", "optimize-q", "optimize-xi", "optimize-joint",
               "simulate")

AXIS_PARAMS = {"lambda": "lam", "q": "q", "xi": "xi", "R": "R", "theta": "theta"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="node deployment density")
    p.add_argument("--lambda-c-r2", dest="lcr2", type=float, default=None,
                   help="supply the product lambda*c*R^2 directly")
    p.add_argument("--R", type=float, default=1.0, help="TX-RX distance")
    p.add_argument("--alpha", type=float, default=3.0, help="path-loss exponent")
    p.add_argument("--theta", type=float, default=0.2, help="SINR threshold")
    p.add_argument("--gamma", type=float, default=math.inf, help="mean SNR")
    p.add_argument("--noiseless", action="store_true",
                   help="zero thermal noise (gamma = infinity)")
    p.add_argument("--q", type=float, default=1.0, help="channel access probability")
    p.add_argument("--xi", type=float, default=1.0, help="packet arrival rate")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--slots", type=int, default=10_000)
    p.add_argument("--realizations", type=int, default=10)
    p.add_argument("--area-side", dest="area_side", type=float, default=50.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--warmup", dest="warmup", type=float, default=0.1,
                   help="fraction of initial slots discarded")
    p.add_argument("--cutoff", type=float, default=None,
                   help="interference cutoff radius")
    p.add_argument("--boundary", choices=("window", "torus"), default="window")
    p.add_argument("--no-far-field", dest="far_field", action="store_false",
                   help="disable out-of-window interference compensation")
    p.add_argument("--backend", choices=("cython", "python"), default=None)
    p.add_argument("--workers", type=int, default=1)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json")
    p.add_argument("--config", default=None,
                   help="JSON file supplying flag defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aloha-aoi",
        description="Peak-AoI analysis, optimization and simulation of a "
                    "slotted-ALOHA Poisson bipolar network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, brief in [
        ("solve", "solve the success-probability fixed point"),
        ("aoi", "analytical peak AoI at the selected steady state"),
        ("optimize-q", "minimize peak AoI over the access probability"),
        ("optimize-xi", "minimize peak AoI over the arrival rate"),
        ("optimize-joint", "minimize peak AoI over q and xi jointly"),
    ]:
        sp = sub.add_parser(name, help=brief)
        _add_param_flags(sp)
        _add_output_flags(sp)

    sp = sub.add_parser("simulate", help="Monte Carlo peak-AoI estimate")
    _add_param_flags(sp)
    _add_sim_flags(sp)
    _add_output_flags(sp)

    sp = sub.add_parser("sweep", help="tabulate tasks along one parameter axis")
    _add_param_flags(sp)
    _add_sim_flags(sp)
    _add_output_flags(sp)
    sp.add_argument("--axis", choices=sorted(AXIS_PARAMS), required=True)
    sp.add_argument("--from", dest="start", type=float, default=None)
    sp.add_argument("--to", dest="stop", type=float, default=None)
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--log", action="store_true", help="logarithmic axis grid")
    sp.add_argument("--values", default=None,
                    help="explicit comma-separated axis values")
    sp.add_argument("--tasks", default="solve,aoi",
                    help=f"comma-separated subset of {{{','.join(SWEEP_TASKS)}}}")

    sp = sub.add_parser("figure", help="emit the table behind a paper figure")
    sp.add_argument("name", choices=tuple(FIGURES))
    _add_param_flags(sp)
    _add_sim_flags(sp)
    _add_output_flags(sp)
    sp.add_argument("--from", dest="start", type=float, default=None)
    sp.add_argument("--to", dest="stop", type=float, default=None)
    sp.add_argument("--count", type=int, default=None)
    return parser


def params_from_args(args: argparse.Namespace) -> SystemParams:
    gamma = math.inf if args.noiseless else args.gamma
    lam = args.lam
    if args.lcr2 is not None:
        if lam is not None:
            raise ValueError("--lambda and --lambda-c-r2 are mutually exclusive")
        lam = args.lcr2 / (compute_c(args.alpha, args.theta) * args.R**2)
    if lam is None:
        raise ValueError("either --lambda or --lambda-c-r2 is required")
    return SystemParams(lam=lam, R=args.R, alpha=args.alpha, theta=args.theta,
                        gamma=gamma, q=args.q, xi=args.xi)


def sim_config_from_args(params: SystemParams, args: argparse.Namespace) -> SimConfig:
    return SimConfig(
        params=params, area_side=args.area_side, slots=args.slots,
        realizations=args.realizations, seed=args.seed,
        warmup_fraction=args.warmup, interference_cutoff=args.cutoff,
        boundary=args.boundary, far_field_compensation=args.far_field,
        workers=args.workers,
    )


# ---------------------------------------------------------------------------
# single-record commands
# ---------------------------------------------------------------------------

def _record_solve(params: SystemParams) -> dict:
    sol = solve_fixed_point(params)
    cls = classify_regime(params)
    consts = derive_constants(params)
    return {
        "p": sol.selected, "p_A": sol.p_A, "p_S": sol.p_S, "p_L": sol.p_L,
        "regime": str(sol.regime), "n_roots": len(sol.roots),
        "xi_low": cls.xi_low, "xi_high": cls.xi_high,
        "lcr2": consts.lcr2, "K": consts.K, "c": consts.c,
    }


def _record_aoi(params: SystemParams) -> dict:
    res = analytical_peak_aoi(params)
    return {
        "a_p": res.a_p, "p_L": res.p_used,
        "mean_service": res.mean_service,
        "mean_interdeparture": res.mean_interdeparture,
    }


def _record_optimize(params: SystemParams, command: str) -> dict:
    fn = {"optimize-q": optimize_q, "optimize-xi": optimize_xi,
          "optimize-joint": optimize_joint}[command]
    res = fn(params)
    return {
        "q_star": res.q_opt, "xi_star": res.xi_opt, "a_p_opt": res.a_p_opt,
        "branch": str(res.branch), "p_at_opt": res.p_at_opt,
        "p_star": res.p_star,
    }


def _record_simulate(params: SystemParams, args: argparse.Namespace) -> dict:
    stats = run_simulation(sim_config_from_args(params, args), backend=args.backend)
    return {
        "peak_aoi_mean": stats.peak_aoi_mean,
        "peak_aoi_ci95": stats.peak_aoi_ci95,
        "success_rate": stats.success_rate,
        "success_rate_ci95": stats.success_rate_ci95,
        "success_count": stats.success_count,
        "drops": stats.drops,
        "empty_fraction": stats.empty_fraction,
        "realizations_used": stats.realizations_used,
        "realizations_excluded": stats.realizations_excluded,
        "backend": stats.backend,
    }


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _axis_values(args: argparse.Namespace) -> list[float]:
    if args.values is not None:
        vals = [float(v) for v in args.values.split(",") if v.strip()]
        if not vals:
            raise ValueError("--values is empty")
        return vals
    if args.start is None or args.stop is None or args.count is None:
        raise ValueError("sweep needs --values or all of --from/--to/--count")
    if args.count < 2:
        raise ValueError("--count must be >= 2")
    n = args.count
    if args.log:
        if args.start <= 0 or args.stop <= 0:
            raise ValueError("--log grid requires positive endpoints")
        ratio = (args.stop / args.start) ** (1.0 / (n - 1))
        return [args.start * ratio**i for i in range(n)]
    step = (args.stop - args.start) / (n - 1)
    return [args.start + step * i for i in range(n)]


def sweep_row(axis: str, value: float, params: SystemParams,
              tasks: tuple[str, ...], args: argparse.Namespace) -> dict:
    """One output row of the sweep table; absent quantities stay None."""
    row: dict = dict.fromkeys(SWEEP_COLUMNS)
    row["axis_name"] = axis
    row["axis_value"] = value
    if "solve" in tasks or "aoi" in tasks:
        sol = solve_fixed_point(params)
        row["p_A"], row["p_S"], row["p_L"] = sol.p_A, sol.p_S, sol.p_L
        row["regime"] = str(sol.regime)
        if "aoi" in tasks:
            row["a_p_analytical"] = peak_aoi(params, sol.selected).a_p
    for task in ("optimize-q", "optimize-xi", "optimize-joint"):
        if task in tasks:
            rec = _record_optimize(params, task)
            row["q_star"] = rec["q_star"]
            row["xi_star"] = rec["xi_star"]
            row["a_p_opt"] = rec["a_p_opt"]
            row["branch"] = rec["branch"]
    if "simulate" in tasks:
        stats = run_simulation(sim_config_from_args(params, args),
                               backend=args.backend)
        row["a_p_sim"] = stats.peak_aoi_mean
        row["ci95"] = stats.peak_aoi_ci95
        row["success_rate_sim"] = stats.success_rate
    return row


def _sweep_point(packed) -> dict:
    axis, value, params, tasks, args = packed
    return sweep_row(axis, value, params, tasks, args)


def run_sweep(args: argparse.Namespace) -> list[dict]:
    tasks = tuple(t.strip() for t in args.tasks.split(",") if t.strip())
    unknown = set(tasks) - set(SWEEP_TASKS)
    if unknown:
        raise ValueError(f"unknown sweep tasks: {sorted(unknown)}")
    values = _axis_values(args)
    field = AXIS_PARAMS[args.axis]

    if args.lam is None and args.lcr2 is None and field == "lam":
        args.lam = values[0]  # placeholder; replaced per point below
    base = params_from_args(args)
    points = [(args.axis, v, base.replace(**{field: v}), tasks, args)
              for v in values]
    if args.workers > 1:
        # simulate already parallelizes realizations; points parallelize here
        inner = argparse.Namespace(**vars(args))
        inner.workers = 1
        points = [(a, v, p, t, inner) for a, v, p, t, _ in points]
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            return list(pool.map(_sweep_point, points))
    return [_sweep_point(pt) for pt in points]


# ---------------------------------------------------------------------------
# figure tables
# ---------------------------------------------------------------------------

# presets: axis grid, family parameter with its values, fixed parameters
FIGURES = {
    "fig3": dict(axis="lambda", grid=(0.005, 0.05, 10),
                 family=("xi", (0.3, 0.6, 0.9)),
                 fixed=dict(R=3.0, alpha=3.0, theta=0.2, gamma=20.0, q=1.0),
                 task="optimize-q"),
    "fig4": dict(axis="lambda", grid=(0.005, 0.05, 10),
                 family=("q", (0.2, 0.4, 0.6, 0.8)),
                 fixed=dict(R=3.0, alpha=3.0, theta=0.5, gamma=20.0, xi=1.0),
                 task="optimize-xi"),
    "fig5": dict(axis="lambda", grid=(0.01, 0.05, 5),
                 family=("R", (1.0, 2.0, 3.0)),
                 fixed=dict(alpha=3.0, theta=0.2, gamma=20.0, q=1.0, xi=1.0),
                 task="aoi+sim"),
    "fig6": dict(axis="q", grid=(0.1, 1.0, 10),
                 family=("lambda", (0.01, 0.03, 0.05)),
                 fixed=dict(R=3.0, alpha=3.0, theta=0.8, gamma=20.0, xi=1.0),
                 task="aoi+sim"),
    "fig7": dict(axis="xi", grid=(0.1, 1.0, 10),
                 family=("lambda", (0.01, 0.03, 0.05)),
                 fixed=dict(R=2.0, alpha=3.0, theta=0.8, gamma=20.0, q=1.0),
                 task="aoi+sim"),
    "fig8": dict(axis="lambda", grid=(0.005, 0.05, 10),
                 family=("curve", ("fixed", "opt-q", "opt-xi", "opt-joint")),
                 fixed=dict(R=3.0, alpha=3.0, theta=0.8, gamma=20.0, q=0.6,
                            xi=1.0),
                 task="fig8"),
}


def _figure_base_params(spec: dict, args: argparse.Namespace) -> SystemParams:
    """Preset parameters, overridden by any flag the user set explicitly."""
    fixed = dict(spec["fixed"])
    defaults = build_parser().parse_args([args.command, args.name])
    for key in ("R", "alpha", "theta", "gamma", "q", "xi"):
        if getattr(args, key) != getattr(defaults, key):
            fixed[key] = getattr(args, key)
        else:
            fixed.setdefault(key, getattr(defaults, key))
    lam = args.lam if args.lam is not None else 0.01
    return SystemParams(lam=lam, **fixed)


def run_figure(args: argparse.Namespace) -> list[dict]:
    spec = FIGURES[args.name]
    start, stop, count = spec["grid"]
    if args.start is not None:
        start = args.start
    if args.stop is not None:
        stop = args.stop
    if args.count is not None:
        count = args.count
    values = [start + (stop - start) * i / (count - 1) for i in range(count)]
    axis_field = AXIS_PARAMS.get(spec["axis"], spec["axis"])
    fam_name, fam_values = spec["family"]
    base = _figure_base_params(spec, args)

    rows = []
    for fam in fam_values:
        p_fam = base
        if fam_name != "curve":
            p_fam = base.replace(**{AXIS_PARAMS.get(fam_name, fam_name): fam})
        for v in values:
            p = p_fam.replace(**{axis_field: v})
            row = {fam_name: fam, spec["axis"]: v}
            if spec["task"] == "optimize-q":
                rec = _record_optimize(p, "optimize-q")
                row.update(q_star=rec["q_star"], a_p_opt=rec["a_p_opt"])
            elif spec["task"] == "optimize-xi":
                rec = _record_optimize(p, "optimize-xi")
                row.update(xi_star=rec["xi_star"], a_p_opt=rec["a_p_opt"])
            elif spec["task"] == "aoi+sim":
                row["a_p_analytical"] = analytical_peak_aoi(p).a_p
                stats = run_simulation(sim_config_from_args(p, args),
                                       backend=args.backend)
                row["a_p_simulated"] = stats.peak_aoi_mean
                row["ci95"] = stats.peak_aoi_ci95
            else:  # fig8 curves
                if fam == "fixed":
                    row["a_p"] = analytical_peak_aoi(p).a_p
                elif fam == "opt-q":
                    row["a_p"] = optimize_q(p.replace(xi=1.0)).a_p_opt
                elif fam == "opt-xi":
                    row["a_p"] = optimize_xi(p).a_p_opt
                else:
                    row["a_p"] = optimize_joint(p).a_p_opt
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        out = [{k: (float(_fmt(v)) if isinstance(v, float) else v)
                for k, v in row.items()} for row in rows]
        payload = out[0] if len(out) == 1 else out
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row.get(k)) for k in header])
    return buf.getvalue()


def emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


_CONFIG_DESTS = {
    "lambda": "lam", "lambda_c_r2": "lcr2", "warmup_fraction": "warmup",
    "format": "fmt", "from": "start", "to": "stop",
}
_DEST_FLAGS = {
    "lam": "--lambda", "lcr2": "--lambda-c-r2", "area_side": "--area-side",
    "warmup": "--warmup", "fmt": "--format", "start": "--from", "stop": "--to",
    "far_field": "--no-far-field",
}


def _explicit(argv: list[str], dest: str) -> bool:
    flag = _DEST_FLAGS.get(dest, "--" + dest.replace("_", "-"))
    return any(tok == flag or tok.startswith(flag + "=") for tok in argv)


def _apply_config(args: argparse.Namespace, argv: list[str]) -> None:
    """Config-file values fill in for flags the command line left unset."""
    with open(args.config, encoding="utf-8") as fh:
        loaded = json.load(fh)
    if not isinstance(loaded, dict):
        raise ValueError("config file must hold a JSON object")
    for key, val in loaded.items():
        dest = _CONFIG_DESTS.get(key.replace("-", "_"), key.replace("-", "_"))
        if hasattr(args, dest) and not _explicit(argv, dest):
            setattr(args, dest, val)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is not None:
        try:
            _apply_config(args, argv)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        except (json.JSONDecodeError, ValueError) as exc:
            print(f"error: invalid config: {exc}", file=sys.stderr)
            return EXIT_USAGE

    try:
        if args.command == "sweep":
            rows = run_sweep(args)
        elif args.command == "figure":
            rows = run_figure(args)
        else:
            params = params_from_args(args)
            if args.command == "solve":
                rows = [_record_solve(params)]
            elif args.command == "aoi":
                rows = [_record_aoi(params)]
            elif args.command == "simulate":
                rows = [_record_simulate(params, args)]
            else:
                rows = [_record_optimize(params, args.command)]
        emit(render(rows, args.fmt), args.output)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, VerificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
