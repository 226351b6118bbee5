"""Command-line front end reproducing the figure data sets.

Each run resolves its full configuration (parameter file, overrides,
defaults), executes one pipeline, writes CSV artifacts plus rendered PNG
figures into the output directory, and drops a JSON manifest holding the
resolved options and package version.  Re-running from a manifest with
the same code version reproduces the data outputs bit for bit.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, core, figures, linearized, plotting

DEFAULT_SEED = 20260809
OUTDIR_ENV = "QUADOPO_OUTDIR"

SUBCOMMANDS = ("undepleted", "posp", "spectra", "scan", "cluster",
               "threshold", "all-figures")


def _resolve_params(opts: dict) -> core.SystemParams:
    params = core.params_from_dict(opts["params"])
    return params


def _base_params(args) -> core.SystemParams:
    params = core.load_params(args.params) if args.params else core.SystemParams()
    if getattr(args, "chi", None) is not None:
        params = core.SystemParams(chi1=args.chi, chi2=args.chi,
                                   gamma=params.gamma, eps1=params.eps1,
                                   eps2=params.eps2,
                                   eps3_injected=params.eps3_injected)
    if getattr(args, "gamma", None) is not None:
        params = core.SystemParams(chi1=params.chi1, chi2=params.chi2,
                                   gamma=(args.gamma,) * 6, eps1=params.eps1,
                                   eps2=params.eps2,
                                   eps3_injected=params.eps3_injected)
    return params


def _with_pump_ratio(params: core.SystemParams, ratio: float,
                     inject: float) -> core.SystemParams:
    eps = ratio * core.critical_pump(params)
    from dataclasses import replace
    return replace(params, eps1=eps, eps2=eps, eps3_injected=inject)


def _write_outputs(name: str, df, outdir: Path, plots: bool,
                   title: str = "") -> list[str]:
    csv_path = outdir / f"{name}.csv"
    figures.write_csv(df, csv_path)
    outputs = [csv_path.name]
    if plots:
        png_path = outdir / f"{name}.png"
        plotting.render(name, df, png_path, title=title)
        outputs.append(png_path.name)
    return outputs


def _run_threshold(opts: dict, outdir: Path) -> list[str]:
    params = _resolve_params(opts)
    eps_c = core.critical_pump(params)
    print(f"eps_c = {eps_c:.6f}")
    return []


def _run_undepleted(opts: dict, outdir: Path) -> list[str]:
    df = figures.undepleted_correlations(
        xi=opts["xi"], xi2_ratio=opts["xi2_ratio"],
        t_max=opts["t_max"], n_points=opts["points"])
    name = "fig02" if opts["xi2_ratio"] == 1.0 else "fig03"
    return _write_outputs(name, df, outdir, opts["plots"],
                          title=f"xi2/xi1 = {opts['xi2_ratio']:g}")


def _run_posp(opts: dict, outdir: Path) -> list[str]:
    params = _resolve_params(opts)
    if opts["cavity"]:
        params = _with_pump_ratio(params, opts["eps_ratio"], opts["inject"])
        df = figures.joint_operators_cavity(
            params, n_traj=opts["trajectories"], dt=opts["dt"],
            t_final=opts["t_final"], n_frames=opts["frames"],
            seed=opts["seed"])
        return _write_outputs("fig11", df, outdir, opts["plots"],
                              title=f"eps = {opts['eps_ratio']:g} eps_c")
    df = figures.free_intensities(
        params, alpha0=opts["alpha0"], n_traj=opts["trajectories"],
        dt=opts["dt"], t_final=opts["t_final"], n_frames=opts["frames"],
        seed=opts["seed"])
    return _write_outputs("fig04", df, outdir, opts["plots"])


def _run_cluster(opts: dict, outdir: Path) -> list[str]:
    params = _resolve_params(opts)
    df = figures.joint_operators_free(
        params, alpha0=opts["alpha0"], n_traj=opts["trajectories"],
        dt=opts["dt"], t_final=opts["t_final"], n_frames=opts["frames"],
        seed=opts["seed"])
    return _write_outputs("fig10", df, outdir, opts["plots"])


def _run_spectra(opts: dict, outdir: Path) -> list[str]:
    params = _resolve_params(opts)
    params = _with_pump_ratio(params, opts["eps_ratio"], opts["inject"])
    grid = linearized.default_omega_grid(omega_max=opts["omega_max"],
                                         n_linear=opts["omega_points"])
    df, audit = figures.spectra(params, grid)
    name = "fig06" if opts["eps_ratio"] < 1.0 else "fig08"
    outputs = _write_outputs(name, df, outdir, opts["plots"],
                             title=f"eps = {opts['eps_ratio']:g} eps_c")
    audit_path = outdir / f"{name}_model.json"
    audit_path.write_text(json.dumps(audit, indent=2, sort_keys=True))
    outputs.append(audit_path.name)
    return outputs


def _run_scan(opts: dict, outdir: Path) -> list[str]:
    params = _resolve_params(opts)
    ratios = opts["ratios"]
    grid = linearized.default_omega_grid(omega_max=opts["omega_max"],
                                         n_linear=opts["omega_points"])
    df = figures.threshold_scan(params, ratios, grid,
                                inject_above=opts["inject"])
    return _write_outputs("fig09", df, outdir, opts["plots"])


def _run_all_figures(opts: dict, outdir: Path) -> list[str]:
    outputs: list[str] = []
    outputs += _run_undepleted(opts["fig02"], outdir)
    outputs += _run_undepleted(opts["fig03"], outdir)
    outputs += _run_posp(opts["fig04"], outdir)
    outputs += _run_spectra(opts["fig06"], outdir)
    outputs += _run_spectra(opts["fig08"], outdir)
    outputs += _run_scan(opts["fig09"], outdir)
    outputs += _run_cluster(opts["fig10"], outdir)
    outputs += _run_posp(opts["fig11"], outdir)
    return outputs


_HANDLERS = {
    "threshold": _run_threshold,
    "undepleted": _run_undepleted,
    "posp": _run_posp,
    "cluster": _run_cluster,
    "spectra": _run_spectra,
    "scan": _run_scan,
    "all-figures": _run_all_figures,
}


def _add_common(sub, *, seeded=False):
    sub.add_argument("--outdir", default=None,
                     help=f"output directory (default: ${OUTDIR_ENV} or .)")
    sub.add_argument("--params", default=None,
                     help="TOML or JSON parameter file")
    sub.add_argument("--chi", type=float, default=None,
                     help="set both nonlinearities")
    sub.add_argument("--gamma", type=float, default=None,
                     help="set all six loss rates")
    sub.add_argument("--no-plots", action="store_true",
                     help="skip PNG rendering")
    if seeded:
        sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sub.add_argument("--trajectories", type=int, default=None)
        sub.add_argument("--dt", type=float, default=None)
        sub.add_argument("--t-final", type=float, default=None)
        sub.add_argument("--frames", type=int, default=None)
        sub.add_argument("--paper-scale", action="store_true",
                         help="use the published trajectory counts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadopo",
        description="Entanglement and cluster-state analysis of a "
                    "quadruply concurrent optical parametric oscillator.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--rerun-manifest", default=None, metavar="FILE",
                        help="re-run a previous invocation from its manifest")
    parser.add_argument("--outdir", default=None,
                        help="output directory override for --rerun-manifest")
    subs = parser.add_subparsers(dest="subcommand")

    p = subs.add_parser("threshold", help="print the critical pump amplitude")
    _add_common(p)

    p = subs.add_parser("undepleted",
                        help="VLF correlations in the undepleted regime")
    _add_common(p)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--xi2-ratio", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=301)

    p = subs.add_parser("posp", help="positive-P trajectory ensembles")
    _add_common(p, seeded=True)
    p.add_argument("--cavity", action="store_true")
    p.add_argument("--alpha0", type=float, default=1000.0)
    p.add_argument("--eps-ratio", type=float, default=figures.CAVITY_JOINT_RATIO)
    p.add_argument("--inject", type=float, default=0.0)

    p = subs.add_parser("cluster",
                        help="joint-operator variances, undepleted vs positive-P")
    _add_common(p, seeded=True)
    p.add_argument("--alpha0", type=float, default=1000.0)

    p = subs.add_parser("spectra", help="output spectral correlations")
    _add_common(p)
    p.add_argument("--eps-ratio", type=float, default=0.987)
    p.add_argument("--inject", type=float, default=0.0)
    p.add_argument("--omega-max", type=float, default=20.0)
    p.add_argument("--omega-points", type=int, default=199)

    p = subs.add_parser("scan", help="entanglement maxima vs pump ratio")
    _add_common(p)
    p.add_argument("--ratio-min", type=float, default=None)
    p.add_argument("--ratio-max", type=float, default=None)
    p.add_argument("--ratio-step", type=float, default=None)
    p.add_argument("--inject", type=float, default=0.5)
    p.add_argument("--omega-max", type=float, default=20.0)
    p.add_argument("--omega-points", type=int, default=149)

    p = subs.add_parser("all-figures", help="reproduce every figure data set")
    _add_common(p, seeded=True)
    p.add_argument("--omega-points", type=int, default=199)
    return parser


def _resolve_opts(args) -> dict:
    """Fill every default so the manifest pins the full configuration."""
    sub = args.subcommand
    params = _base_params(args)
    opts: dict = {"params": params.to_dict(),
                  "plots": not getattr(args, "no_plots", False)}

    if sub == "threshold":
        return opts
    if sub == "undepleted":
        opts.update(xi=args.xi, xi2_ratio=args.xi2_ratio, t_max=args.t_max,
                    points=args.points)
        return opts
    if sub == "posp":
        cavity = args.cavity
        paper = args.paper_scale
        default_traj = (figures.PAPER_TRAJECTORIES_CAVITY if paper else
                        figures.DESK_TRAJECTORIES_CAVITY) if cavity else \
                       (figures.PAPER_TRAJECTORIES_FREE if paper else
                        figures.DESK_TRAJECTORIES_FREE)
        opts.update(
            cavity=cavity,
            trajectories=args.trajectories or default_traj,
            dt=args.dt or (5e-3 if cavity else 2e-4),
            t_final=args.t_final or (15.0 if cavity else 0.35),
            frames=args.frames or (76 if cavity else 71),
            seed=args.seed, alpha0=args.alpha0,
            eps_ratio=args.eps_ratio, inject=args.inject)
        return opts
    if sub == "cluster":
        paper = args.paper_scale
        opts.update(
            trajectories=args.trajectories or
            (figures.PAPER_TRAJECTORIES_FREE if paper else
             figures.DESK_TRAJECTORIES_FREE),
            dt=args.dt or 2e-4, t_final=args.t_final or 0.35,
            frames=args.frames or 71, seed=args.seed, alpha0=args.alpha0)
        return opts
    if sub == "spectra":
        opts.update(eps_ratio=args.eps_ratio, inject=args.inject,
                    omega_max=args.omega_max, omega_points=args.omega_points)
        return opts
    if sub == "scan":
        if args.ratio_min is not None or args.ratio_max is not None:
            lo = args.ratio_min if args.ratio_min is not None else 0.3
            hi = args.ratio_max if args.ratio_max is not None else 1.8
            step = args.ratio_step if args.ratio_step is not None else 0.05
            import numpy as np
            ratios = np.round(np.arange(lo, hi + step / 2, step), 6).tolist()
        else:
            ratios = figures.default_scan_ratios().tolist()
        opts.update(ratios=ratios, inject=args.inject,
                    omega_max=args.omega_max, omega_points=args.omega_points)
        return opts
    if sub == "all-figures":
        paper = args.paper_scale
        traj_free = args.trajectories or (
            figures.PAPER_TRAJECTORIES_FREE if paper else
            figures.DESK_TRAJECTORIES_FREE)
        traj_cavity = args.trajectories or (
            figures.PAPER_TRAJECTORIES_CAVITY if paper else
            figures.DESK_TRAJECTORIES_CAVITY)
        base = {"params": opts["params"], "plots": opts["plots"]}
        ens_free = dict(base, cavity=False, trajectories=traj_free,
                        dt=args.dt or 2e-4, t_final=args.t_final or 0.35,
                        frames=args.frames or 71, seed=args.seed,
                        alpha0=1000.0, eps_ratio=figures.CAVITY_JOINT_RATIO,
                        inject=0.0)
        return {
            "params": opts["params"], "plots": opts["plots"],
            "fig02": dict(base, xi=1.0, xi2_ratio=1.0, t_max=3.0, points=301),
            "fig03": dict(base, xi=1.0, xi2_ratio=0.5, t_max=3.0, points=301),
            "fig04": ens_free,
            "fig06": dict(base, eps_ratio=0.987, inject=0.0, omega_max=20.0,
                          omega_points=args.omega_points),
            "fig08": dict(base, eps_ratio=1.49, inject=0.5, omega_max=20.0,
                          omega_points=args.omega_points),
            "fig09": dict(base, ratios=figures.default_scan_ratios().tolist(),
                          inject=0.5, omega_max=20.0, omega_points=149),
            "fig10": dict(base, trajectories=traj_free, dt=args.dt or 2e-4,
                          t_final=args.t_final or 0.35,
                          frames=args.frames or 71, seed=args.seed,
                          alpha0=1000.0),
            "fig11": dict(base, cavity=True, trajectories=traj_cavity,
                          dt=5e-3, t_final=15.0, frames=76, seed=args.seed,
                          alpha0=0.0, eps_ratio=figures.CAVITY_JOINT_RATIO,
                          inject=0.0),
        }
    raise ValueError(f"unknown subcommand {sub!r}")


def _manifest_path(outdir: Path, subcommand: str, outputs: list[str]) -> Path:
    # Named after the figure so runs of one subcommand with different
    # targets (e.g. posp with and without --cavity) can share a directory.
    if outputs and subcommand != "all-figures":
        stem = Path(outputs[0]).stem
    else:
        stem = subcommand.replace("-", "_")
    return outdir / f"{stem}_manifest.json"


def _execute(subcommand: str, opts: dict, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = _HANDLERS[subcommand](opts, outdir)
    manifest = {"subcommand": subcommand, "options": opts,
                "version": __version__, "outputs": outputs}
    _manifest_path(outdir, subcommand, outputs).write_text(
        json.dumps(manifest, indent=2, sort_keys=True))


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    try:
        if args.rerun_manifest:
            manifest = json.loads(Path(args.rerun_manifest).read_text())
            subcommand = manifest["subcommand"]
            if subcommand not in _HANDLERS:
                raise ValueError(f"manifest names unknown subcommand "
                                 f"{subcommand!r}")
            outdir = Path(args.outdir or os.environ.get(OUTDIR_ENV, "."))
            _execute(subcommand, manifest["options"], outdir)
            return 0
        if not args.subcommand:
            parser.print_usage(sys.stderr)
            return 2
        outdir = Path(getattr(args, "outdir", None)
                      or os.environ.get(OUTDIR_ENV, "."))
        opts = _resolve_opts(args)
        _execute(args.subcommand, opts, outdir)
        return 0
    except ValueError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
