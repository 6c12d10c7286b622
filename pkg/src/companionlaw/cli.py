"""``companionlaw`` command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 a diagnostic threshold failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import besov, boundary, residuals, snapshot, synth, systems
from .config import Config, load_config
from .grid import make_grid, margin_region
from .mollify import mollifier_kernel

EXIT_OK, EXIT_USAGE, EXIT_THRESHOLD = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------- output helpers

def _write(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_sweep(report: besov.SweepReport, args, extra: dict | None = None) -> None:
    if args.format == "json":
        payload = json.loads(report.to_json())
        if extra:
            payload.update(extra)
        _write(json.dumps(payload, indent=2), args.output)
    else:
        _write(report.to_csv(), args.output)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


# --------------------------------------------------------------------------- shared resolution

def _system(name, cfg: Config, k=None):
    name = name or cfg.system
    if not name:
        raise UsageError("no system given (use --system or [run] system in the config)")
    if name not in systems.NAMES:
        raise UsageError(f"unknown system {name!r}; known: {', '.join(systems.NAMES)}")
    law = None
    if name in ("comp-euler", "comp-mhd"):
        law = systems.PolytropicPressure(cfg.pressure_kappa, cfg.pressure_gamma)
    return systems.register_system(name, k=k, pressure_law=law)


def _load(path):
    try:
        return snapshot.load(path)
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read snapshot: {path}") from exc


def _epsilons(cfg: Config, grid, axes) -> list[float]:
    if cfg.epsilons:
        return sorted(cfg.epsilons, reverse=True)
    return besov.default_epsilons(grid, axes, cfg.eps_top, cfg.eps_bottom, cfg.eps_ratio)


def _kernel_axes(text):
    return None if text == "all" else "space"


def _axis_indices(grid, axes):
    if axes is None:
        return tuple(range(grid.ndim))
    return grid.spatial_axes


def _merge(cfg: Config, args) -> Config:
    updates = {}
    for name in ("seed", "samples"):
        val = getattr(args, name, None)
        if val is not None:
            updates[name] = val
    if getattr(args, "epsilons", None):
        updates["epsilons"] = tuple(args.epsilons)
    if getattr(args, "region_margin", None) is not None:
        updates["region_margin"] = args.region_margin
    if getattr(args, "window", None):
        updates["window"] = tuple(args.window)
    if getattr(args, "gamma", None) is not None:
        updates["pressure_gamma"] = args.gamma
    if getattr(args, "kappa", None) is not None:
        updates["pressure_kappa"] = args.kappa
    return replace(cfg, **updates)


# --------------------------------------------------------------------------- subcommands

def cmd_systems(args, cfg):
    if args.action == "list":
        _write(_dump(list(systems.NAMES)), None)
        return EXIT_OK
    if not args.name:
        raise UsageError("systems describe needs a system name")
    _write(_dump(_system(args.name, cfg, args.k).describe()), None)
    return EXIT_OK


def _synth_grid(args, periodic_default):
    ext = args.extents
    k = len(ext)
    periodic = args.periodic if args.periodic is not None else periodic_default(k)
    if args.nt is not None:
        ext = [args.nt] + ext
        spacings = [args.t_final / args.nt] + [1.0 / n for n in args.extents]
        periodic = [False] + list(periodic)
    else:
        spacings = [1.0 / n for n in ext]
    if len(periodic) != len(ext):
        raise UsageError("--periodic needs one flag per spatial axis")
    return make_grid(len(args.extents), ext, spacings, periodic, has_time=args.nt is not None)


def _flags(text):
    return [c in "1tTyY" for c in text.split(",")]


def cmd_synth(args, cfg):
    seed = cfg.seed
    if args.kind == "holder":
        grid = _synth_grid(args, lambda k: [True] * k)
        f = synth.holder_field(grid, args.alpha, args.components, seed, args.cutoff)
    elif args.kind == "shock":
        if args.nt is None:
            raise UsageError("shock needs --nt")
        grid = _synth_grid(args, lambda k: [False] * k)
        f = synth.burgers_shock(grid, args.u_left, args.u_right, args.x0)
    elif args.kind == "shear":
        grid = _synth_grid(args, lambda k: [True, False])
        ny = grid.extents[grid.spatial_axes[1]]
        profile = None
        if args.alpha is not None:
            profile = synth.holder_profile(ny, args.alpha, seed, args.cutoff)
        f = synth.shear_flow(grid, profile, args.pressure)
    else:
        system = _system(args.system, cfg, len(args.extents))
        grid = _synth_grid(args, lambda k: [True] * k)
        f = synth.manufactured_state(system, grid, args.mode, seed, args.alpha or 0.5)
    snapshot.save(f, args.output)
    _write(_dump({"output": str(args.output), "shape": list(f.values.shape),
                  "components": list(f.component_names)}), None)
    return EXIT_OK


def cmd_structure(args, cfg):
    f = _load(args.input)
    axes = _kernel_axes(args.axes)
    region = margin_region(f.grid, cfg.region_margin) if cfg.region_margin > 0 else None
    eps = _epsilons(cfg, f.grid, _axis_indices(f.grid, axes))
    label = f"margin={cfg.region_margin:g}"
    report = besov.vmo_sweep(f, region, eps, axes, label)
    _emit_sweep(report, args)
    if args.min_exponent is not None and (report.fitted_exponent or -math.inf) < args.min_exponent:
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_check_compat(args, cfg):
    system = _system(args.system, cfg, args.k)
    rep = systems.check_compatibility(system, cfg.samples, cfg.seed)
    out = rep.as_dict()
    out["residual_tolerance"] = cfg.compat_residual
    out["jacobian_tolerance"] = cfg.jacobian_rel
    ok = rep.max_residual <= cfg.compat_residual and rep.max_jacobian_rel_error <= cfg.jacobian_rel
    out["passed"] = ok
    _write(_dump(out), args.output)
    return EXIT_OK if ok else EXIT_THRESHOLD


def cmd_dissipation(args, cfg):
    f = _load(args.input)
    system = _system(args.system, cfg, f.grid.spatial_dims)
    axes = _kernel_axes(args.axes)
    if args.epsilon is not None:
        eps = [args.epsilon]
    elif args.eps_sweep:
        eps = _epsilons(cfg, f.grid, _axis_indices(f.grid, axes))
    else:
        raise UsageError("dissipation needs --epsilon or --eps-sweep")
    lo, hi = cfg.window
    spatial = f.grid.spatial_axes

    def region(*mesh):
        m = np.ones(f.grid.shape, dtype=bool)
        for a in spatial:
            if not f.grid.periodic[a]:
                length = f.grid.lengths[a]
                m &= (mesh[a] >= lo * length) & (mesh[a] <= hi * length)
        return m

    signed = []
    density = None
    for e in eps:
        density = residuals.dissipation_density(f, system, mollifier_kernel(f.grid, e, axes))
        signed.append(residuals.integrate(density, region, per_unit_time=f.grid.has_time))
    if args.density_output and density is not None:
        snapshot.save(density, args.density_output)
    if len(eps) == 1:
        _write(_dump({"epsilon": eps[0], "integral": signed[0], "window": [lo, hi]}), args.output)
        return EXIT_OK
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = besov.SweepReport.from_values(eps, [abs(s) for s in signed], "|int D_eps| over window")
    _emit_sweep(report, args, {"signed": signed})
    return EXIT_OK


def cmd_boundary_flux(args, cfg):
    f = _load(args.input)
    system = _system(args.system, cfg, f.grid.spatial_dims)
    sgrid = f.grid.spatial_grid()
    bounded = sgrid.bounded_spatial_axes
    if not bounded:
        raise UsageError("boundary-flux needs a bounded spatial axis")
    if cfg.epsilons:
        eps = sorted(cfg.epsilons, reverse=True)
    else:
        # shells are a quarter of epsilon wide, so sweep four times coarser
        eps = besov.default_epsilons(sgrid, bounded, 4 * cfg.eps_top, 4 * cfg.eps_bottom, cfg.eps_ratio)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = boundary.shell_sweep(f, system, eps)
    _emit_sweep(report, args, {"minimum": min(report.values)})
    return EXIT_OK


def cmd_balance(args, cfg):
    f = _load(args.input)
    system = _system(args.system, cfg, f.grid.spatial_dims)
    kernel = None
    if args.kernel_epsilon is not None:
        kernel = mollifier_kernel(f.grid, args.kernel_epsilon, "space")
    rep = boundary.global_balance(f, system, args.epsilon, kernel)
    payload = json.loads(rep.to_json())
    payload["relative_closure"] = rep.relative_closure()
    payload["tolerance"] = cfg.balance_rel
    ok = rep.closes(cfg.balance_rel)
    payload["closes"] = ok
    _write(_dump(payload), args.output)
    return EXIT_OK if ok else EXIT_THRESHOLD


def cmd_scaling(args, cfg):
    if args.action == "fit":
        text = Path(args.input).read_text() if args.input else sys.stdin.read()
        report = besov.SweepReport.from_csv(text)
        if report.fitted_exponent is None:
            raise UsageError("fewer than 4 positive values in the sweep")
        out = {"exponent": report.fitted_exponent, "r2": report.fit_quality, "points": len(report.values),
               "minimum": min(report.values)}
        _write(_dump(out), args.output)
        if args.min_exponent is not None and report.fitted_exponent < args.min_exponent:
            return EXIT_THRESHOLD
        return EXIT_OK
    res = besov.exponent_condition_check(args.alpha, args.beta, args.criterion)
    _write(_dump(res.__dict__), args.output)
    return EXIT_THRESHOLD if args.require and not res.satisfied else EXIT_OK


# --------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="companionlaw", description="Entropy-conservation diagnostics for sampled fields.")
    p.add_argument("--config", help="INI configuration file")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("systems", help="list or describe registry systems")
    s.add_argument("action", choices=("list", "describe"))
    s.add_argument("name", nargs="?")
    s.add_argument("--k", type=int)
    s.add_argument("--gamma", type=float)
    s.add_argument("--kappa", type=float)
    s.set_defaults(func=cmd_systems)

    s = sub.add_parser("synth", help="write a synthetic field snapshot")
    s.add_argument("kind", choices=("holder", "shock", "shear", "manufactured"))
    s.add_argument("--extents", type=int, nargs="+", required=True, help="spatial point counts")
    s.add_argument("--nt", type=int, help="number of time snapshots (adds a time axis)")
    s.add_argument("--t-final", type=float, default=1.0)
    s.add_argument("--periodic", type=_flags, help="comma list of spatial periodic flags, e.g. 1,0")
    s.add_argument("--alpha", type=float)
    s.add_argument("--components", type=int, default=1)
    s.add_argument("--cutoff", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--u-left", type=float, default=1.0)
    s.add_argument("--u-right", type=float, default=-1.0)
    s.add_argument("--x0", type=float, default=0.5)
    s.add_argument("--pressure", type=float, default=0.0)
    s.add_argument("--system")
    s.add_argument("--mode", choices=synth.MODES, default="smooth-random")
    s.add_argument("--gamma", type=float)
    s.add_argument("--kappa", type=float)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    def sweep_opts(sp):
        sp.add_argument("--epsilons", type=float, nargs="+")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("-o", "--output")

    s = sub.add_parser("structure", help="Besov-VMO modulus sweep")
    s.add_argument("--input", required=True)
    s.add_argument("--region-margin", type=float)
    s.add_argument("--axes", choices=("all", "space"), default="all")
    s.add_argument("--min-exponent", type=float)
    sweep_opts(s)
    s.set_defaults(func=cmd_structure)

    s = sub.add_parser("check-compat", help="verify multiplier compatibility relations")
    s.add_argument("--system")
    s.add_argument("--k", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--gamma", type=float)
    s.add_argument("--kappa", type=float)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_check_compat)

    s = sub.add_parser("dissipation", help="integrated dissipation density")
    s.add_argument("--system")
    s.add_argument("--input", required=True)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--eps-sweep", action="store_true")
    s.add_argument("--axes", choices=("all", "space"), default="space")
    s.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    s.add_argument("--density-output")
    s.add_argument("--gamma", type=float)
    s.add_argument("--kappa", type=float)
    sweep_opts(s)
    s.set_defaults(func=cmd_dissipation)

    s = sub.add_parser("boundary-flux", help="boundary shell integral sweep")
    s.add_argument("--system")
    s.add_argument("--input", required=True)
    s.add_argument("--gamma", type=float)
    s.add_argument("--kappa", type=float)
    sweep_opts(s)
    s.set_defaults(func=cmd_boundary_flux)

    s = sub.add_parser("balance", help="global entropy balance ledger")
    s.add_argument("--system")
    s.add_argument("--input", required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--kernel-epsilon", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--kappa", type=float)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_balance)

    s = sub.add_parser("scaling", help="fit a sweep or check an exponent condition")
    ss = s.add_subparsers(dest="action", parser_class=_Parser)
    f = ss.add_parser("fit")
    f.add_argument("--input", help="sweep CSV (stdin when omitted)")
    f.add_argument("--min-exponent", type=float)
    f.add_argument("-o", "--output")
    c = ss.add_parser("condition")
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--beta", type=float, required=True)
    c.add_argument("--criterion", choices=besov.CRITERIA, required=True)
    c.add_argument("--require", action="store_true", help="exit 2 when the condition fails")
    c.add_argument("-o", "--output")
    s.set_defaults(func=cmd_scaling)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if args.command == "scaling" and args.action is None:
            raise UsageError("scaling needs an action: fit or condition")
        cfg = _merge(load_config(args.config), args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
