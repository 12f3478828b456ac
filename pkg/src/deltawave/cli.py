"""Command-line front end.

Each subcommand builds an :class:`~deltawave.experiments.ExperimentConfig`
from an optional INI file (``--config``) overlaid with command-line flags,
runs it and exits with the experiment's status. ``batch`` runs several INI
files, optionally in parallel.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .experiments import (EXIT_CODES, ConfigError, ExperimentConfig, Kind, report, run_batch,
                          run_experiment)


def _floats(text):
    try:
        return tuple(float(s) for s in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


# flag name -> (config field, type, help)
_FLAGS = {
    "--output": ("output", str, "CSV artifact path"),
    "--data": ("data", str, "'riemann', 'smooth' or a CSV file with header x,u,v,w,z"),
    "--left": ("left", _floats, "left state 'u v w z'"),
    "--right": ("right", _floats, "right state 'u v w z'"),
    "--gamma": ("gammas", _floats, "viscosity or list of viscosities"),
    "--eps": ("eps", _floats, "list of epsilon values"),
    "--times": ("times", _floats, "sample times"),
    "--T": ("T", float, "final time"),
    "--c": ("c", float, "free dipole constant of the Volpert solution"),
    "--K": ("K", float, "constant of the beta(eps) schedule"),
    "--solution": ("solution", str, "volpert | vanishing | shadow | conjectured"),
    "--family": ("family", str, "viscous | shadow"),
    "--window": ("window", float, "moment window half-width"),
    "--entropy": ("entropy", _floats, "entropy constants 'c1 c2 c3'"),
    "--j": ("j", int, "derivative order for the moderateness probe"),
    "--component": ("component", str, "u | v | w | z"),
    "--phi": ("phi", _floats, "test function 'x0 t0 rx rt'"),
    "--x-range": ("x_range", _floats, "'x_min x_max'"),
    "--t-range": ("t_range", _floats, "'t_min t_max'"),
    "--nx": ("nx", int, "grid points in x"),
    "--nt": ("nt", int, "grid points in t"),
    "--h": ("h", _floats, "finite-difference spacing(s)"),
    "--half-width": ("half_width", float, "finite-difference domain half-width"),
    "--safety": ("safety", float, "time-step safety factor"),
    "--dt": ("dt", float, "fixed time step (fd-run; default automatic)"),
    "--rel-tol": ("rel_tol", float, "quadrature relative tolerance"),
    "--max-panels": ("max_panels", int, "quadrature panel budget"),
    "--workers": ("workers", int, "parallel workers"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deltawave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in Kind:
        p = sub.add_parser(kind.value, help=f"run a {kind.value} experiment")
        p.add_argument("--config", help="INI file with experiment settings")
        for flag, (dest, typ, help_) in _FLAGS.items():
            p.add_argument(flag, dest=dest, type=typ, default=None, help=help_)
        p.add_argument("--residuals", action="store_true", default=None,
                       help="also compute weak residuals (measure)")
        p.add_argument("--plot", action="store_true", default=None,
                       help="write a gnuplot script next to the CSV")
        p.add_argument("--dump-config", action="store_true",
                       help="print the effective INI config and exit")
    b = sub.add_parser("batch", help="run several INI configs")
    b.add_argument("configs", nargs="+")
    b.add_argument("--workers", type=int, default=1)
    return parser


def config_from_args(args) -> ExperimentConfig:
    if args.config:
        try:
            cfg = ExperimentConfig.load(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from None
        cfg.kind = Kind(args.command)
    else:
        cfg = ExperimentConfig(args.command)
    names = {f.name for f in dataclasses.fields(cfg)}
    for name, value in vars(args).items():
        if name in names and value is not None and name != "kind":
            setattr(cfg, name, value)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "batch":
            cfgs = [ExperimentConfig.load(p) for p in args.configs]
            results = run_batch(cfgs, args.workers)
            for path, res in zip(args.configs, results):
                print(f"{path}: status {res.status} {res.message}")
            return max(r.status for r in results)
        cfg = config_from_args(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CODES["config"]
    if args.dump_config:
        sys.stdout.write(cfg.dumps())
        return 0
    result = run_experiment(cfg)
    report(result)
    for path in result.artifacts:
        print(path)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
