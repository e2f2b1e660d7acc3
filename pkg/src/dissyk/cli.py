"""Command-line entry point.

Subcommands:

  lanczos   coefficients for one configuration (disorder averaged)
  sweep     parameter grid + fits from a JSON config
  evolve    Krylov-chain trajectory: Z(t), K(t), OTOC, phi_n(t)
  analytic  closed-form curves on a parameter grid
  verify    fast oracle/invariant suite (PASS/FAIL per check)

Exit codes: 0 success, 1 validation failure, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import closedforms as cf
from .chain import NumericalFailure, evolve_wavefunctions, otoc_from_wavefunctions
from .harness import (
    RunConfig,
    point_record,
    run_point,
    run_realization,
    run_sweep,
    write_point_csv,
    write_sweep,
)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dissyk", description="Operator growth in dissipative SYK models"
    )
    sub = parser.add_subparsers(required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON RunConfig file")
    common.add_argument("--seed", type=int, help="override base seed")
    common.add_argument("--realizations", type=int, help="override realization count")
    common.add_argument("--out-dir", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, help="worker threads for realizations")

    p = sub.add_parser("lanczos", parents=[common], help="coefficients for one config")
    p.add_argument("--n", type=int, help="number of Majorana fermions")
    p.add_argument("--q", type=int, help="SYK locality")
    p.add_argument("--j", type=float, help="coupling scale J")
    p.add_argument("--dissipation", choices=("none", "linear", "p-body"))
    p.add_argument("--lam", type=float, help="linear dissipation strength")
    p.add_argument("--p", type=int, help="jump locality for p-body dissipation")
    p.add_argument("--m", type=int, help="number of jump operators")
    p.add_argument("--v", type=float, help="p-body dissipation strength")
    p.add_argument("--steps", type=int, help="bi-Lanczos steps")
    p.set_defaults(func=_cmd_lanczos)

    p = sub.add_parser("sweep", parents=[common], help="parameter grid + fits")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("evolve", parents=[common], help="Krylov-chain trajectory")
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--t-points", type=int, default=101)
    p.add_argument("--k-max", type=int, help="chain truncation (default: all steps)")
    p.add_argument("--n-store", type=int, default=4, help="wavefunctions written to CSV")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("analytic", parents=[common], help="closed-form curves")
    p.add_argument(
        "--curve",
        required=True,
        choices=("kcomplexity", "otoc", "autocorrelation", "spectral", "wavefunctions"),
    )
    p.add_argument("--u", type=float, default=0.1)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--q", type=int, default=300)
    p.add_argument("--n", type=int, default=100, help="N for the OTOC prefactor")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--t-points", type=int, default=101)
    p.add_argument("--omega-max", type=float, default=10.0)
    p.add_argument("--n-max", type=int, default=8, help="wavefunction count")
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("verify", parents=[common], help="fast oracle/invariant suite")
    p.set_defaults(func=_cmd_verify)
    return parser


def _load_config(args) -> RunConfig:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = RunConfig.from_json(fh.read())
    else:
        cfg = RunConfig()
    overrides = {}
    if getattr(args, "n", None) is not None and args.func is _cmd_lanczos:
        overrides["n_fermions"] = args.n
    for attr, field_name in (
        ("q", "q"),
        ("j", "j"),
        ("steps", "max_steps"),
        ("seed", "base_seed"),
        ("realizations", "realizations"),
        ("out_dir", "out_dir"),
        ("threads", "threads"),
    ):
        val = getattr(args, attr, None)
        if val is not None:
            overrides[field_name] = val
    if getattr(args, "dissipation", None) is not None:
        if args.dissipation == "none":
            overrides["dissipation"] = None
        elif args.dissipation == "linear":
            overrides["dissipation"] = {"class": "linear", "lam": args.lam or 0.0}
        else:
            overrides["dissipation"] = {
                "class": "p-body",
                "p": args.p or 2,
                "M": args.m or 1,
                "V": args.v or 0.0,
            }
    from dataclasses import replace

    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _cmd_lanczos(args) -> int:
    cfg = _load_config(args)
    point = run_point(cfg)
    record = point_record(point)
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        write_point_csv(os.path.join(cfg.out_dir, "coefficients.csv"), point)
        with open(os.path.join(cfg.out_dir, "fits.json"), "w") as fh:
            json.dump(record, fh, sort_keys=True, indent=2)
    print(json.dumps(record, sort_keys=True))
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    result = run_sweep(cfg)
    if cfg.out_dir and not result.points and result.failures:
        write_sweep(cfg.out_dir, result)
    summary = {
        "points": [point_record(p) for p in result.points],
        "failures": result.failures,
        "power_law": result.power_law,
    }
    print(json.dumps(summary, sort_keys=True))
    return 2 if result.failures and not result.points else 0


def _cmd_evolve(args) -> int:
    cfg = _load_config(args)
    res = run_realization(cfg, 0)
    t_grid = np.linspace(0.0, args.t_max, args.t_points)
    traj = evolve_wavefunctions(res.tridiagonal, t_grid, k_max=args.k_max)
    otoc = otoc_from_wavefunctions(
        traj, cfg.q, cfg.n_fermions, p=len(cfg.initial_operator)
    )
    out_dir = cfg.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "trajectory.csv")
    traj.to_csv(path, n_store=args.n_store, otoc=otoc)
    print(f"wrote {path} (K(t_max) = {traj.k[-1]:.6g}, Z(t_max) = {traj.z[-1]:.6g})")
    return 0


def _cmd_analytic(args) -> int:
    import csv

    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"analytic_{args.curve}.csv")
    t = np.linspace(0.0, args.t_max, args.t_points)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if args.curve == "kcomplexity":
            cp = cf.ChainParams(u=args.u, gamma=args.gamma, eta=args.eta)
            w.writerow(["t", "K"])
            for ti, ki in zip(t, cf.k_complexity_closed_form(cp, t)):
                w.writerow([repr(float(ti)), repr(float(ki))])
        elif args.curve == "otoc":
            w.writerow(["t", "otoc"])
            vals = cf.otoc_closed_form(args.u, args.eta, args.q, args.n, t, gamma=args.gamma)
            for ti, oi in zip(t, vals):
                w.writerow([repr(float(ti)), repr(float(oi))])
        elif args.curve == "autocorrelation":
            w.writerow(["t", "C"])
            vals = cf.model_autocorrelation(args.alpha, args.mu, t)
            for ti, ci in zip(t, vals):
                w.writerow([repr(float(ti)), repr(float(ci))])
        elif args.curve == "spectral":
            omega = np.linspace(-args.omega_max, args.omega_max, args.t_points)
            w.writerow(["omega", "re_phi", "im_phi"])
            vals = cf.spectral_function(args.alpha, args.mu, omega)
            for oi, vi in zip(omega, vals):
                w.writerow([repr(float(oi)), repr(vi.real), repr(vi.imag)])
        else:  # wavefunctions
            cp = cf.ChainParams(u=args.u, gamma=args.gamma, eta=args.eta)
            phi = cf.wavefunctions_closed_form(cp, args.n_max, t)
            w.writerow(["t"] + [f"phi{n}" for n in range(args.n_max)])
            for i, ti in enumerate(t):
                w.writerow([repr(float(ti))] + [repr(float(x)) for x in phi[i]])
    print(f"wrote {path}")
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_verification

    ok = run_verification(verbose=True)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
