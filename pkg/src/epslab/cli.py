"""Command-line campaign driver.

Subcommands: `propagate` (single theory, emit an ephemeris CSV), `campaign`
(full comparison incl. CSV/report artifacts), `bench` (cost report). Config
files are flat key=value text; EPSLAB_OUTDIR overrides the output directory.
Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _load_config(args) -> "CampaignConfig":
    from .harness import CampaignConfig, parse_config

    if args.config:
        cfg = parse_config(args.config)
    else:
        cfg = CampaignConfig()
        out = os.environ.get("EPSLAB_OUTDIR")
        if out:
            cfg = replace(cfg, outdir=out)
    if getattr(args, "out", None):
        cfg = replace(cfg, outdir=args.out)
    return cfg


def _cmd_campaign(args) -> int:
    from .harness import run_campaign

    cfg = _load_config(args)
    res = run_campaign(cfg, progress=lambda msg: print(f"[campaign] {msg}", flush=True))
    print(f"[campaign] artifacts in {res.outdir} ({res.runtime_s:.1f} s)")
    for key, fname in sorted(res.files.items()):
        print(f"  {key}: {fname}")
    return EXIT_OK


def _cmd_propagate(args) -> int:
    from . import classic_theory as ct
    from . import eps_theory as eps
    from .harness import _write_csv

    cfg = _load_config(args)
    model = cfg.model
    x0 = cfg.initial_state()
    horizon = cfg.horizon_days * 86400.0
    ts = np.arange(0.0, horizon + 0.5 * cfg.cadence_s, cfg.cadence_s)
    rows = []
    if args.theory == "classic":
        mc = ct.initialize_classic(x0, model, calibrate=cfg.calibrate)
        for t in ts:
            st = ct.propagate_classic(mc, float(t))
            rows.append((t, *st.position, *st.velocity))
        header = ["t", "x", "y", "z", "vx", "vy", "vz"]
    else:
        order = 1 if args.theory == "eps1" else 2
        m = eps.initialize(x0, model, order=order, duv_zero=cfg.duv_zero)
        if args.by_tau:
            n_kep = math.sqrt(model.mu / cfg.a_km ** 3)
            taus = ts * (m.n_phi / m.n_lam)
            for tv in taus:
                e = eps.osculating_at_tau(m, float(tv))
                rows.append((e.tau, e.t, *e.state.position, *e.state.velocity))
            header = ["tau", "t", "x", "y", "z", "vx", "vy", "vz"]
        else:
            for t in ts:
                e = eps.ephemeris_at_time(m, float(t), tol=cfg.newton_tol_s,
                                          max_iter=cfg.newton_max_iter)
                rows.append((t, e.tau, *e.state.position, *e.state.velocity,
                             e.iterations))
            header = ["t", "tau", "x", "y", "z", "vx", "vy", "vz", "newton_iters"]
    os.makedirs(cfg.outdir, exist_ok=True)
    path = os.path.join(cfg.outdir, f"ephemeris_{args.theory}.csv")
    _write_csv(path, header, rows)
    print(f"[propagate] {len(rows)} epochs -> {path}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    from .harness import benchmark_evaluation

    cfg = _load_config(args)
    rep = benchmark_evaluation(cfg, n_samples=args.samples)
    print("evaluation cost per ephemeris:")
    print(f"  physical-time theory at t     : {rep.classic_per_eval_s * 1e3:8.3f} ms")
    print(f"  fictitious-time theory at tau : {rep.eps_tau_per_eval_s * 1e3:8.3f} ms")
    print(f"  fictitious-time theory at t   : {rep.eps_time_per_eval_s * 1e3:8.3f} ms "
          f"(Newton, {rep.newton_iters_mean:.2f} iterations avg)")
    print(f"  evaluation-count ratio (at-t / at-tau): {rep.eval_count_ratio:.2f}")
    print(f"kernels: jets={rep.jet_backend}, integrator={rep.kernel_backend}")
    if rep.jet_compiled_vs_pure:
        print(f"  jet kernel speedup (compiled vs pure)       : {rep.jet_compiled_vs_pure:.1f}x")
    if rep.dd_compiled_vs_pure:
        print(f"  double-double kernel speedup (compiled/pure): {rep.dd_compiled_vs_pure:.1f}x")
    return EXIT_OK


def _cmd_tables(args) -> int:
    from .tables import dump_tables

    text = dump_tables()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"[tables] written to {args.out}")
    else:
        print(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="epslab",
        description="Analytical J2 main-problem theories vs a numerical reference")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("campaign", help="run the full comparison campaign")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", help="output directory (overrides config)")
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("propagate", help="single-theory ephemeris to CSV")
    p.add_argument("theory", choices=["eps1", "eps2", "classic"])
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--by-tau", action="store_true",
                   help="sample the fictitious-time theories by tau instead of t")
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("bench", help="evaluation-cost and kernel-lane report")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("tables", help="dump the coefficient tables (audit text)")
    p.add_argument("--out", help="write to this path instead of stdout")
    p.set_defaults(func=_cmd_tables)

    args = parser.parse_args(argv)

    from .harness import ConfigError

    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
