"""Command-line interface: ``dqdbell simulate|ensemble|plotdata|selftest``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, EnsembleConfig, RunConfig, default_output_dir
from .ensemble import iter_runs, run_single
from .quantum import MODES

EXIT_IO = 1
EXIT_CONFIG = 2


def _floats(n):
    def parse(s):
        vals = [float(x) for x in s.split(",")]
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated angles")
        return tuple(vals)
    return parse


def build_parser():
    p = argparse.ArgumentParser(prog="dqdbell", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one geometry and write CSV + JSON")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--a-nm", type=float, default=1.0)
    s.add_argument("--r-over-a", type=float, default=3.0)
    s.add_argument("--n-env", type=int, default=10)
    s.add_argument("--t-max", type=float, default=10.0, help="end of time grid in units of tau_E")
    s.add_argument("--steps", type=int, default=500)
    s.add_argument("--mode", choices=MODES, default=MODES[0])
    s.add_argument("--chsh-angles", type=_floats(4), help="a,a',b,b' in degrees")
    s.add_argument("--bprv-angles", type=_floats(3), help="three angles in degrees")
    s.add_argument("--out", help="CSV path (default: $DQDBELL_OUTPUT_DIR/run_seed<seed>.csv)")
    s.add_argument("--meta", help="JSON path (default: CSV path with .json suffix)")

    e = sub.add_parser("ensemble", help="run an R/a x replicate sweep")
    e.add_argument("--config", help="JSON config file; defaults reproduce the 72-run sweep")
    e.add_argument("--out", help="output directory (default: $DQDBELL_OUTPUT_DIR/ensemble)")
    e.add_argument("--workers", type=int, help="override the config's worker count")

    d = sub.add_parser("plotdata", help="emit long-format plot data from run outputs")
    d.add_argument("input", help="directory written by simulate or ensemble")
    d.add_argument("--out", help="output directory (default: <input>/plotdata)")

    sub.add_parser("selftest", help="run analytic-limit checks")
    return p


def cmd_simulate(args):
    kw = dict(seed=args.seed, a_nm=args.a_nm, r_over_a=args.r_over_a, n_env=args.n_env,
              t_max=args.t_max, n_steps=args.steps, mode=args.mode)
    if args.chsh_angles:
        kw["chsh_angles"] = args.chsh_angles
    if args.bprv_angles:
        kw["bprv_angles"] = args.bprv_angles
    config = RunConfig(**kw)
    out = Path(args.out) if args.out else Path(default_output_dir()) / f"run_seed{args.seed}.csv"
    meta = Path(args.meta) if args.meta else out.with_suffix(".json")
    record = run_single(config)
    from .output import write_run
    write_run(out, meta, record)
    print(f"wrote {out} and {meta}")
    return 0


def cmd_ensemble(args):
    from .output import run_file_stem, summarize, write_json, write_run

    cfg = EnsembleConfig.load(args.config) if args.config else EnsembleConfig()
    workers = args.workers if args.workers is not None else cfg.workers
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    out = Path(args.out) if args.out else Path(default_output_dir()) / "ensemble"
    records, failures, runs = [], [], []
    for i, (rc, result) in enumerate(iter_runs(cfg.run_configs(), workers)):
        if isinstance(result, Exception):
            failures.append((rc, f"{type(result).__name__}: {result}"))
            logging.error("run seed=%d R/a=%g failed: %s", rc.seed, rc.r_over_a, result)
            continue
        stem = run_file_stem(i, rc)
        write_run(out / "runs" / f"{stem}.csv", out / "runs" / f"{stem}.json", result)
        records.append(result)
        runs.append({"seed": rc.seed, "r_over_a": rc.r_over_a, "tau_E_ps": result.time_scale_ps,
                     "csv": f"runs/{stem}.csv", "meta": f"runs/{stem}.json"})
    summary = summarize(records, failures, cfg, runs)
    write_json(out / "summary.json", summary)
    print(f"wrote {len(records)} runs and {out / 'summary.json'}")
    if "fits" in summary:
        for obs, fit in summary["fits"].items():
            print(f"{obs}: tau_opt/tau_E = {fit['tau_opt_over_tauE']:.4f}")
    if failures:
        print(f"{len(failures)} run(s) failed; see summary.json", file=sys.stderr)
        return EXIT_IO
    return 0


def cmd_plotdata(args):
    from .output import load_directory, write_plot_data

    records, summary = load_directory(args.input)
    out = Path(args.out) if args.out else Path(args.input) / "plotdata"
    for path in write_plot_data(out, records, summary):
        print(f"wrote {path}")
    return 0


def cmd_selftest(args):
    from .selftest import run_checks

    return 0 if run_checks(sys.stdout) else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "ensemble": cmd_ensemble,
    "plotdata": cmd_plotdata,
    "selftest": cmd_selftest,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"dqdbell: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dqdbell: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
