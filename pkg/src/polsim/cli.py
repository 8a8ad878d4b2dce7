"""polsim command-line interface.

Subcommands:
  sweep     evaluate P over a (gamma, |T|) grid in one of five modes
  selftest  closed-form vs pipeline consistency checks
  tomo      reconstruct a coherence matrix from a counts table

Exit codes: 0 success, 2 config/usage error, 3 range error, 4 selftest failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .config import format_config, load_config
from .errors import ConfigRangeError, PolsimError, ZeroTraceError
from .gedanken import degree_of_polarization_gedanken
from .sweep import DEFAULT_MC_SAMPLES, SweepSpec, format_rows, run_sweep
from .tomography import reconstruct_run, read_counts_table
from .zwm import (
    ZwmConfig,
    analytic_p_general,
    analytic_p_special,
    numeric_degree_of_polarization,
    stokes_parameters,
)


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polsim",
        description="Degree-of-polarization simulator for a two-source "
                    "induced-coherence interferometer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="evaluate P over a (gamma, |T|) grid")
    sweep.add_argument("--config", default=None, metavar="PATH",
                       help="key=value config file (default: ideal instrument)")
    sweep.add_argument("--mode", choices=("analytic", "numeric", "tomography",
                                          "gedanken", "montecarlo"),
                       help="evaluation mode")
    sweep.add_argument("--gamma", type=_csv_floats, metavar="CSV",
                       help="rotation angles in degrees")
    sweep.add_argument("--t", type=_csv_floats, metavar="CSV",
                       help="|T| values (marker quality m for gedanken mode)")
    sweep.add_argument("--replicates", type=int, default=1,
                       help="independent repeats per grid point "
                            "(tomography/montecarlo only)")
    sweep.add_argument("--seed", type=int, default=0,
                       help="root seed for the stochastic modes")
    sweep.add_argument("--samples", type=int, default=DEFAULT_MC_SAMPLES,
                       help="Monte-Carlo samples per extremum estimate")
    sweep.add_argument("--out", default=None, metavar="PATH",
                       help="write the CSV here instead of stdout")
    sweep.add_argument("--print-config", action="store_true",
                       help="print the effective config (defaults filled in) and exit")

    sub.add_parser("selftest", help="run the built-in consistency checks")

    tomo = sub.add_parser("tomo", help="reconstruct from a counts table")
    tomo.add_argument("--counts", required=True, metavar="PATH",
                      help="whitespace table: label qwp_angle_deg "
                           "polarizer_angle_deg raw_count")
    tomo.add_argument("--out", required=True, metavar="PATH",
                      help="write the reconstruction summary CSV here")
    tomo.add_argument("--config", default=None, metavar="PATH",
                      help="config supplying kappa_cps/time_s/dark_cps")
    return parser


def _cmd_sweep(args) -> int:
    cfg, detector, values = load_config(args.config)
    if args.print_config:
        sys.stdout.write(format_config(values))
        return 0
    if args.mode is None or args.gamma is None or args.t is None:
        print("sweep requires --mode, --gamma and --t", file=sys.stderr)
        return 2
    spec = SweepSpec(
        gammas_deg=tuple(args.gamma),
        t_values=tuple(args.t),
        mode=args.mode,
        replicates=args.replicates,
        seed=args.seed,
        mc_samples=args.samples,
    )
    text = format_rows(run_sweep(spec, cfg, detector))
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    return 0


def _selftest_checks():
    # closed-form bridge: the gedanken visibility and the special-case
    # interferometer formula are one identity
    ts = np.linspace(0.0, 1.0, 101)
    gammas = np.radians(np.linspace(0.0, 90.0, 91))
    worst_bridge = max(
        abs(analytic_p_special(t, g) - degree_of_polarization_gedanken(g, t))
        for t in ts for g in gammas
    )
    yield ("closed-form bridge, 101x91 grid", worst_bridge, 1e-15)

    # full Fock pipeline against the general closed form; the grid corner
    # |T| = 1, gamma = 0, beta = pi has zero output intensity, where both
    # sides must agree that P is undefined
    worst_pipe = 0.0
    for t in np.linspace(0.0, 1.0, 11):
        for gamma_deg in range(0, 91, 15):
            for beta_val in (0.0, math.pi / 3.0, math.pi):
                cfg = ZwmConfig(t=t, gamma=math.radians(gamma_deg), phi_s2=beta_val)
                try:
                    p_closed = analytic_p_general(cfg)
                except ZeroTraceError:
                    try:
                        numeric_degree_of_polarization(cfg)
                    except ZeroTraceError:
                        continue
                    worst_pipe = math.inf
                    continue
                worst_pipe = max(worst_pipe, abs(
                    numeric_degree_of_polarization(cfg) - p_closed))
    yield ("pipeline vs closed form, 11x7x3 grid", worst_pipe, 1e-10)

    # endpoint identities
    worst_end = 0.0
    for gamma_deg in range(0, 91, 15):
        gamma = math.radians(gamma_deg)
        worst_end = max(worst_end, abs(
            numeric_degree_of_polarization(ZwmConfig(t=1.0, gamma=gamma)) - 1.0))
    for t in np.linspace(0.0, 1.0, 11):
        cfg = ZwmConfig(t=t, gamma=math.pi / 2.0)
        worst_end = max(worst_end, abs(numeric_degree_of_polarization(cfg) - t))
    yield ("endpoints P(|T|=1)=1 and P(gamma=90deg)=|T|", worst_end, 1e-10)


def _cmd_selftest() -> int:
    failures = 0
    for name, worst, tol in _selftest_checks():
        ok = worst <= tol
        status = "ok" if ok else "FAIL"
        print(f"{status}: {name}: max |delta| = {worst:.3e} (tol {tol:.0e})")
        failures += 0 if ok else 1
    if failures:
        print(f"selftest: {failures} check(s) failed", file=sys.stderr)
        return 4
    print("selftest: all checks passed")
    return 0


def _cmd_tomo(args) -> int:
    _, detector, _ = load_config(args.config)
    settings, raw = read_counts_table(args.counts)
    run = reconstruct_run(settings, raw, detector)
    if math.isnan(run.p_estimate):
        print("tomo: all corrected counts are zero; polarization undefined",
              file=sys.stderr)
        return 3
    g = run.reconstruction
    s0, s1, s2, s3 = stokes_parameters(g)
    header = "p_value,g_xx,g_yy,re_g_xy,im_g_xy,s0,s1,s2,s3"
    row = ",".join(f"{v:.12g}" for v in (
        run.p_estimate, g.gxx.real, g.gyy.real, g.gxy.real, g.gxy.imag,
        s0, s1, s2, s3))
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(header + "\n" + row + "\n")
    print(f"tomo: P = {run.p_estimate:.6f} written to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "selftest":
            return _cmd_selftest()
        return _cmd_tomo(args)
    except ConfigRangeError as exc:
        print(f"range error: {exc}", file=sys.stderr)
        return 3
    except PolsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
