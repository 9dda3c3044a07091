"""Command-line front end.

One dispatcher, six subcommands: roots, render, simulate,
series-verify, potential, report.  Machine outputs are CSV with a
header row, JSON lines, or binary PPM; every float is printed at 17
significant digits so identical invocations produce byte-identical
files.  Exit codes: 0 success, 1 a computation failed or a check did
not pass, 2 bad usage.

A constants file (flat `key = value`, see model.CONFIG_KEYS) can be
supplied with --constants or the ZITTERLAB_CONSTANTS variable; it is
validated on every run but only outputs that touch SI units depend on
it.  The report always uses the built-in constants so its golden
output is stable.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys

import numpy as np

from . import potential as potmod
from .dynamics import (
    estimate_spectrum,
    integrate_truncated,
    perturbed_uniform_run,
    propagate_exact,
    propagate_filtered,
    residual_eom_many,
    TooFewSamplesError,
)
from .model import (
    ConstantsError,
    KinematicState,
    PhysicalConstants,
    parse_constants_file,
)
from .report import _fmt, render_report, run_report
from .roots import CharEq, Region, dominant_real_root, find_roots, \
    render_domain_coloring, write_ppm
from .trajectory import SeedHistory


def _beta_arg(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not abs(v) < 1.0:
        raise argparse.ArgumentTypeError(f"|beta| must be < 1, got {v}")
    return v


def _positive_arg(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return v


def _region_arg(text: str) -> Region:
    try:
        return Region.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _size_arg(text: str) -> tuple[int, int]:
    try:
        w, h = (int(p) for p in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"size must look like 800x600, got {text!r}") from exc
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"degenerate size {text!r}")
    return w, h


def _pair_arg(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected a,b — got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from exc
    if not a < b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return a, b


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_constants(path: str | None) -> tuple[PhysicalConstants, float | None]:
    if path is None:
        path = os.environ.get("ZITTERLAB_CONSTANTS")
    if path is None:
        return PhysicalConstants(), None
    return parse_constants_file(path)


# --- subcommand handlers ----------------------------------------------

def cmd_roots(args, _env) -> int:
    rs = find_roots(CharEq(args.beta), args.region, grid_density=args.grid)
    rows = sorted(rs.roots, key=lambda r: (r.value.real, r.value.imag))
    lines = ["re,im,residual"]
    for r in rows:
        lines.append(f"{_fmt(r.value.real)},{_fmt(r.value.imag)},"
                     f"{_fmt(r.residual)}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_render(args, _env) -> int:
    image = render_domain_coloring(CharEq(args.beta), args.region, args.size)
    write_ppm(args.out, image)
    return 0


def cmd_series_verify(args, _env) -> int:
    from .series import verify_identities
    all_ok = True
    for check_id, ok, detail in verify_identities():
        print(f"{'PASS' if ok else 'FAIL'} {check_id} {detail}")
        all_ok &= ok
    return 0 if all_ok else 1


def _build_seed(args) -> SeedHistory:
    if args.seed == "rest_kick":
        if args.beta != 0.0:
            raise ValueError("rest_kick does not take a drift; "
                             "use uniform_kick or mode_kick")
        return SeedHistory.rest_kick(args.amp)
    if args.seed == "uniform":
        return SeedHistory.uniform_motion(args.beta)
    if args.seed == "uniform_kick":
        return SeedHistory.uniform_kick(args.beta, args.amp)
    return SeedHistory.mode_kick(args.beta, args.amp)


def _residual_column(traj) -> np.ndarray:
    """residual_eom where the light cone fits in the data, else nan."""
    ts = traj.t
    res = np.full(ts.size, np.nan)
    x0 = float(traj.position(traj.t0))
    reach = (ts - traj.t0) - np.sqrt((traj.x - x0) ** 2 + 1.0)
    ok = (ts - 1.0 >= traj.t0) & (reach > 1e-6)
    if np.any(ok):
        res[ok] = residual_eom_many(traj, ts[ok])
    return res


def _trajectory_csv(traj) -> str:
    res = _residual_column(traj)
    lines = ["t,x,beta,beta_dot,residual"]
    for i in range(traj.t.size):
        lines.append(f"{_fmt(traj.t[i])},{_fmt(traj.x[i])},"
                     f"{_fmt(traj.beta[i])},{_fmt(traj.beta_dot[i])},"
                     f"{_fmt(float(res[i])) if math.isfinite(res[i]) else 'nan'}")
    return "\n".join(lines) + "\n"


def _simulate_report(args, traj, drift: float) -> str:
    gamma = 1.0 / math.sqrt((1.0 - drift) * (1.0 + drift))
    target = dominant_real_root(drift) / gamma
    kick = args.amp if args.seed != "uniform" else 1e-6
    rate = perturbed_uniform_run(drift, kick).rate

    fwd = traj.t >= 0.0
    b = traj.beta[fwd] - drift
    peak = float(np.max(np.abs(b))) if b.size else 0.0
    reached = float(traj.t[-1])
    aborted = traj.metadata.get("aborted")
    state = (f"aborted by {aborted} at t = {_fmt(reached)}"
             if aborted else f"completed to t = {_fmt(reached)}")

    def rec(name, value, target_, detail):
        return ("{" + f'"record": {_fmt(name)}, "value": {_fmt(value)}, '
                f'"target": {_fmt(target_)}, "detail": {_fmt(detail)}' + "}")

    lines = [
        rec("growth_rate", rate, target,
            "log-envelope rate of a small kick on this drift, measured on "
            "the exact march; target is the dominant root over gamma"),
        rec("saturation_amplitude", peak, None,
            f"peak |beta - drift| over the forward run; run {state}"),
    ]
    signs = np.sign(b[b != 0.0])
    flips = int(np.count_nonzero(np.diff(signs) != 0)) if signs.size else 0
    if flips >= 4:
        try:
            peaks = estimate_spectrum(traj, (0.0, reached))
            for p in peaks:
                lines.append(rec("peak_frequency", p.frequency, None,
                                 "Hann-window spectral peak, cycles per "
                                 "time unit"))
        except TooFewSamplesError:
            flips = 0
    if flips < 4:
        lines.append(rec("peak_frequency", None, None,
                         "no oscillatory window to measure: the run is "
                         "monotone after the kick"))
    return "\n".join(lines) + "\n"


def cmd_simulate(args, _env) -> int:
    seed = _build_seed(args)
    drift = seed.drift
    if args.integrator == "exact":
        traj = propagate_exact(seed, args.tend, args.dt,
                               stencil=args.stencil, degree=args.degree)
    else:
        traj = propagate_filtered(seed, args.tend, args.dt,
                                  sigma=args.sigma,
                                  kernel_span=args.kernel_span,
                                  partial=True)
    if args.report:
        _write_text(args.out if args.out != "traj.csv" else "-",
                    _simulate_report(args, traj, drift))
    else:
        _write_text(args.out, _trajectory_csv(traj))
    aborted = traj.metadata.get("aborted")
    if aborted:
        print(f"zitterlab: simulate stopped early at t = "
              f"{traj.metadata['t_reached']:g} ({aborted}): "
              f"{traj.metadata['abort_reason']}", file=sys.stderr)
        return 1
    return 0


def cmd_potential(args, env) -> int:
    constants, _ = env
    if args.duffing:
        a, b = args.range
        xs = np.linspace(a, b, args.samples)
        lines = ["x,Qc,force"]
        for x in xs:
            lines.append(f"{_fmt(float(x))},"
                         f"{_fmt(potmod.duffing_potential(float(x)))},"
                         f"{_fmt(potmod.duffing_force(float(x)))}")
        _write_text(args.out, "\n".join(lines) + "\n")
        return 0

    state = KinematicState(beta=args.beta, beta_dot=args.betadot)
    p = potmod.sample(state)
    scale = potmod.energy_scale_joules(constants) if args.si else 1.0
    unit = "J" if args.si else "m_e c^2"
    sums = (potmod.self_potential_partial_sums(state, args.series)
            if args.series else [])
    sums_text = ", ".join(_fmt(s * scale) for s in sums)
    line = ("{" + f'"U": {_fmt(p.U * scale)}, "Q": {_fmt(p.Q * scale)}, '
            f'"gamma": {_fmt(p.gamma)}, "y": {_fmt(p.y)}, '
            f'"unit": {_fmt(unit)}, "partial_sums": [{sums_text}]' + "}")
    _write_text(args.out, line + "\n")
    return 0


def cmd_report(args, _env) -> int:
    records = run_report(args.only)
    if not records:
        print(f"zitterlab: no check matches --only {args.only!r}",
              file=sys.stderr)
        return 2
    _write_text(args.out, render_report(records))
    return 0 if all(r["pass"] for r in records) else 1


# --- parser -----------------------------------------------------------

# Rectangle and range values legitimately start with a minus sign
# (--region -1,3,-1,1), which stock argparse reads as a flag.  Widening
# the negative-number matcher on the subparser makes it a value again.
_NEGATIVE_TUPLE = re.compile(r"^-\d+$|^-\d*\.\d+$|^-[\d.eE+-]+(,[\d.eE+-]+)+$")


def _allow_negative_tuples(p: argparse.ArgumentParser) -> None:
    p._negative_number_matcher = _NEGATIVE_TUPLE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zitterlab",
        description="Delay-equation stability, exact series, and "
                    "self-potential tools for the dumbbell charge model.")
    parser.add_argument("--constants", metavar="PATH",
                        help="flat key = value constants file "
                             "(default: $ZITTERLAB_CONSTANTS or built-ins)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", help="root census of the characteristic "
                                     "function over a rectangle")
    p.add_argument("--beta", type=_beta_arg, default=0.0,
                   help="drift speed the equation is linearized about")
    p.add_argument("--region", type=_region_arg, default="-1,3,-1,1",
                   help="x0,x1,y0,y1 rectangle in the complex plane")
    p.add_argument("--grid", type=_positive_arg, default=10.0,
                   help="Newton seeds per unit length")
    p.add_argument("--out", default="-", help="CSV path ('-' = stdout)")
    p.set_defaults(func=cmd_roots)
    _allow_negative_tuples(p)

    p = sub.add_parser("render", help="domain-coloring phase portrait "
                                      "as binary PPM")
    p.add_argument("--beta", type=_beta_arg, default=0.0)
    p.add_argument("--region", type=_region_arg, default="-1,3,-15,15")
    p.add_argument("--size", type=_size_arg, default="640x480",
                   help="image size WxH")
    p.add_argument("--out", required=True, help="PPM output path")
    p.set_defaults(func=cmd_render)
    _allow_negative_tuples(p)

    p = sub.add_parser("simulate", help="march the delay equation of "
                                        "motion from a seeded history")
    p.add_argument("--seed", default="rest_kick",
                   choices=("rest_kick", "uniform", "uniform_kick",
                            "mode_kick"))
    p.add_argument("--beta", type=_beta_arg, default=0.0,
                   help="drift speed for the drift-based seeds")
    p.add_argument("--amp", type=_positive_arg, default=1e-6,
                   help="kick amplitude (peak |beta_dot|)")
    p.add_argument("--tend", type=_positive_arg, default=100.0)
    p.add_argument("--dt", type=_positive_arg, default=1e-3)
    p.add_argument("--integrator", default="filtered",
                   choices=("filtered", "exact"),
                   help="filtered = band-limited long-horizon instrument; "
                        "exact = reference march (short horizons only)")
    p.add_argument("--stencil", type=int, default=5,
                   help="derivative-recovery stencil of the exact march")
    p.add_argument("--degree", type=int, default=4,
                   help="derivative-recovery degree of the exact march")
    p.add_argument("--sigma", type=_positive_arg, default=0.45,
                   help="filter width of the filtered march")
    p.add_argument("--kernel-span", type=_positive_arg, default=0.90,
                   dest="kernel_span",
                   help="filter support half-length (must stay inside "
                        "the minimum delay)")
    p.add_argument("--out", default="traj.csv",
                   help="CSV path ('-' = stdout)")
    p.add_argument("--report", action="store_true",
                   help="emit JSON-line summary records instead of the "
                        "trajectory CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("series-verify", help="print PASS/FAIL lines for "
                                             "the exact series identities")
    p.set_defaults(func=cmd_series_verify)

    p = sub.add_parser("potential", help="self-potential decomposition at "
                                         "a state, or the Duffing profile")
    p.add_argument("--beta", type=_beta_arg, default=0.0)
    p.add_argument("--betadot", type=float, default=0.0)
    p.add_argument("--series", type=int, default=0, metavar="N",
                   help="also emit the first N series partial sums")
    p.add_argument("--si", action="store_true",
                   help="energies in joules instead of rest-energy units")
    p.add_argument("--duffing", action="store_true",
                   help="emit the conservative double-well profile as CSV")
    p.add_argument("--range", type=_pair_arg, default="-1.5,1.5",
                   help="x range a,b for --duffing")
    p.add_argument("--samples", type=int, default=301,
                   help="sample count for --duffing")
    p.add_argument("--out", default="-", help="output path ('-' = stdout)")
    p.set_defaults(func=cmd_potential)
    _allow_negative_tuples(p)

    p = sub.add_parser("report", help="run every reproduction check and "
                                      "emit one JSON line per check")
    p.add_argument("--only", default=None, metavar="SUBSTR",
                   help="run only checks whose id contains SUBSTR")
    p.add_argument("--out", default="-", help="output path ('-' = stdout)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        env = _load_constants(args.constants)
    except (ConstantsError, OSError) as exc:
        print(f"zitterlab: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args, env)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"zitterlab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
