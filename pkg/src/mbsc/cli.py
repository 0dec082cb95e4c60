"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import analysis, cluster, gkp, states
from .errors import MbscError, ResourceGuardError
from .modular import SQRT_PI, BinSpec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_alpha(text: str) -> float:
    if text.strip().lower() in ("sqrt-pi", "sqrtpi"):
        return SQRT_PI
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}; use a number or sqrt-pi") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError("alpha must be positive")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _emit(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _even_ceil(x: float, minimum: int) -> int:
    n = max(minimum, math.ceil(x))
    return n + n % 2


# --- gkp-sweep ------------------------------------------------------------

def kappa_grid(kmin: float, kmax: float, steps: int, spacing: str) -> list:
    if steps == 1:
        return [kmin]
    if spacing == "log":
        return [float(v) for v in np.geomspace(kmin, kmax, steps)]
    return [float(v) for v in np.linspace(kmin, kmax, steps)]


def cmd_gkp_sweep(args) -> int:
    if args.kappa_max < args.kappa_min:
        raise UsageError("--kappa-max must be >= --kappa-min")
    spec = BinSpec(args.alpha)
    kappas = kappa_grid(args.kappa_min, args.kappa_max, args.steps, args.spacing)
    def override(kappa):
        auto = gkp.auto_grid(args.delta, kappa, spec)
        return states.PositionGrid(spec, args.K or auto.points_per_bin, args.B or auto.n_bins)

    policy = override if (args.K is not None or args.B is not None) else None
    records = gkp.kappa_sweep(args.delta, kappas, spec, policy, jobs=args.jobs)
    if args.format == "csv":
        text = gkp.records_to_csv(records)
    elif args.format == "json":
        text = json.dumps({
            "alpha": spec.alpha,
            "delta": args.delta,
            "records": [asdict(r) for r in records],
        }, indent=2) + "\n"
    else:
        from .svg import line_plot
        text = line_plot(
            [r.kappa for r in records],
            {"fidelity |+>": [r.fidelity_plus for r in records], "purity": [r.purity for r in records]},
            xlabel="kappa", ylabel="logical fidelity / purity", logx=args.spacing == "log",
        )
    _emit(text, args.output)
    bad = [r for r in records if r.status != "ok"]
    for r in bad:
        print(f"kappa={r.kappa!r}: {r.status}", file=sys.stderr)
    return EXIT_OK


# --- verify-cz ------------------------------------------------------------

def cmd_verify_cz(args) -> int:
    if args.alpha != SQRT_PI:
        raise UsageError("verify-cz requires --alpha sqrt-pi (the CZ[1] reduction is specific to it)")
    rng = np.random.default_rng(args.seed)
    samples = rng.uniform(-args.range, args.range, size=(args.samples, args.modes))
    worst = cluster.phase_identity_check(samples)
    ok = worst <= args.tolerance
    print(json.dumps({
        "samples": args.samples,
        "modes": args.modes,
        "seed": args.seed,
        "max_mismatch": worst,
        "tolerance": args.tolerance,
        "passed": ok,
    }))
    return EXIT_OK if ok else EXIT_FAIL


# --- cluster2 -------------------------------------------------------------

def cmd_cluster2(args) -> int:
    if args.squeezing_db is not None:
        p_var = states.squeezing_db_to_p_variance(args.squeezing_db)
        std = math.sqrt(1.0 / (4.0 * p_var))
    else:
        std = args.std_alpha * SQRT_PI
    classes = None if args.outcome_class is None else (args.outcome_class, args.outcome_class)
    report = cluster.hidden_cluster_experiment(
        std,
        points_per_bin=args.K,
        n_bins=args.B,
        seed=args.seed,
        outcome_classes=classes,
        feedforward=not args.no_feedforward,
        max_amplitudes=args.max_amplitudes,
    )
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    print(f"final fidelity with CZ|++>: {report['final_fidelity']:.6f}", file=sys.stderr)
    return EXIT_OK


# --- logical --------------------------------------------------------------

_STATE_RE = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


def _grid_override(args, auto: states.PositionGrid) -> states.PositionGrid:
    return states.PositionGrid(auto.spec, args.K or auto.points_per_bin, args.B or auto.n_bins)


def build_state(text: str, args) -> states.ModeWavefunction:
    match = _STATE_RE.match(text)
    if not match:
        raise UsageError(f"malformed state spec {text!r}")
    name = match.group(1).lower()
    try:
        values = [v.strip() for v in match.group(2).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"malformed arguments in {text!r}") from None
    spec = BinSpec(args.alpha)
    try:
        if name == "gkp" and len(values) == 4:
            a, b = complex(values[0]), complex(values[1])
            norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
            if norm == 0:
                raise UsageError("gkp amplitudes cannot both be zero")
            delta, kappa = float(values[2]), float(values[3])
            params = gkp.ApproxGkpParams(a / norm, b / norm, delta, kappa, spec)
            grid = _grid_override(args, gkp.auto_grid(delta, kappa, spec))
            return gkp.approx_gkp_state(grid, params)
        if name == "gaussian" and len(values) == 2:
            center, var = float(values[0]), float(values[1])
            sigma = math.sqrt(var) if var > 0 else 1.0
            auto = states.PositionGrid(
                spec,
                _even_ceil(4 * spec.alpha / sigma, 16),
                _even_ceil(2 * (abs(center) + 12 * sigma) / spec.alpha, 4),
            )
            return states.gaussian_state(_grid_override(args, auto), center, var)
        if name == "psqueezed" and len(values) == 1:
            var = float(values[0])
            sigma = math.sqrt(1 / (4 * var)) if var > 0 else 1.0
            auto = states.PositionGrid(spec, 16, _even_ceil(22 * sigma / spec.alpha, 8))
            return states.momentum_squeezed_state(_grid_override(args, auto), var)
    except ValueError as exc:
        if isinstance(exc, MbscError):
            raise
        raise UsageError(f"bad number in {text!r}: {exc}") from None
    raise UsageError(
        f"unknown state spec {text!r}; expected gkp(a,b,delta,kappa), gaussian(center,var) or psqueezed(var)"
    )


def cmd_logical(args) -> int:
    if args.file:
        try:
            state = states.load_wavefunction(args.file)
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc}") from None
    else:
        state = build_state(args.state, args)
    if args.dump:
        states.save_wavefunction(state, args.dump)
    rho = analysis.gauge_trace(state, auto_normalize=args.normalize)
    sd = analysis.schmidt_data(state.normalized() if args.normalize else state)
    report = {
        "grid": {
            "alpha": state.grid.alpha,
            "points_per_bin": state.grid.points_per_bin,
            "n_bins": state.grid.n_bins,
        },
        "rho_L": rho.to_dict(),
        "bloch": list(analysis.bloch_vector(rho)),
        "purity": analysis.purity(rho),
        "schmidt": {"p_a": sd.p_a, "p_b": sd.p_b, "entropy": sd.entropy},
    }
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbsc", description="Logical-qubit analysis of CV states via modular position bins."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gkp-sweep", help="logical diagnostics of approximate |+> GKP states vs kappa")
    p.add_argument("--delta", type=_positive_float, default=0.1)
    p.add_argument("--kappa-min", type=_positive_float, default=0.05)
    p.add_argument("--kappa-max", type=_positive_float, default=2.0)
    p.add_argument("--steps", type=_positive_int, default=50)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--alpha", type=parse_alpha, default=SQRT_PI)
    p.add_argument("--K", type=_positive_int, default=None, help="points per bin override")
    p.add_argument("--B", type=_positive_int, default=None, help="number of bins override")
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_gkp_sweep)

    p = sub.add_parser("verify-cz", help="check the CZ[1] subsystem factorization on random samples")
    p.add_argument("--samples", type=_positive_int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modes", type=_positive_int, default=2, help="linear-graph modes per sample")
    p.add_argument("--range", type=_positive_float, default=10.0)
    p.add_argument("--alpha", type=parse_alpha, default=SQRT_PI)
    p.add_argument("--tolerance", type=_positive_float, default=1e-10)
    p.set_defaults(func=cmd_verify_cz)

    p = sub.add_parser("cluster2", help="hidden two-qubit cluster state disentangling experiment")
    width = p.add_mutually_exclusive_group()
    width.add_argument("--std-alpha", type=_positive_float, default=3.0,
                       help="position std of each squeezed input, in units of alpha")
    width.add_argument("--squeezing-db", type=float, default=None)
    p.add_argument("--K", type=_positive_int, default=16)
    p.add_argument("--B", type=_positive_int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outcome-class", type=int, default=None,
                   help="fixed modular class r on both modes (u0 = r*alpha/K) instead of sampling")
    p.add_argument("--no-feedforward", action="store_true")
    p.add_argument("--max-amplitudes", type=_positive_int, default=cluster.MAX_AMPLITUDES)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_cluster2)

    p = sub.add_parser("logical", help="gauge-trace a single-mode state")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="gkp(a,b,delta,kappa) | gaussian(center,var) | psqueezed(var)")
    src.add_argument("--file", help="wavefunction file written by --dump")
    p.add_argument("--alpha", type=parse_alpha, default=SQRT_PI)
    p.add_argument("--K", type=_positive_int, default=None)
    p.add_argument("--B", type=_positive_int, default=None)
    p.add_argument("--normalize", action="store_true", help="normalize file input instead of rejecting it")
    p.add_argument("--dump", default=None, help="write the state as a wavefunction file")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_logical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mbsc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceGuardError as exc:
        print(f"mbsc: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except MbscError as exc:
        print(f"mbsc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
