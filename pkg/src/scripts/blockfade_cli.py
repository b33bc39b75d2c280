"""
Command-line front end for the blockfade toolkit.

Loads JSON channel models, runs one computation per subcommand and writes
CSV or JSON with the run manifest embedded.

Exit codes: 0 success, 1 failing validation check or unexpected error,
2 violated invariant or precondition, 3 malformed model file.
"""

import argparse
import logging
import math
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from src.adapters.output_adapter import OutputAdapter
from src.config import config
from src.models.response_models import RunManifest
from src.modules.codelength import ArcSet, support_arcs
from src.modules.errors import BlockfadeError, InvalidParameterError, ModelParseError
from src.services.dependency_injection import (
    get_channel_service,
    get_coding_service,
    get_energy_service,
    get_model_adapter,
    get_simulation_service,
    get_validation_service,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_INVALID = 2
EXIT_MODEL_PARSE = 3

_SWEEP_COMMANDS = {"spectrum-eval", "bounds", "two-level", "simulate"}


class CommandResult:
    """Result of one subcommand plus the exit code it implies."""

    def __init__(self, result: Any, exit_code: int = EXIT_OK):
        self.result = result
        self.exit_code = exit_code


# --- Argument helpers ------------------------------------------------------


def _to_linear(value: float, db: bool) -> float:
    return 10.0 ** (value / 10.0) if db else value


def parse_snr_grid(text: str, db: bool = False) -> List[float]:
    """Parse 'lo:hi:points' into log-spaced SNR values (linear)."""
    try:
        lo_text, hi_text, points_text = text.split(":")
        lo, hi, points = float(lo_text), float(hi_text), int(points_text)
    except ValueError as e:
        raise InvalidParameterError(f"cannot parse --snr-grid {text!r}; expected lo:hi:points") from e
    lo, hi = _to_linear(lo, db), _to_linear(hi, db)
    if not (lo > 0 and hi >= lo and points >= 1):
        raise InvalidParameterError(f"--snr-grid needs 0 < lo <= hi and points >= 1, got {text!r}")
    return np.logspace(math.log10(lo), math.log10(hi), points).tolist()


def _snrs(args: argparse.Namespace, required: bool = True) -> List[float]:
    values = [_to_linear(v, args.db) for v in (args.snr or [])]
    if args.snr_grid:
        values.extend(parse_snr_grid(args.snr_grid, args.db))
    if required and not values:
        raise InvalidParameterError("no SNR given; use --snr or --snr-grid")
    if any(not v > 0 for v in values):
        raise InvalidParameterError(f"SNR values must be positive, got {values}")
    return values


def _single_snr(args: argparse.Namespace) -> float:
    values = _snrs(args)
    if len(values) != 1:
        raise InvalidParameterError(f"this subcommand takes a single SNR, got {len(values)}")
    return values[0]


def _subset(text: str) -> List[int]:
    try:
        return [int(v) for v in text.strip("{}").split(",")]
    except ValueError as e:
        raise InvalidParameterError(f"cannot parse subset {text!r}; expected e.g. 1,2,3") from e


def _load_model(args: argparse.Namespace):
    if not args.model:
        raise InvalidParameterError(f"{args.command} needs --model")
    return get_model_adapter().load(args.model)


def _load_spectrum(args: argparse.Namespace):
    model = _load_model(args)
    spectrum = model.scalar_spectrum()
    if spectrum is None:
        raise InvalidParameterError(f"{args.command} needs a piecewise scalar spectrum, got kind {model.kind!r}")
    return spectrum


# --- Subcommands -----------------------------------------------------------


def cmd_spectrum_eval(args: argparse.Namespace) -> CommandResult:
    omegas = list(args.omega or [])
    if args.points:
        omegas.extend(np.linspace(-math.pi, math.pi, args.points, endpoint=False).tolist())
    if not omegas:
        raise InvalidParameterError("spectrum-eval needs --omega or --points")
    return CommandResult(get_channel_service().evaluate_spectrum(_load_model(args), omegas))


def cmd_sigmas(args: argparse.Namespace) -> CommandResult:
    summary = get_channel_service().prediction_summary(
        _load_model(args), _single_snr(args), config.history_len, extrapolate=args.extrapolate
    )
    return CommandResult(summary)


def cmd_prelog(args: argparse.Namespace) -> CommandResult:
    snrs = _snrs(args, required=False) or None
    return CommandResult(get_channel_service().prelog(_load_model(args), snrs, config.rank_grid))


def cmd_fading_number(args: argparse.Namespace) -> CommandResult:
    return CommandResult(get_channel_service().fading_number(_load_model(args)))


def cmd_bounds(args: argparse.Namespace) -> CommandResult:
    x_min = None if args.xmin == "auto" else float(args.xmin)
    points = get_channel_service().bounds_sweep(
        _load_model(args), _snrs(args), x_min, config.history_len, args.distribution, config.jobs
    )
    return CommandResult(points)


def cmd_two_level(args: argparse.Namespace) -> CommandResult:
    rows = get_channel_service().two_level(args.eps1, args.eps2, args.alpha1, args.alpha2, _snrs(args))
    return CommandResult(rows)


def cmd_cp(args: argparse.Namespace) -> CommandResult:
    model = _load_model(args)
    service = get_energy_service()
    if args.asymptotes:
        return CommandResult([r for snr in _snrs(args) for r in service.asymptotes(model, snr)])
    method = "auto" if args.closed_form == "auto" else "scan"
    return CommandResult(service.cp(model, _snrs(args), config.jobs, method=method))


def cmd_cp_crossover(args: argparse.Namespace) -> CommandResult:
    result = get_energy_service().crossover(
        _load_model(args), _subset(args.m1), _subset(args.m2), args.lo, args.hi
    )
    return CommandResult(result)


def _arcs(args: argparse.Namespace) -> Optional[ArcSet]:
    if args.arcs:
        return ArcSet.parse(args.arcs)
    if args.model:
        return support_arcs(_load_spectrum(args))
    return None


def cmd_tau(args: argparse.Namespace) -> CommandResult:
    arcs = _arcs(args)
    if arcs is None:
        raise InvalidParameterError("tau needs --arcs or --model")
    return CommandResult(get_coding_service().tau(arcs, args.n, args.restarts, config.jobs))


def cmd_scaling(args: argparse.Namespace) -> CommandResult:
    service = get_coding_service()
    if args.tau is not None:
        return CommandResult(service.scaling(args.rate, args.pe, tau=args.tau))
    if args.arcs:
        return CommandResult(service.scaling(args.rate, args.pe, arcs=ArcSet.parse(args.arcs)))
    if args.model:
        return CommandResult(service.scaling(args.rate, args.pe, spectrum=_load_spectrum(args)))
    raise InvalidParameterError("scaling needs --tau, --arcs or --model")


def cmd_exponent(args: argparse.Namespace) -> CommandResult:
    if (args.rate is None) == (args.rate_offset is None):
        raise InvalidParameterError("exponent needs exactly one of --rate and --rate-offset")
    service = get_coding_service()
    results = [service.exponent(args.channel, snr, args.rate, args.rate_offset) for snr in _snrs(args)]
    return CommandResult(results[0] if len(results) == 1 else results)


def cmd_simulate(args: argparse.Namespace) -> CommandResult:
    rows = get_simulation_service().simulate(
        _load_model(args),
        num_paths=args.paths,
        path_len=args.len,
        seed=config.seed,
        snr=_single_snr(args),
        history_len=config.history_len,
        jobs=config.jobs,
    )
    return CommandResult(rows)


def cmd_validate(args: argparse.Namespace) -> CommandResult:
    report = get_validation_service().run(args.check or None)
    failed = [check.name for check in report.checks if not check.passed]
    if failed:
        logger.error(f"Validation failed: {failed}")
    return CommandResult(report, EXIT_OK if report.passed else EXIT_VALIDATION_FAILED)


# --- Parser ----------------------------------------------------------------


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--model", help="Channel model JSON file")
    parent.add_argument("--tol", type=float, help="Relative quadrature tolerance (overrides BLOCKFADE_TOL)")
    parent.add_argument("--grid", type=int, help="Frequency grid size for rank and validation grids")
    parent.add_argument("--history", type=int, help="Finite-history length for predictors")
    parent.add_argument("--seed", type=int, help="Base random seed")
    parent.add_argument("--jobs", type=int, help="Worker threads for sweeps")
    parent.add_argument("--psd-tol", type=float, help="Eigenvalue tolerance for PSD checks")
    parent.add_argument("--format", choices=["csv", "json"], help="Output format")
    parent.add_argument("--output", help="Output file (default stdout)")
    parent.add_argument("--db", action="store_true", help="Interpret SNR values in dB")
    parent.add_argument("--log-level", default=None, help="Logging level")
    return parent


def _add_snr_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--snr", type=float, action="append", help="SNR point (repeatable)")
    parser.add_argument("--snr-grid", help="Log-spaced SNR grid lo:hi:points")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with every subcommand."""
    parent = _global_flags()
    parser = argparse.ArgumentParser(
        prog="blockfade", description="Capacity and coding limits of block-stationary fading channels."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum-eval", parents=[parent], help="Evaluate S(e^{jw}) on frequencies")
    p.add_argument("--omega", type=float, action="append", help="Frequency in radians (repeatable)")
    p.add_argument("--points", type=int, help="Equispaced frequencies on [-pi, pi)")
    p.set_defaults(func=cmd_spectrum_eval)

    p = sub.add_parser("sigmas", parents=[parent], help="Per-symbol innovation variances")
    _add_snr_flags(p)
    p.add_argument("--extrapolate", action="store_true", help="Add Richardson-extrapolated variances")
    p.set_defaults(func=cmd_sigmas)

    p = sub.add_parser("prelog", parents=[parent], help="Pre-log by rank measure and by slope")
    _add_snr_flags(p)
    p.set_defaults(func=cmd_prelog)

    p = sub.add_parser("fading-number", parents=[parent], help="Fading number of a regular model")
    p.set_defaults(func=cmd_fading_number)

    p = sub.add_parser("bounds", parents=[parent], help="Capacity lower and upper bounds")
    _add_snr_flags(p)
    p.add_argument("--xmin", default="auto", help="Annulus inner radius, or 'auto' for sqrt(SNR)/2")
    p.add_argument("--distribution", choices=["annulus-uniform", "log-uniform"], default="annulus-uniform")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("two-level", parents=[parent], help="Bounds for the two-level spectrum family")
    _add_snr_flags(p)
    for name in ("--eps1", "--eps2", "--alpha1", "--alpha2"):
        p.add_argument(name, type=float, required=True)
    p.set_defaults(func=cmd_two_level)

    p = sub.add_parser("cp", parents=[parent], help="Capacity per unit energy by subset scan")
    _add_snr_flags(p)
    p.add_argument("--asymptotes", action="store_true", help="Report the small/large-SNR approximations")
    method = p.add_mutually_exclusive_group()
    method.add_argument("--scan", action="store_true", help="Always scan every subset (default)")
    method.add_argument(
        "--closed-form", choices=["auto"], help="auto: use the closed form for constant-within-block models, else scan"
    )
    p.set_defaults(func=cmd_cp)

    p = sub.add_parser("cp-crossover", parents=[parent], help="SNR where two subsets exchange optimality")
    p.add_argument("--m1", required=True, help="First subset, e.g. 1,2")
    p.add_argument("--m2", required=True, help="Second subset, e.g. 1,2,3")
    p.add_argument("--lo", type=float, help="Bracket lower SNR")
    p.add_argument("--hi", type=float, help="Bracket upper SNR")
    p.set_defaults(func=cmd_cp_crossover)

    p = sub.add_parser("tau", parents=[parent], help="Transfinite diameter of arcs or of a spectral support")
    p.add_argument("--arcs", help="center:angle[,center:angle...] in radians")
    p.add_argument("--n", type=int, help="Fekete points (forces the Fekete solver)")
    p.add_argument("--restarts", type=int, help="Fekete restarts")
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("scaling", parents=[parent], help="Blocklength scaling lower bound")
    p.add_argument("--rate", "--r", dest="rate", type=float, required=True, help="Rate in nats per channel use")
    p.add_argument("--pe", type=float, required=True, help="Error probability")
    p.add_argument("--tau", type=float, help="Transfinite diameter, if known")
    p.add_argument("--arcs", help="Support arcs center:angle[,...]")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("exponent", parents=[parent], help="Random-coding error exponent")
    p.add_argument("channel", choices=["awgn", "rayleigh"])
    _add_snr_flags(p)
    p.add_argument("--rate", type=float, help="Rate in nats")
    p.add_argument("--rate-offset", type=float, help="Rate as log SNR - offset")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("simulate", parents=[parent], help="Monte Carlo check of prediction variances")
    _add_snr_flags(p)
    p.add_argument("--paths", type=int, default=10000, help="Number of sample paths")
    p.add_argument("--len", type=int, required=True, help="Symbols per path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", parents=[parent], help="Run the cross-module identity suite")
    p.add_argument("--check", action="append", help="Run only the named check (repeatable)")
    p.set_defaults(func=cmd_validate)
    return parser


def _apply_overrides(args: argparse.Namespace) -> None:
    if args.tol is not None:
        config.quadrature_tol = args.tol
    if args.grid is not None:
        config.rank_grid = args.grid
        config.validation_grid = args.grid
    if args.history is not None:
        config.history_len = args.history
    if args.seed is not None:
        config.seed = args.seed
    if args.jobs is not None:
        config.jobs = args.jobs
    if args.psd_tol is not None:
        config.psd_tol = args.psd_tol
    config.validate()


def _achieved_tolerance(result: Any) -> Optional[float]:
    records = result if isinstance(result, (list, tuple)) else [result]
    errors = [
        r.quadrature_error for r in records
        if isinstance(r, BaseModel) and getattr(r, "quadrature_error", None) is not None
    ]
    return max(errors) if errors else None


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"func", "command", "model", "output", "format", "log_level"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def dispatch(argv: Sequence[str]) -> int:
    """
    Run one CLI invocation.

    Args:
        argv: Arguments without the program name

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID

    level = (args.log_level or config.log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    saved = dict(vars(config))
    started = time.perf_counter()
    try:
        _apply_overrides(args)
        outcome = args.func(args)
        manifest = RunManifest(
            subcommand=args.command,
            model_path=args.model,
            output_path=args.output,
            parameters=_parameters(args),
            tolerance_requested=config.quadrature_tol,
            tolerance_achieved=_achieved_tolerance(outcome.result),
            tool_version=config.version,
            wall_time_s=time.perf_counter() - started,
        )
        fmt = args.format or ("csv" if args.command in _SWEEP_COMMANDS else "json")
        OutputAdapter(fmt, args.output).write(manifest, outcome.result)
        return outcome.exit_code
    except ModelParseError as e:
        logger.error(f"Malformed model file: {e}")
        return EXIT_MODEL_PARSE
    except BlockfadeError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INVALID
    except ValueError as e:
        logger.error(f"{args.command}: invalid configuration: {e}")
        return EXIT_INVALID
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        return EXIT_VALIDATION_FAILED
    finally:
        config.__dict__.update(saved)


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
