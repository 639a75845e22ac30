"""
Command-line interface.

    python app.py verify --p 6 --q 27 --r-min 51 --r-max 201 --step 50 --output csv
    python app.py region-check --p 6 --q 26
    python app.py potential-eval --theta 0,0.8333333333,0.75 --real

Exit status: 0 on success, 1 when a computation fails, 2 on invalid arguments.
"""
import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, TextIO, Tuple

from pydantic import ValidationError

from .models import Command, OutputFormat, Precision, RunConfig, get_default_log_level
from .services.report_service import ReportService
from .services.verification_service import VerificationService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _parse_theta(text: str) -> Tuple[complex, complex, complex]:
    parts = [s.strip().replace('i', 'j') for s in text.split(',')]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"theta needs three comma-separated values, got '{text}'")
    try:
        return tuple(complex(s) for s in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid theta '{text}': {e}") from e


def _parse_index(text: str) -> Tuple[int, int, int]:
    parts = text.split(',')
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"fourier index needs three integers, got '{text}'")
    try:
        return tuple(int(s) for s in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid fourier index '{text}': {e}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rtsurgery",
        description="Reshetikhin-Turaev invariants of surgeries on twist knots and their asymptotics")
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--p", type=int, help="twist parameter")
    parser.add_argument("--q", type=int, help="surgery coefficient")
    parser.add_argument("--r", type=int, help="odd level")
    parser.add_argument("--r-min", type=int, dest="r_min")
    parser.add_argument("--r-max", type=int, dest="r_max")
    parser.add_argument("--step", type=int, default=50, help="even step of the level range")
    parser.add_argument("--precision", choices=[p.value for p in Precision])
    parser.add_argument("--threads", type=int)
    parser.add_argument("--output", choices=[o.value for o in OutputFormat], default=OutputFormat.TEXT.value)
    parser.add_argument("--cache-path", dest="cache_path")
    parser.add_argument("--theta", type=_parse_theta, help="three comma-separated (complex) angles")
    parser.add_argument("--real", action="store_true", help="evaluate the real potential 2 pi v")
    parser.add_argument("--depth", type=int, default=1, help="number of fitted corrections")
    parser.add_argument("--m", type=_parse_index, default=(0, 0, 0), dest="fourier_index",
                        help="Fourier index m1,m2,m3")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Flags take precedence over environment defaults; unset flags fall back to them"""
    fields: Dict[str, Any] = {
        "command": Command(args.command),
        "p": args.p,
        "q": args.q,
        "r": args.r,
        "r_min": args.r_min,
        "r_max": args.r_max,
        "step": args.step,
        "output": OutputFormat(args.output),
        "theta": args.theta,
        "real": args.real,
        "depth": args.depth,
        "fourier_index": args.fourier_index,
    }
    if args.precision is not None:
        fields["precision"] = Precision(args.precision)
    if args.threads is not None:
        fields["threads"] = args.threads
    if args.cache_path is not None:
        fields["cache_path"] = args.cache_path
    return RunConfig(**fields)


def _dispatch(config: RunConfig, service: VerificationService) -> Dict[str, Any]:
    command = config.command
    if command == Command.RT:
        return service.compute_rt(config.p, config.q, config.r)
    if command == Command.CRITICAL:
        return service.critical(config.p, config.q)
    if command == Command.VOLUME:
        return service.volume(config.p, config.q)
    if command == Command.VERIFY:
        return service.verify(config.p, config.q, config.levels())
    if command == Command.FIT:
        return service.fit(config.p, config.q, config.levels(), config.depth)
    if command == Command.POTENTIAL_EVAL:
        return service.potential_eval(config.theta, config.real, config.p, config.q, config.fourier_index)
    return service.region_check(config.p, config.q, config.theta, config.fourier_index)


def run(config: RunConfig, out: Optional[TextIO] = None) -> int:
    """
    Execute one command and write its report.

    Returns:
        exit status: 0 on success, 1 on a failed computation
    """
    out = out if out is not None else sys.stdout
    cache_path = config.cache_path if config.command in (Command.VERIFY, Command.FIT) else None
    service = VerificationService(cache_path=cache_path, precision=config.precision,
                                  threads=config.threads)
    try:
        result = _dispatch(config, service)
    except Exception as e:
        logger.exception("unexpected failure in %s", config.command.value)
        result = {"success": False, "errors": [f"{type(e).__name__}: {e}"], "stage": config.command.value}

    out.write(ReportService().render(config.command.value, result, config.output))
    return EXIT_OK if result.get("success") else EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else get_default_log_level()
    logging.basicConfig(level=level, format=LOG_FORMAT)

    try:
        config = config_from_args(args)
    except ValidationError as e:
        errors = [err["msg"] for err in e.errors()]
        if args.output == OutputFormat.JSON.value:
            json.dump({"success": False, "errors": errors, "stage": "arguments"}, sys.stdout, indent=2)
            sys.stdout.write('\n')
        else:
            for message in errors:
                sys.stderr.write(f"error: {message}\n")
        return EXIT_USAGE
    return run(config)
