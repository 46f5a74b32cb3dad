"""
Main application module.

Command-line entry point. Sub-commands:

    generate  write a random instance file
    solve     solve the relaxation and round it with one scheme
    verify    run the randomized invariant suite against the oracle
    bounds    print the approximation certificates for (m, n, k, eps)

Exit codes: 0 success, 1 verification failure, 2 usage or instance error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from app.core.exceptions import DesignError
from app.core.logging_config import setup_logging
from app.core.metrics import dump_metrics, init_app_info
from app.core.settings import settings
from app.models.instance import Mode
from app.schemas.certificate import Scheme, scheme_names
from app.schemas.instance import instance_to_json, load_instance
from app.schemas.solver import SolverConfig
from app.services.bounds import certificate_for, g_with_reps, g_without_reps
from app.services.generator import Family, generate_instance
from app.services.rounding_service import RoundingService, default_scheme
from app.services.verification_service import VerificationService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_generate(args: argparse.Namespace) -> int:
    """Write an instance file of the requested family."""
    inst = generate_instance(args.m, args.n, args.k, Mode(args.mode), Family(args.family), args.seed)
    _emit(instance_to_json(inst), args.out)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    """Solve the relaxation, apply the scheme and emit the RunReport."""
    inst = load_instance(args.instance)
    cfg_fields = {"rel_tol": args.rel_tol, "max_iters": args.max_iters}
    cfg = SolverConfig(**{key: value for key, value in cfg_fields.items() if value is not None})
    service = RoundingService(inst, cfg)
    report = service.report([args.scheme or default_scheme(inst)], eps=args.eps, trials=args.trials, seed=args.seed)
    if not report.relaxation.converged:
        logger.warning("Relaxation did not converge; ratios are relative to the best iterate")
    _emit(report.model_dump_json(indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the invariant suite; exit 1 on any violation."""
    service = VerificationService(
        max_n=args.max_n, max_m=args.max_m, max_k=args.max_k, seed=args.seed, num_instances=args.num_instances
    )
    summary = service.run()
    sys.stderr.write(summary.table() + "\n")
    for failure in summary.failures:
        sys.stderr.write(f"FAIL {failure.check} (instance seed {failure.instance_seed}): {failure.detail}\n")
    if args.out:
        Path(args.out).write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return EXIT_OK if summary.ok else EXIT_VERIFY_FAILED


def cmd_bounds(args: argparse.Namespace) -> int:
    """Print g values and every certificate for the parameters."""
    n = args.n if args.n is not None else args.k
    data = {
        "m": args.m,
        "n": n,
        "k": args.k,
        "eps": args.eps,
        "g_without_reps": g_without_reps(args.m, n, args.k),
        "g_with_reps": g_with_reps(args.m, args.k),
        "certificates": [
            certificate_for(scheme, args.m, n, args.k, args.eps).model_dump(mode="json") for scheme in Scheme
        ],
    }
    _emit(json.dumps(data, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-parser per command."""
    parser = argparse.ArgumentParser(prog="doptround", description="D-optimal design by rounding the relaxation")
    parser.add_argument("--log-level", default=None, help="override LOG_LEVEL")
    parser.add_argument("--metrics-out", default=None, help="write Prometheus metrics to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a random instance file")
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--mode", choices=[mode.value for mode in Mode], default=Mode.WITHOUT_REPS.value)
    gen.add_argument("--family", choices=[family.value for family in Family], default=Family.GAUSSIAN.value)
    gen.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    gen.add_argument("--out", default=None)
    gen.set_defaults(handler=cmd_generate)

    solve = sub.add_parser("solve", help="solve and round an instance")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--scheme", choices=scheme_names(), default=None)
    solve.add_argument("--eps", type=float, default=None)
    solve.add_argument("--trials", type=int, default=settings.DEFAULT_TRIALS)
    solve.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    solve.add_argument("--rel-tol", type=float, default=None)
    solve.add_argument("--max-iters", type=int, default=None)
    solve.add_argument("--out", default=None)
    solve.set_defaults(handler=cmd_solve)

    verify = sub.add_parser("verify", help="run the invariant suite")
    verify.add_argument("--max-n", type=int, default=8)
    verify.add_argument("--max-m", type=int, default=3)
    verify.add_argument("--max-k", type=int, default=4)
    verify.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    verify.add_argument("--num-instances", type=int, default=50)
    verify.add_argument("--out", default=None)
    verify.set_defaults(handler=cmd_verify)

    bounds = sub.add_parser("bounds", help="print approximation certificates")
    bounds.add_argument("--m", type=int, required=True)
    bounds.add_argument("--n", type=int, default=None)
    bounds.add_argument("--k", type=int, required=True)
    bounds.add_argument("--eps", type=float, default=settings.DEFAULT_EPS)
    bounds.add_argument("--out", default=None)
    bounds.set_defaults(handler=cmd_bounds)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI.

    Parameters:
        argv: Arguments without the program name, sys.argv[1:] when None

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    if settings.METRICS_ENABLED:
        init_app_info(settings.APP_VERSION, settings.APP_ENV)
    try:
        code = args.handler(args)
    except (DesignError, ValidationError, ValueError, OSError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    if args.metrics_out:
        dump_metrics(args.metrics_out)
    return code


if __name__ == "__main__":
    sys.exit(main())
