import argparse
import logging

from commands.common import print_json
from models.config import ModelMode
from training.diagnostics import model_grad_check, toy_config

logger = logging.getLogger(__name__)

EXIT_THRESHOLD = 3


def register(subparsers) -> None:
    parser = subparsers.add_parser("grad-check", help="finite-difference check of a toy tagger in float64")
    parser.add_argument("--mode", default=ModelMode.AD_SAL.value, choices=[m.value for m in ModelMode])
    parser.add_argument("--dim", type=int, default=4)
    parser.add_argument("--slices", type=int, default=2, help="bilinear slices K")
    parser.add_argument("--hops", type=int, default=2)
    parser.add_argument("--length", type=int, default=3, help="toy sentence length (1-5)")
    parser.add_argument("--lam", type=float, default=0.1)
    parser.add_argument("--samples", type=int, default=6, help="coordinates checked per parameter array")
    parser.add_argument("--threshold", type=float, default=1e-4)
    parser.add_argument("--seed", type=int, default=0)
    parser.set_defaults(func=cmd_grad_check)


def cmd_grad_check(args: argparse.Namespace) -> int:
    config = toy_config(ModelMode(args.mode), args.dim, args.slices, args.hops, args.lam)
    report = model_grad_check(config, steps=min(max(args.length, 1), 5), seed=args.seed, samples=args.samples)
    passed = report.max_error < args.threshold
    print_json({
        "mode": args.mode,
        "max_relative_error": report.max_error,
        "worst": report.worst,
        "checked": report.checked,
        "threshold": args.threshold,
        "passed": passed,
        "per_param": report.per_param,
    })
    if not passed:
        logger.error("Gradient check failed: %.3e >= %.1e at %s", report.max_error, args.threshold, report.worst)
        return EXIT_THRESHOLD
    return 0
