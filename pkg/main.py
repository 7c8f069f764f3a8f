import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from commands import evaluate, grad_check, inspect_attention, pairs, predict, stats, synth, train
from commands.settings import log_level
from diffcore.errors import AbsaError

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1

SUBCOMMANDS = (train, evaluate, predict, inspect_attention, grad_check, synth, stats, pairs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="absa-transfer",
        description="Cross-domain aspect and sentiment tagging with dual memories and selective adversarial learning.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in SUBCOMMANDS:
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    # Load environment variables from .env file
    load_dotenv('.env')
    logging.basicConfig(level=log_level(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AbsaError, FileNotFoundError) as exc:
        logger.exception("%s failed", args.command)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
