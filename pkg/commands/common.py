import argparse
import json
import logging
import sys
from typing import Any, FrozenSet, Optional

from commands.settings import resolve_config
from data.lexicon import load_lexicon
from models.config import TrainingConfig

logger = logging.getLogger(__name__)


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    """``--config`` plus one flag per TrainingConfig field (``--batch-size``, ``--lam`` ...)."""
    parser.add_argument("--config", help="flat key = value config file")
    group = parser.add_argument_group("training config overrides")
    for name, info in TrainingConfig.model_fields.items():
        group.add_argument(f"--{name.replace('_', '-')}", dest=f"cfg_{name}", metavar="VALUE",
                           help=f"(default: {info.default})")


def config_from_args(args: argparse.Namespace) -> TrainingConfig:
    overrides = {name: getattr(args, f"cfg_{name}", None) for name in TrainingConfig.model_fields}
    return resolve_config(args.config, overrides)


def print_json(payload: Any) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def lexicon_for(config: TrainingConfig) -> Optional[FrozenSet[str]]:
    if config.lexicon_path:
        return load_lexicon(config.lexicon_path)
    if config.mode.uses_memory:
        logger.warning("Mode %s runs without an opinion lexicon; every opinion label will be NOT_OPINION",
                       config.mode.value)
    return None
