import argparse
import logging
from pathlib import Path

from commands.common import add_config_arguments, config_from_args, lexicon_for, print_json
from data.pairs import load_transfer_pair
from models.config import ModelMode
from training.metrics_log import MetricLog
from training.suite import run_suite

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="train one transfer pair over every configured seed")
    parser.add_argument("--data-dir", required=True, help="directory with <domain>_train.conll / <domain>_test.conll")
    parser.add_argument("--source", default="source", help="source domain file prefix")
    parser.add_argument("--target", default="target", help="target domain file prefix")
    parser.add_argument("--out", default="checkpoints", help="directory for one checkpoint per seed")
    parser.add_argument("--log", default=None, help="JSON-lines metric log (default: <out>/metrics.jsonl)")
    add_config_arguments(parser)
    parser.set_defaults(func=cmd_train)


def cmd_train(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    lexicon = lexicon_for(config)
    pair = load_transfer_pair(args.data_dir, args.source, args.target, lexicon,
                              keep_target_labels=config.mode is ModelMode.BASE_TO)
    out = Path(args.out)
    log_path = Path(args.log) if args.log else out / "metrics.jsonl"
    with MetricLog(log_path) as metric_log:
        metric_log.write_config(config, pair=pair.name)
        report = run_suite(pair, config, metric_log=metric_log, checkpoint_dir=out)
        metric_log.write(report)
    print_json(report.model_dump(mode="json"))
    return 0
