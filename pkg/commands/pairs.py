import argparse
import logging
import sys
from pathlib import Path

from commands.common import add_config_arguments, config_from_args, lexicon_for
from data.pairs import DEFAULT_DOMAINS, load_transfer_pair, transfer_pairs
from models.config import ModelMode
from training.metrics_log import MetricLog
from training.suite import run_suite

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("pairs", help="run every transfer pair whose files are present")
    parser.add_argument("--data-dir", required=True)
    parser.add_argument("--domains", default=",".join(DEFAULT_DOMAINS), help="comma-separated domain prefixes")
    parser.add_argument("--log", default=None, help="JSON-lines metric log")
    add_config_arguments(parser)
    parser.set_defaults(func=cmd_pairs)


def _present(data_dir: Path, domain: str) -> bool:
    return all((data_dir / f"{domain}_{split}.conll").exists() for split in ("train", "test"))


def cmd_pairs(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    data_dir = Path(args.data_dir)
    domains = [d for d in args.domains.split(",") if d]
    lexicon = lexicon_for(config)
    available = [(s, t) for s, t in transfer_pairs(domains) if _present(data_dir, s) and _present(data_dir, t)]
    if not available:
        raise FileNotFoundError(f"no complete transfer pair under {data_dir} for domains {domains}")

    reports = []
    with MetricLog(args.log) as metric_log:
        metric_log.write_config(config, pairs=[f"{s}->{t}" for s, t in available])
        for source, target in available:
            pair = load_transfer_pair(data_dir, source, target, lexicon,
                                      keep_target_labels=config.mode is ModelMode.BASE_TO)
            report = run_suite(pair, config, metric_log=metric_log)
            metric_log.write(report)
            reports.append(report)

    sys.stdout.write(f"{'pair':<8} {'AD':>14} {'ADS':>14}\n")
    for report in reports:
        sys.stdout.write(f"{report.pair:<8} {report.ad_mean:>7.2f}±{report.ad_std:<5.2f} "
                         f"{report.ads_mean:>7.2f}±{report.ads_std:<5.2f}\n")
    if len(reports) > 1:
        ad = sum(r.ad_mean for r in reports) / len(reports)
        ads = sum(r.ads_mean for r in reports) / len(reports)
        sys.stdout.write(f"{'average':<8} {ad:>7.2f}{'':6} {ads:>7.2f}\n")
    return 0
