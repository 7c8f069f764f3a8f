import argparse

from commands.common import print_json
from data.conll import parse_conll
from data.stats import corpus_stats


def register(subparsers) -> None:
    parser = subparsers.add_parser("stats", help="sentence, token and aspect counts of CoNLL files")
    parser.add_argument("files", nargs="+")
    parser.set_defaults(func=cmd_stats)


def cmd_stats(args: argparse.Namespace) -> int:
    print_json({path: corpus_stats(parse_conll(path)) for path in args.files})
    return 0
