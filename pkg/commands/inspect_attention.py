import argparse
import json
import sys

from commands.common import print_json
from data.conll import parse_conll
from network.memory import attention_dump, render_heat_table
from training.checkpointing import load_model


def register(subparsers) -> None:
    parser = subparsers.add_parser("inspect", help="dump per-hop aspect/opinion attention of a memory model")
    parser.add_argument("--checkpoint", required=True)
    parser.add_argument("--input", required=True, help="CoNLL file; tags are ignored")
    parser.add_argument("--output", help="write the dump as JSON lines instead of printing")
    parser.add_argument("--table", action="store_true", help="also print a text heat table per sentence")
    parser.set_defaults(func=cmd_inspect)


def cmd_inspect(args: argparse.Namespace) -> int:
    tagger = load_model(args.checkpoint)
    dumps = [attention_dump(tagger, sentence.tokens) for sentence in parse_conll(args.input)]
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            for dump in dumps:
                fh.write(json.dumps(dump.model_dump(), sort_keys=True) + "\n")
    else:
        print_json([dump.model_dump() for dump in dumps])
    if args.table:
        for dump in dumps:
            sys.stdout.write(render_heat_table(dump) + "\n\n")
    return 0
