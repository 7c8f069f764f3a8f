import argparse
import sys

from data.conll import format_conll, parse_conll
from data.tagging import repair_tags
from training.checkpointing import load_model


def register(subparsers) -> None:
    parser = subparsers.add_parser("predict", help="tag a CoNLL file (tags column optional on input)")
    parser.add_argument("--checkpoint", required=True)
    parser.add_argument("--input", required=True)
    parser.add_argument("--output", help="output CoNLL path (default: stdout)")
    parser.set_defaults(func=cmd_predict)


def cmd_predict(args: argparse.Namespace) -> int:
    tagger = load_model(args.checkpoint)
    sentences = parse_conll(args.input)
    text = format_conll(sentences, [repair_tags(tagger.predict(sentence)) for sentence in sentences])
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0
