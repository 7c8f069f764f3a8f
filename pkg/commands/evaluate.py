import argparse

from commands.common import print_json
from data.conll import parse_conll
from data.errors import CorpusError
from evaluation.scoring import per_sentiment_breakdown, score_tag_sequences
from training.checkpointing import load_model


def register(subparsers) -> None:
    parser = subparsers.add_parser("evaluate", help="AD and ADS exact-match Micro-F1 of a checkpoint")
    parser.add_argument("--checkpoint", required=True)
    parser.add_argument("--corpus", required=True, help="tagged CoNLL file")
    parser.add_argument("--breakdown", action="store_true", help="add per-sentiment ADS scores")
    parser.set_defaults(func=cmd_evaluate)


def cmd_evaluate(args: argparse.Namespace) -> int:
    tagger = load_model(args.checkpoint)
    corpus = parse_conll(args.corpus)
    gold = [sentence.unified_tags for sentence in corpus]
    if any(tags is None for tags in gold):
        raise CorpusError(f"{args.corpus} has untagged sentences; evaluation needs gold tags")
    pred = [tagger.predict(sentence) for sentence in corpus]
    ad, ads = score_tag_sequences(gold, pred)
    payload = {"AD": ad.model_dump(), "ADS": ads.model_dump()}
    if args.breakdown:
        payload["ADS_by_sentiment"] = {k: v.model_dump() for k, v in per_sentiment_breakdown(gold, pred).items()}
    print_json(payload)
    return 0
