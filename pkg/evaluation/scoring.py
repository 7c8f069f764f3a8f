"""Exact-match Micro-F1 for aspect spans (AD) and spans with sentiment (ADS)."""
import logging
from typing import Dict, Iterable, List, Sequence, Tuple

from data.tagging import segments_from_tags
from models.corpus import Segment, Sentence
from models.reports import EvalReport
from models.tags import Sentiment, UnifiedTag

logger = logging.getLogger(__name__)

AD = "AD"
ADS = "ADS"
TASKS = (AD, ADS)


def _keys(segments: Iterable[Segment], task: str) -> set:
    if task == AD:
        return {segment.span() for segment in segments}
    if task == ADS:
        return {segment.key() for segment in segments}
    raise ValueError(f"unknown task {task!r}, expected one of {TASKS}")


def exact_match_counts(gold: Iterable[Segment], pred: Iterable[Segment], task: str) -> Tuple[int, int, int]:
    """(true positives, predicted, gold) for one sentence."""
    gold_keys, pred_keys = _keys(gold, task), _keys(pred, task)
    return len(gold_keys & pred_keys), len(pred_keys), len(gold_keys)


def make_report(task: str, tp: int, pred: int, gold: int) -> EvalReport:
    # zero denominators score 0 rather than raising
    precision = tp / pred if pred else 0.0
    recall = tp / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(task=task, tp=tp, pred=pred, gold=gold, precision=precision, recall=recall, micro_f1=f1)


def score_tag_sequences(gold: Sequence[Sequence[UnifiedTag]],
                        pred: Sequence[Sequence[UnifiedTag]]) -> Tuple[EvalReport, EvalReport]:
    """Corpus-level counts summed before P/R; the AD report reads spans off the same unified tags."""
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold sequences but {len(pred)} predicted")
    totals = {task: [0, 0, 0] for task in TASKS}
    for gold_tags, pred_tags in zip(gold, pred):
        gold_segments = segments_from_tags(gold_tags)
        pred_segments = segments_from_tags(pred_tags)
        for task in TASKS:
            counts = exact_match_counts(gold_segments, pred_segments, task)
            totals[task] = [a + b for a, b in zip(totals[task], counts)]
    return make_report(AD, *totals[AD]), make_report(ADS, *totals[ADS])


def _gold(corpus: Sequence[Sentence]) -> List[List[UnifiedTag]]:
    unlabeled = [i for i, sentence in enumerate(corpus) if not sentence.labeled]
    if unlabeled:
        raise ValueError(f"evaluation corpus has {len(unlabeled)} untagged sentences (first at index {unlabeled[0]})")
    return [list(sentence.unified_tags) for sentence in corpus]


def evaluate_corpus(tagger, corpus: Sequence[Sentence]) -> Tuple[EvalReport, EvalReport]:
    gold = _gold(corpus)
    pred = [tagger.predict(sentence) for sentence in corpus]
    return score_tag_sequences(gold, pred)


def evaluate_boundary_head(tagger, corpus: Sequence[Sentence]) -> EvalReport:
    """AD F1 of the auxiliary boundary head, logged next to the unified-head scores."""
    gold = _gold(corpus)
    tp = n_pred = n_gold = 0
    for gold_tags, sentence in zip(gold, corpus):
        counts = exact_match_counts(segments_from_tags(gold_tags),
                                    segments_from_tags(tagger.predict_boundary(sentence)), AD)
        tp, n_pred, n_gold = tp + counts[0], n_pred + counts[1], n_gold + counts[2]
    return make_report("AD-boundary", tp, n_pred, n_gold)


def per_sentiment_breakdown(gold: Sequence[Sequence[UnifiedTag]],
                            pred: Sequence[Sequence[UnifiedTag]]) -> Dict[str, EvalReport]:
    totals = {sentiment: [0, 0, 0] for sentiment in Sentiment}
    for gold_tags, pred_tags in zip(gold, pred):
        gold_segments = segments_from_tags(gold_tags)
        pred_segments = segments_from_tags(pred_tags)
        for sentiment in Sentiment:
            counts = exact_match_counts([s for s in gold_segments if s.sentiment is sentiment],
                                        [s for s in pred_segments if s.sentiment is sentiment], ADS)
            totals[sentiment] = [a + b for a, b in zip(totals[sentiment], counts)]
    return {s.value: make_report(f"ADS-{s.value}", *counts) for s, counts in totals.items()}
