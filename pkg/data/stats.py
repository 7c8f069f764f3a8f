from collections import Counter
from typing import Dict, Sequence

from data.tagging import segments_from_tags
from models.corpus import Sentence


def corpus_stats(sentences: Sequence[Sentence]) -> Dict[str, object]:
    sentiments: Counter = Counter()
    aspects = multiword = labeled = 0
    for sentence in sentences:
        if not sentence.labeled:
            continue
        labeled += 1
        for segment in segments_from_tags(sentence.unified_tags):
            aspects += 1
            multiword += segment.end > segment.start
            sentiments[segment.sentiment.value] += 1
    return {
        "sentences": len(sentences),
        "labeled_sentences": labeled,
        "tokens": sum(len(s) for s in sentences),
        "aspects": aspects,
        "multiword_aspects": multiword,
        "sentiments": dict(sorted(sentiments.items())),
    }
