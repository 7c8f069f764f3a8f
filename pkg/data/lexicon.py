import logging
from pathlib import Path
from typing import FrozenSet, Iterable, List

from data.errors import LexiconError
from models.corpus import Sentence
from models.tags import OpinionLabel

logger = logging.getLogger(__name__)


def load_lexicon(path) -> FrozenSet[str]:
    """One opinion word per line; '#' lines and blanks are skipped, entries are case-folded."""
    path = Path(path)
    if not path.exists():
        raise LexiconError(f"lexicon file not found: {path}")
    words = set()
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            entry = line.strip()
            if not entry or entry.startswith("#"):
                continue
            words.add(entry.casefold())
    logger.info("Loaded %d opinion words from %s", len(words), path)
    return frozenset(words)


def label_opinions(sentence: Sentence, lexicon: FrozenSet[str]) -> List[OpinionLabel]:
    return [
        OpinionLabel.OPINION if token.casefold() in lexicon else OpinionLabel.NOT_OPINION
        for token in sentence.tokens
    ]


def with_opinions(sentences: Iterable[Sentence], lexicon: FrozenSet[str]) -> List[Sentence]:
    return [s.model_copy(update={"opinion_labels": label_opinions(s, lexicon)}) for s in sentences]
