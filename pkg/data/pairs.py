import itertools
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from data.conll import parse_conll
from data.errors import CorpusError
from data.lexicon import with_opinions
from models.corpus import TransferPair
from models.tags import DomainLabel

logger = logging.getLogger(__name__)

# Restaurant, Laptop, Device, Service
DEFAULT_DOMAINS = ("R", "L", "D", "S")
SIMILAR_PAIRS = (("L", "D"),)


def transfer_pairs(domains: Sequence[str] = DEFAULT_DOMAINS,
                   excluded: Iterable[Tuple[str, str]] = SIMILAR_PAIRS) -> List[Tuple[str, str]]:
    """Ordered (source, target) pairs, skipping excluded pairs in both directions."""
    blocked = set()
    for a, b in excluded:
        blocked.update({(a, b), (b, a)})
    return [(s, t) for s, t in itertools.permutations(domains, 2) if (s, t) not in blocked]


def _split(data_dir: Path, domain: str, split: str) -> Path:
    path = data_dir / f"{domain}_{split}.conll"
    if not path.exists():
        raise FileNotFoundError(f"missing corpus file {path}")
    return path


def load_transfer_pair(data_dir, source: str, target: str, lexicon: Optional[frozenset] = None,
                       keep_target_labels: bool = False) -> TransferPair:
    """Read ``<domain>_train.conll`` / ``<domain>_test.conll`` for both domains.

    Target training tags are dropped; with ``keep_target_labels`` a labeled
    copy is kept aside for the target-only reference model.
    """
    data_dir = Path(data_dir)
    source_train = parse_conll(_split(data_dir, source, "train"), DomainLabel.SOURCE)
    source_test = parse_conll(_split(data_dir, source, "test"), DomainLabel.SOURCE)
    target_raw = parse_conll(_split(data_dir, target, "train"), DomainLabel.TARGET)
    target_test = parse_conll(_split(data_dir, target, "test"), DomainLabel.TARGET)
    if not source_train or not target_raw:
        raise CorpusError(f"empty training corpus for pair {source}->{target}")

    target_train = [s.model_copy(update={"unified_tags": None}) for s in target_raw]
    target_labeled = None
    if keep_target_labels:
        target_labeled = [s for s in target_raw if s.labeled]
        if not target_labeled:
            raise CorpusError(f"{target} training data carries no tags for the target-only model")
    if lexicon is not None:
        source_train, source_test = with_opinions(source_train, lexicon), with_opinions(source_test, lexicon)
        target_train, target_test = with_opinions(target_train, lexicon), with_opinions(target_test, lexicon)
        if target_labeled is not None:
            target_labeled = with_opinions(target_labeled, lexicon)
    return TransferPair(
        source_train=source_train,
        target_train=target_train,
        source_test=source_test,
        target_test=target_test,
        target_labeled=target_labeled,
        name=f"{source}->{target}",
    )
