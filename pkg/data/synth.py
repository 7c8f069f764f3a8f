"""Two-domain synthetic corpora: shared aspect-opinion patterns, disjoint aspect words."""
import logging
import re
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from data.conll import write_conll
from data.errors import SynthSpecError
from data.tagging import tags_from_segments
from models.config import SynthSpec
from models.corpus import Segment, Sentence
from models.tags import DomainLabel, Sentiment

logger = logging.getLogger(__name__)

_SLOT = re.compile(r"<([AO])(\d)>")

RESTAURANT_ASPECTS = [
    "pizza", "pasta", "sushi", "steak", "salad", "soup", "bread", "dessert", "coffee", "wine",
    "beer", "service", "staff", "waiter", "waitress", "menu", "decor", "ambience", "music",
    "atmosphere", "burger", "fries", "rice", "noodles", "curry", "tea", "seafood", "chicken",
    "wine list", "fish tacos", "lunch menu", "dining room", "outdoor seating", "house salad",
    "chocolate cake", "happy hour", "portion size", "bar area", "tuna roll", "garlic bread",
]
LAPTOP_ASPECTS = [
    "battery", "screen", "keyboard", "trackpad", "display", "processor", "memory", "charger",
    "speakers", "camera", "webcam", "fan", "hinge", "case", "software", "drivers", "graphics",
    "ports", "touchpad", "monitor", "mouse", "cpu", "price", "warranty", "design", "weight",
    "speed", "performance",
    "battery life", "hard drive", "usb ports", "power supply", "operating system",
    "screen resolution", "boot time", "sound quality", "build quality", "graphics card",
    "customer support", "touch screen",
]
OPINIONS = {
    "great": "POS", "excellent": "POS", "amazing": "POS", "good": "POS", "fantastic": "POS",
    "wonderful": "POS", "superb": "POS", "lovely": "POS", "perfect": "POS", "nice": "POS",
    "terrible": "NEG", "awful": "NEG", "bad": "NEG", "poor": "NEG", "horrible": "NEG",
    "disappointing": "NEG", "mediocre": "NEG", "bland": "NEG", "slow": "NEG", "noisy": "NEG",
}
TEMPLATES = [
    "the <A1> is <O1>",
    "<O1> <A1> and <A2>",
    "<D> the <A1> was <O1> but the <A2> was <O2>",
    "i found the <A1> <O1> <D>",
    "<D> , <O1> <A1> here",
    "the <A1> seemed <O1> to me",
]
DISTRACTORS = ["honestly", "overall", "today", "again", "well", "so", "anyway", "basically", "frankly", "yesterday"]
ASPECT_WEIGHT = 1.0
TOPIC_WEIGHT = 2.0


def default_synth_spec(seed: int = 13, train_size: int = 400, test_size: int = 100,
                       embedding_dim: int = 50) -> SynthSpec:
    return SynthSpec(
        source_aspects=RESTAURANT_ASPECTS,
        target_aspects=LAPTOP_ASPECTS,
        opinions=OPINIONS,
        templates=TEMPLATES,
        distractors=DISTRACTORS,
        train_size=train_size,
        test_size=test_size,
        embedding_dim=embedding_dim,
        seed=seed,
    )


def _words(phrases) -> set:
    return {word for phrase in phrases for word in phrase.split()}


def validate_spec(spec: SynthSpec) -> None:
    source, target = _words(spec.source_aspects), _words(spec.target_aspects)
    shared = source & target
    if shared:
        raise SynthSpecError(f"source and target aspect vocabularies overlap: {sorted(shared)}")
    for word, polarity in spec.opinions.items():
        if polarity not in Sentiment.__members__:
            raise SynthSpecError(f"opinion {word!r} has unknown polarity {polarity!r}")
    fillers = {t for template in spec.templates for t in template.split() if not t.startswith("<")}
    groups = {"aspects": source | target, "opinions": set(spec.opinions), "distractors": set(spec.distractors),
              "template words": fillers}
    names = sorted(groups)
    for i, left in enumerate(names):
        for right in names[i + 1:]:
            clash = groups[left] & groups[right]
            if clash:
                raise SynthSpecError(f"{left} and {right} share tokens {sorted(clash)}")
    for template in spec.templates:
        if "<A1>" not in template or "<O1>" not in template:
            raise SynthSpecError(f"template {template!r} needs at least <A1> and <O1>")


def fill_template(template: str, aspects: List[str], opinions: List[str], spec: SynthSpec,
                  distractor: str = "", domain: DomainLabel = DomainLabel.SOURCE) -> Sentence:
    """Place aspects and opinions into a template; aspect k takes the polarity of opinion k, else opinion 1."""
    tokens: List[str] = []
    spans: List[Tuple[int, int, str]] = []
    for piece in template.split():
        match = _SLOT.fullmatch(piece)
        if piece == "<D>":
            tokens.append(distractor)
        elif match is None:
            tokens.append(piece)
        elif match.group(1) == "O":
            tokens.append(opinions[int(match.group(2)) - 1])
        else:
            words = aspects[int(match.group(2)) - 1].split()
            spans.append((len(tokens), len(tokens) + len(words) - 1, match.group(2)))
            tokens.extend(words)
    segments = []
    for start, end, slot in spans:
        opinion = opinions[int(slot) - 1] if f"<O{slot}>" in template else opinions[0]
        segments.append(Segment(start=start, end=end, sentiment=Sentiment(spec.opinions[opinion])))
    return Sentence(tokens=tokens, unified_tags=tags_from_segments(segments, len(tokens)), domain=domain)


def _render(template: str, aspects: List[str], spec: SynthSpec, rng: np.random.Generator,
            domain: DomainLabel) -> Sentence:
    opinion_words = sorted(spec.opinions)
    opinions = [opinion_words[int(i)] for i in rng.integers(len(opinion_words), size=2)]
    distractor = spec.distractors[int(rng.integers(len(spec.distractors)))]
    return fill_template(template, aspects, opinions, spec, distractor, domain)


def _corpus(spec: SynthSpec, aspects: List[str], size: int, rng: np.random.Generator,
            domain: DomainLabel) -> List[Sentence]:
    sentences = []
    for _ in range(size):
        template = spec.templates[int(rng.integers(len(spec.templates)))]
        picks = rng.choice(len(aspects), size=2, replace=False)
        sentences.append(_render(template, [aspects[int(i)] for i in picks], spec, rng, domain))
    return sentences


def synthetic_vectors(spec: SynthSpec, rng: np.random.Generator) -> Dict[str, np.ndarray]:
    """Stand-in pretrained vectors for every word the generator can emit.

    Aspect words of both domains share one direction. On top of it each
    domain pushes its aspect words along a common topic axis, twice as hard
    and with opposite signs. Opinion words share an opinion direction and
    carry their polarity on a fourth one. Each word also gets its own noise,
    orthogonal to those four directions.
    """
    dim = spec.embedding_dim
    basis, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    aspect, topic, opinion, polarity = basis[:, 0], basis[:, 1], basis[:, 2], basis[:, 3]
    rest = basis[:, 4:]

    def noise(scale: float) -> np.ndarray:
        return rest @ rng.normal(size=rest.shape[1]) * (scale / np.sqrt(rest.shape[1]))

    vectors: Dict[str, np.ndarray] = {}
    for words, sign in ((_words(spec.source_aspects), 1.0), (_words(spec.target_aspects), -1.0)):
        for word in sorted(words):
            vectors[word] = ASPECT_WEIGHT * aspect + sign * TOPIC_WEIGHT * topic + noise(0.5)
    signs = {"POS": 1.0, "NEG": -1.0, "NEU": 0.0}
    for word in sorted(spec.opinions):
        vectors[word] = opinion + signs[spec.opinions[word]] * polarity + noise(0.5)
    fillers = {t for template in spec.templates for t in template.split() if not t.startswith("<")}
    for word in sorted(fillers | set(spec.distractors)):
        vectors[word] = noise(1.0)
    return vectors


def write_vectors(path: Path, vectors: Dict[str, np.ndarray]) -> None:
    """word2vec text format: a ``count dim`` header, then one word per line."""
    dim = len(next(iter(vectors.values())))
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(vectors)} {dim}\n")
        for word in sorted(vectors):
            fh.write(word + " " + " ".join(f"{value:.6f}" for value in vectors[word]) + "\n")


def generate(spec: SynthSpec, out_dir, lexicon_name: str = "lexicon.txt",
             vectors_name: str = "embeddings.txt") -> Dict[str, Path]:
    """Write source/target train/test CoNLL files, the opinion lexicon and word vectors into ``out_dir``."""
    validate_spec(spec)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    paths: Dict[str, Path] = {}
    for name, aspects, domain in (("source", spec.source_aspects, DomainLabel.SOURCE),
                                  ("target", spec.target_aspects, DomainLabel.TARGET)):
        for split, size in (("train", spec.train_size), ("test", spec.test_size)):
            path = out_dir / f"{name}_{split}.conll"
            write_conll(path, _corpus(spec, aspects, size, rng, domain))
            paths[f"{name}_{split}"] = path
    lexicon = out_dir / lexicon_name
    with lexicon.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("# opinion words emitted by the synthetic generator\n")
        for word in sorted(spec.opinions):
            fh.write(f"{word}\n")
    paths["lexicon"] = lexicon
    vectors = out_dir / vectors_name
    write_vectors(vectors, synthetic_vectors(spec, rng))
    paths["embeddings"] = vectors
    logger.info("Synthetic corpora written to %s (seed %d)", out_dir, spec.seed)
    return paths
