import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from data.errors import ConllFormatError
from data.tagging import segments_from_tags, tags_from_segments
from models.corpus import Sentence
from models.tags import DomainLabel, UnifiedTag

logger = logging.getLogger(__name__)

SEP = "\t"


def _parse_tag(path, line_no: int, text: str) -> UnifiedTag:
    try:
        return UnifiedTag(text)
    except ValueError as exc:
        raise ConllFormatError(path, line_no, f"unknown tag {text!r}") from exc


def _build_sentence(path, rows: List[Tuple[int, str, Optional[str]]], domain: DomainLabel) -> Sentence:
    tokens = [token for _, token, _ in rows]
    tagged = [tag is not None for _, _, tag in rows]
    if any(tagged) and not all(tagged):
        missing = next(line for (line, _, tag) in rows if tag is None)
        raise ConllFormatError(path, missing, "tag column missing inside a tagged sentence")
    if not any(tagged):
        return Sentence(tokens=tokens, domain=domain)

    raw = [_parse_tag(path, line, tag) for line, _, tag in rows]
    segments = segments_from_tags(raw)
    for segment in segments:
        sentiments = {tag.sentiment for tag in raw[segment.start:segment.end + 1] if tag is not UnifiedTag.O}
        if len(sentiments) > 1:
            line = rows[segment.start][0]
            found = sorted(s.value for s in sentiments)
            raise ConllFormatError(path, line, f"conflicting sentiments {found} in one aspect")
    tags = tags_from_segments(segments, len(raw), with_sentiment=True)
    repairs = [rows[i][0] for i in range(len(raw)) if raw[i] is not tags[i]]
    if repairs:
        logger.warning("%s: repaired ill-formed tags on lines %s", path, repairs)
    return Sentence(tokens=tokens, unified_tags=tags, domain=domain, repairs=repairs)


def parse_lines(lines: Iterable[str], path="<memory>", domain: DomainLabel = DomainLabel.SOURCE) -> List[Sentence]:
    sentences: List[Sentence] = []
    rows: List[Tuple[int, str, Optional[str]]] = []
    line_no = 0
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            if rows:
                sentences.append(_build_sentence(path, rows, domain))
                rows = []
            continue
        cols = line.split(SEP)
        if len(cols) > 2 or not cols[0]:
            raise ConllFormatError(path, line_no, f"expected 'token<TAB>tag', got {line!r}")
        rows.append((line_no, cols[0], cols[1] if len(cols) == 2 and cols[1] else None))
    if rows:
        sentences.append(_build_sentence(path, rows, domain))
    return sentences


def parse_conll(path, domain: DomainLabel = DomainLabel.SOURCE) -> List[Sentence]:
    """Read one-token-per-line files; blank lines separate sentences, the tag column is optional."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        sentences = parse_lines(fh, path=path, domain=domain)
    repaired = sum(1 for s in sentences if s.repairs)
    logger.info("Parsed %d sentences from %s (%d repaired)", len(sentences), path, repaired)
    return sentences


def format_conll(sentences: Sequence[Sentence], tags: Optional[Sequence[Sequence[UnifiedTag]]] = None) -> str:
    chunks = []
    for index, sentence in enumerate(sentences):
        column = tags[index] if tags is not None else sentence.unified_tags
        if column is None:
            chunks.append("".join(f"{token}\n" for token in sentence.tokens))
        else:
            chunks.append("".join(f"{token}{SEP}{tag.value}\n" for token, tag in zip(sentence.tokens, column)))
    return "\n".join(chunks) + ("\n" if chunks else "")


def write_conll(path, sentences: Sequence[Sentence], tags: Optional[Sequence[Sequence[UnifiedTag]]] = None) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_conll(sentences, tags))
