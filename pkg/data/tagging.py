"""Conversions between tag sequences and aspect segments."""
from typing import List, Optional, Sequence, Union

from data.errors import SegmentError
from models.corpus import Segment
from models.tags import BoundaryTag, Sentiment, UnifiedTag

Tag = Union[UnifiedTag, BoundaryTag]


def _parts(tag) -> tuple:
    if isinstance(tag, UnifiedTag):
        return tag.parts()
    if isinstance(tag, BoundaryTag):
        return tag, None
    text = str(tag)
    if text == "O":
        return BoundaryTag.O, None
    if "-" in text:
        return UnifiedTag(text).parts()
    return BoundaryTag(text), None


def unified_to_boundary(tags: Sequence[UnifiedTag]) -> List[BoundaryTag]:
    return [tag.boundary for tag in tags]


def segments_from_tags(tags: Sequence[Tag]) -> List[Segment]:
    """Decode left to right, repairing ill-formed runs conlleval-style.

    An I or E with nothing open starts a segment, a B or S inside an open
    segment closes it at the previous token, and a segment still open at the
    end closes on the last token. The first tag of a segment fixes its
    sentiment.
    """
    segments: List[Segment] = []
    start: Optional[int] = None
    sentiment: Optional[Sentiment] = None

    def close(end: int) -> None:
        segments.append(Segment(start=start, end=end, sentiment=sentiment))

    for i, tag in enumerate(tags):
        position, tag_sentiment = _parts(tag)
        if position in (BoundaryTag.O, BoundaryTag.S, BoundaryTag.B):
            if start is not None:
                close(i - 1)
                start = None
            if position is BoundaryTag.S:
                segments.append(Segment(start=i, end=i, sentiment=tag_sentiment))
            elif position is BoundaryTag.B:
                start, sentiment = i, tag_sentiment
            continue
        if start is None:
            start, sentiment = i, tag_sentiment
        if position is BoundaryTag.E:
            close(i)
            start = None
    if start is not None:
        close(len(tags) - 1)
    return segments


def tags_from_segments(segments: Sequence[Segment], length: int, with_sentiment: bool = True) -> List[Tag]:
    tags: List[Tag] = [UnifiedTag.O if with_sentiment else BoundaryTag.O] * length
    last_end = -1
    for segment in sorted(segments, key=lambda s: (s.start, s.end)):
        if segment.start <= last_end:
            raise SegmentError(f"segment ({segment.start}, {segment.end}) overlaps a previous one")
        if segment.end >= length:
            raise SegmentError(f"segment ({segment.start}, {segment.end}) exceeds length {length}")
        last_end = segment.end
        if segment.start == segment.end:
            positions = [BoundaryTag.S]
        else:
            inner = segment.end - segment.start - 1
            positions = [BoundaryTag.B] + [BoundaryTag.I] * inner + [BoundaryTag.E]
        for offset, position in enumerate(positions):
            tags[segment.start + offset] = (
                UnifiedTag.compose(position, segment.sentiment) if with_sentiment else position
            )
    return tags


def repair_tags(tags: Sequence[UnifiedTag]) -> List[UnifiedTag]:
    """Well-formed sequence with the segments a decoder would read off ``tags``."""
    return tags_from_segments(segments_from_tags(tags), len(tags), with_sentiment=True)
