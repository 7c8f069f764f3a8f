"""Label spaces for the per-word heads."""
from enum import Enum, IntEnum
from typing import Optional, Tuple


class Sentiment(str, Enum):
    POS = "POS"
    NEG = "NEG"
    NEU = "NEU"


class BoundaryTag(str, Enum):
    B = "B"
    I = "I"  # noqa: E741
    E = "E"
    S = "S"
    O = "O"  # noqa: E741

    @property
    def code(self) -> int:
        return _BOUNDARY_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "BoundaryTag":
        return BOUNDARY_TAGS[code]


class UnifiedTag(str, Enum):
    O = "O"  # noqa: E741
    B_POS = "B-POS"
    I_POS = "I-POS"
    E_POS = "E-POS"
    S_POS = "S-POS"
    B_NEG = "B-NEG"
    I_NEG = "I-NEG"
    E_NEG = "E-NEG"
    S_NEG = "S-NEG"
    B_NEU = "B-NEU"
    I_NEU = "I-NEU"
    E_NEU = "E-NEU"
    S_NEU = "S-NEU"

    @property
    def code(self) -> int:
        return _UNIFIED_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "UnifiedTag":
        return UNIFIED_TAGS[code]

    @classmethod
    def compose(cls, position: BoundaryTag, sentiment: Optional[Sentiment]) -> "UnifiedTag":
        if position is BoundaryTag.O:
            return cls.O
        if sentiment is None:
            raise ValueError(f"tag {position.value} needs a sentiment")
        return cls(f"{position.value}-{sentiment.value}")

    @property
    def boundary(self) -> BoundaryTag:
        return BoundaryTag(self.value[0])

    @property
    def sentiment(self) -> Optional[Sentiment]:
        if self is UnifiedTag.O:
            return None
        return Sentiment(self.value[2:])

    def parts(self) -> Tuple[BoundaryTag, Optional[Sentiment]]:
        return self.boundary, self.sentiment


class OpinionLabel(IntEnum):
    NOT_OPINION = 0
    OPINION = 1


class DomainLabel(IntEnum):
    SOURCE = 0
    TARGET = 1


UNIFIED_TAGS = tuple(UnifiedTag)
BOUNDARY_TAGS = tuple(BoundaryTag)
_UNIFIED_CODES = {tag: code for code, tag in enumerate(UNIFIED_TAGS)}
_BOUNDARY_CODES = {tag: code for code, tag in enumerate(BOUNDARY_TAGS)}


def is_well_formed(tags) -> bool:
    """True when every B..E run is closed, I appears only inside one, and sentiment is constant within it."""
    open_sentiment = None
    inside = False
    for tag in tags:
        position = BoundaryTag(tag.value[0])
        sentiment = tag.sentiment if isinstance(tag, UnifiedTag) else None
        if position in (BoundaryTag.B, BoundaryTag.S, BoundaryTag.O):
            if inside:
                return False
            inside = position is BoundaryTag.B
            open_sentiment = sentiment
        elif not inside or sentiment != open_sentiment:
            return False
        elif position is BoundaryTag.E:
            inside = False
    return not inside
