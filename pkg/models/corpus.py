from typing import List, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from models.tags import DomainLabel, OpinionLabel, Sentiment, UnifiedTag, is_well_formed


class Segment(BaseModel):
    model_config = ConfigDict(frozen=True)

    start: int
    end: int
    sentiment: Optional[Sentiment] = None

    @model_validator(mode="after")
    def _check_bounds(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid segment span ({self.start}, {self.end})")
        return self

    def span(self):
        return self.start, self.end

    def key(self):
        return self.start, self.end, self.sentiment


class Sentence(BaseModel):
    """One tokenized sentence; ``repairs`` lists input line numbers whose tags were normalized."""

    model_config = ConfigDict(frozen=True)

    tokens: List[str]
    unified_tags: Optional[List[UnifiedTag]] = None
    opinion_labels: List[OpinionLabel] = []
    domain: DomainLabel = DomainLabel.SOURCE
    repairs: List[int] = []

    @field_validator("tokens")
    @classmethod
    def _non_empty(cls, tokens):
        if not tokens:
            raise ValueError("a sentence needs at least one token")
        return tokens

    @model_validator(mode="after")
    def _check_lengths(self):
        size = len(self.tokens)
        if self.unified_tags is not None:
            if len(self.unified_tags) != size:
                raise ValueError(f"{len(self.unified_tags)} tags for {size} tokens")
            if not is_well_formed(self.unified_tags):
                raise ValueError(f"ill-formed tag sequence {[t.value for t in self.unified_tags]}")
        if self.opinion_labels and len(self.opinion_labels) != size:
            raise ValueError(f"{len(self.opinion_labels)} opinion labels for {size} tokens")
        return self

    @property
    def labeled(self) -> bool:
        return self.unified_tags is not None

    def __len__(self) -> int:
        return len(self.tokens)


class TransferPair(BaseModel):
    """Source/target splits for one adaptation experiment.

    ``target_train`` never carries tags; ``target_labeled`` is only filled
    when the target-only reference model is requested.
    """

    source_train: List[Sentence]
    target_train: List[Sentence]
    source_test: List[Sentence]
    target_test: List[Sentence]
    target_labeled: Optional[List[Sentence]] = None
    name: str = "source->target"

    @model_validator(mode="after")
    def _target_unlabeled(self):
        for sentence in self.target_train:
            if sentence.labeled:
                raise ValueError("target training sentences must not carry tags")
        return self
