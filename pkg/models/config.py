from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Self


class ModelMode(str, Enum):
    BASE_SO = "BASE_SO"
    BASE_TO = "BASE_TO"
    BASE_DMI = "BASE_DMI"
    AD_AL = "AD_AL"
    AD_SAL = "AD_SAL"
    ADS_SAL = "ADS_SAL"

    @property
    def uses_memory(self) -> bool:
        return self not in (ModelMode.BASE_SO, ModelMode.BASE_TO)

    @property
    def adversarial(self) -> bool:
        return self in (ModelMode.AD_AL, ModelMode.AD_SAL, ModelMode.ADS_SAL)

    @property
    def selective(self) -> bool:
        return self in (ModelMode.AD_SAL, ModelMode.ADS_SAL)

    @property
    def high_level_alignment(self) -> bool:
        return self is ModelMode.ADS_SAL


class Schedule(str, Enum):
    ALTERNATING = "ALTERNATING"
    JOINT = "JOINT"


class Alternation(str, Enum):
    BATCH = "batch"
    EPOCH = "epoch"


class MemoryInit(str, Enum):
    LEARNED = "learned"
    ZERO = "zero"


class LstmUInput(str, Enum):
    CORRELATION = "correlation"
    CONCAT = "concat"


class Precision(str, Enum):
    FLOAT32 = "float32"
    FLOAT64 = "float64"


class TrainingConfig(BaseModel):
    """Every knob of a training run; defaults are the published settings."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    mode: ModelMode = ModelMode.AD_SAL
    schedule: Schedule = Schedule.ALTERNATING
    alternation: Alternation = Alternation.BATCH
    lr: float = Field(0.001, gt=0)
    batch_size: int = Field(64, ge=2)
    rho: float = Field(1.0, ge=0)
    lam: float = Field(0.1, ge=0)
    gamma: float = Field(1.0, ge=0)
    hops: int = Field(2, ge=1)
    bilinear_k: int = Field(50, ge=1)
    dim_b: int = Field(100, ge=2)
    dim_u: int = Field(100, ge=2)
    per_direction_hidden: bool = False
    embed_dim: int = Field(100, ge=1)
    dropout: float = Field(0.5, ge=0, lt=1)
    representation_dropout: bool = True
    clip_norm: float = Field(40.0, gt=0)
    epochs: int = Field(30, ge=1)
    seeds: List[int] = [1, 2, 3, 4, 5]
    shared_adam: bool = False
    detach_selector: bool = True
    memory_init: MemoryInit = MemoryInit.LEARNED
    lstm_u_input: LstmUInput = LstmUInput.CORRELATION
    finetune_embeddings: bool = False
    precision: Precision = Precision.FLOAT32
    init_bound: float = Field(0.2, gt=0)
    oov_bound: float = Field(0.25, gt=0)
    embedding_path: Optional[str] = None
    lexicon_path: Optional[str] = None

    @field_validator("seeds")
    @classmethod
    def _at_least_one_seed(cls, seeds):
        if not seeds:
            raise ValueError("at least one seed is required")
        return seeds

    @model_validator(mode="after")
    def _even_batch(self):
        if self.batch_size % 2:
            raise ValueError("batch_size must be even (half source, half target)")
        return self

    def hidden_per_direction(self, total: int) -> int:
        return total if self.per_direction_hidden else total // 2

    def with_overrides(self, overrides: Dict[str, object]) -> Self:
        merged = self.model_dump()
        merged.update(overrides)
        return type(self).model_validate(merged)


class SynthSpec(BaseModel):
    """Recipe for a two-domain synthetic corpus with disjoint aspect vocabularies."""

    model_config = ConfigDict(extra="forbid")

    source_aspects: List[str]
    target_aspects: List[str]
    opinions: Dict[str, str]
    templates: List[str]
    distractors: List[str]
    train_size: int = Field(400, ge=1)
    test_size: int = Field(100, ge=1)
    embedding_dim: int = Field(50, ge=8)
    seed: int = 13
