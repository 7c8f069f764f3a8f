from typing import Dict, List, Optional

from pydantic import BaseModel


class EvalReport(BaseModel):
    task: str
    tp: int
    pred: int
    gold: int
    precision: float
    recall: float
    micro_f1: float


class EpochRecord(BaseModel):
    event: str = "epoch"
    seed: int
    epoch: int
    main_loss: float
    opinion_loss: Optional[float] = None
    domain_loss: Optional[float] = None
    max_grad_norm: float
    val_ad_f1: float
    val_ads_f1: float
    val_boundary_f1: Optional[float] = None
    best: bool = False


class RunSummary(BaseModel):
    seed: int
    best_epoch: int
    best_val_ads_f1: float
    target_ad: Optional[EvalReport] = None
    target_ads: Optional[EvalReport] = None


class SuiteReport(BaseModel):
    pair: str
    mode: str
    runs: List[RunSummary]
    ad_mean: float
    ad_std: float
    ads_mean: float
    ads_std: float


class AttentionDump(BaseModel):
    tokens: List[str]
    hops: List[Dict[str, List[float]]]
    predicted: List[str]
