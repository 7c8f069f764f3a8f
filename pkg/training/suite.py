import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from evaluation.scoring import evaluate_corpus
from models.config import TrainingConfig
from models.corpus import TransferPair
from models.reports import RunSummary, SuiteReport
from training.checkpointing import save_model
from training.metrics_log import MetricLog
from training.trainer import train

logger = logging.getLogger(__name__)


def _percent(values: List[float]):
    scaled = 100.0 * np.asarray(values, dtype=np.float64)
    return float(scaled.mean()), float(scaled.std())


def run_suite(pair: TransferPair, config: TrainingConfig, seeds: Optional[Sequence[int]] = None,
              metric_log: Optional[MetricLog] = None, checkpoint_dir: Optional[Path] = None) -> SuiteReport:
    """Train once per seed and score the best-validation model on the target test split.

    Means and (population) standard deviations are reported in F1 points.
    """
    seeds = list(seeds if seeds is not None else config.seeds)
    if not seeds:
        raise ValueError("run_suite needs at least one seed")
    runs: List[RunSummary] = []
    for seed in seeds:
        result = train(pair, config, seed, metric_log)
        target_ad, target_ads = evaluate_corpus(result.tagger, pair.target_test)
        summary = RunSummary(seed=seed, best_epoch=result.best_epoch, best_val_ads_f1=result.best_val_ads_f1,
                             target_ad=target_ad, target_ads=target_ads)
        runs.append(summary)
        if metric_log is not None:
            metric_log.write_event("run", **summary.model_dump(mode="json"))
        if checkpoint_dir is not None:
            checkpoint_dir = Path(checkpoint_dir)
            checkpoint_dir.mkdir(parents=True, exist_ok=True)
            save_model(checkpoint_dir / f"seed{seed}.ckpt", result.tagger, result.trainer.adam_states())
        logger.info("Seed %d on %s: target AD %.4f, ADS %.4f", seed, pair.name,
                    target_ad.micro_f1, target_ads.micro_f1)

    ad_mean, ad_std = _percent([run.target_ad.micro_f1 for run in runs])
    ads_mean, ads_std = _percent([run.target_ads.micro_f1 for run in runs])
    return SuiteReport(pair=pair.name, mode=config.mode.value, runs=runs, ad_mean=ad_mean, ad_std=ad_std,
                       ads_mean=ads_mean, ads_std=ads_std)
