"""Finite-difference check of a whole tagger on a toy batch."""
import logging
from typing import Dict, List, Optional

import numpy as np

from data.batching import Batch
from data.embeddings import Vocabulary, random_embeddings
from diffcore.gradcheck import GradCheckReport, check_gradients
from diffcore.node import constant, precision
from diffcore.params import FEATURE
from models.config import ModelMode, TrainingConfig
from models.corpus import Sentence
from models.tags import DomainLabel, OpinionLabel, UnifiedTag
from network.adversarial import sal_loss
from network.tagger import Tagger
from training.trainer import Trainer

logger = logging.getLogger(__name__)


def toy_batch(steps: int = 3) -> Batch:
    source_tokens = ["the", "pizza", "is", "great", "today"][:steps]
    target_tokens = ["a", "screen", "so", "bad", "again"][:steps]
    source_tags = [UnifiedTag.O, UnifiedTag.S_POS, UnifiedTag.O, UnifiedTag.O, UnifiedTag.O][:steps]
    source = Sentence(tokens=source_tokens, unified_tags=source_tags,
                      opinion_labels=[OpinionLabel.OPINION if t in ("great", "bad") else OpinionLabel.NOT_OPINION
                                      for t in source_tokens])
    target = Sentence(tokens=target_tokens, domain=DomainLabel.TARGET,
                      opinion_labels=[OpinionLabel.OPINION if t in ("great", "bad") else OpinionLabel.NOT_OPINION
                                      for t in target_tokens])
    return Batch(source=[source], target=[target])


def toy_config(mode: ModelMode = ModelMode.AD_SAL, dim: int = 4, slices: int = 2, hops: int = 2,
               lam: float = 0.1) -> TrainingConfig:
    return TrainingConfig(mode=mode, embed_dim=dim, dim_b=dim, dim_u=dim, bilinear_k=slices, hops=hops,
                          lam=lam, dropout=0.0, finetune_embeddings=True, precision="float64", seeds=[0])


def _merge(reports: List[GradCheckReport]) -> GradCheckReport:
    merged = GradCheckReport()
    for report in reports:
        merged.checked += report.checked
        for name, error in report.per_param.items():
            merged.per_param[name] = max(error, merged.per_param.get(name, 0.0))
            if error >= merged.max_error:
                merged.max_error, merged.worst = error, name
    return merged


def model_grad_check(config: Optional[TrainingConfig] = None, steps: int = 3, seed: int = 0,
                     samples: int = 6, eps: float = 1e-5) -> GradCheckReport:
    """Check the task objective and, for adversarial modes, the domain objective.

    Behind the gradient reversal every feature parameter should carry -lam
    times the numeric gradient of the domain loss. The selector attention is
    frozen at its initial value so the numeric side sees the same constant
    weights the analytic side does.
    """
    config = config or toy_config()
    batch = toy_batch(steps)
    with precision("float64"):
        rng = np.random.default_rng(seed)
        vocab = Vocabulary.build(batch.source, batch.target)
        table = random_embeddings(vocab, config.embed_dim, rng, config.oov_bound).table
        tagger = Tagger(config, vocab, table, rng)
        trainer = Trainer(tagger, config, np.random.default_rng(seed))
        reports = [check_gradients(lambda: trainer.task_objective(batch, training=False)[0], tagger.store,
                                   eps=eps, samples=samples, seed=seed)]
        if tagger.mode.adversarial:
            sentences = batch.source + batch.target
            frozen = None
            if tagger.mode.selective:
                frozen = [constant(tagger.forward(s).selector.value.copy()) for s in sentences]

            def domain_loss():
                outputs = [tagger.forward(s, with_domain=True) for s in sentences]
                return sal_loss([o.domain for o in outputs], [s.domain for s in sentences], frozen,
                                selective=tagger.mode.selective, detach=True)

            scales: Dict[str, float] = {name: -config.lam for name in tagger.store.names([FEATURE])}
            reports.append(check_gradients(domain_loss, tagger.store, eps=eps, samples=samples, scales=scales,
                                           seed=seed))
    report = _merge(reports)
    logger.info("Model gradient check (%s): max relative error %.3e at %s", config.mode.value,
                report.max_error, report.worst)
    return report
