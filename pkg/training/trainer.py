"""Two-stage adversarial optimization and the epoch loop with validation-based selection."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from data.batching import Batch, MixedBatcher, holdout_split
from data.embeddings import Vocabulary, load_word2vec_text, random_embeddings
from diffcore import ops
from diffcore.node import DiffNode, backward, find_non_finite, precision
from diffcore.optim import AdamState, adam_step, clip_global_norm, global_norm
from diffcore.params import DISCRIMINATOR, FEATURE, WORD_PREDICTOR
from diffcore.streams import RandomStreams
from evaluation.scoring import evaluate_boundary_head, evaluate_corpus
from models.config import Alternation, ModelMode, Schedule, TrainingConfig
from models.corpus import Sentence, TransferPair
from models.reports import EpochRecord
from network.adversarial import sal_loss
from network.tagger import Tagger
from training.errors import MissingLabelsError, NonFiniteLossError
from training.losses import main_loss, opinion_loss
from training.metrics_log import MetricLog

logger = logging.getLogger(__name__)

STAGE_ONE = (FEATURE, WORD_PREDICTOR)
STAGE_TWO = (DISCRIMINATOR, FEATURE)
ALL_PARTITIONS = (FEATURE, WORD_PREDICTOR, DISCRIMINATOR)


@dataclass
class StepMetrics:
    loss: float
    main_loss: Optional[float] = None
    opinion_loss: Optional[float] = None
    domain_loss: Optional[float] = None
    grad_norm: float = 0.0
    clipped_norm: float = 0.0


class Trainer:
    """Owns the optimizer states and the dropout stream of one run."""

    def __init__(self, tagger: Tagger, config: TrainingConfig, rng: np.random.Generator):
        self.tagger = tagger
        self.config = config
        self.rng = rng
        self.stage_one_state = AdamState(lr=config.lr)
        self.stage_two_state = self.stage_one_state if config.shared_adam else AdamState(lr=config.lr)
        self.steps = 0

    @property
    def store(self):
        return self.tagger.store

    def adam_states(self) -> Dict[str, AdamState]:
        if self.config.shared_adam:
            return {"shared": self.stage_one_state}
        return {"stage1": self.stage_one_state, "stage2": self.stage_two_state}

    def _forward(self, sentences: Sequence[Sentence], training: bool, with_domain: bool) -> List:
        return [self.tagger.forward(s, training, self.rng, with_domain) for s in sentences]

    def task_objective(self, batch: Batch, training: bool = True) -> Tuple[DiffNode, DiffNode, Optional[DiffNode]]:
        """L_M over the labeled half plus rho * L_O over the whole batch (memory modes only)."""
        mode = self.tagger.mode
        if not mode.uses_memory:
            outputs = self._forward(batch.source, training, with_domain=False)
            l_m = main_loss(outputs, batch.source)
            return l_m, l_m, None
        sentences = batch.source + batch.target
        outputs = self._forward(sentences, training, with_domain=False)
        l_m = main_loss(outputs[:len(batch.source)], batch.source)
        l_o = opinion_loss(outputs, sentences)
        return ops.add(l_m, ops.scale(l_o, self.config.rho)), l_m, l_o

    def domain_objective(self, batch: Batch, training: bool = True) -> DiffNode:
        sentences = batch.source + batch.target
        outputs = self._forward(sentences, training, with_domain=True)
        return sal_loss(
            [output.domain for output in outputs],
            [sentence.domain for sentence in sentences],
            [output.selector for output in outputs] if self.tagger.mode.selective else None,
            selective=self.tagger.mode.selective,
            detach=self.config.detach_selector,
        )

    def _guard(self, loss: DiffNode, name: str) -> None:
        if np.isfinite(loss.value).all():
            return
        bad = find_non_finite(loss)
        logger.error("Non-finite %s at step %d; first bad node %r", name, self.steps, bad)
        raise NonFiniteLossError(name, bad.op if bad is not None else "?", bad.id if bad is not None else -1,
                                 self.steps)

    def _update(self, loss: DiffNode, name: str, partitions: Sequence[str], state: AdamState) -> Tuple[float, float]:
        self._guard(loss, name)
        self.store.zero_grad()
        backward(loss)
        names = self.store.names(partitions)
        norm = global_norm(self.store, names)
        clip_global_norm(self.store, names, self.config.clip_norm)
        clipped = global_norm(self.store, names)
        # parameters the loss never reaches take an explicit zero gradient
        for param in names:
            node = self.store[param]
            if node.grad is None:
                node.grad = np.zeros_like(node.value)
        adam_step(self.store, state, partitions)
        self.steps += 1
        return norm, clipped

    def stage_one(self, batch: Batch) -> StepMetrics:
        total, l_m, l_o = self.task_objective(batch)
        norm, clipped = self._update(total, "task loss", STAGE_ONE, self.stage_one_state)
        return StepMetrics(loss=float(total.value), main_loss=float(l_m.value),
                           opinion_loss=None if l_o is None else float(l_o.value),
                           grad_norm=norm, clipped_norm=clipped)

    def stage_two(self, batch: Batch) -> StepMetrics:
        l_d = self.domain_objective(batch)
        norm, clipped = self._update(l_d, "domain loss", STAGE_TWO, self.stage_two_state)
        return StepMetrics(loss=float(l_d.value), domain_loss=float(l_d.value), grad_norm=norm, clipped_norm=clipped)

    def alternating_step(self, batch: Batch) -> Tuple[StepMetrics, Optional[StepMetrics]]:
        first = self.stage_one(batch)
        second = self.stage_two(batch) if self.tagger.mode.adversarial else None
        return first, second

    def joint_step(self, batch: Batch) -> StepMetrics:
        """One update of every partition on L_M + rho L_O + gamma L_D."""
        total, l_m, l_o = self.task_objective(batch)
        l_d = None
        if self.tagger.mode.adversarial:
            l_d = self.domain_objective(batch)
            total = ops.add(total, ops.scale(l_d, self.config.gamma))
        norm, clipped = self._update(total, "joint loss", ALL_PARTITIONS, self.stage_one_state)
        return StepMetrics(loss=float(total.value), main_loss=float(l_m.value),
                           opinion_loss=None if l_o is None else float(l_o.value),
                           domain_loss=None if l_d is None else float(l_d.value),
                           grad_norm=norm, clipped_norm=clipped)

    def run_epoch(self, batches: Sequence[Batch]) -> List[StepMetrics]:
        metrics: List[StepMetrics] = []
        if self.config.schedule is Schedule.JOINT:
            return [self.joint_step(batch) for batch in batches]
        if self.config.alternation is Alternation.EPOCH:
            metrics = [self.stage_one(batch) for batch in batches]
            if self.tagger.mode.adversarial:
                metrics += [self.stage_two(batch) for batch in batches]
            return metrics
        for batch in batches:
            first, second = self.alternating_step(batch)
            metrics.append(first)
            if second is not None:
                metrics.append(second)
        return metrics


@dataclass
class TrainResult:
    tagger: Tagger
    trainer: Trainer
    records: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_val_ads_f1: float = 0.0


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def build_tagger(pair: TransferPair, config: TrainingConfig, streams: RandomStreams) -> Tagger:
    vocab = Vocabulary.build(pair.source_train, pair.target_train, pair.source_test)
    if config.embedding_path:
        matrix = load_word2vec_text(config.embedding_path, vocab, config.embed_dim, streams.oov, config.oov_bound)
    else:
        matrix = random_embeddings(vocab, config.embed_dim, streams.oov, config.oov_bound)
    return Tagger(config, vocab, matrix.table, streams.init)


def training_splits(pair: TransferPair, config: TrainingConfig,
                    seed: int = 0) -> Tuple[List[Sentence], List[Sentence]]:
    """(labeled training data, validation data) for one run.

    Transfer modes train on source-train and select on source-test. The
    target-only reference holds out a tenth of the labeled target data instead.
    """
    if config.mode is not ModelMode.BASE_TO:
        return list(pair.source_train), list(pair.source_test)
    if not pair.target_labeled:
        raise MissingLabelsError(f"{pair.name}: the target-only model needs labeled target training data")
    labeled, heldout = holdout_split(pair.target_labeled, 0.1, seed)
    return labeled, heldout or labeled


def train(pair: TransferPair, config: TrainingConfig, seed: int, metric_log: Optional[MetricLog] = None) -> TrainResult:
    """Train one seed; the tagger comes back holding the best-validation parameters."""
    with precision(config.precision.value):
        streams = RandomStreams.from_seed(seed)
        tagger = build_tagger(pair, config, streams)
        trainer = Trainer(tagger, config, streams.dropout)
        labeled, validation = training_splits(pair, config, seed)
        batcher = MixedBatcher(labeled, pair.target_train, config.batch_size, streams.batching)
        result = TrainResult(tagger=tagger, trainer=trainer, best_val_ads_f1=-1.0)
        best_params = tagger.store.snapshot()
        logger.info("Training %s on %s, seed %d: %d batches per epoch", config.mode.value, pair.name, seed,
                    batcher.batches_per_epoch)

        for epoch in range(1, config.epochs + 1):
            metrics = trainer.run_epoch(list(batcher.epoch()))
            val_ad, val_ads = evaluate_corpus(tagger, validation)
            boundary = evaluate_boundary_head(tagger, validation) if tagger.mode.uses_memory else None
            improved = val_ads.micro_f1 > result.best_val_ads_f1
            if improved:
                result.best_epoch, result.best_val_ads_f1 = epoch, val_ads.micro_f1
                best_params = tagger.store.snapshot()
            record = EpochRecord(
                seed=seed,
                epoch=epoch,
                main_loss=_mean([m.main_loss for m in metrics if m.main_loss is not None]),
                opinion_loss=_mean([m.opinion_loss for m in metrics if m.opinion_loss is not None]),
                domain_loss=_mean([m.domain_loss for m in metrics if m.domain_loss is not None]),
                max_grad_norm=max(m.grad_norm for m in metrics),
                val_ad_f1=val_ad.micro_f1,
                val_ads_f1=val_ads.micro_f1,
                val_boundary_f1=None if boundary is None else boundary.micro_f1,
                best=improved,
            )
            result.records.append(record)
            if metric_log is not None:
                metric_log.write(record)
            logger.info("Epoch %d: L_M %.4f, val ADS F1 %.4f%s", epoch, record.main_loss, val_ads.micro_f1,
                        " (best)" if improved else "")

        tagger.store.restore(best_params)
        result.best_val_ads_f1 = max(result.best_val_ads_f1, 0.0)
    return result
