"""Tagger checkpoints: parameters plus the config and vocabulary needed to rebuild the graph."""
import logging
from typing import Any, Dict, Optional

import numpy as np

from data.embeddings import Vocabulary
from diffcore.checkpoint import load_checkpoint, save_checkpoint
from diffcore.errors import CheckpointError
from diffcore.node import precision
from diffcore.optim import AdamState
from models.config import TrainingConfig
from network.tagger import EMBEDDING_NAME, Tagger

logger = logging.getLogger(__name__)

KIND = "absa-tagger"


def save_model(path, tagger: Tagger, adam: Optional[Dict[str, AdamState]] = None,
               extra: Optional[Dict[str, Any]] = None) -> None:
    metadata = {
        "kind": KIND,
        "config": tagger.config.model_dump(mode="json"),
        "vocab": tagger.vocab.itos,
    }
    if extra:
        metadata["extra"] = extra
    save_checkpoint(path, tagger.store, metadata, adam)


def load_model(path) -> Tagger:
    checkpoint = load_checkpoint(path)
    meta = checkpoint.metadata
    if meta.get("kind") != KIND:
        raise CheckpointError(f"{path} does not hold a tagger checkpoint")
    config = TrainingConfig.model_validate(meta["config"])
    vocab = Vocabulary(meta["vocab"][2:])
    if EMBEDDING_NAME in checkpoint.buffers:
        table = checkpoint.buffers[EMBEDDING_NAME]
    elif EMBEDDING_NAME in checkpoint.params:
        table = checkpoint.params[EMBEDDING_NAME][1]
    else:
        raise CheckpointError(f"{path} has no embedding table")

    with precision(config.precision.value):
        tagger = Tagger(config, vocab, table, np.random.default_rng(0))
    expected = set(tagger.store.names())
    stored = set(checkpoint.params)
    if expected != stored:
        raise CheckpointError(f"{path}: parameter names differ from the {config.mode.value} layout "
                              f"(missing {sorted(expected - stored)}, unexpected {sorted(stored - expected)})")
    for name, (partition, value) in checkpoint.params.items():
        node = tagger.store[name]
        if node.shape != value.shape or tagger.store.partition[name] != partition:
            raise CheckpointError(f"{path}: parameter {name} has shape {value.shape} in {partition}, "
                                  f"expected {node.shape} in {tagger.store.partition[name]}")
        node.value = value.astype(node.value.dtype)
    logger.info("Loaded %s tagger from %s", config.mode.value, path)
    return tagger
