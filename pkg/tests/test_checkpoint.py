import struct

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from data.embeddings import Vocabulary, random_embeddings
from diffcore.checkpoint import FORMAT_VERSION, MAGIC, decode, encode
from diffcore.errors import CheckpointError
from diffcore.node import precision
from diffcore.params import FEATURE
from models.config import ModelMode
from network.tagger import EMBEDDING_NAME, Tagger
from training.checkpointing import KIND, load_model, save_model
from training.diagnostics import toy_batch, toy_config
from training.trainer import Trainer


def _trained(mode=ModelMode.AD_SAL, **overrides):
    config = toy_config(mode).with_overrides({"precision": "float32", **overrides})
    batch = toy_batch(5)
    vocab = Vocabulary.build(batch.source, batch.target)
    rng = np.random.default_rng(8)
    with precision(config.precision.value):
        tagger = Tagger(config, vocab, random_embeddings(vocab, config.embed_dim, rng).table, rng)
        trainer = Trainer(tagger, config, np.random.default_rng(8))
        trainer.alternating_step(batch)
    return tagger, trainer, batch


def _write(path, raw):
    path.write_bytes(raw)
    return path


def test_saved_tagger_predicts_identically(tmp_path):
    tagger, trainer, batch = _trained()
    path = tmp_path / "model.ckpt"
    save_model(path, tagger, trainer.adam_states())
    restored = load_model(path)
    assert restored.mode is ModelMode.AD_SAL
    assert restored.vocab.itos == tagger.vocab.itos
    for name, node in tagger.store.items():
        assert_array_equal(restored.store[name].value, node.value)
        assert restored.store.partition[name] == tagger.store.partition[name]
    for sentence in batch.source + batch.target + [["unseen", "words"]]:
        assert restored.predict(sentence) == tagger.predict(sentence)
    unseen = tagger.forward_tokens(["the", "unseen", "pizza"]).unified.value
    assert_array_equal(restored.forward_tokens(["the", "unseen", "pizza"]).unified.value, unseen)


def test_frozen_embeddings_travel_as_a_buffer(tmp_path):
    tagger, _, _ = _trained(finetune_embeddings=False)
    assert EMBEDDING_NAME not in tagger.store
    checkpoint = decode(encode(tagger.store, {"kind": KIND}))
    assert_array_equal(checkpoint.buffers[EMBEDDING_NAME], tagger.table.value)
    save_model(tmp_path / "frozen.ckpt", tagger)
    restored = load_model(tmp_path / "frozen.ckpt")
    assert_array_equal(restored.table.value, tagger.table.value)


def test_encoding_is_deterministic_and_keeps_adam_state():
    tagger, trainer, _ = _trained()
    first = encode(tagger.store, {"kind": KIND, "b": 1, "a": 2}, trainer.adam_states())
    second = encode(tagger.store, {"a": 2, "b": 1, "kind": KIND}, trainer.adam_states())
    assert first == second
    checkpoint = decode(first)
    assert sorted(checkpoint.adam) == ["stage1", "stage2"]
    stage1 = checkpoint.adam["stage1"]
    assert stage1.t == 1 and stage1.lr == pytest.approx(trainer.config.lr)
    for name, moment in trainer.stage_one_state.m.items():
        assert_array_equal(stage1.m[name], moment)
        assert_array_equal(stage1.v[name], trainer.stage_one_state.v[name])
    assert checkpoint.params[EMBEDDING_NAME][0] == FEATURE


def test_float64_arrays_keep_their_dtype():
    tagger, _, _ = _trained(precision="float64")
    checkpoint = decode(encode(tagger.store, {}))
    assert all(value.dtype == np.float64 for _, value in checkpoint.params.values())


def test_bad_magic_is_rejected():
    with pytest.raises(CheckpointError, match="magic"):
        decode(b"NOTACKPT" + b"\x00" * 16)


def test_unknown_version_is_rejected():
    tagger, _, _ = _trained()
    raw = bytearray(encode(tagger.store, {"kind": KIND}))
    raw[len(MAGIC):len(MAGIC) + 4] = struct.pack("<I", FORMAT_VERSION + 1)
    with pytest.raises(CheckpointError, match="version"):
        decode(bytes(raw))


def test_truncated_file_is_rejected():
    tagger, _, _ = _trained()
    raw = encode(tagger.store, {"kind": KIND})
    with pytest.raises(CheckpointError, match="truncated"):
        decode(raw[:-10])


def test_foreign_checkpoint_kind_is_rejected(tmp_path):
    tagger, _, _ = _trained()
    path = _write(tmp_path / "other.ckpt", encode(tagger.store, {"kind": "something-else"}))
    with pytest.raises(CheckpointError):
        load_model(path)


def test_layout_mismatch_is_rejected(tmp_path):
    tagger, _, _ = _trained()
    metadata = {
        "kind": KIND,
        "config": tagger.config.with_overrides({"mode": ModelMode.BASE_SO}).model_dump(mode="json"),
        "vocab": tagger.vocab.itos,
    }
    path = _write(tmp_path / "mismatch.ckpt", encode(tagger.store, metadata))
    with pytest.raises(CheckpointError, match="parameter names differ"):
        load_model(path)
