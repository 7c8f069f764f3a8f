"""Binary checkpoint codec.

Layout (all integers little-endian):

    magic        8 bytes  b"ABSACKPT"
    version      uint32   FORMAT_VERSION
    meta_len     uint32   followed by meta_len bytes of UTF-8 JSON (sorted keys)
    n_entries    uint32
    entry        kind uint8 (0 param, 1 buffer), partition uint8 (index into
                 PARTITIONS, 255 for buffers), name_len uint16, name UTF-8,
                 array
    n_adam       uint32
    adam state   label_len uint16, label UTF-8, t uint32, lr/beta1/beta2/eps
                 float64 x4, n uint32, then n x (name_len uint16, name, m array,
                 v array)

    array        dtype uint8 (0 float32, 1 float64), ndim uint8, ndim x uint32
                 dims, row-major values
"""
import io
import json
import logging
import struct
from dataclasses import dataclass, field
from typing import Any, BinaryIO, Dict, Optional, Tuple

import numpy as np

from diffcore.errors import CheckpointError
from diffcore.optim import AdamState
from diffcore.params import PARTITIONS, ParamStore

logger = logging.getLogger(__name__)

MAGIC = b"ABSACKPT"
FORMAT_VERSION = 1
_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_DTYPE_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}
_BUFFER = 255


@dataclass
class Checkpoint:
    metadata: Dict[str, Any]
    params: Dict[str, Tuple[str, np.ndarray]] = field(default_factory=dict)
    buffers: Dict[str, np.ndarray] = field(default_factory=dict)
    adam: Dict[str, AdamState] = field(default_factory=dict)


def _write_name(out: BinaryIO, name: str) -> None:
    raw = name.encode("utf-8")
    out.write(struct.pack("<H", len(raw)))
    out.write(raw)


def _read_exact(src: BinaryIO, size: int) -> bytes:
    raw = src.read(size)
    if len(raw) != size:
        raise CheckpointError("checkpoint truncated")
    return raw


def _read_name(src: BinaryIO) -> str:
    (size,) = struct.unpack("<H", _read_exact(src, 2))
    return _read_exact(src, size).decode("utf-8")


def _write_array(out: BinaryIO, value: np.ndarray) -> None:
    code = _DTYPE_CODES.get(value.dtype)
    if code is None:
        raise CheckpointError(f"unsupported dtype {value.dtype}")
    out.write(struct.pack("<BB", code, value.ndim))
    out.write(struct.pack(f"<{value.ndim}I", *value.shape))
    out.write(np.ascontiguousarray(value, dtype=_DTYPES[code]).tobytes())


def _read_array(src: BinaryIO) -> np.ndarray:
    code, ndim = struct.unpack("<BB", _read_exact(src, 2))
    if code not in _DTYPES:
        raise CheckpointError(f"unknown dtype code {code}")
    shape = struct.unpack(f"<{ndim}I", _read_exact(src, 4 * ndim))
    dtype = _DTYPES[code]
    count = int(np.prod(shape, dtype=np.int64))
    data = np.frombuffer(_read_exact(src, count * dtype.itemsize), dtype=dtype)
    return data.reshape(shape).astype(dtype.newbyteorder("="))


def encode(store: ParamStore, metadata: Dict[str, Any], adam: Optional[Dict[str, AdamState]] = None) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<I", FORMAT_VERSION))
    meta = json.dumps(metadata, sort_keys=True).encode("utf-8")
    out.write(struct.pack("<I", len(meta)))
    out.write(meta)

    out.write(struct.pack("<I", len(store.entries) + len(store.buffers)))
    for name, node in store.entries.items():
        out.write(struct.pack("<BB", 0, PARTITIONS.index(store.partition[name])))
        _write_name(out, name)
        _write_array(out, node.value)
    for name, node in store.buffers.items():
        out.write(struct.pack("<BB", 1, _BUFFER))
        _write_name(out, name)
        _write_array(out, node.value)

    adam = adam or {}
    out.write(struct.pack("<I", len(adam)))
    for label, state in adam.items():
        _write_name(out, label)
        out.write(struct.pack("<I4d", state.t, state.lr, state.beta1, state.beta2, state.eps))
        out.write(struct.pack("<I", len(state.m)))
        for name in state.m:
            _write_name(out, name)
            _write_array(out, state.m[name])
            _write_array(out, state.v[name])
    return out.getvalue()


def decode(raw: bytes) -> Checkpoint:
    src = io.BytesIO(raw)
    if _read_exact(src, len(MAGIC)) != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    (version,) = struct.unpack("<I", _read_exact(src, 4))
    if version != FORMAT_VERSION:
        raise CheckpointError(f"checkpoint version {version} is not supported (expected {FORMAT_VERSION})")
    (meta_len,) = struct.unpack("<I", _read_exact(src, 4))
    checkpoint = Checkpoint(metadata=json.loads(_read_exact(src, meta_len).decode("utf-8")))

    (count,) = struct.unpack("<I", _read_exact(src, 4))
    for _ in range(count):
        kind, part = struct.unpack("<BB", _read_exact(src, 2))
        name = _read_name(src)
        value = _read_array(src)
        if kind == 0:
            checkpoint.params[name] = (PARTITIONS[part], value)
        else:
            checkpoint.buffers[name] = value

    (n_adam,) = struct.unpack("<I", _read_exact(src, 4))
    for _ in range(n_adam):
        label = _read_name(src)
        t, lr, beta1, beta2, eps = struct.unpack("<I4d", _read_exact(src, 36))
        state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps, t=t)
        (n,) = struct.unpack("<I", _read_exact(src, 4))
        for _ in range(n):
            name = _read_name(src)
            state.m[name] = _read_array(src)
            state.v[name] = _read_array(src)
        checkpoint.adam[label] = state
    return checkpoint


def save_checkpoint(path, store: ParamStore, metadata: Dict[str, Any],
                    adam: Optional[Dict[str, AdamState]] = None) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(store, metadata, adam))
    logger.info("Checkpoint written to %s (%d parameters)", path, len(store))


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        return decode(fh.read())
