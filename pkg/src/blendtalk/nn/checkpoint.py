"""Binary checkpoint format.

Layout (all integers little-endian):

    magic            8 bytes  b"BTKCKPT1"
    version          u32
    meta block       u32 length + UTF-8 "key=value" lines (creation metadata)
    config block     u32 length + UTF-8 "key=value" lines (model config)
    n_params         u32
    param records    name-sorted: u32 name length, name UTF-8,
                     u32 ndim, u64 per dim, float32 LE payload
    adam flag        u8
    adam header      (if flag) u64 step, f64 lr, f64 beta1, f64 beta2, f64 eps
    adam moments     (if flag) first-moment records then second-moment
                     records, same record format and order as params

Records are sorted by name and the metadata carries no timestamps, so the
same in-memory state always serializes to identical bytes and a
load-then-save round trip is byte-exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .. import __version__ as _pkg_version
from ..errors import ParseError, ShapeError
from .autodiff import Tensor
from .layers import ParameterSet
from .optim import AdamState

MAGIC = b"BTKCKPT1"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    """Deserialized checkpoint contents."""

    meta: dict[str, str]
    config: dict[str, str]
    params: dict[str, np.ndarray]
    adam: AdamState | None = None


def _encode_kv(pairs: dict[str, str]) -> bytes:
    lines = []
    for key in sorted(pairs):
        value = str(pairs[key])
        if "\n" in key or "\n" in value or "=" in key:
            raise ParseError(f"illegal character in metadata entry {key!r}")
        lines.append(f"{key}={value}")
    return ("\n".join(lines)).encode("utf-8")


def _decode_kv(blob: bytes) -> dict[str, str]:
    out: dict[str, str] = {}
    text = blob.decode("utf-8")
    if not text:
        return out
    for lineno, line in enumerate(text.split("\n"), start=1):
        if "=" not in line:
            raise ParseError(f"metadata line {lineno} is not key=value: {line!r}")
        key, value = line.split("=", 1)
        out[key] = value
    return out


def _write_record(parts: list[bytes], name: str, array: np.ndarray) -> None:
    encoded = name.encode("utf-8")
    parts.append(struct.pack("<I", len(encoded)))
    parts.append(encoded)
    parts.append(struct.pack("<I", array.ndim))
    for dim in array.shape:
        parts.append(struct.pack("<Q", dim))
    parts.append(np.ascontiguousarray(array, dtype="<f4").tobytes())


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise ParseError("checkpoint truncated")
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return struct.unpack("<B", self.take(1))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self.take(8))[0]

    def record(self) -> tuple[str, np.ndarray]:
        name = self.take(self.u32()).decode("utf-8")
        ndim = self.u32()
        shape = tuple(self.u64() for _ in range(ndim))
        count = int(np.prod(shape)) if shape else 1
        data = np.frombuffer(self.take(4 * count), dtype="<f4").reshape(shape)
        return name, data.astype(np.float64)


def save_checkpoint(
    path,
    params: ParameterSet | dict[str, Tensor],
    config: dict[str, str],
    adam: AdamState | None = None,
    meta: dict[str, str] | None = None,
) -> None:
    meta = dict(meta or {})
    meta.setdefault("tool", "blendtalk")
    meta.setdefault("tool_version", _pkg_version)
    parts: list[bytes] = [MAGIC, struct.pack("<I", FORMAT_VERSION)]
    meta_blob = _encode_kv(meta)
    parts.append(struct.pack("<I", len(meta_blob)))
    parts.append(meta_blob)
    config_blob = _encode_kv(config)
    parts.append(struct.pack("<I", len(config_blob)))
    parts.append(config_blob)

    names = sorted(params)
    parts.append(struct.pack("<I", len(names)))
    for name in names:
        _write_record(parts, name, params[name].data)

    if adam is None:
        parts.append(struct.pack("<B", 0))
    else:
        parts.append(struct.pack("<B", 1))
        parts.append(struct.pack("<Q", adam.step))
        parts.append(struct.pack("<d", adam.lr))
        parts.append(struct.pack("<d", adam.beta1))
        parts.append(struct.pack("<d", adam.beta2))
        parts.append(struct.pack("<d", adam.eps))
        for name in names:
            _write_record(parts, name, adam.m.get(name, np.zeros_like(params[name].data)))
        for name in names:
            _write_record(parts, name, adam.v.get(name, np.zeros_like(params[name].data)))

    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        blob = fh.read()
    reader = _Reader(blob)
    if reader.take(len(MAGIC)) != MAGIC:
        raise ParseError(f"{path}: bad checkpoint magic")
    version = reader.u32()
    if version != FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported checkpoint version {version}")
    meta = _decode_kv(reader.take(reader.u32()))
    config = _decode_kv(reader.take(reader.u32()))
    n_params = reader.u32()
    params: dict[str, np.ndarray] = {}
    for _ in range(n_params):
        name, data = reader.record()
        params[name] = data
    adam = None
    if reader.u8():
        adam = AdamState(step=reader.u64(), lr=reader.f64(), beta1=reader.f64(), beta2=reader.f64(), eps=reader.f64())
        for _ in range(n_params):
            name, data = reader.record()
            adam.m[name] = data
        for _ in range(n_params):
            name, data = reader.record()
            adam.v[name] = data
    return Checkpoint(meta=meta, config=config, params=params, adam=adam)


def assign_parameters(params: ParameterSet, values: dict[str, np.ndarray]) -> None:
    """Copy loaded arrays into an existing parameter set, shape-checked."""
    for name, tensor in params.items():
        if name not in values:
            raise ParseError(f"checkpoint is missing parameter {name!r}")
        if values[name].shape != tensor.data.shape:
            raise ShapeError(
                f"parameter {name!r}: checkpoint shape {values[name].shape} != model shape {tensor.data.shape}"
            )
        tensor.data = values[name].astype(np.float64).copy()
