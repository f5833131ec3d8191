"""Versioned binary checkpoints.

Layout (little-endian): b"LMOE" | u16 version | u8 kind | u8 meta | u32 slots |
per slot: u8 present [u32 layers, u32 dims[layers + 1], f64 dropout] |
u32 extras | u32 length per extra | f64 parameters of every present slot in
layer order (W row-major, then b) | f64 extra arrays. A JSON sidecar with the
run configuration sits next to the file.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import orjson

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.nn.params import MlpParams
from linkmoe.utils.helpers.file_utils import write_json

MAGIC = b"LMOE"
FORMAT_VERSION = 1
_F8 = np.dtype("<f8")


class CheckpointKind(IntEnum):
    GATE = 1
    FEATURE_MLP = 2


@dataclass
class Checkpoint:
    kind: CheckpointKind
    meta: int
    slots: List[Optional[MlpParams]]
    extras: List[np.ndarray]
    sidecar: Dict[str, Any]


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def save_checkpoint(path: str | Path, ckpt: Checkpoint) -> List[Path]:
    """Write the binary file and its sidecar; returns both paths."""
    header = [MAGIC, struct.pack("<HBBI", FORMAT_VERSION, int(ckpt.kind), int(ckpt.meta), len(ckpt.slots))]
    body: List[bytes] = []
    for slot in ckpt.slots:
        if slot is None:
            header.append(struct.pack("<B", 0))
            continue
        dims = slot.dims
        header.append(struct.pack("<BI", 1, len(dims) - 1))
        header.append(struct.pack(f"<{len(dims)}I", *dims))
        header.append(struct.pack("<d", slot.dropout_p))
        body.extend(np.ascontiguousarray(a, dtype=_F8).tobytes() for a in slot.arrays())
    header.append(struct.pack("<I", len(ckpt.extras)))
    for extra in ckpt.extras:
        header.append(struct.pack("<I", int(np.asarray(extra).size)))
        body.append(np.ascontiguousarray(extra, dtype=_F8).tobytes())
    target = Path(path)
    target.write_bytes(b"".join(header + body))
    side = sidecar_path(target)
    write_json(side, ckpt.sidecar)
    return [target, side]


class _Reader:
    def __init__(self, data: bytes, path: Path) -> None:
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, fmt: str) -> tuple:
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise LinkMoeError(ErrorCode.BAD_CHECKPOINT, "truncated checkpoint", path=str(self.path))
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out

    def floats(self, count: int) -> np.ndarray:
        end = self.pos + 8 * count
        if end > len(self.data):
            raise LinkMoeError(ErrorCode.BAD_CHECKPOINT, "truncated checkpoint", path=str(self.path))
        arr = np.frombuffer(self.data, dtype=_F8, count=count, offset=self.pos).astype(np.float64)
        self.pos = end
        return arr


def load_checkpoint(path: str | Path, expected: CheckpointKind | None = None) -> Checkpoint:
    target = Path(path)
    if not target.is_file():
        raise LinkMoeError(ErrorCode.MISSING_FILE, "checkpoint not found", path=str(target))
    data = target.read_bytes()
    if data[:4] != MAGIC:
        raise LinkMoeError(ErrorCode.BAD_CHECKPOINT, "bad magic", path=str(target))
    reader = _Reader(data, target)
    reader.pos = 4
    version, kind, meta, n_slots = reader.take("<HBBI")
    if version != FORMAT_VERSION:
        raise LinkMoeError(ErrorCode.BAD_CHECKPOINT, "unsupported version", path=str(target), version=version)
    if expected is not None and kind != int(expected):
        raise LinkMoeError(ErrorCode.BAD_CHECKPOINT, "unexpected checkpoint kind", path=str(target), kind=kind)
    layouts: List[Optional[tuple]] = []
    for _ in range(n_slots):
        (present,) = reader.take("<B")
        if not present:
            layouts.append(None)
            continue
        (n_layers,) = reader.take("<I")
        dims = reader.take(f"<{n_layers + 1}I")
        (dropout,) = reader.take("<d")
        layouts.append((list(dims), dropout))
    (n_extras,) = reader.take("<I")
    extra_sizes = [reader.take("<I")[0] for _ in range(n_extras)]
    slots: List[Optional[MlpParams]] = []
    for layout in layouts:
        if layout is None:
            slots.append(None)
            continue
        dims, dropout = layout
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            weights.append(reader.floats(fan_in * fan_out).reshape(fan_out, fan_in))
            biases.append(reader.floats(fan_out))
        slots.append(MlpParams(weights=weights, biases=biases, dropout_p=dropout))
    extras = [reader.floats(size) for size in extra_sizes]
    side = sidecar_path(target)
    sidecar = orjson.loads(side.read_bytes()) if side.is_file() else {}
    return Checkpoint(kind=CheckpointKind(kind), meta=meta, slots=slots, extras=extras, sidecar=sidecar)
