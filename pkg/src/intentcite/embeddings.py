"""Dense embedding sets and the CEMB interchange file format.

CEMB is the binary boundary between the encoder component and this
analysis core. Layout (all integers little endian):

    magic   4 bytes  ``43 45 4D 42`` ("CEMB")
    version u32      currently 1
    dim     u32      vector width H
    count   u64      number of records
    then ``count`` records, each:
        id_len  u32
        id      ``id_len`` UTF-8 bytes
        values  ``dim`` f32 values

No padding and no trailing bytes; reading then writing a well-formed file
reproduces it byte for byte.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorruptionError, FormatError, ValidationError

MAGIC = b"CEMB"
VERSION = 1

_HEADER = struct.Struct("<4sIIQ")
_ID_LEN = struct.Struct("<I")


@dataclass
class EmbeddingSet:
    """Float32 vectors keyed by record id; row order is preserved."""

    dim: int
    rows: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim <= 0:
            raise ValidationError(f"embedding dim must be positive, got {self.dim}")
        normalized = {}
        for record_id, vec in self.rows.items():
            normalized[record_id] = self._check_row(record_id, vec)
        self.rows = normalized

    def _check_row(self, record_id: str, vec) -> np.ndarray:
        arr = np.asarray(vec, dtype=np.float32).ravel()
        if arr.shape[0] != self.dim:
            raise ValidationError(
                f"vector for {record_id!r} has length {arr.shape[0]}, expected {self.dim}"
            )
        if not np.isfinite(arr).all():
            raise ValidationError(f"vector for {record_id!r} has non-finite values")
        return arr

    def add(self, record_id: str, vec) -> None:
        if record_id in self.rows:
            raise ValidationError(f"duplicate record_id {record_id!r}")
        self.rows[record_id] = self._check_row(record_id, vec)

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self.rows

    def matrix(self, ids) -> np.ndarray:
        """Stack the vectors for ``ids`` into an (n, dim) float64 matrix."""
        missing = [i for i in ids if i not in self.rows]
        if missing:
            raise ValidationError(f"missing embeddings for ids: {missing[:5]!r}")
        if not ids:
            return np.zeros((0, self.dim), dtype=np.float64)
        return np.stack([self.rows[i] for i in ids]).astype(np.float64)


def write_embeddings(embeddings: EmbeddingSet, path) -> None:
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, embeddings.dim, len(embeddings.rows)))
        for record_id, vec in embeddings.rows.items():
            encoded = record_id.encode("utf-8")
            fh.write(_ID_LEN.pack(len(encoded)))
            fh.write(encoded)
            fh.write(vec.astype("<f4").tobytes())


def read_embeddings(path) -> EmbeddingSet:
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise CorruptionError(f"{path}: truncated header", len(data))
    magic, version, dim, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if dim == 0:
        raise FormatError(f"{path}: dim must be positive")

    result = EmbeddingSet(dim=dim)
    offset = _HEADER.size
    row_bytes = 4 * dim
    for _ in range(count):
        if offset + _ID_LEN.size > len(data):
            raise CorruptionError(f"{path}: truncated record id length", offset)
        (id_len,) = _ID_LEN.unpack_from(data, offset)
        offset += _ID_LEN.size
        if offset + id_len > len(data):
            raise CorruptionError(f"{path}: truncated record id", offset)
        try:
            record_id = data[offset : offset + id_len].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptionError(f"{path}: record id is not UTF-8", offset) from exc
        offset += id_len
        if offset + row_bytes > len(data):
            raise CorruptionError(
                f"{path}: truncated vector for {record_id!r}", offset
            )
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += row_bytes
        if not np.isfinite(vec).all():
            raise ValidationError(
                f"{path}: non-finite value in vector for {record_id!r}"
            )
        if record_id in result.rows:
            raise ValidationError(f"{path}: duplicate record_id {record_id!r}")
        result.rows[record_id] = vec
    if offset != len(data):
        raise CorruptionError(f"{path}: trailing bytes after last record", offset)
    return result
