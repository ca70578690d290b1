"""Read and write EGEM embedding files.

EGEM is a little-endian binary format holding one f32 vector per predicate:

    magic   4 bytes  "EGEM"
    version u32      1
    dim     u32      vector length
    count   u64      number of records
    records count x [u16 byte_length, UTF-8 predicate string, dim x f32]

Vectors are stored and kept in memory as float32; distance computations
upcast to float64.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"EGEM"
VERSION = 1

_HEADER = struct.Struct("<4sIIQ")
_RECLEN = struct.Struct("<H")


@dataclass
class EmbeddingStore:
    """In-memory map from canonical predicate string to f32 vector."""

    dim: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, relation: str) -> bool:
        return relation in self.entries

    def get(self, relation: str) -> np.ndarray | None:
        return self.entries.get(relation)

    def add(self, relation: str, vector: np.ndarray) -> None:
        vec = np.asarray(vector, dtype=np.float32)
        if vec.ndim != 1 or vec.shape[0] != self.dim:
            raise ValueError(f"vector for {relation!r} has shape {vec.shape}, expected ({self.dim},)")
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"vector for {relation!r} contains NaN or Inf")
        self.entries[relation] = vec


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Load an EGEM file, validating the header, counts, and values."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError("file shorter than EGEM header", path=str(path))
    magic, version, dim, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", path=str(path))
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", path=str(path))
    if count > 0 and dim == 0:
        raise FormatError("dim must be positive when records are present", path=str(path))

    store = EmbeddingStore(dim=int(dim))
    offset = _HEADER.size
    vec_bytes = 4 * dim
    for i in range(count):
        if offset + _RECLEN.size > len(data):
            raise FormatError(
                f"truncated: header declares {count} records, record {i + 1} missing",
                path=str(path),
            )
        (name_len,) = _RECLEN.unpack_from(data, offset)
        offset += _RECLEN.size
        if offset + name_len + vec_bytes > len(data):
            raise FormatError(
                f"truncated: header declares {count} records, record {i + 1} incomplete",
                path=str(path),
            )
        try:
            relation = data[offset : offset + name_len].decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"record {i + 1}: invalid UTF-8 predicate", path=str(path)) from e
        offset += name_len
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(np.float32)
        offset += vec_bytes
        if not np.all(np.isfinite(vec)):
            raise FormatError(f"record {i + 1} ({relation!r}): NaN or Inf value", path=str(path))
        if relation in store.entries:
            raise FormatError(f"record {i + 1}: duplicate predicate {relation!r}", path=str(path))
        store.entries[relation] = vec
    if offset != len(data):
        raise FormatError(
            f"{len(data) - offset} trailing bytes after {count} declared records",
            path=str(path),
        )
    return store


def save_embeddings(store: EmbeddingStore, path: str | Path) -> None:
    """Write the canonical EGEM form (records sorted by predicate string)."""
    path = Path(path)
    chunks = [_HEADER.pack(MAGIC, VERSION, store.dim, len(store.entries))]
    for relation in sorted(store.entries):
        encoded = relation.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValueError(f"predicate string too long for EGEM record: {relation[:60]!r}...")
        vec = np.ascontiguousarray(store.entries[relation], dtype="<f4")
        chunks.append(_RECLEN.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(vec.tobytes())
    path.write_bytes(b"".join(chunks))
