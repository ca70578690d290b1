"""EGEM binary format: the file contract consumed by the graph toolkit.

Little-endian: magic "EGEM", u32 version=1, u32 dim, u64 count, then count
records of [u16 byte-length, UTF-8 predicate, dim x f32]. Records are
written sorted by predicate string so output bytes are canonical.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"EGEM"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")
_RECLEN = struct.Struct("<H")


def write_egem(vectors: dict[str, np.ndarray], dim: int, path: str | Path) -> None:
    """Atomically write an EGEM file (temp file + rename)."""
    path = Path(path)
    chunks = [_HEADER.pack(MAGIC, VERSION, dim, len(vectors))]
    for relation in sorted(vectors):
        vec = np.ascontiguousarray(vectors[relation], dtype="<f4")
        if vec.shape != (dim,):
            raise ValueError(f"vector for {relation!r} has shape {vec.shape}, expected ({dim},)")
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"vector for {relation!r} is not finite")
        encoded = relation.encode("utf-8")
        chunks.append(_RECLEN.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(vec.tobytes())
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(b"".join(chunks))
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def read_egem(path: str | Path) -> tuple[int, dict[str, np.ndarray]]:
    """Minimal reader used for self-verification."""
    data = Path(path).read_bytes()
    magic, version, dim, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC or version != VERSION:
        raise ValueError(f"{path}: not an EGEM v{VERSION} file")
    out: dict[str, np.ndarray] = {}
    offset = _HEADER.size
    for _ in range(count):
        (name_len,) = _RECLEN.unpack_from(data, offset)
        offset += _RECLEN.size
        relation = data[offset : offset + name_len].decode("utf-8")
        offset += name_len
        out[relation] = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += 4 * dim
    if offset != len(data):
        raise ValueError(f"{path}: trailing bytes")
    return int(dim), out
