"""FeatureTable binary file: sample ids bound to fixed-length rows.

Layout (little-endian): u32 n_rows | u32 dim | u32 kind tag
| n_rows * dim binary32 row-major | per row: u32 id_len + sample id
(UTF-8), in row order. Kind tags: 1 handcrafted-477, 2 pooled-embedding,
3 concatenated.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import TruncatedPayload

KIND_TAGS = {"handcrafted-477": 1, "pooled-embedding": 2, "concatenated": 3}
KIND_NAMES = {v: k for k, v in KIND_TAGS.items()}


@dataclass(frozen=True)
class FeatureTable:
    ids: tuple[str, ...]
    values: np.ndarray  # n x d float32
    kind: str

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float32)
        if values.ndim != 2 or values.shape[0] != len(self.ids):
            raise ValueError("values must be 2-D with one row per id")
        if self.kind not in KIND_TAGS:
            raise ValueError(f"kind must be one of {sorted(KIND_TAGS)}")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate sample ids in table")
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def as_mapping(self) -> dict[str, np.ndarray]:
        return {sid: self.values[i].astype(np.float64) for i, sid in enumerate(self.ids)}


def table_bytes(table: FeatureTable) -> bytes:
    parts = [struct.pack("<III", len(table.ids), table.dim, KIND_TAGS[table.kind])]
    parts.append(np.ascontiguousarray(table.values, dtype="<f4").tobytes())
    for sid in table.ids:
        raw = sid.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)) + raw)
    return b"".join(parts)


def write_feature_table(table: FeatureTable, path) -> None:
    with open(path, "wb") as fh:
        fh.write(table_bytes(table))


def read_feature_table(path) -> FeatureTable:
    with open(path, "rb") as fh:
        buf = fh.read()

    def take(offset, count, what):
        if offset + count > len(buf):
            raise TruncatedPayload(f"{path}: file ends inside {what}")
        return buf[offset : offset + count], offset + count

    raw, off = take(0, 12, "header")
    n_rows, dim, kind_tag = struct.unpack("<III", raw)
    if kind_tag not in KIND_NAMES:
        raise ValueError(f"{path}: unknown kind tag {kind_tag}")
    raw, off = take(off, n_rows * dim * 4, "feature rows")
    values = np.frombuffer(raw, dtype="<f4").reshape(n_rows, dim)
    ids = []
    for i in range(n_rows):
        raw, off = take(off, 4, f"id length {i}")
        (id_len,) = struct.unpack("<I", raw)
        raw, off = take(off, id_len, f"id {i}")
        ids.append(raw.decode("utf-8"))
    return FeatureTable(tuple(ids), values, KIND_NAMES[kind_tag])
