"""Embedding interchange: backbone configuration names, the EMB1 binary
file format, and mean/std pooling of window embeddings.

EMB1 layout (little-endian):
  magic "EMB1" | u32 version=1 | u32 name_len + config name (UTF-8)
  | u32 id_len + sample id (UTF-8) | u32 n_windows | u32 dim
  | n_windows * dim IEEE-754 binary32, row-major.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadMagic,
    DimensionMismatch,
    EmptySet,
    NonFiniteFeature,
    TruncatedPayload,
    UnknownConfig,
    VersionUnsupported,
)

MAGIC = b"EMB1"
VERSION = 1


@dataclass(frozen=True)
class BackboneConfig:
    name: str
    embedding_dim: int
    input_repr: str  # linear | mel64 | mel128 | mel256
    training_corpus: str  # environmental | music | youtube8m | audioset


def _l3_configs() -> dict[str, BackboneConfig]:
    corpora = {"E": "environmental", "M": "music"}
    inputs = {"L": "linear", "M128": "mel128", "M256": "mel256"}
    table = {}
    for corpus_key, corpus in corpora.items():
        for dim in (512, 6144):
            for input_key, repr_ in inputs.items():
                name = f"L3 {corpus_key} {dim} {input_key}"
                table[name] = BackboneConfig(name, dim, repr_, corpus)
    return table


#: The 14 supported backbones: VGGish, YAMNet and the 12 published
#: L3 variants (training corpus x embedding size x input representation).
BACKBONES: dict[str, BackboneConfig] = {
    "VGGISH": BackboneConfig("VGGISH", 128, "mel64", "youtube8m"),
    "YAMNET": BackboneConfig("YAMNET", 1024, "mel64", "audioset"),
    **_l3_configs(),
}


def validate_config(name: str) -> BackboneConfig:
    """Resolve a backbone name, tolerant of case and -/_ separators."""
    canonical = " ".join(str(name).upper().replace("-", " ").replace("_", " ").split())
    try:
        return BACKBONES[canonical]
    except KeyError:
        raise UnknownConfig(f"unknown backbone configuration {name!r}") from None


@dataclass(frozen=True)
class EmbeddingSet:
    """Per-window embeddings of one sample, n_windows x embedding_dim."""

    sample_id: str
    config: BackboneConfig
    windows: np.ndarray

    def __post_init__(self):
        windows = np.asarray(self.windows, dtype=np.float32)
        if windows.ndim != 2 or windows.shape[0] < 1:
            raise EmptySet(f"{self.sample_id!r}: need a non-empty window matrix")
        if windows.shape[1] != self.config.embedding_dim:
            raise DimensionMismatch(
                f"{self.sample_id!r}: {windows.shape[1]} columns, "
                f"config {self.config.name} expects {self.config.embedding_dim}"
            )
        if not np.isfinite(windows).all():
            raise NonFiniteFeature(f"{self.sample_id!r}: non-finite embedding values")
        object.__setattr__(self, "windows", windows)

    @property
    def n_windows(self) -> int:
        return self.windows.shape[0]


def pool(embedding_set: EmbeddingSet) -> np.ndarray:
    """Collapse windows to one vector: per-dimension means, then
    per-dimension population standard deviations (zero for one window)."""
    w = embedding_set.windows.astype(np.float64)
    return np.concatenate([w.mean(axis=0), w.std(axis=0)])


def write_embedding_file(embedding_set: EmbeddingSet, path) -> None:
    name = embedding_set.config.name.encode("utf-8")
    sample_id = embedding_set.sample_id.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(name)) + name)
        fh.write(struct.pack("<I", len(sample_id)) + sample_id)
        fh.write(struct.pack("<II", embedding_set.n_windows, embedding_set.config.embedding_dim))
        fh.write(np.ascontiguousarray(embedding_set.windows, dtype="<f4").tobytes())


def _take(buf: bytes, offset: int, count: int, what: str) -> tuple[bytes, int]:
    if offset + count > len(buf):
        raise TruncatedPayload(f"file ends inside {what}")
    return buf[offset : offset + count], offset + count


def read_embedding_file(path) -> EmbeddingSet:
    """Read an EMB1 file; the round trip with write_embedding_file is
    bit-exact."""
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, off = _take(buf, 0, 4, "magic")
    if magic != MAGIC:
        raise BadMagic(f"{path}: magic {magic!r}")
    raw, off = _take(buf, off, 4, "version")
    (version,) = struct.unpack("<I", raw)
    if version != VERSION:
        raise VersionUnsupported(f"{path}: version {version}")
    raw, off = _take(buf, off, 4, "name length")
    (name_len,) = struct.unpack("<I", raw)
    raw, off = _take(buf, off, name_len, "config name")
    config = validate_config(raw.decode("utf-8"))
    raw, off = _take(buf, off, 4, "id length")
    (id_len,) = struct.unpack("<I", raw)
    raw, off = _take(buf, off, id_len, "sample id")
    sample_id = raw.decode("utf-8")
    raw, off = _take(buf, off, 8, "shape")
    n_windows, dim = struct.unpack("<II", raw)
    if dim != config.embedding_dim:
        raise DimensionMismatch(
            f"{path}: header dim {dim} != {config.embedding_dim} for {config.name}"
        )
    payload, off = _take(buf, off, n_windows * dim * 4, "window payload")
    if off != len(buf):
        raise DimensionMismatch(f"{path}: {len(buf) - off} trailing bytes")
    windows = np.frombuffer(payload, dtype="<f4").reshape(n_windows, dim)
    return EmbeddingSet(sample_id, config, windows)
