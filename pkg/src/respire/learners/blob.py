"""Self-describing binary serialization of fitted models.

Layout (little-endian): magic "RSM1" | u32 tag_len + algorithm tag (UTF-8)
| u32 n_sections | per section: u32 label_len + label, u32 ndim,
u32 dims..., binary32 payload. Blob length is what the footprint module
measures; only decision-function parameters are stored.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import BadMagic, TruncatedPayload

MAGIC = b"RSM1"


def pack_sections(tag: str, sections: list[tuple[str, np.ndarray]]) -> bytes:
    parts = [MAGIC]
    encoded = tag.encode("utf-8")
    parts.append(struct.pack("<I", len(encoded)) + encoded)
    parts.append(struct.pack("<I", len(sections)))
    for label, array in sections:
        array = np.ascontiguousarray(array, dtype="<f4")
        raw = label.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)) + raw)
        parts.append(struct.pack("<I", array.ndim))
        parts.append(struct.pack(f"<{array.ndim}I", *array.shape))
        parts.append(array.tobytes())
    return b"".join(parts)


def empty_blob() -> bytes:
    """Header-only sentinel (no fitted model)."""
    return pack_sections("EMPTY", [])


def unpack_sections(blob: bytes) -> tuple[str, list[tuple[str, np.ndarray]]]:
    def take(offset, count, what):
        if offset + count > len(blob):
            raise TruncatedPayload(f"model blob ends inside {what}")
        return blob[offset : offset + count], offset + count

    raw, off = take(0, 4, "magic")
    if raw != MAGIC:
        raise BadMagic(f"model blob magic {raw!r}")
    raw, off = take(off, 4, "tag length")
    (tag_len,) = struct.unpack("<I", raw)
    raw, off = take(off, tag_len, "tag")
    tag = raw.decode("utf-8")
    raw, off = take(off, 4, "section count")
    (n_sections,) = struct.unpack("<I", raw)
    sections = []
    for _ in range(n_sections):
        raw, off = take(off, 4, "label length")
        (label_len,) = struct.unpack("<I", raw)
        raw, off = take(off, label_len, "label")
        label = raw.decode("utf-8")
        raw, off = take(off, 4, "ndim")
        (ndim,) = struct.unpack("<I", raw)
        raw, off = take(off, 4 * ndim, "dims")
        dims = struct.unpack(f"<{ndim}I", raw)
        count = int(np.prod(dims)) if dims else 1
        raw, off = take(off, 4 * count, f"section {label!r}")
        sections.append((label, np.frombuffer(raw, dtype="<f4").reshape(dims)))
    return tag, sections
