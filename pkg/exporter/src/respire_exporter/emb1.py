"""EMB1 writer/reader (little-endian).

Layout: magic "EMB1" | u32 version=1 | u32 name_len + config name (UTF-8)
| u32 id_len + sample id (UTF-8) | u32 n_windows | u32 dim
| n_windows * dim binary32, row-major. This byte layout is the contract
with the evaluation toolkit; keep it in lockstep.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"EMB1"
VERSION = 1


def write_emb1(path, config_name: str, sample_id: str, windows: np.ndarray) -> None:
    windows = np.ascontiguousarray(windows, dtype="<f4")
    if windows.ndim != 2 or windows.shape[0] < 1:
        raise ValueError("windows must be a non-empty 2-D matrix")
    if not np.isfinite(windows).all():
        raise ValueError(f"{sample_id!r}: non-finite embedding values")
    name = config_name.encode("utf-8")
    sid = sample_id.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(name)) + name)
        fh.write(struct.pack("<I", len(sid)) + sid)
        fh.write(struct.pack("<II", windows.shape[0], windows.shape[1]))
        fh.write(windows.tobytes())


def read_emb1(path) -> tuple[str, str, np.ndarray]:
    """Returns (config name, sample id, windows); for verification only,
    the evaluation toolkit has the authoritative reader."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != MAGIC:
        raise ValueError(f"{path}: bad magic {buf[:4]!r}")
    off = 4
    (version,) = struct.unpack_from("<I", buf, off)
    off += 4
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    (name_len,) = struct.unpack_from("<I", buf, off)
    off += 4
    name = buf[off : off + name_len].decode("utf-8")
    off += name_len
    (id_len,) = struct.unpack_from("<I", buf, off)
    off += 4
    sample_id = buf[off : off + id_len].decode("utf-8")
    off += id_len
    n_windows, dim = struct.unpack_from("<II", buf, off)
    off += 8
    windows = np.frombuffer(buf, dtype="<f4", count=n_windows * dim, offset=off)
    return name, sample_id, windows.reshape(n_windows, dim)
