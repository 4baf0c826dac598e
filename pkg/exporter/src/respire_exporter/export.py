"""Batch export: manifest rows -> one EMB1 file per sample, plus a
sidecar recording the weight source."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import audio
from .backbones import get_runner, resolve_spec
from .emb1 import write_emb1

log = logging.getLogger("respire_exporter")

MANIFEST_HEADER = ("sample_id", "user_id", "modality", "label", "path", "pair_id")


@dataclass(frozen=True)
class ExportJob:
    manifest: Path
    backbone: str
    out_dir: Path
    runner: str = "auto"  # auto | stub | tfhub | openl3


def read_manifest_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(cell.strip() for cell in next(reader))
        if header != MANIFEST_HEADER:
            raise ValueError(f"{path}: header must be {','.join(MANIFEST_HEADER)}")
        rows = []
        for record in reader:
            if not record or all(not cell.strip() for cell in record):
                continue
            rows.append(dict(zip(MANIFEST_HEADER, (cell.strip() for cell in record))))
    return rows


def export(job: ExportJob) -> list[Path]:
    """Run the backbone over every manifest row. Returns the written EMB1
    paths; per-file decode failures are logged and skipped."""
    spec = resolve_spec(job.backbone)
    runner = get_runner(job.backbone, job.runner)
    rows = read_manifest_rows(job.manifest)
    out_dir = Path(job.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written = []
    failures = 0
    for row in rows:
        try:
            samples, rate = audio.decode_wav(row["path"])
        except (FileNotFoundError, ValueError) as exc:
            failures += 1
            log.warning("skipping %s: %s", row["sample_id"], exc)
            continue
        embeddings = runner(samples, rate)
        if embeddings.ndim != 2 or embeddings.shape[1] != spec.dim:
            raise ValueError(
                f"{row['sample_id']}: runner produced shape {embeddings.shape}, "
                f"expected (*, {spec.dim})"
            )
        path = out_dir / f"{row['sample_id']}.emb1"
        write_emb1(path, spec.name, row["sample_id"], embeddings)
        written.append(path)

    sidecar = {
        "backbone": spec.name,
        "embedding_dim": spec.dim,
        "sample_rate": spec.sample_rate,
        "window_seconds": spec.window_seconds,
        "hop_seconds": spec.hop_seconds,
        "runner": runner.kind,
        "weights": runner.weight_source(),
        "files_written": len(written),
        "files_skipped": failures,
    }
    with open(out_dir / "weights.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %d EMB1 files (%d skipped) to %s", len(written), failures, out_dir)
    return written
