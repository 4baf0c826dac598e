"""Dataset manifests: CSV loading with validation, seeded random
under-sampling per modality, and cough/breath pair combination."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..errors import (
    DanglingPair,
    DuplicateSampleId,
    MalformedRow,
    NoPairs,
    SingleClass,
)

MODALITIES = ("cough", "breath")
LABELS = ("positive", "negative")
HEADER = ("sample_id", "user_id", "modality", "label", "path", "pair_id")


@dataclass(frozen=True)
class ManifestRow:
    sample_id: str
    user_id: str
    modality: str
    label: str
    path: str
    pair_id: str | None = None

    @property
    def y(self) -> int:
        return 1 if self.label == "positive" else 0


@dataclass(frozen=True)
class Manifest:
    rows: tuple[ManifestRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def users(self) -> list[str]:
        return sorted({row.user_id for row in self.rows})

    def select_modality(self, modality: str) -> "Manifest":
        if modality not in MODALITIES:
            raise ValueError(f"modality must be one of {MODALITIES}, got {modality!r}")
        return Manifest(tuple(r for r in self.rows if r.modality == modality))

    def by_sample_id(self) -> dict[str, ManifestRow]:
        return {row.sample_id: row for row in self.rows}


def _validate(rows: list[ManifestRow]) -> Manifest:
    seen: dict[str, int] = {}
    paths: dict[str, int] = {}
    for lineno, row in enumerate(rows, start=2):
        if row.sample_id in seen:
            raise DuplicateSampleId(
                f"sample_id {row.sample_id!r} on rows {seen[row.sample_id]} and {lineno}"
            )
        seen[row.sample_id] = lineno
        if row.path in paths:
            raise MalformedRow(
                f"path {row.path!r} on rows {paths[row.path]} and {lineno}"
            )
        paths[row.path] = lineno

    pairs: dict[str, list[ManifestRow]] = defaultdict(list)
    for row in rows:
        if row.pair_id:
            pairs[row.pair_id].append(row)
    for pair_id, members in pairs.items():
        modalities = sorted(m.modality for m in members)
        if len(members) != 2 or modalities != ["breath", "cough"]:
            raise DanglingPair(
                f"pair_id {pair_id!r} must link exactly one cough and one breath row"
            )
        if members[0].user_id != members[1].user_id:
            raise DanglingPair(f"pair_id {pair_id!r} spans two users")
    return Manifest(tuple(rows))


def load_manifest(path) -> Manifest:
    """Parse and validate a manifest CSV (header: sample_id, user_id,
    modality, label, path, pair_id)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != HEADER:
            raise MalformedRow(f"{path}: header must be {','.join(HEADER)}")
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(HEADER):
                raise MalformedRow(f"{path}:{lineno}: expected {len(HEADER)} fields")
            sample_id, user_id, modality, label, file_path, pair_id = (
                cell.strip() for cell in record
            )
            if modality not in MODALITIES:
                raise MalformedRow(f"{path}:{lineno}: unknown modality {modality!r}")
            if label not in LABELS:
                raise MalformedRow(f"{path}:{lineno}: unknown label {label!r}")
            if not sample_id or not user_id or not file_path:
                raise MalformedRow(f"{path}:{lineno}: empty required field")
            rows.append(
                ManifestRow(sample_id, user_id, modality, label, file_path, pair_id or None)
            )
    return _validate(rows)


def undersample(manifest: Manifest, seed: int) -> Manifest:
    """Balance classes per modality by randomly dropping majority rows.

    Minority rows are kept untouched; row order is preserved. Raises
    SingleClass if a modality lacks one of the labels.
    """
    drop: set[str] = set()
    rng = np.random.default_rng(seed)
    for modality in MODALITIES:
        subset = [r for r in manifest.rows if r.modality == modality]
        if not subset:
            continue
        positive = [r for r in subset if r.label == "positive"]
        negative = [r for r in subset if r.label == "negative"]
        if not positive or not negative:
            raise SingleClass(f"modality {modality!r} holds a single class")
        majority, minority = (positive, negative) if len(positive) > len(negative) else (negative, positive)
        excess = len(majority) - len(minority)
        if excess:
            chosen = rng.choice(len(majority), size=excess, replace=False)
            drop.update(majority[int(i)].sample_id for i in chosen)
    kept = tuple(r for r in manifest.rows if r.sample_id not in drop)
    return Manifest(kept)


def combine_modalities(
    manifest: Manifest, features: dict[str, np.ndarray]
) -> tuple[list[str], list[str], np.ndarray, np.ndarray, int]:
    """Concatenate each pair's cough and breath vectors into one row.

    ``features`` maps sample_id to a feature vector. Returns (pair ids,
    user ids, matrix, labels, dropped-row count); unpaired or missing rows
    are dropped and counted. Raises NoPairs when nothing combines.
    """
    by_pair: dict[str, dict[str, ManifestRow]] = defaultdict(dict)
    dropped = 0
    for row in manifest.rows:
        if row.pair_id:
            by_pair[row.pair_id][row.modality] = row
        else:
            dropped += 1
    ids: list[str] = []
    users: list[str] = []
    vectors: list[np.ndarray] = []
    labels: list[int] = []
    for pair_id in sorted(by_pair):
        members = by_pair[pair_id]
        cough, breath = members.get("cough"), members.get("breath")
        if cough is None or breath is None:
            dropped += len(members)
            continue
        if cough.sample_id not in features or breath.sample_id not in features:
            dropped += 2
            continue
        ids.append(pair_id)
        users.append(cough.user_id)
        vectors.append(np.concatenate([features[cough.sample_id], features[breath.sample_id]]))
        labels.append(cough.y)
    if not ids:
        raise NoPairs("no complete cough/breath pairs with features")
    return ids, users, np.vstack(vectors), np.array(labels, dtype=np.int64), dropped
