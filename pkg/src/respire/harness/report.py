"""report/1 JSON assembly, canonical serialization and atomic writes.

Reports are byte-identical for identical configuration and seed: keys are
sorted, floats use repr, and volatile values (wall clock, host names) are
kept out of the document and logged instead.
"""

from __future__ import annotations

import json
import os
import tempfile

SCHEMA_ID = "report/1"


def canonical_json(document: dict) -> bytes:
    return (json.dumps(document, sort_keys=True, indent=2) + "\n").encode("utf-8")


def atomic_write_bytes(path, data: bytes) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def assemble_report(config: dict, cells: list[dict], footprint: list[dict]) -> dict:
    """One report per run: a cell per evaluated algorithm family."""
    best = max(cells, key=lambda c: c["mean_pr_auc"]) if cells else None
    return {
        "schema": SCHEMA_ID,
        "config": config,
        "results": cells,
        "best_algorithm": best["algorithm"] if best else None,
        "footprint": footprint,
    }


def _fold_pca(cell: dict) -> str:
    if cell["algorithm"] == "MLP":
        return "-"
    return "/".join(f"{f['pca_threshold']:.2f}" for f in cell["folds"])


def summary_table(report: dict) -> str:
    """Plain-text table: one row per (feature kind, classifier) with the
    per-fold PCA thresholds and the mean PR-AUC; the best row is starred."""
    config = report["config"]
    feature_kind = config.get("feature_kind", "-")
    lines = [
        f"dataset:  {config.get('dataset', '-')}",
        f"modality: {config.get('modality', '-')}",
        "",
        f"{'Features':<24} {'Clf':<5} {'PCA (per fold)':<28} {'PR-AUC':>7}",
        f"{'-' * 24} {'-' * 5} {'-' * 28} {'-' * 7}",
    ]
    best = report.get("best_algorithm")
    for cell in report["results"]:
        star = " *" if cell["algorithm"] == best and len(report["results"]) > 1 else ""
        lines.append(
            f"{feature_kind:<24} {cell['algorithm']:<5} "
            f"{_fold_pca(cell):<28} {cell['mean_pr_auc']:>7.3f}{star}"
        )
    return "\n".join(lines) + "\n"


def hyperparameter_log(report: dict) -> str:
    """One line per (algorithm, outer fold) listing every chosen setting."""
    lines = []
    for cell in report["results"]:
        for fold in cell["folds"]:
            chosen = fold.get("params") or fold.get("head_config") or {}
            extra = f" pca={fold['pca_threshold']}" if "pca_threshold" in fold else ""
            settings = " ".join(f"{k}={v}" for k, v in sorted(chosen.items()))
            lines.append(
                f"algorithm={cell['algorithm']} fold={fold['fold']} "
                f"pr_auc={fold['pr_auc']:.6f}{extra} {settings}"
            )
    return "\n".join(lines) + "\n"
