"""Command-line entry point.

Subcommands: features (handcrafted extraction), pool (EMB1 -> pooled
table), evaluate (nested cross-validation), footprint (aggregate size
tables). Exit codes: 0 success, 1 validation error, 2 runtime failure.
Log level comes from the RESPIRE_LOG environment variable.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import embeddings, features, footprint
from .audio import decode_wav
from .errors import DimensionMismatch, NoInput, RespireError, MalformedRow
from .harness import (
    FeatureTable,
    SearchBudget,
    assemble_report,
    atomic_write_bytes,
    canonical_json,
    combine_modalities,
    hyperparameter_log,
    load_manifest,
    nested_cv,
    summary_table,
    undersample,
)
from .harness.cv import SHALLOW_ALGORITHMS as FE_ALGORITHMS
from .harness.tables import table_bytes

log = logging.getLogger("respire")

FAILURE_BUDGET = 0.05
MODALITY_NAMES = {"C": "cough", "B": "breath"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _extract_one(row) -> tuple[str, np.ndarray | None, str | None]:
    try:
        clip = decode_wav(row.path)
        return row.sample_id, features.extract_handcrafted(clip), None
    except FileNotFoundError:
        raise MalformedRow(f"sample {row.sample_id!r}: missing file {row.path}") from None
    except RespireError as exc:
        return row.sample_id, None, str(exc)


def _handcrafted_table(manifest, workers: int) -> FeatureTable:
    missing = [r for r in manifest.rows if not os.path.exists(r.path)]
    if missing:
        raise MalformedRow(
            "missing audio files: "
            + ", ".join(f"{r.sample_id} ({r.path})" for r in missing[:10])
        )
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_extract_one, manifest.rows))
    else:
        results = [_extract_one(r) for r in manifest.rows]
    ids, vectors, failures = [], [], 0
    for sample_id, vector, problem in results:
        if vector is None:
            failures += 1
            log.warning("skipping %s: %s", sample_id, problem)
        else:
            ids.append(sample_id)
            vectors.append(vector)
    if len(manifest.rows) and failures / len(manifest.rows) > FAILURE_BUDGET:
        raise RespireError(
            f"{failures}/{len(manifest.rows)} files failed to decode "
            f"(budget {FAILURE_BUDGET:.0%})"
        )
    if not ids:
        raise NoInput("no decodable audio files")
    return FeatureTable(tuple(ids), np.vstack(vectors).astype(np.float32), "handcrafted-477")


def cmd_features(args) -> int:
    manifest = load_manifest(args.manifest)
    table = _handcrafted_table(manifest, args.workers)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    atomic_write_bytes(out, table_bytes(table))
    log.info("wrote %d x %d feature table to %s", len(table.ids), table.dim, out)
    return 0


def _pooled_table(emb_dir) -> tuple[FeatureTable, str]:
    paths = sorted(Path(emb_dir).glob("*.emb1"))
    if not paths:
        raise NoInput(f"no .emb1 files in {emb_dir}")
    ids, rows = [], []
    config_name = None
    for path in paths:
        emb = embeddings.read_embedding_file(path)
        if config_name is None:
            config_name = emb.config.name
        elif emb.config.name != config_name:
            raise DimensionMismatch(
                f"{path}: config {emb.config.name} differs from {config_name}"
            )
        ids.append(emb.sample_id)
        rows.append(embeddings.pool(emb))
    table = FeatureTable(
        tuple(ids), np.vstack(rows).astype(np.float32), "pooled-embedding"
    )
    return table, config_name


def cmd_pool(args) -> int:
    table, config_name = _pooled_table(args.emb_dir)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    atomic_write_bytes(out, table_bytes(table))
    log.info(
        "pooled %d %s sets (%d dims) into %s", len(table.ids), config_name, table.dim, out
    )
    return 0


def _pooled_mapping(manifest, emb_dir, config_name: str) -> dict[str, np.ndarray]:
    expected = embeddings.validate_config(config_name)
    mapping = {}
    for row in manifest.rows:
        path = Path(emb_dir) / f"{row.sample_id}.emb1"
        if not path.exists():
            raise NoInput(f"missing embedding file {path} for sample {row.sample_id!r}")
        emb = embeddings.read_embedding_file(path)
        if emb.config.name != expected.name:
            raise DimensionMismatch(
                f"{path}: holds {emb.config.name}, expected {expected.name}"
            )
        mapping[row.sample_id] = embeddings.pool(emb)
    return mapping


def _evaluation_matrix(manifest, args, feature_kind: str):
    """Rows (ids, users, X, y, table kind) for the requested modality."""
    if feature_kind == "handcrafted":
        table = _handcrafted_table(manifest, args.workers)
        mapping = table.as_mapping()
    else:
        config_name = feature_kind.split(":", 1)[1]
        mapping = _pooled_mapping(manifest, args.emb_dir, config_name)

    if args.modality in ("C", "B"):
        rows = [
            r
            for r in manifest.select_modality(MODALITY_NAMES[args.modality]).rows
            if r.sample_id in mapping
        ]
        if not rows:
            raise NoInput(f"no rows with features for modality {args.modality}")
        ids = [r.sample_id for r in rows]
        users = [r.user_id for r in rows]
        X = np.vstack([mapping[i] for i in ids])
        y = np.array([r.y for r in rows], dtype=np.int64)
        kind = "handcrafted-477" if feature_kind == "handcrafted" else "pooled-embedding"
        return ids, users, X, y, kind
    if args.cb_mode == "union":
        rows = [r for r in manifest.rows if r.sample_id in mapping]
        if not rows:
            raise NoInput("no rows with features")
        ids = [r.sample_id for r in rows]
        users = [r.user_id for r in rows]
        X = np.vstack([mapping[i] for i in ids])
        y = np.array([r.y for r in rows], dtype=np.int64)
        return ids, users, X, y, "concatenated"
    ids, users, X, y, dropped = combine_modalities(manifest, mapping)
    if dropped:
        log.warning("dropped %d unpaired rows while building CB features", dropped)
    return ids, users, X, y, "concatenated"


def cmd_evaluate(args) -> int:
    started = time.monotonic()
    manifest = load_manifest(args.manifest)
    manifest = undersample(manifest, seed=args.seed)
    feature_kind = args.features
    ids, users, X, y, kind = _evaluation_matrix(manifest, args, feature_kind)
    log.info(
        "evaluating %s/%s on %d rows (%d dims, %d users)",
        feature_kind, args.modality, X.shape[0], X.shape[1], len(set(users)),
    )

    budget = SearchBudget(
        random_trials=args.trials,
        hyperband_R=args.hyperband_R,
        hyperband_eta=args.hyperband_eta,
    )
    if args.approach == "ft":
        algorithms = ["MLP"]
    elif args.algorithm == "all":
        algorithms = list(FE_ALGORITHMS)
    else:
        algorithms = [args.algorithm]

    cells = []
    for algorithm in algorithms:
        cells.append(
            nested_cv(
                X, y, users, algorithm, seed=args.seed,
                budget=budget, workers=args.workers,
            )
        )
        log.info("%s mean PR-AUC %.3f", algorithm, cells[-1]["mean_pr_auc"])

    entries = []
    if feature_kind.startswith("emb:"):
        entry = footprint.backbone_footprint(feature_kind.split(":", 1)[1])
        entries.append(entry.as_dict())
    for cell in cells:
        for fold in cell["folds"]:
            entries.append(
                {
                    "component": f"{cell['algorithm']}/fold{fold['fold']}",
                    "parameter_count": fold["model_parameters"],
                    "estimated_bytes": 4 * fold["model_parameters"],
                    "measured_bytes": fold["model_bytes"],
                    "published_bytes": None,
                }
            )

    config = {
        "dataset": Path(args.manifest).stem,
        "manifest": str(args.manifest),
        "modality": args.modality,
        "feature_kind": feature_kind,
        "approach": args.approach,
        "algorithms": algorithms,
        "cb_mode": args.cb_mode,
        "seed": args.seed,
        "budget": {
            "grid_limit": budget.grid_limit,
            "random_trials": budget.random_trials,
            "hyperband_R": budget.hyperband_R,
            "hyperband_eta": budget.hyperband_eta,
        },
        "n_rows": len(ids),
    }
    report = assemble_report(config, cells, entries)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_bytes(out / "report.json", canonical_json(report))
    atomic_write_bytes(out / "summary.txt", summary_table(report).encode())
    atomic_write_bytes(out / "hyperparameters.log", hyperparameter_log(report).encode())
    sys.stdout.write(summary_table(report))
    log.info("finished in %.1f s; report in %s", time.monotonic() - started, out)
    return 0


def cmd_footprint(args) -> int:
    import json

    rows = []
    for path in args.reports:
        with open(path) as fh:
            report = json.load(fh)
        for entry in report.get("footprint", []):
            rows.append((Path(path).stem, entry))
    if not rows:
        raise NoInput("no footprint entries in the given reports")
    header = (
        f"{'report':<18} {'component':<16} {'params':>12} "
        f"{'estimated':>12} {'measured':>10} {'published':>12}"
    )
    lines = [header, "-" * len(header)]
    for name, entry in rows:
        measured = entry.get("measured_bytes")
        published = entry.get("published_bytes")
        lines.append(
            f"{name:<18} {entry['component']:<16} {entry['parameter_count']:>12,} "
            f"{entry['estimated_bytes']:>12,} "
            f"{measured if measured is not None else '-':>10} "
            f"{published if published is not None else '-':>12}"
        )
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="respire", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common_workers = dict(type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("features", help="extract handcrafted features to a table")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output FeatureTable path")
    p.add_argument("--workers", **common_workers)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("pool", help="pool EMB1 files into a feature table")
    p.add_argument("--emb-dir", required=True)
    p.add_argument("--out", required=True, help="output FeatureTable path")
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("evaluate", help="run nested cross-validation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--modality", choices=("C", "B", "CB"), required=True)
    p.add_argument(
        "--features",
        required=True,
        help="'handcrafted' or 'emb:<CONFIG NAME>' (e.g. 'emb:L3 E 512 L')",
    )
    p.add_argument("--approach", choices=("fe", "ft"), default="fe")
    p.add_argument(
        "--seed", type=int, required=True,
        help="explicit run seed (required: every run must be re-runnable)",
    )
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", **common_workers)
    p.add_argument("--emb-dir", help="directory of <sample_id>.emb1 files")
    p.add_argument(
        "--algorithm", choices=FE_ALGORITHMS + ("all",), default="all",
        help="shallow family for --approach fe (default: all four)",
    )
    p.add_argument("--cb-mode", choices=("concat", "union"), default="concat")
    p.add_argument("--hyperband-R", type=int, default=27, dest="hyperband_R")
    p.add_argument("--hyperband-eta", type=int, default=3, dest="hyperband_eta")
    p.add_argument("--trials", type=int, default=60, help="random-search trials")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("footprint", help="aggregate footprint tables from reports")
    p.add_argument("reports", nargs="+", help="report.json paths")
    p.set_defaults(func=cmd_footprint)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("RESPIRE_LOG", "INFO").upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "features", "").startswith("emb:") and not getattr(args, "emb_dir", None):
        parser.error("--features emb:<NAME> requires --emb-dir")
    try:
        return args.func(args)
    except RespireError as exc:
        log.error("%s", exc)
        return 1
    except Exception:
        log.exception("runtime failure")
        return 2


if __name__ == "__main__":
    sys.exit(main())
