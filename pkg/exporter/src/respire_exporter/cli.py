"""Command line: respire-export --manifest m.csv --backbone YAMNET --out dir/

Exit codes: 0 success, 1 validation error or unavailable model, 2 runtime
failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .backbones import BACKBONE_SPECS, ModelUnavailable
from .export import ExportJob, export

log = logging.getLogger("respire_exporter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="respire-export", description=__doc__)
    parser.add_argument("--manifest", required=True, help="dataset manifest CSV")
    parser.add_argument(
        "--backbone", required=True,
        help=f"one of: {', '.join(sorted(BACKBONE_SPECS))}",
    )
    parser.add_argument("--out", required=True, help="output directory for .emb1 files")
    parser.add_argument(
        "--runner", choices=("auto", "stub", "tfhub", "openl3"), default="auto",
        help="'stub' writes deterministic hash-seeded vectors (no weights)",
    )
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("RESPIRE_LOG", "INFO").upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    job = ExportJob(
        manifest=Path(args.manifest),
        backbone=args.backbone,
        out_dir=Path(args.out),
        runner=args.runner,
    )
    try:
        export(job)
        return 0
    except (ModelUnavailable, ValueError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return 1
    except Exception:
        log.exception("runtime failure")
        return 2


if __name__ == "__main__":
    sys.exit(main())
