"""Evaluation harness: manifests, user-grouped folds, feature tables,
nested cross-validation and report assembly."""

from ..metrics import pr_auc
from .cv import SearchBudget, nested_cv
from .folds import FoldPlan, user_grouped_folds
from .manifest import Manifest, ManifestRow, combine_modalities, load_manifest, undersample
from .report import (
    SCHEMA_ID,
    assemble_report,
    atomic_write_bytes,
    canonical_json,
    hyperparameter_log,
    summary_table,
)
from .tables import FeatureTable, read_feature_table, write_feature_table

__all__ = [
    "FeatureTable",
    "FoldPlan",
    "Manifest",
    "ManifestRow",
    "SCHEMA_ID",
    "SearchBudget",
    "assemble_report",
    "atomic_write_bytes",
    "canonical_json",
    "combine_modalities",
    "hyperparameter_log",
    "load_manifest",
    "nested_cv",
    "pr_auc",
    "read_feature_table",
    "summary_table",
    "undersample",
    "user_grouped_folds",
    "write_feature_table",
]
