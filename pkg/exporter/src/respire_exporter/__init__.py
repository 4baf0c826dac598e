"""respire-exporter: batch extraction of deep audio embeddings into EMB1
files consumed by the evaluation toolkit."""

__version__ = "0.1.0"

from .backbones import BACKBONE_SPECS, BackboneSpec, ModelUnavailable, get_runner
from .emb1 import read_emb1, write_emb1
from .export import ExportJob, export

__all__ = [
    "BACKBONE_SPECS",
    "BackboneSpec",
    "ExportJob",
    "ModelUnavailable",
    "export",
    "get_runner",
    "read_emb1",
    "write_emb1",
]
