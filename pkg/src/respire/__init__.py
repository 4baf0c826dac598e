"""respire: respiratory-sound classification toolkit.

Feature paths (handcrafted acoustics and pooled deep audio embeddings),
shallow and MLP classifiers, user-grouped nested cross-validation scored
by PR-AUC, and model memory-footprint reporting.
"""

__version__ = "0.1.0"

from . import audio, embeddings, features, footprint, harness, hyperband, learners, metrics, mlp
from .errors import RespireError

__all__ = [
    "RespireError",
    "__version__",
    "audio",
    "embeddings",
    "features",
    "footprint",
    "harness",
    "hyperband",
    "learners",
    "metrics",
    "mlp",
]
