"""Memory footprint accounting: parameter counts, 4-byte-per-parameter
estimates, and measured sizes of serialized model blobs.

Backbone entries use the published parameter counts of the pre-trained
models and also carry the vendor-reported bundle sizes, which include
non-parameter overhead and therefore differ from the 4 B/param estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .embeddings import validate_config
from .errors import UnknownConfig
from .learners.blob import unpack_sections
from .mlp import HeadConfig

BYTES_PER_PARAMETER = 4

# name -> (parameter count, vendor-reported bundle bytes)
_BACKBONE_SIZES = {
    "VGGISH": (62_000_000, 288_000_000),
    "YAMNET": (3_700_000, 16_000_000),
    "OPENL3": (4_700_000, 18_000_000),
}


@dataclass(frozen=True)
class FootprintEntry:
    component: str
    parameter_count: int
    estimated_bytes: int
    measured_bytes: int | None = None
    published_bytes: int | None = None

    def __post_init__(self):
        if self.estimated_bytes != BYTES_PER_PARAMETER * self.parameter_count:
            raise ValueError("estimated_bytes must be 4 x parameter_count")
        if self.measured_bytes is not None and self.measured_bytes < 0:
            raise ValueError("measured_bytes must be >= 0")

    def as_dict(self) -> dict:
        return {
            "component": self.component,
            "parameter_count": self.parameter_count,
            "estimated_bytes": self.estimated_bytes,
            "measured_bytes": self.measured_bytes,
            "published_bytes": self.published_bytes,
        }


def head_param_count(config: HeadConfig) -> int:
    """Scalar count of the classification head.

    input_dim*u + u for the first layer, (L-1)(u^2 + u) for the remaining
    hidden layers, and 2u + 2 for the softmax output.
    """
    u, layers = config.hidden_units, config.hidden_layers
    return config.input_dim * u + u + (layers - 1) * (u * u + u) + 2 * u + 2


def backbone_footprint(name: str) -> FootprintEntry:
    """Published parameter count and size of one pre-trained backbone.

    Any of the 12 L3 configuration names resolves to the OpenL3 figures.
    """
    canonical = str(name).strip().upper()
    if canonical not in _BACKBONE_SIZES:
        config = validate_config(name)  # raises UnknownConfig for junk
        if not config.name.startswith("L3"):
            raise UnknownConfig(f"no published footprint for {name!r}")
        canonical = "OPENL3"
    params, published = _BACKBONE_SIZES[canonical]
    return FootprintEntry(
        component=canonical,
        parameter_count=params,
        estimated_bytes=BYTES_PER_PARAMETER * params,
        published_bytes=published,
    )


def measure_serialized(blob: bytes) -> FootprintEntry:
    """Footprint of a serialized model: scalar count of every section and
    the exact byte length of the blob."""
    tag, sections = unpack_sections(blob)
    params = sum(int(array.size) for _, array in sections)
    return FootprintEntry(
        component=tag,
        parameter_count=params,
        estimated_bytes=BYTES_PER_PARAMETER * params,
        measured_bytes=len(blob),
    )
