"""Backbone vocabulary and embedding runners.

Three runner families: "tfhub" (VGGish/YAMNet via TensorFlow Hub),
"openl3" (the 12 L3 configurations), and "stub" (deterministic
hash-seeded vectors for integration tests; no model weights involved).
Real runners import their frameworks lazily and raise ModelUnavailable
when the package or the pre-trained weights cannot be loaded.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import audio


class ModelUnavailable(RuntimeError):
    """The backbone's framework or pre-trained weights cannot be loaded."""


@dataclass(frozen=True)
class BackboneSpec:
    name: str
    dim: int
    sample_rate: int
    window_seconds: float
    hop_seconds: float
    family: str  # tfhub | openl3
    # openl3 arguments, unused for tfhub models
    input_repr: str | None = None
    content_type: str | None = None


def _l3_specs() -> dict[str, BackboneSpec]:
    reprs = {"L": "linear", "M128": "mel128", "M256": "mel256"}
    contents = {"E": "env", "M": "music"}
    specs = {}
    for content_key, content in contents.items():
        for dim in (512, 6144):
            for repr_key, input_repr in reprs.items():
                name = f"L3 {content_key} {dim} {repr_key}"
                specs[name] = BackboneSpec(
                    name=name, dim=dim, sample_rate=48000,
                    window_seconds=1.0, hop_seconds=0.1, family="openl3",
                    input_repr=input_repr, content_type=content,
                )
    return specs


BACKBONE_SPECS: dict[str, BackboneSpec] = {
    "VGGISH": BackboneSpec("VGGISH", 128, 16000, 0.96, 0.96, "tfhub"),
    "YAMNET": BackboneSpec("YAMNET", 1024, 16000, 0.96, 0.48, "tfhub"),
    **_l3_specs(),
}

_TFHUB_URLS = {
    "VGGISH": "https://tfhub.dev/google/vggish/1",
    "YAMNET": "https://tfhub.dev/google/yamnet/1",
}


def resolve_spec(name: str) -> BackboneSpec:
    canonical = " ".join(str(name).upper().replace("-", " ").replace("_", " ").split())
    try:
        return BACKBONE_SPECS[canonical]
    except KeyError:
        raise ValueError(f"unknown backbone {name!r}") from None


class StubRunner:
    """Deterministic pseudo-embeddings: one vector per sliding window,
    seeded from the window content and the backbone name. Exercises the
    full export pipeline (windowing, file layout, sidecar) without any
    model weights; re-exports are bit-identical."""

    kind = "stub"

    def __init__(self, spec: BackboneSpec):
        self.spec = spec

    def weight_source(self) -> dict:
        return {"source": "stub:deterministic", "sha256": None}

    def __call__(self, samples: np.ndarray, rate: int) -> np.ndarray:
        spec = self.spec
        samples = audio.normalize(audio.resample(samples, rate, spec.sample_rate))
        frames = audio.windows(samples, spec.sample_rate, spec.window_seconds, spec.hop_seconds)
        out = np.empty((frames.shape[0], spec.dim), dtype=np.float32)
        for i, frame in enumerate(frames):
            digest = hashlib.blake2b(
                frame.astype("<f4").tobytes() + spec.name.encode(), digest_size=8
            ).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "little"))
            out[i] = rng.standard_normal(spec.dim).astype(np.float32)
        return out


class TFHubRunner:
    """VGGish / YAMNet through TensorFlow Hub; the hub model does its own
    framing at the published window/hop."""

    kind = "tfhub"

    def __init__(self, spec: BackboneSpec):
        self.spec = spec
        try:
            import tensorflow_hub as hub  # noqa: F401  (lazy, heavy)
        except ImportError as exc:
            raise ModelUnavailable(f"tensorflow_hub not installed: {exc}") from exc
        try:
            self._model = hub.load(_TFHUB_URLS[spec.name])
        except Exception as exc:
            raise ModelUnavailable(f"cannot load {_TFHUB_URLS[spec.name]}: {exc}") from exc

    def weight_source(self) -> dict:
        return {"source": _TFHUB_URLS[self.spec.name], "sha256": None}

    def __call__(self, samples: np.ndarray, rate: int) -> np.ndarray:
        samples = audio.normalize(audio.resample(samples, rate, self.spec.sample_rate))
        result = self._model(samples.astype(np.float32))
        if self.spec.name == "YAMNET":  # returns (scores, embeddings, spectrogram)
            result = result[1]
        return np.asarray(result, dtype=np.float32)


class OpenL3Runner:
    kind = "openl3"

    def __init__(self, spec: BackboneSpec):
        self.spec = spec
        try:
            import openl3
        except ImportError as exc:
            raise ModelUnavailable(f"openl3 not installed: {exc}") from exc
        try:
            self._model = openl3.models.load_audio_embedding_model(
                input_repr=spec.input_repr,
                content_type=spec.content_type,
                embedding_size=spec.dim,
            )
            self._openl3 = openl3
        except Exception as exc:
            raise ModelUnavailable(f"cannot load OpenL3 weights: {exc}") from exc

    def weight_source(self) -> dict:
        return {
            "source": f"openl3:{self.spec.content_type}/{self.spec.input_repr}/{self.spec.dim}",
            "sha256": None,
        }

    def __call__(self, samples: np.ndarray, rate: int) -> np.ndarray:
        samples = audio.normalize(audio.resample(samples, rate, self.spec.sample_rate))
        embeddings, _ = self._openl3.get_audio_embedding(
            samples, self.spec.sample_rate, model=self._model,
            hop_size=self.spec.hop_seconds, center=False, verbose=0,
        )
        return np.asarray(embeddings, dtype=np.float32)


def get_runner(name: str, runner: str = "auto"):
    """Build a runner for a backbone. runner: auto | stub | tfhub | openl3."""
    spec = resolve_spec(name)
    if runner == "stub":
        return StubRunner(spec)
    if runner in ("auto", spec.family):
        if spec.family == "tfhub":
            return TFHubRunner(spec)
        return OpenL3Runner(spec)
    raise ValueError(f"runner {runner!r} cannot serve backbone {spec.name}")
