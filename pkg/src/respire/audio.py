"""Audio frontend: WAV decoding, resampling, normalization, framing and
linear/mel spectrograms.

All operations are pure functions on immutable clips and are safe to run
concurrently across files.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .errors import CorruptFile, EmptyAudio, TooShort

MIN_RATE = 8000
MAX_RATE = 96000

# Handcrafted feature path operates at this rate; STFT defaults below.
HANDCRAFTED_RATE = 22050
DEFAULT_FFT_SIZE = 2048
DEFAULT_HOP = 512

LOG_FLOOR = 1e-10

# Resampler kernel: windowed sinc, Kaiser beta 8.6, 64 zero crossings.
_KAISER_BETA = 8.6
_ZERO_CROSSINGS = 64


@dataclass(frozen=True)
class AudioClip:
    """Mono waveform with its sample rate."""

    samples: np.ndarray
    sample_rate: int
    source_id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size == 0:
            raise EmptyAudio(f"clip {self.source_id!r} holds no samples")
        if not (MIN_RATE <= self.sample_rate <= MAX_RATE):
            raise ValueError(
                f"sample_rate {self.sample_rate} outside [{MIN_RATE}, {MAX_RATE}]"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class FrameSpec:
    """Sliding-window geometry in seconds."""

    window_seconds: float
    hop_seconds: float

    def __post_init__(self):
        if not (0 < self.hop_seconds <= self.window_seconds):
            raise ValueError("need 0 < hop_seconds <= window_seconds")

    def window_samples(self, rate: int) -> int:
        return int(round(self.window_seconds * rate))

    def hop_samples(self, rate: int) -> int:
        return int(round(self.hop_seconds * rate))


@dataclass(frozen=True)
class SpectrogramImage:
    """Frame-by-bin power (linear) or log-power (mel) matrix."""

    values: np.ndarray  # n_frames x n_bins
    bin_kind: str  # "linear" | "mel"
    n_bins: int
    frame_spec: FrameSpec = field(compare=False)


def decode_wav(path) -> AudioClip:
    """Decode a PCM WAV file to a mono clip in [-1, 1).

    Integer samples are scaled by their type range; multichannel audio is
    averaged to mono. Raises CorruptFile for undecodable files and
    EmptyAudio for zero-length data chunks.
    """
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # non-data chunks are harmless
            rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise CorruptFile(f"{path}: {exc}") from exc

    if data.size == 0:
        raise EmptyAudio(f"{path}: empty data chunk")

    if data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        # 24-bit PCM is delivered as int32 with the low byte zeroed, so the
        # int32 range scaling is correct for both widths.
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise CorruptFile(f"{path}: unsupported sample format {data.dtype}")

    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return AudioClip(samples, int(rate), source_id=str(path))


def normalize(clip: AudioClip) -> AudioClip:
    """Scale so that max |sample| is 1; all-zero clips pass through."""
    peak = np.max(np.abs(clip.samples))
    if peak == 0.0 or peak == 1.0:
        return clip
    return AudioClip(clip.samples / peak, clip.sample_rate, clip.source_id)


def _sinc_kernel(up: int, down: int) -> np.ndarray:
    # Unit-gain lowpass at the narrower of the two Nyquist bands, designed
    # for the upsampled rate; resample_poly applies the `up` gain itself.
    width = min(1.0 / up, 1.0 / down)
    half = _ZERO_CROSSINGS * max(up, down)
    n = np.arange(-half, half + 1)
    return width * np.sinc(width * n) * np.kaiser(2 * half + 1, _KAISER_BETA)


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Band-limited polyphase resampling to target_rate.

    Duration is preserved within one output sample. Identity when the
    rates already match.
    """
    if not (MIN_RATE <= target_rate <= MAX_RATE):
        raise ValueError(f"target_rate {target_rate} outside [{MIN_RATE}, {MAX_RATE}]")
    if target_rate == clip.sample_rate:
        return clip
    g = gcd(clip.sample_rate, int(target_rate))
    up, down = target_rate // g, clip.sample_rate // g
    out = resample_poly(clip.samples, up, down, window=_sinc_kernel(up, down))
    return AudioClip(out, int(target_rate), clip.source_id)


def frame(clip: AudioClip, spec: FrameSpec, pad_short: bool = False) -> list[AudioClip]:
    """Slice into windows starting at multiples of the hop.

    The trailing partial window is dropped; the count is
    floor((N - W) / H) + 1. Clips shorter than one window raise TooShort
    unless pad_short is set, in which case the clip is zero-padded to
    exactly one window.
    """
    w = spec.window_samples(clip.sample_rate)
    h = spec.hop_samples(clip.sample_rate)
    n = len(clip)
    if n < w:
        if not pad_short:
            raise TooShort(
                f"clip {clip.source_id!r}: {n} samples < window of {w}"
            )
        padded = np.zeros(w)
        padded[:n] = clip.samples
        return [AudioClip(padded, clip.sample_rate, clip.source_id)]
    count = (n - w) // h + 1
    return [
        AudioClip(clip.samples[i * h : i * h + w], clip.sample_rate, clip.source_id)
        for i in range(count)
    ]


def hz_to_mel(f):
    """HTK mel scale: 2595 * log10(1 + f / 700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, fft_size: int, rate: int) -> np.ndarray:
    """Triangular filterbank on the HTK mel scale, shape (n_mels, n_fft_bins).

    Peak-height triangles between mel-spaced edge points: adjacent filters
    tile to unity inside the covered band, so summed spectral area is
    preserved.
    """
    n_bins = fft_size // 2 + 1
    freqs = np.arange(n_bins) * rate / fft_size
    pts = mel_to_hz(np.linspace(hz_to_mel(0.0), hz_to_mel(rate / 2.0), n_mels + 2))
    fb = np.zeros((n_mels, n_bins))
    for m in range(n_mels):
        lo, ctr, hi = pts[m], pts[m + 1], pts[m + 2]
        rising = (freqs - lo) / (ctr - lo)
        falling = (hi - freqs) / (hi - ctr)
        fb[m] = np.clip(np.minimum(rising, falling), 0.0, None)
    if not (fb.sum(axis=1) > 0).all():
        raise ValueError(
            f"{n_mels} mel bands are too narrow for fft_size {fft_size} at {rate} Hz"
        )
    return fb


def stft_power(samples: np.ndarray, fft_size: int, hop: int) -> np.ndarray:
    """Magnitude-squared STFT with a Hann window, frames by rfft bins.

    Frames start at multiples of the hop (no centering); the trailing
    partial frame is dropped.
    """
    n = samples.size
    if n < fft_size:
        raise TooShort(f"{n} samples < fft_size {fft_size}")
    count = (n - fft_size) // hop + 1
    idx = np.arange(fft_size)[None, :] + hop * np.arange(count)[:, None]
    frames = samples[idx] * np.hanning(fft_size)[None, :]
    spectrum = np.fft.rfft(frames, axis=1)
    return np.abs(spectrum) ** 2


def spectrogram(
    clip: AudioClip,
    kind: str = "linear",
    n_bins: int | None = None,
    fft_size: int = DEFAULT_FFT_SIZE,
    hop: int = DEFAULT_HOP,
) -> SpectrogramImage:
    """Power spectrogram ("linear") or log-power mel spectrogram ("mel").

    Mel output applies the triangular filterbank and then a natural log
    with an additive floor of 1e-10.
    """
    if fft_size & (fft_size - 1):
        raise ValueError(f"fft_size {fft_size} is not a power of two")
    stft_bins = fft_size // 2 + 1
    power = stft_power(clip.samples, fft_size, hop)
    spec = FrameSpec(fft_size / clip.sample_rate, hop / clip.sample_rate)
    if kind == "linear":
        if n_bins is not None and n_bins != stft_bins:
            raise ValueError(f"linear kind has {stft_bins} bins, not {n_bins}")
        return SpectrogramImage(power, "linear", stft_bins, spec)
    if kind == "mel":
        if n_bins is None:
            raise ValueError("mel kind requires n_bins")
        if n_bins > stft_bins:
            raise ValueError(f"n_bins {n_bins} exceeds {stft_bins} STFT bins")
        fb = mel_filterbank(n_bins, fft_size, clip.sample_rate)
        mel = np.log(power @ fb.T + LOG_FLOOR)
        return SpectrogramImage(mel, "mel", n_bins, spec)
    raise ValueError(f"unknown spectrogram kind {kind!r}")
