"""Handcrafted acoustic features: a fixed 477-value vector per clip.

Layout: 4 clip-level scalars (duration, onsets, tempo, period) followed by
11 summary statistics for each of 43 frame series (rms energy, spectral
centroid, 85% roll-off, zero-crossing rate, 13 MFCCs and their first and
second derivatives). 4 + 43 * 11 = 477.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from . import audio
from .audio import AudioClip

N_MFCC = 13
N_MEL_BANDS = 128
DELTA_HALF_WIDTH = 4  # 9-frame regression window

STATISTIC_NAMES = (
    "mean",
    "median",
    "rms",
    "max",
    "min",
    "q1",
    "q3",
    "iqr",
    "std",
    "skewness",
    "kurtosis",
)

SERIES_NAMES = (
    ("rms_energy", "spectral_centroid", "rolloff_85", "zcr")
    + tuple(f"mfcc_{i + 1}" for i in range(N_MFCC))
    + tuple(f"d_mfcc_{i + 1}" for i in range(N_MFCC))
    + tuple(f"d2_mfcc_{i + 1}" for i in range(N_MFCC))
)

SCALAR_NAMES = ("duration", "onsets", "tempo", "period")

#: Ordered (feature, statistic) labels of the 477 vector entries.
VECTOR_LAYOUT = tuple(
    [(name, "") for name in SCALAR_NAMES]
    + [(series, stat) for series in SERIES_NAMES for stat in STATISTIC_NAMES]
)

VECTOR_LENGTH = len(VECTOR_LAYOUT)
assert VECTOR_LENGTH == 477


@dataclass(frozen=True)
class SeriesStats:
    """Eleven summary statistics of one frame series."""

    mean: float
    median: float
    rms: float
    max: float
    min: float
    q1: float
    q3: float
    iqr: float
    std: float
    skewness: float
    kurtosis: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in STATISTIC_NAMES])


def series_stats(series) -> SeriesStats:
    """Summary statistics with linear-interpolation quartiles.

    Skewness is the third standardized moment and kurtosis the excess
    kurtosis, both from population moments; constant series get
    std = iqr = skewness = kurtosis = 0.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        raise ValueError("series_stats requires at least one value")
    q1, q3 = np.percentile(x, [25.0, 75.0])
    centred = x - x.mean()
    m2 = np.mean(centred**2)
    if m2 > 0.0:
        skewness = np.mean(centred**3) / m2**1.5
        kurtosis = np.mean(centred**4) / m2**2 - 3.0
    else:
        skewness = kurtosis = 0.0
    return SeriesStats(
        mean=float(x.mean()),
        median=float(np.median(x)),
        rms=float(np.sqrt(np.mean(x**2))),
        max=float(x.max()),
        min=float(x.min()),
        q1=float(q1),
        q3=float(q3),
        iqr=float(q3 - q1),
        std=float(np.sqrt(m2)),
        skewness=float(skewness),
        kurtosis=float(kurtosis),
    )


def _frame_signal(samples: np.ndarray, width: int, hop: int) -> np.ndarray:
    count = (samples.size - width) // hop + 1
    idx = np.arange(width)[None, :] + hop * np.arange(count)[:, None]
    return samples[idx]


def _spectral_flux(power: np.ndarray) -> np.ndarray:
    """Half-wave-rectified frame-to-frame magnitude increase."""
    magnitude = np.sqrt(power)
    diff = np.diff(magnitude, axis=0, prepend=magnitude[:1])
    return np.clip(diff, 0.0, None).sum(axis=1)


def _pick_onsets(envelope: np.ndarray, frame_rate: float) -> int:
    """Count local maxima exceeding a local mean plus 0.3 global std."""
    if envelope.size == 0:
        return 0
    std = envelope.std()
    half = max(1, int(round(0.1 * frame_rate)))
    count = 0
    for t in range(envelope.size):
        v = envelope[t]
        lo, hi = max(0, t - half), min(envelope.size, t + half + 1)
        if v < envelope[lo:hi].max():
            continue
        if v > envelope[lo:hi].mean() + 0.3 * std:
            count += 1
    return count


def _tempo_bpm(envelope: np.ndarray, frame_rate: float) -> float:
    """Autocorrelation tempo of the onset envelope, 30-300 BPM.

    The envelope is smoothed over ~0.1 s first: flux peaks are only a
    frame or two wide, and raw pulse trains whose period is a non-integer
    frame count would otherwise correlate better at the doubled lag.
    """
    if envelope.size < 2 or envelope.std() == 0.0:
        return 0.0
    width = max(3, int(round(0.1 * frame_rate)) | 1)
    kernel = np.hanning(width + 2)[1:-1]
    smoothed = np.convolve(envelope, kernel / kernel.sum(), mode="same")
    if smoothed.std() == 0.0:
        return 0.0
    centred = smoothed - smoothed.mean()
    ac = np.correlate(centred, centred, mode="full")[envelope.size - 1 :]
    lag_min = max(1, int(np.ceil(frame_rate * 60.0 / 300.0)))
    lag_max = min(envelope.size - 1, int(np.floor(frame_rate * 60.0 / 30.0)))
    if lag_max < lag_min:
        return 0.0
    lag = lag_min + int(np.argmax(ac[lag_min : lag_max + 1]))
    return 60.0 * frame_rate / lag


def scalar_features(
    clip: AudioClip,
    fft_size: int = audio.DEFAULT_FFT_SIZE,
    hop: int = audio.DEFAULT_HOP,
) -> tuple[float, int, float, float]:
    """Clip-level scalars: duration (s), onset count, tempo (BPM) and the
    dominant frequency of the full-signal FFT (Hz)."""
    duration = clip.duration

    spectrum = np.abs(np.fft.rfft(clip.samples))
    period = float(np.argmax(spectrum) * clip.sample_rate / len(clip))

    power = audio.stft_power(clip.samples, fft_size, hop)
    envelope = _spectral_flux(power)
    frame_rate = clip.sample_rate / hop
    onsets = _pick_onsets(envelope, frame_rate)
    tempo = _tempo_bpm(envelope, frame_rate)
    return duration, onsets, tempo, period


def _mfcc_matrix(power: np.ndarray, rate: int, fft_size: int) -> np.ndarray:
    fb = audio.mel_filterbank(N_MEL_BANDS, fft_size, rate)
    log_mel = np.log(power @ fb.T + audio.LOG_FLOOR)
    return dct(log_mel, type=2, norm="ortho", axis=1)[:, :N_MFCC]


def _delta(series: np.ndarray) -> np.ndarray:
    """Regression slope over a 9-frame window with edge replication."""
    k = np.arange(1, DELTA_HALF_WIDTH + 1)
    denom = 2.0 * np.sum(k**2)
    padded = np.pad(series, ((DELTA_HALF_WIDTH, DELTA_HALF_WIDTH), (0, 0)), mode="edge")
    out = np.zeros_like(series)
    for i in k:
        out += i * (
            padded[DELTA_HALF_WIDTH + i : DELTA_HALF_WIDTH + i + series.shape[0]]
            - padded[DELTA_HALF_WIDTH - i : DELTA_HALF_WIDTH - i + series.shape[0]]
        )
    return out / denom


def frame_series(
    clip: AudioClip,
    fft_size: int = audio.DEFAULT_FFT_SIZE,
    hop: int = audio.DEFAULT_HOP,
) -> dict[str, np.ndarray]:
    """Per-frame series on the STFT grid, keyed by SERIES_NAMES."""
    power = audio.stft_power(clip.samples, fft_size, hop)
    n_frames = power.shape[0]
    freqs = np.arange(power.shape[1]) * clip.sample_rate / fft_size

    frames = _frame_signal(clip.samples, fft_size, hop)
    rms = np.sqrt(np.mean(frames**2, axis=1))

    magnitude = np.sqrt(power)
    mag_total = magnitude.sum(axis=1)
    centroid = np.where(
        mag_total > 0.0,
        (magnitude * freqs[None, :]).sum(axis=1) / np.where(mag_total > 0, mag_total, 1.0),
        0.0,
    )

    energy = np.cumsum(power, axis=1)
    total = energy[:, -1:]
    reached = energy >= 0.85 * total
    rolloff = freqs[np.argmax(reached, axis=1)]

    sign = np.signbit(frames)
    zcr = np.mean(sign[:, 1:] != sign[:, :-1], axis=1)

    mfcc = _mfcc_matrix(power, clip.sample_rate, fft_size)
    d_mfcc = _delta(mfcc)
    d2_mfcc = _delta(d_mfcc)

    series: dict[str, np.ndarray] = {
        "rms_energy": rms,
        "spectral_centroid": centroid,
        "rolloff_85": rolloff,
        "zcr": zcr,
    }
    for i in range(N_MFCC):
        series[f"mfcc_{i + 1}"] = mfcc[:, i]
        series[f"d_mfcc_{i + 1}"] = d_mfcc[:, i]
        series[f"d2_mfcc_{i + 1}"] = d2_mfcc[:, i]
    assert all(v.shape == (n_frames,) for v in series.values())
    return series


def extract_handcrafted(clip: AudioClip) -> np.ndarray:
    """The 477-value feature vector, in VECTOR_LAYOUT order.

    The clip is resampled to 22050 Hz first; amplitudes are taken as-is
    (no peak normalization) so energy statistics keep their scale.
    """
    clip = audio.resample(clip, audio.HANDCRAFTED_RATE)
    duration, onsets, tempo, period = scalar_features(clip)
    series = frame_series(clip)
    parts = [np.array([duration, onsets, tempo, period])]
    parts.extend(series_stats(series[name]).as_array() for name in SERIES_NAMES)
    vector = np.concatenate(parts)
    if vector.shape != (VECTOR_LENGTH,):
        raise AssertionError(f"feature vector has length {vector.size}")
    if not np.isfinite(vector).all():
        raise AssertionError("feature vector contains non-finite values")
    return vector
