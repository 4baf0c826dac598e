"""Minimal audio frontend for the exporter: WAV decode, polyphase
resampling, peak normalization and sliding windows."""

from __future__ import annotations

import warnings
from math import gcd

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly


def decode_wav(path) -> tuple[np.ndarray, int]:
    """Mono float64 samples in [-1, 1) plus the sample rate."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rate, data = wavfile.read(path)
    if data.size == 0:
        raise ValueError(f"{path}: empty data chunk")
    if data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise ValueError(f"{path}: unsupported sample format {data.dtype}")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return samples, int(rate)


def resample(samples: np.ndarray, rate: int, target: int) -> np.ndarray:
    if rate == target:
        return samples
    g = gcd(rate, target)
    up, down = target // g, rate // g
    width = min(1.0 / up, 1.0 / down)
    half = 64 * max(up, down)
    n = np.arange(-half, half + 1)
    kernel = width * np.sinc(width * n) * np.kaiser(2 * half + 1, 8.6)
    return resample_poly(samples, up, down, window=kernel)


def normalize(samples: np.ndarray) -> np.ndarray:
    peak = np.max(np.abs(samples))
    return samples if peak == 0.0 else samples / peak


def windows(samples: np.ndarray, rate: int, window_seconds: float, hop_seconds: float) -> np.ndarray:
    """(n_windows, window_samples); clips shorter than one window are
    zero-padded to exactly one."""
    width = int(round(window_seconds * rate))
    hop = int(round(hop_seconds * rate))
    if samples.size < width:
        padded = np.zeros(width)
        padded[: samples.size] = samples
        return padded[None, :]
    count = (samples.size - width) // hop + 1
    idx = np.arange(width)[None, :] + hop * np.arange(count)[:, None]
    return samples[idx]
