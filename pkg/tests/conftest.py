"""Shared fixtures: synthetic clips, WAV files, manifests and datasets."""

from __future__ import annotations

import csv

import numpy as np
import pytest
from scipy.io import wavfile

from respire.audio import AudioClip


def tone(freq: float, seconds: float, rate: int, amplitude: float = 1.0, phase: float = 0.0):
    t = np.arange(int(round(seconds * rate))) / rate
    return AudioClip(amplitude * np.sin(2 * np.pi * freq * t + phase), rate, f"tone{freq}")


def click_train(clicks_per_second: float, seconds: float, rate: int):
    n = int(round(seconds * rate))
    samples = np.zeros(n)
    step = int(rate / clicks_per_second)
    samples[::step] = 1.0
    return AudioClip(samples, rate, "clicks")


def band_noise(rng, seconds: float, rate: int, low: float, high: float, gain: float = 1.0):
    """White noise band-passed to [low, high] Hz by FFT masking."""
    n = int(round(seconds * rate))
    spectrum = np.fft.rfft(rng.standard_normal(n))
    freqs = np.fft.rfftfreq(n, 1.0 / rate)
    spectrum[(freqs < low) | (freqs > high)] = 0.0
    samples = np.fft.irfft(spectrum, n)
    peak = np.max(np.abs(samples))
    return AudioClip(gain * samples / peak, rate, "band")


def write_wav(path, clip: AudioClip) -> None:
    data = np.clip(clip.samples, -1.0, 1.0 - 1.0 / 32768)
    wavfile.write(path, clip.sample_rate, (data * 32768.0).astype(np.int16))


def write_manifest(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "user_id", "modality", "label", "path", "pair_id"])
        writer.writerows(rows)


@pytest.fixture(scope="session")
def spectral_dataset_dir(tmp_path_factory):
    """50 users x 4 cough clips; classes differ by noise band energy.

    Four clips per user keep outer test folds at 40 rows, where the
    small-sample bias of average precision stays well inside the
    chance-level tolerance. Built once per session.
    """
    root = tmp_path_factory.mktemp("spectral")
    rng = np.random.default_rng(2024)
    rows = []
    for user in range(50):
        positive = user < 25
        low, high = (2800.0, 5200.0) if positive else (300.0, 1500.0)
        for rec in range(4):
            clip = band_noise(rng, 0.7, 22050, low, high, gain=0.8)
            sample_id = f"u{user:02d}r{rec}"
            path = root / f"{sample_id}.wav"
            write_wav(path, clip)
            rows.append(
                [sample_id, f"user{user:02d}", "cough",
                 "positive" if positive else "negative", str(path), ""]
            )
    manifest = root / "manifest.csv"
    write_manifest(manifest, rows)
    return root, manifest


def grouped_feature_dataset(rng, n_users: int = 20, rows_per_user: int = 2, dim: int = 6,
                            separation: float = 4.0):
    """Linearly separable per-user feature rows for harness tests."""
    X, y, users = [], [], []
    for user in range(n_users):
        label = user % 2
        center = np.zeros(dim)
        center[0] = separation if label else -separation
        for _ in range(rows_per_user):
            X.append(center + rng.standard_normal(dim))
            y.append(label)
            users.append(f"user{user:02d}")
    return np.array(X), np.array(y), users
