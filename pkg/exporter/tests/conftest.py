import csv

import numpy as np
import pytest
from scipy.io import wavfile


def write_tone_wav(path, freq=440.0, seconds=2.0, rate=44100):
    t = np.arange(int(seconds * rate)) / rate
    data = (0.6 * np.sin(2 * np.pi * freq * t) * 32767).astype(np.int16)
    wavfile.write(path, rate, data)


@pytest.fixture()
def tiny_dataset(tmp_path):
    """Three 2-second WAVs plus a manifest."""
    rows = []
    for i, freq in enumerate((220.0, 440.0, 880.0)):
        path = tmp_path / f"clip{i}.wav"
        write_tone_wav(path, freq=freq)
        rows.append([f"s{i}", f"u{i}", "cough", "positive" if i % 2 else "negative",
                     str(path), ""])
    manifest = tmp_path / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "user_id", "modality", "label", "path", "pair_id"])
        writer.writerows(rows)
    return manifest, tmp_path
