import json

import numpy as np
import pytest

from respire_exporter import ExportJob, export, read_emb1
from respire_exporter.backbones import (
    BACKBONE_SPECS,
    ModelUnavailable,
    StubRunner,
    get_runner,
    resolve_spec,
)


def test_backbone_vocabulary():
    assert len(BACKBONE_SPECS) == 14
    assert resolve_spec("vggish").dim == 128
    assert resolve_spec("YAMNET").dim == 1024
    assert resolve_spec("l3_e_6144_m128").dim == 6144
    with pytest.raises(ValueError):
        resolve_spec("L3 X 512 L")


def test_windowing_conventions():
    vggish = resolve_spec("VGGISH")
    assert (vggish.sample_rate, vggish.window_seconds, vggish.hop_seconds) == (16000, 0.96, 0.96)
    yamnet = resolve_spec("YAMNET")
    assert (yamnet.sample_rate, yamnet.window_seconds, yamnet.hop_seconds) == (16000, 0.96, 0.48)
    l3 = resolve_spec("L3 M 512 L")
    assert l3.sample_rate == 48000


def test_vggish_two_second_clip_two_windows(tiny_dataset, tmp_path):
    manifest, _ = tiny_dataset
    out = tmp_path / "emb"
    written = export(ExportJob(manifest, "VGGISH", out, runner="stub"))
    assert len(written) == 3
    for path in written:
        name, sample_id, windows = read_emb1(path)
        assert name == "VGGISH"
        assert windows.shape == (2, 128)  # floor((32000-15360)/15360)+1


def test_yamnet_two_second_clip_at_least_three_windows(tiny_dataset, tmp_path):
    manifest, _ = tiny_dataset
    out = tmp_path / "emb"
    written = export(ExportJob(manifest, "YAMNET", out, runner="stub"))
    for path in written:
        _, _, windows = read_emb1(path)
        assert windows.shape[0] >= 3
        assert windows.shape == (3, 1024)  # floor((32000-15360)/7680)+1


def test_short_clip_pads_to_one_window(tmp_path):
    from conftest import write_tone_wav

    path = tmp_path / "short.wav"
    write_tone_wav(path, seconds=0.3)
    manifest = tmp_path / "m.csv"
    manifest.write_text(
        "sample_id,user_id,modality,label,path,pair_id\n"
        f"s0,u0,cough,positive,{path},\n"
    )
    written = export(ExportJob(manifest, "VGGISH", tmp_path / "emb", runner="stub"))
    _, _, windows = read_emb1(written[0])
    assert windows.shape == (1, 128)


def test_reexport_is_bit_identical(tiny_dataset, tmp_path):
    manifest, _ = tiny_dataset
    first = export(ExportJob(manifest, "L3 E 512 L", tmp_path / "a", runner="stub"))
    second = export(ExportJob(manifest, "L3 E 512 L", tmp_path / "b", runner="stub"))
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_sidecar_records_weight_source(tiny_dataset, tmp_path):
    manifest, _ = tiny_dataset
    out = tmp_path / "emb"
    export(ExportJob(manifest, "YAMNET", out, runner="stub"))
    sidecar = json.loads((out / "weights.json").read_text())
    assert sidecar["backbone"] == "YAMNET"
    assert sidecar["runner"] == "stub"
    assert sidecar["weights"]["source"] == "stub:deterministic"
    assert sidecar["files_written"] == 3


def test_decode_failures_are_skipped_and_counted(tiny_dataset, tmp_path):
    manifest, root = tiny_dataset
    (root / "clip1.wav").write_bytes(b"not audio")
    out = tmp_path / "emb"
    written = export(ExportJob(manifest, "VGGISH", out, runner="stub"))
    assert len(written) == 2
    sidecar = json.loads((out / "weights.json").read_text())
    assert sidecar["files_skipped"] == 1


def test_real_runner_unavailable_without_frameworks():
    # tensorflow_hub / openl3 are not installed in this environment
    with pytest.raises(ModelUnavailable):
        get_runner("VGGISH", "tfhub")
    with pytest.raises(ModelUnavailable):
        get_runner("L3 E 512 L", "openl3")


def test_stub_embeddings_depend_on_backbone_and_content():
    rng = np.random.default_rng(0)
    samples = rng.standard_normal(32000) * 0.3
    a = StubRunner(resolve_spec("L3 E 512 L"))(samples, 48000)
    b = StubRunner(resolve_spec("L3 M 512 L"))(samples, 48000)
    assert not np.array_equal(a, b)  # same audio, different backbone
    other = rng.standard_normal(32000) * 0.3
    c = StubRunner(resolve_spec("L3 E 512 L"))(other, 48000)
    assert not np.array_equal(a, c)  # same backbone, different audio
    # amplitude scaling is erased by the peak normalization convention
    d = StubRunner(resolve_spec("L3 E 512 L"))(samples * 0.5, 48000)
    assert np.array_equal(a, d)
