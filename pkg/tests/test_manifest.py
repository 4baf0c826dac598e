import numpy as np
import pytest

from respire.errors import (
    DanglingPair,
    DuplicateSampleId,
    MalformedRow,
    NoPairs,
    SingleClass,
)
from respire.harness import combine_modalities, load_manifest, undersample
from respire.harness.manifest import Manifest, ManifestRow

from conftest import write_manifest


def row(i, user="u1", modality="cough", label="positive", pair=""):
    return [f"s{i}", user, modality, label, f"/audio/{i}.wav", pair]


def test_load_valid_manifest(tmp_path):
    path = tmp_path / "m.csv"
    write_manifest(path, [
        row(1, "u1", "cough", "positive"),
        row(2, "u1", "breath", "positive"),
        row(3, "u2", "cough", "negative"),
        row(4, "u2", "breath", "negative"),
    ])
    manifest = load_manifest(path)
    assert len(manifest) == 4
    assert manifest.users() == ["u1", "u2"]
    assert manifest.rows[0].y == 1 and manifest.rows[2].y == 0


def test_duplicate_sample_id_reports_both_rows(tmp_path):
    path = tmp_path / "m.csv"
    rows = [row(1), row(2, "u2", "breath", "negative")]
    rows[1][0] = "s1"
    write_manifest(path, rows)
    with pytest.raises(DuplicateSampleId) as err:
        load_manifest(path)
    assert "2" in str(err.value) and "3" in str(err.value)


@pytest.mark.parametrize(
    "bad_field,value,exc",
    [("modality", "speech", MalformedRow), ("label", "covid", MalformedRow)],
)
def test_unknown_modality_and_label_rejected(tmp_path, bad_field, value, exc):
    path = tmp_path / "m.csv"
    bad = row(1)
    bad[2 if bad_field == "modality" else 3] = value
    write_manifest(path, [bad])
    with pytest.raises(exc) as err:
        load_manifest(path)
    assert ":2:" in str(err.value)  # row number


def test_pair_linking_two_coughs_rejected(tmp_path):
    path = tmp_path / "m.csv"
    write_manifest(path, [
        row(1, "u1", "cough", "positive", "p1"),
        row(2, "u1", "cough", "positive", "p1"),
    ])
    with pytest.raises(DanglingPair):
        load_manifest(path)


def test_pair_across_users_rejected(tmp_path):
    path = tmp_path / "m.csv"
    write_manifest(path, [
        row(1, "u1", "cough", "positive", "p1"),
        row(2, "u2", "breath", "positive", "p1"),
    ])
    with pytest.raises(DanglingPair):
        load_manifest(path)


def test_wrong_header_and_field_count(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("id,who\n1,2\n")
    with pytest.raises(MalformedRow):
        load_manifest(path)
    path = tmp_path / "c.csv"
    path.write_text("sample_id,user_id,modality,label,path,pair_id\na,b,cough\n")
    with pytest.raises(MalformedRow):
        load_manifest(path)


def synthetic_manifest(n_positive, n_negative, modality="cough"):
    rows = []
    for i in range(n_positive):
        rows.append(ManifestRow(f"p{i}", f"up{i}", modality, "positive", f"/p{i}.wav"))
    for i in range(n_negative):
        rows.append(ManifestRow(f"n{i}", f"un{i}", modality, "negative", f"/n{i}.wav"))
    return Manifest(tuple(rows))


def counts(manifest, modality):
    pos = sum(1 for r in manifest.rows if r.modality == modality and r.label == "positive")
    neg = sum(1 for r in manifest.rows if r.modality == modality and r.label == "negative")
    return pos, neg


def test_undersample_coswara_cough_counts():
    manifest = synthetic_manifest(1267, 435)
    balanced = undersample(manifest, seed=0)
    assert counts(balanced, "cough") == (435, 435)


def test_undersample_coughvid_counts():
    manifest = synthetic_manifest(547, 5625)
    balanced = undersample(manifest, seed=1)
    assert counts(balanced, "cough") == (547, 547)


def test_undersample_balanced_identity():
    manifest = synthetic_manifest(10, 10)
    balanced = undersample(manifest, seed=2)
    assert balanced.rows == manifest.rows


def test_undersample_is_subset_and_keeps_minority():
    manifest = synthetic_manifest(50, 20)
    balanced = undersample(manifest, seed=3)
    assert set(balanced.rows) <= set(manifest.rows)
    minority = {r.sample_id for r in manifest.rows if r.label == "negative"}
    assert minority <= {r.sample_id for r in balanced.rows}


def test_undersample_single_class():
    with pytest.raises(SingleClass):
        undersample(synthetic_manifest(5, 0), seed=0)


def test_undersample_per_modality():
    rows = list(synthetic_manifest(30, 10, "cough").rows) + list(
        synthetic_manifest(5, 25, "breath").rows
    )
    rows = [
        ManifestRow(f"{r.modality[0]}{r.sample_id}", r.user_id, r.modality, r.label, f"/{r.modality}{r.sample_id}.wav")
        for r in rows
    ]
    balanced = undersample(Manifest(tuple(rows)), seed=4)
    assert counts(balanced, "cough") == (10, 10)
    assert counts(balanced, "breath") == (5, 5)


def paired_manifest(n_pairs, dim_label="positive"):
    rows = []
    for i in range(n_pairs):
        label = "positive" if i % 2 == 0 else "negative"
        rows.append(ManifestRow(f"c{i}", f"u{i}", "cough", label, f"/c{i}.wav", f"pair{i}"))
        rows.append(ManifestRow(f"b{i}", f"u{i}", "breath", label, f"/b{i}.wav", f"pair{i}"))
    return Manifest(tuple(rows))


def test_combine_concatenates_handcrafted_pairs():
    manifest = paired_manifest(4)
    features = {r.sample_id: np.full(477, hash(r.sample_id) % 7, dtype=float) for r in manifest.rows}
    ids, users, X, y, dropped = combine_modalities(manifest, features)
    assert X.shape == (4, 954)
    assert dropped == 0
    assert set(y) == {0, 1}
    # cough vector first, breath second
    np.testing.assert_array_equal(X[0][:477], features["c0"])
    np.testing.assert_array_equal(X[0][477:], features["b0"])


def test_combine_pooled_vggish_dims():
    manifest = paired_manifest(3)
    features = {r.sample_id: np.zeros(256) for r in manifest.rows}
    _, _, X, _, _ = combine_modalities(manifest, features)
    assert X.shape[1] == 512


def test_combine_without_pairs():
    manifest = synthetic_manifest(3, 3)
    with pytest.raises(NoPairs):
        combine_modalities(manifest, {r.sample_id: np.zeros(4) for r in manifest.rows})


def test_combine_drops_unpaired_and_counts():
    manifest = paired_manifest(3)
    rows = list(manifest.rows) + [ManifestRow("solo", "u9", "cough", "positive", "/solo.wav")]
    features = {r.sample_id: np.zeros(4) for r in rows}
    del features["b1"]  # missing breath features for pair1
    ids, _, X, _, dropped = combine_modalities(Manifest(tuple(rows)), features)
    assert X.shape[0] == 2
    assert dropped == 3  # the solo row plus both members of pair1
