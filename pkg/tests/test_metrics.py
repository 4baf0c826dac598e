import itertools

import numpy as np
import pytest

from respire.errors import SingleClass
from respire.metrics import pr_auc


def brute_force_ap(scores, labels):
    """O(n^2) reference: precision recomputed from scratch at every
    positive of the descending-score ranking. Assumes unique scores."""
    scores = list(map(float, scores))
    labels = list(map(int, labels))
    n = len(scores)
    total_pos = sum(labels)
    ap = 0.0
    for i in range(n):
        if not labels[i]:
            continue
        above = [j for j in range(n) if scores[j] > scores[i] or (scores[j] == scores[i] and j == i)]
        tp = sum(labels[j] for j in above)
        ap += tp / len(above)
    return ap / total_pos


def sequence_ap(labels_in_rank_order):
    """AP of one explicit ranking (used to enumerate tie orderings)."""
    tp = 0
    ap = 0.0
    total = sum(labels_in_rank_order)
    for rank, label in enumerate(labels_in_rank_order, start=1):
        if label:
            tp += 1
            ap += tp / rank
    return ap / total


def test_perfect_ranking():
    assert pr_auc([0.9, 0.8, 0.7, 0.2, 0.1], [1, 1, 1, 0, 0]) == 1.0


def test_single_inversion_two_items():
    assert pr_auc([0.1, 0.9], [1, 0]) == 0.5


def test_matches_brute_force_oracle():
    rng = np.random.default_rng(77)
    for _ in range(1000):
        n = int(rng.integers(4, 60))
        scores = rng.random(n)
        while np.unique(scores).size != n:  # keep the oracle tie-free
            scores = rng.random(n)
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        assert abs(pr_auc(scores, labels) - brute_force_ap(scores, labels)) < 1e-12


def test_random_scores_near_prevalence():
    rng = np.random.default_rng(5)
    values = []
    for _ in range(20):
        labels = np.concatenate([np.ones(5000, dtype=int), np.zeros(5000, dtype=int)])
        values.append(pr_auc(rng.random(10_000), labels))
    assert abs(np.mean(values) - 0.5) <= 0.02


def test_monotone_transform_invariance():
    rng = np.random.default_rng(8)
    scores = rng.random(200)
    labels = rng.integers(0, 2, 200)
    labels[0], labels[1] = 0, 1
    base = pr_auc(scores, labels)
    for transform in (lambda s: 3 * s + 2, np.exp, lambda s: np.tanh(s) * 5):
        assert pr_auc(transform(scores), labels) == pytest.approx(base, abs=1e-12)


def test_tie_averaging_matches_permutation_expectation():
    rng = np.random.default_rng(13)
    for _ in range(50):
        n = int(rng.integers(3, 8))
        scores = rng.integers(0, 3, n).astype(float)  # heavy ties
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        got = pr_auc(scores, labels)

        # enumerate every ordering consistent with the scores; weight by
        # multiplicity so the mean is the uniform-order expectation
        order = np.argsort(-scores, kind="stable")
        groups = []
        for key in sorted(set(scores), reverse=True):
            groups.append([labels[i] for i in order if scores[i] == key])
        aps = []
        for perms in itertools.product(*[list(itertools.permutations(g)) for g in groups]):
            ranking = [label for group in perms for label in group]
            aps.append(sequence_ap(ranking))
        assert got == pytest.approx(np.mean(aps), abs=1e-12)


def test_fully_tied_scores_match_enumeration():
    labels = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
    got = pr_auc([0.5] * 10, labels)
    aps = [
        sequence_ap([1 if i in positions else 0 for i in range(10)])
        for positions in itertools.combinations(range(10), 3)
    ]
    assert got == pytest.approx(np.mean(aps), abs=1e-12)


def test_validation():
    with pytest.raises(SingleClass):
        pr_auc([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        pr_auc([0.1, np.nan], [1, 0])
    with pytest.raises(ValueError):
        pr_auc([0.1, 0.2], [1, 2])
    with pytest.raises(ValueError):
        pr_auc([0.1], [1, 0])
