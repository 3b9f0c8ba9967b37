import numpy as np
import pytest

import driftguard as dg
from driftguard.core import DataError
from driftguard.drift import DriftConfig
from driftguard.evaluation import (SplitSpec, _partial_auc_from_scores, decay_slope,
                                   evaluate_slots, partial_auc, slot_confusion,
                                   temporal_split)

from conftest import binary_dataset, random_dataset, random_model


# --- temporal_split ---------------------------------------------------------------

def test_split_rejects_boundary_outside_span():
    ds = binary_dataset([[0]] * 4, [1, 0, 1, 0], timestamps=[1, 2, 3, 4])
    with pytest.raises(DataError, match="training side is empty"):
        temporal_split(ds, SplitSpec(1))
    with pytest.raises(DataError, match="test side is empty"):
        temporal_split(ds, SplitSpec(5))


def test_split_hand_case():
    ds = binary_dataset([[0]] * 4, [1, 0, 1, 0], timestamps=[1, 2, 3, 4])
    train, test = temporal_split(ds, SplitSpec(3))
    assert [s.timestamp for s in train.samples] == [1, 2]
    assert [s.timestamp for s in test.samples] == [3, 4]


def test_split_partition_property():
    rng = np.random.default_rng(12)
    for _ in range(20):
        ds = random_dataset(rng, int(rng.integers(4, 60)), 5, t_span=100)
        boundary = int(rng.integers(ds.t_min + 1, ds.t_max + 1))
        try:
            train, test = temporal_split(ds, SplitSpec(boundary))
        except DataError:
            continue  # empty side for this draw
        assert train.n + test.n == ds.n
        assert max(s.timestamp for s in train.samples) < boundary
        assert min(s.timestamp for s in test.samples) >= boundary
        ids = sorted(s.id for s in train.samples) + sorted(s.id for s in test.samples)
        assert sorted(ids) == sorted(s.id for s in ds.samples)


# --- slot_confusion ------------------------------------------------------------------

def test_perfect_slot_metrics():
    ds = binary_dataset([[0], []], [1, 0], timestamps=[0, 1], d=1)
    model = dg.LinearModel.for_dictionary([1.0], -0.5, ds.dictionary)
    (m,) = slot_confusion(model, ds, DriftConfig(slot_mode="fixed", dt_seconds=10))
    assert (m.tp, m.fp, m.fn, m.tn) == (1, 0, 0, 1)
    assert m.precision == 1.0 and m.recall == 1.0


def test_slot_without_positives_has_undefined_recall():
    ds = binary_dataset([[0], [0]], [0, 0], timestamps=[0, 1], d=1)
    model = dg.LinearModel.for_dictionary([-1.0], 0.0, ds.dictionary)
    # predictions all negative -> no positive predictions either
    (m,) = slot_confusion(model, ds, DriftConfig(slot_mode="fixed", dt_seconds=10))
    assert m.recall is None and m.precision is None
    assert m.n_pos == 0 and m.tn == 2


def test_slot_confusion_matches_per_sample_loop():
    rng = np.random.default_rng(10)
    for _ in range(10):
        ds = random_dataset(rng, 80, 12, t_span=300)
        model = random_model(rng, ds)
        cfg = DriftConfig(slot_mode="fixed", dt_seconds=60)
        metrics = slot_confusion(model, ds, cfg)
        from driftguard.drift import slot_layout
        layout = slot_layout(ds, cfg)
        for m in metrics:
            tp = fp = fn = tn = 0
            for i, s in enumerate(ds.samples):
                if layout.slot_ids[i] != m.slot:
                    continue
                pred = model.predict(s)
                tp += s.label == 1 and pred == 1
                fp += s.label == 0 and pred == 1
                fn += s.label == 1 and pred == 0
                tn += s.label == 0 and pred == 0
            assert (m.tp, m.fp, m.fn, m.tn) == (tp, fp, fn, tn)
            assert m.tp + m.fp + m.fn + m.tn == m.n_pos + m.n_neg


# --- partial AUC -----------------------------------------------------------------------

def _pairwise_auc(pos, neg):
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def test_perfect_separator_is_one_at_any_cap():
    pos = np.array([2.0, 3.0, 4.0])
    neg = np.array([-1.0, 0.0, 1.0])
    for cap in (0.01, 0.05, 0.5, 1.0):
        assert _partial_auc_from_scores(pos, neg, cap) == pytest.approx(1.0, abs=1e-12)


def test_hand_case_cap_half():
    # pos {2, 1}, neg {1.5, 0}: ROC (0,0)->(0,.5)->(.5,.5)->(.5,1)->(1,1)
    # area to fpr 0.5 = 0.25; normalized by cap -> 0.5
    value = _partial_auc_from_scores(np.array([2.0, 1.0]), np.array([1.5, 0.0]), 0.5)
    assert value == pytest.approx(0.5, abs=1e-12)


def test_all_tied_scores_give_half():
    value = _partial_auc_from_scores(np.array([1.0, 1.0]), np.array([1.0]), 1.0)
    assert value == pytest.approx(0.5, abs=1e-12)


def test_full_cap_equals_pairwise_auc():
    rng = np.random.default_rng(44)
    for _ in range(30):
        # integer score grid forces ties
        pos = rng.integers(0, 6, size=int(rng.integers(1, 25))).astype(float)
        neg = rng.integers(0, 6, size=int(rng.integers(1, 25))).astype(float)
        assert _partial_auc_from_scores(pos, neg, 1.0) == pytest.approx(
            _pairwise_auc(pos, neg), abs=1e-9)


def test_random_scores_concentrate_near_half_cap():
    rng = np.random.default_rng(14)
    pos = rng.random(4000)
    neg = rng.random(4000)
    # label-independent scores: normalized pAUC at cap c concentrates near c/2
    assert _partial_auc_from_scores(pos, neg, 0.05) == pytest.approx(0.025, abs=0.02)
    assert _partial_auc_from_scores(pos, neg, 1.0) == pytest.approx(0.5, abs=0.02)


def test_unnormalized_area_monotone_in_cap():
    rng = np.random.default_rng(9)
    pos = rng.normal(0.4, 1, 60)
    neg = rng.normal(-0.4, 1, 60)
    caps = np.linspace(0.02, 1.0, 25)
    raw = [cap * _partial_auc_from_scores(pos, neg, cap) for cap in caps]
    assert all(b >= a - 1e-12 for a, b in zip(raw, raw[1:]))


def test_partial_auc_requires_both_classes_and_valid_cap():
    ds = binary_dataset([[0], [0]], [1, 1], d=1)
    model = dg.LinearModel.for_dictionary([1.0], 0.0, ds.dictionary)
    with pytest.raises(DataError, match="both classes"):
        partial_auc(model, ds, 0.05)
    both = binary_dataset([[0], []], [1, 0], d=1)
    model2 = dg.LinearModel.for_dictionary([1.0], 0.0, both.dictionary)
    with pytest.raises(DataError, match="fpr_cap"):
        partial_auc(model2, both, 0.0)
    with pytest.raises(DataError, match="fpr_cap"):
        partial_auc(model2, both, 1.2)


def test_partial_auc_model_surface():
    ds = binary_dataset([[0], [0, 1], [1], []], [1, 1, 0, 0], d=2)
    model = dg.LinearModel.for_dictionary([2.0, -1.0], 0.0, ds.dictionary)
    # scores: pos {2, 1}, neg {-1, 0} -> perfect
    assert partial_auc(model, ds, 0.05) == pytest.approx(1.0)


def test_evaluate_slots_adds_pauc_only_when_both_classes():
    ds = binary_dataset([[0], [], [0]], [1, 0, 1], timestamps=[0, 1, 10], d=1)
    model = dg.LinearModel.for_dictionary([1.0], -0.5, ds.dictionary)
    metrics = evaluate_slots(model, ds, DriftConfig(slot_mode="fixed", dt_seconds=5), 0.5)
    assert metrics[0].pauc is not None
    assert metrics[1].pauc is None  # slot 1 holds only the positive at t=10


# --- decay_slope -----------------------------------------------------------------------

def test_decay_slope_flat_and_exact_line():
    assert decay_slope([(0, 0.5), (1, 0.5), (2, 0.5)]) == 0.0
    assert decay_slope([(0, 0.8), (1, 0.6), (2, 0.4)]) == pytest.approx(-0.2, abs=1e-12)


def test_decay_slope_skips_undefined_points():
    series = [(0, 0.9), (1, None), (2, 0.7), (3, None), (4, 0.5)]
    assert decay_slope(series) == pytest.approx(-0.1, abs=1e-12)


def test_decay_slope_needs_two_points():
    with pytest.raises(DataError):
        decay_slope([(0, 0.5)])
    with pytest.raises(DataError):
        decay_slope([(0, None), (1, None)])


def test_decay_slope_matches_normal_equations():
    rng = np.random.default_rng(18)
    for _ in range(20):
        ks = np.arange(12)
        vs = rng.random(12)
        design = np.column_stack([np.ones(12), ks])
        coef = np.linalg.solve(design.T @ design, design.T @ vs)
        assert decay_slope(list(zip(ks, vs))) == pytest.approx(coef[1], abs=1e-9)
