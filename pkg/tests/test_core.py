import numpy as np
import pytest

import driftguard as dg
from driftguard.core import DataError

from conftest import binary_dataset, random_dataset, random_model


def test_zero_model_scores_zero():
    fd = dg.FeatureDictionary(["a", "b", "c"])
    model = dg.LinearModel.for_dictionary([0.0, 0.0, 0.0], 0.0, fd)
    s = dg.SparseSample(id="x", timestamp=0, label=1, indices=(0, 2))
    assert model.score(s) == 0.0


def test_hand_score():
    fd = dg.FeatureDictionary(["a", "b", "c"])
    model = dg.LinearModel.for_dictionary([1.0, -2.0, 0.5], 0.25, fd)
    s = dg.SparseSample(id="x", timestamp=0, label=1, indices=(0, 2))
    assert model.score(s) == pytest.approx(1.75, abs=0)


def test_score_matches_dense_dot_product():
    rng = np.random.default_rng(11)
    for _ in range(50):
        d = int(rng.integers(1, 40))
        dataset = random_dataset(rng, 8, d)
        model = random_model(rng, dataset)
        for s in dataset.samples:
            dense = np.zeros(d)
            dense[list(s.indices)] = 1.0
            oracle = float(np.dot(model.weights, dense) + model.bias)
            assert abs(model.score(s) - oracle) < 1e-12


def test_predict_boundary_is_positive_class():
    fd = dg.FeatureDictionary(["a"])
    m_zero = dg.LinearModel.for_dictionary([0.0], 0.0, fd)
    s = dg.SparseSample(id="x", timestamp=0, label=0, indices=())
    assert m_zero.predict(s) == 1  # score exactly 0
    assert dg.LinearModel.for_dictionary([0.0], -0.001, fd).predict(s) == 0
    assert dg.LinearModel.for_dictionary([0.0], 3.2, fd).predict(s) == 1


def test_predict_iff_score_nonnegative():
    rng = np.random.default_rng(5)
    dataset = random_dataset(rng, 60, 25)
    model = random_model(rng, dataset)
    for s in dataset.samples:
        assert model.predict(s) == (1 if model.score(s) >= 0 else 0)


def test_score_linearity_on_disjoint_index_sets():
    rng = np.random.default_rng(17)
    for _ in range(30):
        d = 30
        names = [f"f{j}" for j in range(d)]
        fd = dg.FeatureDictionary(names)
        model = dg.LinearModel.for_dictionary(rng.normal(size=d), rng.normal(), fd)
        perm = rng.permutation(d)
        cut = int(rng.integers(1, d - 1))
        a = tuple(sorted(int(j) for j in perm[:cut][: int(rng.integers(1, cut + 1))]))
        b_pool = perm[cut:]
        b = tuple(sorted(int(j) for j in b_pool[: int(rng.integers(1, len(b_pool) + 1))]))
        sa = dg.SparseSample(id="a", timestamp=0, label=0, indices=a)
        sb = dg.SparseSample(id="b", timestamp=0, label=0, indices=b)
        su = dg.SparseSample(id="u", timestamp=0, label=0, indices=tuple(sorted(a + b)))
        lhs = model.score(su) + model.bias
        rhs = model.score(sa) + model.score(sb)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_batch_scores_match_single_scores():
    rng = np.random.default_rng(3)
    dataset = random_dataset(rng, 40, 20)
    model = random_model(rng, dataset)
    batch = dg.score_dataset(model, dataset)
    singles = np.array([model.score(s) for s in dataset.samples])
    assert np.array_equal(batch, singles)
    assert np.array_equal(dg.predict_dataset(model, dataset), (singles >= 0).astype(np.int8))


def test_sample_validation():
    with pytest.raises(DataError, match="label"):
        dg.SparseSample(id="x", timestamp=0, label=2, indices=())
    with pytest.raises(DataError, match="strictly increasing"):
        dg.SparseSample(id="x", timestamp=0, label=0, indices=(3, 1))
    with pytest.raises(DataError, match="strictly increasing"):
        dg.SparseSample(id="x", timestamp=0, label=0, indices=(1, 1))
    with pytest.raises(DataError, match="negative"):
        dg.SparseSample(id="x", timestamp=0, label=0, indices=(-1, 2))


def test_dataset_rejects_out_of_range_index():
    fd = dg.FeatureDictionary(["a", "b"])
    bad = dg.SparseSample(id="s9", timestamp=0, label=0, indices=(0, 5))
    with pytest.raises(DataError, match=r"s9.*5.*d=2"):
        dg.Dataset(fd, [bad])


def test_score_error_names_sample_and_dimension():
    fd = dg.FeatureDictionary(["a", "b"])
    model = dg.LinearModel.for_dictionary([1.0, 1.0], 0.0, fd)
    rogue = dg.SparseSample(id="rogue", timestamp=0, label=0, indices=(4,))
    with pytest.raises(DataError, match=r"rogue.*4.*d=2"):
        model.score(rogue)


def test_dictionary_validation_and_fingerprint():
    with pytest.raises(DataError, match="duplicate"):
        dg.FeatureDictionary(["a", "a"])
    with pytest.raises(DataError, match="name"):
        dg.FeatureDictionary(["ok", "bad\tname"])
    fd1 = dg.FeatureDictionary(["a", "b"])
    fd2 = dg.FeatureDictionary(["a", "b"])
    fd3 = dg.FeatureDictionary(["b", "a"])
    assert fd1.fingerprint == fd2.fingerprint
    assert fd1.fingerprint != fd3.fingerprint
    assert fd1.index_of("b") == 1
    with pytest.raises(DataError):
        fd1.index_of("zzz")


def test_model_requires_finite_parameters():
    fd = dg.FeatureDictionary(["a"])
    with pytest.raises(DataError, match="finite"):
        dg.LinearModel.for_dictionary([np.inf], 0.0, fd)
    with pytest.raises(DataError, match="finite"):
        dg.LinearModel.for_dictionary([0.0], float("nan"), fd)
    with pytest.raises(DataError, match="does not match"):
        dg.LinearModel.for_dictionary([0.0, 1.0], 0.0, fd)


def test_fingerprint_mismatch_rejected_by_batch_ops():
    ds = binary_dataset([[0], [1]], [0, 1])
    other = dg.FeatureDictionary(["x", "y"])
    model = dg.LinearModel.for_dictionary([1.0, 1.0], 0.0, other)
    with pytest.raises(DataError, match="mismatch"):
        dg.score_dataset(model, ds)


def test_dataset_basic_properties_and_subset():
    ds = binary_dataset([[0], [0, 1], []], [1, 0, 1], timestamps=[30, 10, 20])
    assert ds.n == 3
    assert ds.t_min == 10 and ds.t_max == 30
    assert ds.class_counts() == (1, 2)
    sub = ds.subset([True, False, True])
    assert [s.id for s in sub.samples] == ["s0", "s2"]
    assert sub.dictionary is ds.dictionary
    empty = binary_dataset([], [], d=2)
    with pytest.raises(DataError, match="empty"):
        _ = empty.t_min


def test_csr_arrays_are_readonly():
    ds = binary_dataset([[0], [1]], [0, 1])
    with pytest.raises(ValueError):
        ds.labels[0] = 1
    model = random_model(np.random.default_rng(0), ds)
    with pytest.raises(ValueError):
        model.weights[0] = 5.0
