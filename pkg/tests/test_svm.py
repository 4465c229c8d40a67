"""From-scratch SVM: decision function, trainer determinism, descent."""

import numpy as np
import pytest

from adaptcha.analysis.features import FeatureVector
from adaptcha.analysis.svm import (
    DatasetError,
    ModelFormatError,
    SvmModel,
    SvmTrainConfig,
    hinge_loss,
    load_model,
    save_model,
    svm_decision,
    train_svm,
)
from adaptcha.rng import SplitMix64


def fv(a, s, m, c):
    return FeatureVector(a, s, m, c)


def separable_clusters(n_per_class=100, seed=0, margin=2.0):
    """Two gaussian blobs separated well beyond their spread."""
    rng = SplitMix64(seed)
    data = []
    for _ in range(n_per_class):
        data.append((fv(0.5 + rng.next_gauss(0, 0.08), 0.3 + rng.next_gauss(0, 0.05),
                        900 + rng.next_gauss(0, 120), 5 + rng.next_below(3)), +1))
        data.append((fv(0.05 + rng.next_gauss(0, 0.015), 0.01 + abs(rng.next_gauss(0, 0.004)),
                        150 + rng.next_gauss(0, 40), 3 + rng.next_below(3)), -1))
    return data


def accuracy(model, data):
    return sum(1 for x, y in data if (1 if svm_decision(model, x) > 0 else -1) == y) / len(data)


class TestDecision:
    def test_zero_model_scores_zero(self):
        model = SvmModel.zero()
        assert svm_decision(model, fv(1, 2, 3, 4)) == 0.0

    def test_hand_evaluated_case(self):
        model = SvmModel(
            w=np.array([1.0, 0.0, 0.0, 0.0]), b=-1.0,
            feature_means=np.zeros(4), feature_stds=np.ones(4),
        )
        assert svm_decision(model, fv(2.0, 9.0, 9.0, 9.0)) == pytest.approx(1.0)

    def test_standardization_cancels_common_scaling(self):
        rng = SplitMix64(7)
        w = np.array([0.5, -1.2, 0.3, 0.9])
        means = np.array([0.2, 0.1, 800.0, 4.0])
        stds = np.array([0.1, 0.05, 300.0, 1.5])
        m1 = SvmModel(w=w, b=0.37, feature_means=means, feature_stds=stds)
        for _ in range(20):
            c = 0.1 + rng.next_float() * 10
            x = [0.4, 0.2, 700.0, 5.0]
            m2 = SvmModel(w=w, b=0.37, feature_means=means * c, feature_stds=stds * c)
            scaled = FeatureVector.from_list([v * c for v in x])
            assert svm_decision(m2, scaled) == pytest.approx(
                svm_decision(m1, FeatureVector.from_list(x)), abs=1e-12
            )


class TestTraining:
    def test_separable_set_high_accuracy(self):
        data = separable_clusters()
        model = train_svm(data, SvmTrainConfig(seed=1))
        assert accuracy(model, data) >= 0.99

    def test_label_flip_reverses_every_sign(self):
        data = separable_clusters(n_per_class=60, seed=3)
        flipped = [(x, -y) for x, y in data]
        m1 = train_svm(data, SvmTrainConfig(seed=5))
        m2 = train_svm(flipped, SvmTrainConfig(seed=5))
        for x, _ in data:
            s1, s2 = svm_decision(m1, x), svm_decision(m2, x)
            assert (s1 > 0) == (s2 < 0) or (s1 == 0 and s2 == 0)

    def test_same_seed_same_model(self):
        data = separable_clusters(seed=9)
        m1 = train_svm(data, SvmTrainConfig(seed=11))
        m2 = train_svm(data, SvmTrainConfig(seed=11))
        assert np.array_equal(m1.w, m2.w) and m1.b == m2.b

    def test_input_order_irrelevant_given_seed(self):
        data = separable_clusters(n_per_class=50, seed=2)
        permuted = list(reversed(data))
        m1 = train_svm(data, SvmTrainConfig(seed=13))
        m2 = train_svm(permuted, SvmTrainConfig(seed=13))
        assert np.array_equal(m1.w, m2.w) and m1.b == m2.b
        assert np.array_equal(m1.feature_means, m2.feature_means)

    def test_different_seed_different_model(self):
        data = separable_clusters(n_per_class=50, seed=2)
        m1 = train_svm(data, SvmTrainConfig(seed=1))
        m2 = train_svm(data, SvmTrainConfig(seed=2))
        assert not np.array_equal(m1.w, m2.w)

    def test_hinge_loss_mostly_non_increasing_per_epoch(self):
        data = separable_clusters(n_per_class=100, seed=4)
        cfg = SvmTrainConfig(seed=8)
        losses = []
        for epochs in range(1, 21):
            model = train_svm(data, SvmTrainConfig(lam=cfg.lam, epochs=epochs, eta0=cfg.eta0, seed=cfg.seed))
            losses.append(hinge_loss(model, data, cfg.lam))
        drops = sum(1 for a, b in zip(losses, losses[1:]) if b <= a + 1e-12)
        assert drops / (len(losses) - 1) >= 0.95

    def test_single_class_rejected(self):
        data = [(fv(1, 1, 1, 1), 1)] * 20
        with pytest.raises(DatasetError):
            train_svm(data)

    def test_too_small_rejected(self):
        data = [(fv(1, 1, 1, 1), 1), (fv(0, 0, 0, 0), -1)]
        with pytest.raises(DatasetError):
            train_svm(data)

    def test_zero_variance_feature_clamped_with_warning(self):
        rng = SplitMix64(6)
        data = []
        for _ in range(30):
            data.append((fv(0.5 + rng.next_gauss(0, 0.1), 0.3, 900 + rng.next_gauss(0, 50), 4.0), +1))
            data.append((fv(0.05 + rng.next_gauss(0, 0.01), 0.3, 100 + rng.next_gauss(0, 20), 4.0), -1))
        with pytest.warns(UserWarning, match="zero-variance"):
            model = train_svm(data, SvmTrainConfig(seed=2))
        assert np.all(model.feature_stds > 0)


class TestModelFile:
    def test_round_trip(self):
        model = train_svm(separable_clusters(n_per_class=30, seed=1), SvmTrainConfig(seed=3))
        again = load_model(save_model(model))
        assert np.array_equal(again.w, model.w)
        assert again.b == model.b
        assert np.array_equal(again.feature_means, model.feature_means)
        assert again.metadata["seed"] == 3

    @pytest.mark.parametrize("data", [b"", b"{}", b"junk", b'{"format": "other"}'])
    def test_malformed_rejected(self, data):
        with pytest.raises(ModelFormatError):
            load_model(data)
