"""Training loop determinism, Adam sanity, divergence, checkpoints."""

import numpy as np
import pytest

from speechcmd.dataset import CLASS_NAMES, Manifest, ManifestEntry
from speechcmd.nn import (
    DivergedLoss,
    ModelSpec,
    Param,
    build_network,
    build_vgg1d,
    layer_spec,
)
from speechcmd.training import (
    Adam,
    TrainConfig,
    checkpoint_from_bytes,
    checkpoint_to_bytes,
    load_checkpoint,
    save_checkpoint,
    train,
)


def toy_manifest(per_class=3, folds=2):
    entries = []
    for c in range(12):
        for j in range(per_class):
            entries.append(
                ManifestEntry(
                    path=f"{c}/{j}", raw_label=CLASS_NAMES[c], class_index=c,
                    speaker_id=f"s{c}_{j}", fold=j % folds,
                )
            )
    return Manifest(entries=entries, n_folds=folds)


def toy_feature_fn(entry, rng=None):
    """Deterministic class-coded features: a noisy one-hot ramp."""
    gen = np.random.default_rng(hash(entry.path) % (2**32))
    x = gen.normal(0.0, 0.1, 24).astype(np.float32)
    x[entry.class_index * 2] += 2.0
    return x[None, :]  # (1, 24)


def toy_model_spec():
    return ModelSpec(
        input_shape=(1, 24),
        layers=[
            layer_spec("conv1d", out=4, kernel=3, stride=1),
            layer_spec("relu"),
            layer_spec("flatten"),
            layer_spec("dense", units=12),
        ],
    )


class TestAdam:
    def test_quadratic_descent(self):
        p = Param(np.array([3.0]))
        opt = Adam([p], lr=0.1)
        loss_before = float(p.value[0] ** 2)
        p.grad = 2.0 * p.value
        opt.step()
        assert float(p.value[0] ** 2) < loss_before

    def test_lr_zero_is_noop(self):
        p = Param(np.array([1.5, -2.0]))
        original = p.value.copy()
        opt = Adam([p], lr=0.0)
        for _ in range(10):
            p.grad = np.array([0.3, -0.7])
            opt.step()
        assert np.array_equal(p.value, original)


class TestTrainLoop:
    def test_lr_zero_parameters_unchanged(self):
        model = build_network(toy_model_spec(), seed=0)
        before = [a.copy() for a in model.state_arrays()]
        hyper = TrainConfig(epochs=2, batch_size=12, learning_rate=0.0, seed=1)
        train(model, toy_manifest(), fold_out=-1, feature_fn=toy_feature_fn, hyper=hyper)
        # weights and biases identical; only batchnorm buffers may move (none here)
        for arr, orig in zip(model.state_arrays(), before):
            assert np.array_equal(arr, orig)

    def test_same_seed_identical_loss_curves(self):
        histories = []
        for _ in range(2):
            model = build_network(toy_model_spec(), seed=0)
            hyper = TrainConfig(epochs=3, batch_size=12, seed=7)
            result = train(model, toy_manifest(), fold_out=1, feature_fn=toy_feature_fn, hyper=hyper)
            histories.append([r["train_loss"] for r in result.history])
        assert histories[0] == histories[1]

    def test_overfits_toy_data(self):
        model = build_network(toy_model_spec(), seed=0)
        hyper = TrainConfig(epochs=60, batch_size=12, seed=3, early_stop_train_acc=1.0)
        result = train(model, toy_manifest(), fold_out=-1, feature_fn=toy_feature_fn, hyper=hyper)
        assert result.history[-1]["train_acc"] == 1.0
        assert result.epochs_run <= 60

    def test_val_accuracy_recorded_and_best_restored(self):
        model = build_network(toy_model_spec(), seed=0)
        hyper = TrainConfig(epochs=5, batch_size=12, seed=5)
        result = train(model, toy_manifest(), fold_out=1, feature_fn=toy_feature_fn, hyper=hyper)
        val_accs = [r["val_acc"] for r in result.history]
        assert len(val_accs) == 5
        assert result.best_val_acc == max(val_accs)
        assert result.history[result.best_epoch]["val_acc"] == result.best_val_acc

    @pytest.mark.filterwarnings("ignore:invalid value")
    def test_diverged_loss_detected(self):
        def exploding_features(entry, rng=None):
            x = toy_feature_fn(entry)
            return x * np.float32(np.inf)

        model = build_network(toy_model_spec(), seed=0)
        hyper = TrainConfig(epochs=1, batch_size=12, seed=0)
        with pytest.raises(DivergedLoss):
            train(model, toy_manifest(), fold_out=-1, feature_fn=exploding_features, hyper=hyper)


class TestCheckpoints:
    def test_round_trip_bytes(self):
        model = build_network(toy_model_spec(), seed=4)
        restored = checkpoint_from_bytes(checkpoint_to_bytes(model))
        assert restored.spec == model.spec
        for a, b in zip(model.state_arrays(), restored.state_arrays()):
            assert np.array_equal(a, b)

    def test_round_trip_file_predictions_identical(self, tmp_path):
        model = build_network(build_vgg1d(1), seed=2)
        x = np.random.default_rng(0).normal(size=(2, 1, 16384)).astype(np.float32)
        before = model.forward(x, training=False)
        path = tmp_path / "model.scnn"
        save_checkpoint(path, model)
        restored = load_checkpoint(path)
        after = restored.forward(x, training=False)
        assert np.array_equal(before, after)

    def test_header_layout(self):
        model = build_network(toy_model_spec(), seed=0)
        blob = checkpoint_to_bytes(model)
        assert blob[:4] == b"SCNN"
        assert blob[4] == 1

    def test_truncated_rejected(self):
        model = build_network(toy_model_spec(), seed=0)
        blob = checkpoint_to_bytes(model)
        with pytest.raises(ValueError):
            checkpoint_from_bytes(blob[:-8])
