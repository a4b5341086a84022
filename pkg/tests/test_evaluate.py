"""Prediction combination, thresholding, and metrics."""

import numpy as np
import pytest

from speechcmd.evaluate import (
    Prediction,
    PredictionRow,
    accuracy,
    apply_unknown_threshold,
    confusion_matrix,
    ensemble_mean,
    load_predictions,
    majority_vote,
    predict,
    predict_batch,
    save_predictions,
)
from speechcmd.nn import ModelSpec, build_network, layer_spec


def onehot(i, value=1.0):
    p = np.zeros(12, np.float32)
    p[i] = value
    return p


def tiny_model():
    spec = ModelSpec(
        input_shape=(1, 8),
        layers=[layer_spec("flatten"), layer_spec("dense", units=12)],
    )
    return build_network(spec, seed=1)


class TestPredict:
    def test_probs_sum_to_one(self):
        model = tiny_model()
        x = np.random.default_rng(0).normal(size=(1, 8)).astype(np.float32)
        pred = predict(model, x)
        assert pred.probs.sum() == pytest.approx(1.0, abs=1e-6)
        assert np.all(pred.probs >= 0)

    def test_deterministic(self):
        model = tiny_model()
        x = np.random.default_rng(1).normal(size=(1, 8)).astype(np.float32)
        a, b = predict(model, x), predict(model, x)
        assert np.array_equal(a.probs, b.probs)

    def test_batch_matches_single(self):
        model = tiny_model()
        x = np.random.default_rng(2).normal(size=(3, 1, 8)).astype(np.float32)
        singles = [predict(model, x[i]) for i in range(3)]
        batched = predict_batch(model, x)
        for s, b in zip(singles, batched):
            assert np.allclose(s.probs, b.probs, atol=1e-7)

    def test_argmax_tie_breaks_low_index(self):
        pred = Prediction(probs=np.full(12, 1 / 12, np.float32))
        assert pred.argmax == 0


class TestEnsembleMean:
    def test_single_member_identity(self):
        member = Prediction(probs=onehot(3), source_model="a")
        out = ensemble_mean([member])
        assert np.allclose(out.probs, member.probs)

    def test_hand_mean(self):
        out = ensemble_mean(
            [Prediction(probs=onehot(0), source_model="a"),
             Prediction(probs=onehot(1), source_model="b")]
        )
        expected = np.zeros(12)
        expected[0] = expected[1] = 0.5
        assert np.allclose(out.probs, expected)

    def test_sum_preserved(self):
        rng = np.random.default_rng(3)
        members = []
        for name in "abc":
            raw = rng.uniform(0.1, 1.0, 12)
            members.append(Prediction(probs=(raw / raw.sum()).astype(np.float32), source_model=name))
        out = ensemble_mean(members)
        assert out.probs.sum() == pytest.approx(1.0, abs=1e-6)

    def test_member_order_invariance(self):
        rng = np.random.default_rng(4)
        members = []
        for name in ("m1", "m2", "m3", "m4"):
            raw = rng.uniform(0.0, 1.0, 12)
            members.append(Prediction(probs=(raw / raw.sum()).astype(np.float32), source_model=name))
        reference = ensemble_mean(members)
        for _ in range(5):
            shuffled = list(members)
            rng.shuffle(shuffled)
            out = ensemble_mean(shuffled)
            assert np.abs(out.probs - reference.probs).max() < 1e-7

    def test_argmax_invariant_under_uniform_rescale(self):
        rng = np.random.default_rng(5)
        members = [Prediction(probs=rng.uniform(0, 1, 12).astype(np.float32), source_model=n)
                   for n in "ab"]
        base = ensemble_mean(members).argmax
        scaled = [Prediction(probs=m.probs * 0.25, source_model=m.source_model) for m in members]
        assert ensemble_mean(scaled).argmax == base

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ensemble_mean([])


class TestMajorityVote:
    def test_count_wins(self):
        down, up = 3, 2
        preds = [Prediction(probs=onehot(down)), Prediction(probs=onehot(down)),
                 Prediction(probs=onehot(up))]
        assert majority_vote(preds) == down

    def test_single_member(self):
        assert majority_vote([Prediction(probs=onehot(7))]) == 7

    def test_tie_broken_by_summed_probability(self):
        up_strong = Prediction(probs=onehot(2, 0.9))
        down_weak = Prediction(probs=onehot(3, 0.8))
        assert majority_vote([up_strong, down_weak]) == 2

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            majority_vote([])


class TestUnknownThreshold:
    def _pred(self, unknown_p, runner_up_index, runner_up_p):
        probs = np.full(12, (1 - unknown_p - runner_up_p) / 10, np.float32)
        probs[11] = unknown_p
        probs[runner_up_index] = runner_up_p
        return Prediction(probs=probs)

    def test_tau_zero_is_argmax(self):
        pred = self._pred(0.3, 3, 0.28)
        assert apply_unknown_threshold(pred, 0.0) == 11

    def test_weak_unknown_redirects_to_runner_up(self):
        pred = self._pred(0.3, 3, 0.28)
        assert apply_unknown_threshold(pred, 0.4) == 3

    def test_non_unknown_argmax_unchanged(self):
        pred = Prediction(probs=onehot(4, 0.9))
        for tau in (0.0, 0.5, 1.0):
            assert apply_unknown_threshold(pred, tau) == 4

    def test_invalid_tau(self):
        with pytest.raises(ValueError):
            apply_unknown_threshold(Prediction(probs=onehot(0)), 1.5)


class TestMetrics:
    def test_all_correct(self):
        pairs = [(i, i) for i in range(12)]
        assert accuracy(pairs) == 1.0
        matrix = confusion_matrix(pairs)
        assert np.array_equal(matrix, np.eye(12, dtype=np.int64))

    def test_hand_counts(self):
        pairs = [(0, 0), (0, 1), (1, 1)]
        assert accuracy(pairs) == pytest.approx(2 / 3)
        matrix = confusion_matrix(pairs)
        assert matrix[0][1] == 1
        assert matrix.sum() == 3

    def test_row_sums_are_true_counts(self):
        rng = np.random.default_rng(6)
        pairs = [(int(rng.integers(0, 12)), int(rng.integers(0, 12))) for _ in range(200)]
        matrix = confusion_matrix(pairs)
        for c in range(12):
            assert matrix[c].sum() == sum(1 for t, _ in pairs if t == c)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            confusion_matrix([(0, 12)])


class TestPredictionsCsv:
    def test_round_trip_with_probs(self, tmp_path):
        rng = np.random.default_rng(7)
        rows = []
        for i in range(5):
            raw = rng.uniform(0, 1, 12)
            rows.append(PredictionRow(fname=f"clip_{i}.wav", label="down",
                                      probs=(raw / raw.sum()).astype(np.float32)))
        path = tmp_path / "preds.csv"
        save_predictions(path, rows)
        loaded = load_predictions(path)
        assert [r.fname for r in loaded] == [r.fname for r in rows]
        for a, b in zip(rows, loaded):
            assert np.allclose(a.probs, b.probs, atol=1e-6)

    def test_round_trip_label_only(self, tmp_path):
        rows = [PredictionRow(fname="a.wav", label="yes")]
        path = tmp_path / "preds.csv"
        save_predictions(path, rows)
        loaded = load_predictions(path)
        assert loaded[0].label == "yes"
        assert loaded[0].probs is None
