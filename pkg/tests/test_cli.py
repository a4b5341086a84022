"""End-to-end command-line coverage on a tiny synthetic corpus."""

import hashlib
from pathlib import Path

import numpy as np
import pytest

from speechcmd.cli import main
from speechcmd.dataset import load_manifest, scan_corpus
from speechcmd.dsp import load_scft
from speechcmd.evaluate import load_predictions
from speechcmd.synth import synthesize_corpus
from speechcmd.wav_io import read_wav_file


def tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            h.update(str(path.relative_to(root)).encode())
            h.update(path.read_bytes())
    return h.hexdigest()


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli") / "corpus"
    synthesize_corpus(root, n_per_class=4, seed=0, n_speakers=4)
    return root


class TestSynth:
    def test_file_counts(self, corpus):
        wavs = list(corpus.rglob("*.wav"))
        # 10 keywords * 4 + 4 unknown + 2 noise recordings
        assert len(wavs) == 46

    def test_every_file_parses_at_16k(self, corpus):
        for wav in corpus.rglob("*.wav"):
            clip = read_wav_file(wav)
            assert clip.sample_rate == 16000
            assert len(clip) > 0

    def test_scan_finds_all_classes(self, corpus):
        manifest = scan_corpus(corpus)
        counts = manifest.class_counts()
        for name in ("yes", "down", "go", "unknown"):
            assert counts[name] == 4
        assert counts["silence"] == 4  # capped at the median class count

    def test_same_seed_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        synthesize_corpus(a, n_per_class=2, seed=5, n_speakers=2, noise_seconds=3.0)
        synthesize_corpus(b, n_per_class=2, seed=5, n_speakers=2, noise_seconds=3.0)
        assert tree_digest(a) == tree_digest(b)


class TestCommands:
    def test_inspect(self, corpus, capsys):
        assert main(["inspect", "--data", str(corpus)]) == 0
        out = capsys.readouterr().out
        assert "entries: 48" in out
        assert "speakers: 4" in out

    def test_split_writes_manifest(self, corpus, tmp_path):
        out = tmp_path / "manifest.csv"
        assert main(["split", "--data", str(corpus), "--folds", "4", "--out", str(out)]) == 0
        manifest = load_manifest(out)
        assert manifest.n_folds == 4
        assert {e.fold for e in manifest.entries} == {0, 1, 2, 3}

    def test_clean_report(self, corpus, tmp_path):
        report = tmp_path / "clean.csv"
        assert main(["clean", "--data", str(corpus), "--report", str(report)]) == 0
        lines = report.read_text().strip().splitlines()
        assert lines[0] == "path,peak"
        assert len(lines) == 45  # 44 non-silence entries... header + 44 rows
        peaks = [float(line.rsplit(",", 1)[1]) for line in lines[1:]]
        assert peaks == sorted(peaks)

    def test_featurize_idempotent(self, corpus, tmp_path):
        out1, out2 = tmp_path / "f1", tmp_path / "f2"
        for out in (out1, out2):
            assert main([
                "featurize", "--data", str(corpus), "--representation", "mel",
                "--out", str(out),
            ]) == 0
        assert tree_digest(out1) == tree_digest(out2)
        files = sorted(out1.glob("*.scft"))
        assert len(files) == 48
        values, kind = load_scft(files[0])
        assert kind == "mel"
        assert values.shape == (40, 98)
        assert (out1 / "effective_config").exists()

    def test_featurize_logspec_table_resolution(self, corpus, tmp_path):
        config = tmp_path / "table.cfg"
        config.write_text(
            "[stft]\nwin_length = 480\nhop_length = 320\nfft_size = 480\n",
            encoding="utf-8",
        )
        out = tmp_path / "logspec"
        assert main([
            "featurize", "--data", str(corpus), "--representation", "logspec",
            "--out", str(out), "--config", str(config),
        ]) == 0
        values, kind = load_scft(sorted(out.glob("*.scft"))[0])
        assert kind == "log_power"
        assert values.shape == (241, 49)

    def test_featurize_wave_rank1(self, corpus, tmp_path):
        out = tmp_path / "waves"
        assert main([
            "featurize", "--data", str(corpus), "--representation", "wave",
            "--out", str(out), "--plot",
        ]) == 0
        values, kind = load_scft(sorted(out.glob("*.scft"))[0])
        assert kind == "raw"
        assert values.shape == (16384,)

    def test_augment_preview(self, corpus, tmp_path):
        source = sorted((corpus / "yes").glob("*.wav"))[0]
        noise = sorted((corpus / "_background_noise_").glob("*.wav"))[0]
        out = tmp_path / "aug.wav"
        assert main([
            "augment-preview", "--input", str(source), "--out", str(out),
            "--noise", str(noise), "--seed", "3",
        ]) == 0
        clip = read_wav_file(out)
        assert len(clip) == 16384

    def test_error_is_one_line_nonzero(self, tmp_path, capsys):
        code = main(["inspect", "--data", str(tmp_path / "missing")])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error: ")
        assert err.strip().count("\n") == 0


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory, corpus):
    """synth -> split -> train(cnn2d, 2 epochs) -> predict artifacts."""
    work = tmp_path_factory.mktemp("pipeline")
    manifest_path = work / "manifest.csv"
    assert main(["split", "--data", str(corpus), "--folds", "4", "--out", str(manifest_path)]) == 0
    model_dir = work / "model"
    assert main([
        "train", "--data", str(corpus), "--manifest", str(manifest_path),
        "--out", str(model_dir), "--model", "cnn2d", "--representation", "mfcc",
        "--fold", "0", "--epochs", "2", "--batch-size", "12", "--no-augment",
    ]) == 0
    preds = work / "preds.csv"
    assert main([
        "predict", "--checkpoint", str(model_dir / "model.scnn"), "--data", str(corpus),
        "--manifest", str(manifest_path), "--representation", "mfcc", "--out", str(preds),
    ]) == 0
    return work, manifest_path, model_dir, preds


class TestPipeline:
    def test_train_outputs(self, pipeline):
        _, _, model_dir, _ = pipeline
        assert (model_dir / "model.scnn").exists()
        metrics = (model_dir / "metrics.csv").read_text().strip().splitlines()
        assert metrics[0] == "epoch,train_loss,val_acc"
        assert len(metrics) == 3
        assert (model_dir / "effective_config").exists()

    def test_predictions_cover_manifest(self, pipeline):
        _, manifest_path, _, preds = pipeline
        rows = load_predictions(preds)
        manifest = load_manifest(manifest_path)
        assert {r.fname for r in rows} == {e.path for e in manifest.entries}
        for row in rows:
            assert row.probs is not None
            assert row.probs.sum() == pytest.approx(1.0, abs=1e-5)

    def test_ensemble_single_member_is_identity(self, pipeline, tmp_path):
        work, _, _, preds = pipeline
        out = tmp_path / "ens.csv"
        assert main(["ensemble", str(preds), "--out", str(out)]) == 0
        original = load_predictions(preds)
        averaged = load_predictions(out)
        for a, b in zip(original, averaged):
            assert a.fname == b.fname
            assert np.allclose(a.probs, b.probs, atol=1e-6)

    def test_ensemble_mismatched_files_rejected(self, pipeline, tmp_path, capsys):
        _, _, _, preds = pipeline
        trimmed = tmp_path / "partial.csv"
        lines = Path(preds).read_text().splitlines()
        trimmed.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
        code = main(["ensemble", str(preds), str(trimmed), "--out", str(tmp_path / "x.csv")])
        assert code == 1
        assert "disagree" in capsys.readouterr().err

    def test_eval_reports_accuracy(self, pipeline, tmp_path, capsys):
        _, manifest_path, _, preds = pipeline
        out_dir = tmp_path / "report"
        assert main([
            "eval", "--predictions", str(preds), "--manifest", str(manifest_path),
            "--out", str(out_dir),
        ]) == 0
        out = capsys.readouterr().out
        assert "accuracy:" in out
        assert (out_dir / "report.txt").exists()
        confusion = (out_dir / "confusion.csv").read_text().strip().splitlines()
        assert len(confusion) == 13

    def test_eval_all_correct_manifest(self, pipeline, tmp_path, capsys):
        """Feeding truth labels back in scores exactly 1.0."""
        _, manifest_path, _, _ = pipeline
        manifest = load_manifest(manifest_path)
        from speechcmd.evaluate import PredictionRow, save_predictions

        rows = [PredictionRow(fname=e.path, label=e.class_name) for e in manifest.entries]
        perfect = tmp_path / "perfect.csv"
        save_predictions(perfect, rows)
        assert main(["eval", "--predictions", str(perfect), "--manifest", str(manifest_path)]) == 0
        assert "accuracy: 1.0000" in capsys.readouterr().out
