"""Config defaults, file parsing, precedence, and the effective echo."""

import numpy as np
import pytest

from speechcmd.config import ToolkitConfig, load_config, write_effective_config
from speechcmd.features import FeatureExtractor, feature_map_values, feature_shape, input_length
from speechcmd.viz import render_ppm


class TestConfig:
    def test_defaults_are_valid(self):
        cfg = ToolkitConfig()
        cfg.stft_config()
        cfg.augment_config()
        cfg.train_config()

    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "toolkit.cfg"
        path.write_text(
            "[stft]\nwin_length = 480\nhop_length = 320\nfft_size = 480\n"
            "[augment]\nspeed_max = 1.2\nseed = 9\n",
            encoding="utf-8",
        )
        cfg = load_config(path)
        assert cfg.win_length == 480
        assert cfg.fft_size == 480
        assert cfg.speed_max == 1.2
        assert cfg.augment_seed == 9
        assert cfg.hop_length == 320

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "toolkit.cfg"
        path.write_text("[run]\nseed = 5\n", encoding="utf-8")
        cfg = load_config(path, overrides={"seed": 11, "epochs": None})
        assert cfg.seed == 11
        assert cfg.epochs == 30  # None override ignored

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "toolkit.cfg"
        path.write_text("[stft]\nbogus = 1\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_config(path)

    def test_round_trip_through_text(self, tmp_path):
        cfg = ToolkitConfig(win_length=480, fft_size=480, hop_length=320, n_mels=32, seed=7)
        path = tmp_path / "echo.cfg"
        path.write_text(cfg.to_text(), encoding="utf-8")
        again = load_config(path)
        assert again == cfg

    def test_effective_config_written(self, tmp_path):
        cfg = ToolkitConfig(seed=3)
        write_effective_config(cfg, tmp_path / "out")
        text = (tmp_path / "out" / "effective_config").read_text(encoding="utf-8")
        assert "seed = 3" in text
        assert "[stft]" in text


class TestFeatureShapes:
    def test_wave_shape(self):
        assert feature_shape(ToolkitConfig(), "wave") == (1, 16384)

    def test_map_shapes_match_computed(self):
        cfg = ToolkitConfig()
        rng = np.random.default_rng(0)
        for representation in ("logspec", "db", "mel", "mfcc"):
            samples = rng.normal(size=input_length(cfg, representation)) * 0.1
            values = feature_map_values(samples, cfg, representation)
            assert (1,) + values.shape == feature_shape(cfg, representation)

    def test_2d_inputs_use_nominal_second(self):
        cfg = ToolkitConfig()
        assert input_length(cfg, "wave") == 16384
        assert input_length(cfg, "mel") == 16000
        # the reference resolutions come from the nominal clip length
        table = ToolkitConfig(win_length=480, hop_length=320, fft_size=480)
        assert feature_shape(table, "logspec") == (1, 241, 49)

    def test_unknown_representation(self):
        with pytest.raises(ValueError):
            feature_shape(ToolkitConfig(), "cepstrum")

    def test_off_rate_files_rejected_not_resampled(self, tmp_path):
        from speechcmd.dataset import ManifestEntry
        from speechcmd.wav_io import AudioClip, write_wav_file

        path = tmp_path / "slow.wav"
        write_wav_file(path, AudioClip(samples=np.zeros(8000, np.float32), sample_rate=8000))
        extractor = FeatureExtractor(ToolkitConfig(), "wave", tmp_path)
        entry = ManifestEntry(path="slow.wav", raw_label="down", class_index=3, speaker_id="s")
        with pytest.raises(ValueError, match="8000"):
            extractor(entry)


class TestPpm:
    def test_header_and_size(self):
        data = render_ppm(np.random.default_rng(0).normal(size=(40, 98)))
        assert data.startswith(b"P6\n98 40\n255\n")
        assert len(data) == len(b"P6\n98 40\n255\n") + 40 * 98 * 3

    def test_flat_map_renders(self):
        data = render_ppm(np.zeros((4, 4)))
        assert len(data) == len(b"P6\n4 4\n255\n") + 48

    def test_deterministic(self):
        values = np.random.default_rng(1).normal(size=(10, 10))
        assert render_ppm(values) == render_ppm(values)
