"""Glue between the corpus and the networks: per-entry feature tensors.

A feature function maps a manifest entry to one model-ready input array,
optionally running the waveform augmentation chain first. Silence
entries (background-noise fragments) only get the length fix by
default, since mixing noise into noise is pointless.

Length handling differs by representation: the raw `wave` input is
padded/cropped to the 1D networks' 16384-sample input, while 2D maps
are computed over the nominal one-second clip length (16000 samples at
16 kHz), which is what yields the reference 241x49 / 129x124
spectrogram resolutions.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from .augment import augment_pipeline, fix_length
from .config import ToolkitConfig
from .dataset import (
    BACKGROUND_SPEAKER,
    FRAGMENT_MARK,
    Manifest,
    ManifestEntry,
    SILENCE_INDEX,
    load_entry_clip,
)
from .dsp import log_spectrogram, mel_spectrogram, mfcc, power_to_db, stft
from .wav_io import AudioClip, read_wav_file

REPRESENTATIONS = ("wave", "logspec", "db", "mel", "mfcc")


def input_length(cfg: ToolkitConfig, representation: str) -> int:
    """Samples a clip is padded/cropped to before feature computation."""
    if representation == "wave":
        return cfg.target_length
    return int(round(cfg.fragment_seconds * cfg.sample_rate))


def feature_shape(cfg: ToolkitConfig, representation: str) -> tuple[int, ...]:
    """Shape of one feature tensor (without the batch axis)."""
    if representation == "wave":
        return (1, cfg.target_length)
    frames = 1 + (input_length(cfg, representation) - cfg.win_length) // cfg.hop_length
    if representation in ("logspec", "db"):
        return (1, cfg.fft_size // 2 + 1, frames)
    if representation == "mel":
        return (1, cfg.n_mels, frames)
    if representation == "mfcc":
        return (1, cfg.n_coeffs, frames)
    raise ValueError(f"unknown representation {representation!r}")


def feature_map_values(samples: np.ndarray, cfg: ToolkitConfig, representation: str) -> np.ndarray:
    """Compute the 2D map (or 1D wave vector) for fixed-length samples."""
    if representation == "wave":
        return np.asarray(samples, dtype=np.float32)
    stft_cfg = cfg.stft_config()
    if representation == "logspec":
        return log_spectrogram(samples, stft_cfg).values
    if representation == "db":
        power = stft(samples, stft_cfg)
        ref = max(float(power.values.max()), 1e-10)
        return power_to_db(power, ref=ref).values
    if representation == "mel":
        return mel_spectrogram(samples, stft_cfg, n_mels=cfg.n_mels, fmin=cfg.fmin, fmax=cfg.fmax).values
    if representation == "mfcc":
        return mfcc(samples, stft_cfg, n_mels=cfg.n_mels, n_coeffs=cfg.n_coeffs).values
    raise ValueError(f"unknown representation {representation!r}")


class FeatureExtractor:
    """Callable feature_fn with clip caching and optional augmentation.

    Called as fn(entry, rng). With augmentation on, a per-item rng must
    be supplied (the training loop derives one from the item counter);
    with rng=None the extractor is deterministic, so results are cached.
    """

    def __init__(
        self,
        cfg: ToolkitConfig,
        representation: str,
        root,
        augment: bool = False,
        noise_pool: list[AudioClip] | None = None,
    ):
        if representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {representation!r}")
        self.cfg = cfg
        self.representation = representation
        self.root = root
        self.augment = augment
        self.noise_pool = noise_pool or []
        self._clips: dict[str, AudioClip] = {}
        self._features: dict[str, np.ndarray] = {}

    def _clip(self, entry: ManifestEntry) -> AudioClip:
        clip = self._clips.get(entry.path)
        if clip is None:
            clip = load_entry_clip(entry, self.root, self.cfg.fragment_seconds)
            if clip.sample_rate != self.cfg.sample_rate:
                # off-rate files are rejected, never resampled
                raise ValueError(
                    f"{entry.path}: sample rate {clip.sample_rate} Hz, "
                    f"pipeline expects {self.cfg.sample_rate} Hz"
                )
            self._clips[entry.path] = clip
        return clip

    def __call__(self, entry: ManifestEntry, rng=None) -> np.ndarray:
        if rng is None and entry.path in self._features:
            return self._features[entry.path]
        clip = self._clip(entry)
        target = input_length(self.cfg, self.representation)
        use_augment = (
            self.augment
            and rng is not None
            and (entry.class_index != SILENCE_INDEX or self.cfg.augment_silence)
        )
        if use_augment:
            aug_cfg = replace(self.cfg.augment_config(), target_length=target)
            samples = augment_pipeline(clip, self.noise_pool, aug_cfg, rng)
        else:
            samples = fix_length(clip.samples, target, rng or np.random.default_rng(0))
        values = feature_map_values(samples, self.cfg, self.representation)
        features = values[None, :] if values.ndim == 1 else values[None, :, :]
        if rng is None:
            self._features[entry.path] = features
        return features


def load_noise_pool(manifest: Manifest, root) -> list[AudioClip]:
    """Full background recordings (not fragments) for noise mixing."""
    paths = sorted(
        {
            e.path.rpartition(FRAGMENT_MARK)[0]
            for e in manifest.entries
            if e.speaker_id == BACKGROUND_SPEAKER
        }
    )
    return [read_wav_file(Path(root) / p) for p in paths]
