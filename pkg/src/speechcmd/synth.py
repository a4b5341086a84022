"""Deterministic synthetic corpus generation.

The real 60k-file corpus cannot be bundled, so each keyword class is
stood in for by a distinct dual-tone signature (class i pairs
300 + 150*i Hz with 800 + 100*i Hz), the unknown class by random tone
pairs in a disjoint high band, and background noise by seeded white
noise recordings. Files follow the corpus conventions: label folders,
<speaker>_nohash_<n>.wav names, 16-bit mono PCM at 16 kHz. Every
speaker gets a small personal frequency offset so speaker-disjoint
evaluation is meaningful.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import BACKGROUND_FOLDER, CLASS_NAMES
from .wav_io import AudioClip, write_wav_file

KEYWORDS = CLASS_NAMES[:10]

KEYWORD_TONES = {name: (300.0 + 150.0 * i, 800.0 + 100.0 * i) for i, name in enumerate(KEYWORDS)}
UNKNOWN_BAND = (2500.0, 7000.0)


def _tone_clip(rng, freqs, sample_rate, n_samples, speaker_factor):
    t = np.arange(n_samples) / sample_rate
    amplitude = rng.uniform(0.35, 0.6)
    x = np.zeros(n_samples)
    for f in freqs:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        x += 0.5 * np.sin(2.0 * np.pi * f * speaker_factor * t + phase)
    x *= amplitude
    # short attack/release so shifts move visible energy
    edge = max(1, n_samples // 20)
    envelope = np.ones(n_samples)
    envelope[:edge] = np.linspace(0.0, 1.0, edge)
    envelope[-edge:] = np.linspace(1.0, 0.0, edge)
    x *= envelope
    x += rng.normal(0.0, 0.01, n_samples)
    return np.clip(x, -1.0, 1.0).astype(np.float32)


def synthesize_corpus(
    out_dir,
    n_per_class: int = 40,
    seed: int = 0,
    n_speakers: int = 8,
    sample_rate: int = 16000,
    clip_seconds: float = 1.0,
    noise_recordings: int = 2,
    noise_seconds: float = 20.0,
) -> Path:
    """Generate a corpus under out_dir; byte-identical for a fixed seed.

    Produces n_per_class clips for each of the ten keywords, n_per_class
    unknown clips, and `noise_recordings` long background-noise files.
    """
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    n_samples = int(round(clip_seconds * sample_rate))

    speakers = [f"{rng.integers(0, 16**8):08x}" for _ in range(n_speakers)]
    speaker_factor = {spk: 1.0 + rng.uniform(-0.015, 0.015) for spk in speakers}

    for label in list(KEYWORDS) + ["unknown"]:
        label_dir = root / label
        label_dir.mkdir(exist_ok=True)
        for j in range(n_per_class):
            spk = speakers[j % n_speakers]
            rep = j // n_speakers
            if label == "unknown":
                freqs = rng.uniform(*UNKNOWN_BAND, size=2)
            else:
                freqs = KEYWORD_TONES[label]
            samples = _tone_clip(rng, freqs, sample_rate, n_samples, speaker_factor[spk])
            clip = AudioClip(samples=samples, sample_rate=sample_rate, label=label)
            write_wav_file(label_dir / f"{spk}_nohash_{rep}.wav", clip)

    noise_dir = root / BACKGROUND_FOLDER
    noise_dir.mkdir(exist_ok=True)
    noise_len = int(round(noise_seconds * sample_rate))
    for k in range(noise_recordings):
        noise = (rng.normal(0.0, 0.03, noise_len).clip(-0.95, 0.95)).astype(np.float32)
        clip = AudioClip(samples=noise, sample_rate=sample_rate)
        write_wav_file(noise_dir / f"noise_{k}.wav", clip)
    return root
