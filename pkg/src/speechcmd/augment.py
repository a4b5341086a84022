"""Waveform-level training augmentation.

The pipeline applies, in order: random playback-speed change (linear
interpolation resampling, so pitch and duration move together like real
faster/slower playback), random time shift, background-noise mixing
scaled relative to the clip's peak volume, and a final crop/pad to the
network input length. All randomness flows through an explicit numpy
Generator with a fixed draw order, so a seed reproduces bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .wav_io import AudioClip


@dataclass(frozen=True)
class AugmentConfig:
    speed_min: float = 0.7
    speed_max: float = 1.4
    shift_max_s: float = 0.1
    noise_max: float = 0.05
    target_length: int = 16384
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.speed_min <= self.speed_max):
            raise ValueError("need 0 < speed_min <= speed_max")
        if self.shift_max_s < 0:
            raise ValueError("shift_max_s must be >= 0")
        if not (0 <= self.noise_max <= 1):
            raise ValueError("noise_max must be in [0, 1]")
        if self.target_length <= 0:
            raise ValueError("target_length must be positive")


def change_speed(clip: AudioClip, rate: float) -> AudioClip:
    """Resample a clip to simulate playback at `rate` times normal speed.

    Output sample i is the linear interpolation of the input at position
    i * rate (clamped to the last sample), so the result has
    round(N / rate) samples and the sample rate is unchanged.
    """
    if rate <= 0:
        raise ValueError("rate must be positive")
    n = len(clip)
    out_len = int(round(n / rate))
    positions = np.minimum(np.arange(out_len, dtype=np.float64) * rate, n - 1)
    out = np.interp(positions, np.arange(n), clip.samples.astype(np.float64))
    return AudioClip(
        samples=out.astype(np.float32),
        sample_rate=clip.sample_rate,
        source_path=clip.source_path,
        label=clip.label,
    )


def time_shift(clip: AudioClip, shift: int) -> AudioClip:
    """Shift content by `shift` samples; zeros fill the vacated end.

    Positive shifts move content later (zeros enter at the start),
    negative shifts move it earlier (zeros at the end). Length is
    preserved.
    """
    n = len(clip)
    if abs(shift) > n:
        raise ValueError(f"|shift| = {abs(shift)} exceeds clip length {n}")
    out = np.zeros(n, dtype=np.float32)
    if shift >= 0:
        out[shift:] = clip.samples[: n - shift]
    else:
        out[: n + shift] = clip.samples[-shift:]
    return AudioClip(
        samples=out,
        sample_rate=clip.sample_rate,
        source_path=clip.source_path,
        label=clip.label,
    )


def add_background_noise(
    clip: AudioClip, noise: AudioClip, level: float, rng: np.random.Generator
) -> AudioClip:
    """Mix in a random segment of background noise.

    The segment is rescaled so its peak equals level * peak_volume(clip),
    then added and clamped to [-1, 1]. Silent clips pass through
    unchanged (there is no peak to scale against).
    """
    if not (0 <= level <= 1):
        raise ValueError("level must be in [0, 1]")
    if len(noise) < len(clip):
        raise ValueError(
            f"noise length {len(noise)} is shorter than clip length {len(clip)}"
        )
    clip_peak = float(np.max(np.abs(clip.samples))) if len(clip) else 0.0
    offset = int(rng.integers(0, len(noise) - len(clip) + 1))
    if clip_peak == 0.0 or level == 0.0:
        return clip
    segment = noise.samples[offset : offset + len(clip)].astype(np.float64)
    seg_peak = float(np.max(np.abs(segment)))
    if seg_peak > 0.0:
        segment = segment * (level * clip_peak / seg_peak)
    mixed = np.clip(clip.samples.astype(np.float64) + segment, -1.0, 1.0)
    return AudioClip(
        samples=mixed.astype(np.float32),
        sample_rate=clip.sample_rate,
        source_path=clip.source_path,
        label=clip.label,
    )


def fix_length(samples, target: int, rng: np.random.Generator) -> np.ndarray:
    """Force a sample vector to exactly `target` samples.

    Longer inputs are cut to a contiguous window at a uniformly random
    start; shorter inputs are padded with zeros at the beginning.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    x = np.asarray(samples, dtype=np.float32)
    n = len(x)
    if n > target:
        start = int(rng.integers(0, n - target + 1))
        return x[start : start + target].copy()
    if n < target:
        return np.concatenate([np.zeros(target - n, dtype=np.float32), x])
    return x.copy()


def augment_pipeline(
    clip: AudioClip,
    noise_pool: list[AudioClip],
    config: AugmentConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Full augmentation chain: speed, shift, noise, then fix_length.

    Draws are consumed from `rng` in a fixed order: speed rate, shift,
    noise level, noise pool index, noise segment offset, crop offset
    (the noise draws are skipped entirely when noise_max is 0, and the
    crop offset is only drawn when the clip is longer than the target).
    """
    if config.noise_max > 0 and not noise_pool:
        raise ValueError("noise_pool must be non-empty when noise_max > 0")

    rate = float(rng.uniform(config.speed_min, config.speed_max))
    out = change_speed(clip, rate)

    shift_s = float(rng.uniform(-config.shift_max_s, config.shift_max_s))
    shift = int(round(shift_s * clip.sample_rate))
    shift = max(-len(out), min(len(out), shift))
    out = time_shift(out, shift)

    if config.noise_max > 0:
        level = float(rng.uniform(0.0, config.noise_max))
        noise = noise_pool[int(rng.integers(0, len(noise_pool)))]
        out = add_background_noise(out, noise, level, rng)

    return fix_length(out.samples, config.target_length, rng)
