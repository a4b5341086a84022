"""
Waveform augmentation
=====================

Shows each augmentation in isolation and then the full randomized
chain: speed change (0.7-1.4x), time shift (+/-0.1 s), background-noise
mixing at up to 5% of the clip's peak, and the crop/pad to the 16384
network input length. The chain is a pure function of its seed.
"""

import numpy as np

from speechcmd import (
    AudioClip,
    AugmentConfig,
    add_background_noise,
    augment_pipeline,
    change_speed,
    fix_length,
    peak_volume,
    time_shift,
)

sr = 16000
t = np.arange(sr) / sr
clip = AudioClip(samples=(0.5 * np.sin(2 * np.pi * 600 * t)).astype(np.float32), sample_rate=sr)
rng = np.random.default_rng(0)
noise = AudioClip(samples=rng.normal(0, 0.05, 4 * sr).clip(-1, 1).astype(np.float32), sample_rate=sr)

# speed: playback-style resampling, so duration and pitch move together
for rate in (0.7, 1.0, 1.4):
    out = change_speed(clip, rate)
    print(f"rate {rate}: {len(clip)} -> {len(out)} samples")

# shift: zeros enter on the vacated side
shifted = time_shift(clip, 1600)
print(f"shift +0.1 s: first nonzero sample at index {np.flatnonzero(shifted.samples)[0]}")

# noise: scaled relative to the clip's own peak
mixed = add_background_noise(clip, noise, 0.05, np.random.default_rng(1))
print(f"peak before {peak_volume(clip):.3f}, after noise {peak_volume(mixed):.3f}")

# length fix: shorter inputs are zero-padded at the front
fixed = fix_length(clip.samples, 16384, np.random.default_rng(2))
print(f"fix_length: {len(clip)} -> {len(fixed)} ({np.count_nonzero(fixed[:384] == 0)} leading zeros)")

# the full chain, twice with the same seed: bit-identical
config = AugmentConfig()  # speed 0.7-1.4, shift 0.1 s, noise 0.05, target 16384
a = augment_pipeline(clip, [noise], config, np.random.default_rng(42))
b = augment_pipeline(clip, [noise], config, np.random.default_rng(42))
c = augment_pipeline(clip, [noise], config, np.random.default_rng(43))
print(f"same seed bit-identical: {np.array_equal(a, b)}")
print(f"different seed differs:  {not np.array_equal(a, c)}")
print(f"output length always {len(a)}")
