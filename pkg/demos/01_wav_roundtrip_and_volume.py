"""
WAV ingestion basics
====================

Builds a one-second tone, serializes it as a 16-bit mono PCM WAVE file,
parses it back, and runs the volume statistics used for corpus cleaning.
"""

import numpy as np

from speechcmd import (
    AudioClip,
    is_silence_candidate,
    parse_wav,
    peak_volume,
    split_into_fragments,
    write_wav,
)

sr = 16000
t = np.arange(sr) / sr
tone = AudioClip(samples=(0.4 * np.sin(2 * np.pi * 440 * t)).astype(np.float32), sample_rate=sr)

# serialize and parse back: the container is 44 header bytes + 2 bytes/sample
data = write_wav(tone)
print(f"wav size: {len(data)} bytes (44 + {2 * len(tone)})")

clip = parse_wav(data)
print(f"parsed {len(clip)} samples at {clip.sample_rate} Hz")

# quantization is round(s * 32768); a 440 Hz tone survives to ~3e-5
err = np.abs(clip.samples - tone.samples).max()
print(f"max round-trip error: {err:.2e} (half an int16 step is {0.5 / 32768:.2e})")

# the cleaning statistic: peak absolute amplitude
print(f"peak volume: {peak_volume(clip):.3f}")
print(f"silence candidate at threshold 0.01? {is_silence_candidate(clip, 0.01)}")

quiet = AudioClip(samples=(tone.samples * 0.001), sample_rate=sr)
print(f"same tone at 0.1% volume -> candidate? {is_silence_candidate(quiet, 0.01)}")

# long recordings split into non-overlapping 1-second fragments
long_clip = AudioClip(samples=np.tile(tone.samples, 3)[: 3 * sr + 500], sample_rate=sr)
fragments = split_into_fragments(long_clip, sr)
print(f"{len(long_clip)} samples -> {len(fragments)} fragments (remainder dropped)")
