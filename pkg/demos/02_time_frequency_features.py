"""
Sound representations
=====================

One dual-tone "command" rendered four ways: power/log spectrogram,
decibel scaling, mel spectrogram, and MFCC. Each map is exported as a
PPM image under demo_output/ so the structures are visible without any
plotting dependency.
"""

from pathlib import Path

import numpy as np

from speechcmd import StftConfig, log_spectrogram, mel_spectrogram, mfcc, power_to_db, stft
from speechcmd.viz import save_ppm

out_dir = Path("demo_output/features")
out_dir.mkdir(parents=True, exist_ok=True)

sr = 16000
t = np.arange(sr) / sr
# two tones plus a little noise, like the synthetic keyword classes
signal = 0.3 * np.sin(2 * np.pi * 750 * t) + 0.3 * np.sin(2 * np.pi * 1100 * t)
signal += np.random.default_rng(0).normal(0, 0.01, sr)

# 25 ms window / 10 ms step at 16 kHz
cfg = StftConfig(win_length=400, hop_length=160, fft_size=512)

power = stft(signal, cfg)
print(f"power spectrogram: {power.shape} (bins x frames)")

log_spec = log_spectrogram(signal, cfg)
db = power_to_db(power, ref=float(power.values.max()))
mel = mel_spectrogram(signal, cfg, n_mels=40)
cepstra = mfcc(signal, cfg, n_mels=40, n_coeffs=13)

for name, fmap in (("logspec", log_spec), ("db", db), ("mel", mel), ("mfcc", cepstra)):
    save_ppm(out_dir / f"{name}.ppm", fmap.values)
    print(f"{name:>8}: {fmap.shape}, range [{fmap.values.min():.1f}, {fmap.values.max():.1f}]"
          f" -> {out_dir / (name + '.ppm')}")

# two benchmark spectrogram resolutions come out exact
for win, hop, nfft in ((480, 320, 480), (256, 128, 256)):
    shape = log_spectrogram(signal, StftConfig(win_length=win, hop_length=hop, fft_size=nfft)).shape
    print(f"win={win} hop={hop} fft={nfft} -> {shape[0]}x{shape[1]}")

# the mel peak for a 750 Hz tone lands where the scale says it should
peak_row = int(np.argmax(mel.values.sum(axis=1)))
print(f"strongest mel row: {peak_row} of 40")
