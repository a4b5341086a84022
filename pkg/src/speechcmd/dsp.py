"""Time-frequency analysis: windowing, FFT, spectrograms, mel scale, MFCC.

Everything is computed from scratch on top of numpy array ops: an
iterative radix-2 FFT for power-of-two transform sizes, a direct DFT
fallback for other sizes (needed to reproduce odd spectrogram
resolutions like 241 frequency bins from a 480-point transform), and
the classic mel / DCT-II chain on top.

Internals run in 64-bit floats; FeatureMap values are stored as float32.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HAMMING_A0 = 0.53836
DB_AMIN = 1e-10
DB_TOP = 80.0
LOG_EPS = 1e-10

FEATURE_KINDS = ("raw", "power", "log_power", "decibel", "mel", "log_mel", "mfcc")


@dataclass(frozen=True)
class StftConfig:
    """Framing parameters for the short-time Fourier transform.

    fft_size need not be a power of two: power-of-two sizes use the fast
    radix-2 path, anything else falls back to the direct DFT.
    """

    win_length: int = 400
    hop_length: int = 160
    fft_size: int = 512
    sample_rate: int = 16000

    def __post_init__(self):
        if not (0 < self.hop_length <= self.win_length <= self.fft_size):
            raise ValueError(
                f"need 0 < hop ({self.hop_length}) <= win ({self.win_length})"
                f" <= fft_size ({self.fft_size})"
            )
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1


@dataclass
class FeatureMap:
    """A 2D time-frequency grid: rows are frequency/mel/cepstral bins,
    columns are time frames."""

    values: np.ndarray
    kind: str
    config: StftConfig

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.ndim != 2:
            raise ValueError(f"FeatureMap values must be 2D, got shape {self.values.shape}")
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass
class MelFilterbank:
    """Triangular mel filters sampled at FFT bin centers, peak 1.0."""

    weights: np.ndarray  # (n_mels, fft_size//2 + 1) float32
    fmin: float
    fmax: float

    @property
    def n_mels(self) -> int:
        return self.weights.shape[0]


def hamming_window(length: int) -> np.ndarray:
    """Center-peaked Hamming taper with a0 = 0.53836.

    w[n] = a0 - (1 - a0) * cos(2*pi*n / (length - 1)), peaking at the
    frame center and tapering to 2*a0 - 1 at the edges.
    """
    if length < 2:
        raise ValueError("window length must be >= 2")
    n = np.arange(length, dtype=np.float64)
    w = HAMMING_A0 - (1.0 - HAMMING_A0) * np.cos(2.0 * np.pi * n / (length - 1))
    return w.astype(np.float32)


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev = (rev << 1) | ((idx >> b) & 1)
    return rev


def fft(x) -> np.ndarray:
    """Unnormalized forward DFT via iterative radix-2 decimation in time.

    X[k] = sum_n x[n] * exp(-2j*pi*k*n/N). Operates along the last axis,
    so stacked frames transform in one call. Length must be a power of
    two; see dft_direct for other lengths.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if n == 0 or (n & (n - 1)) != 0:
        raise ValueError(f"fft length must be a power of two, got {n}")
    y = x[..., _bit_reverse_indices(n)]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = y.reshape(y.shape[:-1] + (n // size, size))
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        y = np.concatenate([even + odd, even - odd], axis=-1).reshape(x.shape)
        size *= 2
    return y


def dft_direct(x) -> np.ndarray:
    """Direct O(N^2) DFT along the last axis; any length."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    k = np.arange(n)
    basis = np.exp(-2j * np.pi * np.outer(k, k) / n)  # symmetric in (k, n)
    return x @ basis


def stft(samples, config: StftConfig) -> FeatureMap:
    """Power spectrogram: squared magnitude of windowed frame DFTs.

    Frame t covers samples [t*hop, t*hop + win); there is no padding, so
    the frame count is 1 + (N - win) // hop. Frames are Hamming-windowed,
    zero-padded to fft_size, and transformed; rows are bins 0..fft_size/2.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("stft expects a 1D sample sequence")
    if len(x) < config.win_length:
        raise ValueError(
            f"signal length {len(x)} is shorter than win_length {config.win_length}"
        )
    win = config.win_length
    hop = config.hop_length
    nfft = config.fft_size

    frames = np.lib.stride_tricks.sliding_window_view(x, win)[::hop]
    windowed = frames * hamming_window(win).astype(np.float64)
    padded = np.zeros((frames.shape[0], nfft), dtype=np.float64)
    padded[:, :win] = windowed

    if nfft & (nfft - 1) == 0:
        spec = fft(padded)
    else:
        spec = dft_direct(padded)
    power = np.abs(spec[:, : config.n_bins]) ** 2
    return FeatureMap(values=power.T.astype(np.float32), kind="power", config=config)


def power_to_db(fmap: FeatureMap, ref: float, amin: float = DB_AMIN, top_db: float = DB_TOP) -> FeatureMap:
    """Convert a power map to decibels: 10*log10(max(S, amin)/ref).

    Cells where S equals ref map to exactly 0 dB. The result is clamped
    below at (max - top_db) so silence does not dominate the dynamic
    range.
    """
    if ref <= 0:
        raise ValueError("ref must be positive")
    s = fmap.values.astype(np.float64)
    out = 10.0 * np.log10(np.maximum(s, amin) / ref)
    out = np.maximum(out, out.max() - top_db)
    return FeatureMap(values=out.astype(np.float32), kind="decibel", config=fmap.config)


def log_spectrogram(samples, config: StftConfig) -> FeatureMap:
    """Natural log of the power spectrogram, floored by a small epsilon."""
    s = stft(samples, config)
    out = np.log(s.values.astype(np.float64) + LOG_EPS)
    return FeatureMap(values=out.astype(np.float32), kind="log_power", config=config)


def hz_to_mel(f):
    """Perceptual mel scale: mel(f) = 2595 * log10(1 + f/700)."""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be >= 0")
    out = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(out) if out.ndim == 0 else out


def mel_to_hz(m):
    """Inverse mel scale: 700 * (10**(m/2595) - 1)."""
    m = np.asarray(m, dtype=np.float64)
    if np.any(m < 0):
        raise ValueError("mel value must be >= 0")
    out = 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    return float(out) if out.ndim == 0 else out


def mel_filterbank(
    n_mels: int, config: StftConfig, fmin: float = 0.0, fmax: float | None = None
) -> MelFilterbank:
    """Build triangular filters spaced evenly on the mel scale.

    n_mels + 2 edge points are placed between fmin and fmax in mel, and
    filter i is the triangle rising from point i to i+1 (peak 1.0) and
    falling to point i+2, sampled at the integer FFT bin frequencies.
    """
    if fmax is None:
        fmax = config.sample_rate / 2.0
    if not (0 <= fmin < fmax <= config.sample_rate / 2.0):
        raise ValueError(f"need 0 <= fmin < fmax <= sr/2, got ({fmin}, {fmax})")
    if n_mels < 2:
        raise ValueError("n_mels must be >= 2")

    mel_points = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
    hz_points = mel_to_hz(mel_points)
    bin_freqs = np.arange(config.n_bins) * config.sample_rate / config.fft_size

    left = hz_points[:-2, None]
    center = hz_points[1:-1, None]
    right = hz_points[2:, None]
    rising = (bin_freqs - left) / np.maximum(center - left, 1e-12)
    falling = (right - bin_freqs) / np.maximum(right - center, 1e-12)
    weights = np.clip(np.minimum(rising, falling), 0.0, None)
    return MelFilterbank(weights=weights.astype(np.float32), fmin=fmin, fmax=fmax)


def mel_spectrogram(
    samples,
    config: StftConfig,
    n_mels: int = 40,
    fmin: float = 0.0,
    fmax: float | None = None,
) -> FeatureMap:
    """Mel power spectrogram: filterbank weights applied to the STFT."""
    power = stft(samples, config)
    fb = mel_filterbank(n_mels, config, fmin, fmax)
    out = fb.weights.astype(np.float64) @ power.values.astype(np.float64)
    return FeatureMap(values=out.astype(np.float32), kind="mel", config=config)


def dct_ii(x, n_out: int) -> np.ndarray:
    """Orthonormal DCT-II, returning the first n_out coefficients.

    y[k] = s(k) * sum_n x[n] * cos(pi*k*(2n+1)/(2N)) with s(0) = sqrt(1/N)
    and s(k>0) = sqrt(2/N), so the full transform preserves the L2 norm.
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if not (0 < n_out <= n):
        raise ValueError(f"n_out must be in [1, {n}], got {n_out}")
    k = np.arange(n_out)[:, None]
    m = np.arange(n)[None, :]
    basis = np.cos(np.pi * k * (2 * m + 1) / (2 * n))
    y = basis @ x
    scale = np.full(n_out, np.sqrt(2.0 / n))
    scale[0] = np.sqrt(1.0 / n)
    return y * scale


def mfcc(
    samples,
    config: StftConfig,
    n_mels: int = 40,
    n_coeffs: int = 13,
) -> FeatureMap:
    """Mel-frequency cepstral coefficients: DCT-II of log mel energies.

    Composed from mel_spectrogram and dct_ii frame by frame, so it is
    bit-identical to applying those operations independently.
    """
    if n_coeffs > n_mels:
        raise ValueError(f"n_coeffs ({n_coeffs}) must be <= n_mels ({n_mels})")
    mel = mel_spectrogram(samples, config, n_mels=n_mels)
    n_frames = mel.values.shape[1]
    out = np.empty((n_coeffs, n_frames), dtype=np.float32)
    for t in range(n_frames):
        log_energies = np.log(mel.values[:, t].astype(np.float64) + LOG_EPS)
        out[:, t] = dct_ii(log_energies, n_coeffs)
    return FeatureMap(values=out, kind="mfcc", config=config)


# --- SCFT tensor container -------------------------------------------------
#
# Layout: magic "SCFT", version byte 0x01, kind byte, u8 rank,
# rank x u32 little-endian dimensions, then row-major float32 LE data.

SCFT_MAGIC = b"SCFT"
SCFT_VERSION = 1
_KIND_CODES = {name: i for i, name in enumerate(FEATURE_KINDS)}
_CODE_KINDS = {i: name for name, i in _KIND_CODES.items()}


def scft_to_bytes(values: np.ndarray, kind: str = "raw") -> bytes:
    arr = np.ascontiguousarray(values, dtype="<f4")
    if arr.ndim < 1 or arr.ndim > 255:
        raise ValueError(f"unsupported tensor rank {arr.ndim}")
    if kind not in _KIND_CODES:
        raise ValueError(f"unknown feature kind {kind!r}")
    header = SCFT_MAGIC + bytes([SCFT_VERSION, _KIND_CODES[kind], arr.ndim])
    dims = np.asarray(arr.shape, dtype="<u4").tobytes()
    return header + dims + arr.tobytes()


def scft_from_bytes(data: bytes, offset: int = 0) -> tuple[np.ndarray, str, int]:
    """Decode one SCFT tensor; returns (array, kind, offset past the tensor)."""
    if data[offset : offset + 4] != SCFT_MAGIC:
        raise ValueError("not an SCFT tensor (bad magic)")
    version, kind_code, rank = data[offset + 4 : offset + 7]
    if version != SCFT_VERSION:
        raise ValueError(f"unsupported SCFT version {version}")
    if kind_code not in _CODE_KINDS:
        raise ValueError(f"unknown SCFT kind code {kind_code}")
    pos = offset + 7
    dims = np.frombuffer(data, dtype="<u4", count=rank, offset=pos)
    pos += 4 * rank
    count = int(np.prod(dims)) if rank else 0
    arr = np.frombuffer(data, dtype="<f4", count=count, offset=pos)
    if len(arr) != count:
        raise ValueError("SCFT tensor truncated")
    pos += 4 * count
    return arr.reshape(dims).copy(), _CODE_KINDS[kind_code], pos


def save_scft(path, values: np.ndarray, kind: str = "raw") -> None:
    with open(path, "wb") as f:
        f.write(scft_to_bytes(values, kind))


def load_scft(path) -> tuple[np.ndarray, str]:
    with open(path, "rb") as f:
        data = f.read()
    arr, kind, _ = scft_from_bytes(data)
    return arr, kind
