"""Reading and writing 16-bit mono PCM WAVE files.

Parses the RIFF container directly so that malformed, unsupported, and
truncated files raise distinct errors, and so unknown chunks (LIST, fact,
...) are tolerated the way real-world corpora require. Samples are
normalized to float32 by dividing by 32768, which maps -32768 exactly
to -1.0.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

INT16_SCALE = 32768.0


class WavError(Exception):
    """Base class for WAV parsing problems."""


class MalformedHeader(WavError):
    """Missing RIFF/WAVE magic or a required chunk."""


class UnsupportedFormat(WavError):
    """Valid container but not 16-bit mono PCM."""


class TruncatedData(WavError):
    """Data chunk shorter than its declared length."""


@dataclass
class AudioClip:
    """A mono waveform: float32 samples in [-1, 1) plus its sample rate.

    Immutable by convention; operations return new clips.
    """

    samples: np.ndarray
    sample_rate: int
    source_path: str | None = None
    label: str | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float32)
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def parse_wav(data: bytes) -> AudioClip:
    """Parse a RIFF/WAVE byte string into an AudioClip.

    Only uncompressed 16-bit little-endian mono PCM is accepted. Chunks
    other than `fmt ` and `data` are skipped. Never reads past the
    declared data-chunk length; trailing garbage is ignored.

    Raises:
        MalformedHeader: missing RIFF/WAVE magic or fmt/data chunk.
        UnsupportedFormat: compressed, multi-channel, or non-16-bit audio.
        TruncatedData: data chunk declares more bytes than are present.
    """
    if len(data) < 12 or data[0:4] != b"RIFF":
        raise MalformedHeader("missing RIFF magic")
    if data[8:12] != b"WAVE":
        raise MalformedHeader("missing WAVE form type")

    fmt = None
    pcm_bytes = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body_start = pos + 8
        if chunk_id == b"fmt ":
            if chunk_size < 16 or body_start + 16 > len(data):
                raise MalformedHeader("fmt chunk too short")
            fmt = struct.unpack("<HHIIHH", data[body_start : body_start + 16])
        elif chunk_id == b"data":
            if body_start + chunk_size > len(data):
                raise TruncatedData(
                    f"data chunk declares {chunk_size} bytes, "
                    f"only {len(data) - body_start} present"
                )
            pcm_bytes = data[body_start : body_start + chunk_size]
        # chunks are word-aligned: odd sizes carry a pad byte
        pos = body_start + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise MalformedHeader("no fmt chunk")
    if pcm_bytes is None:
        raise MalformedHeader("no data chunk")

    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1:
        raise UnsupportedFormat(f"audio format {audio_format}, expected PCM (1)")
    if channels != 1:
        raise UnsupportedFormat(f"{channels} channels, expected mono")
    if bits != 16:
        raise UnsupportedFormat(f"{bits} bits/sample, expected 16")

    n = len(pcm_bytes) // 2
    ints = np.frombuffer(pcm_bytes[: 2 * n], dtype="<i2")
    samples = ints.astype(np.float32) / INT16_SCALE
    return AudioClip(samples=samples, sample_rate=sample_rate)


def write_wav(clip: AudioClip) -> bytes:
    """Serialize a clip as a canonical 44-byte-header PCM WAVE file.

    Floats are quantized with round(s * 32768) and clamped to the int16
    range, so parse_wav(write_wav(c)) reproduces c up to quantization.
    """
    ints = np.rint(clip.samples.astype(np.float64) * INT16_SCALE)
    ints = np.clip(ints, -32768, 32767).astype("<i2")
    pcm = ints.tobytes()
    byte_rate = clip.sample_rate * 2
    header = b"RIFF"
    header += struct.pack("<I", 36 + len(pcm))
    header += b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, clip.sample_rate, byte_rate, 2, 16)
    header += b"data" + struct.pack("<I", len(pcm))
    return header + pcm


def read_wav_file(path) -> AudioClip:
    """Load a WAV file from disk, recording its source path."""
    with open(path, "rb") as f:
        clip = parse_wav(f.read())
    clip.source_path = str(path)
    return clip


def write_wav_file(path, clip: AudioClip) -> None:
    with open(path, "wb") as f:
        f.write(write_wav(clip))


def peak_volume(clip: AudioClip) -> float:
    """Maximum absolute sample value; the cleaning statistic for silence."""
    if len(clip) == 0:
        raise ValueError("peak_volume of an empty clip")
    return float(np.max(np.abs(clip.samples)))


def is_silence_candidate(clip: AudioClip, threshold: float) -> bool:
    """True iff the clip's peak volume is strictly below threshold."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    return peak_volume(clip) < threshold


def split_into_fragments(clip: AudioClip, fragment_samples: int) -> list[AudioClip]:
    """Cut a clip into consecutive non-overlapping fixed-length fragments.

    A trailing remainder shorter than fragment_samples is discarded.
    """
    if fragment_samples <= 0:
        raise ValueError("fragment_samples must be positive")
    n = len(clip) // fragment_samples
    out = []
    for i in range(n):
        seg = clip.samples[i * fragment_samples : (i + 1) * fragment_samples]
        out.append(
            AudioClip(
                samples=seg.copy(),
                sample_rate=clip.sample_rate,
                source_path=clip.source_path,
                label=clip.label,
            )
        )
    return out
