"""Corpus management: label mapping, manifests, folds, balanced batches.

A corpus is a directory of per-label folders of wav files named
``<speaker>_nohash_<n>.wav``, plus a ``_background_noise_`` folder of
longer recordings. Scanning produces a manifest; background recordings
are registered as synthetic one-second silence entries (``path#k`` marks
fragment k of a recording). Folds are speaker-disjoint: a fold is a set
of speakers, never a set of files.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .wav_io import AudioClip, peak_volume, read_wav_file, split_into_fragments, WavError

logger = logging.getLogger(__name__)

CLASS_NAMES = (
    "yes", "no", "up", "down", "left", "right",
    "on", "off", "stop", "go", "silence", "unknown",
)
NUM_CLASSES = len(CLASS_NAMES)
SILENCE_INDEX = CLASS_NAMES.index("silence")
UNKNOWN_INDEX = CLASS_NAMES.index("unknown")

BACKGROUND_FOLDER = "_background_noise_"
BACKGROUND_SPEAKER = "_background_"
FRAGMENT_MARK = "#"

_FILENAME_RE = re.compile(r"^([^_]+)_nohash_(\d+)\.wav$")


def map_label(raw_label: str) -> int:
    """Total mapping from folder name to class index.

    The ten keywords map to themselves, the background-noise folder maps
    to silence, and every other folder maps to unknown.
    """
    if raw_label == BACKGROUND_FOLDER:
        return SILENCE_INDEX
    try:
        return CLASS_NAMES.index(raw_label)
    except ValueError:
        return UNKNOWN_INDEX


def speaker_id(filename: str) -> str:
    """Extract the subject id (text before the first underscore).

    Raises ValueError for names that do not follow the
    ``<id>_nohash_<n>.wav`` training convention, e.g. test-style
    ``clip_000044442.wav``.
    """
    m = _FILENAME_RE.match(filename)
    if m is None:
        raise ValueError(f"filename {filename!r} does not match <id>_nohash_<n>.wav")
    return m.group(1)


@dataclass
class ManifestEntry:
    path: str  # relative to the corpus root; "#k" suffix marks fragment k
    raw_label: str
    class_index: int
    speaker_id: str
    fold: int = -1

    @property
    def class_name(self) -> str:
        return CLASS_NAMES[self.class_index]


@dataclass
class Manifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    n_folds: int = 0
    root: str = ""

    def __len__(self) -> int:
        return len(self.entries)

    def class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in CLASS_NAMES}
        for e in self.entries:
            counts[e.class_name] += 1
        return counts

    def speakers(self) -> list[str]:
        return sorted({e.speaker_id for e in self.entries})


def scan_corpus(root_dir, fragment_seconds: float = 1.0, silence_cap: int | None = None) -> Manifest:
    """Walk a corpus directory into a manifest.

    Background-noise recordings are split (virtually) into 1-second
    fragments registered as silence entries under the ``_background_``
    pseudo-speaker. The number of silence fragments is capped at
    `silence_cap`, defaulting to the median count of the other classes
    so silence does not swamp the batch sampler.
    """
    root = Path(root_dir)
    label_dirs = sorted(p for p in root.iterdir() if p.is_dir()) if root.is_dir() else []
    entries: list[ManifestEntry] = []
    fragment_lists: list[list[ManifestEntry]] = []

    for label_dir in label_dirs:
        raw_label = label_dir.name
        wavs = sorted(label_dir.glob("*.wav"))
        if raw_label == BACKGROUND_FOLDER:
            for wav in wavs:
                try:
                    clip = read_wav_file(wav)
                except (WavError, OSError) as exc:
                    logger.warning("skipping unreadable file %s: %s", wav, exc)
                    continue
                n_frag = len(clip) // int(round(fragment_seconds * clip.sample_rate))
                rel = str(wav.relative_to(root))
                fragment_lists.append(
                    [
                        ManifestEntry(
                            path=f"{rel}{FRAGMENT_MARK}{k}",
                            raw_label=raw_label,
                            class_index=SILENCE_INDEX,
                            speaker_id=BACKGROUND_SPEAKER,
                        )
                        for k in range(n_frag)
                    ]
                )
            continue
        for wav in wavs:
            try:
                spk = speaker_id(wav.name)
            except ValueError as exc:
                logger.warning("skipping %s: %s", wav, exc)
                continue
            entries.append(
                ManifestEntry(
                    path=str(wav.relative_to(root)),
                    raw_label=raw_label,
                    class_index=map_label(raw_label),
                    speaker_id=spk,
                )
            )

    # interleave fragments across recordings, then cap
    fragments: list[ManifestEntry] = []
    for i in range(max((len(fl) for fl in fragment_lists), default=0)):
        for fl in fragment_lists:
            if i < len(fl):
                fragments.append(fl[i])
    if silence_cap is None:
        counts = [n for n in _per_class_counts(entries) if n > 0]
        silence_cap = int(np.median(counts)) if counts else len(fragments)
    entries.extend(fragments[:silence_cap])

    if not entries:
        raise ValueError(f"no usable audio files under {root_dir}")
    return Manifest(entries=entries, root=str(root))


def _per_class_counts(entries) -> list[int]:
    counts = [0] * NUM_CLASSES
    for e in entries:
        counts[e.class_index] += 1
    return counts


def load_entry_clip(entry: ManifestEntry, root, fragment_seconds: float = 1.0) -> AudioClip:
    """Load the waveform behind a manifest entry, resolving fragments."""
    path = entry.path
    fragment = None
    if FRAGMENT_MARK in path:
        path, _, frag_str = path.rpartition(FRAGMENT_MARK)
        fragment = int(frag_str)
    clip = read_wav_file(Path(root) / path)
    if fragment is not None:
        size = int(round(fragment_seconds * clip.sample_rate))
        clip = split_into_fragments(clip, size)[fragment]
    clip.label = entry.class_name
    return clip


def assign_folds(manifest: Manifest, k: int, seed: int) -> Manifest:
    """Deal speakers into k folds so no voice spans two folds.

    Speakers are sorted, shuffled with a seeded generator, and dealt
    round-robin. Background-noise fragments are not voices: they are
    spread round-robin per fragment so every fold has silence data.
    """
    if k < 2:
        raise ValueError("need at least 2 folds")
    real_speakers = sorted(
        {e.speaker_id for e in manifest.entries if e.speaker_id != BACKGROUND_SPEAKER}
    )
    if any(not e.speaker_id for e in manifest.entries):
        raise ValueError("every entry needs a speaker id before fold assignment")
    order = np.array(real_speakers, dtype=object)
    np.random.default_rng(seed).shuffle(order)
    fold_of = {spk: i % k for i, spk in enumerate(order)}

    new_entries = []
    background_counter = 0
    for e in manifest.entries:
        if e.speaker_id == BACKGROUND_SPEAKER:
            fold = background_counter % k
            background_counter += 1
        else:
            fold = fold_of[e.speaker_id]
        new_entries.append(replace(e, fold=fold))
    return Manifest(entries=new_entries, n_folds=k, root=manifest.root)


def speaker_fold_violations(manifest: Manifest) -> list[str]:
    """Speakers whose clips land in more than one fold.

    The background pseudo-speaker is exempt: it is deliberately spread
    across folds and is not a voice.
    """
    folds_of: dict[str, set[int]] = {}
    for e in manifest.entries:
        if e.speaker_id == BACKGROUND_SPEAKER:
            continue
        folds_of.setdefault(e.speaker_id, set()).add(e.fold)
    return sorted(spk for spk, folds in folds_of.items() if len(folds) > 1)


def clean_low_volume(manifest: Manifest, threshold: float, loader):
    """Propose relabeling quiet files to silence; destructive only on apply.

    `loader` maps an entry to an AudioClip. Returns (proposals, report)
    where proposals are the entries whose peak volume is below the
    threshold and report is every checked (path, peak) pair sorted
    ascending by peak for manual review.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    proposals = []
    report = []
    for e in manifest.entries:
        if e.class_index == SILENCE_INDEX:
            continue
        peak = peak_volume(loader(e))
        report.append((e.path, peak))
        if peak < threshold:
            proposals.append(e)
    report.sort(key=lambda item: item[1])
    return proposals, report


def apply_silence_relabels(manifest: Manifest, proposals) -> Manifest:
    """Return a manifest with the proposed entries relabeled to silence."""
    proposed_paths = {e.path for e in proposals}
    new_entries = [
        replace(e, class_index=SILENCE_INDEX) if e.path in proposed_paths else e
        for e in manifest.entries
    ]
    return Manifest(entries=new_entries, n_folds=manifest.n_folds, root=manifest.root)


def balanced_batches(
    manifest: Manifest, fold_out: int, batch_size: int, rng: np.random.Generator
):
    """Endless stream of class-balanced batches of manifest entries.

    Each batch holds exactly batch_size/12 entries of every class, drawn
    by per-class shuffled cycling: when a class runs out it is
    reshuffled and drawing continues. Entries of the held-out fold never
    appear; a negative fold_out excludes nothing.
    """
    if batch_size % NUM_CLASSES != 0:
        raise ValueError(f"batch_size must be a multiple of {NUM_CLASSES}")
    per_class = batch_size // NUM_CLASSES
    pools: list[list[ManifestEntry]] = [[] for _ in range(NUM_CLASSES)]
    for e in manifest.entries:
        if fold_out < 0 or e.fold != fold_out:
            pools[e.class_index].append(e)
    for idx, pool in enumerate(pools):
        if not pool:
            raise ValueError(f"class {CLASS_NAMES[idx]!r} has no training entries")

    orders = [list(rng.permutation(len(pool))) for pool in pools]
    cursors = [0] * NUM_CLASSES
    while True:
        batch = []
        for c in range(NUM_CLASSES):
            for _ in range(per_class):
                if cursors[c] == len(orders[c]):
                    orders[c] = list(rng.permutation(len(pools[c])))
                    cursors[c] = 0
                batch.append(pools[c][orders[c][cursors[c]]])
                cursors[c] += 1
        yield batch


MANIFEST_COLUMNS = ("path", "raw_label", "class_index", "speaker_id", "fold")


def save_manifest(manifest: Manifest, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(MANIFEST_COLUMNS)
        for e in manifest.entries:
            writer.writerow([e.path, e.raw_label, e.class_index, e.speaker_id, e.fold])


def load_manifest(path, root: str = "") -> Manifest:
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != MANIFEST_COLUMNS:
            raise ValueError(f"manifest {path} missing header row {MANIFEST_COLUMNS}")
        entries = [
            ManifestEntry(
                path=row[0],
                raw_label=row[1],
                class_index=int(row[2]),
                speaker_id=row[3],
                fold=int(row[4]),
            )
            for row in reader
        ]
    n_folds = max((e.fold for e in entries), default=-1) + 1
    return Manifest(entries=entries, n_folds=n_folds, root=root)
