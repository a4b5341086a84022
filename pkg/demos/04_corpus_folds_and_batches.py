"""
Corpus management
=================

Generates a small synthetic corpus, scans it into a manifest, assigns
speaker-disjoint folds, and draws class-balanced batches. Background
noise recordings become one-second silence fragments; every speaker's
clips land in exactly one fold.
"""

import tempfile
from collections import Counter
from pathlib import Path

import numpy as np

from speechcmd import assign_folds, balanced_batches, scan_corpus, synthesize_corpus
from speechcmd.dataset import BACKGROUND_SPEAKER, speaker_fold_violations

root = Path(tempfile.mkdtemp()) / "corpus"
synthesize_corpus(root, n_per_class=8, seed=0, n_speakers=4)
print(f"corpus at {root}")

manifest = scan_corpus(root)
print(f"scanned {len(manifest)} entries")
for name, count in manifest.class_counts().items():
    if count:
        print(f"  {name:>8}: {count}")

speakers = [s for s in manifest.speakers() if s != BACKGROUND_SPEAKER]
print(f"speakers: {speakers}")

# folds are sets of speakers, so no voice leaks across the split
manifest = assign_folds(manifest, 4, seed=0)
print(f"fold sizes: {Counter(e.fold for e in manifest.entries)}")
print(f"speakers in more than one fold: {speaker_fold_violations(manifest) or 'none'}")

# every batch carries batch_size/12 entries of each class
stream = balanced_batches(manifest, fold_out=0, batch_size=24, rng=np.random.default_rng(0))
batch = next(stream)
counts = Counter(e.class_name for e in batch)
print(f"one batch of 24: {dict(counts)}")
print(f"held-out fold absent: {all(e.fold != 0 for e in batch)}")
