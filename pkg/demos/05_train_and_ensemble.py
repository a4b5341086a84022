"""
Training and ensembling
=======================

A miniature end-to-end run: synthesize a corpus, hold out one
speaker-disjoint fold, train two small 2D CNNs on different feature
representations (mel and MFCC), and combine them by softmax averaging.
Finishes in about a minute on one core; the full-size experiment lives
in tests/test_acceptance.py.
"""

import tempfile
from pathlib import Path

import numpy as np

from speechcmd import (
    TrainConfig,
    assign_folds,
    build_cnn2d,
    build_network,
    confusion_matrix,
    ensemble_mean,
    predict_batch,
    scan_corpus,
    synthesize_corpus,
    train,
)
from speechcmd.config import ToolkitConfig
from speechcmd.evaluate import format_confusion
from speechcmd.features import FeatureExtractor, feature_shape

root = Path(tempfile.mkdtemp()) / "corpus"
synthesize_corpus(root, n_per_class=12, seed=3, n_speakers=4)
manifest = assign_folds(scan_corpus(root), 4, seed=3)
held_out = [e for e in manifest.entries if e.fold == 0]
print(f"{len(manifest)} entries, {len(held_out)} held out (fold 0)")

cfg = ToolkitConfig()
members = []
for seed, representation in ((1, "mel"), (2, "mfcc")):
    features = FeatureExtractor(cfg, representation, root, augment=False)
    model = build_network(build_cnn2d(feature_shape(cfg, representation)[1:]), seed=seed)
    hyper = TrainConfig(epochs=4, batch_size=12, seed=seed)
    result = train(model, manifest, fold_out=0, feature_fn=features, hyper=hyper)
    print(f"cnn2d on {representation}: held-out accuracy {result.best_val_acc:.3f}")
    members.append((representation, model, features))

# softmax-mean ensemble over the held-out fold
pairs = []
for entry in held_out:
    member_preds = []
    for representation, model, features in members:
        x = features(entry)[None, ...]
        member_preds.append(predict_batch(model, x, source_model=representation)[0])
    combined = ensemble_mean(member_preds)
    pairs.append((entry.class_index, combined.argmax))

acc = np.mean([t == p for t, p in pairs])
print(f"ensemble held-out accuracy: {acc:.3f}")
print(format_confusion(confusion_matrix(pairs)))
