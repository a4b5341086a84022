"""Inference and ensembling: softmax predictions, mean/vote combination,
unknown-class thresholding, and accuracy/confusion reporting."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dataset import CLASS_NAMES, NUM_CLASSES, UNKNOWN_INDEX
from .nn import Network


@dataclass
class Prediction:
    """A 12-way probability distribution for one input."""

    probs: np.ndarray
    source_model: str = ""

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float32)
        if self.probs.shape != (NUM_CLASSES,):
            raise ValueError(f"expected {NUM_CLASSES} probabilities, got {self.probs.shape}")

    @property
    def argmax(self) -> int:
        # ties resolve to the lowest class index
        return int(np.argmax(self.probs))


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits.astype(np.float64)
    z -= z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def predict(model: Network, features: np.ndarray, source_model: str = "") -> Prediction:
    """Eval-mode forward pass plus softmax for a single input."""
    logits = model.forward(features[None, ...], training=False)
    return Prediction(probs=_softmax(logits[0]).astype(np.float32), source_model=source_model)


def predict_batch(model: Network, features: np.ndarray, source_model: str = "") -> list[Prediction]:
    logits = model.forward(features, training=False)
    probs = _softmax(logits)
    return [Prediction(probs=p.astype(np.float32), source_model=source_model) for p in probs]


def ensemble_mean(predictions: list[Prediction]) -> Prediction:
    """Elementwise arithmetic mean of member probabilities.

    Members are summed in sorted source_model order so the result is a
    canonical, order-independent reference.
    """
    if not predictions:
        raise ValueError("cannot ensemble an empty prediction list")
    ordered = sorted(predictions, key=lambda p: p.source_model)
    stacked = np.stack([p.probs.astype(np.float64) for p in ordered])
    return Prediction(probs=stacked.mean(axis=0).astype(np.float32), source_model="ensemble")


def majority_vote(predictions: list[Prediction]) -> int:
    """Most frequent argmax; ties break on summed probability, then index."""
    if not predictions:
        raise ValueError("cannot vote over an empty prediction list")
    votes = np.zeros(NUM_CLASSES, dtype=np.int64)
    summed = np.zeros(NUM_CLASSES, dtype=np.float64)
    for p in predictions:
        votes[p.argmax] += 1
        summed += p.probs.astype(np.float64)
    best = np.flatnonzero(votes == votes.max())
    if len(best) == 1:
        return int(best[0])
    return int(best[np.argmax(summed[best])])


def apply_unknown_threshold(pred: Prediction, tau: float) -> int:
    """Redirect weak unknown-class wins to the runner-up class.

    If the argmax is unknown but its probability falls below tau, the
    second-highest class is returned instead; otherwise plain argmax.
    """
    if not (0 <= tau <= 1):
        raise ValueError("tau must be in [0, 1]")
    top = pred.argmax
    if top == UNKNOWN_INDEX and pred.probs[UNKNOWN_INDEX] < tau:
        order = np.argsort(-pred.probs, kind="stable")
        return int(order[1])
    return top


def confusion_matrix(pairs) -> np.ndarray:
    """12x12 count matrix indexed [true][predicted]."""
    matrix = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for true, predicted in pairs:
        if not (0 <= true < NUM_CLASSES and 0 <= predicted < NUM_CLASSES):
            raise ValueError(f"class index out of range: ({true}, {predicted})")
        matrix[true][predicted] += 1
    return matrix


def accuracy(pairs) -> float:
    matrix = confusion_matrix(pairs)
    total = matrix.sum()
    if total == 0:
        raise ValueError("no prediction pairs")
    return float(np.trace(matrix) / total)


def format_confusion(matrix: np.ndarray) -> str:
    """Plain-text confusion table with class names."""
    width = max(max(len(n) for n in CLASS_NAMES), len(str(matrix.max()))) + 1
    lines = ["".rjust(width) + "".join(n.rjust(width) for n in CLASS_NAMES)]
    for i, name in enumerate(CLASS_NAMES):
        lines.append(name.rjust(width) + "".join(str(v).rjust(width) for v in matrix[i]))
    return "\n".join(lines)


# --- predictions CSV (competition submission shape) --------------------------


@dataclass
class PredictionRow:
    fname: str
    label: str
    probs: np.ndarray | None = None


def save_predictions(path, rows: list[PredictionRow]) -> None:
    """Write `fname,label[,p0..p11]` rows; probabilities where available."""
    with_probs = any(r.probs is not None for r in rows)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        header = ["fname", "label"]
        if with_probs:
            header += [f"p{i}" for i in range(NUM_CLASSES)]
        writer.writerow(header)
        for r in rows:
            row = [r.fname, r.label]
            if with_probs:
                if r.probs is None:
                    raise ValueError(f"row {r.fname} is missing probabilities")
                row += [f"{p:.8g}" for p in r.probs]
            writer.writerow(row)


def load_predictions(path) -> list[PredictionRow]:
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or header[:2] != ["fname", "label"]:
            raise ValueError(f"predictions file {path} must start with fname,label")
        has_probs = len(header) == 2 + NUM_CLASSES
        rows = []
        for row in reader:
            probs = np.array([float(v) for v in row[2:]], dtype=np.float32) if has_probs else None
            rows.append(PredictionRow(fname=row[0], label=row[1], probs=probs))
    return rows
