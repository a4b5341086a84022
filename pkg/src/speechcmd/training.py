"""Training loop, Adam optimizer, and checkpoint persistence.

Training is fully deterministic given a seed: weight init, batch
composition, dropout masks, and per-item augmentation each draw from
their own stream derived from the master seed, so reruns produce
bit-identical loss curves.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .dataset import Manifest, balanced_batches
from .dsp import scft_to_bytes, scft_from_bytes
from .nn import DivergedLoss, Network, ModelSpec, build_network, softmax_cross_entropy


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 24
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    batches_per_epoch: int | None = None  # default: one pass over the train split
    early_stop_train_acc: float | None = None
    early_stop_val_acc: float | None = None

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")


class Adam:
    """Adam with bias correction, updating parameters in place."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.value) for p in self.params]
        self.v = [np.zeros_like(p.value) for p in self.params]

    def step(self):
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, m, v in zip(self.params, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * p.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * p.grad**2
            p.value -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


@dataclass
class TrainResult:
    history: list[dict] = field(default_factory=list)
    best_val_acc: float = float("nan")
    best_epoch: int = -1
    epochs_run: int = 0


def _forward_accuracy(model: Network, entries, feature_fn, batch_size: int) -> float:
    """Eval-mode accuracy of the model over a list of manifest entries."""
    correct = 0
    for start in range(0, len(entries), batch_size):
        chunk = entries[start : start + batch_size]
        x = np.stack([feature_fn(e, None) for e in chunk])
        logits = model.forward(x, training=False)
        correct += int((logits.argmax(axis=1) == [e.class_index for e in chunk]).sum())
    return correct / len(entries) if entries else float("nan")


def train(
    model: Network,
    manifest: Manifest,
    fold_out: int,
    feature_fn,
    hyper: TrainConfig,
    eval_feature_fn=None,
) -> TrainResult:
    """Run the Adam training loop with class-balanced batches.

    `feature_fn(entry, rng)` maps a manifest entry to one input tensor;
    during training it receives a per-item generator (stable in the item
    counter, so augmentation is reproducible under any worker layout).
    `eval_feature_fn` (default: feature_fn with rng=None) is used for
    the held-out fold and for train-accuracy checks.

    Held-out accuracy is recorded per epoch and the parameters of the
    best epoch are restored before returning. Raises DivergedLoss as
    soon as a non-finite loss shows up.
    """
    eval_feature_fn = eval_feature_fn or feature_fn
    train_entries = [e for e in manifest.entries if fold_out < 0 or e.fold != fold_out]
    val_entries = [e for e in manifest.entries if fold_out >= 0 and e.fold == fold_out]

    batch_rng = np.random.default_rng([hyper.seed, 1])
    dropout_rng = np.random.default_rng([hyper.seed, 2])
    stream = balanced_batches(manifest, fold_out, hyper.batch_size, batch_rng)
    optimizer = Adam(model.params(), hyper.learning_rate, hyper.beta1, hyper.beta2, hyper.eps)

    steps = hyper.batches_per_epoch or max(1, -(-len(train_entries) // hyper.batch_size))
    result = TrainResult()
    best_state = None
    item_counter = 0

    for epoch in range(hyper.epochs):
        losses = []
        for _ in range(steps):
            batch = next(stream)
            xs = []
            for entry in batch:
                item_rng = np.random.default_rng([hyper.seed, 3, item_counter])
                xs.append(feature_fn(entry, item_rng))
                item_counter += 1
            x = np.stack(xs)
            targets = np.array([e.class_index for e in batch])
            logits = model.forward(x, training=True, rng=dropout_rng)
            loss, dlogits = softmax_cross_entropy(logits, targets)
            if not np.isfinite(loss):
                raise DivergedLoss(
                    f"non-finite loss at epoch {epoch}, step {len(losses)}: {loss}"
                )
            model.backward(dlogits)
            optimizer.step()
            losses.append(loss)

        record = {"epoch": epoch, "train_loss": float(np.mean(losses))}
        if val_entries:
            record["val_acc"] = _forward_accuracy(model, val_entries, eval_feature_fn, hyper.batch_size)
            if best_state is None or record["val_acc"] > result.best_val_acc:
                result.best_val_acc = record["val_acc"]
                result.best_epoch = epoch
                best_state = [a.copy() for a in model.state_arrays()]
        if hyper.early_stop_train_acc is not None:
            record["train_acc"] = _forward_accuracy(model, train_entries, eval_feature_fn, hyper.batch_size)
        result.history.append(record)
        result.epochs_run = epoch + 1

        if (
            hyper.early_stop_train_acc is not None
            and record["train_acc"] >= hyper.early_stop_train_acc
        ):
            break
        if (
            hyper.early_stop_val_acc is not None
            and val_entries
            and record["val_acc"] >= hyper.early_stop_val_acc
        ):
            break

    if best_state is not None:
        for dst, src in zip(model.state_arrays(), best_state):
            dst[...] = src
    return result


# --- SCNN checkpoint container ----------------------------------------------
#
# Layout: magic "SCNN", version byte 0x01, u32 little-endian length of the
# UTF-8 model-spec text block, the text block, then every state array
# (parameters and batchnorm running statistics, in layer order) as an
# SCFT tensor.

SCNN_MAGIC = b"SCNN"
SCNN_VERSION = 1


def checkpoint_to_bytes(model: Network) -> bytes:
    text = model.spec.to_text().encode("utf-8")
    blob = [SCNN_MAGIC, bytes([SCNN_VERSION]), struct.pack("<I", len(text)), text]
    for arr in model.state_arrays():
        blob.append(scft_to_bytes(arr, "raw"))
    return b"".join(blob)


def checkpoint_from_bytes(data: bytes) -> Network:
    if data[:4] != SCNN_MAGIC:
        raise ValueError("not an SCNN checkpoint (bad magic)")
    if data[4] != SCNN_VERSION:
        raise ValueError(f"unsupported SCNN version {data[4]}")
    (text_len,) = struct.unpack("<I", data[5:9])
    text = data[9 : 9 + text_len].decode("utf-8")
    spec = ModelSpec.from_text(text)
    model = build_network(spec, seed=0)
    offset = 9 + text_len
    for arr in model.state_arrays():
        loaded, _, offset = scft_from_bytes(data, offset)
        if loaded.shape != arr.shape:
            raise ValueError(
                f"checkpoint tensor shape {loaded.shape} does not match model {arr.shape}"
            )
        arr[...] = loaded
    if offset != len(data):
        raise ValueError("checkpoint has trailing data")
    return model


def save_checkpoint(path, model: Network) -> None:
    with open(path, "wb") as f:
        f.write(checkpoint_to_bytes(model))


def load_checkpoint(path) -> Network:
    with open(path, "rb") as f:
        return checkpoint_from_bytes(f.read())
