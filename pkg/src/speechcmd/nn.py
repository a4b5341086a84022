"""Minimal tensor network engine with hand-written backpropagation.

The layer set is exactly what the 1D/2D keyword-spotting networks need:
1D/2D convolution with same padding, batch normalization, ReLU, max
pooling, dropout, dense, flatten, global average pooling, identity
residual blocks, and softmax cross-entropy. Every backward pass is
verified against central finite differences in the test suite, which is
why the layers stay dtype-agnostic: float32 for training, float64 for
gradient checking.

Networks are described by a ModelSpec (a list of layer descriptors plus
the input shape) that serializes to a small text block used inside
checkpoints; build_network instantiates it with He-uniform weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NUM_CLASSES = 12


class DivergedLoss(RuntimeError):
    """Training produced a non-finite loss."""


class Param:
    """A trainable array and its gradient buffer."""

    def __init__(self, value: np.ndarray):
        self.value = value
        self.grad = np.zeros_like(value)


def _he_uniform(rng: np.random.Generator, shape, fan_in: int, dtype) -> np.ndarray:
    limit = math.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class Layer:
    """Base layer: forward caches whatever backward needs."""

    def forward(self, x, training: bool = False, rng=None):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def params(self) -> list[Param]:
        return []

    def state_arrays(self) -> list[np.ndarray]:
        """All persistent arrays (parameters plus buffers) in fixed order."""
        return [p.value for p in self.params()]

    def _need_cache(self, cache):
        if cache is None:
            raise RuntimeError(f"{type(self).__name__}.backward called before forward")
        return cache


class Conv1d(Layer):
    """Same-padded 1D cross-correlation over [batch, channels, length].

    Odd kernels pad symmetrically; even kernels (the ResNet stem uses 80)
    pad one extra zero on the right. Output length is ceil(length/stride).
    """

    def __init__(self, in_channels, out_channels, kernel, stride=1, rng=None, dtype=np.float32):
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        self.stride = stride
        self.pad_left = (kernel - 1) // 2
        self.pad_right = kernel - 1 - self.pad_left
        rng = rng or np.random.default_rng(0)
        self.weight = Param(_he_uniform(rng, (out_channels, in_channels, kernel), in_channels * kernel, dtype))
        self.bias = Param(np.zeros(out_channels, dtype=dtype))
        self._cache = None

    def forward(self, x, training=False, rng=None):
        batch, channels, length = x.shape
        if channels != self.in_channels:
            raise ValueError(f"expected {self.in_channels} input channels, got {channels}")
        out_len = -(-length // self.stride)
        xp = np.pad(x, ((0, 0), (0, 0), (self.pad_left, self.pad_right)))
        span = (out_len - 1) * self.stride + 1
        acc = np.zeros((self.out_channels, batch, out_len), dtype=x.dtype)
        w = self.weight.value
        for k in range(self.kernel):
            xs = xp[:, :, k : k + span : self.stride]
            acc += np.tensordot(w[:, :, k], xs, axes=([1], [1]))
        self._cache = (xp, length, out_len, span)
        return acc.transpose(1, 0, 2) + self.bias.value[None, :, None]

    def backward(self, dout):
        xp, length, out_len, span = self._need_cache(self._cache)
        w = self.weight.value
        dw = np.zeros_like(w)
        dxp = np.zeros_like(xp)
        dout_t = dout.transpose(1, 0, 2)  # [out, batch, L_out]
        for k in range(self.kernel):
            xs = xp[:, :, k : k + span : self.stride]
            dw[:, :, k] = np.tensordot(dout_t, xs, axes=([1, 2], [0, 2]))
            dxs = np.tensordot(dout, w[:, :, k], axes=([1], [0]))  # [batch, L_out, in]
            dxp[:, :, k : k + span : self.stride] += dxs.transpose(0, 2, 1)
        self.weight.grad = dw
        self.bias.grad = dout.sum(axis=(0, 2))
        return dxp[:, :, self.pad_left : self.pad_left + length]

    def params(self):
        return [self.weight, self.bias]


class Conv2d(Layer):
    """Same-padded stride-1 2D cross-correlation over [batch, ch, h, w]."""

    def __init__(self, in_channels, out_channels, kernel=3, rng=None, dtype=np.float32):
        if kernel % 2 != 1:
            raise ValueError("conv2d kernel must be odd")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        self.pad = (kernel - 1) // 2
        rng = rng or np.random.default_rng(0)
        fan_in = in_channels * kernel * kernel
        self.weight = Param(_he_uniform(rng, (out_channels, in_channels, kernel, kernel), fan_in, dtype))
        self.bias = Param(np.zeros(out_channels, dtype=dtype))
        self._cache = None

    def forward(self, x, training=False, rng=None):
        batch, channels, height, width = x.shape
        if channels != self.in_channels:
            raise ValueError(f"expected {self.in_channels} input channels, got {channels}")
        p = self.pad
        xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
        acc = np.zeros((self.out_channels, batch, height, width), dtype=x.dtype)
        w = self.weight.value
        for ki in range(self.kernel):
            for kj in range(self.kernel):
                xs = xp[:, :, ki : ki + height, kj : kj + width]
                acc += np.tensordot(w[:, :, ki, kj], xs, axes=([1], [1]))
        self._cache = (xp, height, width)
        return acc.transpose(1, 0, 2, 3) + self.bias.value[None, :, None, None]

    def backward(self, dout):
        xp, height, width = self._need_cache(self._cache)
        w = self.weight.value
        dw = np.zeros_like(w)
        dxp = np.zeros_like(xp)
        dout_t = dout.transpose(1, 0, 2, 3)
        for ki in range(self.kernel):
            for kj in range(self.kernel):
                xs = xp[:, :, ki : ki + height, kj : kj + width]
                dw[:, :, ki, kj] = np.tensordot(dout_t, xs, axes=([1, 2, 3], [0, 2, 3]))
                dxs = np.tensordot(dout, w[:, :, ki, kj], axes=([1], [0]))  # [b, h, w, in]
                dxp[:, :, ki : ki + height, kj : kj + width] += dxs.transpose(0, 3, 1, 2)
        self.weight.grad = dw
        self.bias.grad = dout.sum(axis=(0, 2, 3))
        p = self.pad
        return dxp[:, :, p : p + height, p : p + width]

    def params(self):
        return [self.weight, self.bias]


class BatchNorm(Layer):
    """Per-channel normalization over the batch (and spatial) axes.

    Channel axis is 1 for conv activations and the feature axis for
    dense activations. Running statistics follow the batch statistics
    with momentum 0.9 and are used verbatim in eval mode.
    """

    def __init__(self, num_features, momentum=0.9, eps=1e-5, dtype=np.float32):
        self.num_features = num_features
        self.momentum = momentum
        self.eps = eps
        self.gamma = Param(np.ones(num_features, dtype=dtype))
        self.beta = Param(np.zeros(num_features, dtype=dtype))
        self.running_mean = np.zeros(num_features, dtype=dtype)
        self.running_var = np.ones(num_features, dtype=dtype)
        self._cache = None

    def _spread(self, vec, ndim):
        shape = [1] * ndim
        shape[1] = self.num_features
        return vec.reshape(shape)

    def forward(self, x, training=False, rng=None):
        axes = (0,) + tuple(range(2, x.ndim))
        if training:
            if x.shape[0] < 2:
                raise ValueError("batch normalization needs batch size >= 2 in training mode")
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            self.running_mean *= self.momentum
            self.running_mean += (1.0 - self.momentum) * mean.astype(self.running_mean.dtype)
            self.running_var *= self.momentum
            self.running_var += (1.0 - self.momentum) * var.astype(self.running_var.dtype)
        else:
            mean = self.running_mean.astype(x.dtype)
            var = self.running_var.astype(x.dtype)
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - self._spread(mean, x.ndim)) * self._spread(inv_std, x.ndim)
        m = x.size // self.num_features
        self._cache = (xhat, inv_std, axes, m, training)
        return self._spread(self.gamma.value, x.ndim) * xhat + self._spread(self.beta.value, x.ndim)

    def backward(self, dout):
        xhat, inv_std, axes, m, training = self._need_cache(self._cache)
        dgamma = (dout * xhat).sum(axis=axes)
        dbeta = dout.sum(axis=axes)
        self.gamma.grad = dgamma
        self.beta.grad = dbeta
        g = self._spread(self.gamma.value * inv_std, dout.ndim)
        if training:
            dx = g / m * (
                m * dout
                - self._spread(dbeta, dout.ndim)
                - xhat * self._spread(dgamma, dout.ndim)
            )
        else:
            dx = g * dout
        return dx

    def params(self):
        return [self.gamma, self.beta]

    def state_arrays(self):
        return [self.gamma.value, self.beta.value, self.running_mean, self.running_var]


class ReLU(Layer):
    def __init__(self):
        self._cache = None

    def forward(self, x, training=False, rng=None):
        mask = x > 0
        self._cache = mask
        return x * mask

    def backward(self, dout):
        mask = self._need_cache(self._cache)
        return dout * mask


class MaxPool1d(Layer):
    """Non-overlapping window max; length must divide by the factor."""

    def __init__(self, factor):
        self.factor = factor
        self._cache = None

    def forward(self, x, training=False, rng=None):
        batch, channels, length = x.shape
        if length % self.factor != 0:
            raise ValueError(f"length {length} not divisible by pool factor {self.factor}")
        windows = x.reshape(batch, channels, length // self.factor, self.factor)
        idx = windows.argmax(axis=-1)
        self._cache = (idx, windows.shape)
        return np.take_along_axis(windows, idx[..., None], axis=-1)[..., 0]

    def backward(self, dout):
        idx, shape = self._need_cache(self._cache)
        dwin = np.zeros(shape, dtype=dout.dtype)
        np.put_along_axis(dwin, idx[..., None], dout[..., None], axis=-1)
        return dwin.reshape(shape[0], shape[1], shape[2] * shape[3])


class MaxPool2d(Layer):
    """2x2-style pooling; odd trailing rows/columns are dropped."""

    def __init__(self, factor=2):
        self.factor = factor
        self._cache = None

    def forward(self, x, training=False, rng=None):
        batch, channels, height, width = x.shape
        f = self.factor
        h2, w2 = height // f, width // f
        crop = x[:, :, : h2 * f, : w2 * f]
        windows = (
            crop.reshape(batch, channels, h2, f, w2, f)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(batch, channels, h2, w2, f * f)
        )
        idx = windows.argmax(axis=-1)
        self._cache = (idx, x.shape, h2, w2)
        return np.take_along_axis(windows, idx[..., None], axis=-1)[..., 0]

    def backward(self, dout):
        idx, in_shape, h2, w2 = self._need_cache(self._cache)
        batch, channels, height, width = in_shape
        f = self.factor
        dwin = np.zeros((batch, channels, h2, w2, f * f), dtype=dout.dtype)
        np.put_along_axis(dwin, idx[..., None], dout[..., None], axis=-1)
        dcrop = (
            dwin.reshape(batch, channels, h2, w2, f, f)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(batch, channels, h2 * f, w2 * f)
        )
        dx = np.zeros(in_shape, dtype=dout.dtype)
        dx[:, :, : h2 * f, : w2 * f] = dcrop
        return dx


class Dropout(Layer):
    """Inverted dropout: survivors are scaled so eval needs no rescale."""

    def __init__(self, rate):
        if not (0 <= rate < 1):
            raise ValueError("dropout rate must be in [0, 1)")
        self.rate = rate
        self._cache = None

    def forward(self, x, training=False, rng=None):
        if not training or self.rate == 0:
            self._cache = 1.0
            return x
        if rng is None:
            raise ValueError("dropout in training mode requires an rng")
        mask = (rng.random(x.shape) >= self.rate).astype(x.dtype) / (1.0 - self.rate)
        self._cache = mask
        return x * mask

    def backward(self, dout):
        mask = self._need_cache(self._cache)
        return dout * mask


class Flatten(Layer):
    def __init__(self):
        self._cache = None

    def forward(self, x, training=False, rng=None):
        self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        shape = self._need_cache(self._cache)
        return dout.reshape(shape)


class GlobalAvgPool1d(Layer):
    def __init__(self):
        self._cache = None

    def forward(self, x, training=False, rng=None):
        self._cache = x.shape
        return x.mean(axis=2)

    def backward(self, dout):
        shape = self._need_cache(self._cache)
        return np.broadcast_to(dout[:, :, None] / shape[2], shape).astype(dout.dtype)


class Dense(Layer):
    def __init__(self, in_features, out_features, rng=None, dtype=np.float32):
        self.in_features = in_features
        self.out_features = out_features
        rng = rng or np.random.default_rng(0)
        self.weight = Param(_he_uniform(rng, (in_features, out_features), in_features, dtype))
        self.bias = Param(np.zeros(out_features, dtype=dtype))
        self._cache = None

    def forward(self, x, training=False, rng=None):
        if x.shape[1] != self.in_features:
            raise ValueError(f"expected {self.in_features} input features, got {x.shape[1]}")
        self._cache = x
        return x @ self.weight.value + self.bias.value

    def backward(self, dout):
        x = self._need_cache(self._cache)
        self.weight.grad = x.T @ dout
        self.bias.grad = dout.sum(axis=0)
        return dout @ self.weight.value.T

    def params(self):
        return [self.weight, self.bias]


class Softmax(Layer):
    """Row-wise softmax over the class axis."""

    def __init__(self):
        self._cache = None

    def forward(self, x, training=False, rng=None):
        z = x - x.max(axis=-1, keepdims=True)
        e = np.exp(z)
        p = e / e.sum(axis=-1, keepdims=True)
        self._cache = p
        return p

    def backward(self, dout):
        p = self._need_cache(self._cache)
        inner = (dout * p).sum(axis=-1, keepdims=True)
        return p * (dout - inner)


class ResidualBlock1d(Layer):
    """Identity residual unit: two same-width convs, skip added before ReLU."""

    def __init__(self, channels, kernel=9, rng=None, dtype=np.float32):
        self.conv1 = Conv1d(channels, channels, kernel, rng=rng, dtype=dtype)
        self.bn1 = BatchNorm(channels, dtype=dtype)
        self.relu1 = ReLU()
        self.conv2 = Conv1d(channels, channels, kernel, rng=rng, dtype=dtype)
        self.bn2 = BatchNorm(channels, dtype=dtype)
        self.relu_out = ReLU()

    def forward(self, x, training=False, rng=None):
        h = self.conv1.forward(x, training, rng)
        h = self.bn1.forward(h, training, rng)
        h = self.relu1.forward(h, training, rng)
        h = self.conv2.forward(h, training, rng)
        h = self.bn2.forward(h, training, rng)
        return self.relu_out.forward(x + h, training, rng)

    def backward(self, dout):
        dsum = self.relu_out.backward(dout)
        dh = self.bn2.backward(dsum)
        dh = self.conv2.backward(dh)
        dh = self.relu1.backward(dh)
        dh = self.bn1.backward(dh)
        dh = self.conv1.backward(dh)
        return dh + dsum

    def params(self):
        return (
            self.conv1.params() + self.bn1.params()
            + self.conv2.params() + self.bn2.params()
        )

    def state_arrays(self):
        return (
            self.conv1.state_arrays() + self.bn1.state_arrays()
            + self.conv2.state_arrays() + self.bn2.state_arrays()
        )


def softmax_cross_entropy(logits, targets):
    """Mean negative log-likelihood under a max-subtracted softmax.

    Returns (loss, gradient w.r.t. logits). The gradient is
    (softmax - onehot) / batch in the dtype of the logits; the loss is
    computed in float64.
    """
    z = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=1, keepdims=True)
    batch = z.shape[0]
    rows = np.arange(batch)
    loss = float(-np.log(p[rows, targets]).mean())
    grad = p
    grad[rows, targets] -= 1.0
    grad /= batch
    return loss, grad.astype(np.asarray(logits).dtype)


# --- model descriptions ------------------------------------------------------


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    args: tuple = ()  # sorted (key, value) pairs

    def get(self, key, default=None):
        return dict(self.args).get(key, default)


def layer_spec(kind: str, **kwargs) -> LayerSpec:
    return LayerSpec(kind=kind, args=tuple(sorted(kwargs.items())))


@dataclass
class ModelSpec:
    """Declarative network description: input shape plus layer list."""

    input_shape: tuple[int, ...]  # (channels, length) or (channels, h, w)
    layers: list[LayerSpec] = field(default_factory=list)

    def to_text(self) -> str:
        lines = ["input " + "x".join(str(d) for d in self.input_shape)]
        for spec in self.layers:
            parts = [spec.kind] + [f"{k}={_fmt_value(v)}" for k, v in spec.args]
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ModelSpec":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("input "):
            raise ValueError("model spec must start with an input line")
        input_shape = tuple(int(d) for d in lines[0].split()[1].split("x"))
        layers = []
        for line in lines[1:]:
            parts = line.split()
            kwargs = {}
            for part in parts[1:]:
                key, _, value = part.partition("=")
                kwargs[key] = _parse_value(value)
            layers.append(layer_spec(parts[0], **kwargs))
        return cls(input_shape=input_shape, layers=layers)


def _fmt_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_value(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


class Network:
    """An instantiated ModelSpec: ordered layers sharing one forward pass."""

    def __init__(self, spec: ModelSpec, layers: list[Layer]):
        self.spec = spec
        self.layers = layers

    def forward(self, x, training: bool = False, rng=None):
        for layer in self.layers:
            x = layer.forward(x, training=training, rng=rng)
        return x

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout

    def params(self) -> list[Param]:
        out = []
        for layer in self.layers:
            out.extend(layer.params())
        return out

    def state_arrays(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend(layer.state_arrays())
        return out

    def num_parameters(self) -> int:
        return sum(p.value.size for p in self.params())


def build_network(spec: ModelSpec, seed: int = 0, dtype=np.float32) -> Network:
    """Instantiate a ModelSpec, inferring per-layer input widths.

    Weight initialization is He-uniform from a generator seeded with
    `seed`, consumed in layer order, so a (spec, seed) pair always
    yields the same parameters.
    """
    rng = np.random.default_rng(seed)
    shape = tuple(spec.input_shape)
    layers: list[Layer] = []
    for ls in spec.layers:
        kind = ls.kind
        if kind == "conv1d":
            if len(shape) != 2:
                raise ValueError(f"conv1d needs (channels, length) input, have {shape}")
            stride = ls.get("stride", 1)
            layers.append(Conv1d(shape[0], ls.get("out"), ls.get("kernel"), stride, rng=rng, dtype=dtype))
            shape = (ls.get("out"), -(-shape[1] // stride))
        elif kind == "conv2d":
            if len(shape) != 3:
                raise ValueError(f"conv2d needs (channels, h, w) input, have {shape}")
            layers.append(Conv2d(shape[0], ls.get("out"), ls.get("kernel", 3), rng=rng, dtype=dtype))
            shape = (ls.get("out"), shape[1], shape[2])
        elif kind == "batchnorm":
            layers.append(BatchNorm(shape[0], dtype=dtype))
        elif kind == "relu":
            layers.append(ReLU())
        elif kind == "maxpool":
            f = ls.get("factor")
            if len(shape) == 2:
                if shape[1] % f != 0:
                    raise ValueError(f"length {shape[1]} not divisible by pool factor {f}")
                layers.append(MaxPool1d(f))
                shape = (shape[0], shape[1] // f)
            else:
                layers.append(MaxPool2d(f))
                shape = (shape[0], shape[1] // f, shape[2] // f)
        elif kind == "residual_block":
            ch = ls.get("channels")
            if ch != shape[0]:
                raise ValueError(f"identity block needs {shape[0]} channels, spec says {ch}")
            for _ in range(ls.get("repeats", 1)):
                layers.append(ResidualBlock1d(ch, ls.get("kernel", 9), rng=rng, dtype=dtype))
        elif kind == "gap":
            layers.append(GlobalAvgPool1d())
            shape = (shape[0],)
        elif kind == "flatten":
            layers.append(Flatten())
            shape = (int(np.prod(shape)),)
        elif kind == "dense":
            if len(shape) != 1:
                raise ValueError("dense requires flattened input")
            layers.append(Dense(shape[0], ls.get("units"), rng=rng, dtype=dtype))
            shape = (ls.get("units"),)
        elif kind == "dropout":
            layers.append(Dropout(ls.get("rate")))
        elif kind == "softmax":
            layers.append(Softmax())
        else:
            raise ValueError(f"unknown layer kind {kind!r}")
    return Network(spec, layers)


VGG1D_CHANNELS = (8, 16, 32, 64, 128)


def build_vgg1d(
    width_multiplier: int = 1,
    input_length: int = 16384,
    dense_units: tuple[int, ...] = (128, 128),
) -> ModelSpec:
    """VGG-style 1D network over raw waveforms.

    Five conv stages with kernel 9 (single conv in the first two stages,
    double in the rest), each closed by a factor-4 max pool, so 16384
    samples shrink to a feature map of spatial length 16. The classifier
    is two dense+BN+ReLU+dropout(0.5) blocks and a 12-way output.
    """
    if width_multiplier < 1:
        raise ValueError("width_multiplier must be >= 1")
    layers = []
    for stage, base in enumerate(VGG1D_CHANNELS):
        ch = base * width_multiplier
        for _ in range(1 if stage < 2 else 2):
            layers.append(layer_spec("conv1d", out=ch, kernel=9, stride=1))
            layers.append(layer_spec("batchnorm"))
            layers.append(layer_spec("relu"))
        layers.append(layer_spec("maxpool", factor=4))
    layers.append(layer_spec("flatten"))
    for units in dense_units:
        layers.append(layer_spec("dense", units=units))
        layers.append(layer_spec("batchnorm"))
        layers.append(layer_spec("relu"))
        layers.append(layer_spec("dropout", rate=0.5))
    layers.append(layer_spec("dense", units=NUM_CLASSES))
    return ModelSpec(input_shape=(1, input_length), layers=layers)


def build_resnet1d(
    depth_config: tuple[int, ...] = (2, 2, 2),
    channels: int = 32,
    input_length: int = 16384,
) -> ModelSpec:
    """ResNet-style 1D network: wide-kernel stem, identity blocks, GAP.

    The stem convolution has kernel 80 and stride 4 followed by a
    factor-4 pool for fast early downsampling; the trunk is stages of
    kernel-9 identity residual blocks separated by factor-4 pools.
    """
    layers = [
        layer_spec("conv1d", out=channels, kernel=80, stride=4),
        layer_spec("batchnorm"),
        layer_spec("relu"),
        layer_spec("maxpool", factor=4),
    ]
    for i, repeats in enumerate(depth_config):
        if i > 0:
            layers.append(layer_spec("maxpool", factor=4))
        layers.append(layer_spec("residual_block", channels=channels, repeats=repeats, kernel=9))
    layers.append(layer_spec("gap"))
    layers.append(layer_spec("dense", units=NUM_CLASSES))
    return ModelSpec(input_shape=(1, input_length), layers=layers)


def build_cnn2d(
    input_shape: tuple[int, int],
    channels: tuple[int, ...] = (16, 32, 64),
    dense_units: int = 128,
) -> ModelSpec:
    """Small 2D CNN over spectrogram-like maps (bins x frames).

    Three conv3x3+BN+ReLU+pool2 stages; odd spatial sizes are floored by
    the pooling, so the Table-style odd resolutions are accepted as-is.
    """
    bins, frames = input_shape
    layers = []
    for ch in channels:
        layers.append(layer_spec("conv2d", out=ch, kernel=3))
        layers.append(layer_spec("batchnorm"))
        layers.append(layer_spec("relu"))
        layers.append(layer_spec("maxpool", factor=2))
    layers.append(layer_spec("flatten"))
    layers.append(layer_spec("dense", units=dense_units))
    layers.append(layer_spec("relu"))
    layers.append(layer_spec("dropout", rate=0.5))
    layers.append(layer_spec("dense", units=NUM_CLASSES))
    return ModelSpec(input_shape=(1, bins, frames), layers=layers)
