"""Toolkit configuration: flat `key = value` sections, echoed for provenance.

Precedence is built-in defaults < config file < command-line flags. The
effective configuration is written back into every output directory as
`effective_config` so any artifact can be reproduced.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields
from pathlib import Path

from .augment import AugmentConfig
from .dsp import StftConfig
from .training import TrainConfig


def _parse_bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_opt_int(s: str):
    return int(s) if s.strip() else None


def _parse_opt_float(s: str):
    return float(s) if s.strip() else None


def _parse_ints(s: str) -> tuple[int, ...]:
    return tuple(int(v) for v in s.split(",") if v.strip())


# (section, key) -> (attribute, parser); key names are the on-disk contract
_SCHEMA = {
    ("stft", "win_length"): ("win_length", int),
    ("stft", "hop_length"): ("hop_length", int),
    ("stft", "fft_size"): ("fft_size", int),
    ("stft", "sample_rate"): ("sample_rate", int),
    ("mel", "n_mels"): ("n_mels", int),
    ("mel", "fmin"): ("fmin", float),
    ("mel", "fmax"): ("fmax", _parse_opt_float),
    ("mel", "n_coeffs"): ("n_coeffs", int),
    ("augment", "speed_min"): ("speed_min", float),
    ("augment", "speed_max"): ("speed_max", float),
    ("augment", "shift_max_s"): ("shift_max_s", float),
    ("augment", "noise_max"): ("noise_max", float),
    ("augment", "target_length"): ("target_length", int),
    ("augment", "seed"): ("augment_seed", int),
    ("augment", "augment_silence"): ("augment_silence", _parse_bool),
    ("model", "arch"): ("arch", str),
    ("model", "width_multiplier"): ("width_multiplier", int),
    ("model", "resnet_channels"): ("resnet_channels", int),
    ("model", "resnet_depth"): ("resnet_depth", _parse_ints),
    ("model", "representation"): ("representation", str),
    ("train", "epochs"): ("epochs", int),
    ("train", "batch_size"): ("batch_size", int),
    ("train", "learning_rate"): ("learning_rate", float),
    ("train", "batches_per_epoch"): ("batches_per_epoch", _parse_opt_int),
    ("data", "silence_threshold"): ("silence_threshold", float),
    ("data", "fragment_seconds"): ("fragment_seconds", float),
    ("data", "silence_cap"): ("silence_cap", _parse_opt_int),
    ("data", "folds"): ("folds", int),
    ("run", "seed"): ("seed", int),
    ("run", "jobs"): ("jobs", int),
}


@dataclass
class ToolkitConfig:
    win_length: int = 400
    hop_length: int = 160
    fft_size: int = 512
    sample_rate: int = 16000

    n_mels: int = 40
    fmin: float = 0.0
    fmax: float | None = None
    n_coeffs: int = 13

    speed_min: float = 0.7
    speed_max: float = 1.4
    shift_max_s: float = 0.1
    noise_max: float = 0.05
    target_length: int = 16384
    augment_seed: int = 0
    augment_silence: bool = False

    arch: str = "vgg1d"
    width_multiplier: int = 1
    resnet_channels: int = 32
    resnet_depth: tuple[int, ...] = (2, 2, 2)
    representation: str = "wave"

    epochs: int = 30
    batch_size: int = 24
    learning_rate: float = 1e-3
    batches_per_epoch: int | None = None

    silence_threshold: float = 0.01
    fragment_seconds: float = 1.0
    silence_cap: int | None = None
    folds: int = 4

    seed: int = 0
    jobs: int = 1

    def stft_config(self) -> StftConfig:
        return StftConfig(
            win_length=self.win_length,
            hop_length=self.hop_length,
            fft_size=self.fft_size,
            sample_rate=self.sample_rate,
        )

    def augment_config(self) -> AugmentConfig:
        return AugmentConfig(
            speed_min=self.speed_min,
            speed_max=self.speed_max,
            shift_max_s=self.shift_max_s,
            noise_max=self.noise_max,
            target_length=self.target_length,
            seed=self.augment_seed,
        )

    def train_config(self, **overrides) -> TrainConfig:
        kwargs = dict(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            batches_per_epoch=self.batches_per_epoch,
            seed=self.seed,
        )
        kwargs.update(overrides)
        return TrainConfig(**kwargs)

    def to_text(self) -> str:
        lines = []
        current = None
        by_attr = {attr: (section, key) for (section, key), (attr, _) in _SCHEMA.items()}
        for f in fields(self):
            section, key = by_attr[f.name]
            if section != current:
                if current is not None:
                    lines.append("")
                lines.append(f"[{section}]")
                current = section
            value = getattr(self, f.name)
            if value is None:
                value = ""
            elif isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


def load_config(path=None, overrides: dict | None = None) -> ToolkitConfig:
    """Build a config from defaults, an optional file, and flag overrides.

    `overrides` maps attribute names to already-typed values (None values
    are ignored so unset flags fall through).
    """
    cfg = ToolkitConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        with open(path, "r", encoding="utf-8") as f:
            parser.read_file(f)
        for section in parser.sections():
            for key, raw in parser.items(section):
                if (section, key) not in _SCHEMA:
                    raise ValueError(f"unknown config key [{section}] {key}")
                attr, parse = _SCHEMA[(section, key)]
                setattr(cfg, attr, parse(raw))
    for attr, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, attr, value)
    return cfg


def write_effective_config(cfg: ToolkitConfig, out_dir) -> None:
    """Echo the effective configuration into an output directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "effective_config").write_text(cfg.to_text(), encoding="utf-8")
