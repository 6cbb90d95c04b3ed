"""Flat key-value run configuration shared by all CLI commands.

The file format is one ``key = value`` per line with ``#`` comments. Every
key must be known; typos are rejected rather than silently ignored. CLI
overrides are applied after the file is read.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError
from .network import TrainConfig
from .simulate import (
    InverseLinearParams,
    Layout,
    PathlossParams,
    LAYOUT_KINDS,
    MEASUREMENT_MODELS,
)


@dataclass
class RunConfig:
    """Union of layout, measurement-model, and training settings."""

    # layout
    layout: str = "circle"
    landmarks: int = 30
    extent: float = 24.0
    radius: float | None = None
    # measurement generation
    measurement_model: str = "pathloss"
    measurements: int = 100_000
    margin: float = 0.1
    tx_power: float = 20.0
    pathloss_exponent: float = 2.0
    shadowing_std: float = 2.0
    signal_scale: float = 10.0
    signal_noise_std: float = 0.1
    min_distance: float = 0.5
    # training
    context_size: int = 4
    dim: int = 2
    train_fraction: float = 0.8
    learning_rate: float = 0.05
    batch_size: int = 256
    max_epochs: int = 500
    stop_threshold: float = 0.1
    optimizer: str = "sgd"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 1

    def validate(self) -> None:
        if self.layout not in LAYOUT_KINDS:
            raise ConfigError(f"layout must be one of {LAYOUT_KINDS}, got {self.layout!r}")
        if self.measurement_model not in MEASUREMENT_MODELS:
            raise ConfigError(
                f"measurement_model must be one of {MEASUREMENT_MODELS}, "
                f"got {self.measurement_model!r}"
            )
        if self.landmarks < 2:
            raise ConfigError("landmarks must be >= 2")
        if self.measurements < 1:
            raise ConfigError("measurements must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        if not 2 <= self.context_size <= self.landmarks:
            raise ConfigError(
                f"context_size must be in [2, landmarks={self.landmarks}], "
                f"got {self.context_size}"
            )
        try:
            self.to_layout()
            self.to_train_config()
            if self.measurement_model == "pathloss":
                self.to_pathloss_params()
            else:
                self.to_inverse_linear_params()
        except (ValueError, ConfigError) as exc:
            raise ConfigError(str(exc)) from None
        if self.margin < 0:
            raise ConfigError("margin must be nonnegative")

    def to_layout(self) -> Layout:
        return Layout(
            kind=self.layout,
            landmarks=self.landmarks,
            extent=self.extent,
            seed=self.seed,
            radius=self.radius,
        )

    def to_pathloss_params(self) -> PathlossParams:
        return PathlossParams(
            tx_power=self.tx_power,
            exponent=self.pathloss_exponent,
            noise_std=self.shadowing_std,
            min_distance=self.min_distance,
        )

    def to_inverse_linear_params(self) -> InverseLinearParams:
        return InverseLinearParams(
            scale=self.signal_scale,
            noise_std=self.signal_noise_std,
            min_distance=self.min_distance,
        )

    def to_train_config(self) -> TrainConfig:
        return TrainConfig(
            context_size=self.context_size,
            dim=self.dim,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            stop_threshold=self.stop_threshold,
            seed=self.seed,
            optimizer=self.optimizer,
            adam_beta1=self.adam_beta1,
            adam_beta2=self.adam_beta2,
            adam_epsilon=self.adam_epsilon,
        )

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str, where: str):
    ftype = _FIELD_TYPES[key]
    try:
        if ftype == "int":
            return int(raw)
        if ftype == "float":
            return float(raw)
        if ftype == "float | None":
            return None if raw.lower() in ("none", "auto") else float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {key} value {raw!r}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat key = value lines into a dict, rejecting unknown keys."""
    out: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{line_no}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{source}:{line_no}: unknown config key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{line_no}: duplicate key {key!r}")
        out[key] = _convert(key, raw, f"{source}:{line_no}")
    return out


def load_run_config(
    config_path=None, overrides: dict | None = None, seed: int | None = None
) -> RunConfig:
    """Build a RunConfig from defaults, an optional file, and CLI overrides."""
    values: dict = {}
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        values.update(parse_config_text(text, source=str(config_path)))
    if overrides:
        for key, raw in overrides.items():
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = _convert(key, raw, "--set")
    if seed is not None:
        values["seed"] = seed
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg
