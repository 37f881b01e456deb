"""Run configuration: nested per-module records, JSON profiles, resolution."""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Optional

from .data import RenderSpec
from .model import DecoderConfig, VisionConfig
from .schedule import build_schedule
from .train import TrainConfig
from .vocab import Charset, Vocabulary


@dataclass
class VocabConfig:
    charset: str = "alnum36"  # "full94", "alnum36" or a charset file path
    max_label_len: int = 8

    @property
    def L(self) -> int:
        return self.max_label_len + 1


@dataclass
class DiffusionConfig:
    T: int = 20
    schedule: str = "linear-mask"
    kernel: str = "absorbing"


@dataclass
class DecoderArch:
    d: int = 128
    n_layers: int = 2
    n_heads: int = 4
    activation: str = "geglu"
    mlp_ratio: float = 4.0
    dropout: float = 0.0


@dataclass
class DataConfig:
    render: RenderSpec = field(default_factory=RenderSpec)
    n_train: int = 5000
    n_val: int = 512
    train_seed0: int = 0
    val_seed0: int = 10_000_000

    def train_seeds(self):
        return range(self.train_seed0, self.train_seed0 + self.n_train)

    def val_seeds(self):
        return range(self.val_seed0, self.val_seed0 + self.n_val)


@dataclass
class EvalConfig:
    seeds: list = field(default_factory=lambda: [1, 2, 3, 4])
    mode: str = "sample"
    charset_mode: str = "full94"
    batch_size: int = 256


@dataclass
class RunConfig:
    profile: str = "toy"
    vocab: VocabConfig = field(default_factory=VocabConfig)
    diffusion: DiffusionConfig = field(default_factory=DiffusionConfig)
    vision: VisionConfig = field(default_factory=VisionConfig)
    decoder: DecoderArch = field(default_factory=DecoderArch)
    data: DataConfig = field(default_factory=DataConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def vocabulary(self) -> Vocabulary:
        return Vocabulary(Charset.named(self.vocab.charset))

    def schedule(self):
        return build_schedule(self.diffusion.schedule, self.diffusion.T)

    def decoder_config(self) -> DecoderConfig:
        a = self.decoder
        return DecoderConfig(L=self.vocab.L, K=self.vocabulary().K, T=self.diffusion.T, d=a.d,
                             n_layers=a.n_layers, n_heads=a.n_heads, activation=a.activation,
                             mlp_ratio=a.mlp_ratio, dropout=a.dropout)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return _build(cls, d)

    def replace(self, **overrides) -> "RunConfig":
        """Copy with dotted-path overrides, e.g. ``replace(**{"train.seed": 3})``."""
        d = self.to_dict()
        for key, value in overrides.items():
            node = d
            *parents, leaf = key.split(".")
            for p in parents:
                node = node[p]
            if leaf not in node:
                raise KeyError(key)
            node[leaf] = value
        return RunConfig.from_dict(d)


def _build(cls, d):
    kwargs = {}
    names = {f.name: f for f in fields(cls)}
    for key, value in d.items():
        if key not in names:
            raise KeyError(f"unknown config field {cls.__name__}.{key}")
        sub = _NESTED.get((cls, key))
        kwargs[key] = _build(sub, value) if sub is not None else copy.deepcopy(value)
    return cls(**kwargs)


_NESTED = {
    (RunConfig, "vocab"): VocabConfig,
    (RunConfig, "diffusion"): DiffusionConfig,
    (RunConfig, "vision"): VisionConfig,
    (RunConfig, "decoder"): DecoderArch,
    (RunConfig, "data"): DataConfig,
    (RunConfig, "train"): TrainConfig,
    (RunConfig, "eval"): EvalConfig,
    (DataConfig, "render"): RenderSpec,
}


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_profile(name: str) -> RunConfig:
    """Built-in profile by name (``toy`` or ``full``)."""
    text = resources.files("diffstr.profiles").joinpath(f"{name}.json").read_text()
    return RunConfig.from_dict(_merge(RunConfig().to_dict(), json.loads(text)))


def load_config(path: Optional[str | Path]) -> RunConfig:
    """Read a run config file; a ``profile`` key selects the base it overrides."""
    if path is None:
        return load_profile("toy")
    raw = json.loads(Path(path).read_text())
    base = load_profile(raw.get("profile", "toy")).to_dict()
    return RunConfig.from_dict(_merge(base, raw))
