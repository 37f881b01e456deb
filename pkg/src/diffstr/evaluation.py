"""Word accuracy, multi-seed evaluation and the two ablation runners."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import torch

from .config import RunConfig
from .data import LabeledSample, render_dataset, stack_images
from .diffusion import sample
from .model import DiffusionSTR
from .schedule import NoiseSchedule
from .train import fit
from .vocab import Vocabulary, decode_tokens

log = logging.getLogger(__name__)

CHARSET_MODES = ("full94", "alnum36-ci")


class MismatchedProtocol(ValueError):
    pass


def word_correct(pred: str, gt: str, mode: str = "full94") -> bool:
    if mode == "full94":
        return pred == gt
    if mode == "alnum36-ci":
        def norm(s):
            return "".join(c for c in s if c.isascii() and c.isalnum()).lower()
        return norm(pred) == norm(gt)
    raise ValueError(f"unknown charset mode {mode!r}; expected one of {CHARSET_MODES}")


@dataclass
class SampleRecord:
    label: str
    prediction: str
    correct: bool


@dataclass
class SeedRun:
    seed: int
    word_accuracy: float
    n_correct: int
    records: list = field(default_factory=list)


@dataclass
class EvalReport:
    dataset: str
    n_samples: int
    charset_mode: str
    seeds: list
    runs: list  # list[SeedRun]
    word_accuracy: float  # arithmetic mean over runs
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d) -> "EvalReport":
        runs = [SeedRun(r["seed"], r["word_accuracy"], r["n_correct"],
                        [SampleRecord(**x) for x in r["records"]]) for r in d["runs"]]
        return cls(d["dataset"], d["n_samples"], d["charset_mode"], list(d["seeds"]), runs,
                   d["word_accuracy"], d.get("meta", {}))


@torch.no_grad()
def recognize(model: DiffusionSTR, images, vocab: Vocabulary, sched: NoiseSchedule, kernel: str,
              generator: Optional[torch.Generator] = None, mode: str = "sample",
              batch_size: int = 256, callback: Optional[Callable] = None,
              features: Optional[torch.Tensor] = None) -> list[str]:
    """Decode a stack of images ``(N, H, W, C)`` to strings."""
    model.eval()
    dtype = next(model.parameters()).dtype
    images = torch.as_tensor(np.asarray(images), dtype=dtype)
    L, K = model.decoder_cfg.L, model.decoder_cfg.K
    preds = []
    for start in range(0, images.shape[0], batch_size):
        if features is not None:
            z = features[start:start + batch_size]
        else:
            z = model.encode_image(images[start:start + batch_size])
        tokens = sample(model.denoise, z, L, K, vocab.mask, sched, kernel, generator, mode, callback)
        preds.extend(decode_tokens(row, vocab) for row in tokens)
    return preds


def score(preds: Sequence[str], labels: Sequence[str], mode: str, seed: int) -> SeedRun:
    records = [SampleRecord(g, p, word_correct(p, g, mode)) for p, g in zip(preds, labels)]
    n_correct = sum(r.correct for r in records)
    return SeedRun(seed, n_correct / len(records), n_correct, records)


def aggregate(dataset: str, runs: list, charset_mode: str, meta=None) -> EvalReport:
    n = len(runs[0].records)
    mean = float(sum(r.word_accuracy for r in runs) / len(runs))
    return EvalReport(dataset, n, charset_mode, [r.seed for r in runs], runs, mean, meta or {})


@torch.no_grad()
def evaluate(model: DiffusionSTR, samples: Sequence[LabeledSample], vocab: Vocabulary,
             sched: NoiseSchedule, kernel: str, seeds=(1, 2, 3, 4), mode: str = "sample",
             charset_mode: str = "full94", batch_size: int = 256, dataset: str = "dataset",
             denoiser_override: Optional[Callable] = None) -> EvalReport:
    """Run the reverse chain once per seed over ``samples`` and score the words.

    ``denoiser_override(batch_indices)`` may supply a replacement denoiser
    callable per batch (used for oracle checks).
    """
    if len(samples) == 0:
        raise ValueError("empty dataset")
    labels = [s.label for s in samples]
    images = stack_images(samples)
    model.eval()
    dtype = next(model.parameters()).dtype
    imgs = torch.as_tensor(images, dtype=dtype)
    feats = torch.cat([model.encode_image(imgs[i:i + batch_size])
                       for i in range(0, len(samples), batch_size)])
    L, K = model.decoder_cfg.L, model.decoder_cfg.K
    runs = []
    for seed in seeds:
        gen = torch.Generator().manual_seed(int(seed))
        preds = []
        for start in range(0, len(samples), batch_size):
            z = feats[start:start + batch_size]
            den = model.denoise
            if denoiser_override is not None:
                den = denoiser_override(range(start, start + z.shape[0]))
            tokens = sample(den, z, L, K, vocab.mask, sched, kernel, gen, mode)
            preds.extend(decode_tokens(row, vocab) for row in tokens)
        runs.append(score(preds, labels, charset_mode, int(seed)))
    return aggregate(dataset, runs, charset_mode, {"T": sched.T, "kernel": kernel, "mode": mode})


# ----------------------------------------------------------------------------
# protocol runs


def build_model(cfg: RunConfig) -> DiffusionSTR:
    torch.manual_seed(cfg.train.seed)
    return DiffusionSTR(cfg.vision, cfg.decoder_config())


class _DataCache:
    def __init__(self):
        self._store = {}

    def get(self, cfg: RunConfig, split: str):
        seeds = cfg.data.train_seeds() if split == "train" else cfg.data.val_seeds()
        key = (json.dumps(asdict(cfg.data.render), sort_keys=True), seeds.start, seeds.stop)
        if key not in self._store:
            self._store[key] = render_dataset(cfg.data.render, seeds)
        return self._store[key]


def train_and_evaluate(cfg: RunConfig, cache: Optional[_DataCache] = None, name: str = "held-out",
                       on_step=None):
    """Train a fresh model on the configured synthetic split, evaluate on held-out."""
    cache = cache or _DataCache()
    train_set = cache.get(cfg, "train")
    val_set = cache.get(cfg, "val")
    vocab, sched = cfg.vocabulary(), cfg.schedule()
    model = build_model(cfg)
    fit(model, stack_images(train_set), [s.label for s in train_set], vocab, sched,
        cfg.diffusion.kernel, cfg.train, on_step=on_step)
    report = evaluate(model, val_set, vocab, sched, cfg.diffusion.kernel, cfg.eval.seeds,
                      cfg.eval.mode, cfg.eval.charset_mode, cfg.eval.batch_size, name)
    report.meta.update({"lambda_presence": cfg.train.lambda_presence, "train_seed": cfg.train.seed,
                        "n_train": len(train_set)})
    return report, model


def _diff_paths(a, b, prefix=""):
    if isinstance(a, dict) and isinstance(b, dict):
        out = []
        for k in sorted(set(a) | set(b)):
            out += _diff_paths(a.get(k), b.get(k), f"{prefix}{k}.")
        return out
    return [] if a == b else [prefix.rstrip(".")]


def check_paired(a: RunConfig, b: RunConfig, allowed: set):
    """Arms of an ablation must agree on everything except ``allowed`` fields."""
    bad = [p for p in _diff_paths(a.to_dict(), b.to_dict()) if p not in allowed]
    if bad:
        raise MismatchedProtocol(f"ablation arms differ outside {sorted(allowed)}: {bad}")


def ablate_presence_head(cfg: RunConfig, arms: Optional[tuple] = None, cache=None, runner=None):
    """Train with and without the presence loss; returns ``{"with_head", "without_head"}``.

    ``runner(cfg, cache, name) -> (report, model)`` defaults to
    :func:`train_and_evaluate`.
    """
    if arms is None:
        arms = (cfg.replace(**{"train.lambda_presence": 1.0}),
                cfg.replace(**{"train.lambda_presence": 0.0}))
    with_cfg, without_cfg = arms
    check_paired(with_cfg, without_cfg, {"train.lambda_presence"})
    cache = cache or _DataCache()
    runner = runner or train_and_evaluate
    out = {}
    for name, arm in (("with_head", with_cfg), ("without_head", without_cfg)):
        log.info("presence ablation arm %s (lambda=%s)", name, arm.train.lambda_presence)
        out[name], _ = runner(arm, cache, name)
    return out


def ablate_time_steps(cfg: RunConfig, T_list: Sequence[int], cache=None, runner=None):
    """One model per total step count, each evaluated with its own chain length."""
    T_list = list(T_list)
    if not T_list:
        raise ValueError("T_list is empty")
    if any(int(T) < 1 for T in T_list):
        raise ValueError(f"every T must be >= 1, got {T_list}")
    cache = cache or _DataCache()
    runner = runner or train_and_evaluate
    reports = []
    for T in T_list:
        log.info("time-step ablation T=%d", T)
        rep, _ = runner(cfg.replace(**{"diffusion.T": int(T)}), cache, f"T={T}")
        reports.append(rep)
    return reports


def write_reports(out_dir, named: dict) -> Path:
    """One JSON per arm plus ``summary.tsv``; returns the summary path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = ["arm\tn_samples\tword_accuracy\tper_seed\n"]
    for name, rep in named.items():
        (out / f"{name}.json").write_text(rep.to_json())
        seeds = ",".join(f"{r.seed}:{r.word_accuracy:.4f}" for r in rep.runs)
        rows.append(f"{name}\t{rep.n_samples}\t{rep.word_accuracy:.4f}\t{seeds}\n")
    summary = out / "summary.tsv"
    with open(summary, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(rows)
    return summary
