"""Training protocol: random step, corrupt, predict the clean sequence, update."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import torch
import torch.nn.functional as F

from .diffusion import DenoiserOutput, corrupt
from .model import DiffusionSTR, ShapeMismatch
from .schedule import NoiseSchedule
from .vocab import Vocabulary, encode_label, presence_targets

log = logging.getLogger(__name__)

ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8


class NonFiniteLoss(FloatingPointError):
    def __init__(self, step, terms, last_good_step):
        self.step = step
        self.terms = terms
        self.last_good_step = last_good_step
        super().__init__(f"non-finite loss at step {step} (terms={terms}); last good step {last_good_step}")


@dataclass
class TrainConfig:
    epochs: int = 30
    warmup_epochs: int = 3
    peak_lr: float = 1e-4
    weight_decay: float = 0.01
    batch_size: int = 64
    lambda_presence: float = 1.0
    lambda_simple: float = 0.0
    grad_clip: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.warmup_epochs >= self.epochs:
            raise ValueError("warmup_epochs must be smaller than epochs")
        if min(self.lambda_presence, self.lambda_simple, self.weight_decay) < 0:
            raise ValueError("loss weights and weight decay must be non-negative")


def lr_at(step, total_steps, warmup_steps, peak_lr):
    """Linear warmup to ``peak_lr`` then cosine decay to 0 at ``total_steps``."""
    if step < warmup_steps:
        return peak_lr * step / warmup_steps
    if total_steps == warmup_steps:
        return peak_lr
    progress = (step - warmup_steps) / (total_steps - warmup_steps)
    return peak_lr * 0.5 * (1.0 + math.cos(math.pi * progress))


def training_loss(out: DenoiserOutput, x0: torch.Tensor, presence: torch.Tensor,
                  lambda_presence=1.0, lambda_simple=0.0):
    """Composite loss against the clean sequence; returns ``(total, terms)``.

    Every term is averaged over all ``L`` positions, EOS and PAD included.
    """
    logits, pres = out.char_logits, out.presence_logits
    if logits.shape[:-1] != x0.shape or pres.shape != presence.shape:
        raise ShapeMismatch(f"logits {tuple(logits.shape)} / presence {tuple(pres.shape)} "
                            f"vs targets {tuple(x0.shape)}")
    K = logits.shape[-1]
    ce = F.cross_entropy(logits.reshape(-1, K), x0.reshape(-1))
    bce = F.binary_cross_entropy_with_logits(pres, presence.to(pres.dtype))
    mse = F.mse_loss(logits.softmax(-1), F.one_hot(x0, K).to(logits.dtype))
    total = ce + lambda_presence * bce + lambda_simple * mse
    return total, {"ce": ce, "bce": bce, "mse": mse}


def encode_targets(labels: Sequence[str], vocab: Vocabulary, L: int):
    x0 = np.stack([encode_label(s, vocab, L) for s in labels])
    pres = np.stack([presence_targets(row, vocab) for row in x0])
    return torch.from_numpy(x0), torch.from_numpy(pres)


def sample_steps(batch_size: int, T: int, generator: torch.Generator) -> torch.Tensor:
    """Uniform draws from ``{1, ..., T}``."""
    return torch.randint(1, T + 1, (batch_size,), generator=generator)


def make_optimizer(model, cfg: TrainConfig):
    return torch.optim.AdamW(model.parameters(), lr=0.0, betas=ADAM_BETAS, eps=ADAM_EPS,
                             weight_decay=cfg.weight_decay)


def training_step(model: DiffusionSTR, optimizer, images, x0, presence, sched: NoiseSchedule,
                  kernel: str, vocab: Vocabulary, generator: torch.Generator, cfg: TrainConfig,
                  lr: float):
    """One optimiser update on a batch; returns the loss terms as floats."""
    model.train()
    B = x0.shape[0]
    t = sample_steps(B, sched.T, generator)
    x_t = corrupt(x0, t, sched, kernel, vocab.K, vocab.mask, generator)
    out = model(images, x_t, t)
    loss, terms = training_loss(out, x0, presence, cfg.lambda_presence, cfg.lambda_simple)
    metrics = {"loss": loss.item(), **{k: v.item() for k, v in terms.items()}}
    if not all(math.isfinite(v) for v in metrics.values()):
        raise NonFiniteLoss(None, metrics, None)
    for g in optimizer.param_groups:
        g["lr"] = lr
    optimizer.zero_grad(set_to_none=True)
    loss.backward()
    if cfg.grad_clip:
        torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
    optimizer.step()
    return metrics


def fit(model: DiffusionSTR, images: np.ndarray, labels: Sequence[str], vocab: Vocabulary,
        sched: NoiseSchedule, kernel: str, cfg: TrainConfig,
        on_step: Optional[Callable[[dict], None]] = None,
        on_epoch: Optional[Callable[[int, dict], None]] = None):
    """Train ``model`` in place for ``cfg.epochs`` epochs.

    ``images`` is ``(N, H, W, C)``.  Sample order, time steps and corruption
    are drawn from one generator seeded by ``cfg.seed``.
    """
    L = model.decoder_cfg.L
    x0_all, pres_all = encode_targets(labels, vocab, L)
    img_all = torch.as_tensor(images, dtype=next(model.parameters()).dtype)
    N = len(labels)
    if N == 0:
        raise ValueError("empty training set")
    steps_per_epoch = math.ceil(N / cfg.batch_size)
    total = cfg.epochs * steps_per_epoch
    warmup = cfg.warmup_epochs * steps_per_epoch

    gen = torch.Generator().manual_seed(cfg.seed)
    opt = make_optimizer(model, cfg)
    step = 0
    for epoch in range(cfg.epochs):
        perm = torch.randperm(N, generator=gen)
        sums: dict = {}
        t0 = time.perf_counter()
        for b in range(steps_per_epoch):
            idx = perm[b * cfg.batch_size:(b + 1) * cfg.batch_size]
            step += 1
            lr = lr_at(step, total, warmup, cfg.peak_lr)
            try:
                m = training_step(model, opt, img_all[idx], x0_all[idx], pres_all[idx],
                                  sched, kernel, vocab, gen, cfg, lr)
            except NonFiniteLoss as e:
                raise NonFiniteLoss(step, e.terms, step - 1) from None
            for k, v in m.items():
                sums[k] = sums.get(k, 0.0) + v
            if on_step is not None:
                on_step({"step": step, "epoch": epoch, "lr": lr, **m,
                         "wall": time.perf_counter() - t0})
        means = {k: v / steps_per_epoch for k, v in sums.items()}
        log.info("epoch %d/%d loss %.4f (%.1fs)", epoch + 1, cfg.epochs, means["loss"],
                 time.perf_counter() - t0)
        if on_epoch is not None:
            on_epoch(epoch, means)
    return model
