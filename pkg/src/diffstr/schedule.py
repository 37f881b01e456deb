"""Noise schedules for the categorical corruption chain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("linear-mask", "cosine")


class InvalidT(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    """Per-step corruption probabilities and cumulative survival.

    ``betas[t]`` is the step-``t`` corruption probability for ``t = 1..T``
    (``betas[0]`` is an unused 0 so indices line up with time), and
    ``alpha_bars[t] = prod_{s<=t} (1 - betas[s])`` with ``alpha_bars[0] = 1``.
    """

    kind: str
    T: int
    betas: np.ndarray
    alpha_bars: np.ndarray

    def alpha(self, t):
        return 1.0 - self.betas[t]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "T": self.T}


def build_schedule(kind: str, T: int, cosine_offset: float = 0.008) -> NoiseSchedule:
    if T < 1:
        raise InvalidT(f"T must be >= 1, got {T}")
    steps = np.arange(T + 1, dtype=np.float64)
    if kind == "linear-mask":
        # beta_s = 1/(T-s+1) telescopes to alpha_bar_t = 1 - t/T.
        betas = np.zeros(T + 1)
        betas[1:] = 1.0 / (T - steps[1:] + 1.0)
        alpha_bars = 1.0 - steps / T
    elif kind == "cosine":
        s = cosine_offset
        f = np.cos((steps / T + s) / (1 + s) * math.pi / 2) ** 2
        target = f / f[0]
        betas = np.zeros(T + 1)
        betas[1:] = np.minimum(1.0 - target[1:] / target[:-1], 0.999)
        # Last step is left unclipped so the chain always ends fully corrupted.
        betas[T] = 1.0
        alpha_bars = np.cumprod(1.0 - betas)
    else:
        raise ValueError(f"unknown schedule kind {kind!r}; expected one of {KINDS}")
    betas.setflags(write=False)
    alpha_bars.setflags(write=False)
    return NoiseSchedule(kind=kind, T=T, betas=betas, alpha_bars=alpha_bars)
