"""Categorical diffusion over fixed-length token sequences.

Two corruption kernels are supported:

* ``absorbing`` -- each step replaces a token by MASK with probability
  ``beta_t``; MASK never leaves.
* ``uniform`` -- each step resamples a token uniformly over all ``K``
  categories with probability ``beta_t``.

The denoiser predicts a distribution over the clean sequence ``x_0``; the
analytic posterior ``q(x_{t-1} | x_t, x_0)`` marginalised over that belief
gives the reverse transition.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Optional

import numpy as np
import torch
import torch.nn.functional as F

from .schedule import NoiseSchedule

KERNELS = ("absorbing", "uniform")


class DiffusionError(ValueError):
    pass


class StepOutOfRange(DiffusionError):
    pass


class BadDistribution(DiffusionError):
    pass


class MassOnMask(DiffusionError):
    pass


class DenoiserOutput(NamedTuple):
    char_logits: torch.Tensor  # (..., L, K)
    presence_logits: torch.Tensor  # (..., L)


def _check_kernel(kernel):
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")


def _check_steps(t, lo, hi):
    tt = torch.as_tensor(t)
    if tt.numel() and (int(tt.min()) < lo or int(tt.max()) > hi):
        raise StepOutOfRange(f"step {t} outside [{lo}, {hi}]")


def _lookup(arr, t, like: torch.Tensor, extra_dims: int):
    """Gather schedule values at ``t`` shaped to broadcast against ``like``."""
    table = torch.tensor(np.asarray(arr), dtype=like.dtype if like.is_floating_point() else torch.float64)
    tt = torch.as_tensor(t, dtype=torch.long)
    vals = table[tt]
    return vals.reshape(vals.shape + (1,) * extra_dims)


# ----------------------------------------------------------------------------
# transition matrices (row = from-state, column = to-state)


def step_matrix(t: int, sched: NoiseSchedule, kernel: str, K: int, mask_id: int,
                dtype=torch.float64) -> torch.Tensor:
    """One-step kernel ``Q_t[i, j] = q(x_t = j | x_{t-1} = i)``."""
    _check_kernel(kernel)
    _check_steps(t, 1, sched.T)
    beta = float(sched.betas[t])
    eye = torch.eye(K, dtype=dtype)
    if kernel == "absorbing":
        Q = (1 - beta) * eye
        Q[:, mask_id] += beta
        Q[mask_id] = 0.0
        Q[mask_id, mask_id] = 1.0
        return Q
    return (1 - beta) * eye + beta / K


def marginal_matrix(t: int, sched: NoiseSchedule, kernel: str, K: int, mask_id: int,
                    dtype=torch.float64) -> torch.Tensor:
    """Closed-form ``Qbar_t[i, j] = q(x_t = j | x_0 = i)``."""
    _check_kernel(kernel)
    _check_steps(t, 0, sched.T)
    ab = float(sched.alpha_bars[t])
    eye = torch.eye(K, dtype=dtype)
    if kernel == "absorbing":
        Q = ab * eye
        Q[:, mask_id] += 1 - ab
        Q[mask_id] = 0.0
        Q[mask_id, mask_id] = 1.0
        return Q
    return ab * eye + (1 - ab) / K


# ----------------------------------------------------------------------------
# forward / reverse


def corrupt(x0: torch.Tensor, t, sched: NoiseSchedule, kernel: str, K: int, mask_id: int,
            generator: Optional[torch.Generator] = None) -> torch.Tensor:
    """Sample ``x_t ~ q(x_t | x_0)`` independently per position.

    ``t`` is an int or a tensor broadcastable over the batch dims of ``x0``
    (shape ``x0.shape[:-1]``).
    """
    _check_kernel(kernel)
    _check_steps(t, 0, sched.T)
    ab = _lookup(sched.alpha_bars, t, torch.empty(0, dtype=torch.float64), 1)
    keep = torch.rand(x0.shape, generator=generator, dtype=torch.float64) < ab
    if kernel == "absorbing":
        noise = torch.full_like(x0, mask_id)
    else:
        noise = torch.randint(0, K, x0.shape, generator=generator, dtype=x0.dtype)
    return torch.where(keep, x0, noise)


def forward_step(x_prev: torch.Tensor, t, sched: NoiseSchedule, kernel: str, K: int, mask_id: int,
                 generator: Optional[torch.Generator] = None) -> torch.Tensor:
    """Sample one chain step ``x_t ~ q(x_t | x_{t-1})``."""
    _check_kernel(kernel)
    _check_steps(t, 1, sched.T)
    beta = _lookup(sched.betas, t, torch.empty(0, dtype=torch.float64), 1)
    hit = torch.rand(x_prev.shape, generator=generator, dtype=torch.float64) < beta
    if kernel == "absorbing":
        noise = torch.full_like(x_prev, mask_id)
    else:
        noise = torch.randint(0, K, x_prev.shape, generator=generator, dtype=x_prev.dtype)
    return torch.where(hit, noise, x_prev)


def posterior_probs(x_t: torch.Tensor, x0_dist: torch.Tensor, t, sched: NoiseSchedule,
                    kernel: str, mask_id: int) -> torch.Tensor:
    """Distribution of ``x_{t-1}`` given ``x_t`` and a belief over ``x_0``.

    ``x_t`` has shape ``(..., L)``, ``x0_dist`` ``(..., L, K)``; the result has
    the shape of ``x0_dist``.
    """
    _check_kernel(kernel)
    _check_steps(t, 1, sched.T)
    K = x0_dist.shape[-1]
    sums = x0_dist.sum(-1)
    if (x0_dist < 0).any() or ((sums - 1).abs() > 1e-6).any():
        raise BadDistribution("x0 belief rows must be non-negative and sum to 1")

    onehot = F.one_hot(x_t, K).to(x0_dist.dtype)
    tt = torch.as_tensor(t, dtype=torch.long)
    extra = 2
    ab_t = _lookup(sched.alpha_bars, tt, x0_dist, extra)
    ab_prev = _lookup(sched.alpha_bars, tt - 1, x0_dist, extra)

    if kernel == "absorbing":
        if (x0_dist[..., mask_id] > 0).any():
            raise MassOnMask("absorbing kernel: x0 belief must put no mass on MASK")
        reveal = (ab_prev - ab_t) / (1 - ab_t)
        stay = (1 - ab_prev) / (1 - ab_t)
        masked = x0_dist * reveal
        masked = masked + F.one_hot(torch.tensor(mask_id), K).to(x0_dist.dtype) * stay
        is_mask = (x_t == mask_id).unsqueeze(-1)
        return torch.where(is_mask, masked, onehot)

    alpha_t = 1 - _lookup(sched.betas, tt, x0_dist, extra)
    fact_t = alpha_t * onehot + (1 - alpha_t) / K
    fact_0 = ab_prev * x0_dist + (1 - ab_prev) / K
    theta = fact_t * fact_0
    return theta / theta.sum(-1, keepdim=True)


def reverse_step(x_t: torch.Tensor, x0_dist: torch.Tensor, t, sched: NoiseSchedule, kernel: str,
                 mask_id: int, generator: Optional[torch.Generator] = None,
                 mode: str = "sample") -> torch.Tensor:
    probs = posterior_probs(x_t, x0_dist, t, sched, kernel, mask_id)
    if mode == "greedy":
        # torch.argmax returns the first maximal index: lowest id wins ties.
        return probs.argmax(-1)
    if mode != "sample":
        raise ValueError(f"unknown mode {mode!r}")
    flat = probs.reshape(-1, probs.shape[-1])
    draws = torch.multinomial(flat.to(torch.float64), 1, generator=generator)
    return draws.reshape(x_t.shape)


def x0_belief(char_logits: torch.Tensor, mask_id: int) -> torch.Tensor:
    """Row softmax of the character logits with the MASK column removed."""
    logits = char_logits.clone()
    logits[..., mask_id] = float("-inf")
    return logits.softmax(-1)


def prior_sample(shape, kernel: str, K: int, mask_id: int,
                 generator: Optional[torch.Generator] = None) -> torch.Tensor:
    if kernel == "absorbing":
        return torch.full(shape, mask_id, dtype=torch.long)
    return torch.randint(0, K, shape, generator=generator, dtype=torch.long)


Denoiser = Callable[[torch.Tensor, torch.Tensor, torch.Tensor], DenoiserOutput]


@torch.no_grad()
def sample(denoiser: Denoiser, z: torch.Tensor, L: int, K: int, mask_id: int,
           sched: NoiseSchedule, kernel: str, generator: Optional[torch.Generator] = None,
           mode: str = "sample", callback=None) -> torch.Tensor:
    """Run the full reverse chain from ``x_T`` down to ``x_0``.

    ``z`` is a batch of visual features ``(B, N, d)``; returns ``(B, L)``.
    ``callback(t, x_{t-1})`` is invoked after every step.
    """
    _check_kernel(kernel)
    B = z.shape[0]
    x = prior_sample((B, L), kernel, K, mask_id, generator)
    for t in range(sched.T, 0, -1):
        tt = torch.full((B,), t, dtype=torch.long)
        out = denoiser(x, z, tt)
        belief = x0_belief(out.char_logits.to(torch.float64), mask_id)
        x = reverse_step(x, belief, t, sched, kernel, mask_id, generator, mode)
        if callback is not None:
            callback(t, x)
    return x
