"""Vision encoder, time-conditioned denoising decoder and the two output heads."""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .diffusion import DenoiserOutput, StepOutOfRange


class ShapeMismatch(ValueError):
    pass


@dataclass
class VisionConfig:
    H: int = 32
    W: int = 64
    C: int = 1
    p_h: int = 4
    p_w: int = 8
    d_enc: int = 128
    n_enc_layers: int = 4
    n_enc_heads: int = 4

    def __post_init__(self):
        if self.H % self.p_h or self.W % self.p_w:
            raise ShapeMismatch(f"patch {self.p_h}x{self.p_w} does not tile image {self.H}x{self.W}")
        if self.d_enc % self.n_enc_heads:
            raise ShapeMismatch("d_enc must be divisible by n_enc_heads")

    @property
    def n_patches(self) -> int:
        return (self.H // self.p_h) * (self.W // self.p_w)


@dataclass
class DecoderConfig:
    L: int = 9
    K: int = 39
    T: int = 20
    d: int = 128
    n_layers: int = 2
    n_heads: int = 4
    activation: str = "geglu"
    mlp_ratio: float = 4.0
    dropout: float = 0.0

    def __post_init__(self):
        if self.d % self.n_heads:
            raise ShapeMismatch("d must be divisible by n_heads")


# ----------------------------------------------------------------------------
# building blocks


class MLP(nn.Module):
    """Two affine maps around a (possibly gated) nonlinearity."""

    GATED = {"geglu": F.gelu, "swiglu": F.silu}
    PLAIN = {"gelu": F.gelu, "silu": F.silu, "relu": F.relu}

    def __init__(self, d_in, d_hidden, d_out, activation="geglu", dropout=0.0):
        super().__init__()
        if activation not in self.GATED and activation not in self.PLAIN:
            raise ValueError(f"unknown activation {activation!r}")
        self.gated = activation in self.GATED
        self.act = self.GATED.get(activation) or self.PLAIN[activation]
        self.fc1 = nn.Linear(d_in, d_hidden * (2 if self.gated else 1))
        self.fc2 = nn.Linear(d_hidden, d_out)
        self.drop = nn.Dropout(dropout)

    def forward(self, x):
        h = self.fc1(x)
        if self.gated:
            h, gate = h.chunk(2, dim=-1)
            h = h * self.act(gate)
        else:
            h = self.act(h)
        return self.fc2(self.drop(h))


class Attention(nn.Module):
    def __init__(self, d, n_heads, d_kv=None, dropout=0.0):
        super().__init__()
        d_kv = d if d_kv is None else d_kv
        self.n_heads = n_heads
        self.q = nn.Linear(d, d)
        self.k = nn.Linear(d_kv, d, bias=False)  # a key bias cancels in the softmax
        self.v = nn.Linear(d_kv, d)
        self.out = nn.Linear(d, d)
        self.dropout = dropout

    def _split(self, x):
        B, N, D = x.shape
        return x.view(B, N, self.n_heads, D // self.n_heads).transpose(1, 2)

    def forward(self, x, context=None):
        context = x if context is None else context
        q, k, v = self._split(self.q(x)), self._split(self.k(context)), self._split(self.v(context))
        drop = self.dropout if self.training else 0.0
        h = F.scaled_dot_product_attention(q, k, v, dropout_p=drop)
        B, _, N, _ = h.shape
        return self.out(h.transpose(1, 2).reshape(B, N, -1))


class EncoderBlock(nn.Module):
    def __init__(self, d, n_heads, activation, mlp_ratio, dropout):
        super().__init__()
        self.norm1 = nn.LayerNorm(d)
        self.attn = Attention(d, n_heads, dropout=dropout)
        self.norm2 = nn.LayerNorm(d)
        self.mlp = MLP(d, int(d * mlp_ratio), d, activation, dropout)

    def forward(self, x):
        x = x + self.attn(self.norm1(x))
        return x + self.mlp(self.norm2(x))


class DecoderBlock(nn.Module):
    """Non-causal self-attention, cross-attention to the image, feed-forward."""

    def __init__(self, d, n_heads, activation, mlp_ratio, dropout):
        super().__init__()
        self.norm1 = nn.LayerNorm(d)
        self.self_attn = Attention(d, n_heads, dropout=dropout)
        self.norm2 = nn.LayerNorm(d)
        self.cross_attn = Attention(d, n_heads, dropout=dropout)
        self.norm3 = nn.LayerNorm(d)
        self.mlp = MLP(d, int(d * mlp_ratio), d, activation, dropout)

    def forward(self, x, memory):
        x = x + self.self_attn(self.norm1(x))
        x = x + self.cross_attn(self.norm2(x), memory)
        return x + self.mlp(self.norm3(x))


def sinusoidal_embedding(t, d: int) -> torch.Tensor:
    """Interleaved ``[sin(t w_0), cos(t w_0), sin(t w_1), ...]`` of length ``d``."""
    t = torch.as_tensor(t, dtype=torch.float64)
    i = torch.arange(d // 2, dtype=torch.float64)
    freqs = torch.exp(-math.log(10000.0) * 2 * i / d)
    angles = t.unsqueeze(-1) * freqs
    emb = torch.stack([angles.sin(), angles.cos()], dim=-1).flatten(-2)
    if d % 2:
        emb = F.pad(emb, (0, 1))
    return emb


class TimeEmbedding(nn.Module):
    def __init__(self, d, T, activation="geglu"):
        super().__init__()
        self.d = d
        self.T = T
        self.mlp = MLP(d, d, d, activation)

    def forward(self, t):
        tt = torch.as_tensor(t)
        if tt.numel() and (int(tt.min()) < 0 or int(tt.max()) > self.T):
            raise StepOutOfRange(f"time step outside [0, {self.T}]")
        dtype = self.mlp.fc1.weight.dtype
        return self.mlp(sinusoidal_embedding(tt, self.d).to(dtype))


# ----------------------------------------------------------------------------


class VisionEncoder(nn.Module):
    def __init__(self, cfg: VisionConfig, activation="geglu", mlp_ratio=4.0, dropout=0.0):
        super().__init__()
        self.cfg = cfg
        self.patch_embed = nn.Linear(cfg.C * cfg.p_h * cfg.p_w, cfg.d_enc)
        self.pos_embed = nn.Parameter(torch.zeros(1, cfg.n_patches, cfg.d_enc))
        self.blocks = nn.ModuleList(
            EncoderBlock(cfg.d_enc, cfg.n_enc_heads, activation, mlp_ratio, dropout)
            for _ in range(cfg.n_enc_layers)
        )
        self.norm = nn.LayerNorm(cfg.d_enc)

    def patchify(self, images):
        """``(B, H, W, C)`` -> ``(B, n_patches, C*p_h*p_w)``, row-major over patches."""
        c = self.cfg
        if images.shape[1:] != (c.H, c.W, c.C):
            raise ShapeMismatch(f"expected images (B, {c.H}, {c.W}, {c.C}), got {tuple(images.shape)}")
        B = images.shape[0]
        x = images.reshape(B, c.H // c.p_h, c.p_h, c.W // c.p_w, c.p_w, c.C)
        x = x.permute(0, 1, 3, 2, 4, 5)
        return x.reshape(B, c.n_patches, c.p_h * c.p_w * c.C)

    def forward(self, images):
        x = self.patch_embed(self.patchify(images)) + self.pos_embed
        for blk in self.blocks:
            x = blk(x)
        return self.norm(x)


class Denoiser(nn.Module):
    def __init__(self, cfg: DecoderConfig, d_enc: int):
        super().__init__()
        self.cfg = cfg
        self.tok_embed = nn.Embedding(cfg.K, cfg.d)
        self.pos_embed = nn.Parameter(torch.zeros(1, cfg.L, cfg.d))
        self.time_embed = TimeEmbedding(cfg.d, cfg.T, cfg.activation)
        self.memory_proj = nn.Identity() if d_enc == cfg.d else nn.Linear(d_enc, cfg.d)
        self.blocks = nn.ModuleList(
            DecoderBlock(cfg.d, cfg.n_heads, cfg.activation, cfg.mlp_ratio, cfg.dropout)
            for _ in range(cfg.n_layers)
        )
        self.norm = nn.LayerNorm(cfg.d)
        self.char_head = nn.Linear(cfg.d, cfg.K)
        self.presence_head = nn.Linear(cfg.d, 1)

    def forward(self, x_t, z, t) -> DenoiserOutput:
        c = self.cfg
        if x_t.shape[-1] != c.L:
            raise ShapeMismatch(f"expected sequences of length {c.L}, got {x_t.shape[-1]}")
        t = torch.as_tensor(t, dtype=torch.long).expand(x_t.shape[0])
        temb = self.time_embed(t).unsqueeze(1)
        memory = self.memory_proj(z)
        h = self.tok_embed(x_t) + self.pos_embed
        for blk in self.blocks:
            # Time signal enters every layer's input (first layer included).
            h = blk(h + temb, memory)
        h = self.norm(h)
        return DenoiserOutput(self.char_head(h), self.presence_head(h).squeeze(-1))


class DiffusionSTR(nn.Module):
    """Image-conditioned denoiser over fixed-length token sequences."""

    def __init__(self, vision: VisionConfig, decoder: DecoderConfig):
        super().__init__()
        self.vision_cfg = vision
        self.decoder_cfg = decoder
        self.encoder = VisionEncoder(vision, decoder.activation, decoder.mlp_ratio, decoder.dropout)
        self.denoiser = Denoiser(decoder, vision.d_enc)
        self.apply(_init_weights)
        nn.init.trunc_normal_(self.encoder.pos_embed, std=0.02)
        nn.init.trunc_normal_(self.denoiser.pos_embed, std=0.02)

    def encode_image(self, images):
        """``(B, H, W, C)`` pixels in [-1, 1] -> ``(B, n_patches, d_enc)`` features."""
        return self.encoder(images)

    def denoise(self, x_t, z, t) -> DenoiserOutput:
        return self.denoiser(x_t, z, t)

    def forward(self, images, x_t, t) -> DenoiserOutput:
        return self.denoise(x_t, self.encode_image(images), t)


def _init_weights(m):
    if isinstance(m, nn.Linear):
        nn.init.trunc_normal_(m.weight, std=0.02)
        if m.bias is not None:
            nn.init.zeros_(m.bias)
    elif isinstance(m, nn.Embedding):
        nn.init.trunc_normal_(m.weight, std=0.02)
    elif isinstance(m, nn.LayerNorm):
        nn.init.ones_(m.weight)
        nn.init.zeros_(m.bias)
