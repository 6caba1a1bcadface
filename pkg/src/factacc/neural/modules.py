"""Transformer building blocks: sinusoidal positions, multi-head attention,
pre-norm encoder and decoder layers.

Attention is written out explicitly (no fused kernels) so tests can assert on
the attention distributions and so masking semantics stay inspectable: masks
are additive, with -inf marking forbidden key positions.
"""

from __future__ import annotations

import math

import torch
from torch import nn


def sinusoidal_positions(length: int, d_model: int, dtype=torch.float32) -> torch.Tensor:
    """The fixed sin/cos position table, shape [length, d_model]. Requires an
    even model width so sin and cos halves interleave cleanly."""
    if d_model % 2 != 0:
        raise ValueError("d_model must be even for sinusoidal positions")
    position = torch.arange(length, dtype=dtype).unsqueeze(1)
    div = torch.exp(torch.arange(0, d_model, 2, dtype=dtype) * (-math.log(10000.0) / d_model))
    table = torch.zeros(length, d_model, dtype=dtype)
    table[:, 0::2] = torch.sin(position * div)
    table[:, 1::2] = torch.cos(position * div)
    return table


def padding_mask(ids: torch.Tensor, pad_id: int) -> torch.Tensor:
    """Additive mask [B, 1, 1, T] with -inf at padding key positions."""
    mask = torch.zeros(ids.shape, dtype=torch.get_default_dtype(), device=ids.device)
    mask = mask.masked_fill(ids == pad_id, float("-inf"))
    return mask[:, None, None, :]


def causal_mask(length: int, device=None) -> torch.Tensor:
    """Additive mask [1, 1, T, T] forbidding attention to later positions."""
    mask = torch.full((length, length), float("-inf"), device=device)
    mask = torch.triu(mask, diagonal=1)
    return mask[None, None, :, :]


class MultiHeadAttention(nn.Module):
    def __init__(self, d_model: int, n_heads: int, dropout: float = 0.0):
        super().__init__()
        if d_model % n_heads != 0:
            raise ValueError(f"d_model {d_model} not divisible by n_heads {n_heads}")
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.wq = nn.Linear(d_model, d_model)
        self.wk = nn.Linear(d_model, d_model)
        self.wv = nn.Linear(d_model, d_model)
        self.wo = nn.Linear(d_model, d_model)
        self.dropout = nn.Dropout(dropout)
        # weights of the most recent forward, [B, H, Tq, Tk]; for inspection
        self.last_attention: torch.Tensor | None = None

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        b, t, _ = x.shape
        return x.view(b, t, self.n_heads, self.d_head).transpose(1, 2)

    def forward(self, query, key, value, mask=None):
        q = self._split(self.wq(query))
        k = self._split(self.wk(key))
        v = self._split(self.wv(value))
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.d_head)
        if mask is not None:
            scores = scores + mask
        attn = torch.softmax(scores, dim=-1)
        self.last_attention = attn.detach()
        out = self.dropout(attn) @ v
        b, _, t, _ = out.shape
        out = out.transpose(1, 2).reshape(b, t, self.n_heads * self.d_head)
        return self.wo(out)


class FeedForward(nn.Module):
    def __init__(self, d_model: int, d_ffn: int, dropout: float = 0.0):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(d_model, d_ffn),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(d_ffn, d_model),
        )

    def forward(self, x):
        return self.net(x)


class EncoderLayer(nn.Module):
    """Pre-norm self-attention + feed-forward block."""

    def __init__(self, d_model: int, n_heads: int, d_ffn: int, dropout: float = 0.0):
        super().__init__()
        self.self_attn = MultiHeadAttention(d_model, n_heads, dropout)
        self.ffn = FeedForward(d_model, d_ffn, dropout)
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x, mask=None):
        h = self.norm1(x)
        x = x + self.dropout(self.self_attn(h, h, h, mask))
        x = x + self.dropout(self.ffn(self.norm2(x)))
        return x


class DecoderLayer(nn.Module):
    """Pre-norm causal self-attention + cross-attention + feed-forward."""

    def __init__(self, d_model: int, n_heads: int, d_ffn: int, dropout: float = 0.0):
        super().__init__()
        self.self_attn = MultiHeadAttention(d_model, n_heads, dropout)
        self.cross_attn = MultiHeadAttention(d_model, n_heads, dropout)
        self.ffn = FeedForward(d_model, d_ffn, dropout)
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.norm3 = nn.LayerNorm(d_model)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x, memory, self_mask=None, cross_mask=None):
        h = self.norm1(x)
        x = x + self.dropout(self.self_attn(h, h, h, self_mask))
        h = self.norm2(x)
        x = x + self.dropout(self.cross_attn(h, memory, memory, cross_mask))
        x = x + self.dropout(self.ffn(self.norm3(x)))
        return x


class TokenEmbedding(nn.Module):
    """Scaled token embedding plus fixed sinusoidal positions."""

    def __init__(self, vocab_size: int, d_model: int, max_len: int, dropout: float = 0.0):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, d_model)
        self.d_model = d_model
        self.dropout = nn.Dropout(dropout)
        self.register_buffer("positions", sinusoidal_positions(max_len, d_model), persistent=False)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        t = ids.shape[1]
        if t > self.positions.shape[0]:
            raise ValueError(f"sequence length {t} exceeds position table {self.positions.shape[0]}")
        x = self.embed(ids) * math.sqrt(self.d_model)
        return self.dropout(x + self.positions[:t].to(x.dtype))
