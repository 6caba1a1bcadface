"""The two extraction networks: a multi-label relation classifier over marked
sentences and an encoder-decoder that emits serialized fact sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import torch
from torch import nn

from .modules import (
    DecoderLayer,
    EncoderLayer,
    TokenEmbedding,
    causal_mask,
    padding_mask,
)
from .vocab import PAD_ID


@dataclass(frozen=True)
class ModelConfig:
    """Transformer dimensions. Defaults are desk scale: small enough to train
    on a laptop CPU in minutes while exercising the full architecture."""

    n_layers: int = 2
    d_model: int = 64
    n_heads: int = 4
    d_ffn: int = 128
    dropout: float = 0.1
    max_input_len: int = 256
    max_target_len: int = 64

    def __post_init__(self):
        if self.d_model % self.n_heads != 0:
            raise ValueError(f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if self.d_model % 2 != 0:
            raise ValueError("d_model must be even")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "ModelConfig":
        return cls(**data)


# Production-scale reference configuration; recorded for comparability, far
# beyond what this package is meant to train.
FULL_SCALE = ModelConfig(
    n_layers=6, d_model=512, n_heads=8, d_ffn=2048, dropout=0.1,
    max_input_len=1024, max_target_len=256,
)
FULL_SCALE_STEPS = 50_000
FULL_SCALE_BATCH_CLASSIFIER = 1024
FULL_SCALE_BATCH_SEQ2SEQ = 256


class RelationClassifierNet(nn.Module):
    """Embed, encode, project each position to one logit per relation, then
    take the element-wise max over positions and squash with a sigmoid."""

    def __init__(self, vocab_size: int, n_relations: int, config: ModelConfig):
        super().__init__()
        self.config = config
        self.n_relations = n_relations
        self.embedding = TokenEmbedding(vocab_size, config.d_model, config.max_input_len, config.dropout)
        self.layers = nn.ModuleList(
            EncoderLayer(config.d_model, config.n_heads, config.d_ffn, config.dropout)
            for _ in range(config.n_layers)
        )
        self.norm = nn.LayerNorm(config.d_model)
        self.proj = nn.Linear(config.d_model, n_relations)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        """ids [B, T] -> logits [B, n_relations]."""
        mask = padding_mask(ids, PAD_ID)
        x = self.embedding(ids)
        for layer in self.layers:
            x = layer(x, mask)
        per_position = self.proj(self.norm(x))
        blocked = per_position.masked_fill((ids == PAD_ID)[:, :, None], float("-inf"))
        return blocked.max(dim=1).values

    def probabilities(self, ids: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.forward(ids))


class Seq2SeqNet(nn.Module):
    """Encoder-decoder over a shared embedding; the output projection is tied
    to the embedding matrix."""

    def __init__(self, vocab_size: int, config: ModelConfig):
        super().__init__()
        self.config = config
        self.vocab_size = vocab_size
        # +1: teacher forcing prepends the start symbol to a full-length target
        max_len = max(config.max_input_len, config.max_target_len + 1)
        self.embedding = TokenEmbedding(vocab_size, config.d_model, max_len, config.dropout)
        self.encoder_layers = nn.ModuleList(
            EncoderLayer(config.d_model, config.n_heads, config.d_ffn, config.dropout)
            for _ in range(config.n_layers)
        )
        self.decoder_layers = nn.ModuleList(
            DecoderLayer(config.d_model, config.n_heads, config.d_ffn, config.dropout)
            for _ in range(config.n_layers)
        )
        self.encoder_norm = nn.LayerNorm(config.d_model)
        self.decoder_norm = nn.LayerNorm(config.d_model)

    def encode(self, src: torch.Tensor) -> torch.Tensor:
        mask = padding_mask(src, PAD_ID)
        x = self.embedding(src)
        for layer in self.encoder_layers:
            x = layer(x, mask)
        return self.encoder_norm(x)

    def decode(self, memory: torch.Tensor, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        """tgt_in [B, T] (start symbol first) -> logits [B, T, vocab]."""
        self_mask = causal_mask(tgt_in.shape[1], device=tgt_in.device)
        self_mask = self_mask + padding_mask(tgt_in, PAD_ID)
        cross_mask = padding_mask(src, PAD_ID)
        x = self.embedding(tgt_in)
        for layer in self.decoder_layers:
            x = layer(x, memory, self_mask, cross_mask)
        x = self.decoder_norm(x)
        return x @ self.embedding.embed.weight.t()

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        return self.decode(self.encode(src), src, tgt_in)
