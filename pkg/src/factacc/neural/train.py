"""Training loops for the classifier and sequence-to-sequence networks.

Adam with an inverse-square-root decay after linear warmup; classifiers
optimize per-relation binary cross-entropy against multi-hot labels, the
sequence model token-level cross-entropy with teacher forcing. Everything is
seeded and single-writer, so identical seeds give identical parameter
trajectories.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import torch
from torch import nn

from .vocab import BOS_ID, PAD_ID


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 2000
    batch_size: int = 32
    peak_lr: float = 3e-3
    warmup_steps: int = 200
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "batch_size": self.batch_size,
            "peak_lr": self.peak_lr,
            "warmup_steps": self.warmup_steps,
            "seed": self.seed,
        }


def lr_at(step: int, config: TrainConfig) -> float:
    """Linear warmup to peak_lr, then inverse-square-root decay."""
    s = step + 1
    w = max(1, config.warmup_steps)
    return config.peak_lr * min(s / w, (w / s) ** 0.5)


def pad_batch(sequences: list[list[int]], pad_id: int = PAD_ID) -> torch.Tensor:
    width = max(len(s) for s in sequences)
    out = torch.full((len(sequences), width), pad_id, dtype=torch.long)
    for i, seq in enumerate(sequences):
        out[i, : len(seq)] = torch.tensor(seq, dtype=torch.long)
    return out


class _BatchSampler:
    """Seeded shuffling epoch iterator over example indices."""

    def __init__(self, n: int, batch_size: int, seed: int):
        if n == 0:
            raise ValueError("training requires a non-empty dataset")
        self.n = n
        self.batch_size = batch_size
        self.rng = random.Random(seed)
        self._order: list[int] = []
        self._pos = 0

    def next_batch(self) -> list[int]:
        batch = []
        while len(batch) < self.batch_size:
            if self._pos >= len(self._order):
                self._order = list(range(self.n))
                self.rng.shuffle(self._order)
                self._pos = 0
            batch.append(self._order[self._pos])
            self._pos += 1
        return batch


def _run_training(model: nn.Module, config: TrainConfig, n_examples: int, step_loss) -> list[float]:
    torch.manual_seed(config.seed)
    sampler = _BatchSampler(n_examples, config.batch_size, config.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.peak_lr, betas=(0.9, 0.98), eps=1e-9)
    trace: list[float] = []
    model.train()
    for step in range(config.steps):
        lr = lr_at(step, config)
        for group in optimizer.param_groups:
            group["lr"] = lr
        optimizer.zero_grad()
        loss = step_loss(sampler.next_batch())
        loss.backward()
        optimizer.step()
        trace.append(float(loss.detach()))
    model.eval()
    return trace


def train_classifier(
    model: nn.Module,
    inputs: list[list[int]],
    targets: list[list[float]],
    config: TrainConfig,
) -> list[float]:
    """``inputs`` are encoded marked sentences, ``targets`` multi-hot rows of
    length n_relations (a single probability column for the binary model)."""
    if len(inputs) != len(targets):
        raise ValueError("inputs and targets differ in length")
    loss_fn = nn.BCEWithLogitsLoss()
    target_tensor = torch.tensor(targets, dtype=torch.float32)

    def step_loss(batch: list[int]) -> torch.Tensor:
        ids = pad_batch([inputs[i] for i in batch])
        logits = model(ids)
        return loss_fn(logits, target_tensor[batch])

    return _run_training(model, config, len(inputs), step_loss)


def train_seq2seq(
    model: nn.Module,
    sources: list[list[int]],
    targets: list[list[int]],
    config: TrainConfig,
) -> list[float]:
    """Teacher-forced cross-entropy: the decoder sees the start symbol plus
    the target shifted right and must reproduce the target."""
    if len(sources) != len(targets):
        raise ValueError("sources and targets differ in length")
    loss_fn = nn.CrossEntropyLoss(ignore_index=PAD_ID)

    def step_loss(batch: list[int]) -> torch.Tensor:
        src = pad_batch([sources[i] for i in batch])
        tgt_in = pad_batch([[BOS_ID] + targets[i] for i in batch])
        tgt_out = pad_batch([targets[i] + [PAD_ID] for i in batch])
        logits = model(src, tgt_in)
        return loss_fn(logits.reshape(-1, logits.shape[-1]), tgt_out.reshape(-1))

    return _run_training(model, config, len(sources), step_loss)
