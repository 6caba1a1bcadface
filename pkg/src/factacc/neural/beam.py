"""Length-penalized beam search over a step function.

The search is model-agnostic: it only needs a callable mapping a batch of
equal-length prefixes to next-token log-probabilities. Hypotheses picking the
end token move to the finished pool scored by log-probability divided by the
length penalty ((5 + len) / 6) ** alpha; the best finished hypothesis wins,
falling back to the best unfinished one at the length limit.

With beam_size 1 this reduces exactly to greedy decoding: the single top
candidate per step is followed, and the search stops if that candidate ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class DecodeConfig:
    beam_size: int = 4
    length_penalty: float = 0.6
    max_len: int = 64

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.length_penalty < 0:
            raise ValueError("length_penalty must be >= 0")


def length_penalty(length: int, alpha: float) -> float:
    return ((5.0 + length) / 6.0) ** alpha


LogProbFn = Callable[[Sequence[Sequence[int]]], np.ndarray]


def decode_beam(log_prob_fn: LogProbFn, end_id: int, config: DecodeConfig) -> list[int]:
    """Return the generated token ids (including the end id when the winner
    finished). ``log_prob_fn`` receives the current prefixes, all of equal
    length, and returns an array [n_prefixes, vocab] of log-probabilities."""
    alive: list[tuple[list[int], float]] = [([], 0.0)]
    best_finished: tuple[float, list[int]] | None = None

    for _ in range(config.max_len):
        log_probs = np.asarray(log_prob_fn([seq for seq, _ in alive]))
        n, vocab = log_probs.shape
        scores = np.array([s for _, s in alive])[:, None] + log_probs
        flat = scores.ravel()
        k = min(config.beam_size, flat.size)
        top = np.argpartition(-flat, k - 1)[:k]
        # stable order: by score descending, then index, so ties never depend
        # on argpartition internals
        top = top[np.lexsort((top, -flat[top]))]

        next_alive: list[tuple[list[int], float]] = []
        for idx in top:
            parent, token = divmod(int(idx), vocab)
            seq = alive[parent][0] + [token]
            raw = float(flat[idx])
            if token == end_id:
                norm = raw / length_penalty(len(seq), config.length_penalty)
                if best_finished is None or norm > best_finished[0]:
                    best_finished = (norm, seq)
            else:
                next_alive.append((seq, raw))
        alive = next_alive
        if not alive:
            break

    if best_finished is not None:
        return best_finished[1]
    if not alive:
        return []
    best = max(alive, key=lambda h: h[1] / length_penalty(len(h[0]), config.length_penalty))
    return best[0]
