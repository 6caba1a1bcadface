"""Word-level vocabulary with fixed low ids for control tokens."""

from __future__ import annotations

import collections
from typing import Iterable, Sequence

from ..facts import SEP_END, SEP_FACT, SEP_FIELD
from ..supervision import MARK_CLOSE, OBJ_OPEN, SUBJ_OPEN

PAD = "<pad>"
UNK = "<unk>"
BOS = "<s>"

RESERVED = (PAD, UNK, BOS, SEP_FIELD, SEP_FACT, SEP_END, SUBJ_OPEN, OBJ_OPEN, MARK_CLOSE)

PAD_ID = 0
UNK_ID = 1
BOS_ID = 2
END_ID = RESERVED.index(SEP_END)


class Vocabulary:
    """token <-> id mapping. Reserved control tokens always occupy ids
    0..len(RESERVED)-1; everything out-of-vocabulary encodes to UNK."""

    def __init__(self, tokens: Sequence[str] = ()):
        self._tokens: list[str] = list(RESERVED)
        seen = set(self._tokens)
        for tok in tokens:
            if tok not in seen:
                seen.add(tok)
                self._tokens.append(tok)
        self._ids = {tok: i for i, tok in enumerate(self._tokens)}

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def id(self, token: str) -> int:
        return self._ids.get(token, UNK_ID)

    def token(self, token_id: int) -> str:
        return self._tokens[token_id]

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self._ids.get(t, UNK_ID) for t in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self._tokens[i] for i in ids]

    @property
    def end_id(self) -> int:
        return END_ID

    def to_list(self) -> list[str]:
        return list(self._tokens)

    @classmethod
    def from_list(cls, tokens: Sequence[str]) -> "Vocabulary":
        if tuple(tokens[: len(RESERVED)]) != RESERVED:
            raise ValueError("vocabulary list does not start with the reserved tokens")
        return cls(tokens[len(RESERVED):])

    @classmethod
    def build(cls, sequences: Iterable[Sequence[str]], min_count: int = 2) -> "Vocabulary":
        """Count tokens across sequences and keep those seen at least
        ``min_count`` times, in frequency order (ties alphabetical) so the
        same corpus always yields the same vocabulary."""
        counts = collections.Counter()
        for seq in sequences:
            counts.update(tok for tok in seq if tok not in RESERVED)
        kept = [t for t, c in counts.items() if c >= min_count]
        kept.sort(key=lambda t: (-counts[t], t))
        return cls(kept)
