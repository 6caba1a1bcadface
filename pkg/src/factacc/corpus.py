"""Annotated documents and the knowledge base they are labeled against.

Documents arrive pre-annotated (tokens, sentence boundaries, coreference-
resolved entity mentions) in a JSON Lines format, or can be produced by the
deliberately simple heuristic annotator for corpora that lack annotations.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable

from .facts import NO_RELATION_ID, EntityRef, EntityType, RelationId, Schema


class CorpusError(ValueError):
    """Raised for malformed documents or knowledge-base files."""


@dataclass(frozen=True)
class AnnotatedDocument:
    """Tokenized text with sentence bounds and typed entity mentions.

    ``subject`` is the entity the document is about; object entities for
    labeling are all other mentioned entities. Sentence bounds partition the
    token range and every mention lies inside exactly one sentence.
    """

    doc_id: str
    subject: EntityRef
    tokens: tuple[str, ...]
    sentence_bounds: tuple[tuple[int, int], ...]
    mentions: tuple[EntityRef, ...]

    def __post_init__(self):
        pos = 0
        for start, end in self.sentence_bounds:
            if start != pos or end <= start:
                raise CorpusError(
                    f"{self.doc_id}: sentence bounds must partition the token range, "
                    f"got {self.sentence_bounds}"
                )
            pos = end
        if pos != len(self.tokens):
            raise CorpusError(f"{self.doc_id}: sentence bounds cover {pos} of {len(self.tokens)} tokens")
        for m in self.mentions:
            if m.span is None:
                raise CorpusError(f"{self.doc_id}: mention {m.canonical_id} has no span")
            if self.sentence_index(m.span) is None:
                raise CorpusError(
                    f"{self.doc_id}: mention span {m.span} does not lie within one sentence"
                )

    def sentence_index(self, span: tuple[int, int]) -> int | None:
        """Index of the sentence containing the span, or None if it straddles."""
        for i, (start, end) in enumerate(self.sentence_bounds):
            if start <= span[0] and span[1] <= end:
                return i
        return None

    def sentence_tokens(self, index: int) -> tuple[str, ...]:
        start, end = self.sentence_bounds[index]
        return self.tokens[start:end]

    def text(self) -> str:
        return " ".join(self.tokens)

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "subject": self.subject.to_json(),
            "tokens": list(self.tokens),
            "sentences": [[s, e] for s, e in self.sentence_bounds],
            "mentions": [m.to_json() for m in self.mentions],
        }

    @classmethod
    def from_json(cls, data: dict) -> "AnnotatedDocument":
        return cls(
            doc_id=data["doc_id"],
            subject=EntityRef.from_json(data["subject"]),
            tokens=tuple(data["tokens"]),
            sentence_bounds=tuple((int(s), int(e)) for s, e in data["sentences"]),
            mentions=tuple(EntityRef.from_json(m) for m in data["mentions"]),
        )


def read_documents(path) -> list[AnnotatedDocument]:
    docs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                docs.append(AnnotatedDocument.from_json(json.loads(line)))
            except (KeyError, ValueError) as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from exc
    return docs


def write_documents(docs: Iterable[AnnotatedDocument], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for doc in docs:
            f.write(json.dumps(doc.to_json(), ensure_ascii=False) + "\n")


class KnowledgeBase:
    """Triple store with a (subject_id, object_id) -> relations index."""

    def __init__(self, triples: Iterable[tuple[str, RelationId, str]] = ()):
        self.triples: set[tuple[str, RelationId, str]] = set()
        self._pair_index: dict[tuple[str, str], set[RelationId]] = {}
        for s, r, o in triples:
            self.add(s, r, o)

    def add(self, subject_id: str, relation: RelationId, object_id: str) -> None:
        if relation.id == NO_RELATION_ID:
            raise CorpusError("the no-relation id cannot appear as a stored triple")
        self.triples.add((subject_id, relation, object_id))
        self._pair_index.setdefault((subject_id, object_id), set()).add(relation)

    def relations_for(self, subject_id: str, object_id: str) -> frozenset[RelationId]:
        return frozenset(self._pair_index.get((subject_id, object_id), ()))

    def __len__(self) -> int:
        return len(self.triples)

    @classmethod
    def load(cls, path, schema: Schema | None = None) -> "KnowledgeBase":
        """Load a TSV of subject_id, relation_id, object_id rows. When a
        schema is given, relation ids must belong to it."""
        kb = cls()
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise CorpusError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
                subject_id, rel_id, object_id = parts
                if schema is not None:
                    rel = schema.get(rel_id)
                    if rel is None:
                        raise CorpusError(f"{path}:{lineno}: relation {rel_id!r} not in schema")
                else:
                    rel = RelationId(rel_id)
                kb.add(subject_id, rel, object_id)
        return kb

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for s, r, o in sorted(self.triples, key=lambda t: (t[0], t[1].id, t[2])):
                f.write(f"{s}\t{r.id}\t{o}\n")


_MONTHS = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)
_DATE_START = re.compile(
    r"^(%s)$" % "|".join(_MONTHS), re.IGNORECASE
)
_SENT_END = re.compile(r"[.!?]$")


def annotate_heuristic(doc_id: str, text: str, subject_surface: str | None = None) -> AnnotatedDocument:
    """Best-effort annotator for plain text: capitalized token runs become
    entity mentions with exact-string coreference, month-day patterns become
    DATE mentions. Markedly lower quality than real NER + coreference; meant
    only to make un-annotated corpora usable at all.
    """
    tokens = text.split()
    bounds: list[tuple[int, int]] = []
    start = 0
    for i, tok in enumerate(tokens):
        if _SENT_END.search(tok):
            bounds.append((start, i + 1))
            start = i + 1
    if start < len(tokens):
        bounds.append((start, len(tokens)))
    if not bounds:
        bounds = [(0, 0)]

    mentions: list[EntityRef] = []

    def add_mention(span_start: int, span_end: int, etype: EntityType) -> None:
        raw = tokens[span_start:span_end]
        surface = " ".join(t.strip(".,;:!?") for t in raw).strip()
        if not surface:
            return
        mentions.append(EntityRef(surface, surface, etype, (span_start, span_end)))

    for s_start, s_end in bounds:
        i = s_start
        while i < s_end:
            tok = tokens[i]
            word = tok.strip(".,;:!?")
            if _DATE_START.match(word) and i + 1 < s_end and tokens[i + 1].strip(".,;:!?").isdigit():
                end = i + 2
                # absorb an attached ", year"
                if tokens[i + 1].endswith(",") and end < s_end and tokens[end].strip(".,;:!?").isdigit():
                    end += 1
                add_mention(i, end, EntityType.DATE)
                i = end
                continue
            if word[:1].isupper() and i > s_start:
                end = i + 1
                while end < s_end and tokens[end].strip(".,;:!?")[:1].isupper() and not tokens[end - 1].endswith((".", "!", "?")):
                    end += 1
                add_mention(i, end, EntityType.OTHER)
                i = end
                continue
            i += 1

    if subject_surface is None:
        subject_surface = mentions[0].surface if mentions else doc_id
    subject = EntityRef(subject_surface, subject_surface, EntityType.OTHER)
    return AnnotatedDocument(doc_id, subject, tuple(tokens), tuple(bounds), tuple(mentions))
