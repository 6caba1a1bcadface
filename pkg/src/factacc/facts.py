"""Fact tuples, relation schemas, and the token-level fact serialization format.

A fact is a (subject, relation, object) triple over normalized strings. Facts
are rendered to and parsed from flat token sequences using three reserved
separator tokens, so that sequence models can emit whole fact sets directly.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

SEP_FIELD = "<t>"
SEP_FACT = "<f>"
SEP_END = "<end>"
RESERVED_SEPARATORS = (SEP_FIELD, SEP_FACT, SEP_END)

NO_RELATION_ID = "R0"
NO_RELATION_LABEL = "no-relation"

_WS_RUN = re.compile(r"\s+")


class FactFormatError(ValueError):
    """Raised when a fact or schema violates the data-format contract."""


def normalize(text: str) -> str:
    """Canonicalize a string for fact comparison.

    Applies Unicode NFC composition, trims surrounding whitespace, and
    collapses internal whitespace runs to single spaces. Case is preserved;
    case-insensitive matching is a separate option at the metric level.
    """
    return _WS_RUN.sub(" ", unicodedata.normalize("NFC", text).strip())


@dataclass(frozen=True)
class RelationId:
    """A relation type. Identity (equality, hashing) is the id string alone;
    the label is a human-readable annotation."""

    id: str
    label: str = ""

    def __post_init__(self):
        if not self.id:
            raise FactFormatError("relation id must be non-empty")
        if not self.label:
            object.__setattr__(self, "label", self.id)

    def __eq__(self, other):
        if isinstance(other, RelationId):
            return self.id == other.id
        return NotImplemented

    def __hash__(self):
        return hash(self.id)

    def __repr__(self):
        return f"RelationId({self.id!r})"


NO_RELATION = RelationId(NO_RELATION_ID, NO_RELATION_LABEL)


class Schema:
    """An ordered, fixed set of relation types.

    Every schema contains the reserved no-relation entry ``R0``. Positions are
    contiguous from zero and stable, so they can index classifier outputs.
    """

    def __init__(self, relations: Iterable[RelationId]):
        rels = list(relations)
        ids = [r.id for r in rels]
        if len(set(ids)) != len(ids):
            raise FactFormatError("duplicate relation ids in schema")
        if NO_RELATION_ID not in ids:
            raise FactFormatError(f"schema must contain the {NO_RELATION_ID} no-relation entry")
        self.relations: tuple[RelationId, ...] = tuple(rels)
        self._index = {r.id: i for i, r in enumerate(rels)}

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self) -> Iterator[RelationId]:
        return iter(self.relations)

    def __contains__(self, rel) -> bool:
        rid = rel.id if isinstance(rel, RelationId) else rel
        return rid in self._index

    def index(self, rel) -> int:
        rid = rel.id if isinstance(rel, RelationId) else rel
        return self._index[rid]

    def lookup(self, position: int) -> RelationId:
        return self.relations[position]

    def get(self, rel_id: str) -> RelationId | None:
        pos = self._index.get(rel_id)
        return None if pos is None else self.relations[pos]

    @property
    def no_relation(self) -> RelationId:
        return self.relations[self._index[NO_RELATION_ID]]

    def real_relations(self) -> tuple[RelationId, ...]:
        """All relations except the no-relation placeholder."""
        return tuple(r for r in self.relations if r.id != NO_RELATION_ID)

    def to_json(self) -> list[dict]:
        return [{"id": r.id, "label": r.label} for r in self.relations]

    @classmethod
    def from_json(cls, data: list[dict]) -> "Schema":
        return cls(RelationId(d["id"], d.get("label", "")) for d in data)

    @classmethod
    def load(cls, path) -> "Schema":
        with open(path, encoding="utf-8") as f:
            return cls.from_json(json.load(f))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json(), f, ensure_ascii=False, indent=2)
            f.write("\n")


class EntityType(Enum):
    PERSON = "PERSON"
    LOCATION = "LOCATION"
    DATE = "DATE"
    ORGANIZATION = "ORGANIZATION"
    OTHER = "OTHER"


@dataclass(frozen=True)
class EntityRef:
    """A coreference-resolved entity mention.

    ``canonical_id`` ties mentions of the same entity together; ``surface`` is
    the mention text; ``span`` is a [start, end) token interval in its
    document, absent for document-level references like the article subject.
    """

    canonical_id: str
    surface: str
    entity_type: EntityType = EntityType.OTHER
    span: tuple[int, int] | None = None

    def __post_init__(self):
        if not self.canonical_id:
            raise FactFormatError("entity canonical_id must be non-empty")
        if self.span is not None:
            start, end = self.span
            if end <= start or start < 0:
                raise FactFormatError(f"empty or negative entity span {self.span}")

    def to_json(self) -> dict:
        data = {
            "canonical_id": self.canonical_id,
            "surface": self.surface,
            "type": self.entity_type.value,
        }
        if self.span is not None:
            data["span"] = [self.span[0], self.span[1]]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "EntityRef":
        span = data.get("span")
        return cls(
            canonical_id=data["canonical_id"],
            surface=data["surface"],
            entity_type=EntityType(data.get("type", "OTHER")),
            span=None if span is None else (int(span[0]), int(span[1])),
        )


def _check_field(name: str, value: str) -> str:
    value = normalize(value)
    if not value:
        raise FactFormatError(f"fact {name} is empty after normalization")
    parts = value.split(" ")
    for sep in RESERVED_SEPARATORS:
        if sep in parts:
            raise FactFormatError(f"fact {name} contains reserved separator {sep!r}: {value!r}")
    return value


@dataclass(frozen=True)
class FactTuple:
    """One (subject, relation, object) assertion. Fields are normalized on
    construction; none may contain a reserved separator token."""

    subject: str
    relation: RelationId
    object: str

    def __post_init__(self):
        object.__setattr__(self, "subject", _check_field("subject", self.subject))
        object.__setattr__(self, "object", _check_field("object", self.object))
        _check_field("relation", self.relation.id)

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "relation": {"id": self.relation.id, "label": self.relation.label},
            "object": self.object,
        }

    @classmethod
    def from_json(cls, data: dict) -> "FactTuple":
        rel = data["relation"]
        if isinstance(rel, str):
            rel = {"id": rel}
        return cls(data["subject"], RelationId(rel["id"], rel.get("label", "")), data["object"])


class FactSet:
    """A duplicate-free collection of fact tuples.

    Insertion order is remembered so that serialized output is deterministic,
    but no metric depends on it: membership and set algebra are what count.
    """

    def __init__(self, tuples: Iterable[FactTuple] = ()):
        self._tuples: dict[FactTuple, None] = {}
        for t in tuples:
            self.add(t)

    def add(self, t: FactTuple) -> None:
        if t.relation.id == NO_RELATION_ID:
            raise FactFormatError("R0 marks the absence of a relation and cannot be stored as a fact")
        self._tuples.setdefault(t, None)

    def __contains__(self, t: FactTuple) -> bool:
        return t in self._tuples

    def __iter__(self) -> Iterator[FactTuple]:
        return iter(self._tuples)

    def __len__(self) -> int:
        return len(self._tuples)

    def __eq__(self, other) -> bool:
        if isinstance(other, FactSet):
            return set(self._tuples) == set(other._tuples)
        return NotImplemented

    def __repr__(self):
        return f"FactSet({list(self._tuples)!r})"

    def intersection(self, other: "FactSet") -> "FactSet":
        return FactSet(t for t in self if t in other)

    def difference(self, other: "FactSet") -> "FactSet":
        return FactSet(t for t in self if t not in other)

    def union(self, other: "FactSet") -> "FactSet":
        out = FactSet(self)
        for t in other:
            out.add(t)
        return out


def serialize_facts(facts: Sequence[FactTuple]) -> list[str]:
    """Render facts as a flat token sequence.

    Fields are joined by the field separator, facts by the fact separator, and
    the sequence is terminated by the end marker. Inverse of
    :func:`parse_facts` up to set deduplication.
    """
    tokens: list[str] = []
    for i, fact in enumerate(facts):
        if i > 0:
            tokens.append(SEP_FACT)
        tokens.extend(fact.subject.split(" "))
        tokens.append(SEP_FIELD)
        tokens.extend(fact.relation.id.split(" "))
        tokens.append(SEP_FIELD)
        tokens.extend(fact.object.split(" "))
    tokens.append(SEP_END)
    return tokens


def parse_facts(tokens: Sequence[str]) -> tuple[FactSet, list[str]]:
    """Parse a token sequence back into facts.

    Model output cannot be trusted, so this never raises: the sequence is cut
    at the first end marker (or exhausted), split into fragments on the fact
    separator, and each fragment must yield exactly three non-empty fields to
    become a tuple. Anything else is returned verbatim in the malformed list.
    Relation strings outside any schema are kept as opaque ids so downstream
    metrics can still match them.
    """
    body: list[str] = []
    for tok in tokens:
        if tok == SEP_END:
            break
        body.append(tok)

    facts = FactSet()
    malformed: list[str] = []

    fragment: list[str] = []
    fragments: list[list[str]] = []
    for tok in body:
        if tok == SEP_FACT:
            fragments.append(fragment)
            fragment = []
        else:
            fragment.append(tok)
    fragments.append(fragment)

    for frag in fragments:
        if not frag:
            continue
        fields: list[list[str]] = [[]]
        for tok in frag:
            if tok == SEP_FIELD:
                fields.append([])
            else:
                fields[-1].append(tok)
        values = [normalize(" ".join(f)) for f in fields]
        if len(values) == 3 and all(values) and values[1] != NO_RELATION_ID:
            facts.add(FactTuple(values[0], RelationId(values[1]), values[2]))
        else:
            malformed.append(" ".join(frag))
    return facts, malformed


def write_fact_jsonl(facts: Iterable[FactTuple], path, extra: dict | None = None) -> None:
    """Write facts in the JSON Lines interchange format, one tuple per line."""
    with open(path, "w", encoding="utf-8") as f:
        for t in facts:
            record = dict(extra) if extra else {}
            record.update(t.to_json())
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_fact_jsonl(path) -> FactSet:
    facts = FactSet()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                facts.add(FactTuple.from_json(json.loads(line)))
    return facts
