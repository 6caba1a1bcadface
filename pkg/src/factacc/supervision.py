"""Distant supervision: label entity pairs in documents against a knowledge
base and materialize classifier / sequence-to-sequence training examples.

An entity pair (subject, other) is positive under every relation the KB holds
for it and negative (labeled R0) when the KB holds none. Labels are noisy by
construction: the sentence containing the pair need not actually express the
relation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .corpus import AnnotatedDocument, KnowledgeBase
from .facts import (
    NO_RELATION_ID,
    EntityRef,
    FactFormatError,
    FactSet,
    FactTuple,
    RelationId,
    normalize,
    serialize_facts,
)

SUBJ_OPEN = "SUBJ{"
OBJ_OPEN = "OBJ{"
MARK_CLOSE = "}"

BINARY_POSITIVE = "1"
BINARY_NEGATIVE = "0"


@dataclass(frozen=True)
class LabeledPair:
    """One (subject, relation, object) labeling produced by distant
    supervision. ``object_ref`` is the first mention of the object entity."""

    subject: EntityRef
    relation: RelationId
    object_ref: EntityRef

    def to_fact(self) -> FactTuple:
        return FactTuple(normalize(self.subject.surface), self.relation, normalize(self.object_ref.surface))


@dataclass(frozen=True)
class ClassifierExample:
    """A marked sentence plus its relation labels.

    The sentence wraps the subject mention in SUBJ{ } and the object mention
    in OBJ{ }. ``labels`` holds relation ids; a negative example carries only
    the no-relation id and a binary example carries "1" or "0".
    """

    marked_tokens: tuple[str, ...]
    subject_id: str
    object_id: str
    labels: frozenset[str]

    def to_json(self) -> dict:
        return {
            "tokens": list(self.marked_tokens),
            "subject_id": self.subject_id,
            "object_id": self.object_id,
            "labels": sorted(self.labels),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClassifierExample":
        return cls(tuple(data["tokens"]), data["subject_id"], data["object_id"], frozenset(data["labels"]))


@dataclass(frozen=True)
class E2EExample:
    """A whole-document extraction example: the subject surface prefixed to
    the article tokens, paired with the serialized positive facts."""

    input_tokens: tuple[str, ...]
    target_tokens: tuple[str, ...]

    def to_json(self) -> dict:
        return {"input": list(self.input_tokens), "target": list(self.target_tokens)}

    @classmethod
    def from_json(cls, data: dict) -> "E2EExample":
        return cls(tuple(data["input"]), tuple(data["target"]))


def distinct_object_entities(doc: AnnotatedDocument) -> list[tuple[str, EntityRef]]:
    """Object entities of a document: one entry per canonical id other than
    the subject's, represented by its first mention in token order."""
    seen: dict[str, EntityRef] = {}
    for m in sorted(doc.mentions, key=lambda m: m.span):
        if m.canonical_id == doc.subject.canonical_id:
            continue
        seen.setdefault(m.canonical_id, m)
    return list(seen.items())


def label_pairs(doc: AnnotatedDocument, kb: KnowledgeBase) -> tuple[set[LabeledPair], set[LabeledPair]]:
    """Label every (subject, object-entity) pair of the document against the
    KB. Returns (positives, negatives); a pair with no KB relation yields a
    single R0-labeled negative."""
    positives: set[LabeledPair] = set()
    negatives: set[LabeledPair] = set()
    for canonical_id, first_mention in distinct_object_entities(doc):
        relations = kb.relations_for(doc.subject.canonical_id, canonical_id)
        if relations:
            for rel in sorted(relations, key=lambda r: r.id):
                positives.add(LabeledPair(doc.subject, rel, first_mention))
        else:
            negatives.add(LabeledPair(doc.subject, RelationId(NO_RELATION_ID, "no-relation"), first_mention))
    return positives, negatives


class OverlappingSpansError(ValueError):
    pass


def mark_sentence(sentence: tuple[str, ...], subj: EntityRef, obj: EntityRef) -> tuple[str, ...]:
    """Wrap the subject span in SUBJ{ } and the object span in OBJ{ } markers.

    Spans are sentence-relative. Overlapping spans cannot be marked and raise;
    dataset builders count and skip such pairs.
    """
    s_start, s_end = subj.span  # type: ignore[misc]
    o_start, o_end = obj.span  # type: ignore[misc]
    for start, end in ((s_start, s_end), (o_start, o_end)):
        if start < 0 or end > len(sentence):
            raise ValueError(f"span ({start}, {end}) outside sentence of length {len(sentence)}")
    if s_start < o_end and o_start < s_end:
        raise OverlappingSpansError(f"subject span {subj.span} overlaps object span {obj.span}")

    pieces: list[tuple[int, int, str]] = [
        (s_start, s_end, SUBJ_OPEN),
        (o_start, o_end, OBJ_OPEN),
    ]
    pieces.sort()
    out: list[str] = []
    pos = 0
    for start, end, opener in pieces:
        out.extend(sentence[pos:start])
        out.append(opener)
        out.extend(sentence[start:end])
        out.append(MARK_CLOSE)
        pos = end
    out.extend(sentence[pos:])
    return tuple(out)


def strip_markers(tokens: Iterable[str]) -> tuple[str, ...]:
    return tuple(t for t in tokens if t not in (SUBJ_OPEN, OBJ_OPEN, MARK_CLOSE))


@dataclass
class DatasetStats:
    n_positive: int = 0
    n_negative: int = 0
    n_negative_dropped: int = 0
    n_skipped_overlap: int = 0
    n_skipped_invalid: int = 0
    relation_histogram: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
            "n_negative_dropped": self.n_negative_dropped,
            "n_skipped_overlap": self.n_skipped_overlap,
            "n_skipped_invalid": self.n_skipped_invalid,
            "relation_histogram": dict(sorted(self.relation_histogram.items())),
        }


def _sentence_cooccurrences(
    doc: AnnotatedDocument, object_id: str
) -> Iterator[tuple[tuple[str, ...], EntityRef, EntityRef]]:
    """Yield (sentence_tokens, subject_mention, object_mention) for every
    sentence containing a mention of both the subject entity and the object
    entity, using the first mention of each within the sentence. A pair
    co-occurring in several sentences yields one tuple per sentence."""
    by_sentence: dict[int, dict[str, EntityRef]] = {}
    for m in sorted(doc.mentions, key=lambda m: m.span):
        idx = doc.sentence_index(m.span)
        if idx is None:
            continue
        by_sentence.setdefault(idx, {}).setdefault(m.canonical_id, m)
    for idx in sorted(by_sentence):
        found = by_sentence[idx]
        subj_m = found.get(doc.subject.canonical_id)
        obj_m = found.get(object_id)
        if subj_m is None or obj_m is None:
            continue
        start, _ = doc.sentence_bounds[idx]
        rebase = lambda span: (span[0] - start, span[1] - start)
        yield (
            doc.sentence_tokens(idx),
            EntityRef(subj_m.canonical_id, subj_m.surface, subj_m.entity_type, rebase(subj_m.span)),
            EntityRef(obj_m.canonical_id, obj_m.surface, obj_m.entity_type, rebase(obj_m.span)),
        )


def build_classifier_dataset(
    docs: Iterable[AnnotatedDocument],
    kb: KnowledgeBase,
    negative_ratio: float | None = 3.0,
    binary: bool = False,
    rng_seed: int = 0,
) -> tuple[list[ClassifierExample], DatasetStats]:
    """One example per (sentence, entity pair) where the sentence mentions
    both entities. Negatives are downsampled to at most ``negative_ratio``
    times the positive count (None means keep all), with a seeded uniform
    draw so runs are reproducible."""
    stats = DatasetStats()
    positive_examples: list[tuple[int, ClassifierExample]] = []
    negative_examples: list[tuple[int, ClassifierExample]] = []
    order = 0

    for doc in docs:
        positives, negatives = label_pairs(doc, kb)
        labels_by_object: dict[str, frozenset[str]] = {}
        for p in positives:
            labels_by_object.setdefault(p.object_ref.canonical_id, frozenset())
            labels_by_object[p.object_ref.canonical_id] |= {p.relation.id}
        for n in negatives:
            labels_by_object.setdefault(n.object_ref.canonical_id, frozenset({NO_RELATION_ID}))

        for object_id, labels in sorted(labels_by_object.items()):
            is_positive = labels != frozenset({NO_RELATION_ID})
            for sentence, subj_m, obj_m in _sentence_cooccurrences(doc, object_id):
                try:
                    marked = mark_sentence(sentence, subj_m, obj_m)
                except OverlappingSpansError:
                    stats.n_skipped_overlap += 1
                    continue
                if binary:
                    out_labels = frozenset({BINARY_POSITIVE if is_positive else BINARY_NEGATIVE})
                else:
                    out_labels = labels
                example = ClassifierExample(marked, doc.subject.canonical_id, object_id, out_labels)
                if is_positive:
                    positive_examples.append((order, example))
                else:
                    negative_examples.append((order, example))
                order += 1

    kept_negatives = negative_examples
    if negative_ratio is not None:
        cap = int(negative_ratio * len(positive_examples))
        if len(negative_examples) > cap:
            rng = random.Random(rng_seed)
            kept_negatives = sorted(rng.sample(negative_examples, cap))
            stats.n_negative_dropped = len(negative_examples) - cap

    merged = sorted(positive_examples + kept_negatives)
    out = [ex for _, ex in merged]
    stats.n_positive = len(positive_examples)
    stats.n_negative = len(kept_negatives)
    for _, ex in merged:
        for label in ex.labels:
            stats.relation_histogram[label] = stats.relation_histogram.get(label, 0) + 1
    return out, stats


def build_e2e_dataset(
    docs: Iterable[AnnotatedDocument], kb: KnowledgeBase
) -> tuple[list[E2EExample], DatasetStats]:
    """One example per document: input is the subject surface prefixed to the
    article tokens, target serializes all positive facts. Negative pairs are
    dropped; a model staying silent about a pair asserts nothing. Facts are
    ordered by first mention of the object, ties broken by relation id."""
    stats = DatasetStats()
    out: list[E2EExample] = []
    for doc in docs:
        positives, negatives = label_pairs(doc, kb)
        stats.n_negative_dropped += len(negatives)
        ordered = sorted(positives, key=lambda p: (p.object_ref.span, p.relation.id))
        facts = []
        for pair in ordered:
            try:
                facts.append(pair.to_fact())
            except FactFormatError:
                stats.n_skipped_invalid += 1
        stats.n_positive += len(facts)
        for fact in facts:
            stats.relation_histogram[fact.relation.id] = stats.relation_histogram.get(fact.relation.id, 0) + 1
        input_tokens = tuple(normalize(doc.subject.surface).split(" ")) + doc.tokens
        target = tuple(serialize_facts(facts))
        out.append(E2EExample(input_tokens, target))
    return out, stats


def reduce_document(doc: AnnotatedDocument) -> AnnotatedDocument:
    """Drop sentences containing no entity mention, recomputing token offsets.

    Mentions always survive: each lies inside one sentence, and sentences
    with mentions are exactly the ones kept.
    """
    keep: list[int] = []
    mention_sentences = {doc.sentence_index(m.span) for m in doc.mentions}
    for idx in range(len(doc.sentence_bounds)):
        if idx in mention_sentences:
            keep.append(idx)

    new_tokens: list[str] = []
    new_bounds: list[tuple[int, int]] = []
    offset_by_sentence: dict[int, int] = {}
    for idx in keep:
        start, end = doc.sentence_bounds[idx]
        offset_by_sentence[idx] = len(new_tokens) - start
        new_bounds.append((len(new_tokens), len(new_tokens) + (end - start)))
        new_tokens.extend(doc.tokens[start:end])

    new_mentions = []
    for m in doc.mentions:
        idx = doc.sentence_index(m.span)
        shift = offset_by_sentence[idx]
        new_mentions.append(EntityRef(m.canonical_id, m.surface, m.entity_type, (m.span[0] + shift, m.span[1] + shift)))

    return AnnotatedDocument(
        doc_id=doc.doc_id,
        subject=doc.subject,
        tokens=tuple(new_tokens),
        sentence_bounds=tuple(new_bounds),
        mentions=tuple(new_mentions),
    )


def oracle_facts(doc: AnnotatedDocument, kb: KnowledgeBase) -> FactSet:
    """The fact set distant supervision assigns to a document: all positive
    pairs as tuples over surfaces. Serves as a perfect-extractor reference."""
    positives, _ = label_pairs(doc, kb)
    ordered = sorted(positives, key=lambda p: (p.object_ref.span, p.relation.id))
    return FactSet(p.to_fact() for p in ordered)


def write_examples_jsonl(examples: Iterable[ClassifierExample | E2EExample], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ex in examples:
            f.write(json.dumps(ex.to_json(), ensure_ascii=False) + "\n")


def read_classifier_examples(path) -> list[ClassifierExample]:
    with open(path, encoding="utf-8") as f:
        return [ClassifierExample.from_json(json.loads(line)) for line in f if line.strip()]


def read_e2e_examples(path) -> list[E2EExample]:
    with open(path, encoding="utf-8") as f:
        return [E2EExample.from_json(json.loads(line)) for line in f if line.strip()]
