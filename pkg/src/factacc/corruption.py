"""Synthetic factual corruption: permute same-type entity surfaces in a
document so the text stays fluent and lexically near-identical while its
facts go wrong.

Dates are special-cased: only the month-day part moves between date mentions,
years stay put. This keeps corrupted documents n-gram-similar to the original
(surface-overlap metrics barely move) while knowledge-base facts break.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .corpus import AnnotatedDocument, KnowledgeBase
from .facts import EntityRef, EntityType
from .supervision import label_pairs

CORRUPTIBLE_TYPES = (EntityType.DATE, EntityType.LOCATION, EntityType.PERSON)

_MONTHS = {
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december",
}
_DAY_TOKEN = re.compile(r"^(\d{1,2})(\D*)$")


@dataclass
class CorruptionLog:
    """What a corruption pass did to one document."""

    doc_id: str
    swaps: list[tuple[EntityRef, str]] = field(default_factory=list)
    n_facts_total: int = 0
    n_facts_corrupted: int = 0
    n_unparseable_dates: int = 0

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "swaps": [{"before": m.to_json(), "after": after} for m, after in self.swaps],
            "n_facts_total": self.n_facts_total,
            "n_facts_corrupted": self.n_facts_corrupted,
            "n_unparseable_dates": self.n_unparseable_dates,
        }


def _date_parts(tokens: tuple[str, ...]) -> tuple[str, str, tuple[str, ...]] | None:
    """Split date-mention tokens into (month, day-digits, trailer tokens).

    Recognizes the "Month D" prefix (day may carry trailing punctuation,
    which stays with the position); anything after the day token, such as a
    comma and year, is the untouched trailer.
    """
    if len(tokens) < 2 or tokens[0].lower() not in _MONTHS:
        return None
    m = _DAY_TOKEN.match(tokens[1])
    if not m:
        return None
    return tokens[0], m.group(1), tokens[2:]


def _swap_unit(mention: EntityRef, tokens: tuple[str, ...]) -> str | None:
    """The portion of a mention that participates in swapping: the full
    surface for people and locations, the "Month D" prefix for dates."""
    if mention.entity_type is EntityType.DATE:
        parts = _date_parts(tokens)
        if parts is None:
            return None
        month, day, _ = parts
        return f"{month} {day}"
    return " ".join(tokens)


def _apply_unit(mention: EntityRef, tokens: tuple[str, ...], new_unit: str) -> list[str]:
    if mention.entity_type is EntityType.DATE:
        month, day = new_unit.split(" ")
        suffix = _DAY_TOKEN.match(tokens[1]).group(2)  # type: ignore[union-attr]
        return [month, day + suffix, *tokens[2:]]
    return new_unit.split(" ")


def corrupt_document(
    doc: AnnotatedDocument,
    types: set[EntityType] = frozenset(CORRUPTIBLE_TYPES),
    rng_seed: int = 0,
    kb: KnowledgeBase | None = None,
) -> tuple[AnnotatedDocument, CorruptionLog]:
    """Derange entity surfaces of the selected types within one document.

    For each selected type with at least two distinct surfaces, the distinct
    surface list is rotated by a seeded nonzero shift and every mention takes
    its surface's image, so no mention keeps its surface and the set of
    surfaces present is preserved. Types with fewer than two distinct
    surfaces are untouched. Token spans and sentence bounds are recomputed.

    When a knowledge base is supplied, the log also counts the document's
    facts and how many were corrupted; a fact counts as corrupted when the
    object entity's surface changed at any mention.
    """
    log = CorruptionLog(doc_id=doc.doc_id)
    rng = random.Random(rng_seed)

    mention_tokens = {m.span: tuple(doc.tokens[m.span[0]:m.span[1]]) for m in doc.mentions}

    # units per type, in first-occurrence order
    mapping: dict[tuple[int, int], str] = {}
    for etype in sorted(types, key=lambda t: t.value):
        typed = [m for m in sorted(doc.mentions, key=lambda m: m.span) if m.entity_type is etype]
        units: list[str] = []
        unit_of: dict[tuple[int, int], str] = {}
        for m in typed:
            unit = _swap_unit(m, mention_tokens[m.span])
            if unit is None:
                log.n_unparseable_dates += 1
                continue
            unit_of[m.span] = unit
            if unit not in units:
                units.append(unit)
        if len(units) < 2:
            continue
        shift = 1 + rng.randrange(len(units) - 1)
        rotated = {units[i]: units[(i + shift) % len(units)] for i in range(len(units))}
        for span, unit in unit_of.items():
            mapping[span] = rotated[unit]

    # rebuild the token stream, replacing swapped mention spans
    ordered_mentions = sorted(doc.mentions, key=lambda m: m.span)
    swapped_ids: set[str] = set()
    new_tokens: list[str] = []
    new_bounds: list[tuple[int, int]] = []
    new_mentions: list[EntityRef] = []
    cursor = 0
    mention_iter = iter(ordered_mentions)
    pending = next(mention_iter, None)
    for s_idx, (s_start, s_end) in enumerate(doc.sentence_bounds):
        sent_start_new = len(new_tokens)
        cursor = s_start
        while pending is not None and pending.span[0] < s_end:
            m = pending
            new_tokens.extend(doc.tokens[cursor:m.span[0]])
            old_tokens = mention_tokens[m.span]
            if m.span in mapping:
                replaced = _apply_unit(m, old_tokens, mapping[m.span])
            else:
                replaced = list(old_tokens)
            span_new = (len(new_tokens), len(new_tokens) + len(replaced))
            new_tokens.extend(replaced)
            new_surface = " ".join(replaced)
            if m.span in mapping:
                log.swaps.append((m, new_surface))
                swapped_ids.add(m.canonical_id)
            new_mentions.append(EntityRef(m.canonical_id, new_surface, m.entity_type, span_new))
            cursor = m.span[1]
            pending = next(mention_iter, None)
        new_tokens.extend(doc.tokens[cursor:s_end])
        new_bounds.append((sent_start_new, len(new_tokens)))

    corrupted = AnnotatedDocument(
        doc_id=doc.doc_id,
        subject=doc.subject,
        tokens=tuple(new_tokens),
        sentence_bounds=tuple(new_bounds),
        mentions=tuple(new_mentions),
    )

    if kb is not None:
        positives, _ = label_pairs(doc, kb)
        facts = {(p.relation.id, p.object_ref.canonical_id) for p in positives}
        log.n_facts_total = len(facts)
        log.n_facts_corrupted = sum(1 for _, obj_id in facts if obj_id in swapped_ids)
    return corrupted, log


def expected_accuracy(log: CorruptionLog) -> tuple[float, float] | None:
    """(uncorrupted_fraction, corrupted_fraction) of a document's facts.

    The uncorrupted fraction is what a perfect extractor would score the
    corrupted document against the original. Undefined (None) when the
    document has no facts to count.
    """
    if log.n_facts_total == 0:
        return None
    # both as direct integer ratios, so the uncorrupted fraction is bit-equal
    # to the precision a perfect extractor computes on the same counts
    return (
        (log.n_facts_total - log.n_facts_corrupted) / log.n_facts_total,
        log.n_facts_corrupted / log.n_facts_total,
    )


def __getattr__(name):
    # the estimator wrapper pulls in scikit-learn; load it only when asked
    if name == "EntitySwapCorruptor":
        from .sklearn_api import EntitySwapCorruptor

        return EntitySwapCorruptor
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
