"""Precision-based factual accuracy over fact sets, plus ROUGE-1/2/L.

The factual accuracy of generated text against a reference is the precision
of the generated fact tuples after both sides are restricted to claims that
the other side can verify or refute (claims sharing a matching key).
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .facts import FactSet, FactTuple


class MatchKey(Enum):
    """What makes a truth claim and a generated claim 'about the same thing'.

    SUBJECT_RELATION pairs claims asserting the same relation of the same
    subject; ENTITY_PAIR pairs claims about the same (subject, object) pair
    and is used by binary related/unrelated extractors.
    """

    SUBJECT_RELATION = "subject_relation"
    ENTITY_PAIR = "entity_pair"


def _canon(t: FactTuple, case_fold: bool) -> tuple[str, str, str]:
    if case_fold:
        return (t.subject.casefold(), t.relation.id.casefold(), t.object.casefold())
    return (t.subject, t.relation.id, t.object)


def _key(canon: tuple[str, str, str], key: MatchKey) -> tuple[str, str]:
    s, r, o = canon
    return (s, r) if key is MatchKey.SUBJECT_RELATION else (s, o)


@dataclass
class FactAccResult:
    """Outcome of a factual-accuracy computation, with full audit trail.

    ``value`` is None exactly when the generated text makes no verifiable
    claims; its numeric projection is then 0.0, matching the human-rating
    convention of scoring unverifiable output with the minimum.
    """

    value: float | None
    no_verifiable_claims: bool
    n_truth: int
    n_gen: int
    n_truth_filtered: int
    n_gen_filtered: int
    n_matched: int
    matched: list[FactTuple] = field(default_factory=list)
    refuted: list[FactTuple] = field(default_factory=list)
    unverifiable: list[FactTuple] = field(default_factory=list)

    @property
    def numeric(self) -> float:
        return 0.0 if self.value is None else self.value

    def to_json(self) -> dict:
        return {
            "fact_acc": self.value,
            "no_verifiable_claims": self.no_verifiable_claims,
            "counts": {
                "n_truth": self.n_truth,
                "n_gen": self.n_gen,
                "n_truth_filtered": self.n_truth_filtered,
                "n_gen_filtered": self.n_gen_filtered,
                "n_matched": self.n_matched,
            },
            "matched": [t.to_json() for t in self.matched],
            "refuted": [t.to_json() for t in self.refuted],
            "unverifiable": [t.to_json() for t in self.unverifiable],
        }


def filter_verifiable(
    truth: FactSet,
    generated: FactSet,
    key: MatchKey = MatchKey.SUBJECT_RELATION,
    case_fold: bool = False,
) -> tuple[FactSet, FactSet]:
    """Restrict both fact sets to claims the other side can check.

    A tuple survives iff some tuple on the other side shares its key, so a
    surviving generated claim is either confirmed or contradicted by the
    truth side, never merely absent.
    """
    truth_keys = {_key(_canon(t, case_fold), key) for t in truth}
    gen_keys = {_key(_canon(g, case_fold), key) for g in generated}
    truth_kept = FactSet(t for t in truth if _key(_canon(t, case_fold), key) in gen_keys)
    gen_kept = FactSet(g for g in generated if _key(_canon(g, case_fold), key) in truth_keys)
    return truth_kept, gen_kept


def fact_acc(
    truth: FactSet,
    generated: FactSet,
    key: MatchKey = MatchKey.SUBJECT_RELATION,
    case_fold: bool = False,
) -> FactAccResult:
    """Precision of generated claims against the truth, after verifiability
    filtering: |truth' ∩ generated'| / |generated'|."""
    truth_kept, gen_kept = filter_verifiable(truth, generated, key, case_fold)
    truth_canon = {_canon(t, case_fold) for t in truth_kept}
    gen_canon = {_canon(g, case_fold) for g in gen_kept}

    matched = [g for g in gen_kept if _canon(g, case_fold) in truth_canon]
    refuted = [g for g in gen_kept if _canon(g, case_fold) not in truth_canon]
    unverifiable = [g for g in generated if g not in gen_kept]

    n_gen_filtered = len(gen_canon)
    n_matched = len(gen_canon & truth_canon)
    if n_gen_filtered == 0:
        value = None
    else:
        value = n_matched / n_gen_filtered
    return FactAccResult(
        value=value,
        no_verifiable_claims=n_gen_filtered == 0,
        n_truth=len(truth),
        n_gen=len(generated),
        n_truth_filtered=len(truth_kept),
        n_gen_filtered=n_gen_filtered,
        n_matched=n_matched,
        matched=matched,
        refuted=refuted,
        unverifiable=unverifiable,
    )


def external_tuple_precision(truth_tuples: FactSet, gen_tuples: FactSet,
                             case_fold: bool = False) -> FactAccResult:
    """Factual accuracy over tuples ingested from an external schema-free
    extractor, whose relations are free-text linking phrases. Identical
    computation, subject-relation keying."""
    return fact_acc(truth_tuples, gen_tuples, MatchKey.SUBJECT_RELATION, case_fold)


# --- ROUGE ---


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """ROUGE tokenization: lowercase, split on whitespace, strip punctuation
    hanging off token edges. Tokens that were pure punctuation are dropped."""
    out = []
    for raw in text.lower().split():
        tok = _strip_punct(raw)
        if tok:
            out.append(tok)
    return out


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f_measure: float

    def to_json(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f_measure": self.f_measure}


def _prf(overlap: float, n_ref: int, n_cand: int) -> RougeScore:
    recall = overlap / n_ref if n_ref else 0.0
    precision = overlap / n_cand if n_cand else 0.0
    if precision + recall == 0:
        f = 0.0
    else:
        f = 2 * precision * recall / (precision + recall)
    return RougeScore(precision, recall, f)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(reference: Sequence[str], candidate: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap between token sequences."""
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    ref_counts = _ngrams(reference, n)
    cand_counts = _ngrams(candidate, n)
    overlap = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
    return _prf(overlap, sum(ref_counts.values()), sum(cand_counts.values()))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length by dynamic programming."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]

def rouge_l(reference: Sequence[str], candidate: Sequence[str]) -> RougeScore:
    """Longest-common-subsequence overlap between token sequences."""
    return _prf(lcs_length(reference, candidate), len(reference), len(candidate))


def rouge_scores(reference_text: str, candidate_text: str) -> dict[str, RougeScore]:
    """ROUGE-1, ROUGE-2 and ROUGE-L of a text pair under the standard
    tokenization. All three components are emitted; pick your own headline."""
    ref = tokenize(reference_text)
    cand = tokenize(candidate_text)
    return {
        "rouge1": rouge_n(ref, cand, 1),
        "rouge2": rouge_n(ref, cand, 2),
        "rougeL": rouge_l(ref, cand),
    }
