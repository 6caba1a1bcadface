"""Exact-match extraction scoring and rater-agreement statistics.

Extractors are scored by exact tuple match (precision / recall / F1, overall
and per relation). Metric quality is judged against human ratings with
Spearman rank correlation, and the ratings themselves are checked for
inter-rater consistency with ordinal Krippendorff's alpha.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .facts import FactSet, RelationId


@dataclass(frozen=True)
class PrfScore:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "PrfScore") -> "PrfScore":
        return PrfScore(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


def tuple_prf(predicted: FactSet, gold: FactSet) -> PrfScore:
    """Exact-tuple precision/recall/F1: a prediction counts only if all three
    normalized fields match a gold tuple."""
    tp = sum(1 for t in predicted if t in gold)
    return PrfScore(tp=tp, fp=len(predicted) - tp, fn=len(gold) - tp)


def per_relation_prf(predicted: FactSet, gold: FactSet) -> dict[RelationId, PrfScore]:
    """tuple_prf restricted to each relation, ordered by gold frequency
    (descending, ties by relation id) for top-k reporting."""
    relations: dict[RelationId, None] = {}
    gold_freq: dict[RelationId, int] = {}
    for t in gold:
        gold_freq[t.relation] = gold_freq.get(t.relation, 0) + 1
        relations.setdefault(t.relation)
    for t in predicted:
        relations.setdefault(t.relation)
    out = {}
    for rel in sorted(relations, key=lambda r: (-gold_freq.get(r, 0), r.id)):
        pred_r = FactSet(t for t in predicted if t.relation == rel)
        gold_r = FactSet(t for t in gold if t.relation == rel)
        out[rel] = tuple_prf(pred_r, gold_r)
    return out


def micro_prf(scores: Iterable[PrfScore]) -> PrfScore:
    total = PrfScore(0, 0, 0)
    for s in scores:
        total = total + s
    return total


def macro_prf(scores: Sequence[PrfScore]) -> dict[str, float]:
    if not scores:
        return {"precision": 0.0, "recall": 0.0, "f1": 0.0}
    n = len(scores)
    return {
        "precision": sum(s.precision for s in scores) / n,
        "recall": sum(s.recall for s in scores) / n,
        "f1": sum(s.f1 for s in scores) / n,
    }


# --- rank correlation ---


def _average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1  # average of 1-based positions i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Spearman rank correlation with average ranks for ties: the Pearson
    correlation of the two rank vectors. None when either input is constant
    (the correlation is undefined)."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return None
    return cov / math.sqrt(vx * vy)


# --- Krippendorff's alpha (ordinal) ---

MISSING = None
DEFAULT_CATEGORIES = (1, 2, 3, 4, 5)


@dataclass
class RatingsMatrix:
    """Ordinal ratings: one row per rater, one column per item; None marks a
    missing rating. Categories default to the 1..5 scale."""

    raters: tuple[str, ...]
    items: tuple[str, ...]
    scores: dict[tuple[str, str], int]
    categories: tuple[int, ...] = DEFAULT_CATEGORIES

    def item_ratings(self, item: str) -> list[int]:
        return [
            self.scores[(rater, item)]
            for rater in self.raters
            if (rater, item) in self.scores
        ]

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, str, int]],
                  categories: tuple[int, ...] = DEFAULT_CATEGORIES) -> "RatingsMatrix":
        raters: dict[str, None] = {}
        items: dict[str, None] = {}
        scores: dict[tuple[str, str], int] = {}
        for item, rater, score in rows:
            raters.setdefault(rater)
            items.setdefault(item)
            scores[(rater, item)] = int(score)
        return cls(tuple(raters), tuple(items), scores, categories)

    @classmethod
    def from_csv(cls, path, categories: tuple[int, ...] = DEFAULT_CATEGORIES) -> "RatingsMatrix":
        """Read the `item_id,rater_id,score` format; missing cells are simply
        absent rows."""
        rows = []
        with open(path, newline="", encoding="utf-8") as f:
            for record in csv.DictReader(f):
                rows.append((record["item_id"], record["rater_id"], int(record["score"])))
        return cls.from_rows(rows, categories)

    def rater_means(self) -> dict[str, float]:
        sums: dict[str, list[float]] = {}
        for (rater, _item), score in self.scores.items():
            sums.setdefault(rater, []).append(score)
        return {r: sum(v) / len(v) for r, v in sums.items()}

    def item_means(self) -> dict[str, float]:
        """Average score per item across raters, for correlating against
        automatic metrics."""
        sums: dict[str, list[float]] = {}
        for (_rater, item), score in self.scores.items():
            sums.setdefault(item, []).append(score)
        return {i: sum(v) / len(v) for i, v in sums.items()}


def krippendorff_alpha_ordinal(ratings: RatingsMatrix) -> float | None:
    """Chance-corrected agreement for ordinal categories.

    Built on the coincidence matrix: each item with m >= 2 ratings
    contributes its ordered rating pairs with weight 1/(m-1). The ordinal
    distance between categories c <= k is the squared sum of the coincidence
    marginals strictly between them plus half of each endpoint's marginal.
    Returns None when expected disagreement is zero (no variation to correct
    against).
    """
    cats = list(ratings.categories)
    cat_pos = {c: i for i, c in enumerate(cats)}
    k = len(cats)
    coincidence = [[0.0] * k for _ in range(k)]

    for item in ratings.items:
        vals = ratings.item_ratings(item)
        m = len(vals)
        if m < 2:
            continue
        w = 1.0 / (m - 1)
        for i, a in enumerate(vals):
            for j, b in enumerate(vals):
                if i != j:
                    coincidence[cat_pos[a]][cat_pos[b]] += w

    marginals = [sum(row) for row in coincidence]
    n = sum(marginals)
    if n == 0:
        return None

    def ordinal_delta_sq(ci: int, cj: int) -> float:
        lo, hi = min(ci, cj), max(ci, cj)
        span = sum(marginals[g] for g in range(lo, hi + 1))
        return (span - (marginals[lo] + marginals[hi]) / 2.0) ** 2

    d_observed = 0.0
    d_expected = 0.0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            delta = ordinal_delta_sq(i, j)
            d_observed += coincidence[i][j] * delta
            d_expected += marginals[i] * marginals[j] * delta
    d_observed /= n
    d_expected /= n * (n - 1)
    if d_expected == 0:
        return None
    return 1.0 - d_observed / d_expected


def read_score_pairs_csv(path) -> tuple[list[float], list[float]]:
    """Read the `item_id,human_score,metric_score` correlation input."""
    human, metric = [], []
    with open(path, newline="", encoding="utf-8") as f:
        for record in csv.DictReader(f):
            human.append(float(record["human_score"]))
            metric.append(float(record["metric_score"]))
    return human, metric
