"""Estimator-style wrappers, so pipeline steps compose with scikit-learn
tooling (get_params / set_params / clone). The trainable extractors live in
``factacc.neural.extractors``; this module holds the model-free pieces.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import AnnotatedDocument, KnowledgeBase
from .corruption import CorruptionLog, corrupt_document
from .facts import EntityType


class EntitySwapCorruptor(BaseEstimator, TransformerMixin):
    """Estimator-style wrapper around :func:`factacc.corruption.corrupt_document`.

    ``transform`` maps a list of documents to their corrupted versions and
    stores the per-document logs on ``logs_``.
    """

    def __init__(self, types: tuple[str, ...] = ("DATE", "LOCATION", "PERSON"),
                 seed: int = 0, kb: KnowledgeBase | None = None):
        self.types = types
        self.seed = seed
        self.kb = kb

    def fit(self, X, y=None):
        return self

    def transform(self, X: list[AnnotatedDocument]) -> list[AnnotatedDocument]:
        selected = {EntityType(t) for t in self.types}
        out = []
        self.logs_: list[CorruptionLog] = []
        for i, doc in enumerate(X):
            corrupted, log = corrupt_document(doc, selected, rng_seed=self.seed + i, kb=self.kb)
            out.append(corrupted)
            self.logs_.append(log)
        return out
