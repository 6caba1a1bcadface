"""Trainable fact extractors behind a fit/predict estimator API.

Three estimators cover the extraction strategies: a multi-label relation
classifier and a binary related/unrelated classifier over marked sentences,
and an end-to-end sequence model that reads a whole document and emits a
serialized fact sequence. All are desk-scale transformers; hyperparameters
are constructor arguments so the classes compose with standard tooling
(get_params / set_params / clone).
"""

from __future__ import annotations

import torch
from sklearn.base import BaseEstimator

from ..corpus import AnnotatedDocument
from ..facts import (
    NO_RELATION_ID,
    EntityRef,
    FactSet,
    FactTuple,
    RelationId,
    normalize,
    parse_facts,
)
from ..supervision import (
    BINARY_POSITIVE,
    OverlappingSpansError,
    mark_sentence,
    reduce_document,
)
from .beam import DecodeConfig, decode_beam
from .checkpoint import load_checkpoint, save_checkpoint, state_dict_from_tensors
from .models import ModelConfig, RelationClassifierNet, Seq2SeqNet
from .train import TrainConfig, pad_batch, train_classifier, train_seq2seq
from .vocab import BOS_ID, Vocabulary

RELATED = RelationId("related")
UNRELATED = RelationId("unrelated")

_INFER_BATCH = 128


def _chunks(items, size):
    for i in range(0, len(items), size):
        yield items[i:i + size]


class _ClassifierCore(BaseEstimator):
    """Shared machinery of the two sentence classifiers."""

    kind = "classifier"

    def __init__(self, n_layers=2, d_model=64, n_heads=4, d_ffn=128, dropout=0.1,
                 max_input_len=128, min_count=2, steps=2000, batch_size=64,
                 peak_lr=3e-3, warmup_steps=200, threshold=0.5, seed=0):
        self.n_layers = n_layers
        self.d_model = d_model
        self.n_heads = n_heads
        self.d_ffn = d_ffn
        self.dropout = dropout
        self.max_input_len = max_input_len
        self.min_count = min_count
        self.steps = steps
        self.batch_size = batch_size
        self.peak_lr = peak_lr
        self.warmup_steps = warmup_steps
        self.threshold = threshold
        self.seed = seed

    def _model_config(self) -> ModelConfig:
        return ModelConfig(
            n_layers=self.n_layers, d_model=self.d_model, n_heads=self.n_heads,
            d_ffn=self.d_ffn, dropout=self.dropout, max_input_len=self.max_input_len,
            max_target_len=1,
        )

    def _train_config(self) -> TrainConfig:
        return TrainConfig(steps=self.steps, batch_size=self.batch_size,
                           peak_lr=self.peak_lr, warmup_steps=self.warmup_steps, seed=self.seed)

    def _encode(self, tokens) -> list[int]:
        ids = self.vocab_.encode(tokens)
        if len(ids) > self.max_input_len:
            self.n_truncated_ += 1
            ids = ids[: self.max_input_len]
        return ids

    def _n_outputs(self) -> int:
        raise NotImplementedError

    def _fit_common(self, X, rows: list[list[float]]):
        if len(X) == 0:
            raise ValueError("training requires a non-empty dataset")
        torch.manual_seed(self.seed)
        self.vocab_ = Vocabulary.build(X, min_count=self.min_count)
        self.n_truncated_ = 0
        inputs = [self._encode(tokens) for tokens in X]
        self.net_ = RelationClassifierNet(len(self.vocab_), self._n_outputs(), self._model_config())
        self.loss_trace_ = train_classifier(self.net_, inputs, rows, self._train_config())
        return self

    def _probabilities(self, X) -> torch.Tensor:
        self.net_.eval()
        out = []
        with torch.no_grad():
            for chunk in _chunks([self._encode(tokens) for tokens in X], _INFER_BATCH):
                out.append(self.net_.probabilities(pad_batch(chunk)))
        return torch.cat(out) if out else torch.empty(0, self._n_outputs())

    # --- shared document-level extraction ---

    def _sentence_pairs(self, doc: AnnotatedDocument, subject_only: bool = False):
        """All ordered co-occurring entity pairs: (marked sentence tokens,
        subject entity id, object entity id) per sentence containing both.
        ``subject_only`` restricts the first slot to the document subject,
        matching how distant-supervision training data is anchored."""
        first_surface = {m.canonical_id: m.surface
                         for m in sorted(doc.mentions, key=lambda m: m.span, reverse=True)}
        by_sentence: dict[int, dict[str, EntityRef]] = {}
        for m in sorted(doc.mentions, key=lambda m: m.span):
            idx = doc.sentence_index(m.span)
            by_sentence.setdefault(idx, {}).setdefault(m.canonical_id, m)
        jobs = []
        for idx in sorted(by_sentence):
            start, _ = doc.sentence_bounds[idx]
            sentence = doc.sentence_tokens(idx)
            here = by_sentence[idx]

            def rebased(m: EntityRef) -> EntityRef:
                return EntityRef(m.canonical_id, m.surface, m.entity_type,
                                 (m.span[0] - start, m.span[1] - start))

            for a_id, a_m in here.items():
                if subject_only and a_id != doc.subject.canonical_id:
                    continue
                for b_id, b_m in here.items():
                    if a_id == b_id:
                        continue
                    try:
                        marked = mark_sentence(sentence, rebased(a_m), rebased(b_m))
                    except OverlappingSpansError:
                        continue
                    jobs.append((marked, a_id, b_id))
        return jobs, first_surface


class RelationClassifierExtractor(_ClassifierCore):
    """Multi-label relation classifier over SUBJ{ } / OBJ{ } marked sentences.

    ``fit`` takes marked token sequences and per-example sets of relation
    ids. Prediction returns every relation whose probability clears the
    threshold, falling back to the no-relation id when none does.
    """

    kind = "classifier"

    def __init__(self, n_layers=2, d_model=64, n_heads=4, d_ffn=128, dropout=0.1,
                 max_input_len=128, min_count=2, steps=2000, batch_size=64,
                 peak_lr=3e-3, warmup_steps=200, threshold=0.5, seed=0, relations=None):
        super().__init__(n_layers=n_layers, d_model=d_model, n_heads=n_heads, d_ffn=d_ffn,
                         dropout=dropout, max_input_len=max_input_len, min_count=min_count,
                         steps=steps, batch_size=batch_size, peak_lr=peak_lr,
                         warmup_steps=warmup_steps, threshold=threshold, seed=seed)
        self.relations = relations

    def _n_outputs(self) -> int:
        return len(self.relations_)

    def fit(self, X, y):
        """X: marked token sequences; y: matching collections of relation ids."""
        labels = [frozenset(labels) for labels in y]
        if self.relations is not None:
            inventory = list(self.relations)
        else:
            inventory = sorted({rid for row in labels for rid in row} - {NO_RELATION_ID})
        if NO_RELATION_ID in inventory:
            inventory.remove(NO_RELATION_ID)
        self.relations_ = [NO_RELATION_ID] + inventory
        index = {rid: i for i, rid in enumerate(self.relations_)}
        rows = []
        for row in labels:
            multi_hot = [0.0] * len(self.relations_)
            for rid in row:
                if rid in index:
                    multi_hot[index[rid]] = 1.0
            rows.append(multi_hot)
        return self._fit_common(X, rows)

    def predict_proba(self, X):
        return self._probabilities(X).numpy()

    def predict(self, X) -> list[frozenset[str]]:
        probs = self._probabilities(X)
        out = []
        for row in probs:
            chosen = {self.relations_[i] for i in range(1, len(self.relations_))
                      if float(row[i]) > self.threshold}
            out.append(frozenset(chosen) if chosen else frozenset({NO_RELATION_ID}))
        return out

    def extract_facts(self, doc: AnnotatedDocument, subject_only: bool = False) -> FactSet:
        """Classify every ordered co-occurring entity pair of the document
        and emit one tuple per predicted relation, aggregated across
        sentences by taking each pair's maximum probability."""
        jobs, first_surface = self._sentence_pairs(doc, subject_only)
        facts = FactSet()
        if not jobs:
            return facts
        probs = self._probabilities([marked for marked, _, _ in jobs])
        best: dict[tuple[str, str], torch.Tensor] = {}
        for (marked, a_id, b_id), row in zip(jobs, probs):
            key = (a_id, b_id)
            best[key] = row if key not in best else torch.maximum(best[key], row)
        for (a_id, b_id), row in best.items():
            for i in range(1, len(self.relations_)):
                if float(row[i]) > self.threshold:
                    facts.add(FactTuple(normalize(first_surface[a_id]),
                                        RelationId(self.relations_[i]),
                                        normalize(first_surface[b_id])))
        return facts

    def save(self, path) -> None:
        save_checkpoint(
            path, kind=self.kind, config=self._model_config().to_json(),
            vocab=self.vocab_.to_list(), state_dict=self.net_.state_dict(),
            meta={"relations": self.relations_, "threshold": self.threshold,
                  "train": self._train_config().to_json()},
        )

    @classmethod
    def load(cls, path) -> "RelationClassifierExtractor":
        payload = load_checkpoint(path)
        if payload["kind"] != cls.kind:
            raise ValueError(f"checkpoint holds a {payload['kind']!r} model, expected {cls.kind!r}")
        config = ModelConfig.from_json(payload["config"])
        est = cls(n_layers=config.n_layers, d_model=config.d_model, n_heads=config.n_heads,
                  d_ffn=config.d_ffn, dropout=config.dropout, max_input_len=config.max_input_len,
                  threshold=payload["meta"].get("threshold", 0.5))
        est.relations_ = list(payload["meta"]["relations"])
        est.vocab_ = Vocabulary.from_list(payload["vocab"])
        est.net_ = RelationClassifierNet(len(est.vocab_), len(est.relations_), config)
        est.net_.load_state_dict(state_dict_from_tensors(payload["tensors"]))
        est.net_.eval()
        est.n_truncated_ = 0
        return est


class BinaryRelationExtractor(_ClassifierCore):
    """Single-logit classifier: are the marked entities related at all?

    Document extraction emits one tuple per ordered pair with the predicted
    related/unrelated label in the relation slot, so two extractions can be
    compared on shared entity pairs.
    """

    kind = "binary"

    def _n_outputs(self) -> int:
        return 1

    def fit(self, X, y):
        """X: marked token sequences; y: 0/1 (or "0"/"1") labels."""
        rows = [[1.0 if str(label) == BINARY_POSITIVE else 0.0] for label in y]
        return self._fit_common(X, rows)

    def predict_proba(self, X):
        return self._probabilities(X).numpy()[:, 0]

    def predict(self, X) -> list[int]:
        return [1 if p > self.threshold else 0 for p in self.predict_proba(X)]

    def extract_facts(self, doc: AnnotatedDocument, subject_only: bool = False) -> FactSet:
        jobs, first_surface = self._sentence_pairs(doc, subject_only)
        facts = FactSet()
        if not jobs:
            return facts
        probs = self._probabilities([marked for marked, _, _ in jobs])[:, 0]
        best: dict[tuple[str, str], float] = {}
        for (marked, a_id, b_id), p in zip(jobs, probs):
            key = (a_id, b_id)
            best[key] = max(best.get(key, 0.0), float(p))
        for (a_id, b_id), p in best.items():
            rel = RELATED if p > self.threshold else UNRELATED
            facts.add(FactTuple(normalize(first_surface[a_id]), rel, normalize(first_surface[b_id])))
        return facts

    def save(self, path) -> None:
        save_checkpoint(
            path, kind=self.kind, config=self._model_config().to_json(),
            vocab=self.vocab_.to_list(), state_dict=self.net_.state_dict(),
            meta={"threshold": self.threshold, "train": self._train_config().to_json()},
        )

    @classmethod
    def load(cls, path) -> "BinaryRelationExtractor":
        payload = load_checkpoint(path)
        if payload["kind"] != cls.kind:
            raise ValueError(f"checkpoint holds a {payload['kind']!r} model, expected {cls.kind!r}")
        config = ModelConfig.from_json(payload["config"])
        est = cls(n_layers=config.n_layers, d_model=config.d_model, n_heads=config.n_heads,
                  d_ffn=config.d_ffn, dropout=config.dropout, max_input_len=config.max_input_len,
                  threshold=payload["meta"].get("threshold", 0.5))
        est.vocab_ = Vocabulary.from_list(payload["vocab"])
        est.net_ = RelationClassifierNet(len(est.vocab_), 1, config)
        est.net_.load_state_dict(state_dict_from_tensors(payload["tensors"]))
        est.net_.eval()
        est.n_truncated_ = 0
        return est


class Seq2SeqFactExtractor(BaseEstimator):
    """End-to-end extractor: subject-prefixed document in, serialized fact
    sequence out, decoded with a length-penalized beam search and parsed
    leniently back into tuples."""

    kind = "seq2seq"

    def __init__(self, n_layers=2, d_model=64, n_heads=4, d_ffn=128, dropout=0.1,
                 max_input_len=256, max_target_len=64, min_count=2, steps=4000,
                 batch_size=32, peak_lr=3e-3, warmup_steps=400, beam_size=4,
                 length_penalty=0.6, seed=0, reduced=False):
        self.n_layers = n_layers
        self.d_model = d_model
        self.n_heads = n_heads
        self.d_ffn = d_ffn
        self.dropout = dropout
        self.max_input_len = max_input_len
        self.max_target_len = max_target_len
        self.min_count = min_count
        self.steps = steps
        self.batch_size = batch_size
        self.peak_lr = peak_lr
        self.warmup_steps = warmup_steps
        self.beam_size = beam_size
        self.length_penalty = length_penalty
        self.seed = seed
        self.reduced = reduced

    def _model_config(self) -> ModelConfig:
        return ModelConfig(
            n_layers=self.n_layers, d_model=self.d_model, n_heads=self.n_heads,
            d_ffn=self.d_ffn, dropout=self.dropout, max_input_len=self.max_input_len,
            max_target_len=self.max_target_len,
        )

    def _train_config(self) -> TrainConfig:
        return TrainConfig(steps=self.steps, batch_size=self.batch_size,
                           peak_lr=self.peak_lr, warmup_steps=self.warmup_steps, seed=self.seed)

    def _decode_config(self) -> DecodeConfig:
        return DecodeConfig(beam_size=self.beam_size, length_penalty=self.length_penalty,
                            max_len=self.max_target_len)

    def _encode_source(self, tokens) -> list[int]:
        ids = self.vocab_.encode(tokens)
        if len(ids) > self.max_input_len:
            self.n_truncated_ += 1
            ids = ids[: self.max_input_len]
        return ids

    def _prepare_target(self, tokens) -> list[int]:
        toks = list(tokens)
        end = self.vocab_.token(self.vocab_.end_id)
        if not toks or toks[-1] != end:
            toks.append(end)
        if len(toks) > self.max_target_len:
            self.n_truncated_ += 1
            toks = toks[: self.max_target_len - 1] + [end]
        return self.vocab_.encode(toks)

    def fit(self, X, y):
        """X: input token sequences (subject surface + document tokens);
        y: target token sequences, the serialized facts."""
        if len(X) == 0:
            raise ValueError("training requires a non-empty dataset")
        if len(X) != len(y):
            raise ValueError("inputs and targets differ in length")
        torch.manual_seed(self.seed)
        self.vocab_ = Vocabulary.build(list(X) + list(y), min_count=self.min_count)
        self.n_truncated_ = 0
        self.n_malformed_ = 0
        sources = [self._encode_source(tokens) for tokens in X]
        targets = [self._prepare_target(tokens) for tokens in y]
        self.net_ = Seq2SeqNet(len(self.vocab_), self._model_config())
        self.loss_trace_ = train_seq2seq(self.net_, sources, targets, self._train_config())
        return self

    def _decode_ids(self, source_ids: list[int]) -> list[int]:
        self.net_.eval()
        with torch.no_grad():
            src = torch.tensor([source_ids], dtype=torch.long)
            memory = self.net_.encode(src)

            def log_prob_fn(prefixes):
                n = len(prefixes)
                tgt_in = torch.tensor([[BOS_ID] + list(p) for p in prefixes], dtype=torch.long)
                logits = self.net_.decode(memory.expand(n, -1, -1), src.expand(n, -1), tgt_in)
                return torch.log_softmax(logits[:, -1, :], dim=-1).numpy()

            return decode_beam(log_prob_fn, self.vocab_.end_id, self._decode_config())

    def predict(self, X) -> list[list[str]]:
        """Decode each input to its output token sequence."""
        return [self.vocab_.decode(self._decode_ids(self._encode_source(tokens))) for tokens in X]

    def extract(self, subject: str, tokens) -> FactSet:
        """Extract facts about ``subject`` from raw document tokens."""
        input_tokens = normalize(subject).split(" ") + list(tokens)
        decoded = self.vocab_.decode(self._decode_ids(self._encode_source(input_tokens)))
        facts, malformed = parse_facts(decoded)
        self.n_malformed_ += len(malformed)
        return facts

    def extract_facts(self, doc: AnnotatedDocument, reduced: bool | None = None) -> FactSet:
        """Extract from an annotated document; with ``reduced``, sentences
        without entity mentions are dropped first."""
        use_reduced = self.reduced if reduced is None else reduced
        if use_reduced:
            doc = reduce_document(doc)
        return self.extract(doc.subject.surface, doc.tokens)

    def save(self, path) -> None:
        save_checkpoint(
            path, kind=self.kind, config=self._model_config().to_json(),
            vocab=self.vocab_.to_list(), state_dict=self.net_.state_dict(),
            meta={"beam_size": self.beam_size, "length_penalty": self.length_penalty,
                  "reduced": self.reduced, "train": self._train_config().to_json()},
        )

    @classmethod
    def load(cls, path) -> "Seq2SeqFactExtractor":
        payload = load_checkpoint(path)
        if payload["kind"] != cls.kind:
            raise ValueError(f"checkpoint holds a {payload['kind']!r} model, expected {cls.kind!r}")
        config = ModelConfig.from_json(payload["config"])
        meta = payload["meta"]
        est = cls(n_layers=config.n_layers, d_model=config.d_model, n_heads=config.n_heads,
                  d_ffn=config.d_ffn, dropout=config.dropout,
                  max_input_len=config.max_input_len, max_target_len=config.max_target_len,
                  beam_size=meta.get("beam_size", 4), length_penalty=meta.get("length_penalty", 0.6),
                  reduced=meta.get("reduced", False))
        est.vocab_ = Vocabulary.from_list(payload["vocab"])
        est.net_ = Seq2SeqNet(len(est.vocab_), config)
        est.net_.load_state_dict(state_dict_from_tensors(payload["tensors"]))
        est.net_.eval()
        est.n_truncated_ = 0
        est.n_malformed_ = 0
        return est
