"""End-to-end scoring of (reference, generated) pairs: pick a fact extractor,
extract both sides, compute factual accuracy and ROUGE, emit one report.

Extractors are named by spec strings:

    e2e:model.ckpt          trained sequence-to-sequence extractor
    classifier:model.ckpt   trained relation classifier
    binary:model.ckpt       trained related/unrelated classifier
    oracle:kb.tsv           perfect extractor reading the knowledge base
    tuples:t.jsonl,g.jsonl  pre-extracted tuples (e.g. from an external
                            open-schema tool), one file per side

The oracle and model extractors need annotated documents; the tuples mode
works on raw text. Binary extraction is compared on shared entity pairs;
everything else on shared (subject, relation) keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .corpus import AnnotatedDocument, KnowledgeBase, read_documents
from .facts import FactSet, read_fact_jsonl
from .metrics import FactAccResult, MatchKey, RougeScore, fact_acc, rouge_scores
from .supervision import oracle_facts


class ExtractorSpecError(ValueError):
    pass


@dataclass
class ScoreReport:
    """One scored pair: factual accuracy with its audit lists, plus ROUGE."""

    result: FactAccResult
    rouge: dict[str, RougeScore]
    doc_id: str | None = None

    def to_json(self) -> dict:
        data = self.result.to_json()
        data["rouge"] = {name: score.to_json() for name, score in self.rouge.items()}
        if self.doc_id is not None:
            data = {"doc_id": self.doc_id, **data}
        return data


class TuplesExtractor:
    """Serves pre-extracted fact files; ignores the documents entirely."""

    key = MatchKey.SUBJECT_RELATION
    needs_documents = False

    def __init__(self, truth_path, generated_path):
        self.truth_facts = read_fact_jsonl(truth_path)
        self.generated_facts = read_fact_jsonl(generated_path)

    def extract_pair(self, truth, generated) -> tuple[FactSet, FactSet]:
        return self.truth_facts, self.generated_facts


class OracleExtractor:
    """Reads each document's facts straight out of the knowledge base via the
    distant-supervision labeler. The reference point for experiments where
    the true fact set must be known exactly."""

    key = MatchKey.SUBJECT_RELATION
    needs_documents = True

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb

    def extract_pair(self, truth: AnnotatedDocument, generated: AnnotatedDocument):
        return oracle_facts(truth, self.kb), oracle_facts(generated, self.kb)


class ModelExtractor:
    needs_documents = True

    def __init__(self, estimator, key: MatchKey, reduced: bool | None = None):
        self.estimator = estimator
        self.key = key
        self.reduced = reduced

    def extract_pair(self, truth: AnnotatedDocument, generated: AnnotatedDocument):
        kwargs = {}
        from .neural.extractors import Seq2SeqFactExtractor

        if isinstance(self.estimator, Seq2SeqFactExtractor):
            kwargs["reduced"] = self.reduced
        return (
            self.estimator.extract_facts(truth, **kwargs),
            self.estimator.extract_facts(generated, **kwargs),
        )


def build_extractor(spec: str, reduced: bool | None = None):
    """Instantiate an extractor from its spec string."""
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise ExtractorSpecError(f"extractor spec {spec!r} must look like kind:argument")
    if kind == "tuples":
        paths = arg.split(",")
        if len(paths) != 2:
            raise ExtractorSpecError("tuples extractor needs two comma-separated fact files")
        return TuplesExtractor(paths[0], paths[1])
    if kind == "oracle":
        return OracleExtractor(KnowledgeBase.load(arg))
    if kind == "e2e":
        from .neural.extractors import Seq2SeqFactExtractor

        return ModelExtractor(Seq2SeqFactExtractor.load(arg), MatchKey.SUBJECT_RELATION, reduced)
    if kind == "classifier":
        from .neural.extractors import RelationClassifierExtractor

        return ModelExtractor(RelationClassifierExtractor.load(arg), MatchKey.SUBJECT_RELATION)
    if kind == "binary":
        from .neural.extractors import BinaryRelationExtractor

        return ModelExtractor(BinaryRelationExtractor.load(arg), MatchKey.ENTITY_PAIR)
    raise ExtractorSpecError(f"unknown extractor kind {kind!r}")


def score_texts(truth_text: str, generated_text: str, truth_facts: FactSet,
                generated_facts: FactSet, key: MatchKey, case_fold: bool = False) -> ScoreReport:
    return ScoreReport(
        result=fact_acc(truth_facts, generated_facts, key, case_fold),
        rouge=rouge_scores(truth_text, generated_text),
    )


def _load_side(path) -> tuple[list[AnnotatedDocument] | None, str | None]:
    """A side is either a document JSONL or a raw text file."""
    path = Path(path)
    if path.suffix == ".jsonl":
        return read_documents(path), None
    return None, path.read_text(encoding="utf-8")


def score_pair_files(truth_path, generated_path, extractor, case_fold: bool = False) -> dict:
    """Score two input files with an extractor, returning report JSON.

    Raw text pairs give a single report; document JSONL pairs give one report
    per doc_id (the two files must cover the same ids) plus an aggregate with
    mean numeric factual accuracy and mean ROUGE components.
    """
    truth_docs, truth_text = _load_side(truth_path)
    gen_docs, gen_text = _load_side(generated_path)

    if (truth_docs is None) != (gen_docs is None):
        raise ValueError("truth and generated inputs must both be document JSONL or both raw text")

    if truth_docs is None:
        if extractor.needs_documents:
            raise ValueError("this extractor needs annotated document JSONL inputs")
        t_facts, g_facts = extractor.extract_pair(None, None)
        return score_texts(truth_text, gen_text, t_facts, g_facts, extractor.key, case_fold).to_json()

    truth_by_id = {d.doc_id: d for d in truth_docs}
    gen_by_id = {d.doc_id: d for d in gen_docs}
    if set(truth_by_id) != set(gen_by_id):
        missing = set(truth_by_id) ^ set(gen_by_id)
        raise ValueError(f"document ids differ between sides: {sorted(missing)[:5]}")

    reports: list[ScoreReport] = []
    for doc_id in truth_by_id:
        t_doc, g_doc = truth_by_id[doc_id], gen_by_id[doc_id]
        t_facts, g_facts = extractor.extract_pair(t_doc, g_doc)
        report = score_texts(t_doc.text(), g_doc.text(), t_facts, g_facts, extractor.key, case_fold)
        report.doc_id = doc_id
        reports.append(report)

    if len(reports) == 1:
        return reports[0].to_json()
    return {
        "documents": [r.to_json() for r in reports],
        "aggregate": aggregate_reports(reports),
    }


def aggregate_reports(reports: list[ScoreReport]) -> dict:
    n = len(reports)
    agg: dict = {"n_documents": n}
    agg["fact_acc_mean"] = sum(r.result.numeric for r in reports) / n
    agg["n_no_verifiable_claims"] = sum(1 for r in reports if r.result.no_verifiable_claims)
    for variant in ("rouge1", "rouge2", "rougeL"):
        agg[variant] = {
            "precision": sum(r.rouge[variant].precision for r in reports) / n,
            "recall": sum(r.rouge[variant].recall for r in reports) / n,
            "f_measure": sum(r.rouge[variant].f_measure for r in reports) / n,
        }
    return agg


def score_strings(truth: str, generated: str, extractor_spec: str,
                  case_fold: bool = False) -> dict:
    """Score two in-memory strings with a text-level extractor (tuples mode).
    Convenience entry point for scripting bindings."""
    extractor = build_extractor(extractor_spec)
    if extractor.needs_documents:
        raise ValueError("string scoring supports text-level extractors only (tuples:...)")
    t_facts, g_facts = extractor.extract_pair(None, None)
    return score_texts(truth, generated, t_facts, g_facts, extractor.key, case_fold).to_json()
