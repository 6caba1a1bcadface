import json

import pytest

from factacc.corpus import write_documents
from factacc.corruption import corrupt_document, expected_accuracy
from factacc.facts import FactTuple, RelationId, write_fact_jsonl
from factacc.metrics import MatchKey
from factacc.scoring import (
    ExtractorSpecError,
    OracleExtractor,
    build_extractor,
    score_pair_files,
    score_strings,
)
from factacc.supervision import oracle_facts
from factacc.synth import make_corpus


def t(subject, relation, obj):
    return FactTuple(subject, RelationId(relation), obj)


@pytest.fixture
def tuple_files(tmp_path):
    truth = tmp_path / "truth_facts.jsonl"
    gen = tmp_path / "gen_facts.jsonl"
    write_fact_jsonl([t("Brad Pitt", "born-in", "1963")], truth)
    write_fact_jsonl([t("Brad Pitt", "born-in", "1961")], gen)
    return truth, gen


@pytest.fixture
def text_files(tmp_path):
    truth = tmp_path / "truth.txt"
    gen = tmp_path / "gen.txt"
    truth.write_text("Brad Pitt was born in 1963\n")
    gen.write_text("Brad Pitt was born in 1961\n")
    return truth, gen


class TestExtractorSpecs:
    def test_tuples_spec(self, tuple_files):
        truth, gen = tuple_files
        extractor = build_extractor(f"tuples:{truth},{gen}")
        t_facts, g_facts = extractor.extract_pair(None, None)
        assert len(t_facts) == 1 and len(g_facts) == 1
        assert extractor.key is MatchKey.SUBJECT_RELATION

    def test_unknown_kind_rejected(self):
        with pytest.raises(ExtractorSpecError):
            build_extractor("nope:whatever")

    def test_missing_argument_rejected(self):
        with pytest.raises(ExtractorSpecError):
            build_extractor("oracle")
        with pytest.raises(ExtractorSpecError):
            build_extractor("tuples:only_one.jsonl")


class TestScoreStrings:
    def test_birth_year_pair(self, tuple_files):
        truth, gen = tuple_files
        report = score_strings(
            "Brad Pitt was born in 1963", "Brad Pitt was born in 1961",
            f"tuples:{truth},{gen}",
        )
        assert report["fact_acc"] == 0.0
        assert report["no_verifiable_claims"] is False
        assert report["rouge"]["rouge1"]["recall"] == pytest.approx(0.8333, abs=5e-4)
        assert report["counts"]["n_gen_filtered"] == 1

    def test_identical_everything(self, tmp_path):
        facts_path = tmp_path / "facts.jsonl"
        write_fact_jsonl([t("A", "r", "B")], facts_path)
        report = score_strings("same text", "same text", f"tuples:{facts_path},{facts_path}")
        assert report["fact_acc"] == 1.0
        for variant in ("rouge1", "rouge2", "rougeL"):
            assert report["rouge"][variant]["f_measure"] == 1.0

    def test_rouge_only_via_empty_tuple_files(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        report = score_strings("a b c", "a b d", f"tuples:{empty},{empty}")
        assert report["fact_acc"] is None
        assert report["no_verifiable_claims"] is True
        assert report["rouge"]["rouge1"]["recall"] == pytest.approx(2 / 3)


class TestScorePairFiles:
    def test_text_pair_with_tuples(self, text_files, tuple_files):
        truth_txt, gen_txt = text_files
        truth_facts, gen_facts = tuple_files
        report = score_pair_files(truth_txt, gen_txt,
                                  build_extractor(f"tuples:{truth_facts},{gen_facts}"))
        assert report["fact_acc"] == 0.0
        assert report["rouge"]["rouge1"]["recall"] == pytest.approx(5 / 6)
        assert [x["object"] for x in report["refuted"]] == ["1961"]

    def test_documents_with_oracle(self, tmp_path):
        docs, kb, _ = make_corpus(6, seed=3, subject_style="pronoun")
        kb_path = tmp_path / "kb.tsv"
        kb.save(kb_path)
        corrupted = [corrupt_document(d, rng_seed=i, kb=kb)[0] for i, d in enumerate(docs)]
        truth_path = tmp_path / "truth.jsonl"
        gen_path = tmp_path / "gen.jsonl"
        write_documents(docs, truth_path)
        write_documents(corrupted, gen_path)
        report = score_pair_files(truth_path, gen_path, build_extractor(f"oracle:{kb_path}"))
        assert report["aggregate"]["n_documents"] == 6
        assert 0.0 <= report["aggregate"]["fact_acc_mean"] <= 1.0
        assert report["aggregate"]["rouge1"]["f_measure"] > 0.9
        assert len(report["documents"]) == 6

    def test_oracle_equals_expected_accuracy_per_document(self, tmp_path):
        docs, kb, _ = make_corpus(10, seed=4, subject_style="pronoun")
        kb_path = tmp_path / "kb.tsv"
        kb.save(kb_path)
        extractor = build_extractor(f"oracle:{kb_path}")
        for i, doc in enumerate(docs):
            corrupted, log = corrupt_document(doc, rng_seed=i, kb=kb)
            t_facts, g_facts = extractor.extract_pair(doc, corrupted)
            from factacc.metrics import fact_acc

            measured = fact_acc(t_facts, g_facts).numeric
            assert measured == expected_accuracy(log)[0]

    def test_mismatched_ids_rejected(self, tmp_path):
        docs, kb, _ = make_corpus(4, seed=5)
        kb_path = tmp_path / "kb.tsv"
        kb.save(kb_path)
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_documents(docs[:2], a)
        write_documents(docs[2:], b)
        with pytest.raises(ValueError):
            score_pair_files(a, b, build_extractor(f"oracle:{kb_path}"))

    def test_mixed_input_kinds_rejected(self, text_files, tmp_path):
        truth_txt, _ = text_files
        docs, kb, _ = make_corpus(1, seed=6)
        kb_path = tmp_path / "kb.tsv"
        kb.save(kb_path)
        docs_path = tmp_path / "docs.jsonl"
        write_documents(docs, docs_path)
        with pytest.raises(ValueError):
            score_pair_files(truth_txt, docs_path, build_extractor(f"oracle:{kb_path}"))

    def test_documents_need_document_extractor(self, text_files, tmp_path):
        truth_txt, gen_txt = text_files
        kb_path = tmp_path / "kb.tsv"
        kb_path.write_text("")
        with pytest.raises(ValueError):
            score_pair_files(truth_txt, gen_txt, build_extractor(f"oracle:{kb_path}"))


class TestOracleExtractor:
    def test_reads_kb_facts(self, person_city_doc, person_city_kb):
        extractor = OracleExtractor(person_city_kb)
        t_facts, g_facts = extractor.extract_pair(person_city_doc, person_city_doc)
        assert t_facts == oracle_facts(person_city_doc, person_city_kb)
        assert t_facts == g_facts


class TestReportSchema:
    def test_report_json_contract(self, tuple_files):
        truth, gen = tuple_files
        report = score_strings("x", "y", f"tuples:{truth},{gen}")
        assert set(report) == {"fact_acc", "no_verifiable_claims", "counts",
                               "matched", "refuted", "unverifiable", "rouge"}
        assert set(report["counts"]) == {"n_truth", "n_gen", "n_truth_filtered",
                                         "n_gen_filtered", "n_matched"}
        json.dumps(report)  # must be serializable as-is
