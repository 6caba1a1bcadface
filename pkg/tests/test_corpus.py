import pytest

from factacc.corpus import (
    AnnotatedDocument,
    CorpusError,
    KnowledgeBase,
    annotate_heuristic,
    read_documents,
    write_documents,
)
from factacc.facts import EntityRef, EntityType, RelationId, Schema


def ent(cid, surface, etype=EntityType.OTHER, span=None):
    return EntityRef(cid, surface, etype, span)


class TestDocumentValidation:
    def test_bounds_must_partition(self):
        with pytest.raises(CorpusError):
            AnnotatedDocument("d", ent("s", "S"), ("a", "b", "c"),
                              ((0, 2),), ())  # tokens uncovered

    def test_bounds_must_be_contiguous(self):
        with pytest.raises(CorpusError):
            AnnotatedDocument("d", ent("s", "S"), ("a", "b", "c"),
                              ((0, 1), (2, 3)), ())

    def test_mention_must_sit_in_one_sentence(self):
        with pytest.raises(CorpusError):
            AnnotatedDocument("d", ent("s", "S"), ("a", "b", "c", "d"),
                              ((0, 2), (2, 4)),
                              (ent("x", "b c", span=(1, 3)),))

    def test_mention_needs_span(self):
        with pytest.raises(CorpusError):
            AnnotatedDocument("d", ent("s", "S"), ("a",), ((0, 1),),
                              (ent("x", "a"),))

    def test_sentence_lookup(self, person_city_doc):
        assert person_city_doc.sentence_index((4, 5)) == 0
        assert person_city_doc.sentence_index((9, 10)) == 1
        assert person_city_doc.sentence_index((5, 7)) is None
        assert person_city_doc.sentence_tokens(0) == tuple("Person1 was born in City1 .".split())

    def test_jsonl_round_trip(self, barack_doc, tmp_path):
        path = tmp_path / "docs.jsonl"
        write_documents([barack_doc], path)
        loaded = read_documents(path)
        assert loaded == [barack_doc]

    def test_malformed_line_reports_location(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        path.write_text('{"doc_id": "only-an-id"}\n')
        with pytest.raises(CorpusError, match="docs.jsonl:1"):
            read_documents(path)


class TestKnowledgeBase:
    def test_pair_index_is_projection(self, tiny_schema):
        kb = KnowledgeBase()
        born = tiny_schema.get("born-in")
        job = tiny_schema.get("profession")
        kb.add("a", born, "b")
        kb.add("a", job, "b")
        kb.add("a", born, "c")
        assert kb.relations_for("a", "b") == frozenset({born, job})
        assert kb.relations_for("a", "c") == frozenset({born})
        assert kb.relations_for("zz", "yy") == frozenset()
        assert len(kb) == 3

    def test_r0_triples_rejected(self):
        kb = KnowledgeBase()
        with pytest.raises(CorpusError):
            kb.add("a", RelationId("R0"), "b")

    def test_tsv_round_trip(self, tmp_path, tiny_schema):
        kb = KnowledgeBase()
        kb.add("per:x", tiny_schema.get("born-in"), "loc:y")
        path = tmp_path / "kb.tsv"
        kb.save(path)
        assert path.read_text() == "per:x\tborn-in\tloc:y\n"
        loaded = KnowledgeBase.load(path, tiny_schema)
        assert loaded.relations_for("per:x", "loc:y") == frozenset({tiny_schema.get("born-in")})

    def test_unknown_relation_against_schema(self, tmp_path, tiny_schema):
        path = tmp_path / "kb.tsv"
        path.write_text("a\tno-such-relation\tb\n")
        with pytest.raises(CorpusError, match="no-such-relation"):
            KnowledgeBase.load(path, tiny_schema)

    def test_load_without_schema_keeps_opaque_ids(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("a\twhatever\tb\n")
        kb = KnowledgeBase.load(path)
        assert kb.relations_for("a", "b") == frozenset({RelationId("whatever")})

    def test_bad_column_count(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("a\tb\n")
        with pytest.raises(CorpusError, match="3 tab-separated"):
            KnowledgeBase.load(path)


class TestHeuristicAnnotator:
    def test_capitalized_runs_become_mentions(self):
        doc = annotate_heuristic(
            "d1", "The painter met Ada Lovelace in Paris .", subject_surface="Ada Lovelace")
        surfaces = {m.surface for m in doc.mentions}
        assert "Ada Lovelace" in surfaces
        assert "Paris" in surfaces
        assert doc.subject.surface == "Ada Lovelace"

    def test_exact_string_coreference(self):
        doc = annotate_heuristic("d2", "He saw Paris . He loved Paris .")
        paris = [m for m in doc.mentions if m.surface == "Paris"]
        assert len(paris) == 2
        assert len({m.canonical_id for m in paris}) == 1

    def test_dates_detected_with_type(self):
        doc = annotate_heuristic("d3", "She arrived on August 4, 1961 in Honolulu .")
        dates = [m for m in doc.mentions if m.entity_type is EntityType.DATE]
        assert len(dates) == 1
        assert dates[0].surface.startswith("August 4")

    def test_sentence_bounds_partition(self):
        doc = annotate_heuristic("d4", "One sentence here . Another follows . No end")
        assert doc.sentence_bounds[-1][1] == len(doc.tokens)
        # document validates itself on construction; reaching here is the test

    def test_document_is_valid_for_pipeline(self, tiny_schema):
        from factacc.supervision import build_classifier_dataset

        doc = annotate_heuristic("d5", "X saw Ada Lovelace . X knew Paris .",
                                 subject_surface="Ada Lovelace")
        kb = KnowledgeBase()
        examples, stats = build_classifier_dataset([doc], kb, negative_ratio=None)
        assert stats.n_positive == 0  # nothing in the kb
