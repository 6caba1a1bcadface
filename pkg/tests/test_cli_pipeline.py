"""End-to-end CLI pipeline: train on a memorizable corpus, extract, evaluate.
Heavier than the other CLI tests but still well under a minute."""

import json

import pytest

from factacc.cli import main
from factacc.corpus import write_documents
from factacc.facts import FactTuple, RelationId, write_fact_jsonl
from factacc.synth import make_corpus


def run_json(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    assert code == 0, f"exit {code}: {captured.err}"
    return json.loads(captured.out)


@pytest.fixture(scope="module")
def memorization_setup(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("pipeline")
    docs, kb, schema = make_corpus(6, seed=2, subject_style="name", optional_fact_prob=0.0)
    articles = tmp_path / "articles.jsonl"
    write_documents(docs, articles)
    kb_path = tmp_path / "kb.tsv"
    kb.save(kb_path)
    schema_path = tmp_path / "schema.json"
    schema.save(schema_path)
    return tmp_path, articles, kb_path, schema_path


def _train_e2e(tmp_path, articles, kb_path, capsys):
    dataset = tmp_path / "e2e.jsonl"
    run_json(["build-dataset", "--articles", str(articles), "--kb", str(kb_path),
              "--task", "e2e", "--out", str(dataset)], capsys)
    ckpt = tmp_path / "model.ckpt"
    payload = run_json(["train", "--task", "e2e", "--data", str(dataset),
                        "--steps", "900", "--batch-size", "6", "--min-count", "1",
                        "--n-layers", "1", "--d-model", "32", "--n-heads", "2",
                        "--d-ffn", "48", "--dropout", "0.0", "--peak-lr", "5e-3",
                        "--warmup-steps", "60", "--seed", "0", "--out", str(ckpt)], capsys)
    assert payload["final_loss"] < 0.1
    return ckpt


class TestMemorizationPipeline:
    def test_train_extract_eval_reaches_perfect_f1(self, memorization_setup, capsys):
        tmp_path, articles, kb_path, schema_path = memorization_setup
        ckpt = _train_e2e(tmp_path, articles, kb_path, capsys)

        facts_out = tmp_path / "facts.jsonl"
        extract_payload = run_json(["extract", "--kind", "e2e", "--model", str(ckpt),
                                    "--articles", str(articles), "--out", str(facts_out)], capsys)
        assert extract_payload["n_documents"] == 6
        assert extract_payload["n_facts"] > 0

        eval_payload = run_json(["eval-model", "--kind", "e2e", "--model", str(ckpt),
                                 "--articles", str(articles), "--kb", str(kb_path)], capsys)
        micro = eval_payload["micro"]
        assert (micro["precision"], micro["recall"], micro["f1"]) == (1.0, 1.0, 1.0)
        assert eval_payload["relations"]

        # scoring identical docs with the trained extractor is also perfect
        score_payload = run_json(["score", "--truth", str(articles),
                                  "--generated", str(articles),
                                  "--extractor", f"e2e:{ckpt}"], capsys)
        assert score_payload["aggregate"]["fact_acc_mean"] == 1.0

    def test_extract_tsv_format(self, memorization_setup, capsys):
        tmp_path, articles, kb_path, _ = memorization_setup
        ckpt = tmp_path / "model.ckpt"
        if not ckpt.exists():
            _train_e2e(tmp_path, articles, kb_path, capsys)
        out = tmp_path / "facts.tsv"
        run_json(["extract", "--kind", "e2e", "--model", str(ckpt),
                  "--articles", str(articles), "--format", "tsv", "--out", str(out)], capsys)
        line = out.read_text().splitlines()[0]
        assert len(line.split("\t")) == 4  # doc_id, subject, relation, object


class TestClassifierPaths:
    def test_train_and_score_with_both_classifiers(self, memorization_setup, capsys):
        tmp_path, articles, kb_path, schema_path = memorization_setup
        small = dict(steps="350", batch="8")
        for task in ("classifier", "binary"):
            dataset = tmp_path / f"{task}.jsonl"
            run_json(["build-dataset", "--articles", str(articles), "--kb", str(kb_path),
                      "--schema", str(schema_path), "--task", task,
                      "--negative-ratio", "1.0", "--out", str(dataset)], capsys)
            ckpt = tmp_path / f"{task}.ckpt"
            args = ["train", "--task", task, "--data", str(dataset),
                    "--steps", small["steps"], "--batch-size", small["batch"],
                    "--min-count", "1", "--n-layers", "1", "--d-model", "32",
                    "--n-heads", "2", "--d-ffn", "48", "--dropout", "0.0",
                    "--peak-lr", "5e-3", "--warmup-steps", "30",
                    "--max-input-len", "48", "--out", str(ckpt)]
            if task == "classifier":
                args += ["--schema", str(schema_path)]
            run_json(args, capsys)

            report = run_json(["score", "--truth", str(articles),
                               "--generated", str(articles),
                               "--extractor", f"{task}:{ckpt}"], capsys)
            agg = report["aggregate"]
            # identical sides: whatever is extracted matches itself exactly
            assert agg["fact_acc_mean"] == 1.0 or agg["n_no_verifiable_claims"] == 6
            assert agg["rouge1"]["f_measure"] == 1.0

            eval_payload = run_json(["eval-model", "--kind", task, "--model", str(ckpt),
                                     "--articles", str(articles), "--kb", str(kb_path)], capsys)
            assert 0.0 <= eval_payload["micro"]["f1"] <= 1.0


class TestEvalFileMode:
    def test_identical_pred_gold_files(self, capsys, tmp_path):
        facts = [FactTuple("A", RelationId("r"), "B"), FactTuple("C", RelationId("q"), "D")]
        pred = tmp_path / "pred.jsonl"
        gold = tmp_path / "gold.jsonl"
        write_fact_jsonl(facts, pred)
        write_fact_jsonl(facts, gold)
        payload = run_json(["eval-model", "--pred", str(pred), "--gold", str(gold)], capsys)
        micro = payload["micro"]
        assert (micro["precision"], micro["recall"], micro["f1"]) == (1.0, 1.0, 1.0)

    def test_file_mode_needs_no_model(self, capsys, tmp_path):
        pred = tmp_path / "pred.jsonl"
        gold = tmp_path / "gold.jsonl"
        write_fact_jsonl([FactTuple("A", RelationId("r"), "B")], pred)
        write_fact_jsonl([FactTuple("A", RelationId("r"), "C")], gold)
        payload = run_json(["eval-model", "--pred", str(pred), "--gold", str(gold)], capsys)
        assert payload["micro"]["f1"] == 0.0


class TestExtractEmptyInput:
    def test_empty_articles_give_empty_jsonl(self, memorization_setup, capsys, tmp_path):
        setup_tmp, articles, kb_path, _ = memorization_setup
        ckpt = setup_tmp / "model.ckpt"
        if not ckpt.exists():
            _train_e2e(setup_tmp, articles, kb_path, capsys)
        empty_articles = tmp_path / "none.jsonl"
        empty_articles.write_text("")
        out = tmp_path / "facts.jsonl"
        payload = run_json(["extract", "--kind", "e2e", "--model", str(ckpt),
                            "--articles", str(empty_articles), "--out", str(out)], capsys)
        assert payload == {"n_documents": 0, "n_facts": 0, "out": str(out),
                           "n_malformed_fragments": 0}
        assert out.read_text() == ""


class TestTrainConfigFile:
    def test_config_file_sets_defaults_flags_win(self, memorization_setup, capsys, tmp_path):
        setup_tmp, articles, kb_path, _ = memorization_setup
        dataset = setup_tmp / "e2e.jsonl"
        if not dataset.exists():
            run_json(["build-dataset", "--articles", str(articles), "--kb", str(kb_path),
                      "--task", "e2e", "--out", str(dataset)], capsys)
        config = tmp_path / "train.json"
        config.write_text(json.dumps({"steps": 7, "d_model": 16, "n_heads": 2,
                                      "d_ffn": 24, "min_count": 1}))
        ckpt = tmp_path / "m.ckpt"
        payload = run_json(["train", "--task", "e2e", "--data", str(dataset),
                            "--config", str(config), "--steps", "9",
                            "--out", str(ckpt)], capsys)
        assert payload["steps"] == 9  # explicit flag beats config
        from factacc.neural.checkpoint import load_checkpoint

        meta = load_checkpoint(ckpt)
        assert meta["config"]["d_model"] == 16  # config beats built-in default

    def test_unknown_config_key_is_data_error(self, memorization_setup, capsys, tmp_path):
        setup_tmp, articles, kb_path, _ = memorization_setup
        dataset = setup_tmp / "e2e.jsonl"
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"nonsense_knob": 1}))
        code = main(["train", "--task", "e2e", "--data", str(dataset),
                     "--config", str(config), "--out", str(tmp_path / "x.ckpt")])
        captured = capsys.readouterr()
        assert code == 1
        assert "nonsense_knob" in captured.err
