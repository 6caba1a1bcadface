"""Command-line surface for the toolkit.

Every command writes one JSON document to stdout (compact by default,
indented with --pretty) and diagnostics to stderr. Exit codes: 0 success,
1 data error, 2 usage error. All randomized commands take a --seed and are
byte-deterministic given one.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import metadata
from pathlib import Path

from .corpus import CorpusError, KnowledgeBase, read_documents, write_documents
from .corruption import CorruptionLog, corrupt_document, expected_accuracy
from .evaluation import (
    RatingsMatrix,
    krippendorff_alpha_ordinal,
    macro_prf,
    micro_prf,
    per_relation_prf,
    read_score_pairs_csv,
    spearman,
    tuple_prf,
)
from .facts import EntityType, FactFormatError, FactSet, FactTuple, Schema, read_fact_jsonl
from .scoring import ExtractorSpecError, build_extractor, score_pair_files
from .supervision import (
    build_classifier_dataset,
    build_e2e_dataset,
    oracle_facts,
    read_classifier_examples,
    read_e2e_examples,
    reduce_document,
    write_examples_jsonl,
)
from .synth import make_corpus


def toolkit_version() -> str:
    try:
        return metadata.version("factacc")
    except metadata.PackageNotFoundError:
        return "0.0.0-dev"


def _emit(payload: dict, pretty: bool) -> None:
    if pretty:
        json.dump(payload, sys.stdout, ensure_ascii=False, indent=2, sort_keys=True)
    else:
        json.dump(payload, sys.stdout, ensure_ascii=False, sort_keys=True)
    sys.stdout.write("\n")


def cmd_synth_corpus(args) -> dict:
    docs, kb, schema = make_corpus(
        n_articles=args.n_articles,
        seed=args.seed,
        distractor_rate=args.distractor_rate,
        subject_style=args.subject_style,
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_documents(docs, out / "articles.jsonl")
    kb.save(out / "kb.tsv")
    schema.save(out / "schema.json")
    return {
        "n_articles": len(docs),
        "n_triples": len(kb),
        "n_relations": len(schema),
        "files": {
            "articles": str(out / "articles.jsonl"),
            "kb": str(out / "kb.tsv"),
            "schema": str(out / "schema.json"),
        },
    }


def cmd_build_dataset(args) -> dict:
    schema = Schema.load(args.schema) if args.schema else None
    kb = KnowledgeBase.load(args.kb, schema)
    docs = read_documents(args.articles)
    if args.reduced:
        docs = [reduce_document(d) for d in docs]
    if args.task in ("classifier", "binary"):
        ratio = None if args.negative_ratio is None or args.negative_ratio == float("inf") else args.negative_ratio
        examples, stats = build_classifier_dataset(
            docs, kb, negative_ratio=ratio, binary=args.task == "binary", rng_seed=args.seed,
        )
    elif args.task == "e2e":
        examples, stats = build_e2e_dataset(docs, kb)
    else:
        raise ValueError(f"unknown task {args.task!r}")
    write_examples_jsonl(examples, args.out)
    payload = stats.to_json()
    payload.update({"task": args.task, "n_examples": len(examples), "out": str(args.out)})
    return payload


def cmd_corrupt(args) -> dict:
    try:
        types = {EntityType(t.strip().upper()) for t in args.types.split(",") if t.strip()}
    except ValueError as exc:
        raise UsageError(str(exc))
    kb = KnowledgeBase.load(args.kb) if args.kb else None
    docs = read_documents(args.articles)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corrupted_docs = []
    logs: list[CorruptionLog] = []
    for i, doc in enumerate(docs):
        corrupted, log = corrupt_document(doc, types, rng_seed=args.seed + i, kb=kb)
        corrupted_docs.append(corrupted)
        logs.append(log)
    write_documents(corrupted_docs, out / "corrupted.jsonl")
    with open(out / "corruption_log.jsonl", "w", encoding="utf-8") as f:
        for log in logs:
            f.write(json.dumps(log.to_json(), ensure_ascii=False) + "\n")

    per_doc = []
    defined = []
    for log in logs:
        fractions = expected_accuracy(log)
        entry = {"doc_id": log.doc_id, "n_swaps": len(log.swaps)}
        if fractions is None:
            entry.update({"uncorrupted_fraction": None, "corrupted_fraction": None})
        else:
            entry.update({"uncorrupted_fraction": fractions[0], "corrupted_fraction": fractions[1]})
            defined.append(fractions)
        per_doc.append(entry)
    report = {
        "n_documents": len(docs),
        "n_facts_total": sum(log.n_facts_total for log in logs),
        "n_facts_corrupted": sum(log.n_facts_corrupted for log in logs),
        "documents": per_doc,
        "files": {"corrupted": str(out / "corrupted.jsonl"), "log": str(out / "corruption_log.jsonl")},
    }
    if defined:
        report["uncorrupted_fraction_mean"] = sum(f[0] for f in defined) / len(defined)
        report["corrupted_fraction_mean"] = sum(f[1] for f in defined) / len(defined)
    else:
        report["uncorrupted_fraction_mean"] = None
        report["corrupted_fraction_mean"] = None
    return report


TRAIN_DEFAULTS = {
    "n_layers": 2, "d_model": 64, "n_heads": 4, "d_ffn": 128, "dropout": 0.1,
    "max_input_len": 160, "max_target_len": 128, "min_count": 2,
    "steps": 2000, "batch_size": 32, "peak_lr": 3e-3, "warmup_steps": 200,
    "threshold": 0.5, "beam_size": 4, "length_penalty": 0.6, "seed": 0,
}


def _estimator_kwargs(args) -> dict:
    kwargs = dict(
        n_layers=args.n_layers, d_model=args.d_model, n_heads=args.n_heads,
        d_ffn=args.d_ffn, dropout=args.dropout, max_input_len=args.max_input_len,
        min_count=args.min_count, steps=args.steps, batch_size=args.batch_size,
        peak_lr=args.peak_lr, warmup_steps=args.warmup_steps, seed=args.seed,
    )
    return kwargs


def cmd_train(args) -> dict:
    from .neural.extractors import (
        BinaryRelationExtractor,
        RelationClassifierExtractor,
        Seq2SeqFactExtractor,
    )

    if args.config:
        with open(args.config, encoding="utf-8") as f:
            overrides = json.load(f)
        unknown = [k for k in overrides if k not in TRAIN_DEFAULTS]
        if unknown:
            raise ValueError(f"unknown training-config keys: {sorted(unknown)}")
        for key, value in overrides.items():
            # a flag left at its built-in default yields to the config file
            if getattr(args, key) == TRAIN_DEFAULTS[key]:
                setattr(args, key, value)
    kwargs = _estimator_kwargs(args)
    if args.task == "classifier":
        examples = read_classifier_examples(args.data)
        relations = tuple(r.id for r in Schema.load(args.schema)) if args.schema else None
        est = RelationClassifierExtractor(threshold=args.threshold, relations=relations, **kwargs)
        est.fit([e.marked_tokens for e in examples], [e.labels for e in examples])
    elif args.task == "binary":
        examples = read_classifier_examples(args.data)
        est = BinaryRelationExtractor(threshold=args.threshold, **kwargs)
        labels = [1 if "1" in e.labels else 0 for e in examples]
        est.fit([e.marked_tokens for e in examples], labels)
    elif args.task == "e2e":
        pairs = read_e2e_examples(args.data)
        est = Seq2SeqFactExtractor(
            max_target_len=args.max_target_len, beam_size=args.beam_size,
            length_penalty=args.length_penalty, **kwargs,
        )
        est.fit([p.input_tokens for p in pairs], [p.target_tokens for p in pairs])
    else:
        raise ValueError(f"unknown task {args.task!r}")
    est.save(args.out)
    trace = est.loss_trace_
    window = max(1, len(trace) // 20)
    return {
        "task": args.task,
        "steps": len(trace),
        "initial_loss": sum(trace[:window]) / window,
        "final_loss": sum(trace[-window:]) / window,
        "n_examples": len(examples) if args.task != "e2e" else len(pairs),
        "n_truncated": est.n_truncated_,
        "out": str(args.out),
    }


def cmd_extract(args) -> dict:
    extractor = build_extractor(f"{args.kind}:{args.model}", reduced=args.reduced or None)
    est = extractor.estimator
    docs = read_documents(args.articles)
    n_facts = 0
    with open(args.out, "w", encoding="utf-8") as f:
        for doc in docs:
            if args.kind == "e2e":
                facts = est.extract_facts(doc, reduced=args.reduced or None)
            else:
                facts = est.extract_facts(doc)
            for t in facts:
                if args.format == "tsv":
                    f.write(f"{doc.doc_id}\t{t.subject}\t{t.relation.id}\t{t.object}\n")
                else:
                    record = {"doc_id": doc.doc_id, **t.to_json()}
                    f.write(json.dumps(record, ensure_ascii=False) + "\n")
                n_facts += 1
    payload = {"n_documents": len(docs), "n_facts": n_facts, "out": str(args.out)}
    if hasattr(est, "n_malformed_"):
        payload["n_malformed_fragments"] = est.n_malformed_
    return payload


def _prf_report(per_doc: list[tuple[FactSet, FactSet]], top: int = 10) -> dict:
    scores = [tuple_prf(pred, gold) for pred, gold in per_doc]
    micro = micro_prf(scores)
    all_pred = FactSet()
    all_gold = FactSet()
    # relation table pools tuples across documents; subjects keep them distinct
    for pred, gold in per_doc:
        for t in pred:
            all_pred.add(t)
        for t in gold:
            all_gold.add(t)
    relation_table = [
        {"relation": rel.id, **score.to_json()}
        for rel, score in list(per_relation_prf(all_pred, all_gold).items())[:top]
    ]
    return {
        "micro": micro.to_json(),
        "macro": macro_prf(scores),
        "n_documents": len(per_doc),
        "relations": relation_table,
    }


def cmd_eval_model(args) -> dict:
    if args.pred and args.gold:
        pred = read_fact_jsonl(args.pred)
        gold = read_fact_jsonl(args.gold)
        score = tuple_prf(pred, gold)
        relation_table = [
            {"relation": rel.id, **s.to_json()} for rel, s in list(per_relation_prf(pred, gold).items())[:10]
        ]
        return {"micro": score.to_json(), "relations": relation_table}
    if not (args.model and args.articles and args.kb):
        raise UsageError("eval-model needs either --pred/--gold files or --model/--articles/--kb")
    extractor = build_extractor(f"{args.kind}:{args.model}", reduced=args.reduced or None)
    est = extractor.estimator
    kb = KnowledgeBase.load(args.kb)
    docs = read_documents(args.articles)
    per_doc = []
    for doc in docs:
        if args.kind == "e2e":
            pred = est.extract_facts(doc, reduced=args.reduced or None)
            gold = oracle_facts(doc, kb)
        elif args.kind == "classifier":
            pred = est.extract_facts(doc, subject_only=True)
            gold = oracle_facts(doc, kb)
        else:
            # binary: compare detected related pairs against KB-related pairs
            from .neural.extractors import RELATED
            from .supervision import label_pairs

            pred = FactSet(t for t in est.extract_facts(doc, subject_only=True)
                           if t.relation == RELATED)
            positives, _ = label_pairs(doc, kb)
            gold = FactSet()
            for p in positives:
                fact = p.to_fact()
                gold.add(FactTuple(fact.subject, RELATED, fact.object))
        per_doc.append((pred, gold))
    return _prf_report(per_doc)


def cmd_score(args) -> dict:
    extractor = build_extractor(args.extractor, reduced=args.reduced or None)
    return score_pair_files(args.truth, args.generated, extractor, case_fold=args.case_fold)


def cmd_agreement(args) -> dict:
    payload: dict = {}
    if args.ratings:
        matrix = RatingsMatrix.from_csv(args.ratings)
        payload["alpha"] = krippendorff_alpha_ordinal(matrix)
        payload["n_raters"] = len(matrix.raters)
        payload["n_items"] = len(matrix.items)
    if args.metric_scores:
        human, metric = read_score_pairs_csv(args.metric_scores)
        payload["spearman"] = spearman(human, metric)
        payload["n_pairs"] = len(human)
    if not payload:
        raise UsageError("agreement needs --ratings and/or --metric-scores")
    return payload


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factacc",
        description="Factual accuracy scoring via relation-tuple extraction",
    )
    parser.add_argument(
        "--version", action="version",
        version=f"factacc {toolkit_version()} (checkpoint format 1)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--pretty", action="store_true")

    p = sub.add_parser("synth-corpus", help="generate a synthetic template corpus with its KB")
    common(p)
    p.add_argument("--n-articles", type=int, required=True)
    p.add_argument("--distractor-rate", type=float, default=0.0)
    p.add_argument("--subject-style", choices=("name", "pronoun"), default="name")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_synth_corpus)

    p = sub.add_parser("build-dataset", help="materialize training examples via distant supervision")
    common(p)
    p.add_argument("--articles", required=True)
    p.add_argument("--kb", required=True)
    p.add_argument("--schema")
    p.add_argument("--task", choices=("classifier", "binary", "e2e"), required=True)
    p.add_argument("--negative-ratio", type=float, default=3.0,
                   help="max negatives per positive; 'inf' keeps all")
    p.add_argument("--reduced", action="store_true",
                   help="drop mention-free sentences before building")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build_dataset)

    p = sub.add_parser("corrupt", help="derange same-type entity surfaces in documents")
    common(p)
    p.add_argument("--articles", required=True)
    p.add_argument("--kb", help="knowledge base for expected-accuracy accounting")
    p.add_argument("--types", default="date,location,person")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_corrupt)

    p = sub.add_parser("train", help="train an extractor")
    common(p)
    p.add_argument("--task", choices=("classifier", "binary", "e2e"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--schema")
    p.add_argument("--config", help="JSON file of training settings; explicit flags win")
    p.add_argument("--out", required=True)
    p.add_argument("--n-layers", type=int, default=TRAIN_DEFAULTS["n_layers"])
    p.add_argument("--d-model", type=int, default=TRAIN_DEFAULTS["d_model"])
    p.add_argument("--n-heads", type=int, default=TRAIN_DEFAULTS["n_heads"])
    p.add_argument("--d-ffn", type=int, default=TRAIN_DEFAULTS["d_ffn"])
    p.add_argument("--dropout", type=float, default=TRAIN_DEFAULTS["dropout"])
    p.add_argument("--max-input-len", type=int, default=TRAIN_DEFAULTS["max_input_len"])
    p.add_argument("--max-target-len", type=int, default=TRAIN_DEFAULTS["max_target_len"])
    p.add_argument("--min-count", type=int, default=TRAIN_DEFAULTS["min_count"])
    p.add_argument("--steps", type=int, default=TRAIN_DEFAULTS["steps"])
    p.add_argument("--batch-size", type=int, default=TRAIN_DEFAULTS["batch_size"])
    p.add_argument("--peak-lr", type=float, default=TRAIN_DEFAULTS["peak_lr"])
    p.add_argument("--warmup-steps", type=int, default=TRAIN_DEFAULTS["warmup_steps"])
    p.add_argument("--threshold", type=float, default=TRAIN_DEFAULTS["threshold"])
    p.add_argument("--beam-size", type=int, default=TRAIN_DEFAULTS["beam_size"])
    p.add_argument("--length-penalty", type=float, default=TRAIN_DEFAULTS["length_penalty"])
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("extract", help="run a trained extractor over documents")
    common(p)
    p.add_argument("--kind", choices=("e2e", "classifier", "binary"), required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--articles", required=True)
    p.add_argument("--reduced", action="store_true")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("eval-model", help="exact-tuple P/R/F1 against distant gold or a gold file")
    common(p)
    p.add_argument("--kind", choices=("e2e", "classifier", "binary"), default="e2e")
    p.add_argument("--model")
    p.add_argument("--articles")
    p.add_argument("--kb")
    p.add_argument("--reduced", action="store_true")
    p.add_argument("--pred", help="predicted facts JSONL (file mode)")
    p.add_argument("--gold", help="gold facts JSONL (file mode)")
    p.set_defaults(fn=cmd_eval_model)

    p = sub.add_parser("score", help="score a (truth, generated) pair")
    common(p)
    p.add_argument("--truth", required=True)
    p.add_argument("--generated", required=True)
    p.add_argument("--extractor", required=True,
                   help="e2e:ckpt | classifier:ckpt | binary:ckpt | oracle:kb.tsv | tuples:t.jsonl,g.jsonl")
    p.add_argument("--case-fold", action="store_true")
    p.add_argument("--reduced", action="store_true")
    p.set_defaults(fn=cmd_score)

    p = sub.add_parser("agreement", help="inter-rater alpha and metric-vs-human correlation")
    common(p)
    p.add_argument("--ratings", help="CSV: item_id,rater_id,score")
    p.add_argument("--metric-scores", help="CSV: item_id,human_score,metric_score")
    p.set_defaults(fn=cmd_agreement)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, CorpusError, FactFormatError, ExtractorSpecError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(payload, args.pretty)
    return 0


if __name__ == "__main__":
    sys.exit(main())
