"""factacc: factual accuracy scoring for generated text.

Compares a generated text against a reference by extracting (subject,
relation, object) fact tuples from both sides and measuring the precision of
the generated claims that the reference can verify or refute, alongside
conventional ROUGE overlap. Ships the full supporting pipeline: distant
supervision over a knowledge base, desk-scale trainable extractors, synthetic
corruption experiments, and agreement statistics.
"""

from .corpus import AnnotatedDocument, CorpusError, KnowledgeBase, annotate_heuristic
from .corruption import CorruptionLog, corrupt_document, expected_accuracy
from .evaluation import (
    PrfScore,
    RatingsMatrix,
    krippendorff_alpha_ordinal,
    per_relation_prf,
    spearman,
    tuple_prf,
)
from .facts import (
    NO_RELATION,
    NO_RELATION_ID,
    EntityRef,
    EntityType,
    FactFormatError,
    FactSet,
    FactTuple,
    RelationId,
    Schema,
    normalize,
    parse_facts,
    serialize_facts,
)
from .metrics import (
    FactAccResult,
    MatchKey,
    RougeScore,
    external_tuple_precision,
    fact_acc,
    filter_verifiable,
    rouge_l,
    rouge_n,
    rouge_scores,
)
from .supervision import (
    ClassifierExample,
    E2EExample,
    build_classifier_dataset,
    build_e2e_dataset,
    label_pairs,
    mark_sentence,
    oracle_facts,
    reduce_document,
)
from .synth import make_corpus

__version__ = "0.1.0"


def __getattr__(name):
    # heavyweight optional surfaces load on first use, keeping plain scoring
    # (and CLI startup) free of scikit-learn and torch imports
    if name == "EntitySwapCorruptor":
        from .sklearn_api import EntitySwapCorruptor

        return EntitySwapCorruptor
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
