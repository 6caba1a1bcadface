import itertools
import random

import pytest

from factacc.facts import FactSet, FactTuple, RelationId
from factacc.metrics import (
    MatchKey,
    external_tuple_precision,
    fact_acc,
    filter_verifiable,
    lcs_length,
    rouge_l,
    rouge_n,
    rouge_scores,
    tokenize,
)


def t(subject, relation, obj):
    return FactTuple(subject, RelationId(relation), obj)


def brute_filter(truth, generated, key):
    """Independent filter oracle: enumerate all cross pairs."""
    def k(fact):
        return (fact.subject, fact.relation.id) if key is MatchKey.SUBJECT_RELATION \
            else (fact.subject, fact.object)

    truth_kept = {ft for ft in truth for fg in generated if k(ft) == k(fg)}
    gen_kept = {fg for fg in generated for ft in truth if k(ft) == k(fg)}
    return truth_kept, gen_kept


class TestFilterVerifiable:
    def test_same_key_different_object_passes(self):
        truth = FactSet([t("BP", "born-in", "1963")])
        gen = FactSet([t("BP", "born-in", "1961")])
        ft, fg = filter_verifiable(truth, gen)
        assert set(ft) == set(truth) and set(fg) == set(gen)

    def test_empty_truth(self):
        ft, fg = filter_verifiable(FactSet(), FactSet([t("A", "r", "B")]))
        assert len(ft) == 0 and len(fg) == 0

    def test_partial_overlap_matches_brute_force(self):
        truth = FactSet([t("A", "r", "x"), t("A", "q", "y")])
        gen = FactSet([t("A", "r", "z"), t("A", "s", "w")])
        ft, fg = filter_verifiable(truth, gen)
        bt, bg = brute_filter(truth, gen, MatchKey.SUBJECT_RELATION)
        assert set(ft) == bt == {t("A", "r", "x")}
        assert set(fg) == bg == {t("A", "r", "z")}

    def test_entity_pair_key(self):
        truth = FactSet([t("A", "r", "B")])
        gen = FactSet([t("A", "other", "B"), t("A", "r", "C")])
        ft, fg = filter_verifiable(truth, gen, MatchKey.ENTITY_PAIR)
        assert set(fg) == {t("A", "other", "B")}
        assert set(ft) == {t("A", "r", "B")}

    def test_random_sets_match_brute_force(self):
        rng = random.Random(7)
        subjects = ["s1", "s2"]
        rels = ["r1", "r2", "r3"]
        objs = ["o1", "o2", "o3"]
        for key in MatchKey:
            for _ in range(50):
                make = lambda: FactSet(
                    t(rng.choice(subjects), rng.choice(rels), rng.choice(objs))
                    for _ in range(rng.randint(0, 6))
                )
                truth, gen = make(), make()
                ft, fg = filter_verifiable(truth, gen, key)
                bt, bg = brute_filter(truth, gen, key)
                assert set(ft) == bt and set(fg) == bg


class TestFactAcc:
    def test_refuted_birth_year_scores_zero(self):
        truth = FactSet([t("Brad Pitt", "born-in", "1963")])
        gen = FactSet([t("Brad Pitt", "born-in", "1961")])
        result = fact_acc(truth, gen)
        assert result.value == 0.0
        assert not result.no_verifiable_claims
        assert result.refuted == [t("Brad Pitt", "born-in", "1961")]

    def test_identity_scores_one(self):
        facts = FactSet([t("A", "r", "B"), t("C", "q", "D")])
        assert fact_acc(facts, facts).value == 1.0

    def test_half_right(self):
        truth = FactSet([t("A", "born", "1963"), t("A", "job", "actor")])
        gen = FactSet([t("A", "born", "1961"), t("A", "job", "actor"), t("A", "spouse", "B")])
        result = fact_acc(truth, gen)
        # brute force: F_G' = {born/1961, job/actor}; intersection = {job/actor}
        assert result.value == 0.5
        assert result.n_gen_filtered == 2
        assert result.n_matched == 1
        assert result.unverifiable == [t("A", "spouse", "B")]

    def test_no_verifiable_claims(self):
        truth = FactSet([t("A", "r", "B")])
        gen = FactSet([t("X", "y", "Z")])
        result = fact_acc(truth, gen)
        assert result.value is None
        assert result.no_verifiable_claims
        assert result.numeric == 0.0
        assert result.to_json()["fact_acc"] is None

    def test_monotone_unverifiability(self):
        truth = FactSet([t("A", "r", "B")])
        gen = FactSet([t("A", "r", "C")])
        before = fact_acc(truth, gen).value
        gen2 = gen.union(FactSet([t("ZZ", "qq", "ww")]))
        assert fact_acc(truth, gen2).value == before

    def test_corruption_monotonicity(self):
        rng = random.Random(3)
        for _ in range(100):
            truth = FactSet(
                t(f"s{rng.randint(0, 2)}", f"r{rng.randint(0, 2)}", f"o{rng.randint(0, 3)}")
                for _ in range(rng.randint(1, 5))
            )
            gen_list = [f for f in truth]
            if not gen_list:
                continue
            # corrupt one matched tuple's object, key stays present in truth
            victim = rng.choice(gen_list)
            corrupted = t(victim.subject, victim.relation.id, "corrupted-object")
            gen2 = FactSet([corrupted if f == victim else f for f in gen_list])
            gen1 = FactSet(gen_list)
            assert fact_acc(truth, gen2).numeric <= fact_acc(truth, gen1).numeric

    def test_invariant_under_duplication(self):
        truth = FactSet([t("A", "r", "B")])
        gen = FactSet([t("A", "r", "B"), t("A", "r", "B")])
        assert fact_acc(truth, gen).value == 1.0

    def test_case_fold_flag(self):
        truth = FactSet([t("Brad Pitt", "born-in", "Oklahoma")])
        gen = FactSet([t("brad pitt", "born-in", "oklahoma")])
        assert fact_acc(truth, gen).no_verifiable_claims
        assert fact_acc(truth, gen, case_fold=True).value == 1.0


class TestExternalTuplePrecision:
    def test_identical_sets(self):
        facts = FactSet([t("Town", "is the birthplace of", "Person")])
        assert external_tuple_precision(facts, facts).value == 1.0

    def test_disjoint_subjects_unverifiable(self):
        truth = FactSet([t("A", "linked to", "B")])
        gen = FactSet([t("C", "linked to", "D")])
        result = external_tuple_precision(truth, gen)
        assert result.value is None and result.no_verifiable_claims

    def test_half_case_with_free_text_relations(self):
        truth = FactSet([t("A", "was born in", "1963"), t("A", "works as", "actor")])
        gen = FactSet([t("A", "was born in", "1961"), t("A", "works as", "actor"),
                       t("A", "is married to", "B")])
        assert external_tuple_precision(truth, gen).value == 0.5


class TestTokenize:
    def test_lowercase_and_punctuation(self):
        assert tokenize("Brad Pitt, was born (in) 1963.") == \
            ["brad", "pitt", "was", "born", "in", "1963"]

    def test_pure_punctuation_dropped(self):
        assert tokenize("a , b .") == ["a", "b"]


class TestRougeN:
    def test_birth_year_pair(self):
        ref = tokenize("Brad Pitt was born in 1963")
        cand = tokenize("Brad Pitt was born in 1961")
        score = rouge_n(ref, cand, 1)
        assert score.recall == pytest.approx(5 / 6)
        assert score.precision == pytest.approx(5 / 6)

    def test_identical_texts(self):
        toks = tokenize("one two three four")
        for n in (1, 2, 3, 4):
            score = rouge_n(toks, toks, n)
            assert score.precision == score.recall == score.f_measure == 1.0

    def test_bigram_hand_count(self):
        score = rouge_n("a b c d".split(), "b c e".split(), 2)
        assert score.recall == pytest.approx(1 / 3)
        assert score.precision == pytest.approx(1 / 2)

    def test_clipping(self):
        score = rouge_n("a b".split(), "a a a".split(), 1)
        assert score.precision == pytest.approx(1 / 3)

    def test_swap_exchanges_precision_recall(self):
        rng = random.Random(11)
        vocab = "abcdef"
        for _ in range(50):
            x = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
            y = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
            for n in (1, 2):
                a = rouge_n(x, y, n)
                b = rouge_n(y, x, n)
                assert a.precision == pytest.approx(b.recall)
                assert a.recall == pytest.approx(b.precision)

    def test_empty_inputs(self):
        assert rouge_n([], "a".split(), 1) == rouge_n([], "a".split(), 1)
        score = rouge_n([], [], 1)
        assert score.precision == score.recall == score.f_measure == 0.0

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            rouge_n(["a"], ["a"], 0)


def brute_force_lcs(a, b):
    """Enumerate every subsequence of the shorter side; exponential."""
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    best = 0
    for r in range(len(short), 0, -1):
        for combo in itertools.combinations(range(len(short)), r):
            sub = [short[i] for i in combo]
            it = iter(long_)
            if all(tok in it for tok in sub):
                best = r
                break
        if best:
            break
    return best


class TestRougeL:
    def test_identical(self):
        toks = "x y z".split()
        score = rouge_l(toks, toks)
        assert (score.precision, score.recall, score.f_measure) == (1.0, 1.0, 1.0)

    def test_disjoint(self):
        score = rouge_l("a b".split(), "c d".split())
        assert (score.precision, score.recall, score.f_measure) == (0.0, 0.0, 0.0)

    def test_matches_brute_force_oracle(self):
        rng = random.Random(5)
        vocab = "abcd"
        for _ in range(300):
            a = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            b = [rng.choice(vocab) for _ in range(rng.randint(0, 10))]
            assert lcs_length(a, b) == brute_force_lcs(a, b)

    def test_known_lcs(self):
        # lcs("abcbdab", "bdcaba") = 4, a classic
        assert lcs_length(list("abcbdab"), list("bdcaba")) == 4


class TestRougeScores:
    def test_emits_all_variants(self):
        scores = rouge_scores("a b c", "a b d")
        assert set(scores) == {"rouge1", "rouge2", "rougeL"}
        assert scores["rouge1"].recall == pytest.approx(2 / 3)
