import math
import random

import pytest

from tabfig.errors import DivisionByZeroBaseline, EmptyInput, JudgeUnparseable
from tabfig.gateway.embedders import MappingEmbedder
from tabfig.metrics.aggregate import (
    METRIC_NAMES,
    MetricVector,
    aggregate,
    compute_metrics,
    delta,
    scores_from_means,
    summary_table,
)
from tabfig.metrics.judge import JudgeReport, judge_corpus, judge_five_dim
from tabfig.metrics.lexical import bleu, rouge_l, word_overlap
from tabfig.metrics.semantic import cosine_sim, embedding_f1, meteor
from tabfig.metrics.tokenize import tokenize

from .conftest import make_instance, scripted_gateway
from .oracles import embedding_f1_oracle, meteor_oracle, rouge_l_oracle, word_overlap_oracle

VOCAB = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "mu", "nu"]


def random_tokens(rng: random.Random, max_len: int = 12, max_repeat: int = 3) -> list[str]:
    while True:
        n = rng.randint(0, max_len)
        tokens = [rng.choice(VOCAB) for _ in range(n)]
        if all(tokens.count(w) <= max_repeat for w in set(tokens)):
            return tokens


class TestTokenize:
    def test_lowercase_and_punctuation(self):
        assert tokenize("The CAT, sat. On THE mat!") == ["the", "cat", "sat", "on", "the", "mat"]

    def test_unicode_words(self):
        assert tokenize("naïve café résumé") == ["naïve", "café", "résumé"]

    def test_empty(self):
        assert tokenize("  .,;  ") == []


class TestRougeL:
    def test_identity(self):
        assert rouge_l("a b c", "a b c") == 1.0

    def test_spec_case_three_quarters(self):
        assert rouge_l("a b c d", "a c d") == 0.75

    def test_spec_case_five_sixths(self):
        assert rouge_l("the cat sat on the mat", "the cat on the mat") == pytest.approx(5 / 6)

    def test_both_empty(self):
        assert rouge_l("", "") == 1.0

    def test_one_empty(self):
        assert rouge_l("a b", "") == 0.0
        assert rouge_l("", "a b") == 0.0

    def test_symmetry_under_max_normalization(self):
        rng = random.Random(5)
        for _ in range(100):
            a = " ".join(random_tokens(rng))
            b = " ".join(random_tokens(rng))
            assert rouge_l(a, b) == pytest.approx(rouge_l(b, a), abs=1e-12)


class TestBleu:
    def test_identity(self):
        assert bleu("a b c d e", "a b c d e") == 1.0

    def test_short_identity_still_one(self):
        assert bleu("a b", "a b", n=4) == 1.0

    def test_empty_candidate(self):
        assert bleu("a b c", "") == 0.0

    def test_spec_brevity_case(self):
        assert bleu("a b c d", "a b", n=2) == pytest.approx(math.exp(-1.0), abs=1e-9)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            bleu("a", "a", n=2, weights=[0.9, 0.2])

    def test_range(self):
        rng = random.Random(6)
        for _ in range(200):
            value = bleu(" ".join(random_tokens(rng)), " ".join(random_tokens(rng)))
            assert 0.0 <= value <= 1.0


class TestRougeLF:
    def test_identity(self):
        from tabfig.metrics.lexical import rouge_l_f

        assert rouge_l_f("a b c", "a b c") == 1.0

    def test_differs_from_max_normalized_on_asymmetric_lengths(self):
        from tabfig.metrics.lexical import rouge_l_f

        # LCS=2, |ref|=4, |cand|=2: ratio = 2/4, F = 2*(1)*(0.5)/1.5
        assert rouge_l("a b c d", "a b") == 0.5
        assert rouge_l_f("a b c d", "a b") == pytest.approx(2 / 3)


class TestWordOverlap:
    def test_identity(self):
        assert word_overlap("x y z", "x y z") == 1.0

    def test_spec_case_half(self):
        assert word_overlap("a b c", "b c d") == 0.5

    def test_disjoint(self):
        assert word_overlap("a b", "c d") == 0.0

    def test_symmetry(self):
        rng = random.Random(7)
        for _ in range(100):
            a = " ".join(random_tokens(rng))
            b = " ".join(random_tokens(rng))
            assert word_overlap(a, b) == word_overlap(b, a)


class TestCosine:
    def test_identity_exact(self, embedder):
        assert cosine_sim("some scientific text", "some scientific text", embedder) == 1.0

    def test_45_degree_stub(self):
        m = MappingEmbedder({"a": [1.0, 0.0], "b": [2**-0.5, 2**-0.5]})
        assert cosine_sim("a", "b", m) == pytest.approx(2**-0.5, abs=1e-12)

    def test_orthogonal_is_zero(self):
        m = MappingEmbedder({"a": [1.0, 0.0], "b": [0.0, 1.0]})
        assert cosine_sim("a", "b", m) == 0.0

    def test_negative_clamped_to_zero(self):
        m = MappingEmbedder({"a": [1.0, 0.0], "b": [-1.0, 0.0]})
        assert cosine_sim("a", "b", m) == 0.0

    def test_symmetry(self, embedder):
        a, b = "alpha beta gamma", "gamma delta"
        assert cosine_sim(a, b, embedder) == pytest.approx(cosine_sim(b, a, embedder), abs=1e-12)


class TestEmbeddingF1:
    def test_identity(self, embedder):
        assert embedding_f1("alpha beta gamma", "alpha beta gamma", embedder) == 1.0

    def test_single_orthogonal_tokens(self):
        m = MappingEmbedder({"a": [1.0, 0.0], "b": [0.0, 1.0]})
        assert embedding_f1("a", "b", m) == 0.0

    def test_empty_side_is_zero(self, embedder):
        assert embedding_f1("", "a b", embedder) == 0.0
        assert embedding_f1("a b", "", embedder) == 0.0

    def test_three_vs_two_token_matches_oracle(self):
        m = MappingEmbedder(
            {"a": [1.0, 0.0], "b": [0.0, 1.0], "c": [2**-0.5, 2**-0.5], "d": [0.6, 0.8]}
        )
        ref, cand = "a b c", "c d"
        expected = embedding_f1_oracle(m.token_vectors(ref), m.token_vectors(cand))
        assert embedding_f1(ref, cand, m) == pytest.approx(expected, abs=1e-9)


class TestMeteor:
    def test_zero_matches(self):
        assert meteor("a b c", "x y z") == 0.0

    def test_ten_token_identity(self):
        text = " ".join(VOCAB[:10])
        assert meteor(text, text) == pytest.approx(0.9995, abs=1e-12)

    def test_reordered_two_chunk_case(self):
        ref, cand = "a b c d", "c d a b"
        expected = meteor_oracle(tokenize(ref), tokenize(cand))
        assert meteor(ref, cand) == pytest.approx(expected, abs=1e-12)

    def test_empty_sides(self):
        assert meteor("", "a") == 0.0
        assert meteor("a", "") == 0.0


class TestOracleEquivalence:
    def test_rouge_matches_oracle(self):
        rng = random.Random(11)
        for _ in range(300):
            ref, cand = random_tokens(rng), random_tokens(rng)
            assert rouge_l(" ".join(ref), " ".join(cand)) == pytest.approx(
                rouge_l_oracle(ref, cand), abs=1e-9
            )

    def test_word_overlap_matches_oracle(self):
        rng = random.Random(12)
        for _ in range(300):
            ref, cand = random_tokens(rng), random_tokens(rng)
            assert word_overlap(" ".join(ref), " ".join(cand)) == pytest.approx(
                word_overlap_oracle(ref, cand), abs=1e-9
            )

    def test_meteor_matches_oracle(self):
        rng = random.Random(13)
        for _ in range(300):
            ref, cand = random_tokens(rng), random_tokens(rng)
            assert meteor(" ".join(ref), " ".join(cand)) == pytest.approx(
                meteor_oracle(ref, cand), abs=1e-9
            )

    def test_embedding_f1_matches_oracle(self, embedder):
        rng = random.Random(14)
        for _ in range(100):
            ref, cand = random_tokens(rng), random_tokens(rng)
            expected = embedding_f1_oracle(
                embedder.token_vectors(" ".join(ref)), embedder.token_vectors(" ".join(cand))
            )
            assert embedding_f1(" ".join(ref), " ".join(cand), embedder) == pytest.approx(
                expected, abs=1e-9
            )


class TestAggregate:
    def test_table_row_reproduction_baseline(self):
        means = {
            "cosine": 0.5634,
            "embedding_f1": 0.5974,
            "meteor": 0.1947,
            "rouge_l": 0.1674,
            "bleu": 0.0339,
            "word_overlap": 0.1149,
        }
        s_lex, s_sem, s_avg = scores_from_means(means)
        assert s_sem == pytest.approx(45.18, abs=0.01)
        assert s_lex == pytest.approx(10.54, abs=0.01)
        assert s_avg == pytest.approx(27.86, abs=0.01)

    def test_all_ones(self):
        vec = MetricVector(1, 1, 1, 1, 1, 1)
        report = aggregate([vec])
        assert report.s_lex == report.s_sem == report.s_avg == 100.0

    def test_all_zeros(self):
        vec = MetricVector(0, 0, 0, 0, 0, 0)
        report = aggregate([vec])
        assert report.s_lex == report.s_sem == report.s_avg == 0.0

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            aggregate([])

    def test_permutation_invariance(self):
        rng = random.Random(15)
        vectors = [
            MetricVector(*[rng.random() for _ in range(6)]) for _ in range(20)
        ]
        a = aggregate(vectors)
        shuffled = vectors[:]
        rng.shuffle(shuffled)
        b = aggregate(shuffled)
        assert a.s_avg == pytest.approx(b.s_avg, abs=1e-12)
        assert a.metric_means == pytest.approx(b.metric_means)

    def test_vector_range_validation(self):
        with pytest.raises(ValueError):
            MetricVector(1.2, 0, 0, 0, 0, 0)

    def test_summary_table_column_order(self):
        report = aggregate([MetricVector(0.1, 0.2, 0.3, 0.4, 0.5, 0.6)])
        table = summary_table(report)
        header = table.splitlines()[0]
        assert header.split() == [
            "Cosine", "BERT", "Meteor", "Rouge-L", "Bleu", "Word", "S_Sem", "S_Lex", "S_Avg",
        ]


class TestDelta:
    def test_table_pair(self):
        d = delta(29.93, 27.86)
        assert d["delta_abs"] == pytest.approx(2.07, abs=1e-9)
        assert d["delta_rel"] == pytest.approx(7.43, abs=0.01)

    def test_equal_scores(self):
        d = delta(10.0, 10.0)
        assert d["delta_abs"] == 0.0 and d["delta_rel"] == 0.0

    def test_zero_baseline(self):
        with pytest.raises(DivisionByZeroBaseline):
            delta(5.0, 0.0)


class TestComputeMetrics:
    def test_identity_vector(self, embedder):
        text = " ".join(VOCAB[:10])
        vec = compute_metrics(text, text, embedder)
        assert vec.rouge_l == vec.bleu == vec.word_overlap == 1.0
        assert vec.cosine == vec.embedding_f1 == 1.0
        assert vec.meteor >= 0.999

    def test_random_pairs_in_range(self, embedder):
        rng = random.Random(16)
        for _ in range(50):
            vec = compute_metrics(
                " ".join(random_tokens(rng)), " ".join(random_tokens(rng)), embedder
            )
            for name in METRIC_NAMES:
                assert 0.0 <= getattr(vec, name) <= 1.0


class TestJudge:
    def test_scripted_grades_mapping(self):
        reply = (
            "<think>ok</think><accuracy>2</accuracy><completeness>1</completeness>"
            "<format>2</format><writing>2</writing><faithfulness>1</faithfulness>"
        )
        gateway, backend = scripted_gateway([reply])
        grades, clamped = judge_five_dim(make_instance(), "analysis", gateway, backend)
        assert grades == {
            "accuracy": 2, "completeness": 1, "format": 2, "writing": 2, "faithfulness": 1,
        }
        assert not clamped
        report = JudgeReport(per_instance={"i": grades})
        pct = report.dimension_pct
        assert pct["accuracy"] == 100.0 and pct["completeness"] == 50.0
        assert report.s_mllm == pytest.approx(80.0)

    def test_all_twos_is_hundred(self):
        grades = {d: 2 for d in ("accuracy", "completeness", "format", "writing", "faithfulness")}
        report = JudgeReport(per_instance={"i": grades})
        assert report.s_mllm == 100.0

    def test_unparseable_twice_excluded_and_counted(self):
        gateway, backend = scripted_gateway(["no tags", "still no tags"])
        with pytest.raises(JudgeUnparseable):
            judge_five_dim(make_instance(), "analysis", gateway, backend)
        gateway2, backend2 = scripted_gateway(["junk", "junk"])
        report = judge_corpus([make_instance()], {"sample1/tbl-0001": "text"}, gateway2, backend2)
        assert report.excluded == ["sample1/tbl-0001"]
        assert report.per_instance == {}

    def test_out_of_range_grade_clamped(self):
        reply = (
            "<think>ok</think><accuracy>3</accuracy><completeness>2</completeness>"
            "<format>2</format><writing>2</writing><faithfulness>2</faithfulness>"
        )
        gateway, backend = scripted_gateway([reply])
        grades, clamped = judge_five_dim(make_instance(), "analysis", gateway, backend)
        assert grades["accuracy"] == 2 and clamped
