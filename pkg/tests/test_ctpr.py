import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emocause.corpus import EmotionLexicon, Tweet, Vocabulary, build_corpus
from emocause.ctpr import (Keyphrase, TermGraph, TopicTermRanking, assign_tweets, build_term_graph,
                           count_phrases, default_min_support, detect_causes, generate_keyphrases,
                           top_terms, topic_jump_vector, topical_pagerank)
from emocause.tsbtm import EmotionTopicModel, train


def dense_pagerank(nodes, edges, jump, damping, iters=5000):
    """Independent oracle: explicit Google matrix, plain power iteration."""
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    W = np.zeros((n, n))
    for (x, y), w in edges.items():
        W[idx[x], idx[y]] += w
    G = np.empty((n, n))
    for i in range(n):
        out = W[i].sum()
        row = W[i] / out if out > 0 else np.asarray(jump)
        G[i] = damping * row + (1 - damping) * np.asarray(jump)
    r = np.full(n, 1.0 / n)
    for _ in range(iters):
        nxt = r @ G
        if np.abs(nxt - r).max() < 1e-15:
            r = nxt
            break
        r = nxt
    return r


def random_graph(rng, n_max=50):
    n = int(rng.integers(1, n_max + 1))
    nodes = tuple(range(n))
    edges = {}
    for _ in range(int(rng.integers(0, 4 * n + 1))):
        x, y = (int(v) for v in rng.integers(0, n, size=2))
        if x != y:
            edges[(x, y)] = edges.get((x, y), 0) + int(rng.integers(1, 6))
    return TermGraph(nodes, edges)


class TestTermGraph:
    def test_window_one(self):
        g = build_term_graph([Tweet((0, 1, 2))], window=1)
        assert g.edges == {(1, 0): 1, (2, 1): 1}
        assert g.nodes == (0, 1, 2)

    def test_window_two(self):
        g = build_term_graph([(0, 1, 2)], window=2)
        assert g.edges == {(1, 0): 1, (2, 1): 1, (2, 0): 1}

    def test_accumulates(self):
        assert build_term_graph([(0, 1), (0, 1)]).edges == {(1, 0): 2}

    def test_empty(self):
        g = build_term_graph([])
        assert g.nodes == () and g.edges == {}

    def test_self_pairs_skipped(self):
        assert build_term_graph([(3, 3, 4)]).edges == {(4, 3): 1}

    @given(st.lists(st.lists(st.integers(0, 6), max_size=10), max_size=8), st.integers(1, 4))
    def test_total_weight(self, tweets, window):
        g = build_term_graph(tweets, window)
        expected = sum(1 for t in tweets for i in range(len(t))
                       for j in range(max(0, i - window), i) if t[i] != t[j])
        assert g.total_weight() == expected
        assert all(w >= 1 and x != y for (x, y), w in g.edges.items())
        assert {v for e in g.edges for v in e} <= set(g.nodes)


class TestPageRank:
    def test_symmetric_pair(self):
        r = topical_pagerank(TermGraph((0, 1), {(0, 1): 1, (1, 0): 1}))
        assert r.scores[0] == pytest.approx(0.5, abs=1e-12)
        assert r.scores[1] == pytest.approx(0.5, abs=1e-12)

    def test_single_edge_matches_oracle_and_closed_form(self):
        g = TermGraph((0, 1), {(0, 1): 1})
        r = topical_pagerank(g, damping=0.85)
        oracle = dense_pagerank(g.nodes, g.edges, [0.5, 0.5], 0.85)
        got = np.array([r.scores[0], r.scores[1]])
        assert np.abs(got - oracle).max() < 1e-8
        # r_a = 0.425 r_b + 0.075 with r_a + r_b = 1  ->  r_a = 20/57
        assert got[0] == pytest.approx(20 / 57, abs=1e-9)
        assert r.converged

    def test_zero_damping_returns_jump(self):
        g = TermGraph((0, 1, 2), {(0, 1): 2, (2, 0): 1})
        jump = np.array([0.2, 0.5, 0.3])
        r = topical_pagerank(g, jump, damping=0.0)
        assert [r.scores[v] for v in g.nodes] == jump.tolist()

    def test_empty_graph(self):
        r = topical_pagerank(TermGraph())
        assert r.scores == {}

    def test_mapping_jump(self):
        g = TermGraph((5, 9), {(5, 9): 1})
        a = topical_pagerank(g, {5: 0.3, 9: 0.7})
        b = topical_pagerank(g, [0.3, 0.7])
        assert a.scores == b.scores

    def test_max_iter_reported(self):
        g = TermGraph((0, 1, 2), {(0, 1): 1, (1, 2): 1, (2, 0): 1, (0, 2): 5})
        r = topical_pagerank(g, [0.9, 0.05, 0.05], max_iter=2)
        assert r.n_iter == 2 and not r.converged

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_oracle_uniform_jump(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng)
        n = len(g.nodes)
        r = topical_pagerank(g)
        got = np.array([r.scores[v] for v in g.nodes])
        oracle = dense_pagerank(g.nodes, g.edges, np.full(n, 1 / n), 0.85)
        assert np.abs(got - oracle).max() < 1e-8
        assert abs(got.sum() - 1) < 1e-9

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 1000))
    def test_weight_scaling_invariance(self, seed, c):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 20)
        scaled = TermGraph(g.nodes, {e: w * c for e, w in g.edges.items()})
        a = topical_pagerank(g)
        b = topical_pagerank(scaled)
        for v in g.nodes:
            assert a.scores[v] == pytest.approx(b.scores[v], abs=1e-9)


def model_with_phi(phi_row, tokens):
    vocab = Vocabulary.from_tokens(tokens)
    lex = EmotionLexicon.from_mapping({"x": ["unused"]})
    return EmotionTopicModel(np.array([phi_row]), np.array([1.0]), vocab, lex, {})


class TestJump:
    def test_uniform(self):
        m = model_with_phi([0.25] * 4, list("abcd"))
        np.testing.assert_allclose(topic_jump_vector(m, 0, (0, 1, 2, 3)), 0.25)

    def test_floor(self):
        m = model_with_phi([0.6, 0.4, 0.0], list("abc"))
        j = topic_jump_vector(m, 0, (0, 1, 2), floor=1e-6)
        assert j[2] == pytest.approx(1e-6 / (1 + 1e-6))
        assert j[2] > 0 and abs(j.sum() - 1) < 1e-12

    def test_hand_values(self):
        m = model_with_phi([0.5, 0.3, 0.2], list("abc"))
        np.testing.assert_allclose(topic_jump_vector(m, 0, (0, 1, 2)), [0.5, 0.3, 0.2], atol=1e-12)


class TestTopTerms:
    @pytest.fixture
    def vocab(self, lexicon):
        _, vocab = build_corpus([["哭", "地震", "孤儿", "[泪]", "房子"]], lexicon)
        return vocab

    def test_emotion_words_and_emoticons_excluded(self, vocab):
        scores = {vocab.id_of("哭"): 0.5, vocab.id_of("[泪]"): 0.2, vocab.id_of("地震"): 0.2,
                  vocab.id_of("孤儿"): 0.1}
        out = top_terms(TopicTermRanking(0, scores), vocab, 100)
        assert out == [vocab.id_of("地震"), vocab.id_of("孤儿")]

    def test_ties_by_id_and_truncation(self, vocab):
        scores = {vocab.id_of("房子"): 0.3, vocab.id_of("孤儿"): 0.3, vocab.id_of("地震"): 0.4}
        assert top_terms(TopicTermRanking(0, scores), vocab, 2) == [
            vocab.id_of("地震"), min(vocab.id_of("房子"), vocab.id_of("孤儿"))]


class TestKeyphrases:
    def test_frequency_counting(self):
        tweets = [(1, 2, 9)] * 7 + [(5, 6)]
        ph = generate_keyphrases(tweets, [1, 2, 5], {1: 0.2, 2: 0.1, 5: 0.1}, min_support=5, top_k=1)
        assert ph[0].tokens == (1, 2) and ph[0].frequency == 7

    def test_outside_token_excluded(self):
        counts = count_phrases([(1, 9, 2), (1, 9, 2)], [1, 2])
        assert counts == {}

    def test_score_ordering(self):
        # sums 0.1 vs 0.05, both frequency 3
        tweets = [(1, 2)] * 3 + [(3, 4)] * 3
        scores = {1: 0.06, 2: 0.04, 3: 0.03, 4: 0.02}
        ph = generate_keyphrases(tweets, [1, 2, 3, 4], scores, min_support=3, top_k=2)
        assert [p.tokens for p in ph] == [(1, 2), (3, 4)]
        assert ph[0].score == pytest.approx(0.1 * math.log(4))
        assert ph[1].score == pytest.approx(0.05 * math.log(4))

    def test_backfill_with_single_terms(self):
        tweets = [(1, 2)] * 3
        ph = generate_keyphrases(tweets, [1, 2, 3], {1: 0.5, 2: 0.3, 3: 0.2}, min_support=3, top_k=3)
        assert [p.tokens for p in ph] == [(1, 2), (1,), (2,)]

    def test_max_len(self):
        counts = count_phrases([(1, 2, 3, 4, 5)], [1, 2, 3, 4, 5], max_len=3)
        assert max(len(p) for p in counts) == 3
        assert len(counts) == 4 + 3

    def test_min_support_default(self):
        assert default_min_support(10) == 3
        assert default_min_support(20000) == 10


def test_assign_tweets_one_hot_and_ties():
    vocab = Vocabulary.from_tokens(["a", "b"])
    lex = EmotionLexicon.from_mapping({"x": ["p"], "y": ["q"], "z": ["r"]})
    model = EmotionTopicModel(np.full((3, 2), 0.5), np.full(3, 1 / 3), vocab, lex, {})
    groups = assign_tweets(model, [Tweet((0, 1))])
    assert groups[0] == [Tweet((0, 1))] and groups[1] == [] and groups[2] == []

    model.phi = np.array([[0.5, 0.5], [1.0, 0.0], [1.0, 0.0]])
    groups = assign_tweets(model, [Tweet((0, 1))])
    assert len(groups[0]) == 1


def test_detect_causes_invariants(mini_paths):
    from emocause.corpus import load_lexicon, read_corpus

    lex = load_lexicon(mini_paths["lexicon"])
    corpus, vocab = build_corpus(read_corpus(mini_paths["corpus"]), lex)
    model = train(corpus, vocab, lex, sweeps=100, seed=1)
    for threads in (1, 3):
        causes = detect_causes(model, corpus, threads=threads)
        for tc in causes:
            assert abs(sum(tc.ranking.scores.values()) - 1) < 1e-8
            assert len(tc.keyphrases) <= 10
            support = default_min_support(tc.n_tweets)
            for kp in tc.keyphrases:
                assert set(kp.tokens) <= set(tc.terms)
                if len(kp.tokens) > 1:
                    assert kp.frequency >= support
    soft = detect_causes(model, corpus, soft_assign=True)
    assert all(abs(sum(tc.ranking.scores.values()) - 1) < 1e-8 for tc in soft)
