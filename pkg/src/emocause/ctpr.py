"""Topical PageRank over term-precedence graphs and keyphrase generation."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse

from .corpus import Tweet, Vocabulary
from .tsbtm import EmotionTopicModel, infer_tweet_topics

DEFAULT_DAMPING = 0.85
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
JUMP_FLOOR = 1e-6


def _tokens(tweet):
    return tweet.tokens if isinstance(tweet, Tweet) else tuple(tweet)


@dataclass
class TermGraph:
    """Directed term graph; ``edges[(x, y)]`` counts how often y preceded x."""

    nodes: tuple = ()
    edges: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.nodes)

    def total_weight(self):
        return sum(self.edges.values())


@dataclass
class TopicTermRanking:
    topic_id: Optional[int]
    scores: dict
    n_iter: int = 0
    converged: bool = True

    def score(self, w):
        return self.scores.get(w, 0.0)


@dataclass(frozen=True)
class Keyphrase:
    tokens: tuple
    frequency: int
    score: float


def assign_tweets(model: EmotionTopicModel, corpus, soft: bool = False):
    """Group tweets under their most probable topic (ties to the lowest id).

    With ``soft=True`` every tweet is listed under every topic together with
    its weight P(k | tweet); entries are ``(tweet, weight)`` pairs then.
    """
    groups = {k: [] for k in range(model.n_topics)}
    for tweet in corpus:
        p = infer_tweet_topics(model, tweet)
        if soft:
            for k in np.flatnonzero(p > 0):
                groups[int(k)].append((tweet, float(p[k])))
        else:
            groups[int(np.argmax(p))].append(tweet)
    return groups


def build_term_graph(tweets, window: int = 1, weights=None) -> TermGraph:
    """Edge x -> y gains one unit per occurrence of y within ``window``
    positions before x. ``weights`` optionally scales each tweet's counts."""
    if window < 1:
        raise ValueError("window must be >= 1")
    edges = defaultdict(float if weights is not None else int)
    nodes = set()
    for t, tweet in enumerate(tweets):
        toks = _tokens(tweet)
        unit = 1 if weights is None else weights[t]
        nodes.update(toks)
        for i in range(1, len(toks)):
            x = toks[i]
            for j in range(max(0, i - window), i):
                y = toks[j]
                if x != y:
                    edges[(x, y)] += unit
    return TermGraph(tuple(sorted(nodes)), dict(edges))


def topic_jump_vector(model: EmotionTopicModel, k: int, nodes, floor: float = JUMP_FLOOR) -> np.ndarray:
    """Jump distribution over ``nodes`` proportional to max(phi[k][w], floor)."""
    raw = np.maximum(model.phi[k, list(nodes)], floor)
    return raw / raw.sum()


def topical_pagerank(graph: TermGraph, jump=None, damping: float = DEFAULT_DAMPING,
                     tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                     topic_id: Optional[int] = None) -> TopicTermRanking:
    """Power iteration r <- d * P^T r + d * (dangling mass) * jump + (1 - d) * jump.

    ``P`` is the row-normalised weight matrix, so a node spreads its score
    over its out-edges in proportion to their weights. ``jump`` is aligned
    with ``graph.nodes`` or given as a mapping node -> weight; uniform if
    omitted. Stops when the L-infinity change drops below ``tol``.
    """
    nodes = graph.nodes
    n = len(nodes)
    if n == 0:
        return TopicTermRanking(topic_id, {}, 0, True)
    if not 0 <= damping < 1:
        raise ValueError("damping must lie in [0, 1)")
    if jump is None:
        jump = np.full(n, 1.0 / n)
    elif isinstance(jump, Mapping):
        jump = np.array([jump[v] for v in nodes], dtype=float)
    else:
        jump = np.asarray(jump, dtype=float)
    if jump.shape != (n,) or (jump < 0).any():
        raise ValueError("jump must be a non-negative vector over the graph nodes")

    index = {v: i for i, v in enumerate(nodes)}
    if graph.edges:
        rows, cols, vals = zip(*((index[x], index[y], w) for (x, y), w in graph.edges.items()))
        W = sparse.csr_matrix((np.asarray(vals, dtype=float), (rows, cols)), shape=(n, n))
    else:
        W = sparse.csr_matrix((n, n))
    out = np.asarray(W.sum(axis=1)).ravel()
    dangling = out == 0
    inv = np.zeros(n)
    inv[~dangling] = 1.0 / out[~dangling]
    PT = (sparse.diags(inv) @ W).T.tocsr()

    r = jump.copy()
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        r_new = damping * (PT @ r) + (damping * r[dangling].sum()) * jump + (1.0 - damping) * jump
        delta = np.abs(r_new - r).max()
        r = r_new
        if delta < tol:
            converged = True
            break
    return TopicTermRanking(topic_id, {v: float(r[i]) for i, v in enumerate(nodes)}, it, converged)


def top_terms(ranking: TopicTermRanking, vocab: Vocabulary, n: int = 100) -> list:
    """Highest-ranked terms that are neither emotion words nor emoticons."""
    eligible = [w for w in ranking.scores
                if vocab.emotion_of[w] is None and not vocab.is_emoticon[w]]
    eligible.sort(key=lambda w: (-ranking.scores[w], w))
    return eligible[:n]


def default_min_support(n_topic_tweets: int) -> float:
    return max(3.0, 0.0005 * n_topic_tweets)


def count_phrases(tweets, terms, max_len: int = 4) -> Counter:
    """Occurrences of every contiguous run of 2..max_len tokens from ``terms``."""
    allowed = set(terms)
    counts = Counter()
    for tweet in tweets:
        toks = _tokens(tweet)
        n = len(toks)
        for i in range(n):
            if toks[i] not in allowed:
                continue
            for j in range(i + 1, min(n, i + max_len)):
                if toks[j] not in allowed:
                    break
                counts[toks[i:j + 1]] += 1
    return counts


def generate_keyphrases(tweets, terms, ranking, max_len: int = 4, min_support: float = 3,
                        top_k: int = 10) -> list:
    """Frequent multiword runs of top terms, scored by
    (sum of token scores) * ln(1 + frequency).

    If fewer than ``top_k`` phrases qualify, single terms follow in the
    order of ``terms``. ``ranking`` is a TopicTermRanking or a mapping.
    """
    scores = ranking.scores if isinstance(ranking, TopicTermRanking) else ranking
    counts = count_phrases(tweets, terms, max_len)
    phrases = [Keyphrase(p, f, sum(scores.get(w, 0.0) for w in p) * math.log1p(f))
               for p, f in counts.items() if f >= min_support]
    phrases.sort(key=lambda kp: (-kp.score, kp.tokens))
    phrases = phrases[:top_k]
    if len(phrases) < top_k:
        unigram = Counter()
        for tweet in tweets:
            unigram.update(_tokens(tweet))
        for w in terms:
            if len(phrases) >= top_k:
                break
            f = unigram[w]
            phrases.append(Keyphrase((w,), f, scores.get(w, 0.0) * math.log1p(f)))
    return phrases


@dataclass
class TopicCauses:
    topic_id: int
    n_tweets: int
    ranking: TopicTermRanking
    terms: list
    keyphrases: list


def _topic_causes(model, corpus, groups, k, window, damping, tol, max_iter, top_n,
                  max_len, min_support, top_k, soft):
    members = groups[k]
    if soft:
        tweets = [t for t, _ in members]
        graph = build_term_graph(tweets, window, weights=[w for _, w in members])
        n_tweets = int(round(sum(w for _, w in members)))
    else:
        tweets = members
        graph = build_term_graph(tweets, window)
        n_tweets = len(tweets)
    jump = topic_jump_vector(model, k, graph.nodes) if graph.nodes else None
    ranking = topical_pagerank(graph, jump, damping, tol, max_iter, topic_id=k)
    terms = top_terms(ranking, model.vocab, top_n)
    support = default_min_support(n_tweets) if min_support is None else min_support
    phrases = generate_keyphrases(corpus.tweets, terms, ranking, max_len, support, top_k) if terms else []
    return TopicCauses(k, n_tweets, ranking, terms, phrases)


def detect_causes(model: EmotionTopicModel, corpus, *, window: int = 1,
                  damping: float = DEFAULT_DAMPING, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER, top_n: int = 100, max_len: int = 4,
                  min_support: Optional[float] = None, top_k: int = 10,
                  soft_assign: bool = False, threads: int = 1) -> list:
    """Rank terms and emit keyphrases for every emotion topic.

    Phrase frequencies are counted over the whole corpus; ``min_support``
    defaults to max(3, 0.0005 * tweets assigned to the topic).
    """
    groups = assign_tweets(model, corpus, soft=soft_assign)
    args = (window, damping, tol, max_iter, top_n, max_len, min_support, top_k, soft_assign)
    topics = range(model.n_topics)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda k: _topic_causes(model, corpus, groups, k, *args), topics))
    return [_topic_causes(model, corpus, groups, k, *args) for k in topics]
