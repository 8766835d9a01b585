"""Ranking metrics over annotated causes and the word co-occurrence baseline."""

from __future__ import annotations

import math
from collections import OrderedDict

from fractions import Fraction

import numpy as np

from .ctpr import generate_keyphrases

GAINS = ("linear", "exponential")


def _gain(rel, gain):
    if gain == "linear":
        return rel
    if gain == "exponential":
        return 2.0 ** rel - 1.0
    raise ValueError(f"gain must be one of {GAINS}, got {gain!r}")


def dcg_at_k(scores, k, gain="linear"):
    scores = list(scores)[:k]
    return sum(_gain(rel, gain) / math.log2(i + 2) for i, rel in enumerate(scores))


def ndcg_at_k(scores, k, gain="linear"):
    """NDCG of gold scores given in presented order.

    The ideal ordering is the same scores sorted descending; returns 0 when
    the ideal DCG is 0.

    >>> round(ndcg_at_k([1, 3], 2), 4)
    0.7967
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = [float(s) for s in scores]
    if not scores:
        raise ValueError("empty score list")
    idcg = dcg_at_k(sorted(scores, reverse=True), k, gain)
    if idcg == 0:
        return 0.0
    return dcg_at_k(scores, k, gain) / idcg


def average_precision(ranked, relevant):
    """Mean of precision@rank over relevant ranks, divided by |relevant|."""
    relevant = set(relevant)
    if not relevant:
        return 0.0
    hits = 0
    total = Fraction(0)
    seen = set()
    for i, item in enumerate(ranked, 1):
        if item in relevant and item not in seen:
            seen.add(item)
            hits += 1
            total += Fraction(hits, i)
    return float(total / len(relevant))


def mean_average_precision(rankings, gold):
    """Mean AP over the emotions in ``gold``; missing rankings score 0."""
    if not gold:
        return 0.0
    return float(np.mean([average_precision(rankings.get(e, []), rel) for e, rel in gold.items()]))


def load_annotations(path):
    """Read ``emotion<TAB>cause<TAB>s1,s2,...`` into emotion -> {cause: scores}.

    Repeated causes under one emotion are merged by exact surface match.
    """
    out = OrderedDict()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            emotion, cause, raw = parts
            scores = [int(s) for s in raw.split(",") if s.strip()]
            if not scores or any(s < 1 or s > 5 for s in scores):
                raise ValueError(f"{path}:{lineno}: scores must be integers in 1..5")
            out.setdefault(emotion, OrderedDict()).setdefault(cause, []).extend(scores)
    return out


def mean_scores(annotations):
    return {e: {c: float(np.mean(s)) for c, s in causes.items()} for e, causes in annotations.items()}


def gold_sets(mean, n=10):
    """Top-``n`` causes per emotion by mean score; ties at the cutoff all count."""
    out = {}
    for e, causes in mean.items():
        ordered = sorted(causes.values(), reverse=True)
        if not ordered:
            out[e] = set()
            continue
        cutoff = ordered[min(n, len(ordered)) - 1]
        out[e] = {c for c, s in causes.items() if s >= cutoff}
    return out


def evaluate_rankings(rankings, annotations, ks=(5, 10), gain="linear", n_gold=10):
    """Per-emotion NDCG@k and AP plus overall MAP for one method.

    ``rankings`` maps emotion -> ranked cause strings. Causes nobody
    annotated count with gold score 0.
    """
    mean = mean_scores(annotations)
    gold = gold_sets(mean, n_gold)
    rows = []
    for e in mean:
        ranked = rankings.get(e, [])
        rels = [mean[e].get(c, 0.0) for c in ranked]
        ndcgs = {k: ndcg_at_k(rels, k, gain) if rels else 0.0 for k in ks}
        rows.append((e, ndcgs, average_precision(ranked, gold[e])))
    return rows, mean_average_precision(rankings, gold)


def cooccurrence_counts(corpus, vocab, lexicon, k):
    """Per word: number of tweets where it appears with an emotion word of ``k``."""
    counts = np.zeros(len(vocab), dtype=np.int64)
    for tweet in corpus:
        toks = set(tweet.tokens)
        if any(vocab.emotion_of[w] == k for w in toks):
            for w in toks:
                counts[w] += 1
    return counts


def cooccurrence_baseline(corpus, vocab, lexicon, k, top_k=100):
    """Non-emotional, non-emoticon words ranked by co-occurrence with emotion ``k``.

    Returns ``(token_id, count)`` pairs with count > 0, ties by token id.
    """
    counts = cooccurrence_counts(corpus, vocab, lexicon, k)
    eligible = [w for w in range(len(vocab))
                if counts[w] > 0 and vocab.emotion_of[w] is None and not vocab.is_emoticon[w]]
    eligible.sort(key=lambda w: (-counts[w], w))
    return [(w, int(counts[w])) for w in eligible[:top_k]]


def cooccurrence_causes(corpus, vocab, lexicon, k, top_n=100, max_len=4, min_support=3, top_k=10):
    """Keyphrases built from the baseline's top terms, scored by normalised counts."""
    ranked = cooccurrence_baseline(corpus, vocab, lexicon, k, top_n)
    if not ranked:
        return []
    total = float(sum(c for _, c in ranked))
    scores = {w: c / total for w, c in ranked}
    return generate_keyphrases(corpus.tweets, [w for w, _ in ranked], scores, max_len, min_support, top_k)
