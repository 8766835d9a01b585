"""Synthetic tweet corpora with a known generating model."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import EmotionLexicon, write_lexicon
from .exceptions import ConfigError


@dataclass
class SyntheticGroundTruth:
    """Generating parameters. ``phi`` columns follow ``tokens``."""

    tokens: list
    phi: np.ndarray
    theta: np.ndarray
    labels: np.ndarray
    emotion_words: list
    emoticons: list

    def phi_for(self, vocab) -> np.ndarray:
        """``phi`` with columns reordered to ``vocab`` ids (absent words dropped)."""
        col = {t: i for i, t in enumerate(self.tokens)}
        return self.phi[:, [col[t] for t in vocab.tokens]]

    def to_json(self) -> dict:
        return dict(tokens=self.tokens, phi=self.phi.tolist(), theta=self.theta.tolist(),
                    labels=self.labels.tolist(), emotion_words=self.emotion_words,
                    emoticons=self.emoticons)

    @classmethod
    def from_json(cls, data):
        return cls(data["tokens"], np.array(data["phi"]), np.array(data["theta"]),
                   np.array(data["labels"]), data["emotion_words"], data["emoticons"])


def synth_corpus(K=3, V=60, n_tweets=2000, tweet_len=8, seeds_per_topic=2, seed=0,
                 emoticons_per_topic=1, theta_concentration=5.0, noise=False):
    """Draw a corpus from K disjoint word blocks.

    Each topic owns ``seeds_per_topic`` emotion words and a block of the
    remaining vocabulary holding ``emoticons_per_topic`` emoticons. Word
    weights inside a topic follow 1/rank over a random permutation. A tweet
    picks its topic from theta, places one of the topic's emotion words at
    a random position and fills the other ``tweet_len - 1`` slots from the
    topic's word distribution. ``phi`` in the ground truth is the exact
    per-token marginal of that process.

    With ``noise=True`` some lines also carry mentions and links that the
    preprocessing step removes.

    Returns ``(lines, lexicon, truth)``; lines are space-joined strings.
    """
    if K < 1 or seeds_per_topic < 1 or tweet_len < 2:
        raise ConfigError("need K >= 1, seeds_per_topic >= 1 and tweet_len >= 2")
    if V < K * seeds_per_topic + 10:
        raise ConfigError(f"V={V} too small: need V >= K*seeds_per_topic + 10")
    if n_tweets < K:
        raise ConfigError("n_tweets must be >= K")
    block = (V - K * seeds_per_topic) // K
    if block < emoticons_per_topic + 2:
        raise ConfigError("vocabulary blocks too small for the requested emoticons")

    rng = np.random.default_rng(seed)
    tokens, emotion_words, emoticons, topic_cols = [], [], [], []
    rest = V - K * seeds_per_topic - K * block
    for k in range(K):
        seeds = [f"emo{k}_{j}" for j in range(seeds_per_topic)]
        icons = [f"[icon{k}_{j}]" for j in range(emoticons_per_topic)]
        n_plain = block - emoticons_per_topic + (1 if k < rest else 0)
        plain = [f"w{k}_{j}" for j in range(n_plain)]
        start = len(tokens)
        tokens.extend(seeds + icons + plain)
        topic_cols.append(list(range(start, len(tokens))))
        emotion_words.append(seeds)
        emoticons.append(icons)

    base = np.zeros((K, V))
    for k, cols in enumerate(topic_cols):
        weights = 1.0 / np.arange(1, len(cols) + 1)
        base[k, rng.permutation(cols)] = weights
        base[k] /= base[k].sum()
    seed_dist = np.zeros((K, V))
    for k, cols in enumerate(topic_cols):
        seed_dist[k, cols[:seeds_per_topic]] = 1.0 / seeds_per_topic
    phi = seed_dist / tweet_len + base * (tweet_len - 1) / tweet_len

    theta = rng.dirichlet(np.full(K, theta_concentration))
    labels = rng.choice(K, size=n_tweets, p=theta)
    lines = []
    for z in labels:
        words = list(rng.choice(V, size=tweet_len - 1, p=base[z]))
        pos = int(rng.integers(tweet_len))
        words.insert(pos, topic_cols[z][int(rng.integers(seeds_per_topic))])
        toks = [tokens[w] for w in words]
        if noise:
            r = rng.random()
            if r < 0.2:
                toks.insert(0, f"@user{int(rng.integers(50))}")
            elif r < 0.3:
                toks.append(f"http://t.cn/{int(rng.integers(10 ** 6)):06d}")
        lines.append(" ".join(toks))

    lexicon = EmotionLexicon.from_mapping({f"emotion{k}": emotion_words[k] for k in range(K)})
    truth = SyntheticGroundTruth(tokens, phi, theta, labels, emotion_words, emoticons)
    return lines, lexicon, truth


def write_synth(out_dir, **params):
    """Write ``corpus.txt``, ``lexicon.tsv`` and ``truth.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines, lexicon, truth = synth_corpus(**params)
    (out / "corpus.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    write_lexicon(lexicon, out / "lexicon.tsv")
    (out / "truth.json").write_text(json.dumps(truth.to_json()), encoding="utf-8")
    return out / "corpus.txt", out / "lexicon.tsv", truth
