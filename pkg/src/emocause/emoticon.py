"""Emoticon-emotion relevance and the global-mean threshold rule."""

from __future__ import annotations

from dataclasses import dataclass

from fractions import Fraction

import numpy as np

from .exceptions import EmoCauseError

DEFAULT_P = 0.6


class NoEmoticonsError(EmoCauseError, ValueError):
    pass


@dataclass
class RelevanceMatrix:
    """``values[k, n]``: relevance of emoticon ``emoticon_ids[n]`` to emotion ``k``."""

    values: np.ndarray
    emoticon_ids: list

    @property
    def shape(self):
        return self.values.shape


def relevance_matrix(model, vocab=None, source: str = "phi", rankings=None) -> RelevanceMatrix:
    """Relevance of each emoticon to each emotion topic.

    ``source="phi"`` copies the topic-word probabilities. ``"pagerank"``
    reads each topic's term ranking instead (``rankings[k].scores``);
    emoticons absent from a topic graph get 0.
    """
    vocab = model.vocab if vocab is None else vocab
    ids = vocab.emoticon_ids()
    if not ids:
        raise NoEmoticonsError("vocabulary contains no emoticons")
    if source == "phi":
        values = model.phi[:, ids].copy()
    elif source == "pagerank":
        if rankings is None:
            raise ValueError("source='pagerank' needs per-topic rankings")
        values = np.array([[r.scores.get(i, 0.0) for i in ids] for r in rankings])
    else:
        raise ValueError(f"unknown relevance source {source!r}")
    return RelevanceMatrix(values, ids)


def compute_threshold(R, p: float = DEFAULT_P) -> float:
    """p times the mean relevance over all K*N emotion-emoticon cells."""
    if p <= 0:
        raise ValueError("p must be positive")
    values = R.values if isinstance(R, RelevanceMatrix) else np.asarray(R, dtype=float)
    if values.size == 0:
        return 0.0
    # exact rational mean, so a constant matrix yields exactly p * c
    total = sum(map(Fraction, values.ravel().tolist()), Fraction(0))
    return p * float(total / values.size)


def related_emoticons(R, threshold: float) -> dict:
    """Per emotion, emoticons strictly above ``threshold`` by descending relevance.

    Entries are ``(emoticon_id, relevance)``; ties go to the lower id. With
    a bare array the column index stands in for the id.
    """
    if isinstance(R, RelevanceMatrix):
        values, ids = R.values, np.asarray(R.emoticon_ids)
    else:
        values = np.asarray(R, dtype=float)
        ids = np.arange(values.shape[1])
    out = {}
    for k, row in enumerate(values):
        hit = np.flatnonzero(row > threshold)
        order = hit[np.lexsort((ids[hit], -row[hit]))]
        out[k] = [(int(ids[n]), float(row[n])) for n in order]
    return out
