"""Biterm topic model with emotion-word topic supervision.

Every lexicon word is pinned to its emotion's topic: a biterm holding an
emotion word may only be assigned to that word's topic, so topic ``k``
describes emotion ``k``. Training is collapsed Gibbs sampling over biterms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import (Corpus, EmotionEntry, EmotionLexicon, Tweet, Vocabulary,
                     build_corpus, extract_biterms)
from .exceptions import ConfigError, EmptyCorpusError, ModelFormatError
from ._validation import check_documents, check_lexicon

MODEL_FORMAT = "emocause-model"
MODEL_FORMAT_VERSION = 1


def allowed_topics(b, vocab: Vocabulary, n_topics: int) -> tuple:
    """Topics a biterm may take under the emotion-word constraint.

    Unconstrained pairs may take any topic; a pair with one emotion word is
    locked to that word's emotion; two emotion words of different emotions
    give the union of both owners.
    """
    owners = {vocab.emotion_of[w] for w in b if vocab.emotion_of[w] is not None}
    if not owners:
        return tuple(range(n_topics))
    return tuple(sorted(owners))


def allowed_mask(biterms, vocab: Vocabulary, n_topics: int) -> np.ndarray:
    mask = np.zeros((len(biterms), n_topics), dtype=np.uint8)
    for i, b in enumerate(biterms):
        mask[i, list(allowed_topics(b, vocab, n_topics))] = 1
    return mask


@dataclass
class SamplerState:
    z: np.ndarray
    n_z: np.ndarray
    n_wz: np.ndarray
    rng_seed: int
    sweep: int = 0
    rng: np.random.Generator = field(default=None, repr=False)

    @property
    def n_topics(self):
        return self.n_z.shape[0]

    @property
    def n_words(self):
        return self.n_wz.shape[1]

    def check_invariants(self, vocab: Optional[Vocabulary] = None, biterms=None) -> None:
        """Assert the count invariants.

        With ``vocab``, emotion-word counts outside their own topic must be
        exactly the ones contributed by conflicting biterms (two emotion
        words of different emotions) when ``biterms`` is given, else zero.
        """
        assert self.n_z.sum() == len(self.z)
        assert np.array_equal(self.n_wz.sum(axis=1), 2 * self.n_z)
        assert (self.n_z >= 0).all() and (self.n_wz >= 0).all()
        if vocab is None:
            return
        leaks = np.zeros_like(self.n_wz)
        if biterms is not None:
            for (w1, w2), k in zip(biterms, self.z):
                for w in (w1, w2):
                    owner = vocab.emotion_of[w]
                    if owner is not None and owner != k:
                        leaks[k, w] += 1
        for w in vocab.emotion_word_ids():
            k = vocab.emotion_of[w]
            foreign = np.delete(self.n_wz[:, w] - leaks[:, w], k)
            assert not foreign.any(), f"emotion word {w} counted outside topic {k}"


def init_state(biterms: np.ndarray, mask: np.ndarray, n_words: int, seed: int) -> SamplerState:
    """Random initial assignment, uniform over each biterm's allowed topics."""
    n_topics = mask.shape[1]
    rng = np.random.default_rng(seed)
    n_b = len(biterms)
    z = np.empty(n_b, dtype=np.int64)
    n_z = np.zeros(n_topics, dtype=np.int64)
    n_wz = np.zeros((n_topics, n_words), dtype=np.int64)
    u = rng.random(n_b)
    for i in range(n_b):
        choices = np.flatnonzero(mask[i])
        k = int(choices[int(u[i] * len(choices))])
        z[i] = k
        n_z[k] += 1
        n_wz[k, biterms[i, 0]] += 1
        n_wz[k, biterms[i, 1]] += 1
    return SamplerState(z, n_z, n_wz, seed, 0, rng)


def conditional(state: SamplerState, b, allowed, alpha: float, beta: float) -> np.ndarray:
    """Unnormalised assignment weights for ``b``; counts must exclude ``b``.

    weight(k) = (n_z + alpha)(n_w1z + beta)(n_w2z + beta) / (2 n_z + V beta)^2,
    and zero outside ``allowed``.
    """
    w1, w2 = b
    n_z = state.n_z.astype(float)
    denom = 2.0 * n_z + state.n_words * beta
    weights = (n_z + alpha) * (state.n_wz[:, w1] + beta) * (state.n_wz[:, w2] + beta) / (denom * denom)
    keep = np.zeros(state.n_topics, dtype=bool)
    keep[list(allowed)] = True
    weights[~keep] = 0.0
    return weights


@njit(cache=True)
def _sweep_kernel(biterms, mask, z, n_z, n_wz, alpha, beta, u):
    n_topics = n_z.shape[0]
    v_beta = n_wz.shape[1] * beta
    weights = np.empty(n_topics)
    for i in range(biterms.shape[0]):
        w1 = biterms[i, 0]
        w2 = biterms[i, 1]
        k_old = z[i]
        n_z[k_old] -= 1
        n_wz[k_old, w1] -= 1
        n_wz[k_old, w2] -= 1
        total = 0.0
        for k in range(n_topics):
            if mask[i, k]:
                d = 2.0 * n_z[k] + v_beta
                wk = (n_z[k] + alpha) * (n_wz[k, w1] + beta) * (n_wz[k, w2] + beta) / (d * d)
            else:
                wk = 0.0
            weights[k] = wk
            total += wk
        target = u[i] * total
        k_new = -1
        acc = 0.0
        for k in range(n_topics):
            if weights[k] > 0.0:
                acc += weights[k]
                k_new = k
                if acc > target:
                    break
        z[i] = k_new
        n_z[k_new] += 1
        n_wz[k_new, w1] += 1
        n_wz[k_new, w2] += 1


def gibbs_sweep(state: SamplerState, biterms: np.ndarray, mask: np.ndarray,
                alpha: float, beta: float) -> SamplerState:
    """Resample every biterm once, in stored order; mutates and returns ``state``.

    One uniform variate per biterm is drawn from the state's generator up
    front, then each biterm picks the first topic whose cumulative weight
    exceeds ``u * total``.
    """
    u = state.rng.random(len(biterms))
    _sweep_kernel(biterms, mask, state.z, state.n_z, state.n_wz, float(alpha), float(beta), u)
    state.sweep += 1
    return state


def estimate_phi(n_wz: np.ndarray, beta: float, vocab: Vocabulary) -> np.ndarray:
    n_topics, n_words = n_wz.shape
    phi = (n_wz + beta) / (n_wz.sum(axis=1, keepdims=True) + n_words * beta)
    for w in vocab.emotion_word_ids():
        k = vocab.emotion_of[w]
        if k < n_topics:
            keep = phi[k, w]
            phi[:, w] = 0.0
            phi[k, w] = keep
    return phi / phi.sum(axis=1, keepdims=True)


def estimate_theta(n_z: np.ndarray, alpha: float) -> np.ndarray:
    n_topics = n_z.shape[0]
    return (n_z + alpha) / (n_z.sum() + n_topics * alpha)


@dataclass
class EmotionTopicModel:
    """Fitted topic-word matrix ``phi`` (K x V) and corpus topic vector ``theta``."""

    phi: np.ndarray
    theta: np.ndarray
    vocab: Vocabulary
    lexicon: EmotionLexicon
    config: dict = field(default_factory=dict)

    @property
    def n_topics(self):
        return self.phi.shape[0]

    def top_words(self, k: int, n: int = 10) -> list:
        order = np.lexsort((np.arange(self.phi.shape[1]), -self.phi[k]))[:n]
        return [self.vocab.tokens[i] for i in order]

    def save(self, path) -> None:
        save_model(self, path)


def _resolve_alpha(alpha, n_topics):
    return 50.0 / n_topics if alpha is None else float(alpha)


def prepare_biterms(corpus: Corpus, vocab: Vocabulary, n_topics: int,
                    window: Optional[int] = None, conflict_policy: str = "union"):
    """Stack corpus biterms and their allowed-topic masks."""
    if conflict_policy not in ("union", "drop"):
        raise ConfigError(f"conflict_policy must be 'union' or 'drop', got {conflict_policy!r}")
    pairs = []
    for tweet in corpus.tweets:
        pairs.extend(extract_biterms(tweet, window))
    mask = allowed_mask(pairs, vocab, n_topics)
    if conflict_policy == "drop" and len(pairs):
        owners = np.array([[vocab.emotion_of[w] is not None for w in b] for b in pairs])
        keep = ~((mask.sum(axis=1) > 1) & owners.all(axis=1))
        pairs = [b for b, k in zip(pairs, keep) if k]
        mask = mask[keep]
    biterms = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return biterms, mask


def train(corpus: Corpus, vocab: Vocabulary, lexicon: EmotionLexicon, *, alpha=None,
          beta=0.01, sweeps=1000, burn_in=0, seed=0, conflict_policy="union",
          estimate="final", biterm_window=None, callback=None) -> EmotionTopicModel:
    """Fit the supervised biterm model by collapsed Gibbs sampling.

    With ``estimate="final"`` phi and theta come from the last sweep's
    counts; ``"average"`` averages the estimates of all sweeps after
    ``burn_in``. ``callback(state)`` is called after every sweep.
    """
    n_topics = lexicon.n_emotions
    alpha = _resolve_alpha(alpha, n_topics)
    if estimate not in ("final", "average"):
        raise ConfigError(f"estimate must be 'final' or 'average', got {estimate!r}")
    if sweeps < 1:
        raise ConfigError("sweeps must be >= 1")
    if not 0 <= burn_in < sweeps and estimate == "average":
        raise ConfigError("burn_in must lie in [0, sweeps) when averaging")
    if alpha <= 0 or beta <= 0:
        raise ConfigError("alpha and beta must be positive")

    biterms, mask = prepare_biterms(corpus, vocab, n_topics, biterm_window, conflict_policy)
    if len(biterms) == 0:
        raise EmptyCorpusError("corpus yields no biterms")

    state = init_state(biterms, mask, len(vocab), seed)
    phi_sum = theta_sum = None
    n_avg = 0
    for _ in range(sweeps):
        gibbs_sweep(state, biterms, mask, alpha, beta)
        if callback is not None:
            callback(state)
        if estimate == "average" and state.sweep > burn_in:
            phi_k = estimate_phi(state.n_wz, beta, vocab)
            theta_k = estimate_theta(state.n_z, alpha)
            phi_sum = phi_k if phi_sum is None else phi_sum + phi_k
            theta_sum = theta_k if theta_sum is None else theta_sum + theta_k
            n_avg += 1

    if estimate == "average":
        phi = phi_sum / n_avg
        phi /= phi.sum(axis=1, keepdims=True)
        theta = theta_sum / n_avg
        theta /= theta.sum()
    else:
        phi = estimate_phi(state.n_wz, beta, vocab)
        theta = estimate_theta(state.n_z, alpha)

    config = dict(alpha=alpha, beta=beta, sweeps=sweeps, burn_in=burn_in, seed=seed,
                  conflict_policy=conflict_policy, estimate=estimate,
                  biterm_window=biterm_window, n_biterms=int(len(biterms)))
    return EmotionTopicModel(phi, theta, vocab, lexicon, config)


def infer_tweet_topics(model: EmotionTopicModel, tweet) -> np.ndarray:
    """P(k | tweet) = sum_b P(k | b) P(b | tweet), P(b | tweet) uniform.

    A tweet without biterms falls back to P(k | w) for its single word.
    """
    toks = tweet.tokens if isinstance(tweet, Tweet) else tuple(tweet)
    theta, phi = model.theta, model.phi
    biterms = extract_biterms(toks, model.config.get("biterm_window"))
    if biterms:
        b = np.asarray(biterms)
        p_kb = theta[:, None] * phi[:, b[:, 0]] * phi[:, b[:, 1]]
        col = p_kb.sum(axis=0)
        ok = col > 0
        if not ok.any():
            return theta.copy()
        p = (p_kb[:, ok] / col[ok]).sum(axis=1)
    elif toks:
        p = theta * phi[:, toks[0]]
    else:
        return theta.copy()
    s = p.sum()
    return p / s if s > 0 else theta.copy()


def save_model(model: EmotionTopicModel, path) -> None:
    """Write theta and phi as TSV.

    Layout, one record per line, fields tab-separated::

        #format  emocause-model  1
        #K  <K>
        #V  <V>
        #config  <json>
        emotion  <k>  <name>  <comma-separated words>
        vocab  <surface_0> ... <surface_V-1>
        theta  <theta_0> ... <theta_K-1>
        phi  <k>  <phi_k0> ... <phi_kV-1>      (K lines, row-major)

    Floats use Python's shortest round-trip repr, so a reload is exact.
    """
    lines = [f"#format\t{MODEL_FORMAT}\t{MODEL_FORMAT_VERSION}",
             f"#K\t{model.n_topics}",
             f"#V\t{len(model.vocab)}",
             "#config\t" + json.dumps(model.config, sort_keys=True)]
    for e in model.lexicon.entries:
        lines.append(f"emotion\t{e.emotion_id}\t{e.name}\t{','.join(sorted(e.words))}")
    lines.append("vocab\t" + "\t".join(model.vocab.tokens))
    lines.append("theta\t" + "\t".join(repr(float(x)) for x in model.theta))
    for k, row in enumerate(model.phi):
        lines.append(f"phi\t{k}\t" + "\t".join(repr(float(x)) for x in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> EmotionTopicModel:
    header, emotions, tokens, theta, phi_rows = {}, [], None, None, {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            tag = parts[0]
            if tag.startswith("#"):
                header[tag[1:]] = parts[1:]
            elif tag == "emotion":
                emotions.append(EmotionEntry(int(parts[1]), parts[2], frozenset(parts[3].split(","))))
            elif tag == "vocab":
                tokens = parts[1:]
            elif tag == "theta":
                theta = np.array([float(x) for x in parts[1:]])
            elif tag == "phi":
                phi_rows[int(parts[1])] = [float(x) for x in parts[2:]]
            else:
                raise ModelFormatError(f"{path}: unknown record {tag!r}")
    if header.get("format", [None])[0] != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not an {MODEL_FORMAT} file")
    n_topics, n_words = int(header["K"][0]), int(header["V"][0])
    lexicon = EmotionLexicon(tuple(emotions))
    vocab = Vocabulary.from_tokens(tokens or [], lexicon)
    phi = np.array([phi_rows[k] for k in range(n_topics)])
    if phi.shape != (n_topics, n_words) or theta is None or theta.shape != (n_topics,):
        raise ModelFormatError(f"{path}: dimensions disagree with header K={n_topics} V={n_words}")
    return EmotionTopicModel(phi, theta, vocab, lexicon, json.loads(header["config"][0]))


class TopicSupervisedBTM(BaseEstimator, TransformerMixin):
    """Biterm topic model whose K topics are pinned to the lexicon's K emotions.

    Parameters
    ----------
    lexicon : EmotionLexicon or dict
        Emotion name -> seed words. Fixes the number of topics.
    alpha : float, optional
        Dirichlet prior on topic proportions, defaults to 50/K.
    beta : float
        Dirichlet prior on topic-word distributions.
    n_sweeps : int
        Number of Gibbs sweeps over all biterms.
    burn_in : int
        Sweeps skipped before averaging (``estimate="average"`` only).
    estimate : {"final", "average"}
    conflict_policy : {"union", "drop"}
        Treatment of biterms joining emotion words of two different emotions.
    biterm_window : int, optional
        Maximum position distance inside a biterm; ``None`` pairs the whole tweet.
    random_state : int

    Attributes
    ----------
    model_ : EmotionTopicModel
    components_ : ndarray of shape (K, V)
        Same as ``model_.phi``.
    theta_ : ndarray of shape (K,)
    vocabulary_ : Vocabulary
    corpus_ : Corpus
        Training tweets that survived the emotion-word filter.
    """

    def __init__(self, lexicon=None, alpha=None, beta=0.01, n_sweeps=1000, burn_in=0,
                 estimate="final", conflict_policy="union", biterm_window=None,
                 random_state=0):
        self.lexicon = lexicon
        self.alpha = alpha
        self.beta = beta
        self.n_sweeps = n_sweeps
        self.burn_in = burn_in
        self.estimate = estimate
        self.conflict_policy = conflict_policy
        self.biterm_window = biterm_window
        self.random_state = random_state

    def fit(self, X, y=None):
        """Fit on ``X``, a list of token lists (already preprocessed)."""
        lexicon = check_lexicon(self.lexicon)
        docs = check_documents(X)
        corpus, vocab = build_corpus(docs, lexicon)
        seed = 0 if self.random_state is None else int(self.random_state)
        self.model_ = train(corpus, vocab, lexicon, alpha=self.alpha, beta=self.beta,
                            sweeps=self.n_sweeps, burn_in=self.burn_in, seed=seed,
                            conflict_policy=self.conflict_policy, estimate=self.estimate,
                            biterm_window=self.biterm_window)
        self.corpus_ = corpus
        self.vocabulary_ = vocab
        self.components_ = self.model_.phi
        self.theta_ = self.model_.theta
        return self

    def transform(self, X):
        """Per-document topic distributions, shape (n_docs, K).

        Tokens outside the training vocabulary are ignored; a document with
        no known token gets ``theta_``.
        """
        check_is_fitted(self, "model_")
        docs = check_documents(X)
        out = np.empty((len(docs), self.model_.n_topics))
        for i, doc in enumerate(docs):
            ids = [self.vocabulary_.id_of(t) for t in doc]
            out[i] = infer_tweet_topics(self.model_, [j for j in ids if j is not None])
        return out

    def predict(self, X):
        """Most probable emotion topic per document, ties to the lowest id."""
        return np.argmax(self.transform(X), axis=1)
