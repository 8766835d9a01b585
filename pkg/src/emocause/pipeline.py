"""End-to-end orchestration: corpus -> topic model -> causes -> emoticons."""

from __future__ import annotations

import json
import logging
import os
import shutil
import tempfile
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.utils.validation import check_is_fitted

from . import __version__
from .config import PipelineConfig
from .corpus import build_corpus, load_lexicon, read_corpus
from .ctpr import detect_causes
from .emoticon import DEFAULT_P, compute_threshold, related_emoticons, relevance_matrix
from .exceptions import ConfigError, PipelineError
from .reports import (emoticon_records, keyphrase_records, write_emoticon_report,
                      write_keyphrase_report)
from .tsbtm import save_model, train

log = logging.getLogger(__name__)


@contextmanager
def _stage(name, timings):
    start = time.perf_counter()
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc
    finally:
        timings[name] = round(time.perf_counter() - start, 6)


def cause_kwargs(cfg: PipelineConfig) -> dict:
    return dict(window=cfg.window, damping=cfg.damping, tol=cfg.tol, max_iter=cfg.max_iter,
                top_n=cfg.top_n, max_len=cfg.max_len, min_support=cfg.min_support,
                top_k=cfg.top_k, soft_assign=cfg.soft_assign, threads=cfg.threads)


def train_kwargs(cfg: PipelineConfig) -> dict:
    return dict(alpha=cfg.alpha, beta=cfg.beta, sweeps=cfg.sweeps, burn_in=cfg.burn_in,
                seed=cfg.seed, conflict_policy=cfg.conflict_policy, estimate=cfg.estimate,
                biterm_window=cfg.biterm_window)


def emoticon_stage(model, causes, p, source):
    rankings = [tc.ranking for tc in causes] if source == "pagerank" else None
    R = relevance_matrix(model, source=source, rankings=rankings)
    threshold = compute_threshold(R, p)
    return R, threshold, related_emoticons(R, threshold)


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run every stage and write the reports into ``cfg.out_dir``.

    Outputs are staged in a temporary directory and moved into place only
    after all stages succeed. Stage failures surface as
    :class:`PipelineError` tagged with the stage name.
    """
    cfg.validate()
    for key in ("corpus", "lexicon", "out_dir"):
        if getattr(cfg, key) is None:
            raise ConfigError(f"missing required setting {key!r}")
    for key in ("corpus", "lexicon"):
        if not Path(getattr(cfg, key)).is_file():
            raise ConfigError(f"{key} file not found: {getattr(cfg, key)}")

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(dir=out_dir, prefix=".staging-"))
    timings = {}
    try:
        with _stage("corpus", timings):
            lexicon = load_lexicon(cfg.lexicon)
            lines = read_corpus(cfg.corpus)
            corpus, vocab = build_corpus(lines, lexicon)
        log.info("corpus: %d of %d tweets kept, V=%d", len(corpus), len(lines), len(vocab))
        with _stage("tsbtm", timings):
            model = train(corpus, vocab, lexicon, **train_kwargs(cfg))
            save_model(model, staging / "model.tsv")
        with _stage("ctpr", timings):
            causes = detect_causes(model, corpus, **cause_kwargs(cfg))
            kp_records = keyphrase_records(causes, lexicon, vocab)
            write_keyphrase_report(staging / "keyphrases.tsv", kp_records, cfg.json)
        with _stage("emoticon", timings):
            R, threshold, related = emoticon_stage(model, causes, cfg.p, cfg.relevance_source)
            em_records = emoticon_records(related, lexicon, vocab)
            write_emoticon_report(staging / "emoticons.tsv", em_records, threshold, cfg.p, cfg.json)

        manifest = dict(
            version=__version__, config=cfg.to_dict(), seed=cfg.seed,
            counts=dict(input_lines=len(lines), tweets=len(corpus), vocabulary=len(vocab),
                        emotions=lexicon.n_emotions, emoticons=len(vocab.emoticon_ids()),
                        biterms=model.config["n_biterms"]),
            threshold=threshold, timings=timings)
        (staging / "manifest.json").write_text(json.dumps(manifest, indent=1, ensure_ascii=False),
                                               encoding="utf-8")
        for item in staging.iterdir():
            os.replace(item, out_dir / item.name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)

    return dict(model=model, corpus=corpus, causes=causes, relevance=R, threshold=threshold,
                emoticons=related, keyphrases=kp_records, manifest=manifest)


class EmotionCauseDetector(BaseEstimator):
    """Fit the supervised topic model, then extract causes and emoticons per emotion.

    Parameters
    ----------
    topic_model : TopicSupervisedBTM
        Unfitted topic model; cloned on fit.
    window, damping, top_n, max_len, min_support, top_k : see ``ctpr.detect_causes``
    p : float
        Threshold factor for emoticon relevance.
    relevance_source : {"phi", "pagerank"}

    Attributes
    ----------
    topic_model_ : fitted TopicSupervisedBTM
    causes_ : dict, emotion name -> list of (phrase, score, frequency)
    emoticons_ : dict, emotion name -> list of (emoticon, relevance)
    threshold_ : float
    """

    def __init__(self, topic_model=None, window=1, damping=0.85, top_n=100, max_len=4,
                 min_support=None, top_k=10, p=DEFAULT_P, relevance_source="phi"):
        self.topic_model = topic_model
        self.window = window
        self.damping = damping
        self.top_n = top_n
        self.max_len = max_len
        self.min_support = min_support
        self.top_k = top_k
        self.p = p
        self.relevance_source = relevance_source

    def fit(self, X, y=None):
        if self.topic_model is None:
            raise ValueError("topic_model is required")
        self.topic_model_ = clone(self.topic_model).fit(X)
        model, corpus = self.topic_model_.model_, self.topic_model_.corpus_
        vocab, names = model.vocab, model.lexicon.names
        causes = detect_causes(model, corpus, window=self.window, damping=self.damping,
                               top_n=self.top_n, max_len=self.max_len,
                               min_support=self.min_support, top_k=self.top_k)
        self.causes_ = {names[tc.topic_id]: [(" ".join(vocab.tokens[w] for w in kp.tokens),
                                              kp.score, kp.frequency) for kp in tc.keyphrases]
                        for tc in causes}
        self.relevance_, self.threshold_, related = emoticon_stage(model, causes, self.p,
                                                                   self.relevance_source)
        self.emoticons_ = {names[k]: [(vocab.tokens[n], v) for n, v in items]
                           for k, items in related.items()}
        return self

    def transform(self, X):
        check_is_fitted(self, "topic_model_")
        return self.topic_model_.transform(X)

    def predict(self, X):
        """Emotion name of the dominant topic per document."""
        names = np.asarray(self.topic_model_.model_.lexicon.names)
        return names[self.topic_model_.predict(X)]
