"""Emotion-topic modelling and emotion-cause extraction for short texts."""

from .corpus import (Corpus, EmotionLexicon, Tweet, Vocabulary, build_corpus,
                     extract_biterms, load_lexicon, preprocess)
from .tsbtm import EmotionTopicModel, TopicSupervisedBTM, infer_tweet_topics, load_model, train

__version__ = "0.1.0"

__all__ = [
    "Corpus", "EmotionLexicon", "Tweet", "Vocabulary", "build_corpus", "extract_biterms",
    "load_lexicon", "preprocess", "EmotionTopicModel", "TopicSupervisedBTM",
    "infer_tweet_topics", "load_model", "train",
]
