"""Input checks shared by the estimators."""

from collections.abc import Mapping

from .corpus import EmotionLexicon, preprocess


def check_documents(X):
    """Coerce ``X`` to a list of token lists.

    Raw strings are run through :func:`preprocess`; token sequences are
    taken as already cleaned.
    """
    if isinstance(X, str):
        raise TypeError("expected an iterable of documents, got a single string")
    docs = []
    for doc in X:
        if isinstance(doc, str):
            docs.append(preprocess(doc))
        else:
            toks = list(doc)
            if not all(isinstance(t, str) for t in toks):
                raise TypeError("documents must be strings or sequences of string tokens")
            docs.append(toks)
    return docs


def check_lexicon(lexicon):
    if isinstance(lexicon, EmotionLexicon):
        return lexicon
    if isinstance(lexicon, Mapping):
        return EmotionLexicon.from_mapping(lexicon)
    if lexicon is None:
        raise ValueError("an emotion lexicon is required")
    raise TypeError(f"unsupported lexicon type {type(lexicon).__name__}")
