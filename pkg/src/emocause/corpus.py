"""Tweet ingestion: lexicon loading, cleanup rules, vocabulary and biterms."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .exceptions import EmptyCorpusError, LexiconError

URL_PREFIXES = ("http://", "https://", "www.", "t.cn/", "url.cn/", "dwz.cn/")
RETWEET_TAGS = ("RT", "rt", "转发微博", "转发", "//")

_EMOTICON_RE = re.compile(r"^\[[^\[\]\s]+\]$")


def is_emoticon(token: str) -> bool:
    return bool(_EMOTICON_RE.match(token))


@dataclass(frozen=True)
class EmotionEntry:
    emotion_id: int
    name: str
    words: frozenset


@dataclass(frozen=True)
class EmotionLexicon:
    """Emotion names with their seed words; the word -> emotion map is the supervision."""

    entries: tuple

    def __post_init__(self):
        owner = {}
        for i, entry in enumerate(self.entries):
            if entry.emotion_id != i:
                raise LexiconError(f"emotion ids must be contiguous from 0, got {entry.emotion_id} at position {i}")
            if not entry.words:
                raise LexiconError(f"emotion {entry.name!r} has an empty word list")
            for w in entry.words:
                if w in owner:
                    raise LexiconError(
                        f"word {w!r} listed under both {self.entries[owner[w]].name!r} and {entry.name!r}")
                owner[w] = i
        object.__setattr__(self, "_owner", owner)

    @classmethod
    def from_mapping(cls, mapping):
        """Build from ``{name: words}`` preserving insertion order."""
        return cls(tuple(EmotionEntry(i, name, frozenset(words))
                         for i, (name, words) in enumerate(mapping.items())))

    @property
    def n_emotions(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> list:
        return [e.name for e in self.entries]

    def emotion_of(self, word: str) -> Optional[int]:
        return self._owner.get(word)

    def __contains__(self, word) -> bool:
        return word in self._owner

    def __len__(self) -> int:
        return len(self.entries)

    def n_words(self) -> int:
        return len(self._owner)


def load_lexicon(path) -> EmotionLexicon:
    """Read ``name<TAB>w1,w2,...`` lines; ids follow file order."""
    entries = []
    seen_names = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if "\t" not in line:
                raise LexiconError(f"{path}:{lineno}: expected 'name<TAB>words'")
            name, words_field = line.split("\t", 1)
            name = name.strip()
            if name in seen_names:
                raise LexiconError(f"{path}:{lineno}: emotion {name!r} defined twice")
            seen_names.add(name)
            words = [w.strip() for w in words_field.split(",") if w.strip()]
            if not words:
                raise LexiconError(f"{path}:{lineno}: emotion {name!r} has an empty word list")
            entries.append((name, words))
    if not entries:
        raise LexiconError(f"{path}: lexicon is empty")
    return EmotionLexicon(tuple(EmotionEntry(i, n, frozenset(ws)) for i, (n, ws) in enumerate(entries)))


def write_lexicon(lexicon: EmotionLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in lexicon.entries:
            fh.write(f"{e.name}\t{','.join(sorted(e.words))}\n")


def _is_url(token: str) -> bool:
    low = token.lower()
    return low.startswith(URL_PREFIXES) or "://" in low


def _has_text(token: str) -> bool:
    # CJK ideographs report isalpha() as True
    return any(ch.isalpha() for ch in token)


def preprocess(raw_line: str, retweet_tags: Iterable[str] = RETWEET_TAGS) -> list:
    """Strip mentions, URLs, forwarding markers and non-text tokens.

    Bracketed emoticons such as ``[蜡烛]`` are kept verbatim.

    >>> preprocess("@john 核电站 工作人员 [蜡烛] http://t.cn/abc")
    ['核电站', '工作人员', '[蜡烛]']
    """
    tags = set(retweet_tags)
    out = []
    for tok in raw_line.split():
        if is_emoticon(tok):
            out.append(tok)
            continue
        if tok.startswith("@") or tok.startswith("//@") or tok in tags:
            continue
        if _is_url(tok) or not _has_text(tok):
            continue
        out.append(tok)
    return out


@dataclass
class Vocabulary:
    tokens: list = field(default_factory=list)
    is_emoticon: list = field(default_factory=list)
    emotion_of: list = field(default_factory=list)

    def __post_init__(self):
        self._index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self._index

    def add(self, token: str, lexicon: Optional[EmotionLexicon] = None) -> int:
        idx = self._index.get(token)
        if idx is not None:
            return idx
        idx = len(self.tokens)
        self.tokens.append(token)
        self._index[token] = idx
        emo = lexicon.emotion_of(token) if lexicon is not None else None
        self.emotion_of.append(emo)
        self.is_emoticon.append(emo is None and is_emoticon(token))
        return idx

    def id_of(self, token: str) -> Optional[int]:
        return self._index.get(token)

    def emoticon_ids(self) -> list:
        return [i for i, flag in enumerate(self.is_emoticon) if flag]

    def emotion_word_ids(self) -> list:
        return [i for i, e in enumerate(self.emotion_of) if e is not None]

    @classmethod
    def from_tokens(cls, tokens: Sequence[str], lexicon: Optional[EmotionLexicon] = None):
        vocab = cls()
        for t in tokens:
            vocab.add(t, lexicon)
        return vocab

    def dump(self, path) -> None:
        """Debug TSV: ``id<TAB>surface<TAB>flags``."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# id\tsurface\tflags\n")
            for i, tok in enumerate(self.tokens):
                if self.is_emoticon[i]:
                    flags = "emoticon"
                elif self.emotion_of[i] is not None:
                    flags = f"emotion={self.emotion_of[i]}"
                else:
                    flags = "-"
                fh.write(f"{i}\t{tok}\t{flags}\n")


@dataclass(frozen=True)
class Tweet:
    tokens: tuple
    source_line: int = -1

    def __len__(self):
        return len(self.tokens)


@dataclass
class Corpus:
    tweets: list
    vocab: Vocabulary

    def __len__(self):
        return len(self.tweets)

    def __iter__(self):
        return iter(self.tweets)

    def surfaces(self, tweet: Tweet) -> list:
        return [self.vocab.tokens[i] for i in tweet.tokens]


def build_corpus(lines, lexicon: EmotionLexicon):
    """Keep tweets with at least one lexicon word and index their tokens.

    ``lines`` is an iterable of token lists (already preprocessed). The
    vocabulary covers surviving tweets only, in first-occurrence order.
    """
    vocab = Vocabulary()
    tweets = []
    for lineno, toks in enumerate(lines):
        if not toks:
            continue
        if not any(t in lexicon for t in toks):
            continue
        ids = tuple(vocab.add(t, lexicon) for t in toks)
        tweets.append(Tweet(ids, lineno))
    if not tweets:
        raise EmptyCorpusError("no tweet contains an emotion word from the lexicon")
    return Corpus(tweets, vocab), vocab


def read_corpus(path, retweet_tags: Iterable[str] = RETWEET_TAGS) -> list:
    """Preprocess every line of a UTF-8 corpus file (one tweet per line)."""
    text = Path(path).read_text(encoding="utf-8")
    return [preprocess(line, retweet_tags) for line in text.splitlines()]


def extract_biterms(tweet, window: Optional[int] = None) -> list:
    """All unordered pairs of positions, as ``(min_id, max_id)``.

    Pairs of the same word are dropped; repeated pairs keep their multiplicity.
    ``window`` limits the position distance (``None`` means the whole tweet).
    """
    toks = tweet.tokens if isinstance(tweet, Tweet) else tuple(tweet)
    n = len(toks)
    out = []
    for i in range(n - 1):
        wi = toks[i]
        stop = n if window is None else min(n, i + window + 1)
        for j in range(i + 1, stop):
            wj = toks[j]
            if wi == wj:
                continue
            out.append((wi, wj) if wi < wj else (wj, wi))
    return out
