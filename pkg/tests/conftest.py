import json
from pathlib import Path

import numpy as np
import pytest

from emocause.corpus import EmotionLexicon, build_corpus
from emocause.synth import SyntheticGroundTruth

DATA = Path(__file__).resolve().parents[1] / "src" / "emocause" / "data"

ACCEPTANCE_LINES = []


@pytest.fixture
def lexicon():
    return EmotionLexicon.from_mapping({
        "Esteem": ["敬佩", "敬仰", "敬重"],
        "Sadness": ["哭", "悲痛", "叹息", "悲哀"],
        "Sympathy": ["同情", "可怜", "可惜"],
    })


@pytest.fixture
def small_corpus(lexicon):
    lines = [
        ["核电站", "工作人员", "敬佩", "[蜡烛]"],
        ["地震", "哭", "孤儿"],
        ["核电站", "工作人员", "辐射", "同情"],
        ["救援队", "敬重", "核电站", "工作人员"],
        ["悲痛", "地震", "孤儿", "[泪]"],
        ["附近", "居民", "可怜", "辐射", "[蜡烛]"],
    ]
    return build_corpus(lines, lexicon)


@pytest.fixture(scope="session")
def mini_paths():
    return dict(config=DATA / "mini.conf", corpus=DATA / "mini_corpus.txt",
                lexicon=DATA / "mini_lexicon.tsv", truth=DATA / "mini_truth.json")


@pytest.fixture(scope="session")
def mini_truth(mini_paths):
    return SyntheticGroundTruth.from_json(json.loads(mini_paths["truth"].read_text(encoding="utf-8")))


def random_mixed_corpus(rng, n_emotions, n_tweets=60, n_plain=25, words_per_emotion=3):
    """Tweets mixing plain words with emotion words of several emotions."""
    mapping = {f"e{k}": [f"e{k}w{j}" for j in range(words_per_emotion)] for k in range(n_emotions)}
    emotion_words = [w for ws in mapping.values() for w in ws]
    plain = [f"p{j}" for j in range(n_plain)]
    lines = []
    for _ in range(n_tweets):
        length = int(rng.integers(2, 9))
        toks = list(rng.choice(plain, size=length))
        for _ in range(int(rng.integers(1, 3))):
            toks.insert(int(rng.integers(len(toks) + 1)), str(rng.choice(emotion_words)))
        lines.append(toks)
    return lines, EmotionLexicon.from_mapping(mapping)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
