import numpy as np
import pytest

from emocause.corpus import build_corpus, preprocess
from emocause.exceptions import ConfigError
from emocause.synth import SyntheticGroundTruth, synth_corpus, write_synth


@pytest.fixture(scope="module")
def generated():
    return synth_corpus(K=3, V=60, n_tweets=2000, tweet_len=8, seed=11)


def test_every_tweet_has_emotion_word(generated):
    lines, lex, _ = generated
    corpus, _ = build_corpus([preprocess(l) for l in lines], lex)
    assert len(corpus) == 2000


def test_topic_frequencies_follow_theta(generated):
    _, _, truth = generated
    freq = np.bincount(truth.labels, minlength=3) / len(truth.labels)
    assert np.abs(freq - truth.theta).max() <= 0.05


def test_phi_rows_stochastic_and_blocks_disjoint(generated):
    _, lex, truth = generated
    np.testing.assert_allclose(truth.phi.sum(axis=1), 1.0, atol=1e-12)
    support = truth.phi > 0
    assert not (support[0] & support[1]).any()
    for k, words in enumerate(truth.emotion_words):
        assert words
        for w in words:
            assert truth.phi[k, truth.tokens.index(w)] > 0
            assert lex.emotion_of(w) == k


def test_empirical_marginal_matches_phi(generated):
    lines, _, truth = generated
    col = {t: i for i, t in enumerate(truth.tokens)}
    counts = np.zeros_like(truth.phi)
    for z, line in zip(truth.labels, lines):
        for t in line.split():
            counts[z, col[t]] += 1
    emp = counts / counts.sum(axis=1, keepdims=True)
    assert np.abs(emp - truth.phi).sum(axis=1).max() < 0.1


def test_emoticon_per_topic(generated):
    _, _, truth = generated
    for k, icons in enumerate(truth.emoticons):
        assert len(icons) == 1
        assert truth.phi[k, truth.tokens.index(icons[0])] > 0


def test_deterministic(tmp_path):
    a = write_synth(tmp_path / "a", K=3, V=40, n_tweets=50, seed=5, noise=True)
    b = write_synth(tmp_path / "b", K=3, V=40, n_tweets=50, seed=5, noise=True)
    for name in ("corpus.txt", "lexicon.tsv", "truth.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert a[2].phi.tobytes() == b[2].phi.tobytes()


def test_noise_removed_by_preprocessing():
    lines, _, _ = synth_corpus(K=2, V=30, n_tweets=100, seed=3, noise=True)
    assert any("@" in l or "http" in l for l in lines)
    for l in lines:
        assert all(not t.startswith(("@", "http")) for t in preprocess(l))


@pytest.mark.parametrize("kwargs", [dict(V=10), dict(n_tweets=2), dict(tweet_len=1),
                                    dict(seeds_per_topic=0)])
def test_parameter_ranges(kwargs):
    params = dict(K=3, V=60, n_tweets=100, tweet_len=8, seeds_per_topic=2)
    params.update(kwargs)
    with pytest.raises(ConfigError):
        synth_corpus(**params)


def test_truth_json_round_trip(generated):
    truth = generated[2]
    back = SyntheticGroundTruth.from_json(truth.to_json())
    assert back.phi.tobytes() == truth.phi.tobytes()
    assert back.labels.tolist() == truth.labels.tolist()
