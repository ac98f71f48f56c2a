from collections import Counter

import pytest

from qdeval import Corpus, NoiseMixSpec, ingest, noise_mix_sample, split
from qdeval.corpus import write_corpus, write_vocab
from qdeval.errors import EmptyCorpusError


def _write(tmp_path, lines, name="corpus.txt"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_ingest_basic(tmp_path):
    path = _write(tmp_path, ["a b c", "a b", "c a"])
    corpus = ingest(path)
    assert corpus.n_sentences == 3
    assert corpus.vocab == {"a": 0, "b": 1, "c": 2}
    assert corpus.sentences[0] == (0, 1, 2)
    assert corpus.stats == {"n_sentences": 3, "max_len": 3, "vocab_size": 3}


def test_ingest_min_freq_keeps_everything_at_one(tmp_path):
    path = _write(tmp_path, ["x y", "z", "w w"])
    corpus = ingest(path, min_token_freq=1)
    assert corpus.n_sentences == 3


def test_ingest_frequency_filter_reaches_fixed_point(tmp_path):
    # dropping the "rare"-containing sentence strands its neighbours below
    # the threshold, which must trigger another round of filtering
    lines = ["common common common common", "common helper", "helper rare"]
    path = _write(tmp_path, lines)
    corpus = ingest(path, min_token_freq=2)
    kept_tokens = Counter(t for s in corpus.sentences for t in s)
    assert all(c >= 2 for c in kept_tokens.values())
    inv = {i: t for t, i in corpus.vocab.items()}
    assert all(inv[t] == "common" for s in corpus.sentences for t in s)


def test_ingest_length_filter_can_empty_corpus(tmp_path):
    path = _write(tmp_path, ["a a a"])
    with pytest.raises(EmptyCorpusError):
        ingest(path, max_len=2)


def test_ingest_idempotent(tmp_path):
    lines = ["a b c d", "b c d", "a a b", "e e e e e", "f"]
    path = _write(tmp_path, lines)
    first = ingest(path, min_token_freq=2, max_len=4, min_len=2)
    out = tmp_path / "round.txt"
    write_corpus(first, out)
    second = ingest(out, min_token_freq=2, max_len=4, min_len=2)
    assert second.sentences == first.sentences
    assert second.vocab == first.vocab


def test_ingest_lowercase_flag(tmp_path):
    path = _write(tmp_path, ["A a"])
    assert len(ingest(path, lowercase=True).vocab) == 1
    assert len(ingest(path, lowercase=False).vocab) == 2


def test_split_properties(tmp_path):
    path = _write(tmp_path, [f"t{i} x" for i in range(10)])
    corpus = ingest(path)
    a, b = split(corpus, [4, 4], seed=5)
    assert a.n_sentences == 4 and b.n_sentences == 4
    assert not (set(a.sentences) & set(b.sentences))
    a2, b2 = split(corpus, [4, 4], seed=5)
    assert a2.sentences == a.sentences and b2.sentences == b.sentences
    (whole,) = split(corpus, [10], seed=1)
    assert sorted(whole.sentences) == sorted(corpus.sentences)
    with pytest.raises(ValueError):
        split(corpus, [8, 8], seed=0)


def test_noise_mix_endpoints():
    pool = Corpus(sentences=((0, 1), (1, 2)), vocab={"a": 0, "b": 1, "c": 2},
                  stats={"n_sentences": 2, "max_len": 2, "vocab_size": 3})
    clean = noise_mix_sample(pool, NoiseMixSpec(epsilon=0.0, noise_len=5,
                                                seed=1, n_samples=50))
    assert all(s in pool.sentences for s in clean.sentences)
    noisy = noise_mix_sample(pool, NoiseMixSpec(epsilon=1.0, noise_len=5,
                                                seed=1, n_samples=50))
    assert all(len(s) == 5 for s in noisy.sentences)


def test_noise_mix_fraction_concentrates():
    pool = Corpus(sentences=tuple((i % 3, i % 5) for i in range(100)),
                  vocab={str(i): i for i in range(6)},
                  stats={"n_sentences": 100, "max_len": 2, "vocab_size": 6})
    spec = NoiseMixSpec(epsilon=0.4, noise_len=5, seed=3, n_samples=100_000)
    mixed = noise_mix_sample(pool, spec)
    n_noise = sum(1 for s in mixed.sentences if len(s) == 5)
    frac = n_noise / spec.n_samples
    sigma = (0.4 * 0.6 / spec.n_samples) ** 0.5
    assert abs(frac - 0.4) < 3 * sigma + 1e-9


def test_noise_mix_deterministic():
    pool = Corpus(sentences=((0,), (1,)), vocab={"a": 0, "b": 1},
                  stats={"n_sentences": 2, "max_len": 1, "vocab_size": 2})
    spec = NoiseMixSpec(epsilon=0.5, noise_len=3, seed=11, n_samples=200)
    assert noise_mix_sample(pool, spec).sentences == \
        noise_mix_sample(pool, spec).sentences


def test_vocab_sidecar(tmp_path):
    path = _write(tmp_path, ["a b a", "b c"])
    corpus = ingest(path)
    side = tmp_path / "vocab.tsv"
    write_vocab(corpus, side)
    rows = [line.split("\t") for line in side.read_text().splitlines()]
    assert rows[0] == ["a", "0", "2"]
    assert rows[1] == ["b", "1", "2"]
    assert rows[2] == ["c", "2", "1"]
