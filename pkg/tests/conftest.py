import numpy as np
import pytest

from qdeval.seeding import generator


def markov_sentences(n_sentences, seed, vocab=1000, branch=16,
                     min_len=8, max_len=16):
    """Synthetic text with heavy-tailed unigrams and sparse bigram structure.

    The trigram space (vocab * branch^2) is much larger than what 50k
    sentences cover, so fresh samples keep producing unseen grams, as natural
    text does."""
    rng = generator(seed, "markov-corpus")
    successors = rng.integers(0, vocab, size=(vocab, branch))
    start_weights = 1.0 / np.arange(1, vocab + 1)
    start_weights /= start_weights.sum()
    lengths = rng.integers(min_len, max_len + 1, size=n_sentences)
    starts = rng.choice(vocab, size=n_sentences, p=start_weights)
    picks = rng.integers(0, branch, size=(n_sentences, max_len))
    sentences = []
    for i in range(n_sentences):
        toks = np.empty(lengths[i], dtype=np.int64)
        toks[0] = starts[i]
        for t in range(1, lengths[i]):
            toks[t] = successors[toks[t - 1], picks[i, t]]
        sentences.append([f"w{t}" for t in toks])
    return sentences


def write_sentences(path, sentences):
    with open(path, "w", encoding="utf-8") as fh:
        for sent in sentences:
            fh.write(" ".join(sent) + "\n")
    return str(path)


@pytest.fixture(scope="session")
def big_corpus_files(tmp_path_factory):
    """Candidate and reference files of 50k sentences each, same source."""
    base = tmp_path_factory.mktemp("bigcorpus")
    sents = markov_sentences(100_000, seed=2024)
    cand_path = write_sentences(base / "candidates.txt", sents[:50_000])
    ref_path = write_sentences(base / "references.txt", sents[50_000:])
    return cand_path, ref_path
