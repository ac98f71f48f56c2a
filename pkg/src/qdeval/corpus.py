"""Corpus ingestion and experiment set construction.

Sentences are whitespace-tokenized lines.  Ingestion drops rare-token and
out-of-length sentences, iterating to a fixed point so that the emitted corpus
satisfies its own frequency constraint.  Samplers are deterministic given
their seed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import EmptyCorpusError
from .seeding import generator


@dataclass(frozen=True)
class Corpus:
    """Token-id sentences plus the token-string vocabulary that produced them."""

    sentences: tuple[tuple[int, ...], ...]
    vocab: dict[str, int]
    stats: dict

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class NoiseMixSpec:
    """Noise-mixture sampler settings: noise share epsilon, noise sentence
    length, seed, and output size."""

    epsilon: float
    noise_len: int
    seed: int
    n_samples: int

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.noise_len < 1:
            raise ValueError("noise_len must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")


def _make_stats(sentences, vocab) -> dict:
    return {
        "n_sentences": len(sentences),
        "max_len": max((len(s) for s in sentences), default=0),
        "vocab_size": len(vocab),
    }


def _build(sentences_tokens) -> Corpus:
    vocab: dict[str, int] = {}
    id_sents = []
    for sent in sentences_tokens:
        ids = tuple(vocab.setdefault(tok, len(vocab)) for tok in sent)
        id_sents.append(ids)
    sentences = tuple(id_sents)
    return Corpus(sentences=sentences, vocab=vocab,
                  stats=_make_stats(sentences, vocab))


def ingest(path, min_token_freq: int = 1, max_len: int = 10 ** 9,
           min_len: int = 1, lowercase: bool = False) -> Corpus:
    """Read a one-sentence-per-line corpus and filter it.

    Sentences containing tokens rarer than ``min_token_freq`` are removed, as
    are sentences outside [min_len, max_len].  Removal changes frequencies, so
    the filter repeats until stable.  The vocabulary is ordered by first
    occurrence in the surviving sentences.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    sents = []
    for line in lines:
        if lowercase:
            line = line.lower()
        sents.append(line.split())

    while True:
        freq = Counter(tok for s in sents for tok in s)
        kept = [s for s in sents
                if min_len <= len(s) <= max_len
                and all(freq[t] >= min_token_freq for t in s)]
        if len(kept) == len(sents):
            break
        sents = kept
    if not sents:
        raise EmptyCorpusError(f"{path}: no sentences survive filtering")
    return _build(sents)


def split(corpus: Corpus, sizes, seed: int) -> list[Corpus]:
    """Disjoint uniform-random subsets of the given sizes, seed-deterministic."""
    sizes = [int(s) for s in sizes]
    if any(s < 0 for s in sizes):
        raise ValueError("sizes must be non-negative")
    if sum(sizes) > corpus.n_sentences:
        raise ValueError(
            f"requested {sum(sizes)} sentences from a corpus of "
            f"{corpus.n_sentences}")
    rng = generator(seed, "split")
    perm = rng.permutation(corpus.n_sentences)
    out = []
    offset = 0
    for size in sizes:
        picked = tuple(corpus.sentences[j] for j in perm[offset:offset + size])
        offset += size
        out.append(Corpus(sentences=picked, vocab=corpus.vocab,
                          stats=_make_stats(picked, corpus.vocab)))
    return out


def noise_mix_sample(reference_pool: Corpus, spec: NoiseMixSpec) -> Corpus:
    """Sample sentences from the pool, replacing a share epsilon with
    uniform random token strings of fixed length."""
    n_pool = reference_pool.n_sentences
    if n_pool == 0:
        raise EmptyCorpusError("reference pool is empty")
    n_vocab = len(reference_pool.vocab)
    rng = generator(spec.seed, "mix")
    is_noise = rng.random(spec.n_samples) < spec.epsilon
    pool_idx = rng.integers(0, n_pool, size=spec.n_samples)
    noise_tokens = rng.integers(0, n_vocab, size=(spec.n_samples, spec.noise_len))
    sentences = tuple(
        tuple(int(t) for t in noise_tokens[k]) if is_noise[k]
        else reference_pool.sentences[pool_idx[k]]
        for k in range(spec.n_samples))
    return Corpus(sentences=sentences, vocab=reference_pool.vocab,
                  stats=_make_stats(sentences, reference_pool.vocab))


def write_corpus(corpus: Corpus, path) -> None:
    """Write token-string sentences, one per line."""
    inv = {i: tok for tok, i in corpus.vocab.items()}
    with open(path, "w", encoding="utf-8") as fh:
        for sent in corpus.sentences:
            fh.write(" ".join(inv[t] for t in sent) + "\n")


def write_vocab(corpus: Corpus, path) -> None:
    """Write the vocabulary sidecar: token<TAB>id<TAB>frequency."""
    freq = Counter(tok for sent in corpus.sentences for tok in sent)
    inv = {i: tok for tok, i in corpus.vocab.items()}
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(len(inv)):
            tok = inv[i]
            fh.write(f"{tok}\t{i}\t{freq[i]}\n")
