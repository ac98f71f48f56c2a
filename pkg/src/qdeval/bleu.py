"""BLEU and Self-BLEU: corpus-level scores, closed-form single-token
expectations, and exact expectations by full enumeration on tiny text spaces.

Sentences are sequences of hashable tokens (ints or strings).  Precision is
the clipped modified n-gram precision summed over the whole candidate set; the
score is the geometric mean over orders 1..max_order times the brevity
penalty.  There is no smoothing: a zero precision at any populated order gives
a zero score.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .distributions import CategoricalDist
from .errors import CapacityError

ENUM_CAP = 2 ** 28


@dataclass(frozen=True)
class BleuConfig:
    """Maximum n-gram order and brevity-penalty mode ('standard' or 'off').

    Orders for which no candidate n-gram exists (all sentences shorter than
    the order) are skipped, so max_order is effectively capped at the longest
    sentence length.
    """

    max_order: int = 4
    brevity_penalty: str = "standard"

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.brevity_penalty not in ("standard", "off"):
            raise ValueError("brevity_penalty must be 'standard' or 'off'")


def _gram_counts(sentence: tuple, order: int) -> dict:
    counts: dict = {}
    for k in range(len(sentence) - order + 1):
        g = sentence[k:k + order]
        counts[g] = counts.get(g, 0) + 1
    return counts


def _closest_ref_length(uniq_ref_lens, cand_len: int) -> int:
    # the (distance, value) winner depends only on the set of lengths
    return min(uniq_ref_lens, key=lambda rl: (abs(rl - cand_len), rl))


def corpus_bleu(candidates, references, config: BleuConfig) -> float:
    """Corpus BLEU of a candidate set against a reference set."""
    cands = [tuple(s) for s in candidates]
    refs = [tuple(s) for s in references]
    if not cands or not refs:
        raise ValueError("candidate and reference sets must be non-empty")

    log_precisions: list[float] = []
    for order in range(1, config.max_order + 1):
        denom = sum(max(0, len(c) - order + 1) for c in cands)
        if denom == 0:
            continue
        merged: dict = {}
        for r in refs:
            for g, cnt in _gram_counts(r, order).items():
                if cnt > merged.get(g, 0):
                    merged[g] = cnt
        num = 0
        for c in cands:
            for g, cnt in _gram_counts(c, order).items():
                num += min(cnt, merged.get(g, 0))
        if num == 0:
            return 0.0
        log_precisions.append(math.log(num / denom))
    if not log_precisions:
        return 0.0

    bp = 1.0
    if config.brevity_penalty == "standard":
        c_total = sum(len(c) for c in cands)
        uniq_ref_lens = sorted({len(r) for r in refs})
        closest = {ln: _closest_ref_length(uniq_ref_lens, ln)
                   for ln in {len(c) for c in cands}}
        r_total = sum(closest[len(c)] for c in cands)
        if c_total < r_total:
            bp = math.exp(1.0 - r_total / c_total)
    return bp * math.exp(math.fsum(log_precisions) / len(log_precisions))


def self_bleu(candidates, config: BleuConfig) -> float:
    """Mean leave-one-out BLEU: each candidate scored against all the others.

    Values equal averaging corpus_bleu([c_i], rest) over i; the gram tables
    are shared through an inverted index, but every candidate still scans the
    occurrence lists of its own grams, so work grows quadratically with the
    candidate count (the repetition cost this metric is known for).
    """
    cands = [tuple(s) for s in candidates]
    m = len(cands)
    if m < 2:
        raise ValueError("self-BLEU needs at least 2 candidates")

    orders = range(1, config.max_order + 1)
    counts = {n: [_gram_counts(c, n) for c in cands] for n in orders}
    postings: dict = {n: {} for n in orders}
    for n in orders:
        for idx, tbl in enumerate(counts[n]):
            for g, cnt in tbl.items():
                postings[n].setdefault(g, []).append((idx, cnt))

    lens = [len(c) for c in cands]
    len_counts: dict = {}
    for ln in lens:
        len_counts[ln] = len_counts.get(ln, 0) + 1
    uniq_lens = sorted(len_counts)

    scores = []
    for i in range(m):
        log_precisions = []
        zero = False
        for n in orders:
            denom = max(0, lens[i] - n + 1)
            if denom == 0:
                continue
            num = 0
            for g, cnt in counts[n][i].items():
                best = 0
                for idx, ref_cnt in postings[n][g]:
                    if idx != i and ref_cnt > best:
                        best = ref_cnt
                num += min(cnt, best)
            if num == 0:
                zero = True
                break
            log_precisions.append(math.log(num / denom))
        if zero or not log_precisions:
            scores.append(0.0)
            continue
        bp = 1.0
        if config.brevity_penalty == "standard":
            r = _closest_len_excluding(uniq_lens, len_counts, lens[i])
            if lens[i] < r:
                bp = math.exp(1.0 - r / lens[i])
        scores.append(bp * math.exp(math.fsum(log_precisions) / len(log_precisions)))
    return math.fsum(scores) / m


def _closest_len_excluding(uniq_lens, len_counts, cand_len: int) -> int:
    """Closest reference length when one occurrence of cand_len is excluded."""
    best = None
    for ln in uniq_lens:
        avail = len_counts[ln] - (1 if ln == cand_len else 0)
        if avail <= 0:
            continue
        key = (abs(ln - cand_len), ln)
        if best is None or key < best:
            best = key
    return best[1]


def nsbleu(candidates, config: BleuConfig) -> float:
    """Negative self-BLEU, used as a diversity score."""
    return -self_bleu(candidates, config)


# ---------------------------------------------------------------------------
# closed-form single-token expectations

def expected_unigram_bleu(q: CategoricalDist, p: CategoricalDist,
                          ref_size: int) -> float:
    """E[BLEU] over length-1 texts: sum_i Q_i (1 - (1 - P_i)^R)."""
    if ref_size < 1:
        raise ValueError("ref_size must be >= 1")
    if q.n != p.n:
        raise ValueError("q and p live on different outcome spaces")
    return float(np.sum(q.probs * (1.0 - (1.0 - p.probs) ** ref_size)))


def expected_nsbleu_unigram(q: CategoricalDist, cand_size: int) -> float:
    """E[NSBLEU] over length-1 texts: -sum_i Q_i (1 - (1 - Q_i)^(C-1))."""
    if cand_size < 2:
        raise ValueError("cand_size must be >= 2")
    return float(-np.sum(q.probs * (1.0 - (1.0 - q.probs) ** (cand_size - 1))))


# ---------------------------------------------------------------------------
# exact expectations on enumerable spaces

@dataclass(frozen=True)
class EnumSpec:
    """Exact-expectation setup: distributions with labels, candidate count m,
    reference count n, and the BLEU configuration."""

    q: CategoricalDist
    p: CategoricalDist
    m: int
    n: int
    config: BleuConfig

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("candidate and reference counts must be >= 1")
        if self.q.labels is None or self.p.labels is None:
            raise ValueError("enumeration requires labelled distributions")
        if self.q.labels != self.p.labels:
            raise ValueError("q and p live on different outcome spaces")
        if len(self.q.labels) ** (self.m + self.n) > ENUM_CAP:
            raise CapacityError(
                f"{len(self.q.labels)}^{self.m + self.n} tuples exceed the "
                f"enumeration cap of {ENUM_CAP}")


def expected_bleu_enumerate(spec: EnumSpec) -> float:
    """Exact E[BLEU(C, R)] under i.i.d. candidate and reference draws.

    Sums prod Q(C_i) * prod P(R_j) * BLEU(C, R) over every tuple pair, with
    compensated summation.  BLEU is invariant under reordering within C and R,
    so scores are cached per sorted index tuple.
    """
    texts = spec.q.labels
    qv, pv = spec.q.probs, spec.p.probs
    idx_q = np.flatnonzero(qv > 0)
    idx_p = np.flatnonzero(pv > 0)
    cache: dict = {}
    terms: list[float] = []
    for cand_idx in itertools.product(idx_q, repeat=spec.m):
        wq = float(np.prod(qv[list(cand_idx)]))
        cand_key = tuple(sorted(cand_idx))
        for ref_idx in itertools.product(idx_p, repeat=spec.n):
            key = (cand_key, tuple(sorted(ref_idx)))
            score = cache.get(key)
            if score is None:
                score = corpus_bleu([texts[i] for i in cand_idx],
                                    [texts[j] for j in ref_idx], spec.config)
                cache[key] = score
            if score:
                terms.append(wq * float(np.prod(pv[list(ref_idx)])) * score)
    return math.fsum(terms)


def expected_selfbleu_enumerate(q: CategoricalDist, cand_size: int,
                                config: BleuConfig) -> float:
    """Exact E[SelfBLEU(C)] over i.i.d. candidate tuples of a fixed size."""
    if cand_size < 2:
        raise ValueError("cand_size must be >= 2")
    if q.labels is None:
        raise ValueError("enumeration requires a labelled distribution")
    if len(q.labels) ** cand_size > ENUM_CAP:
        raise CapacityError(
            f"{len(q.labels)}^{cand_size} tuples exceed the enumeration "
            f"cap of {ENUM_CAP}")
    texts = q.labels
    qv = q.probs
    idx_q = np.flatnonzero(qv > 0)
    cache: dict = {}
    terms: list[float] = []
    for cand_idx in itertools.product(idx_q, repeat=cand_size):
        key = tuple(sorted(cand_idx))
        score = cache.get(key)
        if score is None:
            score = self_bleu([texts[i] for i in cand_idx], config)
            cache[key] = score
        if score:
            terms.append(float(np.prod(qv[list(cand_idx)])) * score)
    return math.fsum(terms)
