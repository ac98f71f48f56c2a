"""Sparse n-gram distributions and the gram-space metric family.

CR (coverage rate) is the inner product of candidate and reference gram
distributions; NRR (negative repetition rate) the negative squared norm of the
candidate grams; CND their squared Euclidean distance, which equals three
times the drop in the combined score Psi = (2/3) CR + (1/3) NRR.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .distributions import CategoricalDist
from .errors import EmptyDistributionError


@dataclass(frozen=True)
class NGramDist:
    """Sparse probability table over n-grams of one fixed order.

    ``total_count`` is the number of counted gram occurrences; it is 0 for
    tables built analytically from explicit distributions rather than by
    counting.
    """

    order: int
    table: Mapping[tuple, float]
    total_count: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        total = 0.0
        for g, prob in self.table.items():
            if len(g) != self.order:
                raise ValueError(f"gram {g!r} does not have order {self.order}")
            if prob < 0:
                raise ValueError("gram probabilities must be non-negative")
            total += prob
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"gram probabilities sum to {total}, expected 1")


def ngram_dist(corpus, order: int) -> NGramDist:
    """Empirical n-gram distribution of a token-sequence corpus.

    Windows slide within each sentence only; no padding, no cross-sentence
    grams.  Sentences shorter than the order contribute nothing.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    counts: dict = {}
    total = 0
    for sent in corpus:
        sent = tuple(sent)
        for k in range(len(sent) - order + 1):
            g = sent[k:k + order]
            counts[g] = counts.get(g, 0) + 1
            total += 1
    if total == 0:
        raise EmptyDistributionError(
            f"no sentence long enough for order-{order} grams")
    return NGramDist(order=order,
                     table={g: c / total for g, c in counts.items()},
                     total_count=total)


def ngram_dist_from_categorical(dist: CategoricalDist, order: int) -> NGramDist:
    """Exact gram marginal of an explicit labelled text distribution.

    Each text contributes its gram counts weighted by its probability; the
    table is the expected empirical gram distribution of samples from it.
    """
    if dist.labels is None:
        raise ValueError("gram marginal requires a labelled distribution")
    weights: dict = {}
    denom = 0.0
    for text, prob in zip(dist.labels, dist.probs):
        if prob == 0:
            continue
        n_windows = len(text) - order + 1
        if n_windows <= 0:
            continue
        denom += prob * n_windows
        for k in range(n_windows):
            g = text[k:k + order]
            weights[g] = weights.get(g, 0.0) + prob
    if denom == 0.0:
        raise EmptyDistributionError(
            f"no labelled text long enough for order-{order} grams")
    return NGramDist(order=order,
                     table={g: w / denom for g, w in weights.items()},
                     total_count=0)


def gram_matrix(labels, order: int) -> tuple[np.ndarray, list]:
    """Linear map from text probabilities to gram probabilities.

    Returns (A, grams) with A of shape (n_grams, n_texts); valid when all
    labels share one length, so that every text has the same window count.
    """
    lengths = {len(lab) for lab in labels}
    if len(lengths) != 1:
        raise ValueError("gram matrix requires equal-length labels")
    n_windows = lengths.pop() - order + 1
    if n_windows <= 0:
        raise EmptyDistributionError(
            f"labels too short for order-{order} grams")
    gram_ids: dict = {}
    entries = []
    for t, text in enumerate(labels):
        for k in range(n_windows):
            g = tuple(text[k:k + order])
            gid = gram_ids.setdefault(g, len(gram_ids))
            entries.append((gid, t))
    a = np.zeros((len(gram_ids), len(labels)))
    for gid, t in entries:
        a[gid, t] += 1.0 / n_windows
    grams = [None] * len(gram_ids)
    for g, gid in gram_ids.items():
        grams[gid] = g
    return a, grams


def _check_same_order(qg: NGramDist, pg: NGramDist) -> None:
    if qg.order != pg.order:
        raise ValueError(f"gram order mismatch: {qg.order} vs {pg.order}")


def cr(qg: NGramDist, pg: NGramDist) -> float:
    """Coverage rate: sum of Q_g * P_g over the shared support."""
    _check_same_order(qg, pg)
    small, large = (qg.table, pg.table) if len(qg.table) <= len(pg.table) \
        else (pg.table, qg.table)
    return float(sum(prob * large.get(g, 0.0) for g, prob in small.items()))


def nrr(qg: NGramDist) -> float:
    """Negative repetition rate: -sum of Q_g squared."""
    return float(-sum(prob * prob for prob in qg.table.values()))


def cnd(qg: NGramDist, pg: NGramDist) -> float:
    """Squared Euclidean distance between gram tables (union of supports)."""
    _check_same_order(qg, pg)
    total = 0.0
    for g, prob in qg.table.items():
        d = prob - pg.table.get(g, 0.0)
        total += d * d
    for g, prob in pg.table.items():
        if g not in qg.table:
            total += prob * prob
    return float(total)


def psi_n(qg: NGramDist, pg: NGramDist) -> float:
    """Combined gram-space score (2/3) CR + (1/3) NRR."""
    _check_same_order(qg, pg)
    return (2.0 / 3.0) * cr(qg, pg) + (1.0 / 3.0) * nrr(qg)
