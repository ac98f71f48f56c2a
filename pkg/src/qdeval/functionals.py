"""Differentiable quality/diversity functionals of an explicit distribution.

These are the objective building blocks for the penalty optimizer: each is a
value function of a probability vector plus its analytic gradient.  Besides
the kernel-form metrics, this covers exact expected BLEU / negative self-BLEU
on enumerable text spaces (the expectation sums are multilinear in the
probabilities, so their gradients are exact tensor contractions) and exact
gram-space CR / NRR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import CategoricalDist
from .errors import SupportMismatchError
from .metric_pairs import MetricPair
from .ngram_metrics import gram_matrix


@dataclass(frozen=True)
class Functional:
    """A scalar function of a probability vector with its gradient."""

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]


def pair_functionals(pair: MetricPair, p: CategoricalDist
                     ) -> tuple[Functional, Functional]:
    """Quality and diversity of a kernel pair as functionals of q."""
    probs = p.probs
    if pair.f_at_zero == -math.inf and np.any(probs <= 0):
        raise SupportMismatchError(
            f"{pair.name}: reference has zero-probability outcomes")
    fp = pair.f(probs)
    u = Functional(value=lambda q: float(q @ fp),
                   grad=lambda q: fp)
    v = Functional(value=lambda q: float(np.sum(pair.g(q))),
                   grad=lambda q: pair.g_prime(q))
    return u, v


def gram_cr_nrr_functionals(p: CategoricalDist, order: int
                            ) -> tuple[Functional, Functional]:
    """Exact gram-space CR and NRR as functionals of the text distribution."""
    a, _ = gram_matrix(p.labels, order)
    p_gram = a @ p.probs
    cr_coeff = a.T @ p_gram
    u = Functional(value=lambda q: float(q @ cr_coeff),
                   grad=lambda q: cr_coeff)
    v = Functional(value=lambda q: float(-np.sum((a @ q) ** 2)),
                   grad=lambda q: -2.0 * (a.T @ (a @ q)))
    return u, v


# ---------------------------------------------------------------------------
# exact expected BLEU / self-BLEU tensors on enumerable spaces

def _count_arrays(labels, max_order: int) -> list[np.ndarray]:
    """Per-order gram count matrices of shape (n_texts, n_grams_seen)."""
    out = []
    for order in range(1, max_order + 1):
        gram_ids: dict = {}
        rows = []
        for text in labels:
            row: dict = {}
            for k in range(len(text) - order + 1):
                g = tuple(text[k:k + order])
                gid = gram_ids.setdefault(g, len(gram_ids))
                row[gid] = row.get(gid, 0) + 1
            rows.append(row)
        counts = np.zeros((len(labels), max(len(gram_ids), 1)), dtype=np.int16)
        for t, row in enumerate(rows):
            for gid, c in row.items():
                counts[t, gid] = c
        out.append(counts)
    return out


def _geometric_mean_bleu(log_terms: list[np.ndarray],
                         positive: np.ndarray) -> np.ndarray:
    stacked = np.stack(log_terms)
    with np.errstate(invalid="ignore"):
        score = np.exp(stacked.mean(axis=0))
    return np.where(positive, score, 0.0)


def expected_bleu_coefficients(labels, p_probs: np.ndarray, ref_count: int,
                               max_order: int) -> np.ndarray:
    """Coefficient vector EB with E[BLEU] = q . EB for one candidate draw.

    Supports reference counts 1 and 2; all labels must share one length, so
    the brevity penalty is inert.
    """
    if ref_count not in (1, 2):
        raise ValueError("ref_count must be 1 or 2")
    lengths = {len(lab) for lab in labels}
    if len(lengths) != 1:
        raise ValueError("expected equal-length labels")
    length = lengths.pop()
    counts = _count_arrays(labels, max_order)

    log_terms = []
    positive = None
    for order, cnt in enumerate(counts, start=1):
        denom = length - order + 1
        if denom <= 0:
            continue
        if ref_count == 1:
            merged = cnt[None, :, :]                      # (1, N, G)
            clipped = np.minimum(cnt[:, None, :], merged).sum(axis=-1)
        else:
            merged = np.maximum(cnt[:, None, :], cnt[None, :, :])  # (N, N, G)
            clipped = np.minimum(cnt[:, None, None, :],
                                 merged[None, :, :, :]).sum(axis=-1)
        pn = clipped / denom
        pos = pn > 0
        positive = pos if positive is None else (positive & pos)
        with np.errstate(divide="ignore"):
            log_terms.append(np.log(pn))
    bleu = _geometric_mean_bleu(log_terms, positive)
    if ref_count == 1:
        return bleu @ p_probs
    return np.einsum("crs,r,s->c", bleu, p_probs, p_probs)


def selfbleu_pair_matrix(labels, max_order: int) -> np.ndarray:
    """Symmetric matrix S with E[SelfBLEU] = q . S q for candidate pairs."""
    lengths = {len(lab) for lab in labels}
    if len(lengths) != 1:
        raise ValueError("expected equal-length labels")
    length = lengths.pop()
    counts = _count_arrays(labels, max_order)

    log_terms = []
    positive = None
    for order, cnt in enumerate(counts, start=1):
        denom = length - order + 1
        if denom <= 0:
            continue
        clipped = np.minimum(cnt[:, None, :], cnt[None, :, :]).sum(axis=-1)
        pn = clipped / denom
        pos = pn > 0
        positive = pos if positive is None else (positive & pos)
        with np.errstate(divide="ignore"):
            log_terms.append(np.log(pn))
    one_way = _geometric_mean_bleu(log_terms, positive)   # BLEU(c1 | ref c2)
    return 0.5 * (one_way + one_way.T)


def bleu_nsbleu_functionals(p: CategoricalDist, ref_count: int = 2,
                            cand_size: int = 2, max_order: int = 2
                            ) -> tuple[Functional, Functional]:
    """Exact expected BLEU quality and expected NSBLEU diversity functionals.

    Quality uses a single candidate draw against ``ref_count`` reference
    draws, so it is linear in q; diversity uses a candidate pair, so it is
    quadratic.
    """
    if cand_size != 2:
        raise ValueError("closed tensors are available for cand_size=2 only")
    eb = expected_bleu_coefficients(p.labels, p.probs, ref_count, max_order)
    s = selfbleu_pair_matrix(p.labels, max_order)
    u = Functional(value=lambda q: float(q @ eb),
                   grad=lambda q: eb)
    v = Functional(value=lambda q: float(-q @ (s @ q)),
                   grad=lambda q: -2.0 * (s @ q))
    return u, v
