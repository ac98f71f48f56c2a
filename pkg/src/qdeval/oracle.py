"""Synthetic ground-truth text distributions from a seeded recurrent cell.

A single-layer LSTM with Gaussian(0, sigma^2) weights defines per-step token
distributions; enumerating every sequence of a fixed length yields an exact
joint categorical distribution.  Larger sigma gives sharper (lower entropy)
distributions, sigma -> 0 tends to uniform.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .distributions import CategoricalDist
from .errors import CapacityError
from .seeding import generator

MAX_OUTCOMES = 2 ** 22


@dataclass(frozen=True)
class OracleSpec:
    """Parameters of the enumerable oracle distribution."""

    vocab_size: int
    length: int
    hidden_dim: int = 8
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.vocab_size < 1 or self.length < 1 or self.hidden_dim < 1:
            raise ValueError("vocab_size, length and hidden_dim must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.vocab_size ** self.length > MAX_OUTCOMES:
            raise CapacityError(
                f"{self.vocab_size}^{self.length} outcomes exceed the "
                f"enumeration cap of {MAX_OUTCOMES}")


class _LstmCell:
    """Minimal LSTM cell with all parameters drawn N(0, sigma^2)."""

    def __init__(self, spec: OracleSpec):
        rng = generator(spec.seed, "oracle")
        v, h = spec.vocab_size, spec.hidden_dim
        s = spec.sigma
        # one extra embedding row acts as the start-of-sequence input
        self.embed = rng.normal(0.0, s, size=(v + 1, h))
        self.w_x = rng.normal(0.0, s, size=(4 * h, h))
        self.w_h = rng.normal(0.0, s, size=(4 * h, h))
        self.bias = rng.normal(0.0, s, size=4 * h)
        self.w_out = rng.normal(0.0, s, size=(v, h))
        self.b_out = rng.normal(0.0, s, size=v)
        self.hidden = h

    def step(self, x, h, c):
        z = x @ self.w_x.T + h @ self.w_h.T + self.bias
        hd = self.hidden
        i = _sigmoid(z[:, :hd])
        f = _sigmoid(z[:, hd:2 * hd])
        o = _sigmoid(z[:, 2 * hd:3 * hd])
        g = np.tanh(z[:, 3 * hd:])
        c_new = f * c + i * g
        h_new = o * np.tanh(c_new)
        return h_new, c_new

    def token_log_probs(self, h):
        logits = h @ self.w_out.T + self.b_out
        logits = logits - logits.max(axis=1, keepdims=True)
        return logits - np.log(np.exp(logits).sum(axis=1, keepdims=True))


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def oracle_enumerate(spec: OracleSpec) -> CategoricalDist:
    """Exact joint distribution over all sequences of length ``spec.length``.

    Sequences are indexed in lexicographic order (first token most
    significant) and attached as labels.  Reproducible: the result is a pure
    function of the OracleSpec.
    """
    cell = _LstmCell(spec)
    v, length, hd = spec.vocab_size, spec.length, spec.hidden_dim

    h = np.zeros((1, hd))
    c = np.zeros((1, hd))
    h, c = cell.step(cell.embed[v][None, :], h, c)
    log_joint = cell.token_log_probs(h)[0]           # log p(t_1)

    for _ in range(1, length):
        k = h.shape[0]
        # each prefix state branches on the token just emitted
        h = np.repeat(h, v, axis=0)
        c = np.repeat(c, v, axis=0)
        x = np.tile(cell.embed[:v], (k, 1))
        h, c = cell.step(x, h, c)
        log_next = cell.token_log_probs(h)           # (k*v, v)
        log_joint = (log_joint.reshape(-1, 1) + log_next).reshape(-1)

    labels = tuple(itertools.product(range(v), repeat=length))
    return CategoricalDist(np.exp(log_joint), labels=labels)
