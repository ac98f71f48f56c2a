"""Explicit categorical distributions over small text spaces.

A :class:`CategoricalDist` is a plain probability vector, optionally labelled
with the token sequence each outcome stands for.  Construction normalizes and
validates; instances are immutable and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeding import generator

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class CategoricalDist:
    """Probability vector over an enumerable outcome space.

    ``labels``, when present, gives each outcome's token-id sequence and must
    be distinct and aligned with ``probs``.
    """

    probs: np.ndarray
    labels: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        if probs.size < 1:
            raise ValueError("distribution needs at least one outcome")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite and non-negative")
        total = float(probs.sum())
        if total <= 0:
            raise ValueError("probabilities sum to zero")
        if abs(total - 1.0) > _SUM_TOL:
            probs = probs / total
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if self.labels is not None:
            labels = tuple(tuple(int(t) for t in lab) for lab in self.labels)
            if len(labels) != probs.size:
                raise ValueError("labels and probs must have equal length")
            if len(set(labels)) != len(labels):
                raise ValueError("labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.probs.size)

    def support(self) -> np.ndarray:
        """Indices of outcomes with positive probability."""
        return np.flatnonzero(self.probs > 0)

    @classmethod
    def uniform(cls, n: int, labels=None) -> "CategoricalDist":
        return cls(np.full(n, 1.0 / n), labels=labels)


def random_toy(n_categories: int, seed: int) -> CategoricalDist:
    """Toy distribution: i.i.d. uniform(0,1) weights, normalized.

    Deterministic for a given seed.
    """
    if n_categories < 2:
        raise ValueError("need at least 2 categories")
    rng = generator(seed, "toy")
    return CategoricalDist(rng.random(n_categories))


def temper(dist: CategoricalDist, beta: float) -> CategoricalDist:
    """Sharpen or flatten a distribution: q_i proportional to p_i**beta.

    beta=1 returns the input unchanged; beta=0 is uniform over the support.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if beta == 1.0:
        return dist
    p = dist.probs
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] ** beta
    return CategoricalDist(out, labels=dist.labels)


def mix_with_noise(base: CategoricalDist, epsilon: float,
                   noise: CategoricalDist) -> CategoricalDist:
    """Pointwise convex combination (1-eps)*base + eps*noise."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if base.n != noise.n:
        raise ValueError("distributions live on different outcome spaces")
    if base.labels is not None and noise.labels is not None \
            and base.labels != noise.labels:
        raise ValueError("distributions live on different outcome spaces")
    mixed = (1.0 - epsilon) * base.probs + epsilon * noise.probs
    return CategoricalDist(mixed, labels=base.labels or noise.labels)


def entropy(dist: CategoricalDist) -> float:
    """Shannon entropy in nats, with 0*log(0) taken as 0."""
    p = dist.probs[dist.probs > 0]
    return float(-np.sum(p * np.log(p)))


def write_dist(dist: CategoricalDist, path) -> None:
    """Write a distribution as UTF-8 text, 17 significant digits per entry.

    With labels the format is ``label<TAB>probability`` where the label is the
    space-joined token-id sequence; otherwise one probability per line.
    """
    with open(path, "w", encoding="utf-8") as fh:
        if dist.labels is not None:
            for lab, p in zip(dist.labels, dist.probs):
                fh.write("%s\t%.17g\n" % (" ".join(str(t) for t in lab), p))
        else:
            for p in dist.probs:
                fh.write("%.17g\n" % p)


def read_dist(path) -> CategoricalDist:
    """Read a distribution written by :func:`write_dist`."""
    probs: list[float] = []
    labels: list[tuple[int, ...]] = []
    labelled = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if labelled is None:
                labelled = len(parts) == 2
            if labelled:
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected label<TAB>probability")
                labels.append(tuple(int(t) for t in parts[0].split()))
                probs.append(float(parts[1]))
            else:
                if len(parts) != 1:
                    raise ValueError(f"{path}:{lineno}: expected one probability per line")
                probs.append(float(parts[0]))
    if not probs:
        raise ValueError(f"{path}: empty distribution file")
    return CategoricalDist(np.array(probs), labels=tuple(labels) if labelled else None)
