"""Pareto frontier of the joint quality/diversity maximization problem.

Every Pareto-optimal distribution (for non-uniform reference P and a
frontier-eligible pair) has the fixed-point form

    Q_i = clamp(g'^{-1}(w * f(P_i) + b)),    w <= 0,

where the clamp sends arguments at or above g'(0) to zero.  For a given w the
offset b is the unique root of T(w, b) = sum_i Q_i = 1, found by bisection
(T is continuous and non-increasing in b).  Sweeping w from 0 down to the
saturation bound B traces the whole frontier: quality rises and diversity
falls monotonically until, past B, the solution freezes at the maximal-quality
point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distributions import CategoricalDist
from .errors import DegenerateInputError, NumericError
from .metric_pairs import MetricPair, diversity, quality

_UNIFORM_TOL = 1e-12


class Dominance(enum.Enum):
    Q1_DOMINATES = "q1_dominates"
    Q2_DOMINATES = "q2_dominates"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


@dataclass(frozen=True)
class FrontierPoint:
    """One Pareto optimum: multiplier w, offset b, the distribution, and its
    quality u and diversity v."""

    w: float
    b: float
    q: CategoricalDist
    u: float
    v: float


@dataclass(frozen=True)
class FrontierSweep:
    """Frontier points ordered by strictly decreasing w from 0 toward B."""

    points: tuple[FrontierPoint, ...]
    B: float


def clamped_g_prime_inv(pair: MetricPair, y: np.ndarray) -> np.ndarray:
    """Inverse of g' extended with the zero clamp at g'(0)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.zeros_like(y)
    live = y < pair.g_prime_at_zero
    if np.any(live):
        with np.errstate(over="ignore"):
            out[live] = pair.g_prime_inv(y[live])
    return np.maximum(out, 0.0)


def _is_uniform(probs: np.ndarray) -> bool:
    return float(probs.max() - probs.min()) <= _UNIFORM_TOL


def _require_eligible(pair: MetricPair) -> None:
    if not pair.frontier_eligible:
        raise ValueError(
            f"{pair.name} failed kernel validation and cannot use the "
            f"frontier solver; use the penalty optimizer instead")


def _participating(pair: MetricPair, probs: np.ndarray) -> np.ndarray:
    # kernels unbounded below at 0 force Q_i = 0 wherever P_i = 0
    if pair.f_at_zero == -math.inf:
        return probs > 0
    return np.ones_like(probs, dtype=bool)


def _t_value(pair: MetricPair, fp: np.ndarray, w: float, b: float) -> float:
    with np.errstate(over="ignore"):
        return float(np.sum(clamped_g_prime_inv(pair, w * fp + b)))


def solve_b(pair: MetricPair, p: CategoricalDist, w: float, *,
            tol: float = 1e-10, max_iter: int = 200) -> float:
    """Offset b such that the frontier distribution at w sums to one.

    Bisection on the bracket [g'(1/K) - w f_min, g'(0) - w f_max]; when
    g'(0) is infinite the upper end is grown geometrically until the total
    mass drops below one.
    """
    _require_eligible(pair)
    probs = p.probs
    if _is_uniform(probs):
        raise DegenerateInputError("frontier is undefined for uniform input")
    if w > 0:
        raise ValueError("w must be non-positive")
    n = probs.size
    if w == 0.0:
        # all coordinates equal; b = g'(1/N) normalizes exactly
        return float(pair.g_prime(np.array([1.0 / n]))[0])

    mask = _participating(pair, probs)
    fp = pair.f(probs[mask])
    k = fp.size
    f_min, f_max = float(fp.min()), float(fp.max())
    lo = float(pair.g_prime(np.array([1.0 / k]))[0]) - w * f_min
    if math.isfinite(pair.g_prime_at_zero):
        hi = pair.g_prime_at_zero - w * f_max
    else:
        hi = lo
        step = 1.0
        for _ in range(max_iter):
            hi = hi + step
            step *= 2.0
            if _t_value(pair, fp, w, hi) < 1.0:
                break
        else:
            raise NumericError("could not bracket the mass equation")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _t_value(pair, fp, w, mid) >= 1.0:
            lo = mid
        else:
            hi = mid

    b = min((lo, hi), key=lambda bb: abs(_t_value(pair, fp, w, bb) - 1.0))
    if abs(_t_value(pair, fp, w, b) - 1.0) >= tol:
        raise NumericError(f"mass equation not solved to {tol} at w={w}")
    return float(b)


def frontier_point(pair: MetricPair, p: CategoricalDist, w: float) -> FrontierPoint:
    """Assemble the Pareto optimum at multiplier w."""
    b = solve_b(pair, p, w)
    probs = p.probs
    n = probs.size
    if w == 0.0:
        q_raw = np.full(n, 1.0 / n)
    else:
        mask = _participating(pair, probs)
        q_raw = np.zeros(n)
        q_raw[mask] = clamped_g_prime_inv(pair, w * pair.f(probs[mask]) + b)
    q = CategoricalDist(q_raw, labels=p.labels)
    return FrontierPoint(w=float(w), b=b, q=q,
                         u=quality(pair, q, p), v=diversity(pair, q))


def compute_B(pair: MetricPair, p: CategoricalDist) -> float:
    """Saturation bound: below B the frontier freezes at maximal quality.

    Returns -inf when g'(0) is infinite (the clamp never activates, so the
    frontier never saturates).
    """
    _require_eligible(pair)
    probs = p.probs
    if _is_uniform(probs):
        raise DegenerateInputError("saturation bound undefined for uniform input")
    if not math.isfinite(pair.g_prime_at_zero):
        return -math.inf
    p_m1 = float(probs.max())
    m_count = int(np.sum(probs == p_m1))
    p_m2 = float(probs[probs < p_m1].max())
    f_m1 = float(pair.f(np.array([p_m1]))[0])
    f_m2 = pair.f_at_zero if p_m2 == 0.0 else float(pair.f(np.array([p_m2]))[0])
    num = float(pair.g_prime(np.array([1.0 / m_count]))[0]) - pair.g_prime_at_zero
    denom = f_m1 - f_m2
    if math.isinf(denom):
        return 0.0
    return num / denom


def sweep(pair: MetricPair, p: CategoricalDist, n_points: int,
          w_min: float = -50.0) -> FrontierSweep:
    """Frontier points at w evenly spaced on [max(B, w_min), 0].

    For uniform p the frontier collapses to the single optimum Q = p, which is
    returned directly.  A monotonicity violation beyond 1e-9 between adjacent
    points signals an underresolved root solve and raises.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if w_min > 0:
        raise ValueError("w_min must be non-positive")
    probs = p.probs
    if _is_uniform(probs):
        b = float(pair.g_prime(np.array([1.0 / probs.size]))[0])
        pt = FrontierPoint(w=0.0, b=b, q=p, u=quality(pair, p, p),
                           v=diversity(pair, p))
        return FrontierSweep(points=(pt,), B=0.0)

    bound = compute_B(pair, p)
    low = max(bound, w_min)
    ws = np.linspace(0.0, low, n_points)
    points = tuple(frontier_point(pair, p, float(w)) for w in ws)
    for a, bb in zip(points, points[1:]):
        # w decreases along the sweep: quality must not drop, diversity must
        # not rise, beyond numerical noise
        if bb.u < a.u - 1e-9 or bb.v > a.v + 1e-9:
            raise NumericError(
                f"frontier monotonicity violated between w={a.w} and w={bb.w}")
    return FrontierSweep(points=points, B=bound)


def dominates(pair: MetricPair, p: CategoricalDist, q1: CategoricalDist,
              q2: CategoricalDist, tol: float = 1e-12) -> Dominance:
    """Compare two candidate distributions on (quality, diversity).

    One dominates the other when it is at least as good on both axes and
    strictly better on one, up to ``tol``.
    """
    u1, v1 = quality(pair, q1, p), diversity(pair, q1)
    u2, v2 = quality(pair, q2, p), diversity(pair, q2)
    du, dv = u1 - u2, v1 - v2
    if abs(du) <= tol and abs(dv) <= tol:
        return Dominance.EQUAL
    if (du > tol and dv >= -tol) or (du >= -tol and dv > tol):
        return Dominance.Q1_DOMINATES
    if (du < -tol and dv <= tol) or (du <= tol and dv < -tol):
        return Dominance.Q2_DOMINATES
    return Dominance.INCOMPARABLE
