"""Divergence-compatibility measurement: QDisc, DRate, and witnesses.

QDisc is the largest quality surplus over the reference distribution
achievable without giving up its diversity.  For kernel pairs with a known
frontier it is found by binary search on the multiplier; for arbitrary
differentiable metric functionals a penalty objective

    U(Q) - lambda * max(0, V(P) - V(Q))

is maximized by gradient ascent with momentum over a softmax parametrization
of the simplex.  Penalty results are lower bounds.  Empirical curves from
corpus experiments are handled by linear interpolation at the reference
diversity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .distributions import CategoricalDist
from .frontier import compute_B, frontier_point
from .functionals import Functional, pair_functionals
from .metric_pairs import MetricPair, diversity, quality
from .seeding import generator

METHOD_FRONTIER = "frontier_search"
METHOD_PENALTY = "penalty_opt"
METHOD_CURVE = "curve_interp"


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty-optimizer settings.

    ``lam`` weights the diversity-shortfall penalty; one restart always starts
    at the reference distribution, the rest at seeded random logits.  A run is
    deterministic given the config and inputs.
    """

    lam: float = 2.0
    learning_rate: float = 0.05
    momentum: float = 0.9
    max_steps: int = 20000
    seed: int = 0
    restarts: int = 8
    grad_tol: float = 1e-12
    grad_clip: float = 10.0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.max_steps < 1 or self.restarts < 1:
            raise ValueError("max_steps and restarts must be positive")
        if self.grad_clip <= 0:
            raise ValueError("grad_clip must be positive")


@dataclass
class CompatReport:
    """QDisc and ratio summary, with the best feasible witness if any.

    ``traces`` holds per-restart (step, U, V, objective) arrays for penalty
    runs; it is not part of the serialized report.
    """

    qdisc: float
    drate: float | None
    self_ratio: float | None
    ref_ratio: float | None
    method: str
    witness_q: CategoricalDist | None
    traces: tuple[np.ndarray, ...] | None = field(default=None, repr=False)

    def to_json(self) -> str:
        payload = {
            "qdisc": self.qdisc,
            "drate": self.drate,
            "self_ratio": self.self_ratio,
            "ref_ratio": self.ref_ratio,
            "method": self.method,
            "witness": None if self.witness_q is None
            else [float(x) for x in self.witness_q.probs],
        }
        return json.dumps(payload, sort_keys=True)


# ---------------------------------------------------------------------------
# frontier-based search

def drate_denominator_generalform(pair: MetricPair, p: CategoricalDist) -> float:
    """Quality range of the frontier: f at the mode minus the uniform-model
    quality.  Zero (degenerate) for uniform input.  Outcomes where the kernel
    is unbounded below are excluded from the mean."""
    probs = p.probs
    if pair.f_at_zero == -np.inf:
        probs = probs[probs > 0]
    fp = pair.f(probs)
    return float(fp.max() - fp.mean())


def qdisc_frontier(pair: MetricPair, p: CategoricalDist,
                   w_min: float = -50.0) -> CompatReport:
    """QDisc by binary search on the frontier multiplier.

    Diversity along the frontier rises monotonically with w, so the multiplier
    matching the reference diversity is found by bisection on [max(B, w_min),
    0]; the witness is taken from the feasible (at least as diverse) side.
    """
    u_p = quality(pair, p, p)
    v_p = diversity(pair, p)
    top = frontier_point(pair, p, 0.0)
    if v_p > top.v + 1e-9:
        raise ValueError("input diversity exceeds the uniform maximum; "
                         "corrupted distribution")
    low_w = max(compute_B(pair, p), w_min)
    bottom = frontier_point(pair, p, low_w)
    if bottom.v >= v_p:
        witness = bottom
    else:
        hi, lo = 0.0, low_w
        witness = top
        for _ in range(200):
            mid = 0.5 * (hi + lo)
            if mid >= hi or mid <= lo:
                break
            pt = frontier_point(pair, p, mid)
            if pt.v >= v_p:
                hi = mid
                witness = pt
            else:
                lo = mid
    qdisc = max(0.0, witness.u - u_p)
    denom = drate_denominator_generalform(pair, p)
    return CompatReport(
        qdisc=qdisc,
        drate=qdisc / denom if denom > 0 else None,
        self_ratio=qdisc / u_p if u_p > 0 else None,
        ref_ratio=None,
        method=METHOD_FRONTIER,
        witness_q=witness.q,
    )


# ---------------------------------------------------------------------------
# penalty optimizer

def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def _ascend(u_fn: Functional, v_fn: Functional | None, lam: float,
            v_floor: float, z0: np.ndarray, cfg: PenaltyConfig):
    """Gradient ascent with momentum on the penalized objective.

    The free vector z parametrizes Q = softmax(z) and moves along the
    simplex-tangent gradient s - (s . Q), the natural direction for this
    parametrization: coordinates the optimum excludes decay exponentially
    instead of polynomially.  Convergence is declared when the chain-rule
    gradient Q * (s - s . Q) vanishes.

    Returns (trace, best_obj, best_obj_q, feasible_best) where feasible_best
    is the top (u, q) among iterates with v >= v_floor, or None.
    """
    z = z0.astype(float).copy()
    vel = np.zeros_like(z)
    trace = np.empty((cfg.max_steps, 3))
    best_obj = -np.inf
    best_obj_q = None
    feas_u = -np.inf
    feas_q = None
    steps = 0
    for step in range(cfg.max_steps):
        q = _softmax(z)
        u = u_fn.value(q)
        if v_fn is None:
            v = 0.0
            shortfall = 0.0
            grad_q = u_fn.grad(q)
        else:
            v = v_fn.value(q)
            shortfall = v_floor - v
            grad_q = u_fn.grad(q).copy()
            if shortfall > 0:
                grad_q += lam * v_fn.grad(q)
        obj = u - lam * max(0.0, shortfall)
        trace[step] = (u, v, obj)
        steps = step + 1
        if obj > best_obj:
            best_obj = obj
            best_obj_q = q
        if v_fn is not None and v >= v_floor and u > feas_u:
            feas_u = u
            feas_q = q
        tangent = grad_q - grad_q @ q
        if np.max(np.abs(q * tangent)) < cfg.grad_tol:
            break
        peak = np.max(np.abs(tangent))
        if peak > cfg.grad_clip:
            # keeps extreme penalty weights from blowing up the iterates
            tangent = tangent * (cfg.grad_clip / peak)
        vel = cfg.momentum * vel + cfg.learning_rate * tangent
        z = z + vel
    feasible = None if feas_q is None else (feas_u, feas_q)
    return trace[:steps], best_obj, best_obj_q, feasible


def _restart_logits(p_probs: np.ndarray, cfg: PenaltyConfig, restart: int
                    ) -> np.ndarray:
    if restart == 0:
        return np.log(np.clip(p_probs, 1e-300, None))
    rng = generator(cfg.seed, "penalty", restart)
    return rng.normal(0.0, 1.0, p_probs.size)


def qdisc_penalty(quality_fn: Functional, diversity_fn: Functional,
                  p: CategoricalDist, cfg: PenaltyConfig,
                  denominator: float | None = None,
                  threads: int = 1) -> CompatReport:
    """QDisc lower bound for arbitrary differentiable metric functionals.

    Maximizes quality under a penalized diversity floor from several seeded
    restarts (the first at the reference itself).  Only iterates that are at
    least as diverse as the reference and strictly better in quality count
    toward the bound; with no such iterate the bound is 0 and no witness is
    attached.  Restarts are independent; with threads > 1 they run in a
    thread pool, and the max-reduction keeps the result identical.
    """
    u_p = quality_fn.value(p.probs)
    v_p = diversity_fn.value(p.probs)

    def run_restart(restart: int):
        z0 = _restart_logits(p.probs, cfg, restart)
        trace, _, _, feasible = _ascend(quality_fn, diversity_fn, cfg.lam,
                                        v_p, z0, cfg)
        return trace, feasible

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_restart, range(cfg.restarts)))
    else:
        results = [run_restart(r) for r in range(cfg.restarts)]

    traces = []
    best_u = -np.inf
    best_q = None
    for trace, feasible in results:
        traces.append(trace)
        if feasible is not None and feasible[0] > best_u:
            best_u, best_q = feasible
    improved = best_q is not None and best_u > u_p
    qdisc = best_u - u_p if improved else 0.0
    witness = CategoricalDist(best_q, labels=p.labels) if improved else None
    drate = None
    if denominator is not None and denominator > 0:
        drate = qdisc / denominator
    return CompatReport(
        qdisc=qdisc,
        drate=drate,
        self_ratio=qdisc / u_p if u_p > 0 else None,
        ref_ratio=None,
        method=METHOD_PENALTY,
        witness_q=witness,
        traces=tuple(traces),
    )


def maximize_functional(fn: Functional, n: int, cfg: PenaltyConfig,
                        init_probs: np.ndarray | None = None
                        ) -> tuple[CategoricalDist, float]:
    """Maximize one functional over the simplex by the same ascent engine."""
    best_val = -np.inf
    best_q = None
    for restart in range(cfg.restarts):
        if restart == 0 and init_probs is not None:
            z0 = np.log(np.clip(init_probs, 1e-300, None))
        else:
            z0 = generator(cfg.seed, "maximize", restart).normal(0.0, 1.0, n)
        _, obj, q, _ = _ascend(fn, None, cfg.lam, 0.0, z0, cfg)
        if obj > best_val:
            best_val, best_q = obj, q
    return CategoricalDist(best_q), float(best_val)


def maximize_combined(pair: MetricPair, p: CategoricalDist, alpha: float,
                      cfg: PenaltyConfig) -> CategoricalDist:
    """Maximize alpha*U + (1-alpha)*V over the simplex for a kernel pair."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    u_fn, v_fn = pair_functionals(pair, p)
    combined = Functional(
        value=lambda q: alpha * u_fn.value(q) + (1.0 - alpha) * v_fn.value(q),
        grad=lambda q: alpha * u_fn.grad(q) + (1.0 - alpha) * v_fn.grad(q),
    )
    q, _ = maximize_functional(combined, p.n, cfg, init_probs=p.probs)
    return q


# ---------------------------------------------------------------------------
# empirical-curve interpolation

def qdisc_curve_interp(curve, real_point, epsilons=None,
                       denominator: float | None = None) -> CompatReport:
    """QDisc of a real (U, V) point against a piecewise-linear metric curve.

    ``curve`` is a sequence of (U, V) points monotone in V; the curve quality
    is interpolated at the real point's diversity.  ``epsilons``, when given,
    labels the curve points and enables the reference ratio (quality drop from
    the first noise step).  Queries outside the curve's diversity span are
    refused.
    """
    pts = [(float(u), float(v)) for u, v in curve]
    if len(pts) < 2:
        raise ValueError("curve needs at least 2 points")
    us = np.array([u for u, _ in pts])
    vs = np.array([v for _, v in pts])
    eps = None if epsilons is None else list(epsilons)
    if np.all(np.diff(vs) < 0):
        us, vs = us[::-1], vs[::-1]
        if eps is not None:
            eps = eps[::-1]
    elif not np.all(np.diff(vs) > 0):
        raise ValueError("curve must be strictly ordered by V")
    u_real, v_real = float(real_point[0]), float(real_point[1])
    if not vs[0] - 1e-12 <= v_real <= vs[-1] + 1e-12:
        from .errors import ExtrapolationError
        raise ExtrapolationError(
            f"V={v_real} outside curve span [{vs[0]}, {vs[-1]}]")
    u_interp = float(np.interp(v_real, vs, us))
    qdisc = max(0.0, u_interp - u_real)

    ref_ratio = None
    if eps is not None:
        by_eps = {round(float(e), 12): float(u) for e, u in zip(eps, us)}
        if 0.0 in by_eps and 0.2 in by_eps:
            gap = by_eps[0.0] - by_eps[0.2]
            if gap > 0:
                ref_ratio = qdisc / gap
    return CompatReport(
        qdisc=qdisc,
        drate=qdisc / denominator if denominator and denominator > 0 else None,
        self_ratio=qdisc / u_real if u_real > 0 else None,
        ref_ratio=ref_ratio,
        method=METHOD_CURVE,
        witness_q=None,
    )
