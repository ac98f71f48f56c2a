"""Quality/diversity metric pairs in kernel form.

A pair consists of an increasing quality kernel ``f`` applied to reference
probabilities and a concave diversity kernel ``g`` applied to model
probabilities:

    U(Q) = sum_i Q_i * f(P_i)        quality
    V(Q) = sum_i g(Q_i)              diversity

A pair induces a divergence exactly when ``g`` is an affine-integral transform
of ``f``, i.e. g(x) = w0 * int_0^x f(u) du + b0 * x with w0 <= 0.  That
condition is checked numerically by :func:`compatibility_analytic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .distributions import CategoricalDist
from .errors import NotADivergenceError, SupportMismatchError, UnsupportedKernelError
from .seeding import generator

Kernel = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MetricPair:
    """A quality kernel f and diversity kernel g with calculus accessors.

    ``g_prime_at_zero`` may be ``math.inf`` (e.g. entropy-style kernels);
    ``F`` is the cumulative integral of f from 0 and may be None, in which
    case adaptive quadrature is used where needed.  ``frontier_eligible``
    records whether f was found strictly increasing and g strictly concave on
    the validation grid, which the trade-off solver requires.
    """

    name: str
    f: Kernel
    g: Kernel
    g_prime: Kernel
    g_prime_at_zero: float
    g_prime_inv: Kernel
    F: Kernel | None = None
    params: dict = field(default_factory=dict)
    f_at_zero: float = 0.0
    frontier_eligible: bool = True


@dataclass(frozen=True)
class RationalityReport:
    """Outcome of the kernel sanity checks, with a witness on failure."""

    passed: bool
    f_increasing: bool
    g_prime_decreasing: bool
    perturbations_ok: bool
    n_perturbations: int
    witness: tuple[float, float] | None = None


def _validation_grid(grid_size: int) -> np.ndarray:
    return np.linspace(1e-6, 1.0 - 1e-6, grid_size)


def _check_eligibility(f: Kernel, g_prime: Kernel, g_prime_inv: Kernel,
                       grid_size: int = 256) -> bool:
    xs = _validation_grid(grid_size)
    fv = f(xs)
    gp = g_prime(xs)
    if not (np.all(np.diff(fv) > 0) and np.all(np.diff(gp) < 0)):
        return False
    back = g_prime_inv(gp)
    return bool(np.max(np.abs(back - xs)) < 1e-10)


def make_pair(name: str, f: Kernel, g: Kernel, g_prime: Kernel,
              g_prime_at_zero: float, g_prime_inv: Kernel | None = None,
              F: Kernel | None = None, params: dict | None = None,
              f_at_zero: float = 0.0) -> MetricPair:
    """Assemble a pair, deriving a numeric inverse for g' if none is given,
    and record whether it qualifies for the frontier solver."""
    if g_prime_inv is None:
        g_prime_inv = _numeric_g_prime_inverse(g_prime)
    eligible = _check_eligibility(f, g_prime, g_prime_inv)
    return MetricPair(name=name, f=f, g=g, g_prime=g_prime,
                      g_prime_at_zero=float(g_prime_at_zero),
                      g_prime_inv=g_prime_inv, F=F, params=params or {},
                      f_at_zero=float(f_at_zero), frontier_eligible=eligible)


def _numeric_g_prime_inverse(g_prime: Kernel) -> Kernel:
    """Bisection inverse of a decreasing g' on [0, 1].

    Below g'(1) the inverse is continued linearly past 1 so that root
    bracketing against it stays monotone.
    """
    g_at_1 = float(g_prime(np.array([1.0]))[0])

    def inv(y: np.ndarray) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty_like(y)
        for k, yk in enumerate(y):
            if yk <= g_at_1:
                out[k] = 1.0 + (g_at_1 - yk)
                continue
            lo, hi = 0.0, 1.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if float(g_prime(np.array([mid]))[0]) > yk:
                    lo = mid
                else:
                    hi = mid
            out[k] = 0.5 * (lo + hi)
        return out

    return inv


# ---------------------------------------------------------------------------
# built-in kernels

def _g_neg_xlogx(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = -x[pos] * np.log(x[pos])
    return out


def _F_log(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos]) - x[pos]
    return out


def ll_se() -> MetricPair:
    """Log-likelihood quality with Shannon-entropy diversity."""
    return make_pair(
        "ll-se",
        f=np.log,
        g=_g_neg_xlogx,
        g_prime=lambda x: -np.log(x) - 1.0,
        g_prime_at_zero=math.inf,
        g_prime_inv=lambda y: np.exp(-1.0 - y),
        F=_F_log,
        f_at_zero=-math.inf,
    )


def cr_nrr() -> MetricPair:
    """Coverage-rate quality with negative-repetition-rate diversity."""
    return make_pair(
        "cr-nrr",
        f=lambda x: np.asarray(x, dtype=float),
        g=lambda x: -np.asarray(x, dtype=float) ** 2,
        g_prime=lambda x: -2.0 * np.asarray(x, dtype=float),
        g_prime_at_zero=0.0,
        g_prime_inv=lambda y: -np.asarray(y, dtype=float) / 2.0,
        F=lambda x: np.asarray(x, dtype=float) ** 2 / 2.0,
    )


def ll_nrr() -> MetricPair:
    """Mismatched pair: log-likelihood quality with repetition diversity."""
    return make_pair(
        "ll-nrr",
        f=np.log,
        g=lambda x: -np.asarray(x, dtype=float) ** 2,
        g_prime=lambda x: -2.0 * np.asarray(x, dtype=float),
        g_prime_at_zero=0.0,
        g_prime_inv=lambda y: -np.asarray(y, dtype=float) / 2.0,
        F=_F_log,
        f_at_zero=-math.inf,
    )


def cr_se() -> MetricPair:
    """Mismatched pair: coverage-rate quality with entropy diversity."""
    return make_pair(
        "cr-se",
        f=lambda x: np.asarray(x, dtype=float),
        g=_g_neg_xlogx,
        g_prime=lambda x: -np.log(x) - 1.0,
        g_prime_at_zero=math.inf,
        g_prime_inv=lambda y: np.exp(-1.0 - y),
        F=lambda x: np.asarray(x, dtype=float) ** 2 / 2.0,
    )


def bleu_expect(ref_size: int, cand_size: int) -> MetricPair:
    """Single-token expected BLEU/negative-self-BLEU kernels.

    f(x) = 1 - (1-x)^R for reference-set size R; g(x) = -x + x(1-x)^(C-1) for
    candidate-set size C.  Strict concavity of g holds only for C <= 2, so
    larger C yields a pair usable with the penalty optimizer but not the
    frontier solver.
    """
    if ref_size < 1:
        raise ValueError("ref_size must be >= 1")
    if cand_size < 2:
        raise ValueError("cand_size must be >= 2")
    r, c = int(ref_size), int(cand_size)

    def f(x):
        return 1.0 - (1.0 - np.asarray(x, dtype=float)) ** r

    def F(x):
        x = np.asarray(x, dtype=float)
        return x + ((1.0 - x) ** (r + 1) - 1.0) / (r + 1)

    def g(x):
        x = np.asarray(x, dtype=float)
        return -x + x * (1.0 - x) ** (c - 1)

    def g_prime(x):
        x = np.asarray(x, dtype=float)
        return -1.0 + (1.0 - x) ** (c - 1) - (c - 1) * x * (1.0 - x) ** (c - 2)

    inv = (lambda y: -np.asarray(y, dtype=float) / 2.0) if c == 2 else None
    return make_pair(f"bleu-expect:R={r},C={c}", f=f, g=g, g_prime=g_prime,
                     g_prime_at_zero=0.0, g_prime_inv=inv, F=F,
                     params={"ref_size": r, "cand_size": c})


_BUILTINS = {
    "ll-se": ll_se,
    "cr-nrr": cr_nrr,
    "ll-nrr": ll_nrr,
    "cr-se": cr_se,
}


def get_pair(pair_id: str) -> MetricPair:
    """Resolve a pair from its string id.

    Accepted ids: ``ll-se``, ``cr-nrr``, ``ll-nrr``, ``cr-se``, and
    ``bleu-expect:R=<int>,C=<int>``.
    """
    key = pair_id.strip().lower()
    if key in _BUILTINS:
        return _BUILTINS[key]()
    if key.startswith("bleu-expect:"):
        args = dict(part.split("=", 1) for part in key.split(":", 1)[1].split(","))
        try:
            return bleu_expect(int(args["r"]), int(args["c"]))
        except KeyError as exc:
            raise ValueError(f"bleu-expect id needs R= and C=: {pair_id!r}") from exc
    raise ValueError(f"unknown metric pair id: {pair_id!r}")


# ---------------------------------------------------------------------------
# metric evaluation

def quality(pair: MetricPair, q: CategoricalDist, p: CategoricalDist) -> float:
    """U(Q) = sum_i Q_i f(P_i); outcomes with Q_i = 0 contribute nothing."""
    if q.n != p.n:
        raise ValueError("q and p live on different outcome spaces")
    mask = q.probs > 0
    pv = p.probs[mask]
    if pair.f_at_zero == -math.inf and np.any(pv <= 0):
        raise SupportMismatchError(
            f"{pair.name}: model mass on zero-probability outcomes")
    return float(np.sum(q.probs[mask] * pair.f(pv)))


def diversity(pair: MetricPair, q: CategoricalDist) -> float:
    """V(Q) = sum_i g(Q_i), with g(0) taken as 0."""
    mask = q.probs > 0
    return float(np.sum(pair.g(q.probs[mask])))


def combined_psi(pair: MetricPair, q: CategoricalDist, p: CategoricalDist,
                 alpha: float) -> float:
    """alpha * U + (1 - alpha) * V."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    return alpha * quality(pair, q, p) + (1.0 - alpha) * diversity(pair, q)


def divergence(pair: MetricPair, q: CategoricalDist, p: CategoricalDist) -> float:
    """Psi(P) - Psi(Q) at the pairing weight; a divergence for compatible pairs."""
    compatible, w0, _ = compatibility_analytic(pair)
    if not compatible:
        raise NotADivergenceError(
            f"{pair.name} is not divergence-compatible")
    alpha = w0 / (w0 - 1.0)
    return combined_psi(pair, p, p, alpha) - combined_psi(pair, q, p, alpha)


# ---------------------------------------------------------------------------
# structural checks

def check_rationality(pair: MetricPair, grid_size: int = 64,
                      n_perturbations: int = 200, seed: int = 0) -> RationalityReport:
    """Verify the two requirements of a sane quality/diversity pair.

    On a grid over (0,1) restricted to x1 > x2 with x1 + x2 <= 1, f must
    increase and g' must decrease.  Additionally, random mass shifts between
    coordinates must raise U when moving mass toward higher reference
    probability and lower V when moving mass toward already-likelier outcomes.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be >= 16")
    xs = (np.arange(grid_size) + 1.0) / (grid_size + 1.0)
    fv = pair.f(xs)
    gp = pair.g_prime(xs)
    f_ok, gp_ok, witness = True, True, None
    for a in range(grid_size):
        for b in range(a):
            # xs[a] > xs[b]
            if xs[a] + xs[b] > 1.0:
                continue
            if fv[a] <= fv[b]:
                f_ok = False
                witness = witness or (float(xs[a]), float(xs[b]))
            if gp[a] >= gp[b]:
                gp_ok = False
                witness = witness or (float(xs[a]), float(xs[b]))

    rng = generator(seed, "rationality")
    perturb_ok = True
    for _ in range(n_perturbations):
        n = int(rng.integers(3, 12))
        p = CategoricalDist(rng.random(n) + 1e-3)
        q = CategoricalDist(rng.random(n) + 1e-3)
        i, j = rng.choice(n, size=2, replace=False)
        if p.probs[i] == p.probs[j]:
            continue
        if p.probs[i] < p.probs[j]:
            i, j = j, i
        eps = rng.uniform(0.0, q.probs[j])
        if eps <= 0.0:
            continue
        shifted = q.probs.copy()
        shifted[i] += eps
        shifted[j] -= eps
        q_shift = CategoricalDist(shifted)
        if quality(pair, q_shift, p) <= quality(pair, q, p):
            perturb_ok = False
        hi, lo = (i, j) if q.probs[i] >= q.probs[j] else (j, i)
        eps2 = rng.uniform(0.0, q.probs[lo])
        shifted2 = q.probs.copy()
        shifted2[hi] += eps2
        shifted2[lo] -= eps2
        if eps2 > 0 and diversity(pair, CategoricalDist(shifted2)) >= diversity(pair, q):
            perturb_ok = False

    return RationalityReport(
        passed=f_ok and gp_ok and perturb_ok,
        f_increasing=f_ok,
        g_prime_decreasing=gp_ok,
        perturbations_ok=perturb_ok,
        n_perturbations=n_perturbations,
        witness=witness,
    )


def _integral_of_f(pair: MetricPair, xs: np.ndarray) -> np.ndarray:
    if pair.F is not None:
        return pair.F(xs)
    try:
        from scipy.integrate import quad
    except ImportError as exc:  # pragma: no cover
        raise UnsupportedKernelError("no integral available for kernel") from exc

    def f_scalar(u: float) -> float:
        return float(pair.f(np.array([u]))[0])

    vals = np.empty_like(xs)
    for k, x in enumerate(xs):
        try:
            val, err = quad(f_scalar, 0.0, float(x), epsabs=1e-12, epsrel=1e-12)
        except Exception as exc:
            raise UnsupportedKernelError(
                f"{pair.name}: quality kernel is not integrable from 0") from exc
        if not math.isfinite(val) or err > 1e-10:
            raise UnsupportedKernelError(
                f"{pair.name}: integral of f did not converge to 1e-10")
        vals[k] = val
    return vals


def compatibility_analytic(pair: MetricPair, grid_size: int = 256
                           ) -> tuple[bool, float, float]:
    """Fit g(x) = w0 * int_0^x f + b0 * x by least squares on a grid.

    Returns (compatible, w0, b0); compatible requires max residual < 1e-8 and
    w0 <= 0.  For compatible pairs the combination weight is
    alpha = w0 / (w0 - 1).
    """
    xs = _validation_grid(grid_size)
    gv = pair.g(xs)
    Fv = _integral_of_f(pair, xs)
    design = np.stack([Fv, xs], axis=1)
    coef, *_ = np.linalg.lstsq(design, gv, rcond=None)
    w0, b0 = float(coef[0]), float(coef[1])
    resid = float(np.max(np.abs(design @ coef - gv)))
    compatible = resid < 1e-8 and w0 <= 1e-10
    return compatible, w0, b0
