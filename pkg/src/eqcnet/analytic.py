"""Closed-form EQC estimates for the long-distance limit.

Each party's node owns ``b`` internal bonds; channels can only form from
pairs of open internal bonds on the two sides, giving the pairing
expectation ``E[min(X, Y)]`` for independent ``X, Y ~ Binomial(b*k, p)``.
A medium factor ``(1 - (1-p)**m)**alpha`` accounts for open neighbours that
dead-end before reaching the far party.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

EXACT_LIMIT = 20
MAX_COPIES = 4096


@dataclass(frozen=True)
class LatticeIndex:
    """Per-lattice constants of the analytic model.

    ``p_min`` is the lowest ``p`` at which the estimate is advertised; below
    it higher-order corrections near the critical point dominate.
    """

    b: int
    m: int
    alpha: float
    p_min: float = 0.0

    def __post_init__(self):
        if self.b < 1 or self.m < 1:
            raise ValueError("b and m must be positive integers")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")


SQUARE = LatticeIndex(b=4, m=3, alpha=2.6, p_min=0.6)
TRIANGLE = LatticeIndex(b=6, m=5, alpha=0.9, p_min=0.447)
HEXAGON = LatticeIndex(b=3, m=2, alpha=2.8, p_min=0.753)

INDICES = {"square": SQUARE, "triangle": TRIANGLE, "hexagon": HEXAGON}


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def pairing_expectation(b, p, k=1):
    """Expected number of pairable internal bonds, ``E[min(X, Y)]``.

    Exact rational arithmetic for ``b*k <= 20``; above that, binomial terms
    are built from log-gamma and summed with ``math.fsum``.
    """
    _check_p(p)
    n = int(b) * int(k)
    if n < 1:
        raise ValueError("b*k must be positive")
    if n > MAX_COPIES:
        raise ValueError(f"b*k = {n} exceeds {MAX_COPIES}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return float(n)
    if n <= EXACT_LIMIT:
        q = Fraction(p)
        pmf = [math.comb(n, i) * q**i * (1 - q) ** (n - i) for i in range(n + 1)]
        total = sum(min(i, j) * pmf[i] * pmf[j] for i in range(1, n + 1) for j in range(1, n + 1))
        return float(total)
    lp, lq = math.log(p), math.log1p(-p)
    lognorm = math.lgamma(n + 1)
    logpmf = [lognorm - math.lgamma(i + 1) - math.lgamma(n - i + 1) + i * lp + (n - i) * lq
              for i in range(n + 1)]
    return math.fsum(
        min(i, j) * math.exp(logpmf[i] + logpmf[j])
        for i in range(1, n + 1)
        for j in range(1, n + 1)
    )


def medium_factor(m, alpha, p):
    return (1.0 - (1.0 - p) ** m) ** alpha


def analytic_e0(index, p, k=1):
    """Long-distance EQC estimate for ``k`` independent nodes per party."""
    _check_p(p)
    return pairing_expectation(index.b, p, k) / (index.b * k) * medium_factor(index.m, index.alpha, p)


def is_extrapolated(index, p):
    return p < index.p_min


def fit_alpha(index_base, curve):
    """Least-squares medium index for a measured ``[(p, E0), ...]`` curve.

    Points at ``p = 1`` carry no information about ``alpha`` and are dropped.
    """
    b, m = index_base
    pts = [(float(p), float(e)) for p, e in curve if float(p) < 1.0]
    if len({p for p, _ in pts}) < 3:
        raise ValueError("need at least 3 distinct p < 1 to fit alpha")
    ps = np.array([p for p, _ in pts])
    e0 = np.array([e for _, e in pts])
    base = np.array([pairing_expectation(b, p) / b for p in ps])
    escape = 1.0 - (1.0 - ps) ** m

    def loss(alpha):
        return float(np.sum((base * escape**alpha - e0) ** 2))

    res = minimize_scalar(loss, bounds=(0.0, 50.0), method="bounded", options={"xatol": 1e-8})
    if not res.success:
        raise RuntimeError(f"alpha fit did not converge: {res.message}")
    return float(res.x)
