"""Exponential distance law ``EQC(d) = E0 + C0 * exp(-gamma * d)`` and radii."""

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import least_squares

GAMMA_MAX = 50.0
MAX_EVALS = 200


class FitError(RuntimeError):
    """Raised when the distance-law fit cannot produce a result."""


@dataclass(frozen=True)
class FitResult:
    E0: float
    C0: float
    gamma: float
    radius: float
    residual_rms: float
    flags: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def radius(gamma):
    """Effective-circle radius ``1/gamma + 1/2``."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 1.0 / gamma + 0.5


def _model(theta, d):
    e0, c0, gamma = theta
    return e0 + c0 * np.exp(-gamma * d)


def _as_arrays(curve):
    rows = sorted((float(d), float(m), float(s)) for d, m, s in curve)
    d, mean, se = (np.array(col) for col in zip(*rows)) if rows else (np.array([]),) * 3
    return d, mean, se


def fit_exponential(curve):
    """Weighted least-squares fit of the distance law to ``[(d, mean, std_error)]``.

    Starts from ``E0 = last mean``, amplitude ``first mean - E0`` at the
    first distance, ``gamma = 1``, and runs a bounded trust-region solve
    with at most 200 evaluations.
    Points are weighted by ``1/std_error**2``; zero errors are floored at the
    smallest nonzero error, and a curve without errors is fitted unweighted.
    """
    d, mean, se = _as_arrays(curve)
    if len(np.unique(d)) < 4:
        raise FitError(f"need at least 4 distinct distances, got {len(np.unique(d))}")
    if not np.all(np.isfinite(se)) or not np.all(np.isfinite(mean)):
        raise FitError("means and standard errors must be finite")
    positive = se[se > 0]
    sigma = np.where(se > 0, se, positive.min()) if positive.size else np.ones_like(se)

    # amplitude is taken at the first distance so it stays finite as gamma grows
    d0 = d[0]
    x0 = np.array([mean[-1], mean[0] - mean[-1], 1.0])
    res = least_squares(
        lambda th: (_model(th, d - d0) - mean) / sigma,
        x0,
        bounds=([-np.inf, -np.inf, 1e-6], [np.inf, np.inf, GAMMA_MAX]),
        method="trf",
        x_scale="jac",
        xtol=1e-12,
        ftol=1e-12,
        gtol=1e-12,
        max_nfev=MAX_EVALS,
    )
    if res.status == 0:
        raise FitError(f"no convergence within {MAX_EVALS} evaluations; last estimate {res.x.tolist()}")
    e0, amp, gamma = (float(v) for v in res.x)
    c0 = amp * math.exp(gamma * d0)
    rms = float(np.sqrt(np.mean((_model(res.x, d - d0) - mean) ** 2)))

    flags = ["decreasing" if c0 >= 0 else "increasing"]
    drop = abs(mean[0] - mean[1])
    if drop <= 2.0 * math.hypot(se[0], se[1]) or gamma >= GAMMA_MAX * (1 - 1e-9):
        flags.append("gamma_lower_bounded")
    return FitResult(e0, c0, gamma, radius(gamma), rms, flags)


def relative_curve(curve, anchor_d):
    """Scale a curve so the mean at ``anchor_d`` becomes 1."""
    anchor = [m for d, m, _ in curve if d == anchor_d]
    if not anchor:
        raise ValueError(f"anchor distance {anchor_d} not in curve")
    if anchor[0] == 0:
        raise ValueError("anchor mean is zero")
    a = anchor[0]
    return [(d, m / a, s / abs(a)) for d, m, s in curve]
