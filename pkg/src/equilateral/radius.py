"""Admissible Banach-Mazur radius around l_p^n.

``R(p, n)^p = max_{theta > 0} (1 + (1 + theta)^p) / (2 + (n - 2) theta^p)``

For large n or p near 1 the excess ``R - 1`` is far below double-precision
resolution of R itself, so everything is also carried in excess form
(``objective - 1`` and ``R - 1``) computed without cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import PreconditionError

THETA_MAX = 10.0
THETA_MIN = 1e-12
GRID_POINTS = 1024
_INV_PHI = (math.sqrt(5) - 1) / 2


def _check_domain(p: float, n: int) -> None:
    if not (1.0 < p < math.inf):
        raise PreconditionError(f"need 1 < p < inf, got p={p}")
    if int(n) != n or n <= 2:
        raise PreconditionError(f"need integer n > 2, got n={n}")


def objective(theta: float, p: float, n: int) -> float:
    """The ratio ``(1 + (1+theta)^p) / (2 + (n-2) theta^p)``."""
    _check_domain(p, n)
    if not theta > 0:
        raise PreconditionError(f"need theta > 0, got {theta}")
    return (1.0 + (1.0 + theta) ** p) / (2.0 + (n - 2) * theta**p)


def objective_excess(theta, p: float, n: int):
    """``objective - 1`` without cancellation; vectorized over theta."""
    t = np.asarray(theta, dtype=float)
    num = np.expm1(p * np.log1p(t)) - (n - 2) * t**p
    return num / (2.0 + (n - 2) * t**p)


def _log_slope(log_theta: float, p: float, n: int) -> float:
    # sign of d/dtheta log(objective); positive left of the maximizer
    t = math.exp(log_theta)
    left = (p - 1) * math.log1p(t) + math.log(2.0 + (n - 2) * t**p)
    right = math.log(n - 2) + (p - 1) * log_theta + math.log1p((1.0 + t) ** p)
    return left - right


def asymptotic_estimate(p: float, n: int) -> float:
    """Large-n approximation ``1 + (p-1)/(2p) * n^(-1/(p-1))``."""
    _check_domain(p, n)
    return 1.0 + (p - 1) / (2 * p) * n ** (-1.0 / (p - 1))


@dataclass(frozen=True)
class RadiusResult:
    p: float
    n: int
    theta_star: float
    R: float
    objective: float
    asymptotic_estimate: float
    R_minus_one: float

    def to_row(self) -> list:
        return [self.p, self.n, self.theta_star, self.R, self.asymptotic_estimate]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "theta_star": self.theta_star,
            "R": self.R,
            "objective": self.objective,
            "asymptotic_estimate": self.asymptotic_estimate,
            "R_minus_one": self.R_minus_one,
        }


CSV_HEADER = ["p", "n", "theta_star", "R", "asymptotic_estimate"]


def _golden_max(fun, a: float, b: float, tol: float) -> float:
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def theta_lower(p: float, n: int) -> float:
    """Left end of the scan: 1e-12, pushed lower when the maximizer is tiny."""
    # for small theta the maximizer sits near (n-2)^(-1/(p-1))
    guess = math.exp(-math.log(n - 2) / (p - 1) - math.log(1e3))
    return max(min(THETA_MIN, guess), 1e-300)


def maximize_radius(p: float, n: int) -> RadiusResult:
    """Maximize the objective over ``theta in (0, 10]``.

    A 1024-point log-spaced scan brackets the global maximum; golden-section
    search (in log theta) narrows it; a root of the log-derivative inside the
    scan bracket then pins theta to near machine precision, since function
    values alone are flat to rounding within ~1e-8 of the maximizer.
    """
    _check_domain(p, n)
    lo = math.log(theta_lower(p, n))
    hi = math.log(THETA_MAX)
    grid = np.linspace(lo, hi, GRID_POINTS)
    vals = objective_excess(np.exp(grid), p, n)
    k = int(np.argmax(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, GRID_POINTS - 1)]

    def excess_at(s):
        return float(objective_excess(math.exp(s), p, n))

    s_star = _golden_max(excess_at, a, b, 1e-12)
    try:
        if _log_slope(a, p, n) > 0 > _log_slope(b, p, n):
            s_star = brentq(_log_slope, a, b, args=(p, n), xtol=1e-15, rtol=1e-15)
    except (ValueError, OverflowError):
        pass
    theta = math.exp(s_star)
    excess = excess_at(s_star)
    obj = 1.0 + excess
    r_minus_one = math.expm1(math.log1p(excess) / p)
    return RadiusResult(
        p=float(p),
        n=int(n),
        theta_star=theta,
        R=obj ** (1.0 / p),
        objective=obj,
        asymptotic_estimate=asymptotic_estimate(p, n),
        R_minus_one=r_minus_one,
    )


def radius(p: float, n: int) -> float:
    return maximize_radius(p, n).R
