"""Explicit point families whose equidistance reduces to a fixed point.

Near l_inf^n (distortion <= 3/2) we build n+1 points; near l_p^n (distortion
<= R(p, n)) we build n points. In both cases point ``j`` carries ``-gamma`` on
coordinate ``j`` and the unknowns ``eps[i, j]`` (i < j) on coordinates below
it; the extra l_inf point has only unknowns. The map

    phi_ij(eps) = 1 + eps_ij - ||p_i(eps) - p_j(eps)||

sends the box to itself under the distortion hypotheses, and at a fixed point
every pairwise distance equals 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Optional

import numpy as np

from . import norms
from .errors import DimensionError, PreconditionError
from .radius import maximize_radius
from .solver import (
    EpsilonVector,
    SolveReport,
    clamp_to_box,
    solve_fixed_point,
)

LINF_BOX = 0.5
LINF_MAX_DISTORTION = 1.5
CERT_SLACK = 1e-12
STAR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PointConfig:
    """``points[k]`` is the k-th point; ``eps`` is the generating unknown."""

    points: np.ndarray
    gamma: float
    eps: Optional[EpsilonVector] = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise DimensionError("need a 2-d array of at least two points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def scaled(self, distance: float) -> "PointConfig":
        """Same configuration rescaled to common distance ``distance``."""
        return PointConfig(self.points * distance, self.gamma * distance)

    def to_json(self) -> dict:
        return {"gamma": self.gamma, "points": self.points.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "PointConfig":
        try:
            return cls(obj["points"], float(obj.get("gamma", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise DimensionError(f"malformed point configuration: {exc}") from exc


@dataclass(frozen=True)
class LpParams:
    p: float
    n: int
    beta: float
    gamma: float
    theta: float
    R: float

    def __post_init__(self):
        if abs(self.theta - self.beta / self.gamma) > 1e-12 * max(1.0, self.theta):
            raise PreconditionError("theta must equal beta / gamma")
        lhs, rhs = self.star_residuals()
        if lhs > STAR_TOL or rhs > STAR_TOL:
            raise PreconditionError(
                f"condition (*) fails: shortfalls {lhs:.3e}, {rhs:.3e}"
            )

    def star_residuals(self) -> tuple[float, float]:
        """Shortfalls of the two box conditions; both <= 0 when they hold.

        ``R^p - (gamma + beta)^p - gamma^p`` and
        ``(n - 2) beta^p + 2 gamma^p - 1``.
        """
        p, g, b = self.p, self.gamma, self.beta
        upper = self.R**p - (g + b) ** p - g**p
        lower = (self.n - 2) * b**p + 2 * g**p - 1.0
        return upper, lower

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "beta": self.beta, "gamma": self.gamma,
                "theta": self.theta, "R": self.R}


def _layout(eps: EpsilonVector, dim: int, gamma: float) -> np.ndarray:
    m = eps.n_points
    e = eps.matrix()
    pts = np.zeros((m, dim))
    for j in range(m):
        pts[j, :min(j, dim)] = e[:min(j, dim), j]
        if j < dim:
            pts[j, j] = -gamma
    return pts


def layout_linf(eps: EpsilonVector) -> PointConfig:
    """n+1 points in R^n from ``eps`` over n+1 points in the box ``[0, 1/2]``."""
    if eps.box_upper != LINF_BOX:
        raise DimensionError(f"l_inf layout needs box [0, 1/2], got {eps.box_upper}")
    n = eps.n_points - 1
    if n < 2:
        raise DimensionError("l_inf construction needs n >= 2")
    return PointConfig(_layout(eps, n, 1.0), 1.0, eps)


def layout_lp(eps: EpsilonVector, gamma: float) -> PointConfig:
    """n points in R^n with ``-gamma`` on the diagonal."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return PointConfig(_layout(eps, eps.n_points, gamma), float(gamma), eps)


def pair_distances(config: PointConfig, norm: norms.NormSpec) -> np.ndarray:
    """Distances ``||p_i - p_j||`` in the pair storage order of the unknowns."""
    pts = config.points
    i, j = np.triu_indices(len(pts), 1)
    return np.atleast_1d(norms.evaluate(norm, pts[i] - pts[j]))


def _phi(eps: EpsilonVector, config: PointConfig, norm) -> EpsilonVector:
    values = 1.0 + eps.entries - pair_distances(config, norm)
    return eps.with_entries(clamp_to_box(values, eps.box_upper))


def phi_linf(eps: EpsilonVector, norm: norms.NormSpec) -> EpsilonVector:
    """The l_inf-case self-map of ``[0, 1/2]^N``.

    Raises ``BoxViolationError`` if an entry leaves the box by more than the
    clamp tolerance, which means the norm breaks its certificate.
    """
    if norm.dim != eps.n_points - 1:
        raise DimensionError(f"norm dimension {norm.dim} != {eps.n_points - 1}")
    return _phi(eps, layout_linf(eps), norm)


def phi_lp(eps: EpsilonVector, norm: norms.NormSpec, params: LpParams) -> EpsilonVector:
    """The l_p-case self-map of ``[0, beta]^N``."""
    if norm.dim != eps.n_points or eps.n_points != params.n:
        raise DimensionError("norm, eps and params disagree on n")
    if eps.box_upper != params.beta:
        raise DimensionError("eps box does not match params.beta")
    return _phi(eps, layout_lp(eps, params.gamma), norm)


def _resolve_certificate(norm, reference, certificate):
    if certificate is None:
        try:
            return norms.certificate_exact(norm, reference)
        except norms.UnsupportedFamilyError as exc:
            raise PreconditionError(
                f"{exc}; pass an explicitly trusted certificate"
            ) from exc
    if certificate.reference != reference:
        raise PreconditionError(
            f"certificate is against reference {certificate.reference}, "
            f"need {reference}"
        )
    return certificate


def solve_equilateral_linf(
    norm: norms.NormSpec,
    n: int,
    tol: float = 1e-12,
    certificate: norms.SandwichCertificate | None = None,
    max_iter: int = 100_000,
) -> tuple[PointConfig, SolveReport]:
    """n+1 points at mutual distance 1 in a norm within 3/2 of l_inf^n.

    Without an explicit ``certificate`` a closed-form one is computed, which
    only exists for (diagonally composed) weighted max norms.
    """
    if n < 2:
        raise PreconditionError("need n >= 2")
    if norm.dim != n:
        raise DimensionError(f"norm dimension {norm.dim} != n = {n}")
    cert = _resolve_certificate(norm, math.inf, certificate)
    if cert.R > LINF_MAX_DISTORTION + CERT_SLACK:
        raise PreconditionError(
            f"distortion {cert.R!r} exceeds 3/2; no self-map guarantee"
        )
    start = EpsilonVector.zeros(n + 1, LINF_BOX)
    eps, report = solve_fixed_point(
        partial(phi_linf, norm=norm), start, tol=tol, max_iter=max_iter
    )
    return layout_linf(eps), report


def derive_lp_params(p: float, n: int) -> LpParams:
    """Box parameters saturating both inequalities of the self-map condition."""
    if int(n) != n or n <= 2:
        raise PreconditionError(f"l_p construction needs n > 2, got {n}")
    res = maximize_radius(p, n)
    theta = res.theta_star
    gamma = (2.0 + (n - 2) * theta**p) ** (-1.0 / p)
    return LpParams(p=float(p), n=int(n), beta=theta * gamma, gamma=gamma,
                    theta=theta, R=res.R)


def solve_equilateral_lp(
    norm: norms.NormSpec,
    p: float,
    n: int,
    tol: float = 1e-12,
    certificate: norms.SandwichCertificate | None = None,
    max_iter: int = 100_000,
) -> tuple[PointConfig, SolveReport, LpParams]:
    """n points at mutual distance 1 in a norm within R(p, n) of l_p^n."""
    params = derive_lp_params(p, n)
    if norm.dim != n:
        raise DimensionError(f"norm dimension {norm.dim} != n = {n}")
    cert = _resolve_certificate(norm, float(p), certificate)
    if cert.R > params.R + CERT_SLACK:
        raise PreconditionError(
            f"distortion {cert.R!r} exceeds R({p}, {n}) = {params.R!r}"
        )
    start = EpsilonVector.zeros(n, params.beta)
    eps, report = solve_fixed_point(
        partial(phi_lp, norm=norm, params=params), start, tol=tol, max_iter=max_iter
    )
    return layout_lp(eps, params.gamma), report, params
