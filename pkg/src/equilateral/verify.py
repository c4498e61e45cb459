"""Independent checks on constructed point sets.

Nothing here reuses the construction's distance bookkeeping: distances are
recomputed pair by pair straight from the norm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import norms
from .errors import DimensionError, PreconditionError


@dataclass(frozen=True)
class EquilateralReport:
    m: int
    common_distance: float
    max_deviation: float
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "common_distance": self.common_distance,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _as_points(points) -> np.ndarray:
    pts = np.asarray(getattr(points, "points", points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise DimensionError("need at least two points of a common dimension")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


def all_distances(points, norm: norms.NormSpec) -> list[float]:
    pts = _as_points(points)
    if pts.shape[1] != norm.dim:
        raise DimensionError(f"points are {pts.shape[1]}-d, norm is {norm.dim}-d")
    m = len(pts)
    return [norms.evaluate(norm, pts[a] - pts[b]) for a in range(m) for b in range(a + 1, m)]


def check_equilateral(points, norm: norms.NormSpec, tol: float = 1e-9) -> EquilateralReport:
    """Compare every pairwise distance against their mean."""
    d = all_distances(points, norm)
    common = math.fsum(d) / len(d)
    dev = max(abs(x - common) for x in d)
    return EquilateralReport(
        m=len(_as_points(points)),
        common_distance=common,
        max_deviation=dev,
        tolerance=tol,
        passed=dev <= tol,
    )


# ---------------------------------------------------------------- extension


MAX_EXTENSION_DIM = 4


def _extension_objective(xs, pts, norm, d):
    worst = np.zeros(len(xs))
    for p in pts:
        worst = np.maximum(worst, np.abs(norms.evaluate(norm, xs - p) - d))
    return worst


def extension_search(
    points,
    norm: norms.NormSpec,
    box_radius: Optional[float] = None,
    grid_resolution: int = 64,
    refine_tol: float = 1e-9,
) -> Optional[np.ndarray]:
    """Look for one more point at the common distance from all ``points``.

    Scans a cube of side ``2 * box_radius`` (default twice the common
    distance) centred at the centroid, then polishes the best cell by
    coordinate steps. Returns the point if ``max_j | ||x - p_j|| - d |`` ends
    at or below ``refine_tol``; ``None`` means only that no point was found at
    this resolution, not that none exists.
    """
    pts = _as_points(points)
    dim = pts.shape[1]
    if dim > MAX_EXTENSION_DIM:
        raise DimensionError(f"extension search supports dimension <= 4, got {dim}")
    base = check_equilateral(pts, norm, tol=1e-9)
    if not base.passed:
        raise PreconditionError(
            f"input is not equilateral (deviation {base.max_deviation:.3e})"
        )
    d = base.common_distance
    if box_radius is None:
        box_radius = 2.0 * d
    center = pts.mean(axis=0)
    axis = np.linspace(-box_radius, box_radius, grid_resolution)

    # chunk along the first axis; argmin keeps the first (lexicographically
    # smallest) grid index on ties
    best_val, best_x = np.inf, None
    if dim > 1:
        rest = np.stack(np.meshgrid(*([axis] * (dim - 1)), indexing="ij"), axis=-1)
        rest = rest.reshape(-1, dim - 1)
    else:
        rest = np.empty((1, 0))
    for a in axis:
        xs = center + np.column_stack([np.full(len(rest), a), rest])
        vals = _extension_objective(xs, pts, norm, d)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_x = float(vals[k]), xs[k]

    # pattern search over all sign directions: the objective is a max of
    # kinked terms, and axis-only moves stall where two coordinates must move
    # together
    dirs = np.array([v for v in itertools.product((-1.0, 0.0, 1.0), repeat=dim) if any(v)])
    x = best_x.copy()
    step = axis[1] - axis[0]
    while step > refine_tol * 1e-3 and best_val > refine_tol:
        trials = x + step * dirs
        vals = _extension_objective(trials, pts, norm, d)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            x, best_val = trials[k], float(vals[k])
        else:
            step /= 2
    return x if best_val <= refine_tol else None


# ---------------------------------------------------------------- run audit


@dataclass
class CertifyResult:
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def add(self, name: str, ok: bool, detail: str) -> None:
        self.checks[name] = (bool(ok), detail)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "checks": {k: {"pass": ok, "detail": detail}
                       for k, (ok, detail) in self.checks.items()},
        }


RESIDUAL_FLOOR = 1e-14


def certify_run(
    norm: norms.NormSpec,
    config,
    report,
    certificate: norms.SandwichCertificate,
    params=None,
    expected_points: Optional[int] = None,
    samples: int = 1000,
    seed: int = 0,
) -> CertifyResult:
    """Re-validate a finished construction; every failure is reported, none raised.

    * the sandwich inequality of ``certificate`` on random vectors
    * the l_p box conditions when ``params`` is given
    * equidistance at ``10 * residual`` (floored at 1e-14 for rounding)
    """
    out = CertifyResult()
    rng = np.random.default_rng(seed)
    xs = norms.sample_directions(norm.dim, samples, rng)
    own = norms.evaluate(norm, xs)
    ref = norms.lp_norm(xs, certificate.reference)
    slack = 1e-12 * ref
    lower_ok = np.all(own <= ref + slack)
    upper_ok = np.all(ref <= certificate.R * own + slack)
    worst = float((ref / own).max())
    out.add(
        "sandwich",
        lower_ok and upper_ok,
        f"max ||x||_ref/||x|| = {worst!r}, certified R = {certificate.R!r}; "
        f"lower bound {'ok' if lower_ok else 'violated'}",
    )

    if params is not None:
        upper, lower = params.star_residuals()
        out.add(
            "condition_star",
            upper <= 1e-10 and lower <= 1e-10,
            f"shortfalls {upper:.3e}, {lower:.3e}",
        )

    pts = _as_points(config)
    if expected_points is not None:
        out.add("point_count", len(pts) == expected_points,
                f"{len(pts)} points, expected {expected_points}")

    out.add("converged", bool(report.converged), f"residual {report.residual!r}")
    tol = max(10.0 * report.residual, RESIDUAL_FLOOR)
    eq = check_equilateral(pts, norm, tol)
    out.add(
        "equilateral",
        eq.passed and abs(eq.common_distance - 1.0) <= tol,
        f"common distance {eq.common_distance!r}, deviation {eq.max_deviation!r}, "
        f"tol {tol!r}",
    )
    return out
