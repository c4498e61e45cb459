"""Fixed points of continuous self-maps of a box ``[0, beta]^N``.

The unknown is indexed by pairs ``(i, j)``, ``0 <= i < j < m``, stored in
lexicographic order ``(0,1), (0,2), ..., (0,m-1), (1,2), ...``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import BoxViolationError, DimensionError

CLAMP_TOL = 1e-9


def pair_count(m: int) -> int:
    return m * (m - 1) // 2


def pairs(m: int) -> list[tuple[int, int]]:
    """All index pairs ``i < j`` of ``m`` points in storage order."""
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


@dataclass(frozen=True, eq=False)
class EpsilonVector:
    """Point of the box ``[0, box_upper]^N`` with pair-indexed entries."""

    n_points: int
    entries: np.ndarray
    box_upper: float

    def __post_init__(self):
        if self.n_points < 2:
            raise DimensionError("need at least two points")
        e = np.array(self.entries, dtype=float).reshape(-1)
        if e.size != pair_count(self.n_points):
            raise DimensionError(
                f"{self.n_points} points need {pair_count(self.n_points)} "
                f"entries, got {e.size}"
            )
        if not self.box_upper > 0:
            raise ValueError("box_upper must be positive")
        if np.any(e < 0) or np.any(e > self.box_upper) or not np.all(np.isfinite(e)):
            raise BoxViolationError(f"entries outside [0, {self.box_upper}]")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "box_upper", float(self.box_upper))

    @classmethod
    def zeros(cls, n_points: int, box_upper: float) -> "EpsilonVector":
        return cls(n_points, np.zeros(pair_count(n_points)), box_upper)

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        m = self.n_points
        if not 0 <= i < j < m:
            raise IndexError(f"pair {ij} not in index set")
        return float(self.entries[i * m - i * (i + 1) // 2 + (j - i - 1)])

    def matrix(self) -> np.ndarray:
        """Strictly upper-triangular ``m x m`` array with ``E[i, j] = eps_ij``."""
        m = self.n_points
        out = np.zeros((m, m))
        out[np.triu_indices(m, 1)] = self.entries
        return out

    def with_entries(self, entries) -> "EpsilonVector":
        return EpsilonVector(self.n_points, entries, self.box_upper)


@dataclass(frozen=True)
class SolveReport:
    converged: bool
    iterations: int
    residual: float
    method: str
    damping: float

    def to_json(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "residual": self.residual,
            "method": self.method,
            "damping": self.damping,
        }


BoxMap = Callable[[EpsilonVector], Union[EpsilonVector, np.ndarray]]


def clamp_to_box(values, upper: float, tol: float = CLAMP_TOL) -> np.ndarray:
    """Clip to ``[0, upper]``; a needed correction larger than ``tol`` raises."""
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise BoxViolationError("map produced non-finite values")
    excess = max(0.0, float(-v.min(initial=0.0)), float(v.max(initial=0.0)) - upper)
    if excess > tol:
        raise BoxViolationError(
            f"map output leaves [0, {upper!r}] by {excess:.3e}; the map is not "
            "a self-map of its box (hypotheses violated)"
        )
    return np.clip(v, 0.0, upper)


def _apply(fmap: BoxMap, eps: EpsilonVector) -> np.ndarray:
    out = fmap(eps)
    if isinstance(out, EpsilonVector):
        out = out.entries
    out = np.asarray(out, dtype=float).reshape(-1)
    if out.size != eps.entries.size:
        raise DimensionError("map changed the number of entries")
    return clamp_to_box(out, eps.box_upper)


def _anderson_step(x, f, xs, fs, damping):
    # type-II Anderson mixing over the stored history
    dx = np.diff(np.array(xs), axis=0).T
    df = np.diff(np.array(fs), axis=0).T
    # residual differences at rounding level carry no secant information and
    # would blow up the coefficients
    keep = np.abs(df).max(axis=0, initial=0.0) > 1e-8 * np.abs(f).max(initial=0.0)
    dx, df = dx[:, keep], df[:, keep]
    if dx.shape[1] == 0:
        return x + damping * f
    coef, *_ = np.linalg.lstsq(df, f, rcond=None)
    if not np.all(np.isfinite(coef)):
        return x + damping * f
    return x + damping * f - (dx + damping * df) @ coef


def _relaxation_update(lam, f, f_prev):
    # grow the step while a coordinate keeps drifting the same way,
    # reset it once the coordinate overshoots
    drifting = (np.sign(f) == np.sign(f_prev)) & (np.abs(f) >= 0.5 * np.abs(f_prev))
    drifting &= f != 0
    flipped = np.sign(f) * np.sign(f_prev) < 0
    lam = np.where(drifting, np.minimum(2.0 * lam, MAX_RELAXATION), lam)
    return np.where(flipped, 1.0, lam)


MAX_RELAXATION = 2.0**30
FALLBACKS = ("adaptive", "anderson")


def solve_fixed_point(
    fmap: BoxMap,
    start: EpsilonVector,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    damping: float = 1.0,
    window: int = 100,
    fallback: str = "adaptive",
    memory: int = 5,
) -> tuple[EpsilonVector, SolveReport]:
    """Damped Picard iteration with an accelerated fallback on stagnation.

    Iterates ``eps <- (1 - damping) eps + damping map(eps)`` projected onto the
    box. If the residual ``||map(eps) - eps||_inf`` has not shrunk by a factor
    0.999 over the last ``window`` iterations, switches to ``fallback``:

    ``"adaptive"``
        per-coordinate relaxation; a coordinate whose residual keeps its sign
        gets its step doubled, and the step resets to ``damping`` on a sign
        change. This crosses the flat stretches where the map is a pure
        translation, on which secant methods have nothing to extrapolate.
    ``"anderson"``
        type-II Anderson mixing with ``memory`` stored differences.

    Every map evaluation is clamped to the box; a clamp larger than
    ``CLAMP_TOL`` raises ``BoxViolationError``. Non-convergence is reported
    through ``SolveReport.converged``, not raised. The reported residual is
    exactly ``||map(eps) - eps||_inf`` at the returned ``eps``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    if fallback not in FALLBACKS:
        raise ValueError(f"fallback must be one of {FALLBACKS}")
    beta = start.box_upper
    x = np.array(start.entries)
    g = _apply(fmap, start)
    f = g - x
    res = float(np.abs(f).max(initial=0.0))
    history = [res]
    best = res
    method = "picard"
    lam = np.ones_like(x)
    f_prev = None
    xs: deque = deque(maxlen=memory + 1)
    fs: deque = deque(maxlen=memory + 1)
    it = 0
    while res > tol and it < max_iter:
        if method == "picard":
            x_new = x + damping * f
        elif method == "adaptive":
            if f_prev is not None:
                lam = _relaxation_update(lam, f, f_prev)
            x_new = x + damping * lam * f
        else:
            xs.append(x)
            fs.append(f)
            x_new = _anderson_step(x, f, xs, fs, damping)
        f_prev = f
        x = np.clip(x_new, 0.0, beta)
        it += 1
        g = _apply(fmap, start.with_entries(x))
        f = g - x
        res = float(np.abs(f).max(initial=0.0))
        history.append(res)
        if method == "picard":
            if it >= window and res > 0.999 * history[it - window]:
                method = fallback
        elif method == "anderson" and res > 1e3 * best:
            xs.clear()
            fs.clear()
        best = min(best, res)
    report = SolveReport(
        converged=res <= tol,
        iterations=it,
        residual=res,
        method=method,
        damping=damping,
    )
    return start.with_entries(x), report


def _residual(fmap: BoxMap, eps: EpsilonVector) -> float:
    return float(np.abs(_apply(fmap, eps) - eps.entries).max(initial=0.0))


def brute_force_fixed_point(
    fmap: BoxMap,
    n_points: int,
    box_upper: float,
    grid_resolution: int = 21,
    refine_tol: float = 1e-12,
) -> EpsilonVector:
    """Exhaustive grid search plus pattern-search refinement.

    Test oracle only: scans ``grid_resolution ** N`` points of the box for the
    smallest residual (first in lexicographic grid order wins ties), then
    polishes by coordinate steps that halve until below ``refine_tol``.
    """
    n = pair_count(n_points)
    if n > 6:
        raise DimensionError(f"brute force needs N <= 6 entries, got {n}")
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    axis = np.linspace(0.0, box_upper, grid_resolution)
    template = EpsilonVector.zeros(n_points, box_upper)
    best_x, best_r = None, np.inf
    for idx in itertools.product(range(grid_resolution), repeat=n):
        x = axis[list(idx)]
        r = _residual(fmap, template.with_entries(x))
        if r < best_r:
            best_x, best_r = x, r
    dirs = np.array([v for v in itertools.product((-1.0, 0.0, 1.0), repeat=n) if any(v)])
    step = axis[1] - axis[0]
    x = best_x.copy()
    while step > refine_tol and best_r > 0:
        moved = False
        for v in dirs:
            trial = np.clip(x + step * v, 0.0, box_upper)
            r = _residual(fmap, template.with_entries(trial))
            if r < best_r:
                x, best_r, moved = trial, r, True
                break
        if not moved:
            step /= 2
    return template.with_entries(x)
