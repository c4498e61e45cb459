"""Norms on R^n and two-sided distortion certificates.

Four representable families:

* ``WeightedLp``    ``||x|| = (sum (w_i |x_i|)^p)^(1/p)``
* ``WeightedLinf``  ``||x|| = max_i w_i |x_i|``
* ``Polytope``      ``||x|| = max_k |<a_k, x>|``
* ``Composed``      ``||x|| = base(M x)``

All evaluators accept a single vector or a stack of vectors (last axis).
A certificate asserts ``||x|| <= ||x||_ref <= R ||x||`` for every x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import (
    DimensionError,
    InvalidNormError,
    NormalizationError,
    UnsupportedFamilyError,
)

INFINITY = math.inf


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-d float array, optionally of length ``dim``."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"expected a non-empty 1-d vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def _frozen_array(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_weights(weights) -> np.ndarray:
    w = _frozen_array(weights)
    if w.ndim != 1 or w.size == 0:
        raise InvalidNormError("weights must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InvalidNormError("weights must be finite and strictly positive")
    return w


def lp_norm(x, p: float) -> np.ndarray | float:
    """Plain l_p norm along the last axis; ``p = inf`` gives the max norm."""
    a = np.abs(np.asarray(x, dtype=float))
    if p == INFINITY:
        return a.max(axis=-1)
    # scale by the max entry so large p neither overflows nor underflows
    m = a.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    out = safe[..., 0] * np.sum((a / safe) ** p, axis=-1) ** (1.0 / p)
    return np.where(m[..., 0] > 0, out, 0.0)


@dataclass(frozen=True, eq=False)
class WeightedLp:
    p: float
    weights: np.ndarray

    def __post_init__(self):
        if not (1.0 < self.p < INFINITY):
            raise InvalidNormError(f"weighted_lp needs 1 < p < inf, got {self.p}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "weights", _check_weights(self.weights))

    @property
    def dim(self) -> int:
        return self.weights.size

    def _evaluate(self, x):
        return lp_norm(x * self.weights, self.p)


@dataclass(frozen=True, eq=False)
class WeightedLinf:
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weights(self.weights))

    @property
    def dim(self) -> int:
        return self.weights.size

    def _evaluate(self, x):
        return np.abs(x * self.weights).max(axis=-1)


@dataclass(frozen=True, eq=False)
class Polytope:
    """Norm whose unit ball is ``{x : |<a_k, x>| <= 1 for all k}``."""

    functionals: np.ndarray

    def __post_init__(self):
        a = _frozen_array(self.functionals)
        if a.ndim != 2 or a.size == 0:
            raise InvalidNormError("functionals must be a non-empty list of vectors")
        if not np.all(np.isfinite(a)):
            raise InvalidNormError("functionals must be finite")
        if np.linalg.matrix_rank(a) < a.shape[1]:
            raise InvalidNormError("functionals do not span R^n; not a norm")
        object.__setattr__(self, "functionals", a)

    @property
    def dim(self) -> int:
        return self.functionals.shape[1]

    def _evaluate(self, x):
        return np.abs(x @ self.functionals.T).max(axis=-1)


@dataclass(frozen=True, eq=False)
class Composed:
    """``x -> base(M x)`` for an invertible matrix ``M``."""

    matrix: np.ndarray
    base: "NormSpec"

    def __post_init__(self):
        m = _frozen_array(self.matrix)
        n = self.base.dim
        if m.shape != (n, n):
            raise InvalidNormError(f"matrix must be {n}x{n}, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidNormError("matrix must be finite")
        try:
            inv = np.linalg.solve(m, np.eye(n))
        except np.linalg.LinAlgError as exc:
            raise InvalidNormError("matrix is singular") from exc
        if np.abs(m @ inv - np.eye(n)).max() > 1e-10:
            raise InvalidNormError("matrix is numerically singular")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def is_diagonal(self) -> bool:
        return not np.any(self.matrix - np.diag(np.diag(self.matrix)))

    def _evaluate(self, x):
        return self.base._evaluate(x @ self.matrix.T)


NormSpec = Union[WeightedLp, WeightedLinf, Polytope, Composed]


def evaluate(spec: NormSpec, x):
    """Evaluate ``spec`` at ``x`` (a vector, or a stack of vectors)."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 0 or a.shape[-1] != spec.dim:
        raise DimensionError(
            f"norm is {spec.dim}-dimensional, got array of shape {a.shape}"
        )
    out = spec._evaluate(a)
    return float(out) if a.ndim == 1 else out


def scaled(spec: NormSpec, factor: float) -> NormSpec:
    """The norm ``factor * spec`` as a composed norm with a scalar matrix."""
    if not factor > 0:
        raise InvalidNormError("scale factor must be positive")
    if isinstance(spec, WeightedLp):
        return WeightedLp(spec.p, spec.weights * factor)
    if isinstance(spec, WeightedLinf):
        return WeightedLinf(spec.weights * factor)
    return Composed(factor * np.eye(spec.dim), spec)


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class SandwichCertificate:
    """``||x|| <= ||x||_ref <= R ||x||``; ``reference`` is p or ``inf``."""

    reference: float
    R: float
    exact: bool

    def to_json(self) -> dict:
        ref = "infinity" if self.reference == INFINITY else self.reference
        return {"reference": ref, "R": self.R, "exact": self.exact}


def _check_reference(reference) -> float:
    if isinstance(reference, str) and reference.lower() in ("inf", "infinity"):
        return INFINITY
    ref = float(reference)
    if not ref > 1:
        raise ValueError(f"reference exponent must be > 1 or infinity, got {ref}")
    return ref


def _effective_weights(spec: NormSpec, reference: float) -> np.ndarray:
    if isinstance(spec, WeightedLinf) and reference == INFINITY:
        return np.asarray(spec.weights)
    if isinstance(spec, WeightedLp) and spec.p == reference:
        return np.asarray(spec.weights)
    if isinstance(spec, Composed) and spec.is_diagonal:
        return np.abs(np.diag(spec.matrix)) * _effective_weights(spec.base, reference)
    raise UnsupportedFamilyError(
        f"no closed-form certificate for {type(spec).__name__} against "
        f"reference {reference}; use certificate_sampled"
    )


def certificate_exact(spec: NormSpec, reference) -> SandwichCertificate:
    """Closed-form certificate for (diagonally composed) weighted norms.

    For effective weights ``w`` (all <= 1) the tight constant is ``1/min(w)``.
    Raises ``NormalizationError`` carrying the fixing rescale factor when some
    weight exceeds 1.
    """
    ref = _check_reference(reference)
    w = _effective_weights(spec, ref)
    if np.any(w == 0):
        raise InvalidNormError("zero effective weight")
    top = float(w.max())
    if top > 1.0:
        raise NormalizationError(
            f"largest effective weight {top!r} exceeds 1; multiply the norm by "
            f"{1.0 / top!r}",
            rescale=1.0 / top,
        )
    return SandwichCertificate(reference=ref, R=1.0 / float(w.min()), exact=True)


def sample_directions(dim: int, samples: int, rng) -> np.ndarray:
    """Coordinate axes followed by alternating Gaussian and sign-vector draws."""
    gauss = rng.standard_normal((samples, dim))
    signs = rng.choice([-1.0, 1.0], size=(samples, dim))
    mixed = np.where((np.arange(samples) % 2 == 0)[:, None], gauss, signs)
    return np.vstack([np.eye(dim), mixed])


def certificate_sampled(
    spec: NormSpec, reference, samples: int = 10_000, seed: int = 0
) -> SandwichCertificate:
    """Empirical certificate: the largest ``||x||_ref / ||x||`` seen on samples.

    The returned R is only a lower bound on the true distortion constant, so
    the certificate is flagged ``exact=False``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    ref = _check_reference(reference)
    rng = np.random.default_rng(seed)
    xs = sample_directions(spec.dim, samples, rng)
    xs = xs / lp_norm(xs, ref)[:, None]
    vals = evaluate(spec, xs)
    worst = float(vals.max())
    if worst > 1.0 + 1e-12:
        raise NormalizationError(
            f"sample with ||x|| = {worst!r} > ||x||_ref = 1; multiply the norm "
            f"by {1.0 / worst!r}",
            rescale=1.0 / worst,
        )
    return SandwichCertificate(reference=ref, R=max(1.0, float((1.0 / vals).max())),
                               exact=False)


# ---------------------------------------------------------------- JSON


def to_json(spec: NormSpec) -> dict:
    if isinstance(spec, WeightedLp):
        return {"kind": "weighted_lp", "p": spec.p, "weights": spec.weights.tolist()}
    if isinstance(spec, WeightedLinf):
        return {"kind": "weighted_linf", "weights": spec.weights.tolist()}
    if isinstance(spec, Polytope):
        return {"kind": "polytope", "functionals": spec.functionals.tolist()}
    if isinstance(spec, Composed):
        return {"kind": "composed", "matrix": spec.matrix.tolist(),
                "base": to_json(spec.base)}
    raise TypeError(f"not a norm spec: {spec!r}")


def from_json(obj: dict) -> NormSpec:
    try:
        kind = obj["kind"]
        if kind == "weighted_lp":
            return WeightedLp(obj["p"], obj["weights"])
        if kind == "weighted_linf":
            return WeightedLinf(obj["weights"])
        if kind == "polytope":
            return Polytope(obj["functionals"])
        if kind == "composed":
            return Composed(obj["matrix"], from_json(obj["base"]))
    except (KeyError, TypeError) as exc:
        raise InvalidNormError(f"malformed norm JSON: {exc}") from exc
    raise InvalidNormError(f"unknown norm kind {kind!r}")
