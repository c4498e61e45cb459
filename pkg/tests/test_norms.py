import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equilateral import norms
from equilateral.errors import (
    DimensionError,
    InvalidNormError,
    NormalizationError,
    UnsupportedFamilyError,
)


def sup_ratio_2d(spec, ref, count=200_001):
    # dense sweep of the unit circle; independent of the certificate code
    t = np.linspace(0, 2 * np.pi, count)
    xs = np.column_stack([np.cos(t), np.sin(t)])
    refs = np.abs(xs).max(axis=1) if ref == math.inf else np.sum(np.abs(xs) ** ref, axis=1) ** (1 / ref)
    return float((refs / norms.evaluate(spec, xs)).max())


def test_eval_examples(linf_two_thirds):
    assert norms.evaluate(norms.WeightedLp(2, [1, 1]), [3, 4]) == pytest.approx(5, abs=1e-15)
    assert norms.evaluate(norms.WeightedLinf([1, 1]), [1, -2]) == 2
    assert norms.evaluate(linf_two_thirds, [0, -1.5]) == pytest.approx(1, abs=1e-15)


def test_eval_zero_only_at_origin():
    spec = norms.Composed([[1, 2], [0, 1]], norms.WeightedLp(3, [1, 0.5]))
    assert norms.evaluate(spec, [0, 0]) == 0
    assert norms.evaluate(spec, [1e-300, 0]) > 0


def test_polytope_box_is_max_norm():
    spec = norms.Polytope([[1, 0], [-1, 0], [0, 1], [0, -1]])
    rng = np.random.default_rng(1)
    xs = rng.standard_normal((100, 2))
    np.testing.assert_allclose(norms.evaluate(spec, xs), np.abs(xs).max(axis=1), rtol=0)


def test_large_exponent_no_overflow():
    spec = norms.WeightedLp(500, [1, 1, 1])
    assert norms.evaluate(spec, [1e200, 1e200, 0]) == pytest.approx(1e200 * 2 ** (1 / 500))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        norms.evaluate(norms.WeightedLinf([1, 1]), [1, 2, 3])


@pytest.mark.parametrize(
    "build",
    [
        lambda: norms.WeightedLp(1.0, [1, 1]),
        lambda: norms.WeightedLp(math.inf, [1, 1]),
        lambda: norms.WeightedLinf([1, 0]),
        lambda: norms.WeightedLinf([1, -1]),
        lambda: norms.Polytope([[1, 1], [-1, -1]]),
        lambda: norms.Composed([[1, 2], [2, 4]], norms.WeightedLinf([1, 1])),
        lambda: norms.Composed([[1, 0, 0]], norms.WeightedLinf([1, 1])),
    ],
)
def test_invalid_specs_rejected(build):
    with pytest.raises(InvalidNormError):
        build()


@pytest.mark.parametrize(
    "spec, ref, R",
    [
        (norms.WeightedLinf([1, 2 / 3]), math.inf, 1.5),
        (norms.WeightedLinf([1, 1, 1]), math.inf, 1.0),
        (norms.WeightedLp(2, [1, 0.8]), 2, 1.25),
        (norms.Composed(np.diag([0.5, -1.0]), norms.WeightedLinf([1, 1])), math.inf, 2.0),
    ],
)
def test_certificate_exact(spec, ref, R):
    cert = norms.certificate_exact(spec, ref)
    assert cert.exact
    assert cert.R == pytest.approx(R, rel=1e-15)
    if spec.dim == 2:
        assert sup_ratio_2d(spec, ref) == pytest.approx(R, rel=1e-6)


def test_certificate_exact_reports_rescale():
    with pytest.raises(NormalizationError) as info:
        norms.certificate_exact(norms.WeightedLinf([2.0, 1.0]), "infinity")
    assert info.value.rescale == 0.5
    fixed = norms.scaled(norms.WeightedLinf([2.0, 1.0]), info.value.rescale)
    assert norms.certificate_exact(fixed, math.inf).R == 2.0


@pytest.mark.parametrize(
    "spec, ref",
    [
        (norms.Polytope([[1, 0], [0, 1]]), math.inf),
        (norms.WeightedLp(3, [1, 1]), 2),
        (norms.Composed([[1, 0.1], [0, 1]], norms.WeightedLinf([1, 1])), math.inf),
    ],
)
def test_certificate_exact_unsupported(spec, ref):
    with pytest.raises(UnsupportedFamilyError):
        norms.certificate_exact(spec, ref)


def test_certificate_sampled_examples(linf_two_thirds):
    cert = norms.certificate_sampled(linf_two_thirds, math.inf, samples=10_000, seed=3)
    assert not cert.exact
    assert 1.49 <= cert.R <= 1.5 + 1e-12
    assert norms.certificate_sampled(norms.WeightedLinf([1, 1]), math.inf, 50, 1).R == 1.0
    box = norms.Polytope([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert norms.certificate_sampled(box, "inf", 1000, 0).R == pytest.approx(1.0, abs=1e-15)


def test_certificate_sampled_deterministic():
    spec = norms.Composed([[1, 0.2], [0.1, 0.9]], norms.WeightedLp(2, [0.5, 0.5]))
    a = norms.certificate_sampled(spec, 2, 500, seed=7)
    b = norms.certificate_sampled(spec, 2, 500, seed=7)
    assert a == b


def test_certificate_sampled_detects_normalization_violation():
    with pytest.raises(NormalizationError) as info:
        norms.certificate_sampled(norms.WeightedLinf([1.0, 1.2]), math.inf, 100, 0)
    assert info.value.rescale == pytest.approx(1 / 1.2)
    with pytest.raises(ValueError):
        norms.certificate_sampled(norms.WeightedLinf([1.0]), math.inf, 0, 0)


def test_json_round_trip():
    spec = norms.Composed(
        [[1, 0.5], [0, 2]], norms.Polytope([[1, 0], [0, 1], [1, 1]])
    )
    back = norms.from_json(norms.to_json(spec))
    x = np.array([0.3, -1.7])
    assert norms.evaluate(back, x) == norms.evaluate(spec, x)
    assert norms.to_json(norms.WeightedLp(2.0, [1, 0.5])) == {
        "kind": "weighted_lp", "p": 2.0, "weights": [1.0, 0.5]}
    with pytest.raises(InvalidNormError):
        norms.from_json({"kind": "hexagon"})
    with pytest.raises(InvalidNormError):
        norms.from_json({"kind": "weighted_linf"})


# ---------------------------------------------------------------- properties

dims = st.integers(1, 6)
seeds = st.integers(0, 2**32 - 1)


def make_spec(kind, dim, rng):
    w = rng.uniform(0.2, 1.0, dim)
    if kind == "lp":
        return norms.WeightedLp(float(rng.uniform(1.05, 8)), w)
    if kind == "linf":
        return norms.WeightedLinf(w)
    if kind == "polytope":
        return norms.Polytope(np.vstack([np.eye(dim), rng.standard_normal((3, dim))]))
    m = np.eye(dim) + 0.3 * rng.standard_normal((dim, dim))
    return norms.Composed(m, norms.WeightedLp(2.5, w))


kinds = st.sampled_from(["lp", "linf", "polytope", "composed"])


@settings(max_examples=200, deadline=None)
@given(kinds, dims, seeds)
def test_homogeneity(kind, dim, seed):
    rng = np.random.default_rng(seed)
    spec = make_spec(kind, dim, rng)
    x = rng.standard_normal(dim)
    t = float(rng.standard_normal() * 10)
    assert norms.evaluate(spec, t * x) == pytest.approx(
        abs(t) * norms.evaluate(spec, x), rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(kinds, dims, seeds)
def test_triangle_inequality(kind, dim, seed):
    rng = np.random.default_rng(seed)
    spec = make_spec(kind, dim, rng)
    x, y = rng.standard_normal((2, dim))
    lhs = norms.evaluate(spec, x + y)
    assert lhs <= norms.evaluate(spec, x) + norms.evaluate(spec, y) + 1e-12 * max(1.0, lhs)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["lp", "linf", "diag"]), dims, seeds)
def test_exact_certificate_soundness(kind, dim, seed):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.5, 1.0, dim)
    if kind == "lp":
        spec, ref = norms.WeightedLp(3.0, w), 3.0
    elif kind == "linf":
        spec, ref = norms.WeightedLinf(w), math.inf
    else:
        d = rng.uniform(0.5, 1.0, dim) * rng.choice([-1, 1], dim)
        spec, ref = norms.Composed(np.diag(d), norms.WeightedLinf(w)), math.inf
    cert = norms.certificate_exact(spec, ref)
    xs = rng.standard_normal((200, dim))
    own = norms.evaluate(spec, xs)
    refs = norms.lp_norm(xs, ref)
    assert np.all(own <= refs + 1e-12 * refs)
    assert np.all(refs <= cert.R * own + 1e-12 * refs)
    sampled = norms.certificate_sampled(spec, ref, samples=300, seed=seed % 1000)
    assert sampled.R <= cert.R * (1 + 1e-12)
