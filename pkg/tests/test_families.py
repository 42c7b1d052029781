import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadcmc.errors import BadSpec, CurvatureOutOfBounds
from quadcmc.families import (
    BaseSurfaceSpec,
    CliffordSpec,
    CounterexampleSpec,
    UmbilicalSpec,
    clifford_closed_forms,
    complement_basis,
    immersion_factor,
    make_base_surface,
    make_clifford,
    make_counterexample,
    make_family,
    make_umbilical,
)
from quadcmc.geometry import shape_operator
from quadcmc.sampling import sample_points


@pytest.mark.parametrize("n,k,r", [(2, 1, 0.6), (3, 1, 0.4), (3, 2, 0.75), (4, 2, 0.3)])
def test_clifford_curvatures_match_closed_forms(n, k, r):
    surf = make_clifford(CliffordSpec(n, k, r))
    s = math.sqrt(1 - r * r)
    for p in sample_points(surf, 5, seed=n + k):
        curv = shape_operator(surf, p)
        want = sorted([-s / r] * k + [r / s] * (n - k))
        np.testing.assert_allclose(np.sort(curv.kappas), want, atol=1e-9)
        assert curv.mean_h == pytest.approx((n * r * r - k) / (n * r * s), abs=1e-9)
        assert curv.norm_a_sq == pytest.approx(k / r**2 + (n - k) / (1 - r**2) - n, abs=1e-9)


def test_minimal_clifford_radius_gives_zero_mean_curvature():
    forms = clifford_closed_forms(CliffordSpec(2, 1, math.sqrt(0.5)))
    assert forms["mean_h"] == pytest.approx(0.0, abs=1e-15)
    assert forms["norm_a_sq"] == pytest.approx(2.0)


@given(st.floats(-0.95, 0.95))
def test_umbilical_curvature(c):
    surf = make_umbilical(UmbilicalSpec(np.eye(4)[1], c, 2))
    for p in sample_points(surf, 3, seed=1):
        np.testing.assert_allclose(shape_operator(surf, p).kappas, c / math.sqrt(1 - c * c), atol=1e-9)


@given(st.lists(st.floats(-1, 1), min_size=5, max_size=5).filter(lambda v: np.linalg.norm(v) > 0.1))
def test_complement_basis_is_orthonormal(v):
    v = np.array(v)
    basis = complement_basis(v)
    np.testing.assert_allclose(basis @ basis.T, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(basis @ v, 0, atol=1e-12)


@pytest.mark.parametrize(
    "spec",
    [
        CliffordSpec(2, 0, 0.5),
        CliffordSpec(2, 2, 0.5),
        CliffordSpec(2, 1, 1.0),
        CliffordSpec(2, 1, 0.0),
    ],
)
def test_bad_clifford_specs(spec):
    with pytest.raises(BadSpec):
        make_clifford(spec)


def test_bad_umbilical_specs():
    with pytest.raises(BadSpec):
        make_umbilical(UmbilicalSpec(np.eye(4)[0], 1.0, 2))
    with pytest.raises(BadSpec):
        make_umbilical(UmbilicalSpec(np.array([1.0, 1.0, 0, 0]), 0.2, 2))


def test_unknown_family():
    with pytest.raises(BadSpec):
        make_family("torus")


def test_base_surface_curvature_bounds():
    base = make_base_surface(BaseSurfaceSpec())
    assert 1 < base.meta["kappa_min"] < base.meta["kappa_max"] < 2
    # a round small sphere of colatitude acos(0.8) has kappa = cot(rho0) = 4/3
    round_ = make_base_surface(BaseSurfaceSpec(eps=0.0))
    assert round_.meta["kappa_min"] == pytest.approx(4 / 3, abs=1e-9)
    assert round_.meta["kappa_max"] == pytest.approx(4 / 3, abs=1e-9)


def test_base_surface_with_third_harmonic_leaves_the_band():
    with pytest.raises(CurvatureOutOfBounds):
        make_base_surface(BaseSurfaceSpec(eps=0.02, m=3))


@given(st.floats(1.0, 2.0), st.floats(-5, 5))
def test_immersion_factor_stays_between_two_and_two_lambda(lam, s):
    f = immersion_factor(lam, s)
    assert 2 - 1e-12 <= f <= 2 * lam + 1e-12


def test_counterexample_is_not_cmc_but_has_ell_equal_f():
    surf = make_counterexample(CounterexampleSpec())
    hs = []
    for p in sample_points(surf, 20, seed=5):
        curv = shape_operator(surf, p)
        hs.append(curv.mean_h)
        x = surf.charts[0].value(p.params)
        nu = surf.charts[0].normal(p.params)
        assert x[0] == pytest.approx(nu[0], abs=1e-12)
    assert max(hs) - min(hs) > 1e-2
