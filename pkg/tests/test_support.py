import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadcmc.errors import FIndeterminate, InsufficientSamples
from quadcmc.families import CliffordSpec, UmbilicalSpec, make_clifford, make_counterexample, CounterexampleSpec, make_umbilical
from quadcmc.geometry import ChartPoint
from quadcmc.sampling import quadrature, sample_points
from quadcmc.support import (
    basis_values,
    check_gradient_identities,
    check_laplacian_identities,
    cross_gram_norm,
    gram_dimension,
    laplace_beltrami,
    numerical_rank,
    proportionality_scan,
    support_sample,
)

CLIFFORD = make_clifford(CliffordSpec(2, 1, 0.6))
angles = st.floats(-math.pi, math.pi)
vectors = st.lists(st.floats(-1, 1), min_size=4, max_size=4)


def test_support_sample_splits_v():
    v = np.array([0.3, -0.2, 0.9, 0.1])
    s = support_sample(CLIFFORD, ChartPoint(np.array([0.7, -0.4])), v)
    np.testing.assert_allclose(s.v_top + s.ell * s.x + s.f * s.nu, v, atol=1e-14)
    assert abs(s.v_top @ s.x) < 1e-14 and abs(s.v_top @ s.nu) < 1e-14


@given(angles, angles, vectors)
def test_gradient_identities_on_clifford(t1, t2, v):
    res = check_gradient_identities(CLIFFORD, ChartPoint(np.array([t1, t2])), v)
    assert res.ell_residual < 1e-8 and res.f_residual < 1e-8


@given(angles, angles, vectors)
def test_laplacian_identities_on_clifford(t1, t2, v):
    res = check_laplacian_identities(CLIFFORD, ChartPoint(np.array([t1, t2])), v, h_spread=0.0)
    assert res.ell_residual < 1e-4 and res.f_residual < 1e-4


def test_laplace_beltrami_of_sphere_harmonic():
    # the height function on a unit great sphere is a first eigenfunction
    sphere = make_umbilical(UmbilicalSpec(np.eye(4)[0], 0.0, 2))
    p = ChartPoint(np.array([1.1, 0.4]))
    fn = lambda t: float(sphere.charts[0].value(t)[1])
    assert laplace_beltrami(sphere, p, fn) == pytest.approx(-2 * fn(p.params), abs=1e-6)


def test_f_identity_is_skipped_off_cmc():
    surf = make_counterexample(CounterexampleSpec())
    pts = sample_points(surf, 4, seed=2)
    res = check_laplacian_identities(surf, pts[0], np.eye(4)[0], probe=pts)
    assert res.f_residual is None and not res.cmc
    assert res.ell_residual < 1e-4


def test_proportionality_on_clifford_factors():
    pts = sample_points(CLIFFORD, 100, seed=4)
    first = proportionality_scan(CLIFFORD, np.eye(4)[0], pts)
    second = proportionality_scan(CLIFFORD, np.eye(4)[2], pts)
    assert first.lam == pytest.approx(0.75, abs=1e-12) and first.holds
    assert second.lam == pytest.approx(-4 / 3, abs=1e-12) and second.holds


def test_proportionality_fails_for_mixed_vector():
    pts = sample_points(CLIFFORD, 100, seed=4)
    res = proportionality_scan(CLIFFORD, np.array([1.0, 0, 1.0, 0]), pts)
    assert not res.holds


def test_proportionality_needs_samples_and_nonzero_f():
    with pytest.raises(InsufficientSamples):
        proportionality_scan(CLIFFORD, np.eye(4)[0], sample_points(CLIFFORD, 10))
    sphere = make_umbilical(UmbilicalSpec(np.eye(4)[0], 0.0, 2))
    with pytest.raises(FIndeterminate):
        proportionality_scan(sphere, np.eye(4)[1], sample_points(sphere, 100))


def test_gram_dimensions():
    assert gram_dimension(CLIFFORD, "V1") == 4
    assert gram_dimension(CLIFFORD, "V2") == 4
    sphere = make_umbilical(UmbilicalSpec(np.eye(4)[0], 0.0, 2))
    assert gram_dimension(sphere, "V1") == 3
    assert gram_dimension(sphere, "V2") == 1


def test_numerical_rank_ignores_tiny_directions():
    g = np.diag([1.0, 1e-3, 1e-12])
    assert numerical_rank(g) == 2


def test_basis_values_shape_and_cross_gram():
    quad = quadrature(CLIFFORD, 12)
    vals = basis_values(CLIFFORD, quad.points, "V2")
    assert vals.shape == (4, len(quad.points))
    assert cross_gram_norm(CLIFFORD, quad) > 1.0
