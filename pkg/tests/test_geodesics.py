import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadcmc.errors import AnchorNotOnN, CriticalAnchor, HitCriticalPoint, NotProportional, OutOfRange, PoleAtS
from quadcmc.exact import IdentityHolds, OnlyZeroSolution
from quadcmc.families import CliffordSpec, CounterexampleSpec, make_clifford, make_counterexample
from quadcmc.geodesics import (
    anchor_curvatures,
    circle_params,
    closed_form_beta,
    find_anchor_on_n,
    geodesic_defect,
    geodesic_suite,
    integrate_vtop_flow,
    partition_and_obstruction,
    pole_positions,
    propagate_kappa,
    reparametrize_arclength,
    transport_factor,
    w_of,
)
from quadcmc.geometry import ChartPoint
from quadcmc.support import support_sample

CLIFFORD = make_clifford(CliffordSpec(2, 1, 0.6))
E1 = np.eye(4)[0]
LAM = 0.75
lams = st.floats(0.2, 5.0) | st.floats(-5.0, -0.2)
kappas = st.floats(-4, 4)


def _anchor():
    return find_anchor_on_n(CLIFFORD, ChartPoint(np.array([0.3, 0.3])), E1)


def test_anchor_lies_on_n():
    p = _anchor()
    assert abs(support_sample(CLIFFORD, p, E1).ell) < 1e-12


def test_closed_form_starts_at_the_anchor_with_unit_speed():
    cp = circle_params(CLIFFORD, _anchor(), E1, LAM)
    beta0, nu0 = closed_form_beta(cp, 0.0)
    np.testing.assert_allclose(beta0, cp.anchor_x, atol=1e-15)
    np.testing.assert_allclose(nu0, cp.anchor_nu, atol=1e-15)
    h = 1e-5
    speed = np.linalg.norm(closed_form_beta(cp, h)[0] - closed_form_beta(cp, -h)[0]) / (2 * h)
    assert speed == pytest.approx(1.0, abs=1e-8)


def test_closed_form_stays_on_sphere_and_tracks_ell_law():
    cp = circle_params(CLIFFORD, _anchor(), E1, LAM)
    s = np.linspace(-0.9, 0.9, 41) * cp.half_period
    beta, nu = closed_form_beta(cp, s)
    np.testing.assert_allclose(np.sum(beta * beta, axis=1), 1, atol=1e-13)
    np.testing.assert_allclose(np.sum(nu * nu, axis=1), 1, atol=1e-13)
    np.testing.assert_allclose(np.sum(beta * nu, axis=1), 0, atol=1e-13)
    np.testing.assert_allclose(beta @ E1, cp.ell_along(s), atol=1e-13)


def test_closed_form_guards():
    cp = circle_params(CLIFFORD, _anchor(), E1, LAM)
    with pytest.raises(OutOfRange):
        closed_form_beta(cp, cp.half_period)
    off = circle_params(CLIFFORD, ChartPoint(np.array([0.3, 0.3])), E1, LAM)
    with pytest.raises(AnchorNotOnN):
        closed_form_beta(off, 0.1)


def test_circle_params_guards():
    with pytest.raises(NotProportional):
        # on N both support functions vanish, so the test needs a point off N
        circle_params(CLIFFORD, ChartPoint(np.array([0.3, 0.3])), E1, 2.0)
    with pytest.raises(CriticalAnchor):
        circle_params(CLIFFORD, ChartPoint(np.array([0.0, 0.3])), E1, LAM)
    with pytest.raises(HitCriticalPoint):
        integrate_vtop_flow(CLIFFORD, ChartPoint(np.array([0.0, 0.3])), E1)


@given(kappas, lams)
def test_propagation_is_identity_at_anchor(kappa, lam):
    assert transport_factor(kappa, lam, 0.0) == pytest.approx(1.0)
    if abs(transport_factor(kappa, lam, 0.0)) > 1e-9:
        assert propagate_kappa(kappa, lam, 0.0) == pytest.approx(kappa, abs=1e-9 * (1 + abs(kappa)))


@given(lams, st.floats(-1, 1))
def test_fixed_curvatures_do_not_move(lam, s):
    # kappa = -1/lambda and kappa = lambda are fixed points of the propagation
    assert propagate_kappa(-1 / lam, lam, s) == pytest.approx(-1 / lam)
    assert propagate_kappa(lam, lam, s) == pytest.approx(lam, rel=1e-9)


def test_pole_positions_and_pole_error():
    lam, kappa = 1.0, -3.0
    poles = pole_positions(kappa, lam)
    assert len(poles) == 2
    with pytest.raises(PoleAtS):
        propagate_kappa(kappa, lam, poles[1])
    assert pole_positions(1.5, 1.0) == []


def test_integrated_flow_matches_closed_form_and_is_geodesic():
    anchor = _anchor()
    cp = circle_params(CLIFFORD, anchor, E1, LAM)
    s_end = 0.8 * cp.half_period
    flow = integrate_vtop_flow(CLIFFORD, anchor, E1, (0.0, 5.0), dt=1e-3, s_stop=s_end)
    path = reparametrize_arclength(flow, ds=1e-3, s_range=(0.0, s_end))
    beta, _ = closed_form_beta(cp, path.times)
    assert np.max(np.linalg.norm(path.points - beta, axis=1)) < 1e-6
    assert geodesic_defect(path) < 1e-4
    again = reparametrize_arclength(path, ds=1e-3)
    np.testing.assert_allclose(again.points, path.points, atol=1e-9)


def test_clifford_partition_is_consistent():
    anchor = _anchor()
    k, _ = anchor_curvatures(CLIFFORD, anchor, E1)
    res = partition_and_obstruction(k, LAM, CLIFFORD.meta["mean_h"], n=2)
    assert res.consistent and res.partition.i2 == (0,)
    assert isinstance(res.verdict, IdentityHolds)


@given(st.fractions(1, 5, max_denominator=8), st.fractions(-3, 3, max_denominator=8), st.fractions(-2, 2, max_denominator=8))
def test_generic_curvature_is_inconsistent(lam, kappa, h):
    lam, kappa = float(lam), float(kappa)
    if abs(kappa - lam) < 1e-3 or abs(kappa + 1 / lam) < 1e-3:
        return
    res = partition_and_obstruction([kappa], lam, float(h), n=2)
    assert not res.consistent
    assert isinstance(res.verdict, OnlyZeroSolution)


def test_suite_on_counterexample():
    surf = make_counterexample(CounterexampleSpec())
    anchor = find_anchor_on_n(surf, ChartPoint(surf.charts[0].center + 0.3), E1)
    rep = geodesic_suite(surf, anchor, E1, 1.0)
    assert rep.w == pytest.approx(w_of(1.0)) == pytest.approx(math.sqrt(2))
    assert rep.closed_form_point < 1e-4 and rep.closed_form_normal < 1e-4
    assert rep.ell_law < 1e-6 and rep.kappa_propagation < 1e-4
    assert rep.cmc_closure is None
    assert rep.table and set(rep.table[0]) == {"s", "point", "ell", "kappa_predicted", "kappa_measured"}
