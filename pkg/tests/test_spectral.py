import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadcmc.errors import BadGrid, BadSpec, MinimalCase, NotCMC
from quadcmc.errors import TruncationWarning
from quadcmc.families import CliffordSpec, CounterexampleSpec, make_clifford, make_counterexample
from quadcmc.sampling import quadrature, sample_points
from quadcmc.spectral import (
    classify,
    clifford_spectrum,
    clifford_threshold,
    convergence_ratios,
    dimension_bound_report,
    find_line,
    index_counts,
    index_test_constants,
    mesh_laplacian_crosscheck,
    merge_lines,
    sphere_multiplicity,
    sphere_spectrum,
    spectrum_rows,
    verify_test_functions,
)


@pytest.mark.parametrize("m,mults", [(1, [1, 2, 2, 2]), (2, [1, 3, 5, 7]), (3, [1, 4, 9, 16])])
def test_sphere_multiplicities(m, mults):
    assert [sphere_multiplicity(m, j) for j in range(4)] == mults


def test_sphere_spectrum_scales_with_radius():
    lines = sphere_spectrum(2, radius=0.5, j_max=3)
    assert [ln.eigenvalue for ln in lines] == [0.0, 8.0, 24.0, 48.0]


def test_clifford_first_lines():
    lines = clifford_spectrum(CliffordSpec(2, 1, 0.6), j_max=4)
    mu10 = find_line(lines, 1 / 0.36)
    mu01 = find_line(lines, 1 / 0.64)
    assert mu10.label == (1, 0) and mu10.multiplicity == 2
    assert mu01.label == (0, 1) and mu01.multiplicity == 2
    assert clifford_threshold(CliffordSpec(2, 1, 0.6)) == pytest.approx(1 / 0.36 + 1 / 0.64)


def test_truncation_warning():
    with pytest.warns(TruncationWarning):
        clifford_spectrum(CliffordSpec(2, 1, 0.6), j_max=1)


@pytest.mark.parametrize("r,weak", [(0.2, 10), (0.3, 8), (0.5, 4), (0.6, 4), (0.707, 4), (0.8, 4), (0.866, 4)])
def test_weak_index_of_clifford_tori(r, weak):
    assert index_counts(CliffordSpec(2, 1, r)).weak_index == weak


def test_minimal_clifford_index_and_kernel():
    rep = index_counts(CliffordSpec(2, 1, math.sqrt(0.5)))
    assert rep.strong_index == 5
    assert {ln.label for ln in rep.kernel_lines} == {(1, 1)}


@given(st.floats(0.1, 0.95))
def test_index_is_at_least_n_plus_2(r):
    assert index_counts(CliffordSpec(2, 1, r)).weak_index >= 4


def test_classify_and_rows():
    assert classify(1.0, 1.0 + 1e-12) == "kernel"
    assert classify(0.5, 1.0) == "neg" and classify(2.0, 1.0) == "pos"
    rows = spectrum_rows(clifford_spectrum(CliffordSpec(2, 1, 0.6), j_max=3), 2.0)
    assert set(rows[0]) == {"p", "q", "mu", "mult", "jac", "class"}


def test_merge_lines_adds_multiplicities():
    lines = clifford_spectrum(CliffordSpec(2, 1, math.sqrt(0.5)), j_max=3)
    assert any(abs(mu - 2.0) < 1e-12 and m == 4 for mu, m in merge_lines(lines))


def test_index_constants_on_clifford():
    forms = make_clifford(CliffordSpec(2, 1, 0.6)).meta
    c = index_test_constants(forms["mean_h"], forms["norm_a_sq"], 2)
    assert {round(c.alpha_plus, 12), round(c.alpha_minus, 12)} == {round(-4 / 3, 12), 0.75}
    assert c.mu_plus == pytest.approx(1 / 0.36, abs=1e-12)
    assert c.mu_minus == pytest.approx(1 / 0.64, abs=1e-12)
    with pytest.raises(MinimalCase):
        index_test_constants(0.0, 2.0, 2)


@given(st.floats(-3, 3).filter(lambda h: abs(h) > 1e-3), st.floats(0, 10), st.integers(2, 5))
def test_constants_solve_the_eigen_relations(h, a2, n):
    # Delta(ell - alpha f) = -(n + alpha nH) ell + (nH + alpha |A|^2) f, which is
    # -mu (ell - alpha f) exactly when both relations below hold
    c = index_test_constants(h, a2, n)
    for alpha, mu in ((c.alpha_plus, c.mu_plus), (c.alpha_minus, c.mu_minus)):
        scale = 1 + abs(mu) + abs(alpha) * (abs(h) + a2) * n
        assert mu == pytest.approx(n + alpha * n * h, abs=1e-9 * scale)
        assert mu * alpha == pytest.approx(n * h + alpha * a2, abs=1e-9 * scale * (1 + abs(alpha)))
    assert c.jac_plus - c.jac_minus == pytest.approx(math.sqrt(c.disc_d))


def test_test_functions_on_clifford():
    surf = make_clifford(CliffordSpec(2, 1, 0.6))
    forms = surf.meta
    c = index_test_constants(forms["mean_h"], forms["norm_a_sq"], 2)
    quad = quadrature(surf, 16)
    res = verify_test_functions(surf, np.eye(4)[0], c, sample_points(surf, 10), quad)
    assert all(r.residual < 1e-4 for r in res)
    assert all(abs(r.integral) < 1e-8 for r in res)
    assert [r.degenerate for r in res].count(True) == 1


def test_test_functions_reject_non_cmc():
    surf = make_counterexample(CounterexampleSpec())
    with pytest.raises(NotCMC):
        verify_test_functions(surf, np.eye(4)[0], None, sample_points(surf, 10))


def test_dimension_bound_on_clifford():
    rep = dimension_bound_report(make_clifford(CliffordSpec(2, 1, 0.6)), None)
    assert rep.families == ("U+", "U-")
    assert rep.ranks == (2, 2) and rep.lower_bound == 4
    assert rep.cross_gram < 1e-6


def test_mesh_stencil_and_convergence():
    spec = CliffordSpec(2, 1, 0.6)
    coarse = mesh_laplacian_crosscheck(spec, 32)
    fine = mesh_laplacian_crosscheck(spec, 64)
    assert coarse.row_sum_max == 0 and coarse.separated
    assert abs(coarse.constant_mode) < 1e-8
    assert all(3.5 <= q <= 4.5 for q in convergence_ratios(coarse, fine))


def test_mesh_rejects_bad_input():
    with pytest.raises(BadGrid):
        mesh_laplacian_crosscheck(CliffordSpec(2, 1, 0.6), 8)
    with pytest.raises(BadSpec):
        mesh_laplacian_crosscheck(CliffordSpec(3, 1, 0.6), 32)


def test_second_factor_member_has_the_smaller_eigenvalue():
    # on M_1(0.6), f_{e3} = -0.75 ell_{e3}, so ell - alpha_- f = 1.5625 ell_{e3}
    surf = make_clifford(CliffordSpec(2, 1, 0.6))
    c = index_test_constants(surf.meta["mean_h"], surf.meta["norm_a_sq"], 2)
    assert c.alpha_minus == pytest.approx(0.75)
    res = verify_test_functions(surf, np.eye(4)[2], c, sample_points(surf, 10), quadrature(surf, 16))
    minus = next(r for r in res if r.label == "u-")
    assert minus.residual < 1e-4 and not minus.degenerate
    assert c.mu_minus == pytest.approx(1.5625)
