"""Height and support functions ell_v = <x, v>, f_v = <nu, v> and identities.

Derivatives used as oracles here are taken in the chart, independently of
the closed forms they are compared against: gradients from central
differences of ell_v and f_v, Laplacians from a divergence-form
Laplace-Beltrami stencil built only from the metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import FIndeterminate
from .geometry import (
    ChartPoint,
    Hypersurface,
    PointLike,
    as_point,
    immersion_jet,
    shape_operator,
    unit_normal,
    wrap_params,
)
from .sampling import quadrature, require_samples

TAU_H = 1e-6
HOLDS_TOL = 1e-7
RANK_RTOL = 1e-8
GRAD_STEP = 1e-5
LAPLACE_STEP = 1e-3


@dataclass(frozen=True)
class SupportSample:
    x: np.ndarray
    nu: np.ndarray
    ell: float
    f: float
    v_top: np.ndarray


def support_sample(surface: Hypersurface, p: PointLike, v) -> SupportSample:
    p = as_point(p)
    v = np.asarray(v, dtype=float)
    x = immersion_jet(surface, p, order=1).value
    nu = unit_normal(surface, p).nu
    ell = float(x @ v)
    f = float(nu @ v)
    return SupportSample(x=x, nu=nu, ell=ell, f=f, v_top=v - ell * x - f * nu)


def ell_fn(surface: Hypersurface, v, chart: int = 0) -> Callable[[np.ndarray], float]:
    v = np.asarray(v, dtype=float)
    c = surface.charts[chart]
    return lambda t: float(c.value(wrap_params(c, t)) @ v)


def f_fn(surface: Hypersurface, v, chart: int = 0) -> Callable[[np.ndarray], float]:
    v = np.asarray(v, dtype=float)
    c = surface.charts[chart]
    if c.normal is not None:
        return lambda t: float(c.normal(wrap_params(c, t)) @ v)
    return lambda t: float(unit_normal(surface, ChartPoint(wrap_params(c, t), chart)).nu @ v)


def combo_fn(surface: Hypersurface, v, alpha: float, chart: int = 0):
    """u = ell_v - alpha f_v."""
    ell, f = ell_fn(surface, v, chart), f_fn(surface, v, chart)
    return lambda t: ell(t) - alpha * f(t)


def chart_gradient(surface: Hypersurface, p: PointLike, fn, h: float = GRAD_STEP) -> np.ndarray:
    """Ambient gradient vector of a scalar chart function, by central differences."""
    p = as_point(p)
    jet = immersion_jet(surface, p, order=1)
    partials = np.empty(len(p.params))
    for i in range(len(p.params)):
        e = np.zeros_like(p.params)
        e[i] = h
        partials[i] = (fn(p.params + e) - fn(p.params - e)) / (2 * h)
    return np.linalg.solve(jet.metric, partials) @ jet.d1


def _metric_at(surface: Hypersurface, chart: int, params: np.ndarray):
    c = surface.charts[chart]
    d1 = c.d1(params) if c.d1 is not None else immersion_jet(surface, ChartPoint(params, chart), order=1).d1
    g = d1 @ d1.T
    return g, np.sqrt(np.linalg.det(g)), np.linalg.inv(g)


def laplace_beltrami(surface: Hypersurface, p: PointLike, fn, h: float = LAPLACE_STEP) -> float:
    """Delta u = (1/sqrt g) d_i (sqrt g g^ij d_j u) with a compact stencil.

    Diagonal fluxes use half-point metric values; mixed fluxes use central
    differences at the neighbouring full points. Second order in ``h``.
    """
    p = as_point(p)
    t0 = p.params
    n = len(t0)
    eye = np.eye(n) * h
    _, sq0, _ = _metric_at(surface, p.chart, t0)
    u0 = fn(t0)
    total = 0.0
    for i in range(n):
        up, dn = fn(t0 + eye[i]), fn(t0 - eye[i])
        _, sq_p, gi_p = _metric_at(surface, p.chart, t0 + 0.5 * eye[i])
        _, sq_m, gi_m = _metric_at(surface, p.chart, t0 - 0.5 * eye[i])
        total += (sq_p * gi_p[i, i] * (up - u0) - sq_m * gi_m[i, i] * (u0 - dn)) / h**2
        for j in range(n):
            if j == i:
                continue
            flux = []
            for sign in (1, -1):
                tc = t0 + sign * eye[i]
                _, sq, gi = _metric_at(surface, p.chart, tc)
                du = (fn(tc + eye[j]) - fn(tc - eye[j])) / (2 * h)
                flux.append(sq * gi[i, j] * du)
            total += (flux[0] - flux[1]) / (2 * h)
    return total / sq0


@dataclass(frozen=True)
class GradientReport:
    ell_residual: float
    f_residual: float


def check_gradient_identities(surface: Hypersurface, p: PointLike, v) -> GradientReport:
    """|grad ell_v - v_top| and |grad f_v + A(v_top)| at ``p``."""
    p = as_point(p)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return GradientReport(0.0, 0.0)
    sample = support_sample(surface, p, v)
    curv = shape_operator(surface, p)
    grad_ell = chart_gradient(surface, p, ell_fn(surface, v, p.chart))
    grad_f = chart_gradient(surface, p, f_fn(surface, v, p.chart))
    return GradientReport(
        ell_residual=float(np.linalg.norm(grad_ell - sample.v_top)),
        f_residual=float(np.linalg.norm(grad_f + curv.apply(sample.v_top))),
    )


def mean_curvature_spread(surface: Hypersurface, points: Sequence[PointLike]) -> float:
    hs = [shape_operator(surface, q).mean_h for q in points]
    return float(max(hs) - min(hs))


@dataclass(frozen=True)
class LaplacianReport:
    ell_residual: float
    f_residual: Optional[float]  # None when the surface is not CMC
    cmc: bool
    mean_h: float
    norm_a_sq: float


def check_laplacian_identities(
    surface: Hypersurface,
    p: PointLike,
    v,
    *,
    h_spread: Optional[float] = None,
    probe: Optional[Sequence[PointLike]] = None,
) -> LaplacianReport:
    """Residuals of Delta ell = -n ell + nH f and Delta f = -|A|^2 f + nH ell.

    The ell identity only needs the pointwise trace of A. The f identity
    uses constancy of H and is evaluated only when the H spread (given, or
    measured on ``probe``) stays below ``TAU_H``.
    """
    p = as_point(p)
    v = np.asarray(v, dtype=float)
    n = surface.dim_n
    if h_spread is None:
        if probe is None:
            probe = [ChartPoint(surface.charts[p.chart].center, p.chart), p]
        h_spread = mean_curvature_spread(surface, probe)
    cmc = h_spread < TAU_H
    curv = shape_operator(surface, p)
    sample = support_sample(surface, p, v)
    nh = n * curv.mean_h
    lap_ell = laplace_beltrami(surface, p, ell_fn(surface, v, p.chart))
    ell_res = abs(lap_ell + n * sample.ell - nh * sample.f)
    f_res = None
    if cmc:
        lap_f = laplace_beltrami(surface, p, f_fn(surface, v, p.chart))
        f_res = abs(lap_f + curv.norm_a_sq * sample.f - nh * sample.ell)
    return LaplacianReport(float(ell_res), None if f_res is None else float(f_res), cmc, curv.mean_h, curv.norm_a_sq)


@dataclass(frozen=True)
class ProportionalityResult:
    lam: float
    max_residual: float
    holds: bool
    samples: int


def proportionality_scan(surface: Hypersurface, v, points: Sequence[PointLike]) -> ProportionalityResult:
    """Least-squares lambda in ell_v = lambda f_v over ``points`` (>= 100)."""
    require_samples(len(points), 100)
    v = np.asarray(v, dtype=float)
    ells, fs = [], []
    for q in points:
        s = support_sample(surface, q, v)
        ells.append(s.ell)
        fs.append(s.f)
    ells, fs = np.array(ells), np.array(fs)
    ff = float(fs @ fs)
    if ff < 1e-12:
        raise FIndeterminate("f_v vanishes on the sample set")
    lam = float(ells @ fs) / ff
    resid = float(np.max(np.abs(ells - lam * fs)))
    return ProportionalityResult(lam=lam, max_residual=resid, holds=resid < HOLDS_TOL, samples=len(points))


def basis_values(surface: Hypersurface, points, kind: str) -> np.ndarray:
    """Rows i: values of ell_{e_i} (kind 'V1') or f_{e_i} ('V2') at the points."""
    rows = []
    for q in points:
        if kind == "V1":
            rows.append(immersion_jet(surface, q, order=1).value)
        elif kind == "V2":
            rows.append(unit_normal(surface, q).nu)
        else:
            raise ValueError(f"unknown family selector {kind!r}")
    return np.array(rows).T


def gram_matrix(values_a: np.ndarray, values_b: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return (values_a * weights) @ values_b.T


def numerical_rank(gram: np.ndarray, rtol: float = RANK_RTOL) -> int:
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def gram_dimension(surface: Hypersurface, family_selector: str, quad=None) -> int:
    """Rank of the L^2 Gram matrix of {ell_{e_i}} (V1) or {f_{e_i}} (V2)."""
    if quad is None:
        quad = quadrature(surface, 24)
    require_samples(len(quad.points), 10 * surface.ambient_dim, "quadrature nodes")
    vals = basis_values(surface, quad.points, family_selector)
    return numerical_rank(gram_matrix(vals, vals, quad.weights))


def cross_gram_norm(surface: Hypersurface, quad=None) -> float:
    """Frobenius norm of the V1-V2 block of the joint Gram matrix."""
    if quad is None:
        quad = quadrature(surface, 24)
    a = basis_values(surface, quad.points, "V1")
    b = basis_values(surface, quad.points, "V2")
    return float(np.linalg.norm(gram_matrix(a, b, quad.weights)))
