"""Charts, jets, normals and shape operators of hypersurfaces M^n in S^{n+1}.

A hypersurface is described by one or more charts. Each chart maps a box of
parameters into R^{n+2} and may supply closed-form first and second
derivatives, a closed-form Gauss map and its first derivatives. Anything a
chart leaves out is filled in by central differences.

Shape operators follow the convention ``A = -d nu`` and are expressed in an
orthonormal tangent frame obtained by Gram-Schmidt on the chart derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import Asymmetric, OutOfDomain, RankDeficient

TAU_GEO_ANALYTIC = 1e-9
TAU_GEO_FD = 1e-6
TAU_FD = 1e-6
TAU_RANK = 1e-12

FD_STEP = 1e-5
# second differences of values lose ~eps/h^2; 1e-5 would leave ~1e-6 noise
FD_STEP_SECOND = 1e-4

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Chart:
    """A parameter box together with evaluators of the immersion on it.

    ``lows``/``highs`` bound each parameter; periodic parameters wrap with
    period ``highs - lows``, the others must stay strictly inside.
    """

    lows: np.ndarray
    highs: np.ndarray
    periodic: tuple
    value: ArrayFn
    d1: Optional[ArrayFn] = None
    d2: Optional[ArrayFn] = None
    normal: Optional[ArrayFn] = None
    normal_d1: Optional[ArrayFn] = None

    @property
    def dim(self) -> int:
        return len(self.lows)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lows) + np.asarray(self.highs))


@dataclass(frozen=True)
class Hypersurface:
    """An immersed hypersurface of the unit sphere S^{dim_n+1}."""

    dim_n: int
    charts: tuple
    orientation: int = 1
    name: str = "hypersurface"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def ambient_dim(self) -> int:
        return self.dim_n + 2


@dataclass(frozen=True)
class ChartPoint:
    params: np.ndarray
    chart: int = 0


PointLike = Union[ChartPoint, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class SurfaceJet:
    value: np.ndarray
    d1: np.ndarray  # (n, N)
    d2: Optional[np.ndarray]  # (n, n, N)
    analytic: bool

    @property
    def metric(self) -> np.ndarray:
        return self.d1 @ self.d1.T


@dataclass(frozen=True)
class NormalJet:
    nu: np.ndarray
    d_nu: np.ndarray  # (n, N): derivative of nu along each chart parameter
    analytic: bool


@dataclass(frozen=True)
class CurvatureData:
    shape: np.ndarray
    kappas: np.ndarray
    mean_h: float
    norm_a_sq: float
    frame: np.ndarray  # (n, N) orthonormal tangent frame the shape is written in

    def apply(self, w: np.ndarray) -> np.ndarray:
        """A(w) for an ambient vector w, using only its tangential part."""
        coords = self.frame @ w
        return self.frame.T @ (self.shape @ coords)


def as_point(p: PointLike) -> ChartPoint:
    if isinstance(p, ChartPoint):
        return p
    return ChartPoint(np.asarray(p, dtype=float))


def _chart(surface: Hypersurface, p: ChartPoint) -> Chart:
    return surface.charts[p.chart]


def wrap_params(chart: Chart, params: np.ndarray) -> np.ndarray:
    """Reduce periodic parameters into their fundamental box."""
    out = np.array(params, dtype=float)
    lows = np.asarray(chart.lows, dtype=float)
    highs = np.asarray(chart.highs, dtype=float)
    for i, per in enumerate(chart.periodic):
        if per:
            period = highs[i] - lows[i]
            out[i] = lows[i] + np.mod(out[i] - lows[i], period)
    return out


def check_domain(chart: Chart, params: np.ndarray) -> None:
    params = np.asarray(params, dtype=float)
    if params.shape != (chart.dim,):
        raise OutOfDomain(f"expected {chart.dim} chart parameters, got shape {params.shape}")
    for i, per in enumerate(chart.periodic):
        if per:
            continue
        if not chart.lows[i] < params[i] < chart.highs[i]:
            raise OutOfDomain(
                f"parameter {i} = {params[i]!r} outside ({chart.lows[i]}, {chart.highs[i]})"
            )


def _central_d1(fn: ArrayFn, params: np.ndarray, h: float) -> np.ndarray:
    rows = []
    for i in range(len(params)):
        e = np.zeros_like(params)
        e[i] = h
        rows.append((fn(params + e) - fn(params - e)) / (2 * h))
    return np.array(rows)


def _second_differences(fn: ArrayFn, params: np.ndarray, h: float) -> np.ndarray:
    n = len(params)
    f0 = fn(params)
    out = np.empty((n, n) + f0.shape)
    eye = np.eye(n) * h
    for i in range(n):
        out[i, i] = (fn(params + eye[i]) - 2 * f0 + fn(params - eye[i])) / h**2
        for j in range(i + 1, n):
            mixed = (
                fn(params + eye[i] + eye[j])
                - fn(params + eye[i] - eye[j])
                - fn(params - eye[i] + eye[j])
                + fn(params - eye[i] - eye[j])
            ) / (4 * h**2)
            out[i, j] = out[j, i] = mixed
    return out


def immersion_jet(surface: Hypersurface, p: PointLike, *, fd: bool = False, order: int = 2) -> SurfaceJet:
    """Value and first/second parameter derivatives of the immersion at ``p``.

    With ``fd=True`` every derivative comes from central differences of the
    value map, regardless of what the chart provides. ``order=1`` skips the
    second derivatives (``d2`` is then None).
    """
    p = as_point(p)
    chart = _chart(surface, p)
    check_domain(chart, p.params)
    x = np.asarray(chart.value(p.params), dtype=float)

    analytic = not fd and chart.d1 is not None and chart.d2 is not None
    if not fd and chart.d1 is not None:
        d1 = np.asarray(chart.d1(p.params), dtype=float)
    else:
        d1 = _central_d1(chart.value, p.params, FD_STEP)

    if order < 2:
        d2 = None
    elif not fd and chart.d2 is not None:
        d2 = np.asarray(chart.d2(p.params), dtype=float)
    elif not fd and chart.d1 is not None:
        d2 = _central_d1(chart.d1, p.params, FD_STEP)
        d2 = 0.5 * (d2 + np.swapaxes(d2, 0, 1))
    else:
        d2 = _second_differences(chart.value, p.params, FD_STEP_SECOND)

    # relative test: det(g) alone shrinks with the radii and the dimension
    eig = np.linalg.eigvalsh(d1 @ d1.T)
    if eig[0] <= TAU_RANK * eig[-1]:
        raise RankDeficient(f"first fundamental form is singular at {p.params}")
    return SurfaceJet(value=x, d1=d1, d2=d2, analytic=analytic)


def cofactor_vector(rows: np.ndarray) -> np.ndarray:
    """Generalised cross product u of N-1 vectors in R^N.

    ``u`` is orthogonal to every row and ``det([rows; u]) = |u|^2``.
    """
    rows = np.asarray(rows, dtype=float)
    m, big_n = rows.shape
    if m != big_n - 1:
        raise ValueError("need N-1 vectors in R^N")
    if big_n == 3:
        # explicit cross product; np.cross carries large overhead for 3-vectors
        (a0, a1, a2), (b0, b1, b2) = rows.tolist()
        return np.array([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    minors = np.stack([np.delete(rows, k, axis=1) for k in range(big_n)])
    signs = (-1.0) ** (big_n - 1 + np.arange(big_n))
    return signs * np.linalg.det(minors)


def cofactor_normal(x: np.ndarray, d1: np.ndarray, d2: Optional[np.ndarray] = None):
    """Unit normal of span{x, d1} and, if ``d2`` is given, its derivatives."""
    rows = np.vstack([x, d1])
    u = cofactor_vector(rows)
    norm = np.linalg.norm(u)
    nu = u / norm
    if d2 is None:
        return nu, None
    n = d1.shape[0]
    d_nu = np.empty_like(d1)
    for i in range(n):
        du = np.zeros_like(u)
        # multilinearity: differentiate one slot at a time
        for slot in range(n + 1):
            r = rows.copy()
            r[slot] = d1[i] if slot == 0 else d2[i, slot - 1]
            du += cofactor_vector(r)
        d_nu[i] = (du - nu * (nu @ du)) / norm
    return nu, d_nu


def unit_normal(surface: Hypersurface, p: PointLike, *, fd: bool = False) -> NormalJet:
    """Gauss map and its chart derivatives at ``p``.

    Families with a closed-form normal use it; otherwise the normal is the
    oriented cofactor complement of ``{x, d1}``.
    """
    p = as_point(p)
    chart = _chart(surface, p)
    jet = immersion_jet(surface, p, fd=fd, order=1 if chart.normal is not None else 2)
    if chart.normal is not None:
        nu = np.asarray(chart.normal(p.params), dtype=float)
        if not fd and chart.normal_d1 is not None:
            d_nu = np.asarray(chart.normal_d1(p.params), dtype=float)
            analytic = True
        else:
            d_nu = _central_d1(chart.normal, p.params, FD_STEP)
            analytic = False
    else:
        nu, d_nu = cofactor_normal(jet.value, jet.d1, jet.d2)
        nu = surface.orientation * nu
        d_nu = surface.orientation * d_nu
        analytic = jet.analytic
    return NormalJet(nu=nu, d_nu=d_nu, analytic=analytic)


def tangent_frame(d1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt frame of the rows of ``d1``.

    Returns ``(frame, coeffs)`` with ``frame = coeffs @ d1``, rows orthonormal.
    """
    n = d1.shape[0]
    frame = np.zeros_like(d1)
    coeffs = np.zeros((n, n))
    for a in range(n):
        vec = d1[a].copy()
        c = np.zeros(n)
        c[a] = 1.0
        for b in range(a):
            proj = frame[b] @ vec
            vec -= proj * frame[b]
            c -= proj * coeffs[b]
        norm = np.linalg.norm(vec)
        if norm < np.sqrt(TAU_RANK):
            raise RankDeficient("chart derivatives are linearly dependent")
        frame[a] = vec / norm
        coeffs[a] = c / norm
    return frame, coeffs


def shape_operator(surface: Hypersurface, p: PointLike, *, fd: bool = False) -> CurvatureData:
    """Shape operator ``A = -d nu`` at ``p`` in an orthonormal tangent frame.

    The analytic route projects ``-d nu`` onto the frame when the family
    gives normal derivatives in closed form; otherwise it uses the second
    fundamental form ``<phi_ij, nu>``. ``fd=True`` forces the latter with
    every derivative taken by finite differences.
    """
    p = as_point(p)
    chart = _chart(surface, p)
    via_dnu = not fd and chart.normal is not None and chart.normal_d1 is not None
    jet = immersion_jet(surface, p, fd=fd, order=1 if via_dnu else 2)
    normal = unit_normal(surface, p, fd=fd)
    frame, coeffs = tangent_frame(jet.d1)

    if via_dnu:
        # S_ab = -<d nu(e_a), e_b>, d nu(e_a) = sum_i coeffs[a, i] d_i nu
        dnu_frame = coeffs @ normal.d_nu
        shape = -(dnu_frame @ frame.T)
        tol = TAU_FD
    else:
        second = np.einsum("ijk,k->ij", jet.d2, normal.nu)
        shape = coeffs @ second @ coeffs.T
        tol = TAU_FD if jet.analytic else 10 * TAU_FD
    defect = np.max(np.abs(shape - shape.T)) if shape.size else 0.0
    if defect > 10 * tol:
        raise Asymmetric(f"shape operator asymmetric by {defect:.3e} at {p.params}")
    shape = 0.5 * (shape + shape.T)
    kappas = np.sort(np.linalg.eigvalsh(shape), kind="stable")
    n = surface.dim_n
    return CurvatureData(
        shape=shape,
        kappas=kappas,
        mean_h=float(np.sum(kappas) / n),
        norm_a_sq=float(np.sum(kappas**2)),
        frame=frame,
    )


def tangent_coords(jet: SurfaceJet, w: np.ndarray) -> np.ndarray:
    """Chart components c of the tangential part of w: sum c_i d1_i."""
    return np.linalg.solve(jet.metric, jet.d1 @ w)


def jet_defects(jet: SurfaceJet) -> dict:
    """Residuals of the sphere-membership, tangency and symmetry invariants."""
    return {
        "norm": abs(jet.value @ jet.value - 1.0),
        "tangency": float(np.max(np.abs(jet.d1 @ jet.value))) if jet.d1.size else 0.0,
        "symmetry": float(np.max(np.abs(jet.d2 - np.swapaxes(jet.d2, 0, 1)))) if jet.d2 is not None else 0.0,
    }


def normal_defects(jet: SurfaceJet, nu: np.ndarray) -> dict:
    return {
        "unit": abs(nu @ nu - 1.0),
        "radial": abs(nu @ jet.value),
        "tangent": float(np.max(np.abs(jet.d1 @ nu))),
    }
