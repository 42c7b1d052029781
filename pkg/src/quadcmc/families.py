"""Closed-form hypersurface families.

* totally umbilical slices ``S^n(v, c) = {x in S^{n+1} : <x, v> = c}``
* Clifford products ``M_k(r) = S^k(r) x S^{n-k}(sqrt(1 - r^2))``
* a perturbed small sphere ``N`` of ``S^n`` and the non-CMC product
  immersion of ``S^1 x N`` on which ``ell_v = f_v`` for ``v = e_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadSpec, CurvatureOutOfBounds, DegenerateImmersion
from .geometry import (
    Chart,
    ChartPoint,
    Hypersurface,
    TAU_RANK,
    cofactor_normal,
    shape_operator,
)

SQRT2 = math.sqrt(2.0)


def sphere_jet(theta: np.ndarray):
    """Unit S^m in hyperspherical angles with value, d1 and d2.

    x_c = sin(t_0) ... sin(t_{c-1}) cos(t_c) for c < m and
    x_m = sin(t_0) ... sin(t_{m-1}).
    """
    theta = np.asarray(theta, dtype=float)
    m = len(theta)
    if m == 1:
        c, s = math.cos(theta[0]), math.sin(theta[0])
        return np.array([c, s]), np.array([[-s, c]]), np.array([[[-c, -s]]])
    sn, cs = np.sin(theta), np.cos(theta)
    f0 = np.ones((m + 1, m))
    f1 = np.zeros((m + 1, m))
    f2 = np.zeros((m + 1, m))
    for c in range(m + 1):
        for i in range(m):
            if i < c:
                f0[c, i], f1[c, i], f2[c, i] = sn[i], cs[i], -sn[i]
            elif i == c:
                f0[c, i], f1[c, i], f2[c, i] = cs[i], -sn[i], -cs[i]
    value = np.prod(f0, axis=1)
    d1 = np.empty((m, m + 1))
    d2 = np.empty((m, m, m + 1))
    for i in range(m):
        t = f0.copy()
        t[:, i] = f1[:, i]
        d1[i] = np.prod(t, axis=1)
        t2 = f0.copy()
        t2[:, i] = f2[:, i]
        d2[i, i] = np.prod(t2, axis=1)
        for j in range(i + 1, m):
            t3 = f0.copy()
            t3[:, i] = f1[:, i]
            t3[:, j] = f1[:, j]
            d2[i, j] = d2[j, i] = np.prod(t3, axis=1)
    return value, d1, d2


def sphere_box(m: int):
    """Parameter box for ``sphere_jet``: polar angles in (0, pi), last angle periodic."""
    lows = np.zeros(m)
    highs = np.full(m, math.pi)
    periodic = [False] * m
    lows[-1], highs[-1], periodic[-1] = -math.pi, math.pi, True
    return lows, highs, periodic


def complement_basis(v: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning v-perp, built from the coordinate axes in order."""
    v = np.asarray(v, dtype=float)
    skip = int(np.argmax(np.abs(v)))
    basis = [v / np.linalg.norm(v)]
    for k in range(len(v)):
        if k == skip:
            continue
        e = np.zeros(len(v))
        e[k] = 1.0
        for b in basis:
            e -= (b @ e) * b
        basis.append(e / np.linalg.norm(e))
    return np.array(basis[1:])


# ---------------------------------------------------------------- umbilical


@dataclass(frozen=True)
class UmbilicalSpec:
    v: np.ndarray
    c: float
    dim_n: int = 2

    def validate(self) -> None:
        v = np.asarray(self.v, dtype=float)
        if v.shape != (self.dim_n + 2,):
            raise BadSpec(f"axis must live in R^{self.dim_n + 2}")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise BadSpec("axis must be a unit vector")
        if not abs(self.c) < 1:
            raise BadSpec(f"|c| must be < 1, got {self.c}")
        if self.dim_n < 1:
            raise BadSpec("dimension must be positive")


def umbilical_closed_forms(c: float, n: int) -> dict:
    kappa = c / math.sqrt(1 - c * c)
    return {"kappas": [kappa] * n, "mean_h": kappa, "norm_a_sq": n * c * c / (1 - c * c)}


def make_umbilical(spec: UmbilicalSpec) -> Hypersurface:
    spec.validate()
    n = spec.dim_n
    v = np.asarray(spec.v, dtype=float)
    c = float(spec.c)
    rad = math.sqrt(1 - c * c)
    basis = complement_basis(v)
    lows, highs, periodic = sphere_box(n)

    def value(t):
        return c * v + rad * (sphere_jet(t)[0] @ basis)

    def d1(t):
        return rad * (sphere_jet(t)[1] @ basis)

    def d2(t):
        return rad * (sphere_jet(t)[2] @ basis)

    def normal(t):
        return (v - c * value(t)) / rad

    def normal_d1(t):
        return -(c / rad) * d1(t)

    chart = Chart(lows, highs, tuple(periodic), value, d1, d2, normal, normal_d1)
    return Hypersurface(
        dim_n=n,
        charts=(chart,),
        name=f"umbilical(c={c:g})",
        meta={"family": "umbilical", "axis": v, "c": c, **umbilical_closed_forms(c, n)},
    )


# ----------------------------------------------------------------- clifford


@dataclass(frozen=True)
class CliffordSpec:
    dim_n: int
    k: int
    r: float

    def validate(self) -> None:
        if self.dim_n < 2:
            raise BadSpec(f"Clifford hypersurfaces need n >= 2, got {self.dim_n}")
        if not 1 <= self.k <= self.dim_n - 1:
            raise BadSpec(f"k must lie in [1, n-1], got {self.k}")
        if not 0 < self.r < 1:
            raise BadSpec(f"r must lie in (0, 1), got {self.r}")


def clifford_closed_forms(spec: CliffordSpec) -> dict:
    n, k, r = spec.dim_n, spec.k, spec.r
    s = math.sqrt(1 - r * r)
    kappas = [-s / r] * k + [r / s] * (n - k)
    return {
        "kappas": sorted(kappas),
        "mean_h": (n * r * r - k) / (n * r * s),
        "norm_a_sq": k / (r * r) + (n - k) / (1 - r * r) - n,
        # proportionality constants lambda in ell_w = lambda f_w
        "lambda_first": r / s,
        "lambda_second": -s / r,
    }


def make_clifford(spec: CliffordSpec) -> Hypersurface:
    spec.validate()
    n, k, r = spec.dim_n, spec.k, float(spec.r)
    s = math.sqrt(1 - r * r)
    lo1, hi1, per1 = sphere_box(k)
    lo2, hi2, per2 = sphere_box(n - k)
    lows = np.concatenate([lo1, lo2])
    highs = np.concatenate([hi1, hi2])
    periodic = tuple(per1 + per2)

    def parts(t):
        return sphere_jet(t[:k]), sphere_jet(t[k:])

    def value(t):
        (a, _, _), (b, _, _) = parts(t)
        return np.concatenate([r * a, s * b])

    def d1(t):
        (_, a1, _), (_, b1, _) = parts(t)
        out = np.zeros((n, n + 2))
        out[:k, : k + 1] = r * a1
        out[k:, k + 1 :] = s * b1
        return out

    def d2(t):
        (_, _, a2), (_, _, b2) = parts(t)
        out = np.zeros((n, n, n + 2))
        out[:k, :k, : k + 1] = r * a2
        out[k:, k:, k + 1 :] = s * b2
        return out

    def normal(t):
        (a, _, _), (b, _, _) = parts(t)
        return np.concatenate([s * a, -r * b])

    def normal_d1(t):
        (_, a1, _), (_, b1, _) = parts(t)
        out = np.zeros((n, n + 2))
        out[:k, : k + 1] = s * a1
        out[k:, k + 1 :] = -r * b1
        return out

    chart = Chart(lows, highs, periodic, value, d1, d2, normal, normal_d1)
    return Hypersurface(
        dim_n=n,
        charts=(chart,),
        name=f"clifford(n={n},k={k},r={r:g})",
        meta={"family": "clifford", "spec": spec, **clifford_closed_forms(spec)},
    )


# ---------------------------------------------------------- counter-example

CURVATURE_BOUNDS = (1.0, 2.0)
CURVATURE_MARGIN = 0.01


@dataclass(frozen=True)
class BaseSurfaceSpec:
    """Small sphere of colatitude ``rho0`` about e_1 in S^n, with its
    colatitude modulated by ``eps * cos(m * theta_1)``."""

    rho0: float = math.acos(0.8)
    eps: float = 0.02
    m: int = 2
    dim_n: int = 2  # ambient sphere S^n; N has dimension n - 1
    curvature_bounds: tuple = CURVATURE_BOUNDS

    def validate(self) -> None:
        if self.dim_n not in (2, 3):
            raise BadSpec("base surface supports n = 2 or 3")
        if self.eps < 0:
            raise BadSpec("eps must be >= 0")
        if not 0 < self.rho0 < math.pi:
            raise BadSpec("rho0 must lie in (0, pi)")


def _base_chart_fns(spec: BaseSurfaceSpec):
    rho0, eps, m = spec.rho0, spec.eps, spec.m

    def rho(t):
        return (
            rho0 + eps * math.cos(m * t[0]),
            -eps * m * math.sin(m * t[0]),
            -eps * m * m * math.cos(m * t[0]),
        )

    def jet(t):
        """value, d1 and d2 of the modulated sphere from one angle evaluation."""
        r, rp, rpp = rho(t)
        sig, sig1, sig2 = sphere_jet(t)
        dim = len(t)
        sr, cr = math.sin(r), math.cos(r)
        grad = np.zeros(dim)
        grad[0] = rp
        x = np.concatenate([[cr], sr * sig])
        d1 = np.empty((dim, dim + 2))
        d1[:, 0] = -sr * grad
        d1[:, 1:] = cr * np.outer(grad, sig) + sr * sig1
        hess = np.zeros((dim, dim))
        hess[0, 0] = rpp
        gg = np.outer(grad, grad)
        d2 = np.empty((dim, dim, dim + 2))
        d2[:, :, 0] = -cr * gg - sr * hess
        cross = grad[:, None, None] * sig1[None, :, :]
        d2[:, :, 1:] = (
            (-sr * gg + cr * hess)[:, :, None] * sig
            + cr * (cross + np.swapaxes(cross, 0, 1))
            + sr * sig2
        )
        return x, d1, d2

    def value(t):
        r, _, _ = rho(t)
        return np.concatenate([[math.cos(r)], math.sin(r) * sphere_jet(t)[0]])

    def d1(t):
        return jet(t)[1]

    def d2(t):
        return jet(t)[2]

    return value, d1, d2, jet


def make_base_surface(spec: BaseSurfaceSpec, grid: int = 360) -> Hypersurface:
    """The hypersurface N of S^n (dimension n-1, ambient R^{n+1}).

    Raises CurvatureOutOfBounds unless every sampled principal curvature
    lies in ``(lo + 0.01, hi - 0.01)`` for ``curvature_bounds = (lo, hi)``.
    """
    spec.validate()
    dim = spec.dim_n - 1
    value, d1, d2, jet = _base_chart_fns(spec)
    lows, highs, periodic = sphere_box(dim)

    # orientation: normal leaning towards e_1, the centre of the small sphere
    centre = np.array([0.5 * (lo + hi) if not per else 0.3 for lo, hi, per in zip(lows, highs, periodic)])
    nu0, _ = cofactor_normal(value(centre), d1(centre))
    orientation = 1 if nu0[0] > 0 else -1

    def normal(t):
        return orientation * cofactor_normal(value(t), d1(t))[0]

    def normal_d1(t):
        return orientation * cofactor_normal(value(t), d1(t), d2(t))[1]

    def frame(t):
        """(x, dx, nu, dnu) from one evaluation of the jet."""
        x, dx, ddx = jet(t)
        nu, dnu = cofactor_normal(x, dx, ddx)
        return x, dx, orientation * nu, orientation * dnu

    chart = Chart(lows, highs, tuple(periodic), value, d1, d2, normal, normal_d1)
    surface = Hypersurface(
        dim_n=dim, charts=(chart,), orientation=orientation, name="base-N", meta={"family": "base", "spec": spec, "frame": frame}
    )

    kappas = []
    for prm in _base_grid(dim, grid):
        kappas.append(shape_operator(surface, ChartPoint(prm)).kappas)
    kappas = np.array(kappas)
    means = kappas.mean(axis=1)
    lo, hi = spec.curvature_bounds
    kmin, kmax = float(kappas.min()), float(kappas.max())
    surface.meta.update(
        kappa_min=kmin, kappa_max=kmax, mean_spread=float(means.max() - means.min()), samples=len(kappas)
    )
    if not (lo + CURVATURE_MARGIN < kmin and kmax < hi - CURVATURE_MARGIN):
        raise CurvatureOutOfBounds(
            f"principal curvatures span [{kmin:.6f}, {kmax:.6f}], need ({lo}, {hi}) with margin {CURVATURE_MARGIN}"
        )
    return surface


def _base_grid(dim: int, grid: int):
    if dim == 1:
        return [np.array([t]) for t in np.linspace(-math.pi, math.pi, grid, endpoint=False)]
    side = max(8, int(round(math.sqrt(grid))) * 2)
    polar = np.linspace(1e-2, math.pi - 1e-2, side)
    azim = np.linspace(-math.pi, math.pi, side, endpoint=False)
    return [np.array([a, b]) for a in polar for b in azim]


@dataclass(frozen=True)
class CounterexampleSpec:
    base: BaseSurfaceSpec = field(default_factory=BaseSurfaceSpec)


def immersion_factor(lam: float, s: float) -> float:
    """(1 - lam) cos(sqrt2 s) + 1 + lam, the stretch of the N-directions."""
    return (1 - lam) * math.cos(SQRT2 * s) + 1 + lam


def make_counterexample(spec: CounterexampleSpec, s_samples: int = 64) -> Hypersurface:
    """Immersion of S^1 x N into S^{n+1} with ell_v = f_v for v = e_1.

    phi(s, x)  = (sin(sqrt2 s)/sqrt2, (x + nu)/2 cos(sqrt2 s) + (x - nu)/2)
    nu~(s, x)  = (sin(sqrt2 s)/sqrt2, (x + nu)/2 cos(sqrt2 s) - (x - nu)/2)

    The s-parameter has period sqrt2 * pi, the period of the formulas.
    """
    base = make_base_surface(spec.base)
    bchart = base.charts[0]
    dim = base.dim_n + 1
    half = math.pi / SQRT2

    def value(t):
        s, th = t[0], t[1:]
        x, nu = bchart.value(th), bchart.normal(th)
        cs = math.cos(SQRT2 * s)
        return np.concatenate([[math.sin(SQRT2 * s) / SQRT2], 0.5 * (x + nu) * cs + 0.5 * (x - nu)])

    def normal(t):
        s, th = t[0], t[1:]
        x, nu = bchart.value(th), bchart.normal(th)
        cs = math.cos(SQRT2 * s)
        return np.concatenate([[math.sin(SQRT2 * s) / SQRT2], 0.5 * (x + nu) * cs - 0.5 * (x - nu)])

    base_frame = base.meta["frame"]

    def derivative(t, sign):
        # sign +1: d phi, sign -1: d nu~; only the constant (x - nu)/2 term flips
        s, th = t[0], t[1:]
        x, dx, nu, dnu = base_frame(th)
        cs, sn = math.cos(SQRT2 * s), math.sin(SQRT2 * s)
        out = np.zeros((dim, dim + 2))
        out[0, 0] = cs
        out[0, 1:] = -(SQRT2 / 2) * (x + nu) * sn
        out[1:, 1:] = 0.5 * (dx + dnu) * cs + sign * 0.5 * (dx - dnu)
        return out

    def d1(t):
        return derivative(t, 1)

    def normal_d1(t):
        return derivative(t, -1)

    lows = np.concatenate([[-half], bchart.lows])
    highs = np.concatenate([[half], bchart.highs])
    periodic = (True,) + tuple(bchart.periodic)
    chart = Chart(lows, highs, periodic, value, d1, None, normal, normal_d1)

    svals = np.linspace(-half, half, s_samples, endpoint=False)
    factors = [
        abs(immersion_factor(lam, s))
        for prm in _base_grid(base.dim_n, 90)
        for lam in shape_operator(base, ChartPoint(prm)).kappas
        for s in svals
    ]
    min_factor = float(min(factors))
    if min_factor < TAU_RANK:
        raise DegenerateImmersion(f"immersion factor reaches {min_factor:.3e}")
    return Hypersurface(
        dim_n=dim,
        charts=(chart,),
        name="counterexample",
        meta={"family": "counterexample", "spec": spec, "base": base, "min_immersion_factor": min_factor},
    )


def make_family(family: str, **kw) -> Hypersurface:
    """Build a family from flat keyword options (used by the CLI)."""
    if family == "clifford":
        return make_clifford(CliffordSpec(int(kw.get("n", 2)), int(kw.get("k", 1)), float(kw.get("r", 0.6))))
    if family == "umbilical":
        n = int(kw.get("n", 2))
        axis = kw.get("axis")
        if axis is None:
            axis = np.eye(n + 2)[0]
        return make_umbilical(UmbilicalSpec(np.asarray(axis, dtype=float), float(kw.get("c", 0.5)), n))
    if family == "counterexample":
        base = BaseSurfaceSpec(
            rho0=float(kw.get("rho0", math.acos(0.8))),
            eps=float(kw.get("eps", 0.02)),
            m=int(kw.get("m_freq", 2)),
            dim_n=int(kw.get("n", 2)),
        )
        return make_counterexample(CounterexampleSpec(base))
    raise BadSpec(f"unknown family {family!r}")
