"""Laplace spectra of Clifford products and stability-index counts.

Eigenvalues follow the convention ``Delta u + mu u = 0`` (so ``mu >= 0``).
The Jacobi operator is ``J = Delta + |A|^2 + n``; a Laplace line ``mu``
contributes ``jac = mu - (|A|^2 + n)`` to ``J``, negative meaning unstable.
On a Clifford product with constant ``|A|^2`` the weak index is the number
of nonconstant Laplace eigenfunctions with ``mu < |A|^2 + n``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import BadGrid, BadSpec, MinimalCase, NotCMC, NotConstantA, TruncationWarning
from .families import CliffordSpec, clifford_closed_forms
from .geometry import Hypersurface, PointLike, shape_operator
from .sampling import Lcg64, Quadrature, quadrature
from .support import (
    TAU_H,
    basis_values,
    combo_fn,
    ell_fn,
    f_fn,
    gram_matrix,
    laplace_beltrami,
    numerical_rank,
)

TAU_TIE = 1e-9
TRUNCATION_MARGIN = 10.0
DEGENERATE_L2 = 1e-10
TAU_CONST_A = 1e-6


@dataclass(frozen=True)
class SpectralLine:
    eigenvalue: float
    multiplicity: int
    label: tuple


def sphere_multiplicity(m: int, j: int) -> int:
    """Dimension of degree-j spherical harmonics on S^m."""
    lower = comb(m + j - 2, j - 2) if j >= 2 else 0
    return comb(m + j, j) - lower


def sphere_spectrum(m: int, radius: float = 1.0, j_max: int = 10) -> list[SpectralLine]:
    """Lines j (j + m - 1) / radius^2 of the round sphere S^m(radius)."""
    if m < 1 or not radius > 0 or j_max < 0:
        raise BadSpec("need m >= 1, radius > 0 and j_max >= 0")
    return [
        SpectralLine(j * (j + m - 1) / radius**2, sphere_multiplicity(m, j), (j,))
        for j in range(j_max + 1)
    ]


def clifford_threshold(spec: CliffordSpec) -> float:
    forms = clifford_closed_forms(spec)
    return forms["norm_a_sq"] + spec.dim_n


def default_j_max(spec: CliffordSpec, margin: float = TRUNCATION_MARGIN) -> int:
    """Smallest j_max whose first excluded line exceeds threshold + margin."""
    spec.validate()
    r2 = spec.r**2
    thr = clifford_threshold(spec)
    k, rest = spec.k, spec.dim_n - spec.k
    j = 0
    while min((j + 1) * (j + k) / r2, (j + 1) * (j + rest) / (1 - r2)) <= thr + margin:
        j += 1
    return j


def clifford_spectrum(spec: CliffordSpec, j_max: Optional[int] = None) -> list[SpectralLine]:
    """Product lines mu_p / r^2 + mu_q / (1 - r^2) labelled (p, q), ascending.

    Warns with TruncationWarning when a line outside the truncation could
    still fall below threshold + margin.
    """
    spec.validate()
    if j_max is None:
        j_max = default_j_max(spec)
    r2 = spec.r**2
    first = sphere_spectrum(spec.k, 1.0, j_max + 1)
    second = sphere_spectrum(spec.dim_n - spec.k, 1.0, j_max + 1)
    excluded = min(first[-1].eigenvalue / r2, second[-1].eigenvalue / (1 - r2))
    thr = clifford_threshold(spec)
    if excluded <= thr + TRUNCATION_MARGIN:
        warnings.warn(
            f"j_max = {j_max} leaves a line at {excluded:.4f} below threshold + {TRUNCATION_MARGIN:g}",
            TruncationWarning,
            stacklevel=2,
        )
    lines = [
        SpectralLine(a.eigenvalue / r2 + b.eigenvalue / (1 - r2), a.multiplicity * b.multiplicity, (p, q))
        for p, a in enumerate(first[:-1])
        for q, b in enumerate(second[:-1])
    ]
    return sorted(lines, key=lambda ln: (ln.eigenvalue, ln.label))


def merge_lines(lines: Sequence[SpectralLine], tol: float = TAU_TIE) -> list[tuple[float, int]]:
    """Collapse lines with equal eigenvalue into (eigenvalue, total multiplicity)."""
    out: list[list] = []
    for ln in sorted(lines, key=lambda x: x.eigenvalue):
        if out and abs(ln.eigenvalue - out[-1][0]) <= tol:
            out[-1][1] += ln.multiplicity
        else:
            out.append([ln.eigenvalue, ln.multiplicity])
    return [(float(e), int(m)) for e, m in out]


def find_line(lines: Sequence[SpectralLine], mu: float, tol: float = TAU_TIE) -> Optional[SpectralLine]:
    best = min(lines, key=lambda ln: abs(ln.eigenvalue - mu), default=None)
    if best is None or abs(best.eigenvalue - mu) > tol:
        return None
    return best


def classify(mu: float, threshold: float, tol: float = TAU_TIE) -> str:
    if abs(mu - threshold) <= tol:
        return "kernel"
    return "neg" if mu < threshold else "pos"


@dataclass(frozen=True)
class IndexReport:
    weak_index: int
    strong_index: int
    kernel_lines: tuple
    threshold: float
    lines: tuple = field(repr=False)


def index_counts(spec: CliffordSpec, j_max: Optional[int] = None) -> IndexReport:
    """Weak and strong Jacobi indices of M_k(r) from its product spectrum.

    Lines within TAU_TIE of the threshold are Jacobi fields: listed, not
    counted. The strong index adds the constant line.
    """
    lines = clifford_spectrum(spec, j_max)
    thr = clifford_threshold(spec)
    weak, kernel = 0, []
    for ln in lines:
        cls = classify(ln.eigenvalue, thr)
        if cls == "kernel":
            kernel.append(ln)
        elif cls == "neg" and ln.label != (0, 0):
            weak += ln.multiplicity
    return IndexReport(weak, weak + 1, tuple(kernel), thr, tuple(lines))


def spectrum_rows(lines: Sequence[SpectralLine], threshold: float) -> list[dict]:
    """Table rows (p, q, mu, mult, jac, class)."""
    return [
        {
            "p": ln.label[0],
            "q": ln.label[1] if len(ln.label) > 1 else 0,
            "mu": ln.eigenvalue,
            "mult": ln.multiplicity,
            "jac": ln.eigenvalue - threshold,
            "class": classify(ln.eigenvalue, threshold),
        }
        for ln in lines
    ]


# --------------------------------------------------------- test functions


@dataclass(frozen=True)
class IndexTestConstants:
    alpha_plus: float
    alpha_minus: float
    mu_plus: float
    mu_minus: float
    jac_plus: float
    jac_minus: float
    disc_d: float


def index_test_constants(mean_h: float, norm_a_sq: float, n: int) -> IndexTestConstants:
    """Constants of the test functions u = ell_v - alpha f_v with
    Delta u + mu u = 0, for constant H != 0 and constant |A|^2."""
    if mean_h == 0:
        raise MinimalCase("H = 0: use the ell_v and f_v families directly")
    disc = (norm_a_sq - n) ** 2 + 4 * n * n * mean_h**2
    root = math.sqrt(disc)
    thr = norm_a_sq + n
    mu_plus = (n + norm_a_sq + root) / 2
    mu_minus = (n + norm_a_sq - root) / 2
    return IndexTestConstants(
        alpha_plus=(norm_a_sq - n + root) / (2 * n * mean_h),
        alpha_minus=(norm_a_sq - n - root) / (2 * n * mean_h),
        mu_plus=mu_plus,
        mu_minus=mu_minus,
        jac_plus=mu_plus - thr,
        jac_minus=mu_minus - thr,
        disc_d=disc,
    )


@dataclass(frozen=True)
class TestFunctionResidual:
    label: str  # "u+", "u-", or "J ell", "J f" in the minimal case
    residual: float
    integral: float
    l2_norm: float
    degenerate: bool


def _curvature_spreads(surface: Hypersurface, points: Sequence[PointLike]) -> tuple[float, float, float, float]:
    hs, norms = [], []
    for q in points:
        c = shape_operator(surface, q)
        hs.append(c.mean_h)
        norms.append(c.norm_a_sq)
    return float(np.ptp(hs)), float(np.ptp(norms)), float(np.mean(hs)), float(np.mean(norms))


def _l2_stats(quad: Quadrature, fn) -> tuple[float, float]:
    vals = np.array([fn(p.params) for p in quad.points])
    return quad.integrate(vals), math.sqrt(max(quad.integrate(vals * vals), 0.0))


def verify_test_functions(
    surface: Hypersurface,
    v,
    constants: Optional[IndexTestConstants],
    points: Sequence[PointLike],
    quad: Optional[Quadrature] = None,
) -> list[TestFunctionResidual]:
    """Eigen-equation residuals of the test functions at ``points``.

    With constants: |Delta u + mu u| for u = ell_v - alpha f_v.
    Without (H = 0): |J ell_v - |A|^2 ell_v| and |J f_v - n f_v|.
    Integrals and L^2 norms come from ``quad``; members with L^2 norm
    below DEGENERATE_L2 are flagged degenerate.
    """
    v = np.asarray(v, dtype=float)
    h_spread, a_spread, mean_h, norm_a = _curvature_spreads(surface, points)
    if h_spread >= TAU_H:
        raise NotCMC(f"mean curvature varies by {h_spread:.3e}")
    if a_spread >= TAU_CONST_A:
        raise NotConstantA(f"|A|^2 varies by {a_spread:.3e}")
    n = surface.dim_n
    quad = quadrature(surface, 24) if quad is None else quad
    thr = norm_a + n
    out = []
    if constants is not None:
        cases = [("u+", constants.alpha_plus, constants.mu_plus), ("u-", constants.alpha_minus, constants.mu_minus)]
        for label, alpha, mu in cases:
            fn = combo_fn(surface, v, alpha)
            res = max(abs(laplace_beltrami(surface, q, fn) + mu * fn(q.params)) for q in points)
            integral, l2 = _l2_stats(quad, fn)
            out.append(TestFunctionResidual(label, float(res), integral, l2, l2 < DEGENERATE_L2))
    else:
        for label, fn, target in (("J ell", ell_fn(surface, v), norm_a), ("J f", f_fn(surface, v), n)):
            res = max(abs(laplace_beltrami(surface, q, fn) + thr * fn(q.params) - target * fn(q.params)) for q in points)
            integral, l2 = _l2_stats(quad, fn)
            out.append(TestFunctionResidual(label, float(res), integral, l2, l2 < DEGENERATE_L2))
    return out


@dataclass(frozen=True)
class DimensionReport:
    families: tuple  # ("U+", "U-") or ("V1", "V2")
    ranks: tuple
    degenerate: tuple  # per family, indices i with a zero member for e_i
    cross_gram: float
    lower_bound: int
    joint_rank: int


def dimension_bound_report(surface: Hypersurface, quad: Optional[Quadrature] = None) -> DimensionReport:
    """Gram ranks of the two test-function families and their L^2 overlap.

    For H != 0 the families are U+- = {ell_{e_i} - alpha_+- f_{e_i}}; for
    H = 0 they are V1 = {ell_{e_i}} and V2 = {f_{e_i}}.
    """
    quad = quadrature(surface, 24) if quad is None else quad
    probe = quad.points[:: max(1, len(quad.points) // 16)]
    h_spread, a_spread, mean_h, norm_a = _curvature_spreads(surface, probe)
    if h_spread >= TAU_H:
        raise NotCMC(f"mean curvature varies by {h_spread:.3e}")
    if a_spread >= TAU_CONST_A:
        raise NotConstantA(f"|A|^2 varies by {a_spread:.3e}")
    ell = basis_values(surface, quad.points, "V1")
    f = basis_values(surface, quad.points, "V2")
    if abs(mean_h) < TAU_H:
        names, blocks = ("V1", "V2"), [ell, f]
    else:
        c = index_test_constants(mean_h, norm_a, surface.dim_n)
        names, blocks = ("U+", "U-"), [ell - c.alpha_plus * f, ell - c.alpha_minus * f]
    ranks, degenerate, kept = [], [], []
    for block in blocks:
        norms = np.sqrt(np.maximum(np.einsum("ij,j,ij->i", block, quad.weights, block), 0.0))
        zero = tuple(int(i) for i in np.flatnonzero(norms < DEGENERATE_L2))
        live = block[[i for i in range(block.shape[0]) if i not in zero]]
        degenerate.append(zero)
        kept.append(live)
        ranks.append(numerical_rank(gram_matrix(live, live, quad.weights)) if live.size else 0)
    cross = float(np.linalg.norm(gram_matrix(blocks[0], blocks[1], quad.weights)))
    joint = np.vstack(kept) if any(k.size for k in kept) else np.zeros((0, len(quad.points)))
    joint_rank = numerical_rank(gram_matrix(joint, joint, quad.weights)) if joint.size else 0
    return DimensionReport(names, tuple(ranks), tuple(degenerate), cross, sum(ranks), joint_rank)


# --------------------------------------------------------------- the mesh


@dataclass(frozen=True)
class MeshLine:
    analytic: float
    multiplicity: int
    mesh: float
    rel_error: float


@dataclass(frozen=True)
class MeshComparison:
    grid: int
    lines: tuple
    fitted_c: float  # max relative error times grid^2
    constant_mode: float
    row_sum_max: float
    separated: bool  # every mesh cluster lies closer to its own line than to neighbours


def _periodic_second_difference(m: int) -> sp.csr_matrix:
    """Integer matrix of u_{i-1} - 2 u_i + u_{i+1} on a periodic grid."""
    main = -2 * np.ones(m, dtype=np.int64)
    off = np.ones(m - 1, dtype=np.int64)
    mat = sp.diags([off, main, off], [-1, 0, 1], format="lil", dtype=np.int64)
    mat[0, m - 1] = 1
    mat[m - 1, 0] = 1
    return mat.tocsr()


def mesh_laplacian_crosscheck(spec: CliffordSpec, grid: int, lines: int = 12, seed: int = 0) -> MeshComparison:
    """Eigenvalues of the five-point Laplacian of the flat torus
    r^2 dtheta^2 + (1 - r^2) dphi^2 against the first ``lines`` distinct
    analytic eigenvalues."""
    spec.validate()
    if spec.dim_n != 2:
        raise BadSpec("the mesh cross-check is for surfaces (n = 2)")
    if grid < 16:
        raise BadGrid(f"grid must be >= 16, got {grid}")
    h = 2 * math.pi / grid
    r2 = spec.r**2
    d2 = _periodic_second_difference(grid)
    eye = sp.identity(grid, dtype=np.int64, format="csr")
    k_theta = sp.kron(d2, eye, format="csr")
    k_phi = sp.kron(eye, d2, format="csr")
    ones = np.ones(grid * grid, dtype=np.int64)
    row_sum = float(np.max(np.abs(k_theta @ ones)) + np.max(np.abs(k_phi @ ones)))
    lap = -(k_theta.astype(float) / (r2 * h * h) + k_phi.astype(float) / ((1 - r2) * h * h))

    target = merge_lines(clifford_spectrum(spec, j_max=max(8, default_j_max(spec))))[:lines]
    count = sum(m for _, m in target)
    rng = Lcg64(seed)
    v0 = rng.uniforms(grid * grid, -1.0, 1.0)
    vals = eigsh(lap.tocsc(), k=count + 4, sigma=-1.0, which="LM", v0=v0, return_eigenvectors=False)
    vals = np.sort(vals)
    out, pos, separated = [], 0, True
    for i, (mu, mult) in enumerate(target):
        chunk = vals[pos : pos + mult]
        pos += mult
        mesh_mu = float(np.mean(chunk))
        rel = abs(mesh_mu - mu) / mu if mu else abs(mesh_mu)
        out.append(MeshLine(mu, mult, mesh_mu, rel))
        neighbours = [target[j][0] for j in (i - 1, i + 1) if 0 <= j < len(target)]
        for val in chunk:
            if any(abs(val - nb) < abs(val - mu) for nb in neighbours):
                separated = False
    fitted = max(ln.rel_error for ln in out if ln.analytic > 0) * grid**2
    return MeshComparison(grid, tuple(out), fitted, float(vals[0]), row_sum, separated)


def convergence_ratios(coarse: MeshComparison, fine: MeshComparison) -> list[float]:
    """Per-line error ratios under grid doubling (nonzero lines only)."""
    return [a.rel_error / b.rel_error for a, b in zip(coarse.lines, fine.lines) if a.analytic > 0]
