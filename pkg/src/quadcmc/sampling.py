"""Reproducible sample points and tensor quadrature on charts.

Random points come from a 64-bit linear congruential generator with Knuth's
MMIX constants so that any implementation can regenerate the same points:

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64
    u      = (state >> 11) * 2**-53          # uniform in [0, 1)

The initial state is the seed reduced mod 2**64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamples
from .geometry import ChartPoint, Hypersurface, immersion_jet

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK = (1 << 64) - 1

# polar angles of hyperspherical charts degenerate at the chart boundary;
# stencils of size 1e-3 need clearance well beyond that
SAMPLE_MARGIN = 0.05


class Lcg64:
    def __init__(self, seed: int = 0):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) & _MASK
        return self.state

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return low + (high - low) * u

    def uniforms(self, count: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        return np.array([self.uniform(low, high) for _ in range(count)])

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in [low, high]."""
        return low + int(self.uniform() * (high - low + 1))


def sample_points(
    surface: Hypersurface,
    count: int,
    seed: int = 0,
    margin: float = SAMPLE_MARGIN,
    chart: int = 0,
) -> list[ChartPoint]:
    """``count`` reproducible random chart points, kept ``margin`` away from
    the boundary of every non-periodic parameter."""
    c = surface.charts[chart]
    rng = Lcg64(seed)
    points = []
    for _ in range(count):
        params = np.empty(c.dim)
        for i in range(c.dim):
            lo, hi = float(c.lows[i]), float(c.highs[i])
            if not c.periodic[i]:
                lo, hi = lo + margin, hi - margin
            params[i] = rng.uniform(lo, hi)
        points.append(ChartPoint(params, chart))
    return points


@dataclass(frozen=True)
class Quadrature:
    points: list
    weights: np.ndarray  # includes the area element sqrt(det g)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    @property
    def area(self) -> float:
        return float(np.sum(self.weights))


def quadrature(surface: Hypersurface, nodes_per_axis=24, chart: int = 0) -> Quadrature:
    """Tensor-product rule over a chart: trapezoidal on periodic parameters,
    Gauss-Legendre on the others, weighted by the Riemannian area element."""
    c = surface.charts[chart]
    if np.isscalar(nodes_per_axis):
        nodes_per_axis = [int(nodes_per_axis)] * c.dim
    axes, axis_weights = [], []
    for i in range(c.dim):
        lo, hi = float(c.lows[i]), float(c.highs[i])
        m = nodes_per_axis[i]
        if c.periodic[i]:
            axes.append(lo + (hi - lo) * np.arange(m) / m)
            axis_weights.append(np.full(m, (hi - lo) / m))
        else:
            t, w = np.polynomial.legendre.leggauss(m)
            axes.append(0.5 * (hi - lo) * t + 0.5 * (hi + lo))
            axis_weights.append(0.5 * (hi - lo) * w)
    grids = np.meshgrid(*axes, indexing="ij")
    wgrids = np.meshgrid(*axis_weights, indexing="ij")
    params = np.stack([g.ravel() for g in grids], axis=1)
    base_w = np.prod(np.stack([w.ravel() for w in wgrids], axis=1), axis=1)
    points, weights = [], []
    for prm, w in zip(params, base_w):
        pt = ChartPoint(prm, chart)
        jet = immersion_jet(surface, pt, order=1)
        points.append(pt)
        weights.append(w * np.sqrt(np.linalg.det(jet.metric)))
    return Quadrature(points=points, weights=np.array(weights))


def require_samples(count: int, minimum: int, what: str = "samples") -> None:
    if count < minimum:
        raise InsufficientSamples(f"need at least {minimum} {what}, got {count}")
