"""Exact rational arithmetic for deleted-product polynomials.

Given linear factors p_i(X) = b_i X + c_i with pairwise distinct roots, the
products q_i = prod_{j != i} p_j are linearly independent, and the identity

    sum_i a_i / p_i(X) = d      (equivalently  sum_i a_i q_i - d R = 0,
                                 R = prod_j p_j)

holds identically only when every a_i and d vanish.  Everything here uses
``fractions.Fraction`` so verdicts carry no tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

from .errors import BadSpec, DuplicateRoot

RATIONALIZE_DENOMINATOR = 10**6

Number = Union[int, Fraction, float, str]


def to_fraction(value: Number, max_denominator: int | None = None) -> Fraction:
    """Exact for ints, Fractions and decimal strings; floats are converted
    exactly unless ``max_denominator`` asks for a continued-fraction
    approximation."""
    if isinstance(value, float):
        frac = Fraction(value)
        return frac.limit_denominator(max_denominator) if max_denominator else frac
    if isinstance(value, (Rational, str)):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def rationalize(value: float, max_denominator: int = RATIONALIZE_DENOMINATOR) -> Fraction:
    return to_fraction(float(value), max_denominator)


@dataclass(frozen=True)
class RationalLinear:
    """The polynomial b X + c with b != 0."""

    b: Fraction
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "b", to_fraction(self.b))
        object.__setattr__(self, "c", to_fraction(self.c))
        if self.b == 0:
            raise BadSpec("linear factor needs a nonzero leading coefficient")

    @property
    def root(self) -> Fraction:
        return -self.c / self.b

    def as_poly(self) -> "RationalPoly":
        return RationalPoly((self.c, self.b))


@dataclass(frozen=True)
class RationalPoly:
    """Polynomial with exact rational coefficients in ascending degree.

    Trailing zeros are stripped, so the zero polynomial has no coefficients.
    """

    coeffs: tuple

    def __post_init__(self):
        cs = [to_fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def one(cls) -> "RationalPoly":
        return cls((Fraction(1),))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        size = max(len(self.coeffs), len(other.coeffs))
        return RationalPoly(tuple(self.coeff(k) + other.coeff(k) for k in range(size)))

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __mul__(self, other) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            s = to_fraction(other)
            return RationalPoly(tuple(s * c for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return RationalPoly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(tuple(out))

    __rmul__ = __mul__

    def __call__(self, x) -> Fraction:
        x = to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def _deleted_products(ps: Sequence[RationalLinear]) -> list[RationalPoly]:
    polys = [p.as_poly() for p in ps]
    out = []
    for i in range(len(polys)):
        q = RationalPoly.one()
        for j, p in enumerate(polys):
            if j != i:
                q = q * p
        out.append(q)
    return out


def _check_distinct_roots(ps: Sequence[RationalLinear]) -> None:
    seen = {}
    for i, p in enumerate(ps):
        if p.root in seen:
            raise DuplicateRoot(f"factors {seen[p.root]} and {i} share the root {p.root}")
        seen[p.root] = i


def build_q(ps: Sequence[RationalLinear]) -> list[RationalPoly]:
    """q_i = prod_{j != i} p_j for k >= 2 factors with distinct roots."""
    if len(ps) < 2:
        raise BadSpec("need at least two linear factors")
    _check_distinct_roots(ps)
    return _deleted_products(ps)


def exact_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank by fraction-exact Gaussian elimination."""
    m = [[to_fraction(x) for x in row] for row in rows]
    if not m:
        return 0
    rank, ncols = 0, len(m[0])
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(rank + 1, len(m)):
            factor = m[r][col] / m[rank][col]
            if factor:
                m[r] = [x - factor * y for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


@dataclass(frozen=True)
class IndependenceCertificate:
    rank: int
    size: int
    independent: bool
    # evaluation[i][j] = q_j(root of p_i); diagonal-nonzero with zero
    # off-diagonal when the q's come from distinct-root factors
    evaluation: tuple | None = None
    evaluation_diagonal: bool | None = None


def independence_verdict(qs: Sequence[RationalPoly], ps: Sequence[RationalLinear] | None = None) -> IndependenceCertificate:
    """Exact rank of the coefficient matrix of ``qs``.

    With the generating factors ``ps`` the certificate also records the
    evaluation matrix at their roots, whose diagonal structure proves
    independence directly.
    """
    k = len(qs)
    width = max((q.degree + 1 for q in qs), default=0)
    rows = [[q.coeff(d) for d in range(width)] for q in qs]
    rank = exact_rank(rows) if width else 0
    evaluation = diagonal = None
    if ps is not None:
        evaluation = tuple(tuple(q(p.root) for q in qs) for p in ps)
        diagonal = all((evaluation[i][j] != 0) == (i == j) for i in range(len(ps)) for j in range(k))
    return IndependenceCertificate(rank, k, rank == k, evaluation, diagonal)


@dataclass(frozen=True)
class IdentityHolds:
    """sum a_i q_i - d R vanishes identically."""

    polynomial: RationalPoly


@dataclass(frozen=True)
class OnlyZeroSolution:
    """The identity fails; ``witness_degree`` names a nonzero coefficient."""

    polynomial: RationalPoly
    witness_degree: int
    witness_coefficient: Fraction


Verdict = Union[IdentityHolds, OnlyZeroSolution]


def partial_fraction_verdict(ps: Sequence[RationalLinear], a: Sequence[Number], d: Number) -> Verdict:
    """Decide whether sum_i a_i / p_i(X) = d holds as rational functions.

    The witness is the highest-degree nonzero coefficient of
    sum_i a_i q_i - d R. A single factor is accepted (q_1 = 1).
    """
    if len(ps) != len(a):
        raise BadSpec("need one coefficient per linear factor")
    if not ps:
        poly = RationalPoly((-to_fraction(d),))
    else:
        _check_distinct_roots(ps)
        qs = _deleted_products(ps)
        big_r = qs[0] * ps[0].as_poly()
        poly = RationalPoly(())
        for ai, qi in zip(a, qs):
            poly = poly + qi * to_fraction(ai)
        poly = poly - big_r * to_fraction(d)
    if poly.is_zero():
        # distinct roots force every coefficient to vanish
        assert all(to_fraction(x) == 0 for x in a) and to_fraction(d) == 0
        return IdentityHolds(poly)
    return OnlyZeroSolution(poly, poly.degree, poly.coeffs[-1])
