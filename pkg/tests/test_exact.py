from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from quadcmc.errors import BadSpec, DuplicateRoot
from quadcmc.exact import (
    IdentityHolds,
    OnlyZeroSolution,
    RationalLinear,
    RationalPoly,
    build_q,
    exact_rank,
    independence_verdict,
    partial_fraction_verdict,
    rationalize,
    to_fraction,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=15)
nonzero = fractions.filter(lambda x: x != 0)
factors = st.lists(st.tuples(nonzero, fractions), min_size=2, max_size=6)


def _linear(pairs):
    ps = [RationalLinear(b, c) for b, c in pairs]
    assume(len({p.root for p in ps}) == len(ps))
    return ps


def test_polynomial_arithmetic():
    p = RationalPoly((1, 2))  # 1 + 2X
    q = RationalPoly((-1, 0, 1))  # X^2 - 1
    assert (p * q).coeffs == (-1, -2, 1, 2)
    assert (p - p).is_zero() and (p - p).degree == -1
    assert q(Fraction(3)) == 8
    assert RationalPoly((0, 1, 0, 0)).degree == 1


def test_to_fraction_is_exact_for_strings_and_floats():
    assert to_fraction("0.1") == Fraction(1, 10)
    assert to_fraction(0.1) != Fraction(1, 10)
    assert rationalize(0.1) == Fraction(1, 10)
    with pytest.raises(TypeError):
        to_fraction(1j)


def test_known_deleted_products():
    ps = [RationalLinear(1, 1), RationalLinear(2, 1)]
    qs = build_q(ps)
    assert qs[0].coeffs == (1, 2) and qs[1].coeffs == (1, 1)
    three = build_q([RationalLinear(1, c) for c in (1, 2, 3)])
    assert three[0].coeffs == (6, 5, 1)
    assert three[0](-1) == 2


def test_build_q_rejects_bad_input():
    with pytest.raises(BadSpec):
        build_q([RationalLinear(1, 0)])
    with pytest.raises(DuplicateRoot):
        build_q([RationalLinear(1, 1), RationalLinear(2, 2)])
    with pytest.raises(BadSpec):
        RationalLinear(0, 1)


@given(factors)
def test_deleted_products_are_independent(pairs):
    ps = _linear(pairs)
    cert = independence_verdict(build_q(ps), ps)
    assert cert.independent and cert.rank == len(ps)
    assert cert.evaluation_diagonal


@given(factors, st.data())
def test_only_trivial_identity(pairs, data):
    ps = _linear(pairs)
    a = data.draw(st.lists(fractions, min_size=len(ps), max_size=len(ps)))
    d = data.draw(fractions)
    verdict = partial_fraction_verdict(ps, a, d)
    if any(a) or d:
        assert isinstance(verdict, OnlyZeroSolution)
        assert verdict.witness_coefficient != 0
        assert verdict.polynomial.coeff(verdict.witness_degree) == verdict.witness_coefficient
    else:
        assert isinstance(verdict, IdentityHolds)


def test_single_factor_and_empty_cases():
    assert isinstance(partial_fraction_verdict([], [], 0), IdentityHolds)
    v = partial_fraction_verdict([], [], Fraction(1, 3))
    assert isinstance(v, OnlyZeroSolution) and v.witness_coefficient == Fraction(-1, 3)
    v = partial_fraction_verdict([RationalLinear(1, 0)], [1], 0)
    assert isinstance(v, OnlyZeroSolution) and v.witness_degree == 0


def test_witness_for_cancelling_coefficients():
    ps = [RationalLinear(1, 1), RationalLinear(2, 1)]
    v = partial_fraction_verdict(ps, [1, -1], 0)
    assert isinstance(v, OnlyZeroSolution)
    assert v.witness_degree == 1 and v.witness_coefficient == 1


def test_exact_rank_detects_dependence():
    assert exact_rank([[1, 2], [2, 4]]) == 1
    assert exact_rank([[Fraction(1, 3), 1], [1, 3], [0, 1]]) == 2
    assert exact_rank([]) == 0
