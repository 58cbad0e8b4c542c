#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: test_properties.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from fractions import Fraction

import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rabiqes.solvers.poly import UnivariatePolynomial, count_roots, sturm_isolate
from rabiqes.solvers.series import (
    ModelParams,
    ResidualForm,
    SeriesSolution,
    condition_polynomial,
    juddian_constraint,
    normalization_factor,
    ode_residual,
    qes_energy,
    series_continuation,
    terminating_series,
)


squares = st.fractions(min_value=0, max_value=4, max_denominator=1000)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=50)

U_SYMBOL, W_SYMBOL = sympy.symbols("u w")


def _sympy_condition_polynomial(n: int) -> sympy.Poly:
    """Runs the series recurrence with sympy symbols and normalises it."""

    u, w = U_SYMBOL, W_SYMBOL

    coeffs = [sympy.Integer(1)]
    for m in range(n - 1):
        c_prev = coeffs[m - 1] if m >= 1 else 0
        numerator = ((m - n) * (m - n + 4 * u) - w) * coeffs[m] - 4 * u * (
            m - 1 - n
        ) * c_prev
        coeffs.append(sympy.cancel(numerator / ((m + 1) * (m + 1 - n))))

    c_prev = coeffs[n - 2] if n >= 2 else 0
    constraint = sympy.Poly(
        sympy.expand((1 - 4 * u - w) * coeffs[n - 1] + 8 * u * c_prev),
        u,
        w,
    )

    leading = constraint.coeff_monomial(u**n)

    return constraint * (4**n * sympy.factorial(n) / leading)


def test_condition_polynomial_matches_sympy():
    for n in range(1, 6):
        expected = _sympy_condition_polynomial(n)
        computed = condition_polynomial(n)

        for du, dw, value in computed.terms():
            monomial = U_SYMBOL**du * W_SYMBOL**dw
            assert expected.coeff_monomial(monomial) == sympy.Rational(
                value.numerator,
                value.denominator,
            )

        assert len(expected.terms()) == len(computed.terms())


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=6), squares, squares)
def test_constraint_proportional_to_polynomial(n: int, u: Fraction, w: Fraction):
    params = ModelParams.from_squares(u, w)
    scaled = normalization_factor(n) * juddian_constraint(n, params)

    assert scaled == condition_polynomial(n).evaluate(u, w)


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=0, max_value=Fraction(1, 4), max_denominator=10**6))
def test_n1_series_terminates(u: Fraction):
    assume(0 < u < Fraction(1, 4))

    series = terminating_series(1, ModelParams.from_squares(u, 1 - 4 * u))

    assert series.energy == qes_energy(1, series.params)
    assert series_continuation(series, extra=3) == [0, 0, 0]


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=1, max_value=4),
    squares,
    squares,
    st.lists(rationals, min_size=4, max_size=4),
)
def test_residual_forms_agree(n: int, u: Fraction, w: Fraction, tail: list):
    params = ModelParams.from_squares(u, w)
    series = SeriesSolution(
        n=n,
        params=params,
        coeffs=(1, *tail[:n]),
        energy=qes_energy(n, params),
        constraint_residual=0,
    )

    xs = [Fraction(ii, 3) for ii in range(-2, 5)]

    assert ode_residual(series, xs) == ode_residual(
        series,
        xs,
        form=ResidualForm.eliminated,
    )


@settings(max_examples=80, deadline=None)
@given(
    st.sets(rationals, min_size=1, max_size=5),
    rationals,
    rationals,
)
def test_sturm_count_matches_roots(roots: set, lo: Fraction, hi: Fraction):
    assume(lo < hi)

    poly = UnivariatePolynomial.from_roots(sorted(roots))
    expected = sum(1 for root in roots if lo < root <= hi)

    assert count_roots(poly, lo, hi) == expected
    assert len(sturm_isolate(poly, lo, hi)) == expected


@settings(max_examples=40, deadline=None)
@given(st.sets(rationals, min_size=1, max_size=4))
def test_sturm_brackets_enclose_roots(roots: set):
    poly = UnivariatePolynomial.from_roots(sorted(roots))
    brackets = sturm_isolate(poly, -6, 6)

    assert len(brackets) == len(roots)
    for bracket, root in zip(brackets, sorted(roots)):
        assert bracket.lo < root <= bracket.hi
