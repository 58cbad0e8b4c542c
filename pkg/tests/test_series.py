#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: test_series.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import math
from fractions import Fraction

import numpy
import pytest
from pydantic import ValidationError

from rabiqes.solvers.poly import BivariatePolynomial, substitute_w
from rabiqes.solvers.series import (
    BargmannSingularError,
    ConditionRangeError,
    ConstraintResidualError,
    ConstraintRowError,
    DecoupledError,
    ModelParams,
    ParameterMap,
    QESIndex,
    ResidualForm,
    SeriesSolution,
    bargmann_map,
    condition_polynomial,
    inverse_bargmann_map,
    juddian_constraint,
    juddian_points,
    normalization_factor,
    ode_residual,
    parameter_map,
    qes_energy,
    series_continuation,
    series_recurrence_step,
    terminating_series,
    wavefunctions,
)
from rabiqes.validate import GOLDEN_TERMS


# A rational Juddian point for n = 1: 4u + w = 1.
EXACT_N1 = ModelParams.from_squares(Fraction(9, 64), Fraction(7, 16))
SAMPLE_XS = [Fraction(ii, 4) for ii in range(5)]


def test_model_params_squares():
    params = ModelParams(kappa=0.4, mu=0.6)

    assert params.u == pytest.approx(0.16)
    assert params.w == pytest.approx(0.36)


def test_model_params_from_squares_keeps_rationals():
    params = ModelParams.from_squares(Fraction(4, 25), Fraction(9, 25))

    assert params.u == Fraction(4, 25)
    assert params.w == Fraction(9, 25)
    assert params.kappa == pytest.approx(0.4)
    assert params.mu == pytest.approx(0.6)


def test_model_params_negative_mu():
    with pytest.raises(ValueError):
        ModelParams(kappa=0.4, mu=-0.1)

    with pytest.raises(ValueError):
        ModelParams.from_squares(-1, 1)


def test_qes_index():
    assert QESIndex(3).j == Fraction(3, 2)

    with pytest.raises(ValueError):
        QESIndex(-1)


def test_qes_energy():
    params = ModelParams(kappa=Fraction(1, 2), mu=Fraction(1, 2))

    assert qes_energy(1, params) == Fraction(3, 4)
    assert qes_energy(QESIndex(3), params) == Fraction(11, 4)


def test_recurrence_constraint_row():
    params = ModelParams(kappa=0.4, mu=0.6)

    with pytest.raises(ConstraintRowError, match="constraint row"):
        series_recurrence_step(2, params, 1, 1.0, 1.0)


def test_recurrence_first_step():
    params = ModelParams(kappa=Fraction(1, 2), mu=Fraction(1, 3))

    # c_1 = w + 8u - 4 for n = 2.
    c_1 = series_recurrence_step(2, params, 0, 1, 0)
    assert c_1 == Fraction(1, 9) + 2 - 4


def test_recurrence_decoupled():
    params = ModelParams(kappa=Fraction(1, 2), mu=0)

    assert series_recurrence_step(1, params, 1, Fraction(7), 1) == Fraction(1, 2)


def test_recurrence_termination_n1():
    params = ModelParams.from_squares(Fraction(4, 25), Fraction(9, 25))
    c_1 = 4 * params.u / params.w

    assert series_recurrence_step(1, params, 1, c_1, 1) == 0


def test_juddian_constraint_values():
    params = ModelParams(kappa=0.5, mu=0.5)

    assert juddian_constraint(1, params) == pytest.approx(-0.25)
    assert juddian_constraint(1, EXACT_N1) == 0


def test_juddian_constraint_invalid_level():
    with pytest.raises(ValueError):
        juddian_constraint(0, ModelParams(kappa=0.5, mu=0.5))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_condition_polynomial_golden(n: int):
    assert condition_polynomial(n) == BivariatePolynomial(GOLDEN_TERMS[n])


def test_condition_polynomial_leading_term():
    for n in range(1, 7):
        poly = condition_polynomial(n)
        assert poly.coeff(n, 0) == 4**n * math.factorial(n)
        assert poly.coeff(0, n) == 1
        assert poly.degree_u == n


def test_condition_polynomial_integer_coefficients():
    for _, _, value in condition_polynomial(8).terms():
        assert value.denominator == 1


def test_condition_polynomial_specialised():
    poly = substitute_w(condition_polynomial(3), Fraction(1, 4))

    assert poly.coeffs == (Fraction(-1575, 64), Fraction(751, 2), -820, 384)


@pytest.mark.parametrize("n", [0, 13])
def test_condition_polynomial_out_of_range(n: int):
    with pytest.raises(ConditionRangeError):
        condition_polynomial(n)


def test_condition_polynomial_custom_max():
    with pytest.raises(ConditionRangeError):
        condition_polynomial(4, n_max=3)


def test_normalization_factor():
    assert [normalization_factor(n) for n in (1, 2, 3)] == [-1, -1, -4]


def test_condition_polynomial_matches_constraint():
    params = ModelParams.from_squares(Fraction(2, 7), Fraction(5, 11))

    for n in range(1, 6):
        expected = normalization_factor(n) * juddian_constraint(n, params)
        assert condition_polynomial(n)(params.u, params.w) == expected


def test_terminating_series_exact():
    params = ModelParams.from_squares(Fraction(4, 25), Fraction(9, 25))
    series = terminating_series(1, params)

    assert series.coeffs == (1, Fraction(16, 9))
    assert series.energy == Fraction(21, 25)
    assert series.constraint_residual == 0
    assert series_continuation(series) == [0, 0]


def test_terminating_series_float():
    series = terminating_series(1, ModelParams(kappa=0.4, mu=0.6))

    assert series.coeffs[1] == pytest.approx(16 / 9)
    assert float(series.energy) == pytest.approx(0.84)


def test_terminating_series_decoupled():
    with pytest.raises(DecoupledError, match="decoupled case"):
        terminating_series(1, ModelParams(kappa=0.5, mu=0))


def test_terminating_series_not_juddian():
    with pytest.raises(ConstraintResidualError) as err:
        terminating_series(1, ModelParams(kappa=0.5, mu=0.5))

    assert err.value.residual == pytest.approx(-0.25)


def test_terminating_series_level_two():
    (lower, _) = juddian_points(2, "0.5")
    series = terminating_series(2, lower.params)

    assert len(series.coeffs) == 3
    assert max(abs(value) for value in series_continuation(series)) < 1e-8


def test_series_solution_validation():
    with pytest.raises(ValueError):
        SeriesSolution(
            n=1,
            params=EXACT_N1,
            coeffs=(2, 1),
            energy=0,
            constraint_residual=0,
        )

    with pytest.raises(ValueError):
        SeriesSolution(
            n=2,
            params=EXACT_N1,
            coeffs=(1, 1),
            energy=0,
            constraint_residual=0,
        )


def test_bargmann_round_trip():
    params = ModelParams(kappa=0.4, mu=0.6)
    xs = numpy.linspace(-1, 2, 7)

    numpy.testing.assert_allclose(
        inverse_bargmann_map(params, bargmann_map(params, xs)),
        xs,
        atol=1e-14,
    )
    assert bargmann_map(params, 0.5) == 0


def test_bargmann_singular():
    with pytest.raises(BargmannSingularError, match="Bargmann substitution singular"):
        inverse_bargmann_map(ModelParams(kappa=0, mu=0.6), 0.1)


def test_wavefunctions_values():
    pair = wavefunctions(terminating_series(1, ModelParams(kappa=0.4, mu=0.6)))

    assert float(pair.psi1(-0.4)) == pytest.approx(1.0)
    assert float(pair.psi2(-0.4)) == pytest.approx(5 / 3)


def test_wavefunctions_derivatives():
    pair = wavefunctions(terminating_series(1, ModelParams(kappa=0.4, mu=0.6)))

    zz = numpy.linspace(-0.7, 0.7, 5)
    step = 1e-6

    numerical = (pair.psi1(zz + step) - pair.psi1(zz - step)) / (2 * step)
    numpy.testing.assert_allclose(pair.dpsi1(zz), numerical, rtol=1e-6)

    numerical = (pair.dpsi1(zz + step) - pair.dpsi1(zz - step)) / (2 * step)
    numpy.testing.assert_allclose(pair.d2psi1(zz), numerical, rtol=1e-6)


@pytest.mark.parametrize("n, mu", [(1, "0.6"), (2, "0.5"), (3, "0.5")])
def test_wavefunction_residuals(n: int, mu: str):
    for root in juddian_points(n, mu):
        pair = wavefunctions(terminating_series(n, root.params))
        zz = numpy.linspace(-2 * root.kappa, 2 * root.kappa, 21)

        residual_a, residual_b = pair.residuals(zz)

        assert numpy.max(numpy.abs(residual_a)) < 1e-10
        assert numpy.max(numpy.abs(residual_b)) < 1e-8


def test_wavefunctions_errors():
    series = terminating_series(1, EXACT_N1)

    decoupled = SeriesSolution(
        n=1,
        params=ModelParams(kappa=0.5, mu=0),
        coeffs=(1, 1),
        energy=0.75,
        constraint_residual=0,
    )
    with pytest.raises(DecoupledError):
        wavefunctions(decoupled)

    uncoupled = SeriesSolution(
        n=1,
        params=ModelParams(kappa=0, mu=1),
        coeffs=(1, 0),
        energy=1,
        constraint_residual=0,
    )
    with pytest.raises(BargmannSingularError):
        wavefunctions(uncoupled)

    assert wavefunctions(series).energy == pytest.approx(55 / 64)


def test_parameter_map():
    mapping = parameter_map(1, ModelParams(kappa=0.4, mu=0.6))

    assert mapping.alpha == 0.5
    assert mapping.S == pytest.approx(2.385288242540, abs=1e-12)
    assert mapping.q == pytest.approx(0.076877908910, abs=1e-11)
    assert mapping.lambda_ == pytest.approx(0.0, abs=1e-14)
    assert mapping.L == -1.5
    assert mapping.A == pytest.approx(-mapping.S - 0.5)


def test_parameter_map_alpha_fixed():
    with pytest.raises(ValidationError):
        ParameterMap(alpha=0.3, lambda_=0, L=-1.5, A=-2.5, q=0.1, S=2)

    mapping = ParameterMap(lambda_=0, L=-1.5, A=-2.5, q=0.1, S=2)
    assert mapping.alpha == 0.5


def test_parameter_map_alias():
    dump = parameter_map(1, ModelParams(kappa=0.4, mu=0.6)).model_dump(by_alias=True)

    assert "lambda" in dump
    assert "lambda_" not in dump


@pytest.mark.parametrize("n, S, lambda_", [(0, 1.0, -0.36), (1, 2.0, 0.64)])
def test_parameter_map_uncoupled(n: int, S: float, lambda_: float):
    mapping = parameter_map(n, ModelParams(kappa=0, mu=0.6))

    assert mapping.S == pytest.approx(S)
    assert mapping.q == 0
    assert mapping.lambda_ == pytest.approx(lambda_)


def test_ode_residual_exact():
    series = terminating_series(1, EXACT_N1)

    assert series.coeffs == (1, Fraction(9, 7))
    assert ode_residual(series, SAMPLE_XS) == 0
    assert ode_residual(series, SAMPLE_XS, form=ResidualForm.eliminated) == 0
    assert ode_residual(series, SAMPLE_XS, form="eliminated") == 0


def test_ode_residual_perturbed():
    perturbed = SeriesSolution(
        n=1,
        params=EXACT_N1,
        coeffs=(1, Fraction(9, 7) + Fraction(1, 100)),
        energy=Fraction(55, 64),
        constraint_residual=0,
    )

    assert ode_residual(perturbed, SAMPLE_XS) > 1e-4


def test_ode_residual_wrong_energy():
    series = terminating_series(1, EXACT_N1)

    residual = ode_residual(
        series,
        SAMPLE_XS,
        form=ResidualForm.eliminated,
        energy=Fraction(1),
    )
    assert residual > 1e-4


def test_ode_residual_higher_levels():
    for n, mu in [(2, "0.5"), (3, "0.5"), (4, "0.7")]:
        for root in juddian_points(n, mu):
            series = terminating_series(n, root.params)
            xs = numpy.linspace(-0.5, 1.5, 9).tolist()
            scale = max(1.0, max(abs(float(value)) for value in series.coeffs))
            assert ode_residual(series, xs) < 1e-8 * scale


def test_juddian_points_n1():
    (root,) = juddian_points(1, 0.6)

    assert root.kappa == pytest.approx(0.4, abs=1e-14)
    assert root.energy == pytest.approx(0.84, abs=1e-14)
    assert root.multiplicity == 1
    assert root.mu_sq == Fraction(9, 25)


def test_juddian_points_n2():
    roots = juddian_points(2, "0.5")

    assert [root.kappa for root in roots] == pytest.approx(
        [0.3323281464, 0.8920807156],
        abs=1e-9,
    )
    assert [root.energy for root in roots] == pytest.approx(
        [1.8895580031, 1.2041919969],
        abs=1e-9,
    )


def test_juddian_points_n3():
    roots = juddian_points(3, "0.5")

    assert len(roots) == 3
    assert 0 < roots[0].kappa_sq < 0.1
    assert 0.5 < roots[1].kappa_sq < 0.7
    assert 1 < roots[2].kappa_sq < 2


def test_juddian_points_none():
    assert juddian_points(1, 1.5) == []


def test_juddian_points_mu_one():
    # u = 0 is a root of every condition polynomial at mu = 1 and is excluded.
    assert juddian_points(1, 1) == []

    (root,) = juddian_points(2, 1)
    assert root.kappa_sq == pytest.approx(0.625, abs=1e-12)
    assert root.energy == pytest.approx(1.375, abs=1e-12)

    assert all(root.kappa_sq > 1e-6 for root in juddian_points(3, 1))


def test_juddian_points_negative_mu():
    with pytest.raises(ValueError):
        juddian_points(1, -0.5)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_juddian_points_weak_splitting(n: int):
    assert len(juddian_points(n, "0.1")) >= 1
