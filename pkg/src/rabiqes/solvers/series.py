#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: series.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from typing import Any, Literal, Sequence

import numpy
from pydantic import BaseModel, ConfigDict, Field

from rabiqes.config import get_solver_config
from rabiqes.solvers.poly import (
    BivariatePolynomial,
    Scalar,
    UnivariatePolynomial,
    exact_decimal,
    positive_roots,
    substitute_w,
)


__all__ = [
    "ModelParams",
    "QESIndex",
    "SeriesSolution",
    "WavefunctionPair",
    "ParameterMap",
    "JuddianRoot",
    "ResidualForm",
    "ConstraintRowError",
    "DecoupledError",
    "ConstraintResidualError",
    "BargmannSingularError",
    "ConditionRangeError",
    "qes_energy",
    "series_recurrence_step",
    "juddian_constraint",
    "condition_polynomial",
    "normalization_factor",
    "terminating_series",
    "series_continuation",
    "bargmann_map",
    "inverse_bargmann_map",
    "wavefunctions",
    "parameter_map",
    "ode_residual",
    "juddian_points",
]


class ConstraintRowError(ValueError):
    """Raised when the recurrence is asked to step through the constraint row."""

    pass


class DecoupledError(ValueError):
    """Raised for operations undefined at ``mu = 0``."""

    pass


class ConstraintResidualError(ValueError):
    """Raised when the parameters are not close enough to a Juddian point."""

    def __init__(self, *args, residual: Scalar | None = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.residual = residual


class BargmannSingularError(ValueError):
    """Raised when ``z = kappa (2x - 1)`` cannot be inverted."""

    pass


class ConditionRangeError(ValueError):
    """Raised when a condition polynomial is requested out of range."""

    pass


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the Rabi Hamiltonian.

    All the series operations work with ``kappa_sq`` and ``mu_sq``. They are
    derived from ``kappa`` and ``mu`` unless given explicitly, which allows
    keeping exact rational squares (see `.from_squares`).

    Parameters
    ----------
    kappa
        The linear coupling constant.
    mu
        Half the level splitting. Must be non-negative.
    kappa_sq
        ``kappa**2``, possibly as an exact rational.
    mu_sq
        ``mu**2``, possibly as an exact rational.

    """

    kappa: Scalar
    mu: Scalar
    kappa_sq: Scalar | None = field(default=None, compare=False)
    mu_sq: Scalar | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be non-negative.")

        if self.kappa_sq is None:
            object.__setattr__(self, "kappa_sq", self.kappa**2)
        if self.mu_sq is None:
            object.__setattr__(self, "mu_sq", self.mu**2)

    @classmethod
    def from_squares(cls, kappa_sq: Scalar, mu_sq: Scalar) -> ModelParams:
        """Builds the parameters from ``kappa**2`` and ``mu**2``.

        ``kappa`` is taken as the positive square root.

        """

        if kappa_sq < 0 or mu_sq < 0:
            raise ValueError("Squared couplings must be non-negative.")

        return cls(
            kappa=math.sqrt(kappa_sq),
            mu=math.sqrt(mu_sq),
            kappa_sq=kappa_sq,
            mu_sq=mu_sq,
        )

    @property
    def u(self) -> Scalar:
        assert self.kappa_sq is not None
        return self.kappa_sq

    @property
    def w(self) -> Scalar:
        assert self.mu_sq is not None
        return self.mu_sq


@dataclass(frozen=True)
class QESIndex:
    """The QES level ``n = 2j``."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("The QES index must be non-negative.")

    @property
    def j(self) -> Fraction:
        return Fraction(self.n, 2)


def _level(n: int | QESIndex) -> int:
    return n.n if isinstance(n, QESIndex) else int(n)


def qes_energy(n: int | QESIndex, params: ModelParams) -> Scalar:
    """Returns the quasi-exact energy ``E = 2j - kappa**2 = n - kappa**2``."""

    return _level(n) - params.u


def _step(n: int, m: int, u: Any, w: Any, c_m: Any, c_prev: Any) -> Any:
    """Row ``m`` of the series recurrence solved for ``c_{m+1}``.

    Written for any ring that supports ``+``, ``*`` and division by integers,
    so it runs on floats, rationals and `.BivariatePolynomial`.

    """

    d = m - n
    numerator = (d * (d + 4 * u) - w) * c_m - 4 * (m - 1 - n) * u * c_prev

    return numerator / ((m + 1) * (m + 1 - n))


def series_recurrence_step(
    n: int | QESIndex,
    params: ModelParams,
    m: int,
    c_m: Scalar,
    c_m_minus_1: Scalar,
) -> Scalar:
    """Returns ``c_{m+1}`` from ``c_m`` and ``c_{m-1}``.

    The recurrence follows from inserting ``R(x) = sum c_m x^m`` in the QES
    equation::

        (m+1)(m+1-n) c_{m+1} = [(m-n)(m-n+4u) - w] c_m - 4u(m-1-n) c_{m-1}

    with ``u = kappa**2`` and ``w = mu**2``.

    Raises
    ------
    ConstraintRowError
        If ``m + 1 == n``, where the coefficient of ``c_{m+1}`` vanishes.

    """

    n = _level(n)
    if m + 1 == n:
        raise ConstraintRowError("constraint row, not a recurrence step")

    return _step(n, m, params.u, params.w, c_m, c_m_minus_1)


def _head_coefficients(n: int, u: Any, w: Any, one: Any) -> list[Any]:
    """Runs the recurrence from ``c_0 = one`` and returns ``c_0 .. c_{n-1}``."""

    coeffs = [one]
    for m in range(0, n - 1):
        c_prev = coeffs[m - 1] if m >= 1 else 0
        coeffs.append(_step(n, m, u, w, coeffs[m], c_prev))

    return coeffs


def _constraint_terms(n: int, u: Any, w: Any, coeffs: Sequence[Any]) -> tuple:
    """The two terms of the ``m = n - 1`` row, whose left side vanishes."""

    c_last = coeffs[n - 1]
    c_prev = coeffs[n - 2] if n >= 2 else 0

    return (1 - 4 * u - w) * c_last, 8 * u * c_prev


def juddian_constraint(n: int | QESIndex, params: ModelParams) -> Scalar:
    """Returns the constraint residual for level ``n``.

    The recurrence is run from ``c_0 = 1`` up to ``c_{n-1}`` and the residual
    of the row ``m = n - 1`` is returned. It vanishes if and only if
    ``(kappa, mu)`` is a Juddian point for level ``n``. Exact for rational
    ``kappa_sq`` and ``mu_sq``.

    """

    n = _level(n)
    if n < 1:
        raise ValueError("The constraint is defined for n >= 1.")

    coeffs = _head_coefficients(n, params.u, params.w, 1)
    first, second = _constraint_terms(n, params.u, params.w, coeffs)

    return first + second


@lru_cache(maxsize=None)
def _symbolic_constraint(n: int) -> BivariatePolynomial:
    u, w = BivariatePolynomial.u(), BivariatePolynomial.w()
    one = BivariatePolynomial.constant(1)

    coeffs = _head_coefficients(n, u, w, one)
    first, second = _constraint_terms(n, u, w, coeffs)

    return first + second


def normalization_factor(n: int | QESIndex) -> Fraction:
    """Returns ``r_n`` such that ``condition_polynomial(n) == r_n * constraint``.

    The factor makes the coefficient of ``u**n`` equal to ``4**n * n!``.

    """

    n = _level(n)
    leading = _symbolic_constraint(n).coeff(n, 0)

    return Fraction(4**n * math.factorial(n)) / leading


@lru_cache(maxsize=None)
def _condition_polynomial(n: int) -> BivariatePolynomial:
    poly = _symbolic_constraint(n) * normalization_factor(n)

    if any(value.denominator != 1 for _, _, value in poly.terms()):
        raise ArithmeticError(f"Condition polynomial {n} has non-integer terms.")

    return poly


def condition_polynomial(
    n: int | QESIndex,
    n_max: int | None = None,
) -> BivariatePolynomial:
    """Returns the condition polynomial ``P_n(u, w)``.

    The polynomial is built by running the series recurrence symbolically over
    the rationals with ``u = kappa**2`` and ``w = mu**2`` as indeterminates, and
    scaled to integer coefficients with leading term ``4**n * n! * u**n``.
    Results are memoised per ``n``.

    Parameters
    ----------
    n
        The level. Must be between 1 and ``n_max``.
    n_max
        The largest level allowed. Defaults to the internal value.

    Raises
    ------
    ConditionRangeError
        If ``n`` is out of range.

    """

    n = _level(n)
    n_max = n_max or get_solver_config().qes.n_max

    if not 1 <= n <= n_max:
        raise ConditionRangeError(f"n must be between 1 and {n_max}, got {n}.")

    return _condition_polynomial(n)


@dataclass(frozen=True)
class SeriesSolution:
    """A terminating series solution ``R(x) = c_0 + ... + c_n x^n``."""

    n: int
    params: ModelParams
    coeffs: tuple[Scalar, ...]
    energy: Scalar
    constraint_residual: Scalar

    def __post_init__(self):
        if self.coeffs[0] != 1:
            raise ValueError("Series solutions are normalised with c_0 = 1.")
        if len(self.coeffs) != self.n + 1:
            raise ValueError("A level-n series has n + 1 coefficients.")

    @property
    def j(self) -> Fraction:
        return Fraction(self.n, 2)

    @property
    def polynomial(self) -> UnivariatePolynomial:
        """``R(x)`` as a polynomial in ``x``."""

        return UnivariatePolynomial(self.coeffs)


def terminating_series(
    n: int | QESIndex,
    params: ModelParams,
    tol: float | None = None,
) -> SeriesSolution:
    """Builds the degree-``n`` polynomial solution at a Juddian point.

    The recurrence gives ``c_1 .. c_{n-1}``; the last coefficient is closed with
    ``c_n = 4 kappa**2 c_{n-1} / mu**2`` so that ``c_{n+1} = 0``.

    Parameters
    ----------
    n
        The level.
    params
        The couplings. Must be a Juddian point for ``n``.
    tol
        Relative tolerance on the constraint residual, scaled by the magnitude
        of the terms in the constraint row. Defaults to the internal value.

    Raises
    ------
    DecoupledError
        If ``mu == 0``.
    ConstraintResidualError
        If the constraint residual is too large.

    """

    n = _level(n)
    if n < 1:
        raise ValueError("Terminating series are defined for n >= 1.")

    if params.w == 0:
        raise DecoupledError("decoupled case, series closure undefined")

    tol = tol if tol is not None else get_solver_config().qes.constraint_tolerance
    u, w = params.u, params.w

    coeffs = _head_coefficients(n, u, w, 1)
    first, second = _constraint_terms(n, u, w, coeffs)
    residual = first + second

    scale = max(1, abs(first), abs(second))
    if abs(residual) > tol * scale:
        raise ConstraintResidualError(
            f"Not a Juddian point for n={n}: constraint residual {float(residual)}.",
            residual=residual,
        )

    coeffs.append(4 * u * coeffs[n - 1] / w)

    return SeriesSolution(
        n=n,
        params=params,
        coeffs=tuple(coeffs),
        energy=qes_energy(n, params),
        constraint_residual=residual,
    )


def series_continuation(series: SeriesSolution, extra: int = 2) -> list[Scalar]:
    """Continues the recurrence past ``c_n`` and returns the next coefficients.

    For a valid solution the continuation vanishes.

    """

    coeffs = list(series.coeffs)
    for m in range(series.n, series.n + extra):
        coeffs.append(
            series_recurrence_step(
                series.n,
                series.params,
                m,
                coeffs[m],
                coeffs[m - 1] if m >= 1 else 0,
            )
        )

    return coeffs[series.n + 1 :]


def bargmann_map(params: ModelParams, x: Any) -> Any:
    """Returns the Bargmann variable ``z = kappa (2x - 1)``."""

    return params.kappa * (2 * x - 1)


def inverse_bargmann_map(params: ModelParams, z: Any) -> Any:
    """Returns ``x = (z / kappa + 1) / 2``.

    Raises
    ------
    BargmannSingularError
        If ``kappa == 0``.

    """

    if params.kappa == 0:
        raise BargmannSingularError("Bargmann substitution singular")

    return (z / params.kappa + 1) / 2


@dataclass(frozen=True)
class WavefunctionPair:
    """The two components ``psi_1(z)``, ``psi_2(z)`` in the Bargmann picture.

    ``psi_1(z) = exp(-2 kappa**2 x) R(x)`` with ``z = kappa (2x - 1)``; ``psi_2``
    follows from the first of the coupled first-order equations. All
    derivatives are analytic. Methods accept floats or numpy arrays.

    """

    series: SeriesSolution

    @property
    def params(self) -> ModelParams:
        return self.series.params

    @property
    def energy(self) -> float:
        return float(self.series.energy)

    def _terms(self, z: Any) -> tuple[Any, Any, Any, Any]:
        """Returns ``exp(-2ux)``, ``R``, ``R'`` and ``R''`` at ``x(z)``."""

        poly = self.series.polynomial.to_float()
        d1 = poly.derivative()
        d2 = d1.derivative()

        x = inverse_bargmann_map(self.params, numpy.asarray(z, dtype=float))
        u = float(self.params.u)

        return numpy.exp(-2 * u * x), poly(x), d1(x), d2(x)

    def psi1(self, z: Any) -> Any:
        exp, r0, _, _ = self._terms(z)
        return exp * r0

    def dpsi1(self, z: Any) -> Any:
        exp, r0, r1, _ = self._terms(z)
        u = float(self.params.u)
        return exp * (r1 - 2 * u * r0) / (2 * float(self.params.kappa))

    def d2psi1(self, z: Any) -> Any:
        exp, r0, r1, r2 = self._terms(z)
        u = float(self.params.u)
        return exp * (r2 - 4 * u * r1 + 4 * u**2 * r0) / (4 * u)

    def psi2(self, z: Any) -> Any:
        kappa, mu, energy = self._constants()
        z = numpy.asarray(z, dtype=float)

        return -((z + kappa) * self.dpsi1(z) + (kappa * z - energy) * self.psi1(z)) / mu

    def dpsi2(self, z: Any) -> Any:
        kappa, mu, energy = self._constants()
        z = numpy.asarray(z, dtype=float)

        psi1, dpsi1, d2psi1 = self.psi1(z), self.dpsi1(z), self.d2psi1(z)

        total = (1 + kappa * z - energy) * dpsi1 + (z + kappa) * d2psi1 + kappa * psi1

        return -total / mu

    def residuals(self, z: Any) -> tuple[Any, Any]:
        """Returns the residuals of the two coupled first-order equations."""

        kappa, mu, energy = self._constants()
        z = numpy.asarray(z, dtype=float)

        psi1, dpsi1 = self.psi1(z), self.dpsi1(z)
        psi2, dpsi2 = self.psi2(z), self.dpsi2(z)

        residual_a = (z + kappa) * dpsi1 + (kappa * z - energy) * psi1 + mu * psi2
        residual_b = (z - kappa) * dpsi2 - (kappa * z + energy) * psi2 + mu * psi1

        return residual_a, residual_b

    def _constants(self) -> tuple[float, float, float]:
        return float(self.params.kappa), float(self.params.mu), self.energy


def wavefunctions(series: SeriesSolution) -> WavefunctionPair:
    """Returns the Bargmann wavefunctions of a terminating series.

    Raises
    ------
    DecoupledError
        If ``mu == 0``.
    BargmannSingularError
        If ``kappa == 0``.

    """

    if series.params.w == 0:
        raise DecoupledError("psi_2 is undefined for mu = 0.")

    if series.params.kappa == 0:
        raise BargmannSingularError("Bargmann substitution singular")

    return WavefunctionPair(series)


class ParameterMap(BaseModel):
    """Parameters mapping the QES equation onto the Poschl-Teller family."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    alpha: Literal[0.5] = 0.5
    lambda_: float = Field(alias="lambda")
    L: float
    A: float
    q: float
    S: float = Field(ge=0)


def parameter_map(n: int | QESIndex, params: ModelParams) -> ParameterMap:
    """Returns ``alpha``, ``lambda``, ``L``, ``A``, ``q`` and ``S`` for level ``n``."""

    j = _level(n) / 2
    u, w = float(params.u), float(params.w)

    S = math.sqrt(4 * j * (j + 1) + (4 * u + 1) ** 2)

    return ParameterMap(
        alpha=0.5,
        lambda_=-4 * j * (2 * u - j) - w,
        L=-2 * j - 0.5,
        A=-S - 0.5,
        q=16 * u / (2 * S + 1) ** 2,
        S=S,
    )


class ResidualForm(str, enum.Enum):
    """Which second-order equation `.ode_residual` evaluates."""

    qes = "qes"
    eliminated = "eliminated"


def ode_residual(
    series: SeriesSolution,
    sample_xs: Sequence[Scalar],
    form: ResidualForm | str = ResidualForm.qes,
    energy: Scalar | None = None,
) -> Scalar:
    """Returns the largest residual of the second-order equation for ``R(x)``.

    With ``form="qes"`` the equation is::

        x(1-x) R'' + [n(2x-1) + (x-1)(4ux-1)] R' + [4nu(1-x) + w - n^2] R

    With ``form="eliminated"`` it is the equation obtained right after
    eliminating ``psi_2``, where the energy appears explicitly::

        x(1-x) R'' + [u(4x^2-2x-1) + E(2x-1) - x + 1] R'
            + [u^2(3-4x) - E^2 + 2Eu(1-2x) + w] R

    Both coincide when ``E = n - u``. Exact if the series and samples are.

    """

    form = ResidualForm(form)

    n = series.n
    u, w = series.params.u, series.params.w
    energy = series.energy if energy is None else energy

    r0 = series.polynomial
    r1 = r0.derivative()
    r2 = r1.derivative()

    largest: Scalar = 0
    for x in sample_xs:
        if form == ResidualForm.qes:
            first = n * (2 * x - 1) + (x - 1) * (4 * u * x - 1)
            zeroth = 4 * n * u * (1 - x) + w - n**2
        else:
            first = u * (4 * x**2 - 2 * x - 1) + energy * (2 * x - 1) - x + 1
            zeroth = (
                u**2 * (3 - 4 * x) - energy**2 + 2 * energy * u * (1 - 2 * x) + w
            )

        value = x * (1 - x) * r2(x) + first * r1(x) + zeroth * r0(x)
        largest = max(largest, abs(value))

    return largest


@dataclass(frozen=True)
class JuddianRoot:
    """A positive root ``u = kappa**2`` of a condition polynomial at fixed ``mu``."""

    n: int
    kappa_sq: float
    mu: float
    mu_sq: Scalar
    multiplicity: int = 1

    @property
    def kappa(self) -> float:
        return math.sqrt(self.kappa_sq)

    @property
    def energy(self) -> float:
        return self.n - self.kappa_sq

    @property
    def params(self) -> ModelParams:
        return ModelParams.from_squares(self.kappa_sq, self.mu_sq)


def juddian_points(
    n: int | QESIndex,
    mu: Scalar | str,
    tol: float | None = None,
) -> list[JuddianRoot]:
    """Returns the Juddian points of level ``n`` at fixed ``mu``.

    ``mu`` is read as the decimal it was written as (``0.6`` is ``3/5``) so the
    condition polynomial is specialised in exact arithmetic. Roots are sorted by
    increasing ``kappa``.

    """

    n = _level(n)
    mu_exact = exact_decimal(mu)
    if mu_exact < 0:
        raise ValueError("mu must be non-negative.")

    mu_sq = mu_exact**2
    poly = substitute_w(condition_polynomial(n), mu_sq)

    roots: list[JuddianRoot] = []
    for bracket in positive_roots(poly, tol=tol):
        assert bracket.root is not None
        roots.append(
            JuddianRoot(
                n=n,
                kappa_sq=bracket.root,
                mu=float(mu_exact),
                mu_sq=mu_sq,
                multiplicity=bracket.multiplicity,
            )
        )

    return roots
