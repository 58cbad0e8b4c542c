#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: poly.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import zip_longest

from typing import Iterable, Mapping, Sequence

from rabiqes.config import get_solver_config


__all__ = [
    "ExactScalar",
    "BivariatePolynomial",
    "UnivariatePolynomial",
    "RootBracket",
    "ZeroPolynomialError",
    "RootRefinementError",
    "poly_add",
    "poly_mul",
    "poly_scale",
    "substitute_w",
    "sturm_sequence",
    "sign_variations",
    "count_roots",
    "sturm_isolate",
    "refine_root",
    "positive_roots",
    "exact_decimal",
    "polynomial_gcd",
]


ExactScalar = Fraction
Scalar = Fraction | int | float
Monomial = tuple[int, int]


class ZeroPolynomialError(ValueError):
    """Raised when an operation needs a nonzero polynomial."""

    pass


class RootRefinementError(RuntimeError):
    """Raised when a root cannot be refined to the requested tolerance."""

    def __init__(self, *args, estimate: float | None = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.estimate = estimate


def exact_decimal(value: Scalar | str) -> Fraction:
    """Returns the rational a decimal literal stands for.

    Floats are converted through their shortest representation so that ``0.6``
    becomes ``3/5`` and not the nearest binary fraction.

    """

    if isinstance(value, float):
        return Fraction(repr(value))

    return Fraction(value)


def _sign(value: Scalar) -> int:
    return (value > 0) - (value < 0)


class BivariatePolynomial:
    """Exact polynomial in ``u`` and ``w``.

    The condition polynomials are stored with ``u = kappa**2`` and
    ``w = mu**2``. Coefficients are kept as :obj:`~fractions.Fraction` and zero
    coefficients are never stored.

    Parameters
    ----------
    coeffs
        A mapping of ``(deg_u, deg_w)`` to coefficient.

    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}

        for (du, dw), value in (coeffs or {}).items():
            if du < 0 or dw < 0:
                raise ValueError(f"Invalid monomial degrees {(du, dw)!r}.")
            value = Fraction(value)
            if value != 0:
                clean[(du, dw)] = value

        self._coeffs = clean

    @classmethod
    def constant(cls, value: Scalar) -> BivariatePolynomial:
        return cls({(0, 0): value})

    @classmethod
    def u(cls) -> BivariatePolynomial:
        return cls({(1, 0): 1})

    @classmethod
    def w(cls) -> BivariatePolynomial:
        return cls({(0, 1): 1})

    @property
    def coeffs(self) -> dict[Monomial, Fraction]:
        return dict(self._coeffs)

    @property
    def is_zero(self) -> bool:
        return len(self._coeffs) == 0

    @property
    def degree_u(self) -> int:
        return max((du for du, _ in self._coeffs), default=-1)

    @property
    def degree_w(self) -> int:
        return max((dw for _, dw in self._coeffs), default=-1)

    def coeff(self, du: int, dw: int) -> Fraction:
        """Returns the coefficient of ``u**du * w**dw``."""

        return self._coeffs.get((du, dw), Fraction(0))

    def terms(self) -> list[tuple[int, int, Fraction]]:
        """Returns ``(du, dw, coeff)`` tuples sorted by decreasing degrees."""

        return [(du, dw, self._coeffs[(du, dw)]) for du, dw in sorted(self._coeffs)][
            ::-1
        ]

    def evaluate(self, u: Scalar, w: Scalar) -> Scalar:
        """Evaluates the polynomial. Exact if ``u`` and ``w`` are rational."""

        total: Scalar = 0
        for (du, dw), value in self._coeffs.items():
            total += value * u**du * w**dw

        return total

    __call__ = evaluate

    def _coerce(self, other: object) -> BivariatePolynomial | None:
        if isinstance(other, BivariatePolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return BivariatePolynomial.constant(other)
        return None

    def __add__(self, other: object) -> BivariatePolynomial:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented

        result = dict(self._coeffs)
        for key, value in rhs._coeffs.items():
            result[key] = result.get(key, Fraction(0)) + value

        return BivariatePolynomial(result)

    __radd__ = __add__

    def __neg__(self) -> BivariatePolynomial:
        return BivariatePolynomial({key: -value for key, value in self._coeffs.items()})

    def __sub__(self, other: object) -> BivariatePolynomial:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented

        return self + (-rhs)

    def __rsub__(self, other: object) -> BivariatePolynomial:
        return (-self) + other

    def __mul__(self, other: object) -> BivariatePolynomial:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented

        result: dict[Monomial, Fraction] = {}
        for (du1, dw1), v1 in self._coeffs.items():
            for (du2, dw2), v2 in rhs._coeffs.items():
                key = (du1 + du2, dw1 + dw2)
                result[key] = result.get(key, Fraction(0)) + v1 * v2

        return BivariatePolynomial(result)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> BivariatePolynomial:
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("Division of a polynomial by zero.")

        return BivariatePolynomial(
            {key: value / other for key, value in self._coeffs.items()}
        )

    def __eq__(self, other: object) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented

        return self._coeffs == rhs._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def __repr__(self) -> str:
        return f"<BivariatePolynomial {self!s}>"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"

        parts: list[str] = []
        for du, dw, value in self.terms():
            factors = []
            if du > 0:
                factors.append("u" if du == 1 else f"u^{du}")
            if dw > 0:
                factors.append("w" if dw == 1 else f"w^{dw}")

            magnitude = abs(value)
            if len(factors) == 0:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude)] + factors)

            sign = "-" if value < 0 else "+"
            parts.append(f"{sign} {body}")

        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else f"-{text[2:]}"


def poly_add(a: BivariatePolynomial, b: BivariatePolynomial) -> BivariatePolynomial:
    """Adds two polynomials."""

    return a + b


def poly_mul(a: BivariatePolynomial, b: BivariatePolynomial) -> BivariatePolynomial:
    """Multiplies two polynomials."""

    return a * b


def poly_scale(a: BivariatePolynomial, b: Scalar) -> BivariatePolynomial:
    """Multiplies a polynomial by an exact scalar."""

    if isinstance(b, float):
        raise TypeError("Polynomials can only be scaled by exact scalars.")

    return a * Fraction(b)


class UnivariatePolynomial:
    """A dense polynomial in one variable.

    ``coeffs[i]`` is the coefficient of ``x**i``. Trailing zeros are trimmed so
    the leading coefficient is never zero; the zero polynomial has no
    coefficients. Rational coefficients keep all operations exact.

    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        values = list(coeffs)
        while len(values) > 0 and values[-1] == 0:
            values.pop()

        self._coeffs: tuple[Scalar, ...] = tuple(values)

    @classmethod
    def from_roots(cls, roots: Sequence[Scalar]) -> UnivariatePolynomial:
        """Builds the monic polynomial with the given roots."""

        poly = cls([1])
        for root in roots:
            poly = poly * cls([-root, 1])

        return poly

    @property
    def coeffs(self) -> tuple[Scalar, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self._coeffs) == 0

    @property
    def leading(self) -> Scalar:
        if self.is_zero:
            raise ZeroPolynomialError("zero polynomial")
        return self._coeffs[-1]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(value, (int, Fraction)) for value in self._coeffs)

    def evaluate(self, x: Scalar) -> Scalar:
        """Evaluates the polynomial using Horner's scheme."""

        total: Scalar = 0
        for value in reversed(self._coeffs):
            total = total * x + value

        return total

    __call__ = evaluate

    def derivative(self) -> UnivariatePolynomial:
        return UnivariatePolynomial(
            [ii * value for ii, value in enumerate(self._coeffs)][1:]
        )

    def exact(self) -> UnivariatePolynomial:
        """Returns a copy with :obj:`~fractions.Fraction` coefficients.

        Floats are converted to the rational they represent exactly.

        """

        return UnivariatePolynomial([Fraction(value) for value in self._coeffs])

    def to_float(self) -> UnivariatePolynomial:
        return UnivariatePolynomial([float(value) for value in self._coeffs])

    def monic(self) -> UnivariatePolynomial:
        lead = Fraction(self.leading)
        return UnivariatePolynomial([Fraction(value) / lead for value in self._coeffs])

    def cauchy_bound(self) -> Fraction:
        """Returns ``1 + max|c_i / c_lead|``, an upper bound on root magnitudes."""

        lead = Fraction(self.leading)
        ratios = [abs(Fraction(value) / lead) for value in self._coeffs[:-1]]

        return 1 + max(ratios, default=Fraction(0))

    def square_free_part(self) -> UnivariatePolynomial:
        """Returns ``p / gcd(p, p')``, which has the same roots, all simple."""

        exact = self.exact()
        if exact.degree < 1:
            return exact

        common = polynomial_gcd(exact, exact.derivative())
        quotient, _ = divmod(exact, common)

        return quotient

    def __add__(self, other: object) -> UnivariatePolynomial:
        if not isinstance(other, UnivariatePolynomial):
            return NotImplemented

        return UnivariatePolynomial(
            a + b for a, b in zip_longest(self._coeffs, other._coeffs, fillvalue=0)
        )

    def __neg__(self) -> UnivariatePolynomial:
        return UnivariatePolynomial(-value for value in self._coeffs)

    def __sub__(self, other: object) -> UnivariatePolynomial:
        if not isinstance(other, UnivariatePolynomial):
            return NotImplemented

        return self + (-other)

    def __mul__(self, other: object) -> UnivariatePolynomial:
        if isinstance(other, (int, float, Fraction)):
            return UnivariatePolynomial(value * other for value in self._coeffs)

        if not isinstance(other, UnivariatePolynomial):
            return NotImplemented

        if self.is_zero or other.is_zero:
            return UnivariatePolynomial()

        result: list[Scalar] = [0] * (len(self._coeffs) + len(other._coeffs) - 1)
        for ii, a in enumerate(self._coeffs):
            for jj, b in enumerate(other._coeffs):
                result[ii + jj] += a * b

        return UnivariatePolynomial(result)

    __rmul__ = __mul__

    def __divmod__(
        self,
        other: UnivariatePolynomial,
    ) -> tuple[UnivariatePolynomial, UnivariatePolynomial]:
        """Exact long division over the rationals."""

        if other.is_zero:
            raise ZeroPolynomialError("zero polynomial")

        remainder = [Fraction(value) for value in self._coeffs]
        divisor = [Fraction(value) for value in other._coeffs]
        lead = divisor[-1]

        shift = len(remainder) - len(divisor)
        if shift < 0:
            return UnivariatePolynomial(), UnivariatePolynomial(remainder)

        quotient = [Fraction(0)] * (shift + 1)
        for ii in range(shift, -1, -1):
            factor = remainder[ii + len(divisor) - 1] / lead
            quotient[ii] = factor
            if factor != 0:
                for jj, value in enumerate(divisor):
                    remainder[ii + jj] -= factor * value

        return UnivariatePolynomial(quotient), UnivariatePolynomial(
            remainder[: len(divisor) - 1]
        )

    def gcd(self, other: UnivariatePolynomial) -> UnivariatePolynomial:
        """Monic greatest common divisor with ``other``."""

        return polynomial_gcd(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnivariatePolynomial):
            return NotImplemented

        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"<UnivariatePolynomial {list(map(str, self._coeffs))}>"


def polynomial_gcd(
    a: UnivariatePolynomial,
    b: UnivariatePolynomial,
) -> UnivariatePolynomial:
    """Returns the monic greatest common divisor of two exact polynomials."""

    a, b = a.exact(), b.exact()
    while not b.is_zero:
        a, b = b, divmod(a, b)[1]

    if a.is_zero:
        raise ZeroPolynomialError("zero polynomial")

    return a.monic()


def substitute_w(p: BivariatePolynomial, w0: Scalar) -> UnivariatePolynomial:
    """Fixes ``w = w0`` and returns the resulting polynomial in ``u``.

    The result is exact if ``w0`` is rational.

    """

    coeffs: list[Scalar] = [0] * (max(p.degree_u, 0) + 1)
    for du, dw, value in p.terms():
        coeffs[du] += value * w0**dw

    return UnivariatePolynomial(coeffs)


@dataclass(frozen=True)
class RootBracket:
    """An interval ``(lo, hi]`` holding exactly one distinct real root.

    ``value_lo`` and ``value_hi`` are the values of the square-free part of the
    polynomial at the bounds, so they differ in sign unless one of them is an
    exact root. ``root`` is set once the bracket has been refined.

    """

    lo: Scalar
    hi: Scalar
    value_lo: Scalar
    value_hi: Scalar
    multiplicity: int = 1
    root: float | None = None

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("Root brackets must have lo < hi.")

        if self.value_lo != 0 and self.value_hi != 0:
            if _sign(self.value_lo) == _sign(self.value_hi):
                raise ValueError("Root bracket does not change sign.")

    @property
    def width(self) -> Scalar:
        return self.hi - self.lo

    def contains(self, x: Scalar) -> bool:
        return self.lo <= x <= self.hi


def sturm_sequence(p: UnivariatePolynomial) -> list[UnivariatePolynomial]:
    """Returns the Sturm chain ``p, p', -rem(p, p'), ...`` in exact arithmetic."""

    if p.is_zero:
        raise ZeroPolynomialError("zero polynomial")

    chain = [p.exact()]
    derivative = chain[0].derivative()
    if derivative.is_zero:
        return chain

    chain.append(derivative)
    while True:
        remainder = divmod(chain[-2], chain[-1])[1]
        if remainder.is_zero:
            break
        chain.append(-remainder)

    return chain


def sign_variations(chain: Sequence[UnivariatePolynomial], x: Scalar) -> int:
    """Counts the sign changes of the chain evaluated at ``x``, skipping zeros."""

    signs = [_sign(poly(x)) for poly in chain]
    signs = [sign for sign in signs if sign != 0]

    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: UnivariatePolynomial, lo: Scalar, hi: Scalar) -> int:
    """Returns the number of distinct real roots of ``p`` in ``(lo, hi]``."""

    chain = sturm_sequence(p.square_free_part())
    lo, hi = Fraction(lo), Fraction(hi)

    return sign_variations(chain, lo) - sign_variations(chain, hi)


def _multiplicity_chain(p: UnivariatePolynomial) -> list[list[UnivariatePolynomial]]:
    """Sturm chains of ``p, gcd(p, p'), ...``. A root of multiplicity k is a
    root of the first k members."""

    chains = []
    current = p.exact()
    while current.degree >= 1:
        chains.append(sturm_sequence(current.square_free_part()))
        current = polynomial_gcd(current, current.derivative())

    return chains


def sturm_isolate(
    p: UnivariatePolynomial,
    lo: Scalar,
    hi: Scalar,
) -> list[RootBracket]:
    """Isolates the distinct real roots of ``p`` in ``(lo, hi]``.

    The interval is bisected until each piece holds exactly one root according
    to the Sturm sequence of the square-free part of ``p``. Bounds are kept as
    exact rationals.

    Parameters
    ----------
    p
        The polynomial. Float coefficients are converted to the rationals they
        represent.
    lo
        The lower bound of the search interval (excluded).
    hi
        The upper bound of the search interval (included).

    Returns
    -------
    brackets
        A list of disjoint `.RootBracket`, sorted by increasing ``lo``, with
        their ``multiplicity`` set.

    Raises
    ------
    ZeroPolynomialError
        If ``p`` is the zero polynomial.

    """

    if p.is_zero:
        raise ZeroPolynomialError("zero polynomial")

    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError("sturm_isolate requires lo < hi.")

    square_free = p.square_free_part()
    if square_free.degree < 1:
        return []

    chain = sturm_sequence(square_free)

    intervals: list[tuple[Fraction, Fraction]] = []
    stack = [(lo, hi, sign_variations(chain, lo), sign_variations(chain, hi))]
    while len(stack) > 0:
        a, b, var_a, var_b = stack.pop()
        count = var_a - var_b
        if count <= 0:
            continue
        if count == 1:
            intervals.append((a, b))
            continue

        mid = (a + b) / 2
        var_mid = sign_variations(chain, mid)
        stack.append((mid, b, var_mid, var_b))
        stack.append((a, mid, var_a, var_mid))

    multiplicity_chains = _multiplicity_chain(p)

    brackets: list[RootBracket] = []
    for a, b in sorted(intervals):
        multiplicity = sum(
            1
            for member in multiplicity_chains
            if sign_variations(member, a) - sign_variations(member, b) > 0
        )
        brackets.append(
            RootBracket(
                lo=a,
                hi=b,
                value_lo=square_free(a),
                value_hi=square_free(b),
                multiplicity=max(multiplicity, 1),
            )
        )

    return brackets


def refine_root(
    p: UnivariatePolynomial,
    bracket: RootBracket,
    tol: float | None = None,
    bisection_width: float | None = None,
    max_iterations: int | None = None,
) -> float:
    """Refines an isolated root.

    The bracket is first bisected in exact arithmetic down to
    ``bisection_width``; then safeguarded Newton iterations run in floating
    point while the bracket is updated from exact signs, until the root is
    enclosed in an interval narrower than ``tol * max(1, |root|)``.

    Parameters
    ----------
    p
        The polynomial.
    bracket
        A bracket isolating a single root of ``p``, as returned by
        `.sturm_isolate`.
    tol
        The relative tolerance. Defaults to the internal value.
    bisection_width
        The width at which bisection hands over to Newton iterations.
    max_iterations
        The maximum number of Newton iterations.

    Returns
    -------
    root
        The root as a float.

    Raises
    ------
    RootRefinementError
        If the tolerance is not reached. The best estimate is attached to the
        exception as ``estimate``.

    """

    config = get_solver_config().roots
    tol = tol if tol is not None else config.refine_tolerance
    bisection_width = bisection_width or config.bisection_width
    max_iterations = max_iterations or config.max_iterations

    poly = p.square_free_part()
    lo, hi = Fraction(bracket.lo), Fraction(bracket.hi)

    # lo is excluded and may itself be a root of a neighbouring bracket. The
    # single simple root is either hi or strictly inside, so just above lo the
    # sign is opposite to the sign at hi.
    value_hi = poly(hi)
    if value_hi == 0:
        return float(hi)

    sign_lo = -_sign(value_hi)

    def _shrink(x: Fraction) -> bool:
        """Moves one of the bounds to ``x``. Returns `True` if ``x`` is a root."""

        nonlocal lo, hi

        sign_x = _sign(poly(x))
        if sign_x == 0:
            return True
        if sign_x == sign_lo:
            lo = max(lo, x)
        else:
            hi = min(hi, x)

        return False

    while hi - lo > bisection_width:
        mid = (lo + hi) / 2
        if _shrink(mid):
            return float(mid)

    poly_float = poly.to_float()
    derivative_float = poly_float.derivative()

    x = float((lo + hi) / 2)
    for _ in range(max_iterations):
        if hi - lo <= Fraction(tol * max(1.0, abs(x))):
            return float((lo + hi) / 2)

        slope = derivative_float(x)
        x_new = x - poly_float(x) / slope if slope != 0 else float("nan")
        if not (float(lo) < x_new < float(hi)) or x_new == x:
            x_new = float((lo + hi) / 2)

        exact_x = Fraction(x_new)
        if _shrink(exact_x):
            return x_new

        # Test the other side of the iterate to enclose the root tightly.
        delta = Fraction(tol * max(1.0, abs(x_new))) / 2
        other = exact_x - delta if hi == exact_x else exact_x + delta
        if lo < other < hi and _shrink(other):
            return float(other)

        x = x_new

    raise RootRefinementError(
        f"Root not refined to tolerance {tol} after {max_iterations} iterations.",
        estimate=float((lo + hi) / 2),
    )


def positive_roots(
    p: UnivariatePolynomial,
    tol: float | None = None,
) -> list[RootBracket]:
    """Finds and refines every positive root of ``p``.

    The search domain is ``(0, U]`` where ``U`` is the Cauchy bound of ``p``, so
    no positive root can be missed and zero is never reported.

    """

    if p.is_zero:
        raise ZeroPolynomialError("zero polynomial")

    if p.degree < 1:
        return []

    upper = p.exact().cauchy_bound()
    brackets = sturm_isolate(p, 0, upper)

    return [
        RootBracket(
            lo=bracket.lo,
            hi=bracket.hi,
            value_lo=bracket.value_lo,
            value_hi=bracket.value_hi,
            multiplicity=bracket.multiplicity,
            root=refine_root(p, bracket, tol=tol),
        )
        for bracket in brackets
    ]

