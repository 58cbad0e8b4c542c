#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: validate.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import logging
from datetime import UTC, datetime
from fractions import Fraction
from functools import partial

from typing import Any, Callable

import numpy
from pydantic import BaseModel, Field, computed_field, field_serializer

from sdsstools.logger import SDSSLogger

from rabiqes.config import Suite, get_solver_config
from rabiqes.solvers.oracle import converged_spectrum, verify_juddian
from rabiqes.solvers.poly import BivariatePolynomial
from rabiqes.solvers.series import (
    ModelParams,
    condition_polynomial,
    juddian_constraint,
    juddian_points,
    normalization_factor,
    series_continuation,
    terminating_series,
    wavefunctions,
)
from rabiqes.tools import date_json, get_fake_logger


__all__ = ["GOLDEN_TERMS", "CheckResult", "VerificationReport", "run_suite"]


# Expanded condition polynomials for the first three levels, as
# {(deg_u, deg_w): coefficient}.
GOLDEN_TERMS: dict[int, dict[tuple[int, int], int]] = {
    1: {(1, 0): 4, (0, 1): 1, (0, 0): -1},
    2: {(2, 0): 32, (1, 1): 12, (1, 0): -32, (0, 2): 1, (0, 1): -5, (0, 0): 4},
    3: {
        (3, 0): 384,
        (2, 1): 176,
        (2, 0): -864,
        (1, 2): 24,
        (1, 1): -232,
        (1, 0): 432,
        (0, 3): 1,
        (0, 2): -14,
        (0, 1): 49,
        (0, 0): -36,
    },
}


def log_or_raise(
    log: logging.Logger | SDSSLogger | None,
    raise_on_error: bool,
    message: str,
    level: int = logging.INFO,
):
    """Logs a message or raises an exception.

    Parameters
    ----------
    log
        A logger to output messages to the user.
    message
        The message to log or raise.
    level
        The logging level to use if ``log`` is provided.
    raise_on_error
        If `True`, raises an exception if the message level is ``ERROR`` or higher.

    """

    log = log or get_fake_logger()

    if level >= logging.ERROR and raise_on_error:
        raise RuntimeError(message)

    log.log(level, message)


class CheckResult(BaseModel):
    """The outcome of a single verification check."""

    name: str
    passed: bool
    measured: dict[str, Any] = Field(default_factory=dict)


class VerificationReport(BaseModel):
    """The outcome of a verification suite."""

    suite: Suite
    checks: list[CheckResult] = Field(default_factory=list)
    timestamp: datetime | None = None

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @field_serializer("suite")
    def serialize_suite(self, suite: Suite) -> str:
        return suite.value

    @field_serializer("timestamp")
    def serialize_timestamp(self, timestamp: datetime | None) -> str | None:
        return date_json(timestamp)

    def to_document(self) -> dict[str, Any]:
        """Returns the report as a JSON-serialisable dictionary."""

        dump = self.model_dump()

        document = {key: dump[key] for key in ("suite", "passed", "checks")}
        if self.timestamp is not None:
            document["timestamp"] = dump["timestamp"]

        return document


def check_golden(n: int) -> CheckResult:
    """Compares the condition polynomial of level ``n`` with its expansion."""

    expected = BivariatePolynomial(GOLDEN_TERMS[n])
    computed = condition_polynomial(n)

    monomials = set(expected.coeffs) | set(computed.coeffs)
    mismatches = [
        key for key in monomials if expected.coeff(*key) != computed.coeff(*key)
    ]

    return CheckResult(
        name=f"golden_P{n}",
        passed=len(mismatches) == 0,
        measured={
            "terms": len(computed.coeffs),
            "mismatches": len(mismatches),
            "polynomial": str(computed),
        },
    )


def check_kappa_zero(mu: float = 0.6, k: int = 8) -> CheckResult:
    """At ``kappa = 0`` the spectrum is ``m +/- mu``."""

    spectrum = converged_spectrum(ModelParams(kappa=0.0, mu=mu), k)

    expected = numpy.sort([m + sign * mu for m in range(k) for sign in (-1, 1)])[:k]
    deviation = float(numpy.abs(spectrum.lowest(k) - expected).max())

    return CheckResult(
        name=f"oracle_kappa_0_mu_{mu}",
        passed=deviation <= 1e-10,
        measured={"max_deviation": deviation, "n_used": spectrum.n_used},
    )


def check_mu_zero(kappa: float, k: int = 8) -> CheckResult:
    """At ``mu = 0`` the spectrum is ``m - kappa^2``, twice degenerate."""

    spectrum = converged_spectrum(ModelParams(kappa=kappa, mu=0.0), k)

    expected = numpy.array([m - kappa**2 for m in range(k) for _ in range(2)])[:k]
    deviation = float(numpy.abs(spectrum.lowest(k) - expected).max())

    return CheckResult(
        name=f"oracle_mu_0_kappa_{kappa}",
        passed=deviation <= 1e-8,
        measured={"max_deviation": deviation, "n_used": spectrum.n_used},
    )


def check_termination(rng: numpy.random.Generator, samples: int) -> CheckResult:
    """Series on the ``n = 1`` family ``mu^2 = 1 - 4 kappa^2`` terminate exactly."""

    failures = 0
    denominator = 4 * 10**6

    for _ in range(samples):
        u = Fraction(int(rng.integers(1, 10**6)), denominator)
        params = ModelParams.from_squares(u, 1 - 4 * u)

        continuation = series_continuation(terminating_series(1, params), extra=2)
        if any(value != 0 for value in continuation):
            failures += 1

    return CheckResult(
        name="series_termination_n1",
        passed=failures == 0,
        measured={"samples": samples, "failures": failures},
    )


def check_equivalence(rng: numpy.random.Generator, samples: int) -> CheckResult:
    """The constraint residual is proportional to the condition polynomial."""

    failures = 0
    n_max = min(6, get_solver_config().qes.n_max)

    for ii in range(samples):
        n = 1 + ii % n_max
        u = Fraction(int(rng.integers(0, 1000)), int(rng.integers(1, 1000)))
        w = Fraction(int(rng.integers(0, 1000)), int(rng.integers(1, 1000)))

        scaled = normalization_factor(n) * juddian_constraint(
            n,
            ModelParams.from_squares(u, w),
        )
        if scaled != condition_polynomial(n).evaluate(u, w):
            failures += 1

    return CheckResult(
        name="constraint_polynomial_equivalence",
        passed=failures == 0,
        measured={"samples": samples, "failures": failures},
    )


def check_cross_validation(
    n: int,
    mu: str,
    samples: int,
) -> tuple[CheckResult, CheckResult]:
    """Checks every Juddian point of level ``n`` against the oracle.

    Returns the oracle comparison and the wavefunction residual checks.

    """

    config = get_solver_config()
    roots = juddian_points(n, mu)

    gaps: list[float] = []
    multiplicities: list[int] = []
    residuals: list[float] = []

    for root in roots:
        point = verify_juddian(n, root.params)
        gaps.append(point.oracle_gap)
        multiplicities.append(point.multiplicity)

        pair = wavefunctions(terminating_series(n, root.params))
        zz = numpy.linspace(-2 * root.kappa, 2 * root.kappa, samples)
        residual_a, residual_b = pair.residuals(zz)
        residuals.append(float(numpy.maximum(abs(residual_a), abs(residual_b)).max()))

    oracle_check = CheckResult(
        name=f"cross_validation_n{n}_mu{mu}",
        passed=len(roots) > 0
        and all(gap < config.oracle.gap_tolerance for gap in gaps),
        measured={
            "kappa": [root.kappa for root in roots],
            "energy": [root.energy for root in roots],
            "oracle_gap": gaps,
            "multiplicity": multiplicities,
        },
    )

    residual_check = CheckResult(
        name=f"wavefunction_residuals_n{n}_mu{mu}",
        passed=len(roots) > 0
        and all(value < config.qes.ode_residual_tolerance for value in residuals),
        measured={"max_residual": residuals},
    )

    return oracle_check, residual_check


def _safe(name: str, func: Callable[[], CheckResult | tuple[CheckResult, ...]]):
    """Runs a check, turning unexpected errors into a failed check."""

    try:
        result = func()
    except Exception as err:
        return [CheckResult(name=name, passed=False, measured={"error": str(err)})]

    return list(result) if isinstance(result, tuple) else [result]


def run_suite(
    suite: Suite | str = Suite.all,
    timestamp: bool = False,
    log: logging.Logger | SDSSLogger | None = None,
    raise_on_error: bool = False,
) -> VerificationReport:
    """Runs a verification suite.

    Parameters
    ----------
    suite
        ``golden`` compares the first three condition polynomials with their
        expansions. ``oracle`` checks the Fock-basis solver in its analytic
        limits. ``all`` runs both, plus the series termination, the
        constraint/polynomial equivalence, and the Juddian cross-validations
        with their wavefunction residuals.
    timestamp
        Whether to add the current time to the report.
    log
        A logger to output messages to the user.
    raise_on_error
        If `True`, raises on the first failed check.

    """

    suite = Suite(suite)
    config = get_solver_config().verify

    log_p = partial(log_or_raise, log, raise_on_error)
    log_p(f"Running verification suite {suite.value!r}.", level=logging.DEBUG)

    checks: list[CheckResult] = []

    if suite in (Suite.golden, Suite.all):
        for n in GOLDEN_TERMS:
            checks += _safe(f"golden_P{n}", partial(check_golden, n))

    if suite in (Suite.oracle, Suite.all):
        checks += _safe("oracle_kappa_0_mu_0.6", check_kappa_zero)
        for kappa in (0.3, 0.8):
            checks += _safe(f"oracle_mu_0_kappa_{kappa}", partial(check_mu_zero, kappa))

    if suite == Suite.all:
        rng = numpy.random.default_rng(config.seed)

        checks += _safe(
            "series_termination_n1",
            partial(check_termination, rng, config.termination_samples),
        )
        checks += _safe(
            "constraint_polynomial_equivalence",
            partial(check_equivalence, rng, config.equivalence_samples),
        )

        for case in config.cross_validation:
            checks += _safe(
                f"cross_validation_n{case.n}_mu{case.mu}",
                partial(
                    check_cross_validation,
                    case.n,
                    case.mu,
                    config.wavefunction_samples,
                ),
            )

    for check in checks:
        if check.passed:
            log_p(f"Check {check.name} passed.", level=logging.DEBUG)
        else:
            log_p(f"Check {check.name} failed: {check.measured}", level=logging.ERROR)

    return VerificationReport(
        suite=suite,
        checks=checks,
        timestamp=datetime.now(UTC) if timestamp else None,
    )
