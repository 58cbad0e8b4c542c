#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: test_validate.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import json

import numpy
import pytest
from pytest_mock import MockerFixture

from rabiqes.config import Suite
from rabiqes.validate import (
    GOLDEN_TERMS,
    VerificationReport,
    check_cross_validation,
    check_equivalence,
    check_golden,
    check_termination,
    run_suite,
)


def test_check_golden():
    check = check_golden(2)

    assert check.name == "golden_P2"
    assert check.passed
    assert check.measured["terms"] == 6
    assert check.measured["mismatches"] == 0


def test_check_golden_mismatch(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setitem(GOLDEN_TERMS, 1, {(1, 0): 4, (0, 1): 1, (0, 0): 1})

    check = check_golden(1)

    assert not check.passed
    assert check.measured["mismatches"] == 1


def test_check_termination():
    check = check_termination(numpy.random.default_rng(1), 10)

    assert check.passed
    assert check.measured == {"samples": 10, "failures": 0}


def test_check_equivalence():
    check = check_equivalence(numpy.random.default_rng(1), 24)

    assert check.name == "constraint_polynomial_equivalence"
    assert check.passed


def test_check_cross_validation():
    oracle_check, residual_check = check_cross_validation(2, "0.5", 11)

    assert oracle_check.name == "cross_validation_n2_mu0.5"
    assert oracle_check.passed
    assert len(oracle_check.measured["kappa"]) == 2
    assert residual_check.name == "wavefunction_residuals_n2_mu0.5"
    assert residual_check.passed


def test_check_cross_validation_no_roots():
    oracle_check, residual_check = check_cross_validation(1, "1.5", 11)

    assert not oracle_check.passed
    assert not residual_check.passed


def test_run_suite_golden():
    report = run_suite("golden")

    assert report.passed
    assert [check.name for check in report.checks] == [
        "golden_P1",
        "golden_P2",
        "golden_P3",
    ]
    assert report.timestamp is None


def test_run_suite_oracle():
    report = run_suite(Suite.oracle)

    assert report.passed
    assert [check.name for check in report.checks] == [
        "oracle_kappa_0_mu_0.6",
        "oracle_mu_0_kappa_0.3",
        "oracle_mu_0_kappa_0.8",
    ]


def test_run_suite_all():
    report = run_suite(Suite.all)

    assert report.passed, [check for check in report.checks if not check.passed]
    assert len(report.checks) == 14

    names = [check.name for check in report.checks]
    assert "series_termination_n1" in names
    assert "cross_validation_n3_mu0.5" in names
    assert "wavefunction_residuals_n1_mu0.6" in names


def test_run_suite_failure(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setitem(GOLDEN_TERMS, 3, {(3, 0): 384})

    report = run_suite("golden")

    assert not report.passed
    assert [check.passed for check in report.checks] == [True, True, False]


def test_run_suite_raise_on_error(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setitem(GOLDEN_TERMS, 3, {(3, 0): 384})

    with pytest.raises(RuntimeError, match="golden_P3"):
        run_suite("golden", raise_on_error=True)


def test_run_suite_unexpected_error(mocker: MockerFixture):
    mocker.patch(
        "rabiqes.validate.check_kappa_zero",
        side_effect=RuntimeError("boom"),
    )

    report = run_suite("oracle")

    assert not report.passed
    assert report.checks[0].name == "oracle_kappa_0_mu_0.6"
    assert report.checks[0].measured == {"error": "boom"}


def test_report_document():
    document = run_suite("golden").to_document()

    assert list(document) == ["suite", "passed", "checks"]
    assert document["suite"] == "golden"
    assert document["passed"] is True
    assert document["checks"][0]["name"] == "golden_P1"

    json.dumps(document)


def test_report_document_timestamp():
    report = run_suite("golden", timestamp=True)
    document = report.to_document()

    assert report.timestamp is not None
    assert isinstance(document["timestamp"], str)


def test_report_passed_empty():
    assert VerificationReport(suite=Suite.golden).passed
