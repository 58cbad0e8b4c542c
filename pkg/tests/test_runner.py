#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: test_runner.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import io
import json

import pytest
from pytest_mock import MockerFixture
from rich.console import Console

from rabiqes.config import Command, RunConfig
from rabiqes.runner import juddian_runner, kappa_grid, qes_runner, scan_runner


async def test_scan_runner_order():
    config = RunConfig(
        command=Command.scan,
        mu=0,
        kappa_min=0,
        kappa_max=1.5,
        steps=7,
        levels=2,
    )

    frame, metadata = await scan_runner(config)

    grid = kappa_grid(0, 1.5, 7)
    assert frame is not None
    assert frame["kappa"].to_list() == grid
    assert frame["e0"].to_list() == pytest.approx([-k**2 for k in grid], abs=1e-8)
    assert frame["e1"].to_list() == pytest.approx([-k**2 for k in grid], abs=1e-8)
    assert frame["converged"].all()
    assert metadata["failed"] == 0


def test_juddian_runner_note():
    config = RunConfig(command=Command.juddian, n=1, mu=1.5)

    frame, metadata = juddian_runner(config)

    assert frame is not None and frame.height == 0
    assert metadata["note"] == "No positive roots of P_1 for mu=1.5."


async def test_qes_runner_note_console(capsys: pytest.CaptureFixture[str]):
    buffer = io.StringIO()
    console = Console(file=buffer, width=200)
    config = RunConfig(command=Command.juddian, n=1, mu=1.5)

    assert await qes_runner(config, console=console) == 0

    assert "No positive roots of P_1 for mu=1.5." in buffer.getvalue()
    assert capsys.readouterr().out.splitlines() == [
        "n,kappa,mu,energy,oracle_gap,multiplicity,n_used"
    ]


async def test_qes_runner_note_logged(
    mocker: MockerFixture,
    capsys: pytest.CaptureFixture[str],
):
    log = mocker.MagicMock()
    config = RunConfig(command=Command.juddian, n=1, mu=1.5, output_format="json")

    assert await qes_runner(config, log=log) == 0

    log.warning.assert_called_once_with("No positive roots of P_1 for mu=1.5.")

    document = json.loads(capsys.readouterr().out)
    assert list(document) == ["n", "mu", "rows"]
    assert document["rows"] == []
