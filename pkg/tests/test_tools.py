#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: test_tools.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import json
import pathlib
from datetime import UTC, datetime

import polars
import pytest

from rabiqes.tools import (
    date_json,
    format_real,
    frame_to_csv,
    frame_to_json,
    write_output,
)


def test_format_real():
    assert format_real(0.1) == "0.10000000000000001"
    assert format_real(1.0) == "1"
    assert format_real(1 / 3, digits=5) == "0.33333"
    assert format_real(None) == ""


def test_format_real_round_trip():
    for value in (0.84, 2.385288242540, -1e-300, 123456789.123):
        assert float(format_real(value)) == value


def test_frame_to_csv():
    frame = polars.DataFrame(
        {"a": [1.0, None], "b": ["x", "y"], "c": [1, 2]},
        schema={"a": polars.Float64, "b": polars.String, "c": polars.Int64},
    )

    assert frame_to_csv(frame) == "a,b,c\n1,x,1\n,y,2\n"


def test_frame_to_json():
    frame = polars.DataFrame({"z": [0.5], "psi": [float("nan")]})
    document = json.loads(frame_to_json(frame, {"n": 1}))

    assert document == {"n": 1, "rows": [{"z": 0.5, "psi": None}]}


def test_frame_to_json_metadata_only():
    text = frame_to_json(None, {"eigenvalues": [0.84, float("inf")]})

    assert text.endswith("\n")
    assert json.loads(text) == {"eigenvalues": [0.84, None]}


def test_write_output_stdout(capsys: pytest.CaptureFixture[str]):
    write_output("a,b\n")

    assert capsys.readouterr().out == "a,b\n"


def test_write_output_file(tmp_path: pathlib.Path):
    path = tmp_path / "sub" / "out.csv"
    write_output("a,b\n1,2\n", path)

    assert path.read_bytes() == b"a,b\n1,2\n"


def test_date_json():
    date = datetime(2026, 10, 19, 12, 0, 0, tzinfo=UTC)

    assert date_json(date) == "2026-10-19T12:00:00+00:00"
    assert date_json(None) is None
