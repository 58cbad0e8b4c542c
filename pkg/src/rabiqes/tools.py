#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: tools.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import json
import math
import os
import pathlib
import sys
from logging import getLogger

from typing import TYPE_CHECKING, Any

import polars

from rabiqes.config import get_solver_config


if TYPE_CHECKING:
    from datetime import datetime


__all__ = [
    "get_fake_logger",
    "format_real",
    "frame_to_csv",
    "frame_to_json",
    "write_output",
    "date_json",
]


def get_fake_logger():
    """Gets a logger with a disabled handler."""

    logger = getLogger(__name__)
    logger.disabled = True

    return logger


def format_real(value: float | None, digits: int | None = None) -> str:
    """Formats a real with ``digits`` significant digits (17 by default).

    Seventeen digits are enough for a double to round-trip exactly.

    """

    if value is None:
        return ""

    if digits is None:
        digits = get_solver_config().output.real_digits

    return f"{value:.{digits}g}"


def frame_to_csv(frame: polars.DataFrame, digits: int | None = None) -> str:
    """Serialises a data frame to CSV.

    ``Float64`` columns are formatted with `.format_real`. Other columns,
    including exact integers stored as strings, are written as they are. Null
    values are written as empty fields.

    """

    float_columns = [
        name for name, dtype in frame.schema.items() if dtype == polars.Float64
    ]

    formatted = frame.with_columns(
        polars.col(name).map_elements(
            lambda value: format_real(value, digits=digits),
            return_dtype=polars.String,
        )
        for name in float_columns
    )

    return formatted.write_csv(line_terminator="\n")


def _json_safe(value: Any) -> Any:
    """Replaces non-finite floats, which are not valid JSON, with `None`."""

    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]

    return value


def frame_to_json(
    frame: polars.DataFrame | None,
    metadata: dict[str, Any] | None = None,
    rows_key: str = "rows",
) -> str:
    """Serialises a data frame and its metadata as a single JSON document.

    Floats are written with their shortest round-trip representation.

    """

    document: dict[str, Any] = dict(metadata or {})
    if frame is not None:
        document[rows_key] = frame.to_dicts()

    return json.dumps(_json_safe(document), indent=2) + "\n"


def write_output(content: str, path: os.PathLike | str | None = None):
    """Writes to a file, or to standard output if ``path`` is `None`."""

    if path is None:
        sys.stdout.write(content)
        sys.stdout.flush()
        return

    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with open(path, "w", encoding="utf-8", newline="\n") as ff:
        ff.write(content)


def date_json(date: datetime | None) -> str | None:
    """Serialises a datetime object to a JSON string."""

    return date.isoformat() if date else None
