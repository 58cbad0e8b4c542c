#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: conftest.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import pathlib

import pytest

from rabiqes.config import clear_config_cache


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch: pytest.MonkeyPatch):
    """Removes ``RABI_QES_*`` variables and resets the cached configuration."""

    for variable in ("RABI_QES_NMAX", "RABI_QES_CONFIG_FILE", "RABI_QES_DEBUG"):
        monkeypatch.delenv(variable, raising=False)

    clear_config_cache()
    yield
    clear_config_cache()


@pytest.fixture()
def config_file(tmp_path: pathlib.Path, monkeypatch: pytest.MonkeyPatch):
    """Returns a function that writes a configuration override and activates it."""

    def _write(content: str) -> pathlib.Path:
        path = tmp_path / "rabiqes.yaml"
        path.write_text(content)

        monkeypatch.setenv("RABI_QES_CONFIG_FILE", str(path))
        clear_config_cache()

        return path

    return _write
