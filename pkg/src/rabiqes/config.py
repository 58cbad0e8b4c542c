#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: config.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import pathlib
from enum import Enum
from functools import lru_cache

from typing import Any, Self

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)
from pydantic_settings import BaseSettings, SettingsConfigDict

from sdsstools.configuration import Configuration


class Command(str, Enum):
    condition_poly = "condition-poly"
    juddian = "juddian"
    spectrum = "spectrum"
    scan = "scan"
    wavefunction = "wavefunction"
    verify = "verify"


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


class Suite(str, Enum):
    golden = "golden"
    oracle = "oracle"
    all = "all"


class EigenMethod(str, Enum):
    """Backend used by the Fock-basis oracle."""

    jacobi = "jacobi"
    lapack = "lapack"


class EnvironmentSettings(BaseSettings):
    """Options read from ``RABI_QES_*`` environment variables."""

    model_config = SettingsConfigDict(env_prefix="RABI_QES_", extra="ignore")

    nmax: int | None = Field(
        default=None,
        description="Overrides the maximum boson truncation of the oracle.",
    )
    config_file: pathlib.Path | None = Field(
        default=None,
        description="A YAML file merged on top of the internal configuration.",
    )
    debug: bool = Field(
        default=False,
        description="Re-raise errors with their full traceback in the CLI.",
    )


@lru_cache()
def get_internal_config(path: pathlib.Path | str | None = None) -> Configuration:
    """Returns the internal configuration."""

    default_path = pathlib.Path(__file__).parent / "config.yaml"
    envvar_config_file = EnvironmentSettings().config_file

    if path is None and envvar_config_file is not None:
        path = envvar_config_file

    return Configuration(path, base_config=default_path)


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class QESConfig(FrozenModel):
    """Tolerances of the series construction."""

    n_max: int = Field(default=12, ge=1)
    constraint_tolerance: float = Field(default=1e-10, gt=0)
    ode_residual_tolerance: float = Field(default=1e-10, gt=0)
    juddian_tolerance: float = Field(default=1e-8, gt=0)


class RootsConfig(FrozenModel):
    """Root isolation and refinement parameters."""

    bisection_width: float = Field(default=1e-8, gt=0)
    refine_tolerance: float = Field(default=1e-14, gt=0)
    max_iterations: int = Field(default=200, ge=1)


class OracleConfig(FrozenModel):
    """Truncated Fock-basis diagonalisation parameters."""

    method: EigenMethod = EigenMethod.jacobi
    n_start: int = Field(default=16, ge=1)
    n_cap: int = Field(default=4096, ge=1)
    max_sweeps: int = Field(default=50, ge=1)
    offdiag_tolerance: float = Field(default=1e-12, gt=0)
    trace_tolerance: float = Field(default=1e-9, gt=0)
    cluster_window: float = Field(default=1e-6, gt=0)
    convergence_tolerance: float = Field(default=1e-10, gt=0)
    gap_tolerance: float = Field(default=1e-7, gt=0)

    @model_validator(mode="after")
    def validate_after(self) -> Self:
        """Checks that the truncation schedule can start."""

        if self.n_cap < self.n_start:
            raise ValueError("n_cap must be larger or equal than n_start.")

        return self


class OutputConfig(FrozenModel):
    real_digits: int = Field(default=17, ge=1, le=17)


class CrossValidationCase(FrozenModel):
    n: int = Field(ge=1)
    mu: str


class VerifyConfig(FrozenModel):
    """Parameters of the built-in verification suite."""

    seed: int = 42
    equivalence_samples: int = Field(default=200, ge=1)
    termination_samples: int = Field(default=50, ge=1)
    wavefunction_samples: int = Field(default=21, ge=2)
    cross_validation: list[CrossValidationCase] = Field(default_factory=list)


class SolverConfig(FrozenModel):
    """Every fixed constant used by the solvers, in one record."""

    qes: QESConfig = Field(default_factory=QESConfig)
    roots: RootsConfig = Field(default_factory=RootsConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)


@lru_cache()
def get_solver_config(path: pathlib.Path | str | None = None) -> SolverConfig:
    """Returns the validated solver configuration.

    The internal ``config.yaml`` (or the file in ``RABI_QES_CONFIG_FILE``) is
    used as the base. ``RABI_QES_NMAX``, if set, overrides ``oracle.n_cap``.

    """

    internal_config = get_internal_config(path)
    data: dict[str, Any] = {
        section: dict(internal_config.get(section, None) or {})
        for section in SolverConfig.model_fields
    }

    nmax = EnvironmentSettings().nmax
    if nmax is not None:
        data["oracle"]["n_cap"] = nmax
        data["oracle"]["n_start"] = min(data["oracle"].get("n_start", 16), nmax)

    return SolverConfig(**data)


def clear_config_cache():
    """Clears the cached configurations, e.g., after changing the environment."""

    get_internal_config.cache_clear()
    get_solver_config.cache_clear()


class RunConfig(BaseModel):
    """Configuration of a single CLI invocation.

    It is usually generated from the options passed to a CLI command. Fields
    that do not apply to ``command`` are ignored, but the ones it needs are
    validated here.

    """

    model_config = ConfigDict(extra="forbid")

    command: Command = Field(description="The command to run.")
    output_format: OutputFormat = Field(
        default=OutputFormat.csv,
        description="The format of the output.",
    )
    output_path: pathlib.Path | None = Field(
        default=None,
        description="File where to write the output. Standard output if not set.",
    )

    n: int | None = Field(default=None, description="The QES level n = 2j.")
    mu: float | None = Field(default=None, description="Half level splitting.")
    kappa: float | None = Field(default=None, description="Linear coupling.")
    kappa_min: float | None = Field(default=None, description="Scan lower bound.")
    kappa_max: float | None = Field(default=None, description="Scan upper bound.")
    steps: int | None = Field(default=None, description="Number of scan points.")
    levels: int = Field(default=6, description="Number of levels to report.")
    baselines: list[int] = Field(
        default_factory=lambda: [1, 2, 3],
        description="QES levels whose n - kappa^2 baselines are added to scans.",
    )
    tol: float | None = Field(
        default=None,
        description="Oracle convergence tolerance. Defaults to internal value.",
    )
    root: int | None = Field(default=None, description="Root index (ascending).")
    samples: int | None = Field(default=None, description="Number of z samples.")
    suite: Suite | None = Field(default=None, description="Verification suite.")
    timestamp: bool = Field(
        default=False,
        description="Whether to add a timestamp to the verification report.",
    )

    @field_validator("baselines", mode="before")
    @classmethod
    def validate_baselines(cls, value: Any) -> list[int]:
        """Accepts comma-separated strings for the baselines."""

        if value is None:
            return [1, 2, 3]

        if isinstance(value, str):
            return [int(item) for item in value.split(",") if item.strip() != ""]

        return value

    @field_serializer("command", "output_format", "suite")
    def serialize_enums(self, enum: Enum | None) -> str | None:
        """Serialises the enumerations to string."""

        return enum.value if enum is not None else None

    @field_serializer("output_path")
    def serialize_path(self, path: pathlib.Path | None) -> str | None:
        """Serialises the path."""

        return str(path) if path is not None else None

    @model_validator(mode="after")
    def validate_after(self) -> Self:
        """Validates the parameters required by the command."""

        n_max = get_solver_config().qes.n_max

        if self.command == Command.verify:
            if self.suite is None:
                self.suite = Suite.all
            self.output_format = OutputFormat.json
            return self

        if self.command in (Command.condition_poly, Command.juddian):
            self._require("n")
            assert self.n is not None
            if not 1 <= self.n <= n_max:
                raise ValueError(f"n must be between 1 and {n_max}, got {self.n}.")

        if self.command == Command.wavefunction:
            self._require("n", "root", "samples")
            assert self.n is not None and self.root is not None
            if not 1 <= self.n <= n_max:
                raise ValueError(f"n must be between 1 and {n_max}, got {self.n}.")
            if self.root < 0:
                raise ValueError("root must be a non-negative index.")
            if self.samples is None or self.samples < 1:
                raise ValueError("samples must be at least 1.")

        if self.command in (Command.juddian, Command.wavefunction):
            self._require("mu")
            assert self.mu is not None
            if self.mu <= 0:
                raise ValueError("mu must be strictly positive.")

        if self.command in (Command.spectrum, Command.scan):
            self._require("mu")
            assert self.mu is not None
            if self.mu < 0:
                raise ValueError("mu must be non-negative.")
            if self.levels < 1:
                raise ValueError("levels must be at least 1.")

        if self.command == Command.spectrum:
            self._require("kappa")

        if self.command == Command.scan:
            self._require("kappa_min", "kappa_max", "steps")
            assert self.kappa_min is not None and self.kappa_max is not None
            if self.kappa_min < 0:
                raise ValueError("kappa_min must be non-negative.")
            if self.kappa_max < self.kappa_min:
                raise ValueError("kappa_max must be larger than kappa_min.")
            if self.steps is None or self.steps < 2:
                raise ValueError("steps must be at least 2.")
            if any(baseline < 0 for baseline in self.baselines):
                raise ValueError("baselines must be non-negative integers.")

        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive.")

        return self

    def _require(self, *fields: str):
        """Raises if any of the fields is not set."""

        missing = [field for field in fields if getattr(self, field) is None]
        if len(missing) > 0:
            options = ", ".join(f"--{field.replace('_', '-')}" for field in missing)
            raise ValueError(f"{self.command.value} requires {options}.")
