#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: runner.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from fractions import Fraction

from typing import TYPE_CHECKING, Any

import numpy
import polars

from sdsstools.utils import GatheringTaskGroup, run_in_executor

from rabiqes.config import Command, OutputFormat, RunConfig, Suite
from rabiqes.solvers.oracle import (
    EigensolverError,
    JuddianPoint,
    TruncationError,
    converged_spectrum,
    verify_juddian,
)
from rabiqes.solvers.poly import exact_decimal
from rabiqes.solvers.series import (
    ModelParams,
    condition_polynomial,
    juddian_points,
    terminating_series,
    wavefunctions,
)
from rabiqes.tools import frame_to_csv, frame_to_json, get_fake_logger, write_output
from rabiqes.validate import run_suite


if TYPE_CHECKING:
    from rich.console import Console

    from sdsstools.logger import SDSSLogger


__all__ = [
    "RunnerError",
    "RunnerResult",
    "qes_runner",
    "run_command",
    "condition_poly_runner",
    "juddian_runner",
    "spectrum_runner",
    "scan_runner",
    "wavefunction_runner",
    "verify_runner",
]


JUDDIAN_SCHEMA: dict[str, Any] = {
    "n": polars.Int64,
    "kappa": polars.Float64,
    "mu": polars.Float64,
    "energy": polars.Float64,
    "oracle_gap": polars.Float64,
    "multiplicity": polars.Int64,
    "n_used": polars.Int64,
}


class RunnerError(Exception):
    """An error occurred while running a command.

    ``exit_code`` is the code the CLI should exit with. If ``propagate`` is
    `True`, the original exception is re-raised by the CLI.

    """

    def __init__(self, *args, exit_code: int = 1, propagate: bool = False, **kwargs):
        super().__init__(*args, **kwargs)
        self.exit_code = exit_code
        self.propagate = propagate


RunnerResult = tuple[polars.DataFrame | None, dict[str, Any]]


def condition_poly_runner(config: RunConfig) -> RunnerResult:
    """Returns the terms of the condition polynomial, by decreasing degrees.

    Coefficients are exact integers, kept as decimal strings.

    """

    assert config.n is not None

    terms = condition_polynomial(config.n).terms()
    frame = polars.DataFrame(
        {
            "du": [du for du, _, _ in terms],
            "dw": [dw for _, dw, _ in terms],
            "coeff": [str(coeff.numerator) for _, _, coeff in terms],
        },
        schema={"du": polars.Int64, "dw": polars.Int64, "coeff": polars.String},
    )

    return frame, {"n": config.n}


def juddian_runner(config: RunConfig, log: SDSSLogger | None = None) -> RunnerResult:
    """Finds the Juddian points at fixed ``mu`` and checks them with the oracle."""

    assert config.n is not None and config.mu is not None
    log = log or get_fake_logger()

    roots = juddian_points(config.n, config.mu)
    log.debug(f"Found {len(roots)} positive roots for n={config.n}, mu={config.mu}.")

    points: list[JuddianPoint] = []
    for root in roots:
        try:
            point = verify_juddian(config.n, root.params, tol=config.tol, log=log)
        except (EigensolverError, TruncationError) as err:
            raise RunnerError(f"Oracle failed at kappa={root.kappa}: {err}") from err

        points.append(point)

    metadata: dict[str, Any] = {"n": config.n, "mu": config.mu}
    if len(points) == 0:
        metadata["note"] = f"No positive roots of P_{config.n} for mu={config.mu}."

    frame = polars.DataFrame(
        [point.model_dump() for point in points],
        schema=JUDDIAN_SCHEMA,
    )

    return frame, metadata


def spectrum_runner(config: RunConfig, log: SDSSLogger | None = None) -> RunnerResult:
    """Returns the converged lowest levels at a single coupling."""

    assert config.kappa is not None and config.mu is not None

    params = ModelParams(kappa=config.kappa, mu=config.mu)
    try:
        result = converged_spectrum(params, config.levels, tol=config.tol, log=log)
    except (EigensolverError, TruncationError) as err:
        raise RunnerError(str(err)) from err

    eigenvalues = result.lowest(config.levels).tolist()
    frame = polars.DataFrame(
        {"level": list(range(len(eigenvalues))), "energy": eigenvalues},
        schema={"level": polars.Int64, "energy": polars.Float64},
    )

    metadata = {
        "kappa": config.kappa,
        "mu": config.mu,
        "n_used": result.n_used,
        "converged_count": result.converged_count,
        "tol": result.tol,
        "eigenvalues": eigenvalues,
    }

    return frame, metadata


def kappa_grid(kappa_min: float, kappa_max: float, steps: int) -> list[float]:
    """Returns ``steps`` equally spaced couplings, endpoints included.

    The grid is computed in rational arithmetic from the decimal bounds so that
    points such as ``0.4`` are hit exactly.

    """

    lo, hi = exact_decimal(kappa_min), exact_decimal(kappa_max)

    return [float(lo + (hi - lo) * Fraction(ii, steps - 1)) for ii in range(steps)]


def _scan_point(
    kappa: float,
    mu: float,
    levels: int,
    tol: float | None,
) -> list[float] | None:
    try:
        result = converged_spectrum(ModelParams(kappa=kappa, mu=mu), levels, tol=tol)
    except (EigensolverError, TruncationError):
        return None

    return result.lowest(levels).tolist()


async def scan_runner(
    config: RunConfig,
    log: SDSSLogger | None = None,
) -> RunnerResult:
    """Computes the lowest levels over a grid of couplings.

    Grid points are solved concurrently; rows are returned in grid order. Points
    where the oracle fails are flagged with ``converged=false`` and empty
    eigenvalue columns.

    """

    assert config.mu is not None and config.steps is not None
    assert config.kappa_min is not None and config.kappa_max is not None

    log = log or get_fake_logger()
    mu = config.mu

    grid = kappa_grid(config.kappa_min, config.kappa_max, config.steps)

    async with GatheringTaskGroup() as group:
        for kappa in grid:
            group.create_task(
                run_in_executor(_scan_point, kappa, mu, config.levels, config.tol)
            )

    spectra: list[list[float] | None] = group.results()

    energy_columns = [f"e{ii}" for ii in range(config.levels)]
    baseline_columns = [f"qes_{n}" for n in config.baselines]

    data: dict[str, list] = {"kappa": grid}
    for ii, column in enumerate(energy_columns):
        data[column] = [None if ss is None else ss[ii] for ss in spectra]
    for n, column in zip(config.baselines, baseline_columns):
        data[column] = [n - kappa**2 for kappa in grid]
    data["converged"] = [ss is not None for ss in spectra]

    schema: dict[str, Any] = {
        "kappa": polars.Float64,
        **{column: polars.Float64 for column in energy_columns + baseline_columns},
        "converged": polars.Boolean,
    }
    frame = polars.DataFrame(data, schema=schema)

    n_failed = sum(1 for ss in spectra if ss is None)
    if n_failed > 0:
        log.warning(f"The oracle failed to converge at {n_failed} grid points.")

    return frame, {"mu": mu, "levels": config.levels, "failed": n_failed}


def wavefunction_runner(config: RunConfig) -> RunnerResult:
    """Samples the Bargmann wavefunctions of a Juddian solution.

    The coupling is the root ``config.root`` of the condition polynomial, in
    increasing ``kappa`` order. ``z`` covers ``[-2 kappa, 2 kappa]``; a single
    sample is placed at ``z = 0``.

    """

    assert config.n is not None and config.mu is not None
    assert config.root is not None and config.samples is not None

    roots = juddian_points(config.n, config.mu)
    if config.root >= len(roots):
        raise RunnerError(
            f"Root index {config.root} out of range: "
            f"P_{config.n} has {len(roots)} positive roots for mu={config.mu}.",
            exit_code=2,
        )

    root = roots[config.root]
    pair = wavefunctions(terminating_series(config.n, root.params))

    if config.samples == 1:
        zz = numpy.array([0.0])
    else:
        zz = numpy.linspace(-2 * root.kappa, 2 * root.kappa, config.samples)

    residual_a, residual_b = pair.residuals(zz)

    frame = polars.DataFrame(
        {
            "z": zz,
            "psi1": pair.psi1(zz),
            "psi2": pair.psi2(zz),
            "residual3a": residual_a,
            "residual3b": residual_b,
        }
    )

    metadata = {
        "n": config.n,
        "mu": config.mu,
        "root": config.root,
        "kappa": root.kappa,
        "energy": root.energy,
    }

    return frame, metadata


def verify_runner(
    config: RunConfig,
    log: SDSSLogger | None = None,
) -> tuple[dict[str, Any], bool]:
    """Runs a verification suite and returns the report and whether it passed."""

    report = run_suite(
        config.suite or Suite.all,
        timestamp=config.timestamp,
        log=log,
    )

    return report.to_document(), report.passed


async def run_command(config: RunConfig, log: SDSSLogger | None = None) -> RunnerResult:
    """Runs the command in a `.RunConfig` and returns its table and metadata."""

    if config.command == Command.condition_poly:
        return condition_poly_runner(config)
    elif config.command == Command.juddian:
        return juddian_runner(config, log=log)
    elif config.command == Command.spectrum:
        return spectrum_runner(config, log=log)
    elif config.command == Command.scan:
        return await scan_runner(config, log=log)
    elif config.command == Command.wavefunction:
        return wavefunction_runner(config)

    raise RunnerError(f"Command {config.command.value!r} has no table output.")


def render(
    config: RunConfig,
    frame: polars.DataFrame | None,
    metadata: dict[str, Any],
) -> str:
    """Renders a command output as CSV or JSON."""

    if config.output_format == OutputFormat.csv:
        assert frame is not None
        return frame_to_csv(frame)

    if config.command == Command.condition_poly:
        return frame_to_json(frame, metadata, rows_key="terms")
    elif config.command == Command.spectrum:
        return frame_to_json(None, metadata)

    return frame_to_json(frame, metadata)


async def qes_runner(
    config: RunConfig,
    log: SDSSLogger | None = None,
    console: Console | None = None,
) -> int:
    """Runs a command and writes its output. Returns the process exit code.

    Parameters
    ----------
    config
        The validated run configuration.
    log
        The logger to use. If `None`, messages are discarded.
    console
        A stderr console for notes about the result, such as an empty table.
        If `None`, notes are logged as warnings.

    Raises
    ------
    RunnerError
        If the command fails. ``exit_code`` is 2 for invalid inputs detected
        while running and 1 otherwise.

    """

    log = log or get_fake_logger()
    log.debug(f"Running command {config.command.value!r}.")

    if config.command == Command.verify:
        document, passed = verify_runner(config, log=log)
        write_output(frame_to_json(None, document), config.output_path)

        if not passed:
            log.error("Verification failed.")
            return 1

        return 0

    try:
        frame, metadata = await run_command(config, log=log)
    except RunnerError:
        raise
    except Exception as err:
        raise RunnerError(f"Error running {config.command.value}: {err}") from err

    note = metadata.pop("note", None)
    write_output(render(config, frame, metadata), config.output_path)

    if note is not None:
        if console is not None:
            console.print(note)
        else:
            log.warning(note)

    if config.output_path is not None:
        log.info(f"Output written to {config.output_path!s}.")

    return 0
