#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: __main__.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import asyncio
import pathlib
from functools import wraps

from typing import Annotated, Any, Optional

import typer
from rich.console import Console
from typer import Option
from typer.core import TyperGroup

from rabiqes.config import Command, Suite


err_console = Console(stderr=True)


def cli_coro():
    """Decorator function that allows defining coroutines with click."""

    def decorator_cli_coro(f):
        @wraps(f)
        def wrapper(*args, **kwargs):
            try:
                loop = asyncio.get_running_loop()
            except RuntimeError:
                return asyncio.run(f(*args, **kwargs))

            return loop.create_task(f(*args, **kwargs))

        return wrapper

    return decorator_cli_coro


class NaturalOrderGroup(TyperGroup):
    """A Typer group that lists commands in order of definition."""

    def list_commands(self, ctx):
        return self.commands.keys()


cli = typer.Typer(
    cls=NaturalOrderGroup,
    rich_markup_mode="rich",
    context_settings={"obj": {}},
    no_args_is_help=True,
    help="Quasi-exact solutions of the Rabi Hamiltonian.",
)


def version_callback(value: bool):
    from rabiqes import __version__

    if value:
        typer.echo(f"rabiqes {__version__}")
        raise typer.Exit()


@cli.callback()
def main(
    version: Annotated[
        Optional[bool],
        Option(
            "--version",
            "-V",
            help="Show the version and exit.",
            is_eager=True,
            callback=version_callback,
        ),
    ] = None,
):
    """Quasi-exact solutions of the Rabi Hamiltonian."""

    pass


#
# Options shared by all commands.
#

JSONOption = Annotated[
    bool,
    Option(
        "--json",
        help="Output JSON instead of CSV.",
        rich_help_panel="Output",
    ),
]
OutOption = Annotated[
    Optional[pathlib.Path],
    Option(
        "--out",
        "-o",
        dir_okay=False,
        help="File where to write the output. Defaults to standard output.",
        rich_help_panel="Output",
    ),
]
VerboseOption = Annotated[
    bool,
    Option(
        "--verbose",
        "-v",
        help="Outputs additional information to stderr.",
        rich_help_panel="Logging",
    ),
]
QuietOption = Annotated[
    bool,
    Option(
        "--quiet",
        "-q",
        help="Only log errors.",
        rich_help_panel="Logging",
    ),
]
TracebackOption = Annotated[
    bool,
    Option(
        "--with-traceback",
        help="Show the full traceback in case of an error. If not set, only "
        "the error message is shown.",
        show_default=False,
        rich_help_panel="Logging",
    ),
]

NOption = Annotated[Optional[int], Option("--n", "-n", help="The QES level n = 2j.")]
MuOption = Annotated[Optional[float], Option("--mu", help="Half the level splitting.")]
TolOption = Annotated[
    Optional[float],
    Option("--tol", help="Oracle convergence tolerance. Defaults to internal value."),
]
LevelsOption = Annotated[
    Optional[int],
    Option("--levels", "-k", help="Number of levels to report. [default: 6]"),
]


def _format_validation_error(err: Any) -> str:
    """Returns a compact message from a pydantic ``ValidationError``."""

    messages = []
    for error in err.errors():
        message = str(error["msg"]).removeprefix("Value error, ")
        location = ".".join(str(item) for item in error.get("loc", ()))
        messages.append(f"{location}: {message}" if location else message)

    return "; ".join(messages)


async def _run(
    command: Command,
    json_output: bool = False,
    out: pathlib.Path | None = None,
    verbose: bool = False,
    quiet: bool = False,
    with_traceback: bool = False,
    **params,
):
    """Validates the options, runs the command, and exits with its code."""

    from pydantic import ValidationError

    from sdsstools.logger import get_logger

    from rabiqes.config import EnvironmentSettings, RunConfig
    from rabiqes.runner import RunnerError, qes_runner

    log = get_logger("rabiqes", use_rich_handler=True)
    log.setLevel(5)

    # Standard output is reserved for the data.
    if log.rich_console is not None:
        log.rich_console.stderr = True

    log.sh.setLevel(10 if verbose else (40 if quiet else 30))

    debug = with_traceback or EnvironmentSettings().debug

    try:
        config = RunConfig(
            command=command,
            output_format="json" if json_output else "csv",
            output_path=out,
            **{key: value for key, value in params.items() if value is not None},
        )
    except ValidationError as err:
        err_console.print(f"[red]Invalid options:[/] {_format_validation_error(err)}")
        raise typer.Exit(2)

    try:
        exit_code = await qes_runner(config, log=log, console=err_console)
    except Exception as err:
        log.sh.setLevel(10000)
        log.exception(f"Error raised running {command.value}.", exc_info=err)

        err_console.print(f"[red]{command.value} failed:[/] {err}")

        if (isinstance(err, RunnerError) and err.propagate) or debug:
            raise

        raise typer.Exit(err.exit_code if isinstance(err, RunnerError) else 1)

    raise typer.Exit(exit_code)


@cli.command("condition-poly")
@cli_coro()
async def condition_poly(
    n: NOption = None,
    json_output: JSONOption = False,
    out: OutOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    with_traceback: TracebackOption = False,
):
    """Prints the exact condition polynomial [green]P_n(u, w)[/].

    [green]u[/] is kappa^2 and [green]w[/] is mu^2. Coefficients are exact integers.

    """

    await _run(
        Command.condition_poly,
        json_output=json_output,
        out=out,
        verbose=verbose,
        quiet=quiet,
        with_traceback=with_traceback,
        n=n,
    )


@cli.command("juddian")
@cli_coro()
async def juddian(
    n: NOption = None,
    mu: MuOption = None,
    tol: TolOption = None,
    json_output: JSONOption = False,
    out: OutOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    with_traceback: TracebackOption = False,
):
    """Finds the Juddian points of level n at fixed mu and checks them."""

    await _run(
        Command.juddian,
        json_output=json_output,
        out=out,
        verbose=verbose,
        quiet=quiet,
        with_traceback=with_traceback,
        n=n,
        mu=mu,
        tol=tol,
    )


@cli.command("spectrum")
@cli_coro()
async def spectrum(
    kappa: Annotated[
        Optional[float],
        Option("--kappa", help="Linear coupling."),
    ] = None,
    mu: MuOption = None,
    levels: LevelsOption = None,
    tol: TolOption = None,
    json_output: JSONOption = False,
    out: OutOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    with_traceback: TracebackOption = False,
):
    """Computes the lowest levels in a truncated Fock basis."""

    await _run(
        Command.spectrum,
        json_output=json_output,
        out=out,
        verbose=verbose,
        quiet=quiet,
        with_traceback=with_traceback,
        kappa=kappa,
        mu=mu,
        levels=levels,
        tol=tol,
    )


@cli.command("scan")
@cli_coro()
async def scan(
    mu: MuOption = None,
    kappa_min: Annotated[
        Optional[float],
        Option("--kappa-min", help="Lower bound of the coupling grid."),
    ] = None,
    kappa_max: Annotated[
        Optional[float],
        Option("--kappa-max", help="Upper bound of the coupling grid."),
    ] = None,
    steps: Annotated[
        Optional[int],
        Option("--steps", help="Number of grid points, endpoints included."),
    ] = None,
    levels: LevelsOption = None,
    baselines: Annotated[
        Optional[str],
        Option(
            "--baselines",
            help="Comma-separated levels n whose n - kappa^2 lines are added.",
        ),
    ] = None,
    tol: TolOption = None,
    json_output: JSONOption = False,
    out: OutOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    with_traceback: TracebackOption = False,
):
    """Scans the lowest levels over a grid of couplings."""

    await _run(
        Command.scan,
        json_output=json_output,
        out=out,
        verbose=verbose,
        quiet=quiet,
        with_traceback=with_traceback,
        mu=mu,
        kappa_min=kappa_min,
        kappa_max=kappa_max,
        steps=steps,
        levels=levels,
        baselines=baselines,
        tol=tol,
    )


@cli.command("wavefunction")
@cli_coro()
async def wavefunction(
    n: NOption = None,
    mu: MuOption = None,
    root: Annotated[
        Optional[int],
        Option("--root", help="Index of the root, in increasing kappa."),
    ] = None,
    samples: Annotated[
        Optional[int],
        Option("--samples", help="Number of samples in [-2 kappa, 2 kappa]."),
    ] = None,
    json_output: JSONOption = False,
    out: OutOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    with_traceback: TracebackOption = False,
):
    """Samples the Bargmann wavefunctions at a Juddian point."""

    await _run(
        Command.wavefunction,
        json_output=json_output,
        out=out,
        verbose=verbose,
        quiet=quiet,
        with_traceback=with_traceback,
        n=n,
        mu=mu,
        root=root,
        samples=samples,
    )


@cli.command("verify")
@cli_coro()
async def verify(
    suite: Annotated[
        Suite,
        Option("--suite", help="The verification suite to run."),
    ] = Suite.all,
    timestamp: Annotated[
        bool,
        Option("--timestamp", help="Add the current time to the report."),
    ] = False,
    out: OutOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    with_traceback: TracebackOption = False,
):
    """Runs a verification suite and outputs a JSON report.

    Exits with code 1 if any of the checks fails.

    """

    await _run(
        Command.verify,
        json_output=True,
        out=out,
        verbose=verbose,
        quiet=quiet,
        with_traceback=with_traceback,
        suite=suite,
        timestamp=timestamp,
    )


if __name__ == "__main__":
    cli()
