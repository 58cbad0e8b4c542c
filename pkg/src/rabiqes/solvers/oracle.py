#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-19
# @Filename: oracle.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

from typing import TYPE_CHECKING

import numpy
from pydantic import BaseModel, ConfigDict, Field, model_validator

from rabiqes.config import EigenMethod, get_solver_config
from rabiqes.solvers.series import ModelParams, QESIndex, juddian_constraint
from rabiqes.tools import get_fake_logger


if TYPE_CHECKING:
    from sdsstools.logger import SDSSLogger


__all__ = [
    "TruncatedHamiltonian",
    "SpectrumResult",
    "JuddianPoint",
    "EigensolverError",
    "TruncationError",
    "NotJuddianError",
    "build_hamiltonian",
    "eig_symmetric",
    "converged_spectrum",
    "verify_juddian",
]


class EigensolverError(RuntimeError):
    """Raised when the diagonalisation fails or does not converge."""

    pass


class TruncationError(RuntimeError):
    """Raised when the spectrum does not stabilise below the truncation cap.

    The best result obtained is available as ``result``.

    """

    def __init__(self, *args, result: SpectrumResult | None = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.result = result


class NotJuddianError(ValueError):
    """Raised when the parameters do not satisfy the Juddian constraint."""

    pass


@dataclass(frozen=True)
class TruncatedHamiltonian:
    """The Rabi Hamiltonian in the Fock basis truncated at ``N`` bosons.

    The basis index is ``i = 2 * n_boson + s`` where ``s = 0, 1`` are the spin
    states with ``sigma_3 = +1, -1``.

    """

    params: ModelParams
    N: int
    entries: numpy.ndarray

    @property
    def dim(self) -> int:
        return 2 * (self.N + 1)

    @property
    def trace(self) -> float:
        return float(numpy.trace(self.entries))


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues of a truncated Hamiltonian, in ascending order."""

    eigenvalues: numpy.ndarray
    n_used: int
    converged_count: int
    tol: float
    eigenvectors: numpy.ndarray | None = None

    def __post_init__(self):
        if self.converged_count > len(self.eigenvalues):
            raise ValueError("converged_count exceeds the number of eigenvalues.")

    def lowest(self, k: int) -> numpy.ndarray:
        return self.eigenvalues[:k]


class JuddianPoint(BaseModel):
    """A Juddian energy checked against the Fock-basis spectrum."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    kappa: float
    mu: float
    energy: float
    oracle_gap: float = Field(ge=0)
    multiplicity: int = Field(ge=0)
    n_used: int

    @model_validator(mode="after")
    def check_energy(self):
        expected = self.n - self.kappa**2
        if not math.isclose(self.energy, expected, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError("Juddian energy must equal n - kappa^2.")

        return self


def build_hamiltonian(params: ModelParams, N: int) -> TruncatedHamiltonian:
    """Builds the Hamiltonian matrix truncated at ``N`` bosons.

    The elements are ``<n,s|H|n,s> = n``, ``<n,s|H|n,1-s> = mu`` and
    ``<n+1,s|H|n,s> = (-1)^s kappa sqrt(n+1)``.

    """

    if N < 1:
        raise ValueError("The boson truncation must be at least 1.")

    kappa = float(params.kappa)
    mu = float(params.mu)

    dim = 2 * (N + 1)
    entries = numpy.zeros((dim, dim), dtype=numpy.float64)

    bosons = numpy.arange(N + 1)
    up = 2 * bosons
    down = up + 1

    entries[up, up] = bosons
    entries[down, down] = bosons
    entries[up, down] = mu
    entries[down, up] = mu

    lower = numpy.arange(N)
    amplitude = kappa * numpy.sqrt(lower + 1)
    for spin, sign in ((0, 1.0), (1, -1.0)):
        rows = 2 * (lower + 1) + spin
        cols = 2 * lower + spin
        entries[rows, cols] = sign * amplitude
        entries[cols, rows] = sign * amplitude

    assert numpy.array_equal(entries, entries.T), "Hamiltonian is not symmetric."

    return TruncatedHamiltonian(params=params, N=N, entries=entries)


@lru_cache(maxsize=32)
def _round_robin(dim: int) -> tuple[tuple[numpy.ndarray, numpy.ndarray], ...]:
    """Returns the rounds of disjoint ``(p, q)`` pairs covering all ``p < q``."""

    players = list(range(dim)) + ([-1] if dim % 2 == 1 else [])
    size = len(players)

    rounds = []
    for _ in range(size - 1):
        matches = [(players[ii], players[size - 1 - ii]) for ii in range(size // 2)]
        pairs = [
            (min(aa, bb), max(aa, bb)) for aa, bb in matches if aa >= 0 and bb >= 0
        ]

        p_index = numpy.array([pair[0] for pair in pairs], dtype=numpy.intp)
        q_index = numpy.array([pair[1] for pair in pairs], dtype=numpy.intp)
        p_index.setflags(write=False)
        q_index.setflags(write=False)
        rounds.append((p_index, q_index))

        players = [players[0], players[-1]] + players[1:-1]

    return tuple(rounds)


def _off_norm(matrix: numpy.ndarray) -> float:
    return float(numpy.linalg.norm(matrix - numpy.diag(numpy.diag(matrix))))


def _jacobi(
    matrix: numpy.ndarray,
    eigenvectors: bool,
    max_sweeps: int,
    offdiag_tolerance: float,
) -> tuple[numpy.ndarray, numpy.ndarray | None]:
    """Cyclic Jacobi diagonalisation with a round-robin ordering.

    Each round applies a set of rotations on disjoint index pairs at once.

    """

    aa = matrix.astype(numpy.float64, copy=True)
    dim = aa.shape[0]
    vv = numpy.eye(dim) if eigenvectors else None

    threshold = offdiag_tolerance * float(numpy.linalg.norm(aa))
    rounds = _round_robin(dim)

    for _ in range(max_sweeps):
        if _off_norm(aa) <= threshold:
            break

        for p_index, q_index in rounds:
            apq = aa[p_index, q_index]
            active = apq != 0
            if not active.any():
                continue

            pp = p_index[active]
            qq = q_index[active]
            apq = apq[active]

            theta = (aa[qq, qq] - aa[pp, pp]) / (2 * apq)
            sign = numpy.where(theta >= 0, 1.0, -1.0)
            tt = sign / (numpy.abs(theta) + numpy.hypot(theta, 1.0))
            cc = 1.0 / numpy.sqrt(tt**2 + 1)
            ss = tt * cc

            col_p = aa[:, pp].copy()
            col_q = aa[:, qq].copy()
            aa[:, pp] = cc * col_p - ss * col_q
            aa[:, qq] = ss * col_p + cc * col_q

            row_p = aa[pp, :].copy()
            row_q = aa[qq, :].copy()
            aa[pp, :] = cc[:, None] * row_p - ss[:, None] * row_q
            aa[qq, :] = ss[:, None] * row_p + cc[:, None] * row_q

            aa[pp, qq] = 0.0
            aa[qq, pp] = 0.0

            if vv is not None:
                vec_p = vv[:, pp].copy()
                vec_q = vv[:, qq].copy()
                vv[:, pp] = cc * vec_p - ss * vec_q
                vv[:, qq] = ss * vec_p + cc * vec_q

    else:
        if _off_norm(aa) > threshold:
            raise EigensolverError("eigensolver did not converge")

    return numpy.diag(aa).copy(), vv


def eig_symmetric(
    hamiltonian: TruncatedHamiltonian | numpy.ndarray,
    eigenvectors: bool = False,
    method: EigenMethod | str | None = None,
) -> SpectrumResult:
    """Returns all the eigenvalues of a symmetric matrix, in ascending order.

    Parameters
    ----------
    hamiltonian
        The truncated Hamiltonian, or a bare symmetric matrix.
    eigenvectors
        If `True`, accumulates the rotations and returns the eigenvectors as
        the columns of ``SpectrumResult.eigenvectors``.
    method
        ``jacobi`` (default) uses the built-in cyclic Jacobi solver. ``lapack``
        delegates to `numpy.linalg.eigh`.

    Raises
    ------
    EigensolverError
        If the Jacobi sweeps do not converge or the trace is not preserved.

    """

    config = get_solver_config().oracle
    method = EigenMethod(method or config.method)

    if isinstance(hamiltonian, TruncatedHamiltonian):
        matrix = hamiltonian.entries
        n_used = hamiltonian.N
    else:
        matrix = numpy.asarray(hamiltonian, dtype=numpy.float64)
        n_used = matrix.shape[0] // 2 - 1

    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 2:
        raise ValueError("A square matrix of dimension at least 2 is required.")

    if not numpy.array_equal(matrix, matrix.T):
        raise ValueError("The matrix is not symmetric.")

    vectors: numpy.ndarray | None = None
    if method == EigenMethod.lapack:
        if eigenvectors:
            values, vectors = numpy.linalg.eigh(matrix)
        else:
            values = numpy.linalg.eigvalsh(matrix)
    else:
        values, vectors = _jacobi(
            matrix,
            eigenvectors,
            config.max_sweeps,
            config.offdiag_tolerance,
        )

    trace = float(numpy.trace(matrix))
    if abs(float(values.sum()) - trace) > config.trace_tolerance * max(1, abs(trace)):
        raise EigensolverError("Eigenvalue sum does not match the matrix trace.")

    order = numpy.argsort(values, kind="stable")
    values = values[order]
    if vectors is not None:
        vectors = vectors[:, order]

    return SpectrumResult(
        eigenvalues=values,
        n_used=n_used,
        converged_count=len(values),
        tol=config.offdiag_tolerance,
        eigenvectors=vectors,
    )


def converged_spectrum(
    params: ModelParams,
    k: int,
    tol: float | None = None,
    method: EigenMethod | str | None = None,
    n_start: int | None = None,
    n_cap: int | None = None,
    log: SDSSLogger | None = None,
) -> SpectrumResult:
    """Returns the ``k`` lowest eigenvalues, converged in the boson truncation.

    The truncation starts at ``n_start`` and is doubled until the ``k`` lowest
    eigenvalues change by less than ``tol`` between successive truncations.

    Raises
    ------
    TruncationError
        If the truncation would exceed ``n_cap``. The exception carries the best
        result obtained.

    """

    if k < 1:
        raise ValueError("k must be at least 1.")

    config = get_solver_config().oracle
    log = log or get_fake_logger()

    tol = tol if tol is not None else config.convergence_tolerance
    n_start = n_start or config.n_start
    n_cap = n_cap or config.n_cap

    N = min(max(n_start, math.ceil(k / 2) - 1, 1), n_cap)
    previous: SpectrumResult | None = None

    while True:
        result = eig_symmetric(build_hamiltonian(params, N), method=method)

        if previous is not None:
            changes = numpy.abs(result.lowest(k) - previous.lowest(k))
            change = float(changes.max())
            log.debug(f"N={N}: largest change in the lowest {k} levels is {change:.3g}")

            if change < tol:
                return replace(result, converged_count=k, tol=tol)

            stable = numpy.flatnonzero(changes >= tol)
            converged_count = int(stable[0]) if len(stable) > 0 else k
        else:
            converged_count = 0

        best = replace(result, converged_count=converged_count, tol=tol)

        if N >= n_cap:
            raise TruncationError(
                f"Spectrum did not converge below the truncation cap N={n_cap}.",
                result=best,
            )

        previous = result
        N = min(2 * N, n_cap)


def verify_juddian(
    n: int | QESIndex,
    params: ModelParams,
    tol: float | None = None,
    method: EigenMethod | str | None = None,
    log: SDSSLogger | None = None,
) -> JuddianPoint:
    """Checks a Juddian energy ``n - kappa^2`` against the Fock spectrum.

    Each eigenvalue lies within ``mu`` of the decoupled spectrum ``m - kappa^2``
    (twice degenerate), so enough levels are converged to cover all the ones
    that can approach ``n - kappa^2``.

    Raises
    ------
    NotJuddianError
        If the parameters do not satisfy the constraint for level ``n``.

    """

    level = n.n if isinstance(n, QESIndex) else int(n)
    config = get_solver_config()

    residual = juddian_constraint(level, params)
    if abs(residual) > config.qes.juddian_tolerance:
        raise NotJuddianError("not a Juddian point")

    energy = float(level - params.u)
    k = 2 * (level + math.ceil(float(params.mu)) + 1) + 2

    spectrum = converged_spectrum(params, k, tol=tol, method=method, log=log)
    distances = numpy.abs(spectrum.lowest(k) - energy)

    window = config.oracle.cluster_window * max(1.0, abs(energy))

    return JuddianPoint(
        n=level,
        kappa=float(params.kappa),
        mu=float(params.mu),
        energy=energy,
        oracle_gap=float(distances.min()),
        multiplicity=int((distances <= window).sum()),
        n_used=spectrum.n_used,
    )
