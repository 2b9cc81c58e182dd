"""Finite-difference assembly and Hermitian eigensolution.

The second-order stencil (-1, 2, -1)/h^2 plus diag(V) realizes
-d^2/dx^2 + V on a grid.  Dirichlet data lives on standard grids (interior
points, implicit zero endpoints); quasi-periodic data lives on wrap grids,
where the identification b ~ a makes the wrap link span exactly one mesh
step and the two corner entries -e^{-i alpha}/h^2, -e^{+i alpha}/h^2 close
the stencil.  General-U conditions are not discretized here; those
extensions are reached through the analytic layer in
:mod:`spectra.extension_theory`.

Singular potentials are handled by never sampling the singular point: the
half-line problems are truncated to (0, L] with the first point one mesh
step from the origin, and symmetric mirrored problems use an even point
count so the origin falls between two samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .core import (
    BoundaryCondition,
    Dirichlet,
    DomainError,
    GeneralU,
    Grid,
    Interval,
    NumericalError,
    QuasiPeriodic,
    Spectrum,
)

_DEGENERACY_RTOL = 1e-8


class Potential:
    """Base for potential terms; subclasses evaluate on grid points."""

    singular_points: tuple[float, ...] = ()

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def validate(self, grid: Grid) -> None:
        for s in self.singular_points:
            if np.min(np.abs(grid.points - s)) < 0.25 * grid.h:
                raise DomainError(f"grid samples the singular point x = {s}")


@dataclass(frozen=True)
class ZeroPotential(Potential):
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class CalogeroPotential(Potential):
    """x^2 + gamma/x^2, singular at the origin."""

    gamma: float
    singular_points = (0.0,)

    def __post_init__(self) -> None:
        if not self.gamma > -0.25:
            raise DomainError("need gamma > -1/4")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x**2 + self.gamma / x**2


@dataclass(frozen=True)
class CentrifugalPotential(Potential):
    """n(n-1)/x^2 for integer n >= 2; x^n is its generalized zero mode."""

    n: int
    singular_points = (0.0,)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError("need n >= 2")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.n * (self.n - 1) / x**2


@dataclass(frozen=True)
class PeriodicCellPotential(Potential):
    """Continuous single-cell potential on [0, pi] vanishing at both endpoints."""

    func: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self) -> None:
        ends = np.asarray(self.func(np.array([0.0, math.pi])), dtype=float)
        if np.max(np.abs(ends)) > 1e-12:
            raise DomainError("cell potential must vanish at 0 and pi")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class CustomPotential(Potential):
    """Raw samples tied to a specific grid; optionally with a validity mask."""

    values: np.ndarray
    mask: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.mask is not None:
            object.__setattr__(self, "mask", np.asarray(self.mask, dtype=bool))

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != self.values.shape:
            raise DomainError("custom potential samples do not match the grid")
        return self.values


@dataclass(frozen=True)
class DiscreteOperator:
    """Hermitian discretization of -d^2/dx^2 + V under a boundary condition.

    Stored as diagonal + constant off-diagonal (+ optional complex corner
    pair) so that real tridiagonal problems can use the banded eigensolver.
    """

    grid: Grid
    bc: BoundaryCondition
    potential: Potential
    diag: np.ndarray
    off: float
    corner: Optional[complex] = None  # entry (0, n-1); (n-1, 0) is its conjugate

    @property
    def n(self) -> int:
        return self.grid.n

    def matrix(self) -> np.ndarray:
        dtype = complex if self.corner is not None else float
        m = np.zeros((self.n, self.n), dtype=dtype)
        np.fill_diagonal(m, self.diag)
        idx = np.arange(self.n - 1)
        m[idx, idx + 1] = self.off
        m[idx + 1, idx] = self.off
        if self.corner is not None:
            m[0, -1] += self.corner
            m[-1, 0] += np.conjugate(self.corner)
        return m

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        if self.corner is not None:
            out = out.astype(complex)
            out[0] += self.corner * v[-1]
            out[-1] += np.conjugate(self.corner) * v[0]
        return out

    def hermiticity_defect(self) -> float:
        m = self.matrix()
        return float(np.max(np.abs(m - m.conj().T)))


def assemble(grid: Grid, potential: Potential, bc: BoundaryCondition) -> DiscreteOperator:
    """Build the discrete operator; see the module docstring for conventions."""
    if isinstance(bc, GeneralU):
        raise DomainError(
            "general-U boundary conditions are not discretized; use the "
            "extension-theory layer"
        )
    potential.validate(grid)
    v = potential.evaluate(grid.points)
    if not np.all(np.isfinite(v)):
        raise DomainError("potential evaluates to a non-finite value on the grid")
    h = grid.h
    diag = 2.0 / h**2 + v
    off = -1.0 / h**2
    corner: Optional[complex] = None
    if isinstance(bc, QuasiPeriodic):
        if not grid.wrap:
            raise DomainError("quasi-periodic conditions require a wrap grid")
        if abs(grid.interval.a) > 1e-12 or abs(grid.interval.b - math.pi) > 1e-12:
            raise DomainError("quasi-periodic problems are posed on [0, pi]")
        corner = -np.exp(-1j * bc.alpha) / h**2
    elif not isinstance(bc, Dirichlet):
        raise DomainError(f"unsupported boundary condition {bc!r}")
    return DiscreteOperator(
        grid=grid, bc=bc, potential=potential, diag=diag, off=off, corner=corner
    )


def _symmetry_scores(grid: Grid, vectors: np.ndarray) -> np.ndarray:
    """Re<v, Pv> with P the grid reflection; +1 even, -1 odd."""
    flipped = vectors[::-1, :]
    return np.real(np.sum(vectors.conj() * flipped, axis=0))


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        pivot = out[i, j]
        if pivot != 0:
            out[:, j] *= np.conjugate(pivot) / abs(pivot)
    return out


def _order_degenerate(grid: Grid, eigs: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Deterministic ordering inside degenerate clusters.

    Standard grids are reflection symmetric, so clusters sort even-first by
    symmetry score; wrap grids (no in-grid reflection) fall back to the
    index of the largest-magnitude component.
    """
    order = np.arange(len(eigs))
    scale = max(1.0, float(np.max(np.abs(eigs))))
    start = 0
    while start < len(eigs):
        stop = start + 1
        while stop < len(eigs) and abs(eigs[stop] - eigs[start]) <= _DEGENERACY_RTOL * scale:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            if grid.wrap:
                keys = [int(np.argmax(np.abs(vectors[:, j]))) for j in block]
            else:
                keys = list(-_symmetry_scores(grid, vectors[:, block]))
            block = [b for _, b in sorted(zip(keys, block), key=lambda t: t[0])]
            order[start:stop] = block
        start = stop
    return order


def eigensolve(op: DiscreteOperator, k: int) -> Spectrum:
    """k smallest eigenvalues with grid-orthonormal eigenvectors."""
    n = op.n
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= {n}, got k={k}")
    try:
        if op.corner is None:
            off = np.full(n - 1, op.off)
            eigs, vecs = scipy.linalg.eigh_tridiagonal(
                op.diag, off, select="i", select_range=(0, k - 1)
            )
        else:
            eigs, vecs = scipy.linalg.eigh(
                op.matrix(), subset_by_index=(0, k - 1)
            )
    except Exception as exc:  # pragma: no cover - LAPACK failure path
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    order = _order_degenerate(op.grid, eigs, vecs)
    eigs = eigs[order]
    vecs = _fix_phases(vecs[:, order]) / math.sqrt(op.grid.h)
    return Spectrum(
        labels=list(range(k)),
        eigenvalues=eigs,
        grid=op.grid,
        vectors=vecs.astype(complex),
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-grid max relative eigenvalue errors and estimated orders."""

    hs: np.ndarray
    max_rel_errors: np.ndarray
    orders: np.ndarray

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.hs.tolist(), self.max_rel_errors.tolist()))


def convergence_report(
    potential: Potential,
    bc: BoundaryCondition,
    oracle: Spectrum,
    grids: Sequence[Grid],
    k: int,
) -> ConvergenceReport:
    """Compare FD eigenvalues against an oracle across refinements."""
    if len(grids) < 2:
        raise DomainError("need at least two grids")
    hs = np.array([g.h for g in grids])
    if not np.all(np.diff(hs) < 0):
        raise DomainError("grids must have strictly decreasing h")
    if len(oracle) < k:
        raise DomainError("oracle provides fewer eigenvalues than requested")
    exact = np.asarray(oracle.eigenvalues[:k], dtype=float)
    denom = np.where(np.abs(exact) > 1e-14, np.abs(exact), 1.0)
    errs = []
    for g in grids:
        approx = eigensolve(assemble(g, potential, bc), k).eigenvalues
        errs.append(float(np.max(np.abs(approx - exact) / denom)))
    errs_arr = np.array(errs)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log(errs_arr[:-1] / errs_arr[1:]) / np.log(hs[:-1] / hs[1:])
    return ConvergenceReport(hs=hs, max_rel_errors=errs_arr, orders=orders)


def half_line_grid(length: float, n: int) -> Grid:
    """Standard grid on (0, length]: first sample one mesh step from 0."""
    return Grid(Interval(0.0, length), n)


def symmetric_grid(half_length: float, n_half: int) -> Grid:
    """Grid on (-L, L) with an even point count so x = 0 is never sampled.

    The two samples nearest the origin sit at +-h/2, which keeps singular
    mirrored potentials finite while leaving the barrier in place.
    """
    return Grid(Interval(-half_length, half_length), 2 * n_half)
