"""Decomposition of the line into interval fibers and fibered Hamiltonians.

A compactly supported function on the line splits into fibers indexed by a
phase alpha in [0, 2pi):

    g_alpha(x) = sum_k e^{-i k alpha} f(x + k pi),   x in (0, pi],

each satisfying g_alpha(pi) = e^{i alpha} g_alpha(0) (the orientation used
by :class:`spectra.core.QuasiPeriodic`; the family with the phase on the
other endpoint is the relabelling alpha -> 2pi - alpha).  Sampling alpha at
M uniform points makes the map exactly invertible for supports spanning at
most M cells, and an isometry up to round-off (discrete orthogonality of
the phases).  Under the map, a pi-periodized potential acts fiberwise as
-d^2/dx^2 + V with quasi-periodic conditions; sweeping alpha yields the
band structure whose union over alpha is the spectrum of the line operator.

Line samples live on per-cell wrap grids: cell k holds f at k pi + j h,
j = 1..n with h = pi/n, so the union over cells is a uniform mesh of the
line with the points k pi belonging to the cell on their left.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    BoundaryData,
    DomainError,
    Grid,
    Interval,
    QuasiPeriodic,
    Spectrum,
    WaveFunction,
)
from .discrete_solver import (
    DiscreteOperator,
    PeriodicCellPotential,
    assemble,
    eigensolve,
)

CELL = math.pi


def cell_grid(n: int) -> Grid:
    """Wrap grid with n points on [0, pi]: x_j = j pi / n, x_n = pi."""
    return Grid(Interval(0.0, CELL), n, wrap=True)


def worker_count() -> int:
    """Parallel width for fiber loops, capped by SPECTRA_THREADS (default 1)."""
    raw = os.environ.get("SPECTRA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class LineFunction:
    """Grid samples of a compactly supported function on the line.

    ``values[c, j]`` is f((k0 + c) pi + (j+1) h) with h = pi/n.  Optional
    ``derivative`` samples (same layout) let the fiber map carry exact
    endpoint derivative data, so boundary-relation residuals of fibers are
    not limited by extrapolation.
    """

    k0: int
    values: np.ndarray  # shape (cells, n), complex
    derivative: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 2:
            raise DomainError("need a (cells, n) array of samples")
        object.__setattr__(self, "values", v)
        if self.derivative is not None:
            d = np.asarray(self.derivative, dtype=complex)
            if d.shape != v.shape:
                raise DomainError("derivative samples must match the values")
            object.__setattr__(self, "derivative", d)

    @property
    def cells(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def h(self) -> float:
        return CELL / self.n

    @classmethod
    def from_callable(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        k0: int,
        cells: int,
        n: int,
        dfunc: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ) -> "LineFunction":
        h = CELL / n
        rows = []
        drows = []
        for c in range(cells):
            x = (k0 + c) * CELL + h * np.arange(1, n + 1)
            rows.append(np.asarray(func(x), dtype=complex))
            if dfunc is not None:
                drows.append(np.asarray(dfunc(x), dtype=complex))
        return cls(
            k0=k0,
            values=np.vstack(rows),
            derivative=np.vstack(drows) if drows else None,
        )

    def points(self) -> np.ndarray:
        h = self.h
        return np.vstack(
            [
                (self.k0 + c) * CELL + h * np.arange(1, self.n + 1)
                for c in range(self.cells)
            ]
        )

    def norm_squared(self) -> float:
        return float(self.h * np.sum(np.abs(self.values) ** 2))

    def boundary_sample(self, k: int, data: Optional[np.ndarray] = None) -> complex:
        """f(k pi), which belongs to cell k-1 as its last sample (0 outside)."""
        arr = self.values if data is None else data
        c = k - 1 - self.k0
        if 0 <= c < self.cells:
            return complex(arr[c, -1])
        return 0.0


@dataclass(frozen=True)
class FiberDecomposition:
    """Fibers over M uniformly sampled phases, with the source cell window."""

    alphas: np.ndarray
    fibers: tuple
    k0: int
    cells: int

    @property
    def m(self) -> int:
        return len(self.alphas)


def decompose(f: LineFunction, m: int) -> FiberDecomposition:
    """Split a line function into M fibers; exact for supports within M cells."""
    if m < 2:
        raise DomainError("need at least two phase samples")
    if f.cells > m:
        raise DomainError(
            f"support spans {f.cells} cells > M = {m}: cell indices alias "
            "and the decomposition is not invertible"
        )
    alphas = 2.0 * math.pi * np.arange(m) / m
    ks = f.k0 + np.arange(f.cells)
    grid = cell_grid(f.n)
    node_vals = np.array([f.boundary_sample(int(k)) for k in ks])
    node_derivs = None
    if f.derivative is not None:
        node_derivs = np.array(
            [f.boundary_sample(int(k), f.derivative) for k in ks]
        )
    fibers = []
    for alpha in alphas:
        phase = np.exp(-1j * alpha * ks)
        vals = phase @ f.values
        value_a = complex(np.sum(phase * node_vals))
        deriv = None
        deriv_a = deriv_b = None
        if f.derivative is not None:
            deriv = phase @ f.derivative
            deriv_a = complex(np.sum(phase * node_derivs))
            deriv_b = complex(deriv[-1])
        boundary = BoundaryData(
            value_a=value_a,
            value_b=complex(vals[-1]),
            deriv_a=deriv_a,
            deriv_b=deriv_b,
        )
        fibers.append(
            WaveFunction(grid=grid, values=vals, boundary=boundary, derivative=deriv)
        )
    return FiberDecomposition(
        alphas=alphas, fibers=tuple(fibers), k0=f.k0, cells=f.cells
    )


def reconstruct(
    dec: FiberDecomposition, k0: Optional[int] = None, cells: Optional[int] = None
) -> LineFunction:
    """Invert the fiber map onto a window of cells (default: the source window).

    Exact, up to round-off, whenever the represented function is supported
    within M consecutive cells containing the requested window.
    """
    k0 = dec.k0 if k0 is None else k0
    cells = dec.cells if cells is None else cells
    if cells > dec.m:
        raise DomainError("requested window exceeds the alias-free cell range")
    ks = k0 + np.arange(cells)
    stack = np.vstack([w.values for w in dec.fibers])  # (M, n)
    phases = np.exp(1j * np.outer(ks, dec.alphas))  # (cells, M)
    values = (phases @ stack) / dec.m
    return LineFunction(k0=k0, values=values)


def fiber_hamiltonian(
    potential: PeriodicCellPotential, alpha: float, n: int
) -> DiscreteOperator:
    """Discrete -d^2/dx^2 + V on the cell with phase-alpha boundary coupling."""
    return assemble(cell_grid(n), potential, QuasiPeriodic(alpha))


@dataclass(frozen=True)
class BandTable:
    """Lowest fiber eigenvalues per sampled phase: energies[i, j] = E_j(alpha_i)."""

    alphas: np.ndarray
    energies: np.ndarray

    def band(self, j: int) -> np.ndarray:
        return self.energies[:, j]

    def continuity_defect(self, j: int) -> float:
        """Largest adjacent-alpha jump of band j, relative to its typical step.

        The scale is the first step floored by the median step, so a band
        starting at a quadratic edge does not produce a spurious defect; a
        genuine discontinuity (a mis-sorted crossing) shows up as a large
        ratio either way.
        """
        jumps = np.abs(np.diff(self.band(j)))
        scale = max(float(jumps[0]), float(np.median(jumps)), 1e-12)
        return float(np.max(jumps)) / scale


def band_structure(
    potential: PeriodicCellPotential,
    alphas: Sequence[float],
    k: int,
    n: int,
) -> BandTable:
    """k lowest eigenvalues of every fiber Hamiltonian over the phase samples."""
    alphas_arr = np.asarray(list(alphas), dtype=float)

    def solve(alpha: float) -> np.ndarray:
        return eigensolve(fiber_hamiltonian(potential, float(alpha), n), k).eigenvalues

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(solve, alphas_arr))
    else:
        rows = [solve(a) for a in alphas_arr]
    return BandTable(alphas=alphas_arr, energies=np.vstack(rows))


@dataclass(frozen=True)
class UnionWitness:
    energy: float
    ok: bool
    label: Optional[int] = None
    alpha: Optional[float] = None


def spectrum_union_check(energies: Sequence[float]) -> list[UnionWitness]:
    """Exhibit (n, alpha) with (2n + alpha/pi)^2 = E for each E >= 0.

    Negative energies have no witness: the union of the free bands is
    [0, infinity), the spectrum of the free line operator.
    """
    out = []
    for e in energies:
        if e < 0:
            out.append(UnionWitness(energy=float(e), ok=False))
            continue
        p = math.sqrt(e)
        n = math.floor(p / 2.0)
        frac = p - 2.0 * n  # in [0, 2)
        alpha = frac * math.pi
        if alpha >= 2.0 * math.pi:  # guard the p = even-integer edge
            alpha = 0.0
            n += 1
        assert abs((2.0 * n + alpha / math.pi) ** 2 - e) <= 1e-9 * max(1.0, e)
        out.append(UnionWitness(energy=float(e), ok=True, label=n, alpha=alpha))
    return out


def evolve_fibers(
    dec: FiberDecomposition, t: float
) -> FiberDecomposition:
    """Evolve every fiber under its free fiber Hamiltonian (V = 0), exactly.

    Uses the closed-form exponential eigenbasis per fiber, which is complete
    on the wrap grid; combined with :func:`reconstruct` this realizes the
    line evolution through the direct-integral picture.
    """
    from .dynamics import quasi_periodic_propagator

    grid = dec.fibers[0].grid

    def one(i: int) -> WaveFunction:
        prop = quasi_periodic_propagator(float(dec.alphas[i]), grid)
        return prop.evolve(dec.fibers[i], t)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fibers = list(pool.map(one, range(dec.m)))
    else:
        fibers = [one(i) for i in range(dec.m)]
    return FiberDecomposition(
        alphas=dec.alphas, fibers=tuple(fibers), k0=dec.k0, cells=dec.cells
    )
