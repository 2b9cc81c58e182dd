"""Unitary time evolution, confinement certification and barrier detection.

Two propagators are provided.  The spectral propagator expands the state in
an orthonormal eigenbasis and rotates the coefficients by exact phases; it
is unitary to round-off and composes exactly.  The Crank-Nicolson
propagator advances (1 + i H dt/2) psi_{k+1} = (1 - i H dt/2) psi_k for a
discrete operator; the Cayley form keeps it unitary up to the linear-solve
accuracy.

Confinement for the multitrap Hamiltonian (Dirichlet nodes at n*pi/q,
energy shifted so the ground level sits at zero) is realized structurally:
the propagator basis is the union of per-cell Dirichlet sine bases, so the
subspace of states supported in one cell is exactly invariant and leakage
is a round-off-level quantity rather than a discretization artifact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .closed_form import MultitrapParams
from .core import (
    DomainError,
    Grid,
    Interval,
    NumericalError,
    Spectrum,
    WaveFunction,
    norm_squared,
)
from .discrete_solver import CustomPotential, DiscreteOperator

NORM_TOL = 1e-8


@dataclass(frozen=True)
class SpectralPropagator:
    """exp(-i H t) realized by an orthonormal eigenbasis with exact phases.

    ``vectors`` columns are grid-orthonormal; ``energies`` pair with them.
    States must lie in the span of the basis for the evolution to be
    meaningful; the norm of the projection is checked on use.
    """

    grid: Grid
    energies: np.ndarray
    vectors: np.ndarray

    @classmethod
    def from_spectrum(cls, spectrum: Spectrum, grid: Optional[Grid] = None) -> "SpectralPropagator":
        if spectrum.vectors is not None:
            return cls(
                grid=spectrum.grid,
                energies=np.asarray(spectrum.eigenvalues, dtype=float),
                vectors=spectrum.vectors,
            )
        g = grid or spectrum.grid
        if g is None:
            raise DomainError("a grid is required to sample a closed-form basis")
        cols = [spectrum.state(i, g).values for i in range(len(spectrum))]
        return cls(
            grid=g,
            energies=np.asarray(spectrum.eigenvalues, dtype=float),
            vectors=np.column_stack(cols),
        )

    def coefficients(self, psi: WaveFunction) -> np.ndarray:
        if psi.grid != self.grid:
            raise DomainError("state grid does not match the propagator grid")
        return self.grid.h * (self.vectors.conj().T @ psi.values)

    def evolve(self, psi: WaveFunction, t: float) -> WaveFunction:
        c = self.coefficients(psi)
        values = self.vectors @ (np.exp(-1j * self.energies * t) * c)
        return WaveFunction(grid=self.grid, values=values)


def dirichlet_well_propagator(grid: Grid) -> SpectralPropagator:
    """Infinite-well propagator on [0, pi] with exact levels (k+1)^2.

    Uses the full discrete sine basis, which is exactly orthonormal under the
    grid quadrature, so any Dirichlet-type sample is represented without
    projection loss.
    """
    from .core import sine_basis

    modes = sine_basis(grid)
    k = np.arange(1, modes.shape[1] + 1)
    return SpectralPropagator(grid=grid, energies=(k**2).astype(float), vectors=modes)


def quasi_periodic_propagator(alpha: float, grid: Grid) -> SpectralPropagator:
    """Propagator for -d^2/dx^2 with g(pi) = e^{i alpha} g(0), exact levels.

    The exponential modes with momenta 2j + alpha/pi, j in a symmetric
    window of size n, form a complete orthonormal basis of the wrap-grid
    samples, so the discrete evolution is exactly unitary.
    """
    if not grid.wrap:
        raise DomainError("quasi-periodic propagation requires a wrap grid")
    n = grid.n
    x = grid.points
    js = np.arange(-(n // 2), n - n // 2)
    ps = 2.0 * js + alpha / math.pi
    vectors = np.exp(1j * np.outer(x, ps)) / math.sqrt(math.pi)
    return SpectralPropagator(grid=grid, energies=ps**2, vectors=vectors)


@dataclass
class CrankNicolsonPropagator:
    """Cayley-form time stepper for a Hermitian discrete operator."""

    op: DiscreteOperator
    dt: float

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise DomainError("need dt > 0")
        n = self.op.n
        h = 0.5j * self.dt
        if self.op.corner is None:
            ab = np.zeros((3, n), dtype=complex)
            ab[0, 1:] = h * self.op.off
            ab[1, :] = 1.0 + h * self.op.diag
            ab[2, :-1] = h * self.op.off
            self._banded = ab
            self._lu = None
        else:
            m = np.eye(n, dtype=complex) + h * self.op.matrix()
            self._lu = scipy.linalg.lu_factor(m)
            self._banded = None

    @property
    def grid(self) -> Grid:
        return self.op.grid

    def _solve(self, rhs: np.ndarray) -> np.ndarray:
        try:
            if self._banded is not None:
                return scipy.linalg.solve_banded((1, 1), self._banded, rhs)
            return scipy.linalg.lu_solve(self._lu, rhs)
        except Exception as exc:
            raise NumericalError(f"Crank-Nicolson linear solve failed: {exc}") from exc

    def step(self, values: np.ndarray) -> np.ndarray:
        rhs = values - 0.5j * self.dt * self.op.apply(values)
        return self._solve(rhs.astype(complex))

    def evolve(self, psi: WaveFunction, t: float) -> WaveFunction:
        if psi.grid != self.grid:
            raise DomainError("state grid does not match the propagator grid")
        steps = math.ceil(t / self.dt - 1e-12)
        values = psi.values.astype(complex)
        for _ in range(steps):
            values = self.step(values)
        return WaveFunction(grid=self.grid, values=values)


Propagator = SpectralPropagator | CrankNicolsonPropagator


def evolve(prop: Propagator, psi0: WaveFunction, t: float) -> WaveFunction:
    """Evolve a normalized state; norm preservation is the caller's invariant."""
    if psi0.generalized:
        raise DomainError("generalized states cannot be evolved unitarily")
    nsq = norm_squared(psi0)
    if abs(nsq - 1.0) > NORM_TOL:
        raise DomainError(f"initial state is not normalized (|psi|^2 = {nsq!r})")
    return prop.evolve(psi0, t)


@dataclass(frozen=True)
class LeakageReport:
    """Probability inside a designated cell, and outside it, over time."""

    times: np.ndarray
    inside_mass: np.ndarray
    leaked_mass: np.ndarray

    def max_leak(self) -> float:
        return float(np.max(self.leaked_mass))


def _mass_in(psi: WaveFunction, cell: Interval) -> float:
    x = psi.grid.points
    mask = (x >= cell.a) & (x <= cell.b)
    return float(psi.grid.h * np.sum(np.abs(psi.values[mask]) ** 2))


def leakage(
    prop: Propagator,
    psi0: WaveFunction,
    cell: Interval,
    times: Sequence[float],
    support_tol: float = 1e-12,
) -> LeakageReport:
    """Track probability outside ``cell`` along the evolution.

    The initial state must be supported in the cell up to ``support_tol``.
    """
    total0 = norm_squared(psi0)
    outside0 = total0 - _mass_in(psi0, cell)
    if outside0 > support_tol:
        raise DomainError(
            f"initial state has mass {outside0:.3e} outside the cell"
        )
    ts = np.asarray(list(times), dtype=float)
    inside = np.empty_like(ts)
    leaked = np.empty_like(ts)
    for i, t in enumerate(ts):
        psi_t = evolve(prop, psi0, float(t))
        total = norm_squared(psi_t)
        inside[i] = _mass_in(psi_t, cell)
        leaked[i] = total - inside[i]
    return LeakageReport(times=ts, inside_mass=inside, leaked_mass=leaked)


@dataclass(frozen=True)
class MultitrapSystem:
    """Multitrap Hamiltonian on a window of cells, direct-sum realized.

    The global grid spans (0, n_cells*pi/q) with every node n*pi/q on a grid
    point (where every basis function vanishes); the propagator basis is the
    union of per-cell Dirichlet sine modes with energies ((j+1) q)^2 - q^2,
    so the generalized ground level sits at zero and each cell subspace is
    exactly invariant under the evolution.
    """

    params: MultitrapParams
    n_cells: int
    points_per_cell: int
    propagator: SpectralPropagator

    @classmethod
    def build(
        cls, params: MultitrapParams, n_cells: int, points_per_cell: int
    ) -> "MultitrapSystem":
        q = params.q
        cell_width = math.pi / q
        m = points_per_cell  # interior points per cell
        n_total = n_cells * (m + 1) - 1
        grid = Grid(Interval(0.0, n_cells * cell_width), n_total)
        h = grid.h
        x_cell = h * np.arange(1, m + 1)
        j = np.arange(1, m + 1)
        cell_modes = np.sqrt(2.0 / cell_width) * np.sin(np.outer(x_cell, j * q))
        energies = []
        columns = []
        for c in range(n_cells):
            offset = c * (m + 1)
            for jj in range(m):
                col = np.zeros(n_total, dtype=complex)
                col[offset : offset + m] = cell_modes[:, jj]
                columns.append(col)
                energies.append(((jj + 1) * q) ** 2 - q**2)
        prop = SpectralPropagator(
            grid=grid, energies=np.array(energies), vectors=np.column_stack(columns)
        )
        return cls(
            params=params, n_cells=n_cells, points_per_cell=m, propagator=prop
        )

    def cell(self, index: int) -> Interval:
        width = math.pi / self.params.q
        return Interval(index * width, (index + 1) * width)

    def packet(
        self, cell_index: int, weights: Sequence[float] = (1.0, 0.6, 0.25)
    ) -> WaveFunction:
        """Normalized packet built from the lowest modes of one trap cell."""
        if not 0 <= cell_index < self.n_cells:
            raise DomainError("cell index out of range")
        base = cell_index * self.points_per_cell
        values = np.zeros(self.propagator.grid.n, dtype=complex)
        for j, w in enumerate(weights):
            values += w * self.propagator.vectors[:, base + j]
        from .core import normalize

        return normalize(WaveFunction(grid=self.propagator.grid, values=values))


def sine_packet(
    grid: Grid, cell: Interval, weights: Sequence[float] = (1.0, 0.6, 0.25)
) -> WaveFunction:
    """Normalized packet of the cell's Dirichlet sine modes, zero outside.

    The support is exactly contained in the (closed) cell, so the packet is
    admissible for :func:`leakage` on any grid containing the cell.
    """
    x = grid.points
    width = cell.b - cell.a
    values = np.zeros(grid.n, dtype=complex)
    inside = (x > cell.a) & (x < cell.b)
    xi = x[inside] - cell.a
    for j, w in enumerate(weights):
        values[inside] += w * math.sqrt(2.0 / width) * np.sin((j + 1) * math.pi / width * xi)
    from .core import normalize

    return normalize(WaveFunction(grid=grid, values=values))


def free_line_propagator(grid: Grid) -> SpectralPropagator:
    """Spectral form of the Dirichlet FD operator with V = 0 on ``grid``.

    The discrete sine modes are the exact eigenvectors of the stencil;
    their eigenvalues (4/h^2) sin^2(k h / 2) make this the exact-in-time
    evolution of the finite-difference free Hamiltonian.
    """
    from .core import sine_basis

    modes = sine_basis(grid)
    n_modes = modes.shape[1]
    h = grid.h
    k = np.arange(1, n_modes + 1)
    length = grid.interval.length
    energies = (4.0 / h**2) * np.sin(k * math.pi / length * h / 2.0) ** 2
    return SpectralPropagator(grid=grid, energies=energies, vectors=modes)


def extension_divergence(psi0: WaveFunction, alpha: float, t: float) -> float:
    """L2 distance between Dirichlet and quasi-periodic evolutions of psi0.

    Both spectral propagators share psi0's wrap grid: the Dirichlet one
    (infinite well, exact levels) and the alpha family (exact levels
    (2n + alpha/pi)^2).  Distinct self-adjoint realizations of the same
    differential expression genuinely disagree once t > 0.
    """
    if not psi0.grid.wrap:
        raise DomainError("extension_divergence expects a wrap grid on [0, pi]")
    well = dirichlet_well_propagator(psi0.grid)
    qp = quasi_periodic_propagator(alpha, psi0.grid)
    a = evolve(well, psi0, t)
    b = evolve(qp, psi0, t)
    diff = a.values - b.values
    return float(math.sqrt(psi0.grid.h * np.sum(np.abs(diff) ** 2)))


def _fit_exponent(
    x: np.ndarray, vals: np.ndarray, x0: float, idx: np.ndarray
) -> Optional[float]:
    sel = np.abs(vals[idx]) > 0
    if np.count_nonzero(sel) < 3:
        return None
    xs = np.log(np.abs(x[idx][sel] - x0))
    ys = np.log(np.abs(vals[idx][sel]))
    slope = np.polyfit(xs, ys, 1)[0]
    return float(slope)


def detect_barriers(
    phi: WaveFunction, threshold_exponent: float = 0.5, fit_tol: float = 0.1
) -> list[float]:
    """Zeros of a real ground state whose local vanishing order marks a barrier.

    For each zero x0 the exponent beta of |phi| ~ |x - x0|^beta is fitted
    from the four nearest samples on each side; x0 is reported when
    beta >= threshold_exponent - fit_tol.  Shallower zeros (beta below the
    window) do not block transport and are not reported.
    """
    vals = np.real_if_close(phi.values)
    if np.iscomplexobj(vals):
        vals = phi.values.real
    vals = np.asarray(vals, dtype=float)
    amax = float(np.max(np.abs(vals)))
    if amax == 0.0:
        raise DomainError("cannot detect barriers of the zero function")
    x = phi.grid.points
    n = len(x)
    zero_mask = np.abs(vals) <= 1e-12 * amax
    candidates: list[tuple[float, Optional[int]]] = []
    for i in np.nonzero(zero_mask)[0]:
        candidates.append((float(x[i]), int(i)))
    sign = np.sign(vals)
    for i in range(n - 1):
        if zero_mask[i] or zero_mask[i + 1]:
            continue
        if sign[i] * sign[i + 1] < 0:
            # linear interpolation for the crossing position
            t = vals[i] / (vals[i] - vals[i + 1])
            candidates.append((float(x[i] + t * (x[i + 1] - x[i])), None))
    barriers: list[float] = []
    for x0, i0 in sorted(candidates):
        if i0 is not None:
            left = np.arange(max(0, i0 - 4), i0)
            right = np.arange(i0 + 1, min(n, i0 + 5))
        else:
            below = np.nonzero(x < x0)[0]
            above = np.nonzero(x > x0)[0]
            left = below[-4:]
            right = above[:4]
        idx = np.concatenate((left, right))
        idx = idx[~zero_mask[idx]]
        beta = _fit_exponent(x, vals, x0, idx)
        if beta is not None and beta >= threshold_exponent - fit_tol:
            barriers.append(x0)
    return barriers


def potential_from_ground_state(
    phi: WaveFunction,
    second_derivative: Optional[np.ndarray] = None,
    mask_radius_steps: float = 2.0,
) -> CustomPotential:
    """Recover V = phi''/phi from a (generalized) zero-energy ground state.

    Points within ``mask_radius_steps`` mesh steps of a zero of phi are
    masked out.  ``second_derivative`` supplies analytic phi'' samples;
    without it a central second difference is used (one masked point at
    each grid end).
    """
    vals = np.real(np.asarray(phi.values))
    amax = float(np.max(np.abs(vals)))
    if amax == 0.0:
        raise DomainError("ground state with zero-measure support")
    x = phi.grid.points
    h = phi.grid.h
    mask = np.ones(phi.grid.n, dtype=bool)
    if second_derivative is not None:
        d2 = np.real(np.asarray(second_derivative))
    else:
        d2 = np.empty_like(vals)
        d2[1:-1] = (vals[:-2] - 2.0 * vals[1:-1] + vals[2:]) / h**2
        d2[0] = d2[-1] = 0.0
        mask[0] = mask[-1] = False
    zeros: list[float] = []
    zero_mask = np.abs(vals) <= 1e-12 * amax
    zeros.extend(float(x[i]) for i in np.nonzero(zero_mask)[0])
    sgn = np.sign(vals)
    for i in range(len(x) - 1):
        if not zero_mask[i] and not zero_mask[i + 1] and sgn[i] * sgn[i + 1] < 0:
            t = vals[i] / (vals[i] - vals[i + 1])
            zeros.append(float(x[i] + t * h))
    for z in zeros:
        mask &= np.abs(x - z) > mask_radius_steps * h - 1e-12 * h
    v = np.zeros_like(vals)
    v[mask] = d2[mask] / vals[mask]
    return CustomPotential(values=v, mask=mask)
