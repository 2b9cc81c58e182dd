"""Shared domain types: intervals, grids, wavefunctions and quadrature.

Units are natural throughout the package: hbar = 1 and 2m = 1, so the
kinetic operator is -d^2/dx^2 and the infinite-well levels are (n+1)^2.

Two grid flavours exist.  A standard grid samples the open interval
(a, b) at x_j = a + j*h, j = 1..n with h = (b-a)/(n+1); the endpoints are
not part of the state vector and enter only through boundary data.  A
wrap grid identifies b with a (a circle of circumference b-a) and samples
x_j = a + j*h, j = 1..n with h = (b-a)/n, so x_n = b carries the single
boundary sample.  Wrap grids are the substrate for quasi-periodic
boundary conditions; on them the uniform trapezoid sum is a full-period
rule and is exact for the exponential eigenmodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class DomainError(ValueError):
    """A value violates a documented domain restriction."""


class GridMismatchError(ValueError):
    """Two wavefunctions do not share an identical grid."""


class NumericalError(RuntimeError):
    """A numerical routine failed or produced an inconsistent result."""


NORMALIZATION_TOL = 1e-10
UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    """Oriented interval a < b; b = inf flags a half-line."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if math.isinf(self.a):
            raise DomainError("left endpoint must be finite")
        if not self.a < self.b:
            raise DomainError(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def half_line(self) -> bool:
        return math.isinf(self.b)

    @property
    def length(self) -> float:
        if self.half_line:
            raise DomainError("half-line has no finite length")
        return self.b - self.a

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b

    def overlaps(self, other: "Interval") -> bool:
        return self.a < other.b and other.a < self.b


@dataclass(frozen=True)
class Grid:
    """Uniform mesh on a finite interval; see module docstring for flavours."""

    interval: Interval
    n: int
    wrap: bool = False

    def __post_init__(self) -> None:
        if self.interval.half_line:
            raise DomainError("grids require a finite interval")
        if self.n < 1:
            raise DomainError("grid needs at least one point")

    @property
    def h(self) -> float:
        denom = self.n if self.wrap else self.n + 1
        return self.interval.length / denom

    @property
    def points(self) -> np.ndarray:
        return self.interval.a + self.h * np.arange(1, self.n + 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.n == other.n
            and self.wrap == other.wrap
            and self.interval.a == other.interval.a
            and self.interval.b == other.interval.b
        )

    def __hash__(self) -> int:
        return hash((self.interval.a, self.interval.b, self.n, self.wrap))


@dataclass(frozen=True)
class BoundaryData:
    """Endpoint values (and optionally derivatives) accompanying a grid sample."""

    value_a: complex = 0.0
    value_b: complex = 0.0
    deriv_a: Optional[complex] = None
    deriv_b: Optional[complex] = None

    def scaled(self, c: complex) -> "BoundaryData":
        return BoundaryData(
            value_a=c * self.value_a,
            value_b=c * self.value_b,
            deriv_a=None if self.deriv_a is None else c * self.deriv_a,
            deriv_b=None if self.deriv_b is None else c * self.deriv_b,
        )


@dataclass(frozen=True)
class UnitaryMatrix2:
    """2x2 unitary matrix, validated on construction."""

    u11: complex
    u12: complex
    u21: complex
    u22: complex

    def __post_init__(self) -> None:
        defect = unitarity_defect(self.as_array())
        if defect > 1e-12:
            raise DomainError(f"matrix is not unitary (defect {defect:.3e})")

    def as_array(self) -> np.ndarray:
        return np.array([[self.u11, self.u12], [self.u21, self.u22]], dtype=complex)

    @classmethod
    def from_array(cls, m: np.ndarray) -> "UnitaryMatrix2":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def unitarity_defect(m: np.ndarray) -> float:
    """max |U^dag U - I| combined with the determinant-modulus defect."""
    m = np.asarray(m, dtype=complex)
    gram = m.conj().T @ m
    d = float(np.max(np.abs(gram - np.eye(2))))
    return max(d, abs(abs(np.linalg.det(m)) - 1.0))


class BoundaryCondition:
    """Selector for the self-adjoint realization of -d^2/dx^2 + V."""


@dataclass(frozen=True)
class Dirichlet(BoundaryCondition):
    pass


@dataclass(frozen=True)
class QuasiPeriodic(BoundaryCondition):
    """Boundary relation g(b) = e^{i alpha} g(a), same phase on g'.

    alpha is reduced modulo 2*pi.  This orientation is the one under which
    the exponential modes with momenta 2n + alpha/pi satisfy the relation
    exactly; the family with the phase on the other endpoint is the same
    family relabelled alpha -> 2*pi - alpha.
    """

    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", float(self.alpha) % (2 * math.pi))


@dataclass(frozen=True)
class GeneralU(BoundaryCondition):
    matrix: UnitaryMatrix2


@dataclass(frozen=True)
class WaveFunction:
    """Complex amplitudes on a grid, with optional boundary/derivative data.

    ``derivative`` holds samples of f' on the grid points when an analytic
    derivative is available; quadrature-based momentum moments use it in
    preference to finite differences.  ``generalized`` flags ground states
    that are not square integrable on the line; norm-dependent operations
    reject those.
    """

    grid: Grid
    values: np.ndarray
    normalized: bool = False
    boundary: Optional[BoundaryData] = None
    derivative: Optional[np.ndarray] = None
    generalized: bool = False

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n,):
            raise DomainError(
                f"values shape {values.shape} does not match grid n={self.grid.n}"
            )
        if self.derivative is not None:
            deriv = np.asarray(self.derivative, dtype=complex)
            if deriv.shape != (self.grid.n,):
                raise DomainError("derivative samples must match the grid")
            object.__setattr__(self, "derivative", deriv)
        if self.normalized:
            nsq = norm_squared(self)
            if abs(nsq - 1.0) > 1e-8:
                raise DomainError(
                    f"normalized flag set but |psi|^2 integrates to {nsq!r}"
                )

    @classmethod
    def from_callable(
        cls,
        grid: Grid,
        func: Callable[[np.ndarray], np.ndarray],
        dfunc: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        normalized: bool = False,
        generalized: bool = False,
    ) -> "WaveFunction":
        x = grid.points
        ends = np.array([grid.interval.a, grid.interval.b])
        fa, fb = np.asarray(func(ends), dtype=complex)
        boundary = BoundaryData(value_a=fa, value_b=fb)
        deriv = None
        if dfunc is not None:
            deriv = np.asarray(dfunc(x), dtype=complex)
            da, db = np.asarray(dfunc(ends), dtype=complex)
            boundary = BoundaryData(value_a=fa, value_b=fb, deriv_a=da, deriv_b=db)
        return cls(
            grid=grid,
            values=np.asarray(func(x), dtype=complex),
            normalized=normalized,
            boundary=boundary,
            derivative=deriv,
            generalized=generalized,
        )

    def boundary_values(self) -> tuple[complex, complex]:
        if self.grid.wrap:
            # x_n = b is in-grid; a is the same physical point up to the
            # boundary phase, so no extra sample exists.
            return 0.0, 0.0
        if self.boundary is None:
            return 0.0, 0.0
        return complex(self.boundary.value_a), complex(self.boundary.value_b)


def quadrature(f: WaveFunction, g: Optional[WaveFunction] = None) -> complex:
    """Trapezoid integral of conj(f)*g (or of f alone when g is None... not used).

    Standard grids get the endpoint half-weights from the attached boundary
    values (implicitly zero for Dirichlet-type data); wrap grids use the
    plain full-period sum, which already weights every circle point once.
    """
    if g is None:
        g = f
    h = f.grid.h
    s = complex(np.vdot(f.values, g.values))
    if not f.grid.wrap:
        fa, fb = f.boundary_values()
        ga, gb = g.boundary_values()
        s += 0.5 * (np.conjugate(fa) * ga + np.conjugate(fb) * gb)
    return h * s


def inner_product(f: WaveFunction, g: WaveFunction) -> complex:
    """L2 pairing <f, g>, conjugate-linear in f; grids must be identical."""
    if f.grid != g.grid:
        raise GridMismatchError("inner_product requires identical grids")
    return quadrature(f, g)


def norm_squared(f: WaveFunction) -> float:
    return float(quadrature(f, f).real)


def normalize(f: WaveFunction) -> WaveFunction:
    if f.generalized:
        raise DomainError("generalized (non-square-integrable) state cannot be normalized")
    nsq = norm_squared(f)
    if nsq <= 0.0:
        raise DomainError("cannot normalize the zero function")
    c = 1.0 / math.sqrt(nsq)
    return WaveFunction(
        grid=f.grid,
        values=c * f.values,
        normalized=True,
        boundary=None if f.boundary is None else f.boundary.scaled(c),
        derivative=None if f.derivative is None else c * f.derivative,
    )


def restrict_indicator(f: WaveFunction, region: Interval) -> WaveFunction:
    """Multiply f by the indicator of ``region`` (closed); idempotent.

    A region disjoint from the grid interval yields the zero function.
    The restriction generally kinks f, so derivative samples are dropped.
    """
    x = f.grid.points
    mask = (x >= region.a) & (x <= region.b)
    values = np.where(mask, f.values, 0.0)
    boundary = None
    if f.boundary is not None and not f.grid.wrap:
        a, b = f.grid.interval.a, f.grid.interval.b
        boundary = BoundaryData(
            value_a=f.boundary.value_a if region.contains(a) else 0.0,
            value_b=f.boundary.value_b if region.contains(b) else 0.0,
        )
    return WaveFunction(grid=f.grid, values=values, boundary=boundary)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with labels and (optionally) eigenfunctions.

    Discrete eigenfunctions are the columns of ``vectors`` and are
    orthonormal under the grid quadrature.  Closed-form spectra carry
    callables instead (``functions``/``dfunctions``), which materialize to
    grid samples via :meth:`state`.
    """

    labels: tuple
    eigenvalues: np.ndarray
    grid: Optional[Grid] = None
    vectors: Optional[np.ndarray] = None
    functions: Optional[tuple] = None
    dfunctions: Optional[tuple] = None

    def __post_init__(self) -> None:
        vals = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "labels", tuple(self.labels))
        if not np.all(np.isfinite(vals)):
            raise DomainError("eigenvalues must be finite")
        if self.functions is not None:
            object.__setattr__(self, "functions", tuple(self.functions))
        if self.dfunctions is not None:
            object.__setattr__(self, "dfunctions", tuple(self.dfunctions))

    def __len__(self) -> int:
        return len(self.labels)

    def eigenvalue(self, label: int) -> float:
        return float(self.eigenvalues[self.labels.index(label)])

    def state(self, i: int, grid: Optional[Grid] = None) -> WaveFunction:
        """Materialize eigenfunction i (positional index) as a WaveFunction."""
        if self.vectors is not None:
            if grid is not None and grid != self.grid:
                raise GridMismatchError("discrete spectrum is tied to its grid")
            return WaveFunction(grid=self.grid, values=self.vectors[:, i], normalized=True)
        if self.functions is None:
            raise DomainError("spectrum carries no eigenfunctions")
        g = grid or self.grid
        if g is None:
            raise DomainError("a grid is required to sample a closed-form state")
        dfunc = None if self.dfunctions is None else self.dfunctions[i]
        return WaveFunction.from_callable(g, self.functions[i], dfunc=dfunc)


def sine_basis(grid: Grid, k_max: Optional[int] = None) -> np.ndarray:
    """Columns sqrt(2/pi)*sin(k x), k = 1..k_max, orthonormal under quadrature.

    On a standard grid of the interval [0, pi] all n modes are exactly
    orthonormal; on a wrap grid the n-th point sits at pi where every mode
    vanishes, so at most n-1 modes are independent.
    """
    x = grid.points
    n = grid.n
    if k_max is None:
        k_max = n - 1 if grid.wrap else n
    length = grid.interval.length
    k = np.arange(1, k_max + 1)
    modes = np.sqrt(2.0 / length) * np.sin(np.outer(x - grid.interval.a, k * np.pi / length))
    return modes.astype(complex)


def gaussian_packet(
    grid: Grid, center: float, sigma: float, momentum: float = 0.0
) -> WaveFunction:
    """Normalized Gaussian wavepacket with analytic derivative samples."""

    def func(x: np.ndarray) -> np.ndarray:
        return np.exp(-((x - center) ** 2) / (4.0 * sigma**2) + 1j * momentum * x)

    def dfunc(x: np.ndarray) -> np.ndarray:
        return (-(x - center) / (2.0 * sigma**2) + 1j * momentum) * func(x)

    return normalize(WaveFunction.from_callable(grid, func, dfunc=dfunc))


def endpoint_extrapolation(f: WaveFunction) -> BoundaryData:
    """One-sided cubic extrapolation of values and derivatives to both ends.

    Analytic boundary data, when attached, is passed through unchanged.
    """
    if f.boundary is not None and f.boundary.deriv_a is not None:
        return f.boundary
    x = f.grid.points
    h = f.grid.h
    a, b = f.grid.interval.a, f.grid.interval.b

    def fit_end(xs: np.ndarray, ys: np.ndarray, x0: float) -> tuple[complex, complex]:
        # local coordinates keep the Vandermonde solve well conditioned
        t = (xs - x0) / h
        coef_r = np.polyfit(t, ys.real, 3)
        coef_i = np.polyfit(t, ys.imag, 3)
        value = complex(np.polyval(coef_r, 0.0), np.polyval(coef_i, 0.0))
        dr = np.polyval(np.polyder(coef_r), 0.0) / h
        di = np.polyval(np.polyder(coef_i), 0.0) / h
        return value, complex(dr, di)

    k = min(4, f.grid.n)
    va, da = fit_end(x[:k], f.values[:k], a)
    vb, db = fit_end(x[-k:], f.values[-k:], b)
    if f.boundary is not None:
        va, vb = f.boundary.value_a, f.boundary.value_b
    return BoundaryData(value_a=va, value_b=vb, deriv_a=da, deriv_b=db)
