"""Analytic spectra and eigenfunctions for the exactly solvable models.

These are the oracle layer for the finite-difference solver: momentum and
kinetic families with quasi-periodic boundary conditions on [0, pi], the
infinite well, the half-line Calogero problem, the inverse-square
(centrifugal) generalized ground state and the multitrap ground state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .core import DomainError, Grid, Interval, Spectrum, WaveFunction

STANDARD_INTERVAL = Interval(0.0, math.pi)


def _label_range(n_range) -> list[int]:
    if isinstance(n_range, range):
        labels = list(n_range)
    else:
        lo, hi = n_range
        labels = list(range(int(lo), int(hi) + 1))
    if not labels:
        raise DomainError("empty label range")
    return labels


def _exp_mode(p: float):
    c = 1.0 / math.sqrt(math.pi)

    def func(x: np.ndarray) -> np.ndarray:
        return c * np.exp(1j * p * np.asarray(x, dtype=float))

    def dfunc(x: np.ndarray) -> np.ndarray:
        return 1j * p * func(x)

    return func, dfunc


def momentum_spectrum(alpha: float, n_range) -> Spectrum:
    """Self-adjoint momentum family on [0, pi]: eigenvalue 2n + alpha/pi.

    Eigenfunctions are (1/sqrt(pi)) * exp(i (2n + alpha/pi) x); they satisfy
    the quasi-periodic relation g(pi) = e^{i alpha} g(0).
    """
    labels = _label_range(n_range)
    eigs = np.array([2.0 * n + alpha / math.pi for n in labels])
    funcs, dfuncs = zip(*(_exp_mode(p) for p in eigs))
    return Spectrum(
        labels=labels,
        eigenvalues=eigs,
        grid=None,
        functions=funcs,
        dfunctions=dfuncs,
    )


def kinetic_spectrum(alpha: float, n_range) -> Spectrum:
    """Square of the momentum family: eigenvalue (2n + alpha/pi)^2.

    Same eigenfunctions as :func:`momentum_spectrum`.  Sorted ascending;
    at alpha = 0 every positive level is doubly degenerate (plane rotator).
    """
    labels = _label_range(n_range)
    ps = [2.0 * n + alpha / math.pi for n in labels]
    entries = sorted(zip(labels, ps), key=lambda t: (t[1] * t[1], t[0]))
    funcs, dfuncs = zip(*(_exp_mode(p) for _, p in entries))
    return Spectrum(
        labels=[n for n, _ in entries],
        eigenvalues=np.array([p * p for _, p in entries]),
        grid=None,
        functions=funcs,
        dfunctions=dfuncs,
    )


def _well_mode(k: int):
    c = math.sqrt(2.0 / math.pi)

    def func(x: np.ndarray) -> np.ndarray:
        return c * np.sin((k + 1) * np.asarray(x, dtype=float)) + 0j

    def dfunc(x: np.ndarray) -> np.ndarray:
        return c * (k + 1) * np.cos((k + 1) * np.asarray(x, dtype=float)) + 0j

    return func, dfunc


def infinite_well_spectrum(n_max: int) -> Spectrum:
    """Dirichlet well on [0, pi]: E_n = (n+1)^2, psi_n = sqrt(2/pi) sin((n+1)x)."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    labels = list(range(n_max + 1))
    funcs, dfuncs = zip(*(_well_mode(k) for k in labels))
    return Spectrum(
        labels=labels,
        eigenvalues=np.array([(k + 1) ** 2 for k in labels], dtype=float),
        grid=None,
        functions=funcs,
        dfunctions=dfuncs,
    )


def well_state(k: int, grid: Grid) -> WaveFunction:
    """Sampled infinite-well eigenstate k with analytic derivative data."""
    func, dfunc = _well_mode(k)
    return WaveFunction.from_callable(grid, func, dfunc=dfunc, normalized=True)


def laguerre(n: int, alpha: float, y) -> np.ndarray | float:
    """Generalized Laguerre polynomial L_n^alpha(y) by three-term recurrence.

    The recurrence is used for numerical stability; the explicit finite sum
    (:func:`laguerre_explicit_sum`) is kept as an independent cross-check.
    """
    if n < 0:
        raise DomainError("order must be >= 0")
    y_arr = np.asarray(y, dtype=float)
    prev = np.ones_like(y_arr)
    if n == 0:
        return prev if np.ndim(y) else float(prev)
    cur = 1.0 + alpha - y_arr
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - y_arr) * cur - (k + alpha) * prev) / (k + 1)
    return cur if np.ndim(y) else float(cur)


def laguerre_explicit_sum(n: int, alpha: float, y) -> np.ndarray | float:
    """L_n^alpha(y) as the explicit finite sum, factorials generalized via Gamma."""
    if n < 0:
        raise DomainError("order must be >= 0")
    y_arr = np.asarray(y, dtype=float)
    total = np.zeros_like(y_arr)
    for nu in range(n + 1):
        coef = math.gamma(n + alpha + 1.0) / (
            math.gamma(n - nu + 1.0) * math.gamma(alpha + nu + 1.0)
        )
        total = total + coef * (-y_arr) ** nu / math.factorial(nu)
    return total if np.ndim(y) else float(total)


@dataclass(frozen=True)
class CalogeroParams:
    """Coupling gamma > -1/4 of the x^2 + gamma/x^2 problem."""

    gamma: float

    def __post_init__(self) -> None:
        if not self.gamma > -0.25:
            raise DomainError("need gamma > -1/4")

    @property
    def alpha_l(self) -> float:
        """Laguerre order parameter (1/2) sqrt(1 + 4 gamma)."""
        return 0.5 * math.sqrt(1.0 + 4.0 * self.gamma)


def calogero_eigenvalue(params: CalogeroParams, n: int) -> float:
    return 4.0 * n + 2.0 + math.sqrt(1.0 + 4.0 * params.gamma)


def calogero_eigenfunction(params: CalogeroParams, n: int):
    """Unnormalized f_n(x) = x^{alpha+1/2} exp(-x^2/2) L_n^alpha(x^2) on x > 0."""
    a = params.alpha_l

    def func(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x, dtype=complex)
        pos = x > 0
        xp = x[pos]
        out[pos] = xp ** (a + 0.5) * np.exp(-0.5 * xp**2) * laguerre(n, a, xp**2)
        return out

    return func


def calogero_derivatives(
    params: CalogeroParams, n: int, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(f, f', f'') of the Calogero eigenfunction, all in closed form, x > 0.

    Uses d/dy L_n^a(y) = -L_{n-1}^{a+1}(y) with y = x^2.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("closed-form derivatives are defined for x > 0")
    a = params.alpha_l
    p = a + 0.5  # vanishing exponent at the origin
    u = x**2
    g = laguerre(n, a, u)
    g1 = -laguerre(n - 1, a + 1.0, u) if n >= 1 else np.zeros_like(u)
    g2 = laguerre(n - 2, a + 2.0, u) if n >= 2 else np.zeros_like(u)
    env = x**p * np.exp(-0.5 * u)
    f = env * g
    # f' = x^{p-1} e^{-u/2} * P with P = p g - u g + 2 u g'
    pP = p * g - u * g + 2.0 * u * g1
    f1 = x ** (p - 1.0) * np.exp(-0.5 * u) * pP
    # dP/du = (p+2) g' - g - u g' + 2 u g''
    dP = (p + 2.0) * g1 - g - u * g1 + 2.0 * u * g2
    f2 = x ** (p - 2.0) * np.exp(-0.5 * u) * ((p - 1.0) * pP - u * pP + 2.0 * u * dP)
    return f.astype(complex), f1.astype(complex), f2.astype(complex)


def calogero_spectrum(params: CalogeroParams, n_max: int, mirrored: bool = False) -> Spectrum:
    """E_n = 4n + 2 + sqrt(1+4 gamma) with the half-line eigenfunctions.

    With ``mirrored=True`` every level appears twice, once with support in
    x > 0 and once mirrored to x < 0: the singularity at the origin splits
    the problem into two independent copies.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    labels: list[int] = []
    eigs: list[float] = []
    funcs = []
    for n in range(n_max + 1):
        base = calogero_eigenfunction(params, n)
        labels.append(n)
        eigs.append(calogero_eigenvalue(params, n))
        funcs.append(base)
        if mirrored:
            labels.append(n)
            eigs.append(calogero_eigenvalue(params, n))
            funcs.append(lambda x, f=base: f(-np.asarray(x, dtype=float)))
    return Spectrum(labels=labels, eigenvalues=np.array(eigs), functions=funcs)


def centrifugal_ground_state(n: int, grid: Grid) -> WaveFunction:
    """Generalized (non-normalizable) ground state x^n of -d^2/dx^2 + n(n-1)/x^2.

    Requires n >= 2 and a grid with strictly positive points.
    """
    if n < 2:
        raise DomainError("need n >= 2")
    if np.any(grid.points <= 0):
        raise DomainError("grid must avoid the singular point x = 0")

    def func(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, x, 0.0) ** n + 0j

    def dfunc(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return n * np.where(x > 0, x, 0.0) ** (n - 1) + 0j

    return WaveFunction.from_callable(grid, func, dfunc=dfunc, generalized=True)


@dataclass(frozen=True)
class MultitrapParams:
    """Trap wavenumber q > 0; barrier nodes sit at n*pi/q."""

    q: float

    def __post_init__(self) -> None:
        if not self.q > 0:
            raise DomainError("need q > 0")

    def nodes(self, interval: Interval) -> np.ndarray:
        step = math.pi / self.q
        lo = math.ceil(interval.a / step)
        hi = math.floor(interval.b / step)
        return step * np.arange(lo, hi + 1)


def multitrap_ground_state(params: MultitrapParams, grid: Grid) -> WaveFunction:
    """sin(q x) sampled on the grid: the generalized ground state with nodes n*pi/q."""
    q = params.q

    def func(x: np.ndarray) -> np.ndarray:
        return np.sin(q * np.asarray(x, dtype=float)) + 0j

    def dfunc(x: np.ndarray) -> np.ndarray:
        return q * np.cos(q * np.asarray(x, dtype=float)) + 0j

    return WaveFunction.from_callable(grid, func, dfunc=dfunc, generalized=True)
