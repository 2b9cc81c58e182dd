"""Full-line position/momentum probability functionals for confined states.

A state confined to an interval is still a wave packet on the whole line
(extended by zero), so its momentum content is continuous and comes from
the line Fourier transform, never from periodization.  Conventions:

    ft(p) = (1/2pi) * integral f(x) e^{-i p x} dx
    density(p) = 2pi * |ft(p)|^2          (integrates to 1 over the line)

The transform is evaluated by integrating e^{-i p x} exactly against the
piecewise-linear interpolant of the samples (hat-function weights), which
keeps the oscillatory quadrature uniformly accurate in p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .core import (
    DomainError,
    Interval,
    WaveFunction,
    norm_squared,
)

CONVENTION = "density = 2*pi*|ft|^2, ft = (1/2pi) * int f e^{-ipx} dx"


def _hat_weight(u: np.ndarray) -> np.ndarray:
    """Fourier weight of the unit hat: sinc^2(u/2), series-guarded near 0."""
    out = np.empty_like(u, dtype=float)
    small = np.abs(u) < 1e-4
    us = u[small]
    out[small] = 1.0 - us**2 / 12.0 + us**4 / 360.0
    ub = u[~small]
    out[~small] = (np.sin(ub / 2.0) / (ub / 2.0)) ** 2
    return out


def _half_hat_weights(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fourier weights of the boundary half-hats.

    Returns (w_desc, w_asc) with
        w_desc(u) = int_0^1 (1 - s) e^{-i u s} ds   (left endpoint)
        w_asc(u)  = int_0^1 s e^{-i u s} ds         (used mirrored on the right)
    """
    u = np.asarray(u, dtype=float)
    out_d = np.empty_like(u, dtype=complex)
    out_a = np.empty_like(u, dtype=complex)
    small = np.abs(u) < 1e-4
    us = u[small]
    out_d[small] = 0.5 - 1j * us / 6.0 - us**2 / 24.0 + 1j * us**3 / 120.0
    out_a[small] = 0.5 - 1j * us / 3.0 - us**2 / 8.0 + 1j * us**3 / 30.0
    ub = u[~small]
    e = np.exp(-1j * ub)
    out_d[~small] = (1.0 - 1j * ub - e) / ub**2
    out_a[~small] = (e * (1.0 + 1j * ub) - 1.0) / ub**2
    return out_d, out_a


def line_fourier_transform(f: WaveFunction, p_grid: np.ndarray) -> np.ndarray:
    """ft(p) of the zero-extended piecewise-linear interpolant of f."""
    p = np.asarray(p_grid, dtype=float)
    h = f.grid.h
    x = f.grid.points
    a, b = f.grid.interval.a, f.grid.interval.b
    fa, fb = f.boundary_values()
    out = np.zeros(len(p), dtype=complex)
    # chunk the p loop to bound the phase-matrix memory
    chunk = max(1, int(2e6 // max(1, len(x))))
    for lo in range(0, len(p), chunk):
        pc = p[lo : lo + chunk]
        phases = np.exp(-1j * np.outer(pc, x))
        out[lo : lo + chunk] = _hat_weight(pc * h) * (phases @ f.values)
    w_desc, w_asc = _half_hat_weights(p * h)
    out += fa * np.exp(-1j * p * a) * w_desc
    out += fb * np.exp(-1j * p * (b - h)) * w_asc
    return (h / (2.0 * math.pi)) * out


@dataclass(frozen=True)
class MomentumDistribution:
    """Momentum probability density on a finite window of p values."""

    p_grid: np.ndarray
    density: np.ndarray
    convention: str = CONVENTION

    def __post_init__(self) -> None:
        object.__setattr__(self, "p_grid", np.asarray(self.p_grid, dtype=float))
        object.__setattr__(self, "density", np.asarray(self.density, dtype=float))
        if np.any(self.density < -1e-15):
            raise DomainError("momentum density must be nonnegative")

    def total_mass(self) -> float:
        return float(np.trapezoid(self.density, self.p_grid))


def momentum_distribution(f: WaveFunction, p_grid: np.ndarray) -> MomentumDistribution:
    """2pi |ft(p)|^2 for a normalized interval-supported state."""
    nsq = norm_squared(f)
    if abs(nsq - 1.0) > 1e-8:
        raise DomainError(f"state is not normalized (|f|^2 = {nsq!r})")
    ft = line_fourier_transform(f, np.asarray(p_grid, dtype=float))
    return MomentumDistribution(
        p_grid=np.asarray(p_grid, dtype=float),
        density=2.0 * math.pi * np.abs(ft) ** 2,
    )


def _piecewise_linear_integral(
    xs: np.ndarray, ys: np.ndarray, lo: float, hi: float
) -> float:
    """Exact integral of the piecewise-linear interpolant over [lo, hi]."""
    if hi <= xs[0] or lo >= xs[-1]:
        return 0.0
    lo = max(lo, float(xs[0]))
    hi = min(hi, float(xs[-1]))
    grid = np.unique(np.concatenate((xs, [lo, hi])))
    grid = grid[(grid >= lo) & (grid <= hi)]
    vals = np.interp(grid, xs, ys)
    return float(np.trapezoid(vals, grid))


def probability_position(f: WaveFunction, region: Interval) -> float:
    """P(x in region) = integral over region of |f|^2 for a normalized state."""
    x = f.grid.points
    a, b = f.grid.interval.a, f.grid.interval.b
    fa, fb = f.boundary_values()
    if f.grid.wrap:
        xs = np.concatenate(([a], x))
        ys = np.concatenate(([abs(f.values[-1]) ** 2], np.abs(f.values) ** 2))
    else:
        xs = np.concatenate(([a], x, [b]))
        ys = np.concatenate(([abs(fa) ** 2], np.abs(f.values) ** 2, [abs(fb) ** 2]))
    hi = region.b if not region.half_line else xs[-1]
    return _piecewise_linear_integral(xs, ys, region.a, float(hi))


def probability_momentum(dist: MomentumDistribution, window: Interval) -> float:
    """Integral of the momentum density over a sub-window; no extrapolation."""
    p = dist.p_grid
    hi = window.b
    if window.half_line:
        hi = float(p[-1])
    if window.a < p[0] - 1e-12 or hi > p[-1] + 1e-12:
        raise DomainError(
            f"window [{window.a}, {hi}] exceeds the computed p range "
            f"[{p[0]}, {p[-1]}]"
        )
    return _piecewise_linear_integral(p, dist.density, window.a, float(hi))


@dataclass(frozen=True)
class UncertaintyResult:
    dq: float
    dp: float
    product: float


def _derivative_samples(f: WaveFunction) -> tuple[np.ndarray, complex, complex]:
    if f.derivative is not None:
        da = db = 0.0 + 0.0j
        if f.boundary is not None and f.boundary.deriv_a is not None:
            da, db = complex(f.boundary.deriv_a), complex(f.boundary.deriv_b)
        return f.derivative, da, db
    # interior central differences with zero endpoint values (confined data)
    fa, fb = f.boundary_values()
    padded = np.concatenate(([fa], f.values, [fb]))
    deriv = (padded[2:] - padded[:-2]) / (2.0 * f.grid.h)
    return deriv, 0.0 + 0.0j, 0.0 + 0.0j


def uncertainty_product(f: WaveFunction) -> UncertaintyResult:
    """Position/momentum spreads and their product for a normalized state.

    <P> = Im int conj(f) f' dx and <P^2> = int |f'|^2 dx (quadratic form:
    well defined for Dirichlet data without second-derivative boundary
    terms).  Analytic derivative samples are used when attached; the
    finite-difference fallback is second order and can bias the product
    slightly below 1/2 for near-minimum-uncertainty states, so the hard
    lower-bound check is tightest on the analytic route.
    """
    nsq = norm_squared(f)
    if abs(nsq - 1.0) > 1e-8:
        raise DomainError("uncertainty product requires a normalized state")
    x = f.grid.points
    h = f.grid.h
    fa, fb = f.boundary_values()
    absq = np.abs(f.values) ** 2

    def quad(interior: np.ndarray, end_a: float, end_b: float) -> float:
        s = float(np.sum(interior))
        if not f.grid.wrap:
            s += 0.5 * (end_a + end_b)
        return h * s

    a, b = f.grid.interval.a, f.grid.interval.b
    mean_x = quad(x * absq, a * abs(fa) ** 2, b * abs(fb) ** 2)
    mean_x2 = quad(x**2 * absq, a**2 * abs(fa) ** 2, b**2 * abs(fb) ** 2)
    var_q = mean_x2 - mean_x**2
    deriv, da, db = _derivative_samples(f)
    integrand_p = np.conjugate(f.values) * deriv
    mean_p = quad(
        np.imag(integrand_p),
        float(np.imag(np.conjugate(fa) * da)),
        float(np.imag(np.conjugate(fb) * db)),
    )
    mean_p2 = quad(np.abs(deriv) ** 2, abs(da) ** 2, abs(db) ** 2)
    var_p = mean_p2 - mean_p**2
    dq = math.sqrt(max(var_q, 0.0))
    dp = math.sqrt(max(var_p, 0.0))
    product = dq * dp
    floor = 0.5 - (1e-6 if f.derivative is not None else 1e-3)
    if product < floor:
        raise DomainError(
            f"uncertainty product {product!r} violates the lower bound; "
            "the state data is inconsistent"
        )
    return UncertaintyResult(dq=dq, dp=dp, product=product)
