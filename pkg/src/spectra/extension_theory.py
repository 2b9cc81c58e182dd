"""Self-adjoint extensions of the minimal kinetic operator on [0, pi].

The closed symmetric operator -d^2/dx^2 with value and derivative vanishing
at both endpoints has deficiency indices (2, 2); its extensions are labelled
by 2x2 unitaries acting between the deficiency subspaces spanned by four
exponentials.  This module builds that correspondence concretely: the
deficiency basis, assembly of extension-domain elements g = f + w + W w,
the unitary matrix realizing quasi-periodic boundary conditions, residual
checks of those conditions, and classification of a given unitary.

The quasi-periodic orientation used throughout is g(pi) = e^{i alpha} g(0)
(and the same phase relation for g'); see :class:`spectra.core.QuasiPeriodic`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    BoundaryData,
    DomainError,
    UnitaryMatrix2,
    WaveFunction,
    endpoint_extrapolation,
    unitarity_defect,
)

PI = math.pi


@dataclass(frozen=True)
class ExpFunction:
    """c * exp(s x) on [0, pi] with exact endpoint and derivative data."""

    coeff: complex
    exponent: complex

    def __call__(self, x) -> np.ndarray:
        return self.coeff * np.exp(self.exponent * np.asarray(x, dtype=float))

    def derivative(self, x) -> np.ndarray:
        return self.exponent * self(x)

    def value(self, x: float) -> complex:
        return self.coeff * cmath.exp(self.exponent * x)

    def scaled(self, c: complex) -> "ExpFunction":
        return ExpFunction(coeff=c * self.coeff, exponent=self.exponent)


@dataclass(frozen=True)
class DeficiencyBasis:
    """The four exponentials spanning the deficiency subspaces.

    psi_plus_* solve  -f'' = +2i f,  psi_minus_* solve  -f'' = -2i f.
    The coefficients are the customary printed ones, under which each
    function has squared norm 1/2 on [0, pi]; :meth:`orthonormalized`
    rescales by sqrt(2) to a genuinely orthonormal pair in each subspace.
    """

    psi_plus_1: ExpFunction
    psi_plus_2: ExpFunction
    psi_minus_1: ExpFunction
    psi_minus_2: ExpFunction

    def plus(self) -> tuple[ExpFunction, ExpFunction]:
        return (self.psi_plus_1, self.psi_plus_2)

    def minus(self) -> tuple[ExpFunction, ExpFunction]:
        return (self.psi_minus_1, self.psi_minus_2)

    def orthonormalized(self) -> "DeficiencyBasis":
        r = math.sqrt(2.0)
        return DeficiencyBasis(
            psi_plus_1=self.psi_plus_1.scaled(r),
            psi_plus_2=self.psi_plus_2.scaled(r),
            psi_minus_1=self.psi_minus_1.scaled(r),
            psi_minus_2=self.psi_minus_2.scaled(r),
        )


def deficiency_basis() -> DeficiencyBasis:
    c_grow = (math.exp(2.0 * PI) - 1.0) ** -0.5
    c_decay = (1.0 - math.exp(-2.0 * PI)) ** -0.5
    return DeficiencyBasis(
        psi_plus_1=ExpFunction(c_grow, 1.0 - 1.0j),
        psi_plus_2=ExpFunction(c_decay, -(1.0 - 1.0j)),
        psi_minus_1=ExpFunction(c_grow, 1.0 + 1.0j),
        psi_minus_2=ExpFunction(c_decay, -(1.0 + 1.0j)),
    )


@dataclass(frozen=True)
class ExtensionElement:
    """Element g = f + w + W w of an extension domain, with H_U g attached.

    ``g`` carries exact endpoint values/derivatives (the deficiency parts are
    exponentials and f vanishes to first order at both ends), so boundary
    residuals of assembled elements are limited only by round-off.
    """

    g: WaveFunction
    action: WaveFunction  # samples of H_U g
    w_minus: tuple[complex, complex]
    w_plus: tuple[complex, complex]
    matrix: UnitaryMatrix2


def _core_boundary_defect(f: WaveFunction) -> float:
    data = endpoint_extrapolation(f)
    scale = max(float(np.max(np.abs(f.values))), 1e-300)
    dscale = scale / f.grid.h
    return max(
        abs(data.value_a) / scale,
        abs(data.value_b) / scale,
        abs(data.deriv_a) / dscale,
        abs(data.deriv_b) / dscale,
    )


def _second_difference(values: np.ndarray, h: float) -> np.ndarray:
    # Dirichlet-style second difference: ghost values 0 beyond both ends,
    # which is consistent for f with vanishing value and slope there.
    padded = np.concatenate(([0.0], values, [0.0]))
    return (padded[:-2] - 2.0 * padded[1:-1] + padded[2:]) / h**2


def assemble_extension_element(
    U: UnitaryMatrix2,
    f: WaveFunction,
    w_minus: tuple[complex, complex],
    core_tol: float = 1e-6,
) -> ExtensionElement:
    """Assemble g = f + w + W w and its image under the extension.

    ``f`` must lie in the minimal domain: value and first derivative both
    vanishing at 0 and pi (checked by endpoint extrapolation within
    ``core_tol`` relative to the amplitude).  ``w_minus`` are coefficients
    in the printed psi_minus basis; W maps psi_minus_j to the U-image of
    psi_plus_j.  The image is H_U g = -f'' - 2i w + 2i W w.
    """
    basis = deficiency_basis()
    grid = f.grid
    if abs(grid.interval.a) > 1e-12 or abs(grid.interval.b - PI) > 1e-12:
        raise DomainError("extension elements live on [0, pi]")
    if np.any(np.abs(f.values) > 0) and _core_boundary_defect(f) > core_tol:
        raise DomainError(
            "f is not in the minimal domain: endpoint value/derivative "
            "does not vanish within tolerance"
        )
    a1, a2 = complex(w_minus[0]), complex(w_minus[1])
    u = U.as_array()
    b1, b2 = u @ np.array([a1, a2])

    x = grid.points
    minus_part = a1 * basis.psi_minus_1(x) + a2 * basis.psi_minus_2(x)
    plus_part = b1 * basis.psi_plus_1(x) + b2 * basis.psi_plus_2(x)
    g_values = f.values + minus_part + plus_part

    def endpoint(kind: str, x0: float) -> complex:
        if kind == "value":
            return (
                a1 * basis.psi_minus_1.value(x0)
                + a2 * basis.psi_minus_2.value(x0)
                + b1 * basis.psi_plus_1.value(x0)
                + b2 * basis.psi_plus_2.value(x0)
            )
        return (
            a1 * basis.psi_minus_1.exponent * basis.psi_minus_1.value(x0)
            + a2 * basis.psi_minus_2.exponent * basis.psi_minus_2.value(x0)
            + b1 * basis.psi_plus_1.exponent * basis.psi_plus_1.value(x0)
            + b2 * basis.psi_plus_2.exponent * basis.psi_plus_2.value(x0)
        )

    boundary = BoundaryData(
        value_a=endpoint("value", 0.0),
        value_b=endpoint("value", PI),
        deriv_a=endpoint("deriv", 0.0),
        deriv_b=endpoint("deriv", PI),
    )
    g = WaveFunction(grid=grid, values=g_values, boundary=boundary)

    action_values = (
        -_second_difference(f.values, grid.h) - 2j * minus_part + 2j * plus_part
    )
    action = WaveFunction(grid=grid, values=action_values)
    return ExtensionElement(
        g=g, action=action, w_minus=(a1, a2), w_plus=(b1, b2), matrix=U
    )


def closed_form_qp_candidate(alpha: float) -> np.ndarray:
    """The closed-form candidate matrix for the quasi-periodic extension.

    Diagonal entries -(1+i)/2; off-diagonal carries chi = e^{i alpha}
    through the ratio (1 + chi e^pi)/(1 + conj(chi) e^pi), with the lower
    entry the complex conjugate of the upper.  Returned unchecked: callers
    must gate it through a unitarity test before use.
    """
    chi = cmath.exp(1j * alpha)
    diag = -(1.0 + 1.0j) / 2.0
    u12 = ((1j - 1.0) / 2.0) * chi * (1.0 + chi * math.exp(PI)) / (
        1.0 + chi.conjugate() * math.exp(PI)
    )
    return np.array([[diag, u12], [np.conjugate(u12), diag]], dtype=complex)


def _boundary_functional(func: ExpFunction, alpha: float) -> np.ndarray:
    """(u(pi) - e^{i alpha} u(0), u'(pi) - e^{i alpha} u'(0)) for one exponential."""
    chi = cmath.exp(1j * alpha)
    v = func.value(PI) - chi * func.value(0.0)
    d = func.exponent * (func.value(PI) - chi * func.value(0.0))
    return np.array([v, d], dtype=complex)


def derive_qp_unitary(alpha: float) -> np.ndarray:
    """Solve for the unitary enforcing the quasi-periodic boundary relation.

    For g = f + w + W w the boundary functional vanishes for all w exactly
    when  A_minus + A_plus U = 0  on the deficiency basis, i.e.
    U = -A_plus^{-1} A_minus with columns the boundary functionals of the
    basis exponentials.
    """
    basis = deficiency_basis()
    a_minus = np.column_stack(
        [_boundary_functional(v, alpha) for v in basis.minus()]
    )
    a_plus = np.column_stack([_boundary_functional(v, alpha) for v in basis.plus()])
    return -np.linalg.solve(a_plus, a_minus)


@dataclass(frozen=True)
class QPUnitaryResult:
    """Outcome of building the quasi-periodic unitary for a given alpha."""

    alpha: float
    matrix: UnitaryMatrix2
    candidate: np.ndarray
    candidate_defect: float
    fallback_used: bool
    report: str


def quasi_periodic_unitary(alpha: float, gate_tol: float = 1e-10) -> QPUnitaryResult:
    """Unitary whose extension has the quasi-periodic boundary conditions.

    The closed-form candidate is assembled first and gated through a
    unitarity check.  If it fails (and it does: its Gram matrix has
    off-diagonal -u12), the matrix is derived from the boundary conditions
    instead and the failure is reported rather than silently patched.
    """
    candidate = closed_form_qp_candidate(alpha)
    defect = unitarity_defect(candidate)
    if defect <= gate_tol:
        return QPUnitaryResult(
            alpha=alpha,
            matrix=UnitaryMatrix2.from_array(candidate),
            candidate=candidate,
            candidate_defect=defect,
            fallback_used=False,
            report="closed-form candidate passed the unitarity gate",
        )
    gram = candidate.conj().T @ candidate
    bad = [
        f"(U^H U)[{i},{j}] = {gram[i, j]:.6g}"
        for i in range(2)
        for j in range(2)
        if abs(gram[i, j] - (1.0 if i == j else 0.0)) > gate_tol
    ]
    derived = derive_qp_unitary(alpha)
    d2 = unitarity_defect(derived)
    if d2 > gate_tol:
        raise DomainError(
            f"derived quasi-periodic matrix failed unitarity too (defect {d2:.3e})"
        )
    report = (
        f"closed-form candidate failed unitarity (defect {defect:.3e}; "
        + "; ".join(bad)
        + "); using the boundary-condition derivation instead"
    )
    return QPUnitaryResult(
        alpha=alpha,
        matrix=UnitaryMatrix2.from_array(derived),
        candidate=candidate,
        candidate_defect=defect,
        fallback_used=True,
        report=report,
    )


def boundary_residual(g: WaveFunction, alpha: float) -> float:
    """Scaled violation of g(pi) = e^{i alpha} g(0) and the derivative relation.

    Endpoint values and derivatives come from attached analytic data when
    present, otherwise from one-sided extrapolation.  The result is
    max(value mismatch, derivative mismatch) divided by the sup norms of
    g and g'.
    """
    data = endpoint_extrapolation(g)
    chi = cmath.exp(1j * alpha)
    v_res = abs(complex(data.value_b) - chi * complex(data.value_a))
    d_res = abs(complex(data.deriv_b) - chi * complex(data.deriv_a))
    vals = np.concatenate((g.values, [data.value_a, data.value_b]))
    sup = float(np.max(np.abs(vals)))
    if g.derivative is not None:
        dsup_interior = float(np.max(np.abs(g.derivative)))
    else:
        dsup_interior = float(
            np.max(np.abs(np.gradient(g.values, g.grid.h)))
        )
    dsup = max(dsup_interior, abs(complex(data.deriv_a)), abs(complex(data.deriv_b)))
    scale = max(sup, dsup)
    if scale == 0.0:
        raise DomainError("boundary residual of the zero function is undefined")
    return max(v_res, d_res) / scale


@dataclass(frozen=True)
class ExtensionClass:
    """Classification tag: 'infinite_well', 'quasi_periodic' or 'other'."""

    kind: str
    alpha: Optional[float] = None


def classify_extension(U: UnitaryMatrix2, tol: float = 1e-10) -> ExtensionClass:
    """Match U against the named families.

    U = -1 is the infinite well.  A quasi-periodic matrix is recognized by
    inverting its off-diagonal entry for the phase chi = e^{i alpha} and
    checking the full matrix; anything else is 'other'.
    """
    m = U.as_array()
    if np.max(np.abs(m + np.eye(2))) <= tol:
        return ExtensionClass(kind="infinite_well")
    # invert u12 = -((1-i)/2) * (1 + chi e^pi)/(e^pi + chi) for chi
    rho = m[0, 1] / (-(1.0 - 1.0j) / 2.0)
    denom = rho - math.exp(PI)
    if abs(denom) > 1e-14:
        chi = (1.0 - rho * math.exp(PI)) / denom
        if abs(abs(chi) - 1.0) < 1e-6:
            alpha = float(np.angle(chi)) % (2.0 * PI)
            derived = derive_qp_unitary(alpha)
            if np.max(np.abs(m - derived)) <= max(tol, 1e-10):
                return ExtensionClass(kind="quasi_periodic", alpha=alpha)
    return ExtensionClass(kind="other")
