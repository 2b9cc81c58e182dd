"""Spectral problems, unitary dynamics and impenetrable barriers in 1D.

Natural units hbar = 1, 2m = 1 throughout: H = -d^2/dx^2 + V.
"""

from .core import (
    BoundaryCondition,
    BoundaryData,
    Dirichlet,
    DomainError,
    GeneralU,
    Grid,
    GridMismatchError,
    Interval,
    NumericalError,
    QuasiPeriodic,
    Spectrum,
    UnitaryMatrix2,
    WaveFunction,
    gaussian_packet,
    inner_product,
    norm_squared,
    normalize,
    restrict_indicator,
)
from .closed_form import (
    CalogeroParams,
    MultitrapParams,
    calogero_spectrum,
    centrifugal_ground_state,
    infinite_well_spectrum,
    kinetic_spectrum,
    laguerre,
    momentum_spectrum,
    multitrap_ground_state,
    well_state,
)
from .extension_theory import (
    DeficiencyBasis,
    ExtensionElement,
    assemble_extension_element,
    boundary_residual,
    classify_extension,
    deficiency_basis,
    quasi_periodic_unitary,
)
from .discrete_solver import (
    CalogeroPotential,
    CentrifugalPotential,
    CustomPotential,
    DiscreteOperator,
    PeriodicCellPotential,
    ZeroPotential,
    assemble,
    convergence_report,
    eigensolve,
    half_line_grid,
    symmetric_grid,
)
from .dynamics import (
    CrankNicolsonPropagator,
    LeakageReport,
    MultitrapSystem,
    SpectralPropagator,
    detect_barriers,
    dirichlet_well_propagator,
    evolve,
    extension_divergence,
    free_line_propagator,
    leakage,
    potential_from_ground_state,
    quasi_periodic_propagator,
)
from .kinematics import (
    MomentumDistribution,
    momentum_distribution,
    probability_momentum,
    probability_position,
    uncertainty_product,
)
from .direct_integral import (
    BandTable,
    FiberDecomposition,
    LineFunction,
    band_structure,
    cell_grid,
    decompose,
    evolve_fibers,
    fiber_hamiltonian,
    reconstruct,
    spectrum_union_check,
)

__version__ = "0.1.0"
