"""Translated singularity swap quadrature for nearly singular line integrals in 3D."""
from .basis_integrals import (
    elliptic_KE,
    fourier_modified_table,
    fourier_std_table,
    monomial_std_table,
    monomial_translated_table,
    mu_table,
)
from .curves import (
    ComplexRoot,
    Panel,
    ParametricCurve,
    PeriodicGrid,
    adaptive_panelize,
    circle,
    find_root,
    get_curve,
    helix,
    legendre_coeffs,
    line,
    squared_distance,
    starfish3d,
    tangle,
)
from .errors import (
    DomainError,
    MaxDepthExceeded,
    NonConvergence,
    OracleNotConverged,
    RecurrenceUnstable,
    RejectionBudgetExceeded,
    ShiftTooCloseToNode,
    TSSQError,
)
from .interp import (
    barycentric_eval,
    fourier_coeffs,
    modified_fourier_fast,
    modified_fourier_transform,
    trig_interp_eval,
    vandermonde_solve,
)
from .ssq import (
    EvalReport,
    PanelDiscretization,
    PeriodicDiscretization,
    Policy,
    PowerTerm,
    SwapContext,
    assemble_numerator,
    cancellation_estimate,
    evaluate,
    in_endpoint_cone,
    scalar_term,
    ssq_closed,
    ssq_open,
    stable_a0,
    stable_d1,
)
from .stokes import SlenderBodySpec, doublet, power_split, slender_body_velocity, stokeslet

__version__ = "0.1.0"
