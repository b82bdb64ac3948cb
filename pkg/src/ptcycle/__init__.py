"""Canonical-ensemble thermodynamics of a boson coupled to a boson bath with
a PT-symmetric non-Hermitian coupling: mode spectra, closed-form ensemble
quantities, Carnot and T-lambda heat cycles, and the Maxwell construction
that reinterprets the broken regime as a two-phase system. hbar = k_B = 1.
"""

from .errors import PtcycleError
from .numerics import Contour, NumericsConfig, Plane
from .spectrum import (
    ClassifiedGap,
    CouplingParams,
    GapKind,
    ModelParams,
    SpectralSplit,
    TimeDependence,
    coincidence_time,
    dyson_gamma,
    lambda_from_couplings,
    mu,
    mu_imag,
    oscillation_period,
    split_at_time,
    static_split,
)
from .thermo import (
    EvalDomain,
    ThermoPoint,
    entropy,
    free_energy,
    heat_capacity,
    internal_energy,
    partition_function,
    pressure,
    thermo_point,
)
from .cycles import (
    CycleKind,
    CyclePoint,
    CycleReport,
    CycleStep,
    IsentropePath,
    PathLabel,
    StepKind,
    build_cycle,
    entropy_match_lambda,
    step_integrals,
    stirling_matching_cv,
    stirling_reference_efficiency,
    time_isentrope_solve,
    trace_isentrope_lambda,
    trace_isentrope_nu,
)
from .phase import (
    MixtureState,
    PhaseRegions,
    critical_temperature_scan,
    heterogeneous_entropy,
    heterogeneous_free_energy,
    isotherm_area,
    lever_fractions,
    phase_regions,
    pressure_zeros,
    spinodal_interval,
)

__version__ = "0.1.0"
