"""warpmap: explicit harmonic and wave maps into warped-product surfaces.

The construction: for targets h = A(R) dR^2 - del2*B(R) dS^2 over a
conformally flat domain, the traveling-frame ansatz R = R(a*y - b*x),
S = a*x + b*y + H(a*y - b*x) reduces the harmonic-map system to a
separable ODE R'^2 = phi(R) plus a quadrature for H.  The package solves
the reduction numerically, evaluates the known closed-form families, and
verifies everything independently through Euler-Lagrange and
first-integral residuals.
"""

from .closedforms import (
    ClosedFormMap,
    EmbeddingR3,
    ellipsoid_map,
    embed,
    hyperboloid_map,
    induced_metric_check,
    mixed_map,
    mixed_target,
)
from .errors import NumericalError, ValidationError, WarpmapError
from .integrate import (
    IntegratorConfig,
    MapSample,
    ODESolution,
    assemble_map,
    integrate_R,
    quadrature_H,
)
from .metrics import (
    CATALOG_NAMES,
    DomainMetric,
    RadialProfile,
    SignaturePair,
    TargetMetric,
    catalog_lookup,
    curvature_classify,
    gauss_curvature,
    profile_from_spec,
)
from .reduction import (
    AdmissibleInterval,
    ReducedCoefficients,
    ReductionParams,
    TravelingFrame,
    admissible_intervals,
    coefficients,
    h_prime,
    phi,
    phi_prime,
    recover_first_integrals,
)
from .verify import (
    GridSpec,
    ResidualReport,
    WaveEvolveConfig,
    WaveResult,
    el_residual,
    energy_density,
    first_integral_residual,
    wave_evolve,
)

__version__ = "0.1.0"
