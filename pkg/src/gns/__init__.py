"""Spectral Galerkin solver for incompressible Navier-Stokes on the
periodic box, with certification of the energy and uniqueness estimates
on computed trajectories.

The periodic box [0, 2*pi)^3 with mean-zero divergence-free Fourier
modes is a surrogate domain: it provides an explicit orthonormal basis
diagonalizing the stiffness form, which is all the Galerkin construction
uses.  No-slip boundaries are not represented.
"""

__version__ = "0.1.0"

from .basis import (
    COSINE,
    MODE_AMPLITUDE,
    SINE,
    BasisMode,
    BasisSet,
    ModeIndex,
    build_basis,
    gram_report,
    polarization_pair,
)
from .errors import (
    ConfigError,
    CsvError,
    DimensionError,
    DivergenceError,
    GnsError,
    ResolutionError,
)
from .field import (
    BeltramiShell,
    CoefficientVector,
    ExplicitCoefficients,
    GridField,
    RandomBand,
    TaylorGreen,
    grid_to_coefficients,
    l2_inner,
    norm_h1,
    norm_l2,
    norm_l4,
    project_initial,
    spectral_divergence_max,
    to_grid,
)
from .integrator import (
    BandPattern,
    ConstantForcing,
    ExponentialDecayForcing,
    ScenarioConfig,
    SingleModePattern,
    Trajectory,
    ZeroForcing,
    refine_study,
    simulate,
    step,
    stokes_oracle,
)
from .nonlinear import (
    TriadTensor,
    assemble_tensor,
    nonlinear_term,
    nonlinear_term_pseudospectral,
    skew_report,
    transport_pairing,
    weak_pairing,
)
from .verifier import (
    BoundReport,
    SeparationSeries,
    apriori_bound,
    assumption_A,
    energy_identity,
    interpolation_check,
    ladyzhenskaya_ratio,
    parseval_sup,
    pointwise_bound_check,
    quadratic_root_bound,
    remark1_check,
    twin_uniqueness,
    weak_residual,
)
