"""Theta bases, conjugate-curve transforms and boundary-chart algebra.

Desk-scale computational realization of theta-function section bases on CM
elliptic curves, the Dolbeault pairings and Penrose-type transforms between
a curve and its complex conjugate, Fourier-Jacobi coefficient extraction
with its boundary-class identity, and the exact algebra of boundary charts.
"""

from . import kernels
from .boundary import (
    ChartState,
    FlagP2,
    HeisenbergElement,
    NilpotentElement,
    OrbitCase,
    chart_action_bminus,
    chart_action_bplus,
    classify_orbit_case,
    domain_membership_bplus,
    hermitian_dual_flag,
    no_two_cone_check,
    positivity,
    transversality,
    tube_domain_membership,
)
from .errors import (
    BundleMismatch,
    ChartSingularity,
    CmThetaError,
    ConfigError,
    IndexOutOfRange,
    InputsProportional,
    NonconvergentModulus,
    NonIntegralDegree,
    NonPeriodicInput,
    NonPeriodicIntegrand,
    NotInLattice,
    UnsupportedIndex,
)
from .fourier_jacobi import (
    FJSeries,
    FJSide,
    boundary_class,
    coefficient_identity_report,
    extract_coefficient,
    opposite_component_pairings,
    random_series,
)
from .gaussian import GaussianRational
from .lattice import CurveTag, Lattice, contains, embed, reduce
from .pairing import (
    DolbeaultForm,
    QuadratureGrid,
    gram_matrix,
    hermitian_inner,
    integrate_periodic,
    serre_pairing,
)
from .theta import (
    LineBundleData,
    Section,
    ThetaCharacteristic,
    basis,
    basis_section,
    degree_mu,
    factor_of_automorphy,
    section_from_coeffs,
    theta_series,
    zero_section,
)
from .transforms import (
    CohomologyClass,
    RelativeForm,
    check_map,
    class_equal,
    dbar_exact_form,
    penrose_dolbeault,
    penrose_relative,
    product_kernel,
    relative_kernel,
    transform_matrix,
)

__version__ = "0.1.0"

kernel_backend = kernels.backend_name
