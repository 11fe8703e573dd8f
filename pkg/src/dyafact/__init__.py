"""dyafact: geometrically convergent dyadic factorial expansions for
special functions (Ei, Airy, Bessel-K, digamma, erfc, incomplete gamma)
with remainder-driven truncation planning, matrix-scale dyadic resolvent
identities, and an independent oracle suite."""

from .scalar import (
    CoefficientStream,
    DomainError,
    PoleError,
    StirlingTable,
    factorial_series_eval,
    factorial_to_borel,
    lerch_phi_1,
    ln_gamma,
    pochhammer,
    polylog,
    polylog_deriv,
    stirling_first,
)
from .dyadic import (
    CutProximityError,
    DyadicPlan,
    RemainderModel,
    dyadic_cauchy_deriv_partial,
    dyadic_cauchy_partial,
    dyadic_reciprocal_partial,
    ei_left_model,
    ei_stokes_model,
    plan_truncation,
    psi_model,
    ramified_partial,
    remainder_bound,
)
from .specfun import (
    EvalResult,
    ei_left,
    ei_stokes,
    ei_stokes_minus,
    erfc_dyadic,
    incomplete_gamma_dyadic,
    psi_dyadic,
    psi_half_difference,
    verify_strange_identity,
)
from .borel import (
    BorelKernel,
    CoefficientTable,
    airy_from_h,
    airy_h,
    bessel_h,
    bessel_k_dyadic,
    compute_dkm,
    compute_dm,
    get_kernel,
    get_table,
    kernel_eval,
)
from .operators import (
    HermitianOperator,
    OperatorSeriesReport,
    evolution,
    fractional_power_dyadic,
    inverse_dyadic,
    read_matrix_text,
    resolvent_double_sum,
    resolvent_dyadic,
    write_matrix_text,
)

__version__ = "0.1.0"
