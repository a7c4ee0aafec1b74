"""Multivariable Hermite polynomials and closed-form Gaussian integrals."""
from .engine import (
    EvalReport,
    GaussIntegralSpec,
    Kind,
    Method,
    RationalIntegralSpec,
    ReducedParams,
    eval_calligraphic_Imn,
    eval_Imn,
    eval_In,
    eval_mIn,
    eval_pImn,
    eval_rational_In,
    evaluate,
    reduce,
)
from .kernels import (
    Family,
    PolyQuery,
    PolyValue,
    gauss_deriv_factor,
    genfn_truncation_residual,
    hermite2,
    hermite2_deriv,
    hermite2_direct_sum,
    hermite_nu,
    hermite_two_index,
    hermite_two_index_deriv,
)
from .oracle import (
    ComparisonRecord,
    OracleReport,
    QuadratureConfig,
    Transform,
    compare,
    integrand_eval,
    moment_oracle,
    quad_integral,
)

__version__ = "0.1.0"
