"""Independent ground truth for the closed forms.

Two routes, neither of which goes through the reduced parameters:

* :func:`moment_oracle` multiplies the polynomial factors out into monomials
  (explicit Hermite sums and the binomial theorem) and integrates each power
  of x against the Gaussian with the exact moment recurrence.
* :func:`quad_integral` integrates the raw integrand numerically with a
  double-exponential trapezoid rule on the whole real line.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import engine
from .engine import EvalReport, GaussIntegralSpec, Kind, RationalIntegralSpec
from .errors import FloatOverflowError
from .kernels import UNIT_ROUNDOFF as _U, hermite2_value

_LOG_FLOAT_MAX = math.log(1.7976931348623157e308)

# weights below exp(-1745) contribute nothing even after multiplication by
# any polynomial the engine can produce at that distance
_NEGLIGIBLE_EXPONENT = -1745.0


class Transform(str, enum.Enum):
    DOUBLE_EXPONENTIAL = "DoubleExponential"
    RATIONAL_SUBSTITUTION = "RationalSubstitution"


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_refinement_levels: int = 12
    #: ``None`` picks DoubleExponential for Gaussian weights and
    #: RationalSubstitution for the rational weight
    transform: Transform | None = None

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        # convergence is only judged from level 3 on
        if not 3 <= self.max_refinement_levels <= 15:
            raise ValueError("max_refinement_levels must lie in [3, 15]")
        if self.transform is not None:
            object.__setattr__(self, "transform", Transform(self.transform))


@dataclass(frozen=True)
class OracleReport:
    value: float
    err_est: float
    evaluations: int
    converged: bool = True
    method: engine.Method = engine.Method.MOMENT_ORACLE


@dataclass(frozen=True)
class ComparisonRecord:
    closed_value: float | None
    oracle_value: float | None
    discrepancy: float
    passed: bool
    rel_tol: float
    closed_err: float
    oracle_err: float
    #: True when the comparison passes only because the combined error
    #: estimate exceeds ``rel_tol``
    by_error_bound: bool = False
    notes: list[str] = field(default_factory=list)


# -- moment oracle -----------------------------------------------------------
#
# Polynomials are lists of (coefficient, absolute error bound) in ascending
# powers of x.

def _linear_power_poly(m: int, a: float, b: float):
    """(a x + b)^m."""
    out = []
    for i in range(m + 1):
        term = float(math.comb(m, i)) * a**i * b ** (m - i)
        out.append((term, (m + 2) * _U * abs(term)))
    return out


def _hermite_poly(n: int, a: float, b: float, y: float):
    """H_n(a x + b, y) expanded from the explicit sum over y^k (x - b)^j."""
    buckets = [[] for _ in range(n + 1)]
    for k in range(n // 2 + 1):
        j = n - 2 * k
        outer = math.factorial(n) // (math.factorial(j) * math.factorial(k))
        for i in range(j + 1):
            coef = float(outer * math.comb(j, i))
            buckets[i].append(coef * a**i * b ** (j - i) * y**k)
    out = []
    for terms in buckets:
        c = math.fsum(terms)
        bound = (n + 4) * _U * math.fsum(abs(t) for t in terms) + _U * abs(c)
        out.append((c, bound))
    return out


def _monomial(p: int):
    return [(0.0, 0.0)] * p + [(1.0, 0.0)]


def _poly_mul(p, q):
    prods = [[] for _ in range(len(p) + len(q) - 1)]
    errs = [0.0] * len(prods)
    for i, (pc, pe) in enumerate(p):
        for j, (qc, qe) in enumerate(q):
            v = pc * qc
            prods[i + j].append(v)
            errs[i + j] += abs(pc) * qe + abs(qc) * pe + pe * qe + _U * abs(v)
    out = []
    for terms, e in zip(prods, errs):
        c = math.fsum(terms)
        out.append((c, e + _U * abs(c)))
    return out


def integrand_polynomial(spec: GaussIntegralSpec):
    """Monomial coefficients (with error bounds) of the integrand's polynomial factor."""
    k = spec.kind
    if k is Kind.IN:
        return _hermite_poly(spec.n, spec.a, spec.b, spec.y)
    if k is Kind.M_IN:
        return _poly_mul(_monomial(spec.m), _hermite_poly(spec.n, spec.a, spec.b, spec.y))
    if k is Kind.SCRIPT_IMN:
        return _poly_mul(
            _linear_power_poly(spec.m, spec.a, spec.b),
            _linear_power_poly(spec.n, spec.c, spec.d),
        )
    pair = _poly_mul(
        _hermite_poly(spec.m, spec.a, spec.b, spec.y),
        _hermite_poly(spec.n, spec.c, spec.d, spec.z),
    )
    if k is Kind.P_IMN:
        return _poly_mul(_monomial(spec.p), pair)
    return pair


def gaussian_moments(degree: int, f: float, alpha: float) -> list[float]:
    """Moments of exp(-f x^2 + alpha x) divided by the zeroth moment.

    M_{k+1} = (k M_{k-1} + alpha M_k) / (2f) follows from integrating the
    derivative of x^k exp(-f x^2 + alpha x).  Reversing x maps alpha to
    -alpha and flips odd moments, so the recurrence is run with |alpha|
    where every term is non-negative.
    """
    s = abs(alpha)
    mu = [1.0, s / (2 * f)]
    for k in range(1, degree):
        mu.append((k * mu[k - 1] + s * mu[k]) / (2 * f))
    mu = mu[: degree + 1]
    if alpha < 0:
        mu = [v if j % 2 == 0 else -v for j, v in enumerate(mu)]
    return mu


def moment_oracle(spec: GaussIntegralSpec, nmax: int | None = None) -> OracleReport:
    engine.validate(spec, nmax)
    poly = integrand_polynomial(spec)
    degree = len(poly) - 1
    mu = gaussian_moments(degree, spec.f, spec.alpha)
    terms = []
    err = 0.0
    for j, ((c, ce), m) in enumerate(zip(poly, mu)):
        v = c * m
        terms.append(v)
        err += ce * abs(m) + abs(v) * (4 * j + 3) * _U
    s = math.fsum(terms)
    err += _U * abs(s)
    if not math.isfinite(s):
        raise FloatOverflowError("moment expansion overflows")

    log_m0 = 0.5 * math.log(math.pi / spec.f) + spec.alpha**2 / (4 * spec.f)
    rel_m0 = 4 * _U * (abs(0.5 * math.log(math.pi / spec.f)) + spec.alpha**2 / (4 * spec.f)) + 2 * _U
    log_scale = log_m0 + (math.log(abs(s)) if s else 0.0)
    if log_scale > _LOG_FLOAT_MAX:
        raise FloatOverflowError("moment expansion exceeds the floating range")
    m0 = math.exp(log_m0)
    value = m0 * s
    return OracleReport(
        value=value,
        err_est=m0 * err + abs(value) * rel_m0,
        evaluations=sum(1 for c, _ in poly if c != 0.0),
    )


# -- quadrature ----------------------------------------------------------------

def _gauss_integrand(spec: GaussIntegralSpec):
    def poly(x):
        k = spec.kind
        if k is Kind.IN:
            return hermite2_value(spec.n, spec.a * x + spec.b, spec.y)
        if k is Kind.M_IN:
            return x**spec.m * hermite2_value(spec.n, spec.a * x + spec.b, spec.y)
        if k is Kind.SCRIPT_IMN:
            return (spec.a * x + spec.b) ** spec.m * (spec.c * x + spec.d) ** spec.n
        pair = hermite2_value(spec.m, spec.a * x + spec.b, spec.y) * hermite2_value(
            spec.n, spec.c * x + spec.d, spec.z
        )
        if k is Kind.P_IMN:
            return x**spec.p * pair
        return pair

    def func(x):
        x = np.asarray(x, dtype=float)
        expo = -spec.f * x * x + spec.alpha * x
        live = expo > _NEGLIGIBLE_EXPONENT
        out = np.zeros_like(x)
        if np.any(live):
            xs = x[live]
            with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                vals = poly(xs) * np.exp(expo[live])
            if not np.all(np.isfinite(vals)):
                raise FloatOverflowError("integrand overflows")
            out[live] = vals
        return out

    return func


def _rational_integrand(spec: RationalIntegralSpec):
    def func(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore", under="ignore"):
            ax = np.abs(x)
            big = ax > 1e100
            safe = np.where(big, 1.0, x)
            log_den = np.where(
                big,
                math.log(spec.c) + 2 * np.log(np.where(big, ax, 1.0)),
                np.log1p(spec.c * safe * safe),
            )
            lin = spec.a * x + spec.b
            if spec.n == 0:
                return np.exp(-spec.nu * log_den)
            log_num = spec.n * np.log(np.abs(lin))
            sign = np.where(lin < 0, (-1.0) ** spec.n, 1.0)
            val = sign * np.exp(log_num - spec.nu * log_den)
        return np.where(lin == 0, 0.0, val)

    return func


def integrand_eval(spec: GaussIntegralSpec | RationalIntegralSpec, x: float) -> float:
    if isinstance(spec, RationalIntegralSpec):
        return float(_rational_integrand(spec)(np.array([x]))[0])
    return float(_gauss_integrand(spec)(np.array([x]))[0])


def _transform(kind: Transform, center: float, scale: float):
    """Map t in R onto x in R with doubly-exponential endpoint decay.

    DoubleExponential is x = sinh(pi/2 sinh t).  RationalSubstitution is the
    compactification x = u / (1 - u^2) of u in (-1, 1), itself sampled at
    tanh-sinh nodes u = tanh(pi/2 sinh t); it is written as sinh(pi sinh t)/2
    so that 1 - u^2 is never formed.
    """
    if kind is Transform.DOUBLE_EXPONENTIAL:
        def phi(t):
            s = 0.5 * np.pi * np.sinh(t)
            return center + scale * np.sinh(s), scale * 0.5 * np.pi * np.cosh(t) * np.cosh(s)

        def reach(r):
            return math.asinh(2 / math.pi * math.asinh(r / scale))
    else:
        def phi(t):
            s = 0.5 * np.pi * np.sinh(t)
            return (
                center + scale * 0.5 * np.sinh(2 * s),
                scale * 0.5 * np.pi * np.cosh(t) * np.cosh(2 * s),
            )

        def reach(r):
            return math.asinh(math.asinh(2 * r / scale) / math.pi)

    return phi, reach


def _quad_setup(spec, config: QuadratureConfig):
    if isinstance(spec, RationalIntegralSpec):
        engine.check_rational(spec)
        transform = config.transform or Transform.RATIONAL_SUBSTITUTION
        center, scale = 0.0, 1 / math.sqrt(spec.c)
        radius = 1e150 * scale
        degree = spec.n
        func = _rational_integrand(spec)
    else:
        engine.validate(spec)
        transform = config.transform or Transform.DOUBLE_EXPONENTIAL
        center = spec.alpha / (2 * spec.f)
        scale = 1 / math.sqrt(spec.f)
        radius = math.sqrt((-_NEGLIGIBLE_EXPONENT + spec.alpha**2 / (4 * spec.f)) / spec.f) + 1
        degree = sum(spec.used_indices().values())
        func = _gauss_integrand(spec)
    return func, transform, center, scale, radius, degree


def quad_integral(
    spec: GaussIntegralSpec | RationalIntegralSpec,
    config: QuadratureConfig | None = None,
) -> OracleReport:
    """Trapezoid rule in the transformed variable, halving the step per level.

    Converged once two successive levels differ by less than
    ``max(abs_tol, rel_tol |value|)``, or by less than the rounding noise of
    the sum itself, which no refinement can reduce.
    """
    config = config or QuadratureConfig()
    func, transform, center, scale, radius, degree = _quad_setup(spec, config)
    phi, reach = _transform(transform, center, scale)
    t_max = reach(radius)

    h = 0.5
    k = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
    x, dx = phi(k * h)
    g = func(x) * dx
    total = math.fsum(g)
    total_abs = math.fsum(np.abs(g))
    evaluations = len(k)
    estimate = h * total
    diff = math.inf
    noise_factor = (32 + 4 * degree) * _U

    for level in range(1, config.max_refinement_levels + 1):
        h /= 2
        kk = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
        kk = kk[kk % 2 != 0]
        x, dx = phi(kk * h)
        g = func(x) * dx
        if not np.all(np.isfinite(g)):
            raise FloatOverflowError("quadrature sum overflows")
        total += math.fsum(g)
        total_abs += math.fsum(np.abs(g))
        evaluations += len(kk)
        new = h * total
        diff = abs(new - estimate)
        estimate = new
        noise = noise_factor * h * total_abs
        tol = max(config.abs_tol, config.rel_tol * abs(estimate))
        if level >= 3 and diff <= max(tol, noise):
            return OracleReport(
                estimate, max(diff, noise), evaluations, True, engine.Method.QUADRATURE
            )
    return OracleReport(estimate, diff, evaluations, False, engine.Method.QUADRATURE)


# -- comparison ------------------------------------------------------------------

def compare(closed: EvalReport, oracle: OracleReport, rel_tol: float) -> ComparisonRecord:
    """Relative discrepancy, passing when within ``rel_tol`` or the error bounds."""
    notes = []
    cv, ov = closed.value, oracle.value
    if not closed.valid:
        notes.append(f"closed form invalid: {closed.notes}")
    if not oracle.converged:
        notes.append("oracle did not converge")
    if notes or cv is None or ov is None or not (math.isfinite(cv) and math.isfinite(ov)):
        if not notes:
            notes.append("non-finite input")
        return ComparisonRecord(
            cv, ov, math.inf, False, rel_tol, closed.abs_err_est, oracle.err_est, notes=notes
        )
    scale = max(abs(cv), abs(ov))
    if scale == 0:
        discrepancy = 0.0
        bound = 0.0
    else:
        discrepancy = abs(cv - ov) / scale
        bound = (closed.abs_err_est + oracle.err_est) / scale
    passed = discrepancy <= max(rel_tol, bound)
    return ComparisonRecord(
        cv,
        ov,
        discrepancy,
        passed,
        rel_tol,
        closed.abs_err_est,
        oracle.err_est,
        by_error_bound=passed and discrepancy > rel_tol,
    )
