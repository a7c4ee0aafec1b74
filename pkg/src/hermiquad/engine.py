"""Closed forms for Gaussian-weighted integrals of Hermite products.

Every Gaussian kind shares the weight ``exp(-f x^2 + alpha x)`` over the whole
real line:

=========  ==========================================================
kind       integrand (times the weight)
=========  ==========================================================
In         H_n(a x + b, y)
mIn        x^m H_n(a x + b, y)
Imn        H_m(a x + b, y) H_n(c x + d, z)
ScriptImn  (a x + b)^m (c x + d)^n
pImn       x^p H_m(a x + b, y) H_n(c x + d, z)
=========  ==========================================================

Completing the square moves the Gaussian into the prefactor
``sqrt(pi/f) exp(alpha^2/(4f))`` and shifts the Hermite arguments to the
reduced parameters returned by :func:`reduce`.

The rational kind is ``(a x + b)^n / (1 + c x^2)^nu``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

from . import kernels
from .errors import (
    DivergentError,
    FloatOverflowError,
    IllConditionedError,
    InvalidInputError,
    NonPositiveDecayError,
)
from .kernels import PolyValue, UNIT_ROUNDOFF as _U

#: below this the completed square is numerically meaningless
MIN_DECAY = 1e-12

_LOG_FLOAT_MAX = math.log(1.7976931348623157e308)


class Kind(str, enum.Enum):
    IN = "In"
    M_IN = "mIn"
    IMN = "Imn"
    SCRIPT_IMN = "ScriptImn"
    P_IMN = "pImn"


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    MOMENT_ORACLE = "MomentOracle"
    QUADRATURE = "Quadrature"


@dataclass(frozen=True)
class GaussIntegralSpec:
    kind: Kind
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    f: float = 1.0
    alpha: float = 0.0
    y: float = 0.0
    z: float = 0.0
    m: int = 0
    n: int = 0
    p: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))

    def used_indices(self) -> dict[str, int]:
        if self.kind is Kind.IN:
            return {"n": self.n}
        if self.kind in (Kind.M_IN, Kind.IMN, Kind.SCRIPT_IMN):
            return {"m": self.m, "n": self.n}
        return {"p": self.p, "m": self.m, "n": self.n}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


@dataclass(frozen=True)
class RationalIntegralSpec:
    a: float = 0.0
    b: float = 0.0
    c: float = 1.0
    nu: float = 1.0
    n: int = 0

    def to_dict(self) -> dict:
        return {"kind": "rational", **asdict(self)}


@dataclass(frozen=True)
class ReducedParams:
    xbar: float
    ybar: float
    wbar: float
    zbar: float
    tau: float


@dataclass(frozen=True)
class EvalReport:
    value: float | None
    method: Method
    abs_err_est: float
    valid: bool = True
    notes: str = ""

    def __post_init__(self):
        if not self.valid and not self.notes:
            raise ValueError("an invalid report needs notes")


def check_decay(f: float) -> None:
    if not f > 0:
        raise NonPositiveDecayError(f"decay coefficient must be > 0, got {f!r}")
    if f < MIN_DECAY:
        raise IllConditionedError(f"decay coefficient {f!r} is below {MIN_DECAY:g}")


def validate(spec: GaussIntegralSpec, nmax: int | None = None) -> None:
    for name in ("a", "b", "c", "d", "f", "alpha", "y", "z"):
        if not math.isfinite(getattr(spec, name)):
            raise InvalidInputError(f"{name} must be finite")
    check_decay(spec.f)
    for name, idx in spec.used_indices().items():
        kernels.check_index(idx, nmax, name)


def reduce(spec: GaussIntegralSpec) -> ReducedParams:
    """Reduced Hermite arguments after completing the square.

    Uses all of a, b, c, d, y, z irrespective of kind; for In and mIn the
    second-factor fields are ignored by the evaluators.
    """
    check_decay(spec.f)
    f2 = 2 * spec.f
    f4 = 4 * spec.f
    return ReducedParams(
        xbar=spec.b + spec.a * spec.alpha / f2,
        ybar=spec.y + spec.a * spec.a / f4,
        wbar=spec.d + spec.c * spec.alpha / f2,
        zbar=spec.z + spec.c * spec.c / f4,
        tau=spec.a * spec.c / f2,
    )


def _reduced_errors(spec: GaussIntegralSpec, r: ReducedParams) -> tuple[float, ...]:
    f2 = 2 * spec.f
    return (
        4 * _U * (abs(spec.b) + abs(spec.a * spec.alpha / f2)),
        4 * _U * (abs(spec.y) + spec.a * spec.a / (2 * f2)),
        4 * _U * (abs(spec.d) + abs(spec.c * spec.alpha / f2)),
        4 * _U * (abs(spec.z) + spec.c * spec.c / (2 * f2)),
        3 * _U * abs(r.tau),
    )


def _gauss_scale(core: PolyValue, f: float, alpha: float) -> tuple[float, float]:
    """Multiply ``core`` by sqrt(pi/f) exp(alpha^2/(4f)) through one exponential."""
    log_pref = 0.5 * math.log(math.pi / f) + alpha * alpha / (4 * f)
    # absolute error in log_pref turns into relative error of the product
    rel = 4 * _U * (abs(0.5 * math.log(math.pi / f)) + alpha * alpha / (4 * f)) + 2 * _U
    if core.value == 0:
        log_mag = log_pref
        if log_mag > _LOG_FLOAT_MAX:
            raise FloatOverflowError("Gaussian prefactor overflows")
        pref = math.exp(log_mag)
        return 0.0, pref * core.abs_err_est
    log_mag = log_pref + math.log(abs(core.value))
    if log_mag > _LOG_FLOAT_MAX:
        raise FloatOverflowError(
            f"integral magnitude exp({log_mag:.1f}) exceeds the floating range"
        )
    value = math.copysign(math.exp(log_mag), core.value)
    err = abs(value) * rel + abs(value) * core.abs_err_est / abs(core.value)
    return value, err


def _report(core: PolyValue, spec: GaussIntegralSpec) -> EvalReport:
    value, err = _gauss_scale(core, spec.f, spec.alpha)
    return EvalReport(value, Method.CLOSED_FORM, err)


def _mul(p: PolyValue, q: PolyValue, scale: float = 1.0) -> PolyValue:
    v = scale * p.value * q.value
    e = abs(scale) * (
        abs(p.value) * q.abs_err_est + abs(q.value) * p.abs_err_est + p.abs_err_est * q.abs_err_est
    )
    return PolyValue(v, e + 3 * _U * abs(v))


def _sum(parts: list[PolyValue]) -> PolyValue:
    v = math.fsum(p.value for p in parts)
    return PolyValue(v, sum(p.abs_err_est for p in parts) + _U * abs(v))


def _alpha_hermite(k: int, spec: GaussIntegralSpec, nmax) -> PolyValue:
    """H_k(alpha/(2f), 1/(4f)): polynomial factor of d^k/dalpha^k exp(alpha^2/(4f))."""
    x = spec.alpha / (2 * spec.f)
    y = 1 / (4 * spec.f)
    return kernels.hermite2(k, x, y, arg_err=(_U * abs(x), _U * y), nmax=nmax)


def eval_In(spec: GaussIntegralSpec, nmax: int | None = None) -> EvalReport:
    validate(spec, nmax)
    r = reduce(spec)
    ex, ey, *_ = _reduced_errors(spec, r)
    core = kernels.hermite2(spec.n, r.xbar, r.ybar, arg_err=(ex, ey), nmax=nmax)
    return _report(core, spec)


def eval_mIn(spec: GaussIntegralSpec, nmax: int | None = None) -> EvalReport:
    """Moment-weighted form, obtained as the m-th alpha-derivative of I_n."""
    validate(spec, nmax)
    r = reduce(spec)
    ex, ey, *_ = _reduced_errors(spec, r)
    f = spec.f
    x = spec.alpha / (2 * f)
    y = 1 / (4 * f)
    tau = spec.a / (2 * f)
    core = kernels.hermite_two_index(
        spec.m, spec.n, x, y, r.xbar, r.ybar, tau,
        arg_err=(_U * abs(x), _U * y, ex, ey, _U * abs(tau)),
        nmax=nmax,
    )
    return _report(core, spec)


def _two_index_core(spec, r, m, n, nmax, *, ybar=None, zbar=None) -> PolyValue:
    errs = _reduced_errors(spec, r)
    return kernels.hermite_two_index(
        m, n,
        r.xbar, r.ybar if ybar is None else ybar,
        r.wbar, r.zbar if zbar is None else zbar,
        r.tau,
        arg_err=errs,
        nmax=nmax,
    )


def eval_Imn(spec: GaussIntegralSpec, nmax: int | None = None) -> EvalReport:
    validate(spec, nmax)
    r = reduce(spec)
    return _report(_two_index_core(spec, r, spec.m, spec.n, nmax), spec)


def eval_calligraphic_Imn(spec: GaussIntegralSpec, nmax: int | None = None) -> EvalReport:
    """Monomial-product kind: same closed form as Imn with y = z = 0."""
    validate(spec, nmax)
    r = reduce(spec)
    f4 = 4 * spec.f
    core = _two_index_core(
        spec, r, spec.m, spec.n, nmax, ybar=spec.a * spec.a / f4, zbar=spec.c * spec.c / f4
    )
    return _report(core, spec)


def alpha_derivative_core(spec: GaussIntegralSpec, k: int, nmax: int | None = None) -> PolyValue:
    """k-th alpha-derivative of H_{m,n}(xbar, ybar; wbar, zbar | tau).

    Only xbar and wbar depend on alpha, with slopes a/(2f) and c/(2f), so the
    chain rule splits the derivative between the two index slots.
    """
    r = reduce(spec)
    errs = _reduced_errors(spec, r)
    m, n = spec.m, spec.n
    sx = spec.a / (2 * spec.f)
    sw = spec.c / (2 * spec.f)
    hx, ex = kernels.hermite2_table(m, r.xbar, r.ybar, errs[0], errs[1])
    hw, ew = kernels.hermite2_table(n, r.wbar, r.zbar, errs[2], errs[3])
    parts = []
    for l in range(k + 1):
        j = k - l
        if l > m or j > n:
            continue
        coef = float(math.comb(k, l) * kernels.falling(m, l) * kernels.falling(n, j))
        weight = coef * sx**l * sw**j
        v, e = kernels.two_index_from_tables(m - l, n - j, r.tau, errs[4], hx, ex, hw, ew)
        term = weight * v
        # weight carries roughly k + 3 roundings
        parts.append(PolyValue(term, abs(weight) * e + (k + 4) * _U * abs(term)))
    if not parts:
        return PolyValue(0.0, 0.0)
    return _sum(parts)


def eval_pImn(spec: GaussIntegralSpec, nmax: int | None = None) -> EvalReport:
    """p-th alpha-derivative of I_{m,n}, expanded by Leibniz' rule."""
    validate(spec, nmax)
    p = spec.p
    parts = []
    for k in range(p + 1):
        gk = _alpha_hermite(p - k, spec, nmax)
        rk = alpha_derivative_core(spec, k, nmax)
        parts.append(_mul(gk, rk, float(math.comb(p, k))))
    return _report(_sum(parts), spec)


_EVALUATORS = {
    Kind.IN: eval_In,
    Kind.M_IN: eval_mIn,
    Kind.IMN: eval_Imn,
    Kind.SCRIPT_IMN: eval_calligraphic_Imn,
    Kind.P_IMN: eval_pImn,
}


def check_rational(spec: RationalIntegralSpec) -> None:
    for name in ("a", "b", "c", "nu"):
        if not math.isfinite(getattr(spec, name)):
            raise InvalidInputError(f"{name} must be finite")
    if isinstance(spec.n, bool) or not isinstance(spec.n, int) or spec.n < 0:
        raise InvalidInputError(f"n must be a non-negative integer, got {spec.n!r}")
    if not spec.c > 0:
        raise NonPositiveDecayError(f"c must be > 0, got {spec.c!r}")
    # integrand ~ |x|^(n - 2 nu); absolute convergence needs n - 2 nu < -1
    if not 2 * spec.nu - spec.n > 1:
        raise DivergentError(
            f"integral diverges: 2*nu - n = {2 * spec.nu - spec.n:g} must exceed 1"
        )


def eval_rational_In(spec: RationalIntegralSpec, nmax: int | None = None) -> EvalReport:
    check_rational(spec)
    y = spec.a * spec.a / (4 * spec.c)
    core = kernels.hermite_nu(spec.n, spec.nu, spec.b, y, nmax=nmax)
    g_sign, lg_nu = kernels.log_gamma_signed(spec.nu)
    if core.value == 0:
        scale = math.exp(0.5 * math.log(math.pi / spec.c) - lg_nu)
        return EvalReport(0.0, Method.CLOSED_FORM, scale * core.abs_err_est)
    log_mag = 0.5 * math.log(math.pi / spec.c) - lg_nu + math.log(abs(core.value))
    if log_mag > _LOG_FLOAT_MAX:
        raise FloatOverflowError("rational integral overflows")
    value = g_sign * math.copysign(math.exp(log_mag), core.value)
    rel = core.abs_err_est / abs(core.value) + _U * (8 + abs(lg_nu) + abs(log_mag))
    return EvalReport(value, Method.CLOSED_FORM, abs(value) * rel)


def evaluate(
    spec: GaussIntegralSpec | RationalIntegralSpec, nmax: int | None = None
) -> EvalReport:
    """Closed-form value of any supported integral; raises on invalid input."""
    if isinstance(spec, RationalIntegralSpec):
        return eval_rational_In(spec, nmax)
    return _EVALUATORS[spec.kind](spec, nmax)
