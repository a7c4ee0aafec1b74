"""Two-variable, two-index and Gamma-weighted Hermite polynomials.

All evaluators return a :class:`PolyValue` carrying a running bound on the
accumulated rounding error.  Arguments that are themselves the result of
floating-point arithmetic can declare their own absolute uncertainty through
``arg_err``; it is propagated to first order into ``abs_err_est``.
"""
from __future__ import annotations

import enum
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    FloatOverflowError,
    GammaPoleError,
    IndexTooLargeError,
    InvalidInputError,
)

#: unit roundoff of IEEE double precision
UNIT_ROUNDOFF = sys.float_info.epsilon / 2

DEFAULT_NMAX = 40
NMAX_CEILING = 60
NMAX_ENV = "HERMIQUAD_NMAX"

_U = UNIT_ROUNDOFF
_LOG_FLOAT_MAX = math.log(sys.float_info.max)


class Family(str, enum.Enum):
    TWO_VARIABLE = "TwoVariable"
    TWO_INDEX = "TwoIndex"
    GAMMA_WEIGHTED = "GammaWeighted"


@dataclass(frozen=True)
class PolyValue:
    value: float
    abs_err_est: float = 0.0

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class PolyQuery:
    """Which polynomial to evaluate and where.

    ``args`` is ``(x, y)`` for the two-variable and Gamma-weighted families
    and ``(x, y, w, z, tau)`` for the two-index family.
    """

    family: Family
    n: int
    args: tuple[float, ...]
    m: int = 0
    nu: float = 0.0

    def evaluate(self, nmax: int | None = None) -> PolyValue:
        family = Family(self.family)
        expected = 5 if family is Family.TWO_INDEX else 2
        if len(self.args) != expected:
            raise InvalidInputError(
                f"{family.value} expects {expected} arguments, got {len(self.args)}"
            )
        if family is Family.TWO_VARIABLE:
            return hermite2(self.n, *self.args, nmax=nmax)
        if family is Family.TWO_INDEX:
            return hermite_two_index(self.m, self.n, *self.args, nmax=nmax)
        return hermite_nu(self.n, self.nu, *self.args, nmax=nmax)


def resolve_nmax(nmax: int | None = None) -> int:
    """Index ceiling: explicit argument, else ``HERMIQUAD_NMAX``, else 40."""
    if nmax is None:
        raw = os.environ.get(NMAX_ENV)
        if raw is None or raw.strip() == "":
            return DEFAULT_NMAX
        try:
            nmax = int(raw)
        except ValueError:
            raise InvalidInputError(f"{NMAX_ENV}={raw!r} is not an integer") from None
    if not 0 <= nmax <= NMAX_CEILING:
        raise InvalidInputError(f"N_max must lie in [0, {NMAX_CEILING}], got {nmax}")
    return nmax


def check_index(n: int, nmax: int | None = None, name: str = "n") -> None:
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InvalidInputError(f"{name} must be a non-negative integer, got {n!r}")
    limit = resolve_nmax(nmax)
    if n > limit:
        raise IndexTooLargeError(f"{name}={n} exceeds N_max={limit}")


# -- Gamma function ---------------------------------------------------------

def log_gamma_signed(x: float) -> tuple[float, float]:
    """Return ``(sign, log|Gamma(x)|)``.

    Negative non-integer arguments go through the reflection formula
    ``Gamma(x) Gamma(1 - x) = pi / sin(pi x)``.
    """
    if x <= 0 and x == math.floor(x):
        raise GammaPoleError(f"Gamma has a pole at {x!r}")
    if x > 0:
        return 1.0, math.lgamma(x)
    # sin(pi x) evaluated on the reduced argument keeps full accuracy
    r = x - round(x)
    s = math.sin(math.pi * r)
    if round(x) % 2:
        s = -s
    sign = 1.0 if s > 0 else -1.0
    return sign, math.log(math.pi) - math.log(abs(s)) - math.lgamma(1.0 - x)


def gamma(x: float) -> float:
    sign, lg = log_gamma_signed(x)
    if lg > _LOG_FLOAT_MAX:
        raise FloatOverflowError(f"Gamma({x!r}) overflows")
    return sign * math.exp(lg)


# -- two-variable Hermite ---------------------------------------------------

def hermite2_value(n: int, x, y):
    """Bare three-term recurrence, no checks; ``x`` may be a numpy array."""
    if n == 0:
        return x * 0 + 1.0
    h_prev, h = x * 0 + 1.0, x
    for k in range(1, n):
        h_prev, h = h, x * h + (2 * y * k) * h_prev
    return h


def hermite2_table(n, x, y, dx=0.0, dy=0.0):
    """Values and error bounds of H_0 .. H_n at (x, y)."""
    vals = [1.0]
    errs = [0.0]
    if n == 0:
        return vals, errs
    vals.append(x)
    errs.append(dx)
    ax, ay = abs(x), abs(y)
    for k in range(1, n):
        t1 = x * vals[k]
        t2 = (2 * y * k) * vals[k - 1]
        h = t1 + t2
        if not math.isfinite(h):
            raise FloatOverflowError(f"H_{k + 1}({x!r}, {y!r}) overflows")
        e = (
            ax * errs[k]
            + 2 * ay * k * errs[k - 1]
            + dx * abs(vals[k])
            + 2 * k * dy * abs(vals[k - 1])
            + 4 * _U * (abs(t1) + abs(t2))
        )
        vals.append(h)
        errs.append(e)
    return vals, errs


def hermite2(
    n: int,
    x: float,
    y: float,
    *,
    arg_err: Sequence[float] = (0.0, 0.0),
    nmax: int | None = None,
) -> PolyValue:
    """H_n(x, y) by the recurrence H_{k+1} = x H_k + 2 y k H_{k-1}.

    >>> hermite2(2, 3.0, 1.0).value
    11.0
    """
    check_index(n, nmax)
    vals, errs = hermite2_table(n, x, y, *arg_err)
    return PolyValue(vals[n], errs[n])


def hermite2_direct_sum(n: int, x: float, y: float, *, nmax: int | None = None) -> PolyValue:
    """H_n(x, y) from its explicit finite sum; cross-check for :func:`hermite2`.

    Terms alternate in sign for y < 0 and can exceed the result by many
    orders of magnitude, so each term is formed exactly from the binary
    values of x and y and the sum is rounded once at the end.
    """
    check_index(n, nmax)
    fx, fy = Fraction(x), Fraction(y)
    total = Fraction(0)
    for k in range(n // 2 + 1):
        coef = math.factorial(n) // (math.factorial(n - 2 * k) * math.factorial(k))
        total += coef * fx ** (n - 2 * k) * fy**k
    try:
        value = float(total)
    except OverflowError:
        raise FloatOverflowError(f"H_{n}({x!r}, {y!r}) overflows") from None
    return PolyValue(value, _U * abs(value))


def falling(n: int, k: int) -> int:
    return math.factorial(n) // math.factorial(n - k)


def hermite2_deriv(n: int, k: int, x: float, y: float, *, nmax: int | None = None) -> PolyValue:
    """k-th x-derivative of H_n(x, y): n!/(n-k)! H_{n-k}(x, y), zero for k > n."""
    check_index(n, nmax)
    if k < 0:
        raise InvalidInputError(f"derivative order must be >= 0, got {k}")
    if k > n:
        return PolyValue(0.0, 0.0)
    base = hermite2(n - k, x, y, nmax=nmax)
    scale = float(falling(n, k))
    value = scale * base.value
    return PolyValue(value, scale * base.abs_err_est + 2 * _U * abs(value))


def gauss_deriv_factor(k: int, beta: float, x: float, *, nmax: int | None = None) -> PolyValue:
    """Polynomial factor H_k(2 beta x, beta) of d^k/dx^k exp(beta x^2)."""
    bx = 2 * beta * x
    return hermite2(k, bx, beta, arg_err=(_U * abs(bx), 0.0), nmax=nmax)


# -- two-index Hermite -------------------------------------------------------

def two_index_from_tables(m, n, tau, dtau, hx, ex, hw, ew):
    terms = []
    err = 0.0
    for k in range(min(m, n) + 1):
        coef = float(
            math.factorial(m) * math.factorial(n)
            // (math.factorial(m - k) * math.factorial(n - k) * math.factorial(k))
        )
        tk = tau**k
        etk = (k * abs(tau) ** (k - 1) * dtau if k else 0.0) + k * _U * abs(tk)
        a, ea = hx[m - k], ex[m - k]
        b, eb = hw[n - k], ew[n - k]
        term = coef * tk * (a * b)
        terms.append(term)
        err += coef * (
            etk * abs(a * b) + abs(tk) * (ea * abs(b) + eb * abs(a) + ea * eb)
        ) + 4 * _U * abs(term)
    value = math.fsum(terms)
    if not math.isfinite(value):
        raise FloatOverflowError("two-index Hermite value overflows")
    return value, err + _U * abs(value)


def hermite_two_index(
    m: int,
    n: int,
    x: float,
    y: float,
    w: float,
    z: float,
    tau: float,
    *,
    arg_err: Sequence[float] | None = None,
    nmax: int | None = None,
) -> PolyValue:
    """H_{m,n}(x, y; w, z | tau) as the finite tau-weighted sum of H_{m-k} H_{n-k}."""
    check_index(m, nmax, "m")
    check_index(n, nmax, "n")
    dx, dy, dw, dz, dtau = arg_err if arg_err is not None else (0.0,) * 5
    hx, ex = hermite2_table(m, x, y, dx, dy)
    hw, ew = hermite2_table(n, w, z, dw, dz)
    return PolyValue(*two_index_from_tables(m, n, tau, dtau, hx, ex, hw, ew))


def hermite_two_index_deriv(
    m: int,
    n: int,
    kx: int,
    kw: int,
    x: float,
    y: float,
    w: float,
    z: float,
    tau: float,
    *,
    nmax: int | None = None,
) -> PolyValue:
    """Mixed derivative d^kx/dx^kx d^kw/dw^kw of H_{m,n}(x, y; w, z | tau)."""
    check_index(m, nmax, "m")
    check_index(n, nmax, "n")
    if kx < 0 or kw < 0:
        raise InvalidInputError("derivative orders must be >= 0")
    if kx > m or kw > n:
        return PolyValue(0.0, 0.0)
    base = hermite_two_index(m - kx, n - kw, x, y, w, z, tau, nmax=nmax)
    scale = float(falling(m, kx) * falling(n, kw))
    value = scale * base.value
    return PolyValue(value, scale * base.abs_err_est + 2 * _U * abs(value))


# -- Gamma-weighted Hermite ---------------------------------------------------

def check_gamma_poles(n: int, nu: float) -> None:
    for k in range(n // 2 + 1):
        g = nu - k - 0.5
        if g <= 0 and g == math.floor(g):
            raise GammaPoleError(
                f"Gamma({g:g}) is a pole (nu={nu!r}, k={k}); H_{n}^(nu) is undefined"
            )


def hermite_nu(n: int, nu: float, x: float, y: float, *, nmax: int | None = None) -> PolyValue:
    """Gamma-weighted Hermite polynomial.

    Same shape as the two-variable sum but every ``y**k`` carries an extra
    factor Gamma(nu - k - 1/2).  Terms are assembled in log space so that the
    factorials and Gamma values never overflow on their own.
    """
    check_index(n, nmax)
    check_gamma_poles(n, nu)
    terms = []
    err = 0.0
    lf_n = math.lgamma(n + 1)
    for k in range(n // 2 + 1):
        j = n - 2 * k
        if (j and x == 0) or (k and y == 0):
            continue
        sign, lg = log_gamma_signed(nu - k - 0.5)
        pieces = [lf_n, -math.lgamma(k + 1), -math.lgamma(j + 1), lg]
        if j:
            pieces.append(j * math.log(abs(x)))
            if x < 0 and j % 2:
                sign = -sign
        if k:
            pieces.append(k * math.log(abs(y)))
            if y < 0 and k % 2:
                sign = -sign
        log_mag = math.fsum(pieces)
        if log_mag > _LOG_FLOAT_MAX:
            raise FloatOverflowError(f"H_{n}^({nu!r}) term overflows")
        term = sign * math.exp(log_mag)
        terms.append(term)
        # absolute error of log_mag becomes relative error of the term
        err += abs(term) * _U * (8 + sum(abs(p) for p in pieces))
    value = math.fsum(terms)
    return PolyValue(value, err + _U * abs(value))


# -- generating functions -----------------------------------------------------

def genfn_truncation_residual(
    family: Family | str,
    order: int,
    t: float = 0.0,
    args: Sequence[float] = (),
    *,
    u: float | None = None,
    v: float | None = None,
    nu: float | None = None,
    nmax: int | None = None,
) -> float:
    """|partial generating-function sum through ``order`` minus its closed form|.

    * TwoVariable: ``args = (x, y)``, exponential ``exp(x t + y t^2)``.
    * TwoIndex: ``args = (x, y, w, z, tau)``, both indices run to ``order``,
      exponential ``exp(x u + y u^2 + w v + z v^2 + tau u v)``.
    * GammaWeighted: ``args = (x, y)`` plus ``nu``.  No elementary closed form
      exists, so the reference is the Gamma-reweighted double series in
      powers of x and y truncated at the same total order in ``t``.
    """
    family = Family(family)
    check_index(order, nmax, "order")
    if family is Family.TWO_INDEX:
        if u is None or v is None:
            raise InvalidInputError("TwoIndex residual needs u and v")
        if abs(u) > 1 or abs(v) > 1:
            raise InvalidInputError("|u|, |v| must not exceed 1")
        x, y, w, z, tau = args
        hx, ex = hermite2_table(order, x, y)
        hw, ew = hermite2_table(order, w, z)
        terms = []
        for m in range(order + 1):
            cu = u**m / math.factorial(m)
            for n in range(order + 1):
                hmn, _ = two_index_from_tables(m, n, tau, 0.0, hx, ex, hw, ew)
                terms.append(cu * v**n / math.factorial(n) * hmn)
        closed = math.exp(x * u + y * u * u + w * v + z * v * v + tau * u * v)
        return abs(math.fsum(terms) - closed)

    if abs(t) > 1:
        raise InvalidInputError("|t| must not exceed 1")
    x, y = args
    if family is Family.TWO_VARIABLE:
        hs, _ = hermite2_table(order, x, y)
        partial = math.fsum(t**n / math.factorial(n) * hs[n] for n in range(order + 1))
        return abs(partial - math.exp(x * t + y * t * t))

    if nu is None:
        raise InvalidInputError("GammaWeighted residual needs nu")
    lhs = math.fsum(
        t**n / math.factorial(n) * hermite_nu(n, nu, x, y, nmax=nmax).value
        for n in range(order + 1)
    )
    rhs_terms = []
    for k in range(order // 2 + 1):
        g = gamma(nu - k - 0.5)
        for j in range(order - 2 * k + 1):
            rhs_terms.append(
                x**j * g * y**k * t ** (j + 2 * k) / (math.factorial(j) * math.factorial(k))
            )
    return abs(lhs - math.fsum(rhs_terms))
