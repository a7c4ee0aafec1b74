import math
import random

import mpmath as mp
import pytest

from hermiquad.engine import GaussIntegralSpec, Kind


def richardson(func, x0, order, h=0.125, levels=4):
    """Central-difference derivative of order 1 or 2 with Richardson extrapolation."""

    def central(step):
        if order == 1:
            return (func(x0 + step) - func(x0 - step)) / (2 * step)
        return (func(x0 + step) - 2 * func(x0) + func(x0 - step)) / (step * step)

    table = [central(h / 2**i) for i in range(levels)]
    # error expansion is even in the step, so each sweep removes one power of 4
    for j in range(1, levels):
        factor = 4**j
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def mp_hermite(n, x, y):
    return mp.factorial(n) * mp.fsum(
        x ** (n - 2 * k) * y**k / (mp.factorial(n - 2 * k) * mp.factorial(k))
        for k in range(n // 2 + 1)
    )


def mp_reference(spec: GaussIntegralSpec, dps: int = 40):
    """High-precision quadrature of the raw integrand; shares nothing with the package."""
    with mp.workdps(dps):
        a, b, c, d, f, al, y, z = (
            mp.mpf(v) for v in (spec.a, spec.b, spec.c, spec.d, spec.f, spec.alpha, spec.y, spec.z)
        )

        def integrand(x):
            k = spec.kind
            if k is Kind.IN:
                poly = mp_hermite(spec.n, a * x + b, y)
            elif k is Kind.M_IN:
                poly = x**spec.m * mp_hermite(spec.n, a * x + b, y)
            elif k is Kind.SCRIPT_IMN:
                poly = (a * x + b) ** spec.m * (c * x + d) ** spec.n
            else:
                poly = mp_hermite(spec.m, a * x + b, y) * mp_hermite(spec.n, c * x + d, z)
                if k is Kind.P_IMN:
                    poly *= x**spec.p
            return poly * mp.e ** (-f * x * x + al * x)

        x0 = al / (2 * f)
        w = 6 / mp.sqrt(f)
        return mp.quad(integrand, [-mp.inf, x0 - w, x0, x0 + w, mp.inf])


def random_spec(rng: random.Random, kind: Kind, imax=8) -> GaussIntegralSpec:
    u = rng.uniform
    return GaussIntegralSpec(
        kind, u(-3, 3), u(-3, 3), u(-3, 3), u(-3, 3), u(0.5, 4), u(-3, 3), u(-2, 2), u(-2, 2),
        rng.randint(0, imax), rng.randint(0, imax), rng.randint(0, imax),
    )


SQRT_PI = math.sqrt(math.pi)


@pytest.fixture
def sqrt_pi():
    return SQRT_PI


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
