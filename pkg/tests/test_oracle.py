import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SQRT_PI, random_spec
from hermiquad.engine import (
    EvalReport,
    GaussIntegralSpec,
    Kind,
    Method,
    RationalIntegralSpec,
    evaluate,
)
from hermiquad.errors import DivergentError, NonPositiveDecayError
from hermiquad.oracle import (
    OracleReport,
    QuadratureConfig,
    Transform,
    compare,
    gaussian_moments,
    integrand_eval,
    integrand_polynomial,
    moment_oracle,
    quad_integral,
)


def rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


ORTHO = dict(a=2, b=0, c=2, d=0, f=1, alpha=0, y=-1, z=-1)


class TestIntegrandEval:
    def test_pure_gaussian_at_origin(self):
        assert integrand_eval(GaussIntegralSpec(Kind.IN, n=0), 0.0) == 1.0

    def test_second_hermite_times_weight(self):
        spec = GaussIntegralSpec(Kind.IN, a=1, b=0, y=0, n=2)
        assert integrand_eval(spec, 2.0) == pytest.approx(4 * math.exp(-4), rel=1e-15)
        assert integrand_eval(spec, 2.0) == pytest.approx(0.0732626, abs=1e-7)

    def test_rational_weight(self):
        assert integrand_eval(RationalIntegralSpec(nu=1, n=0, c=1), 1.0) == 0.5

    def test_rational_far_tail_uses_log_domain(self):
        spec = RationalIntegralSpec(a=1, b=0, c=1, nu=2, n=2)
        # x^2 / (1 + x^2)^2 ~ x^-2, while forming 1 + x^2 directly would overflow
        assert integrand_eval(spec, 1e200) == pytest.approx(1e-400 if 1e-400 else 0.0)
        assert integrand_eval(spec, 1e120) == pytest.approx(1e-240, rel=1e-12)

    def test_negligible_weight_returns_zero(self):
        assert integrand_eval(GaussIntegralSpec(Kind.IN, n=4, a=1), 60.0) == 0.0


class TestMomentOracle:
    def test_zeroth_moment(self):
        r = moment_oracle(GaussIntegralSpec(Kind.IN, n=0))
        assert r.value == pytest.approx(SQRT_PI, rel=1e-15)
        assert r.converged and r.method is Method.MOMENT_ORACLE

    def test_first_moment_shifted(self):
        r = moment_oracle(GaussIntegralSpec(Kind.IN, n=1, a=1, b=0, y=0, alpha=2))
        assert r.value == pytest.approx(math.e * SQRT_PI, rel=1e-14)

    def test_orthogonality_example(self):
        r = moment_oracle(GaussIntegralSpec(Kind.IMN, m=1, n=1, **ORTHO))
        assert r.value == pytest.approx(2 * SQRT_PI, rel=1e-15)

    def test_evaluations_count_monomials(self):
        # 4x^2 - 2 expanded twice gives x^0, x^2, x^4 only
        r = moment_oracle(GaussIntegralSpec(Kind.IMN, m=2, n=2, **ORTHO))
        assert r.evaluations == 3

    @pytest.mark.parametrize("k", range(11))
    def test_even_moments_closed_form(self, k):
        mu = gaussian_moments(2 * k + 1, 1.0, 0.0)
        m0 = SQRT_PI
        expected = math.prod(range(1, 2 * k, 2)) * SQRT_PI / 2**k
        assert rel(m0 * mu[2 * k], expected) <= 1e-12
        assert abs(m0 * mu[2 * k + 1]) <= 1e-14 * abs(m0 * mu[2 * k])

    @given(
        st.integers(0, 12),
        st.floats(0.5, 4),
        st.floats(-3, 3),
    )
    def test_reversal_flips_odd_moments(self, deg, f, alpha):
        pos = gaussian_moments(deg, f, alpha)
        neg = gaussian_moments(deg, f, -alpha)
        for j, (p, q) in enumerate(zip(pos, neg)):
            assert q == (p if j % 2 == 0 else -p)

    def test_polynomial_degree(self):
        spec = GaussIntegralSpec(Kind.P_IMN, a=1, c=1, m=3, n=2, p=4)
        assert len(integrand_polynomial(spec)) == 3 + 2 + 4 + 1

    def test_rejects_bad_decay(self):
        with pytest.raises(NonPositiveDecayError):
            moment_oracle(GaussIntegralSpec(Kind.IN, f=0))


class TestQuadrature:
    def test_pure_gaussian(self):
        r = quad_integral(GaussIntegralSpec(Kind.IN, n=0))
        assert r.converged and r.method is Method.QUADRATURE
        assert abs(r.value - SQRT_PI) <= 1e-10

    def test_rational_arctan(self):
        r = quad_integral(RationalIntegralSpec(nu=1, n=0, c=1))
        assert r.converged
        assert abs(r.value - math.pi) <= 1e-8

    def test_orthogonality_diagonal(self):
        r = quad_integral(GaussIntegralSpec(Kind.IMN, m=2, n=2, **ORTHO))
        assert r.value == pytest.approx(8 * SQRT_PI, rel=1e-10)
        assert r.value == pytest.approx(14.1796, abs=1e-4)

    def test_rational_three_halves(self):
        r = quad_integral(RationalIntegralSpec(nu=1.5, n=0, c=1))
        assert abs(r.value - 2.0) <= 1e-8

    @pytest.mark.parametrize("n", [1, 2])
    def test_divergent_rational(self, n):
        with pytest.raises(DivergentError):
            quad_integral(RationalIntegralSpec(a=1, b=0, c=1, nu=1, n=n))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=0)
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=-1)
        with pytest.raises(ValueError):
            QuadratureConfig(max_refinement_levels=16)
        with pytest.raises(ValueError):
            QuadratureConfig(max_refinement_levels=2)
        assert QuadratureConfig(transform="DoubleExponential").transform is Transform.DOUBLE_EXPONENTIAL

    def test_unconverged_report_exceeds_tolerance(self):
        # a slowly decaying tail cannot settle in three halvings at this tolerance
        spec = RationalIntegralSpec(nu=0.52, n=0, c=1)
        cfg = QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_refinement_levels=3)
        r = quad_integral(spec, cfg)
        assert not r.converged
        assert r.err_est > max(cfg.abs_tol, cfg.rel_tol * abs(r.value))

    @given(st.integers(0, 2**32 - 1), st.sampled_from(list(Kind)))
    @settings(max_examples=40, deadline=None)
    def test_unconverged_invariant_random(self, seed, kind):
        spec = random_spec(random.Random(seed), kind)
        cfg = QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_refinement_levels=3)
        r = quad_integral(spec, cfg)
        if not r.converged:
            assert r.err_est > max(cfg.abs_tol, cfg.rel_tol * abs(r.value))

    @pytest.mark.parametrize("kind", list(Kind))
    def test_transforms_agree(self, kind):
        rng = random.Random(7 + list(Kind).index(kind))
        for _ in range(20):
            spec = random_spec(rng, kind)
            de = quad_integral(spec, QuadratureConfig(transform=Transform.DOUBLE_EXPONENTIAL))
            rs = quad_integral(spec, QuadratureConfig(transform=Transform.RATIONAL_SUBSTITUTION))
            assert de.converged and rs.converged
            scale = max(abs(de.value), abs(rs.value), de.err_est + rs.err_est)
            assert abs(de.value - rs.value) <= 1e-8 * scale, spec


class TestDualOracle:
    @pytest.mark.parametrize("kind", list(Kind))
    def test_moment_vs_quadrature(self, kind):
        rng = random.Random(1000 + list(Kind).index(kind))
        for _ in range(60):
            spec = random_spec(rng, kind)
            mo = moment_oracle(spec)
            qu = quad_integral(spec)
            rec = compare(
                EvalReport(mo.value, Method.MOMENT_ORACLE, mo.err_est), qu, 1e-7
            )
            assert rec.passed, (spec, rec)

    @pytest.mark.parametrize("kind", list(Kind))
    def test_closed_vs_both(self, kind):
        rng = random.Random(2000 + list(Kind).index(kind))
        for _ in range(60):
            spec = random_spec(rng, kind)
            closed = evaluate(spec)
            assert compare(closed, moment_oracle(spec), 1e-9).passed, spec
            assert compare(closed, quad_integral(spec), 1e-7).passed, spec


def closed(v, err=0.0):
    return EvalReport(v, Method.CLOSED_FORM, err)


def oracle(v, err=0.0, converged=True):
    return OracleReport(v, err, 1, converged)


class TestCompare:
    def test_exact_match(self):
        rec = compare(closed(1.0), oracle(1.0), 1e-9)
        assert rec.passed and rec.discrepancy == 0.0

    def test_tiny_offset(self):
        rec = compare(closed(SQRT_PI / 2), oracle(SQRT_PI / 2 + 1e-12), 1e-9)
        assert rec.passed and not rec.by_error_bound

    def test_failure(self):
        rec = compare(closed(1.0), oracle(1.1), 1e-9)
        assert not rec.passed
        assert rec.discrepancy == pytest.approx(0.0909, abs=1e-4)

    def test_both_zero(self):
        assert compare(closed(0.0), oracle(0.0), 1e-9).passed

    def test_error_bound_widens_acceptance(self):
        rec = compare(closed(1.0, 0.06), oracle(1.1, 0.06), 1e-9)
        assert rec.passed and rec.by_error_bound

    def test_invalid_closed_form_fails_with_note(self):
        rec = compare(EvalReport(math.nan, Method.CLOSED_FORM, 0.0, False, "Overflow"), oracle(1.0), 1e-9)
        assert not rec.passed and rec.notes

    def test_unconverged_oracle_fails(self):
        rec = compare(closed(1.0), oracle(1.0, converged=False), 1e-9)
        assert not rec.passed and "converge" in rec.notes[0]

    def test_non_finite_fails(self):
        rec = compare(closed(math.inf), oracle(1.0), 1e-9)
        assert not rec.passed and rec.notes
