import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from qedctrl.errors import NonConvergence
from qedctrl.specfun import (
    SQRT_PI,
    kummer_m_1,
    mills_ratio,
    normal_cdf,
    normal_pdf,
    parabolic_u_half,
)


class TestNormalPdf:
    def test_at_zero(self):
        assert normal_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-15)

    def test_symmetry(self):
        for x in (0.3, 1.0, 2.5, 7.0):
            assert normal_pdf(x) == normal_pdf(-x)

    def test_against_quadrature_normalization(self):
        # density definition: integrates to 1
        total, _ = quad(normal_pdf, -12, 12)
        assert total == pytest.approx(1.0, abs=1e-10)
        assert normal_pdf(1.0) == pytest.approx(
            math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-15
        )


class TestNormalCdf:
    def test_at_zero(self):
        assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-16)

    def test_upper_limit(self):
        assert 1 - 1e-15 <= normal_cdf(10.0) <= 1.0

    def test_against_quadrature(self):
        oracle, _ = quad(normal_pdf, -40, 0.1)
        assert normal_cdf(0.1) == pytest.approx(oracle, abs=1e-12)

    @given(st.floats(min_value=-8, max_value=8))
    def test_complement_symmetry(self, x):
        assert normal_cdf(x) + normal_cdf(-x) == pytest.approx(1.0, abs=1e-14)

    @given(st.floats(min_value=-8, max_value=7.9), st.floats(min_value=1e-6, max_value=0.1))
    def test_monotone(self, x, dx):
        assert normal_cdf(x + dx) >= normal_cdf(x)


class TestMillsRatio:
    def test_at_zero(self):
        assert mills_ratio(0.0) == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-15)

    def test_against_quadrature_at_5(self):
        tail, _ = quad(lambda y: math.exp(-(y * y - 25.0)), 5, 45)
        assert mills_ratio(5.0) == pytest.approx(tail, rel=1e-10)

    def test_derivative_identity(self):
        # chi'(d) = 2 d chi(d) - 1
        d, h = 1.0, 1e-6
        fd = (mills_ratio(d + h) - mills_ratio(d - h)) / (2 * h)
        assert fd == pytest.approx(2 * d * mills_ratio(d) - 1.0, abs=1e-8)

    def test_no_cancellation_far_positive(self):
        # naive exp(d^2) * quad would multiply a huge factor by a tiny
        # integral; the erfcx route stays accurate
        assert mills_ratio(40.0) == pytest.approx(1.0 / 80.0, rel=1e-3)

    def test_finite_moderately_negative(self):
        # exp(26^2) ~ 1e293 still fits in a double; the value must track it
        val = mills_ratio(-26.0)
        assert math.isfinite(val)
        assert val == pytest.approx(SQRT_PI * math.exp(676.0), rel=1e-10)

    @given(st.floats(min_value=-26, max_value=26), st.floats(min_value=1e-3, max_value=1.0))
    def test_strictly_decreasing(self, d, h):
        assert mills_ratio(d + h) < mills_ratio(d)

    def test_large_delta_asymptote(self):
        # chi(d) ~ 1/(2d) for large d
        assert mills_ratio(100.0) == pytest.approx(1.0 / 200.0, rel=1e-4)


def _kummer_rational_oracle(b: Fraction, z: Fraction, terms: int = 5000) -> float:
    total = Fraction(1)
    term = Fraction(1)
    denom = b
    for _ in range(terms):
        term *= z / denom
        denom += 1
        total += term
        if term < Fraction(1, 10**40) * total:
            break
    return float(total)


class TestKummerM1:
    def test_z_zero(self):
        for b in (0.5, 1.0, 10.0, 100.0):
            assert kummer_m_1(b, 0.0) == 1.0

    def test_b_one_is_exp(self):
        assert kummer_m_1(1.0, 1.0) == pytest.approx(math.e, rel=1e-14)

    @pytest.mark.parametrize("b", [0.5, 1.0, 10.0, 100.0])
    @pytest.mark.parametrize("zfrac", [0.0, 0.5, 0.99])
    def test_against_rational_oracle(self, b, zfrac):
        z = zfrac * b
        oracle = _kummer_rational_oracle(Fraction(b), Fraction(b) * Fraction(zfrac))
        assert kummer_m_1(b, z) == pytest.approx(oracle, rel=1e-10)

    @given(st.floats(min_value=0.1, max_value=50), st.floats(min_value=0, max_value=40))
    def test_at_least_one(self, b, z):
        assert kummer_m_1(b, z) >= 1.0

    def test_domain(self):
        with pytest.raises(NonConvergence):
            kummer_m_1(-1.0, 1.0)
        with pytest.raises(NonConvergence):
            kummer_m_1(1.0, -1.0)


class TestParabolicUHalf:
    def test_minus_half_at_zero(self):
        assert parabolic_u_half(-1, 0.0) == 1.0

    def test_plus_half_at_zero(self):
        assert parabolic_u_half(1, 0.0) == pytest.approx(
            math.sqrt(math.pi / 2), rel=1e-14
        )

    def test_plus_half_against_quadrature(self):
        z = 1.0
        integral, _ = quad(lambda t: math.exp(-0.5 * t * t - z * t), 0, 50)
        assert parabolic_u_half(1, z) == pytest.approx(
            math.exp(-0.25) * integral, rel=1e-10
        )

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            parabolic_u_half(0, 1.0)
