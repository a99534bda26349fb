"""Property-based tests using Hypothesis.

These cover the exact parts of the pipeline (enumeration, detection,
covering polynomials) and the monotonicity and counting facts the bound
relies on, over random inputs instead of hand-picked ones.
"""

from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction
from typing import Any

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from mpmath import mp

from slowdet.bezout import sinlog_bezout, spiral_bezout
from slowdet.bounds import (
    covering_sequence,
    degree_data,
    degree_schedule,
    effective_start,
    global_bound,
    interval_count_bound,
)
from slowdet.catalog import catalog_curve
from slowdet.covering import covering_polynomial
from slowdet.points import detect_rational, enumerate_rationals, height
from slowdet.rounding import to_fraction
from slowdet.slow import SlowCertificate, combine_product, combine_sum, phi_p

# Strategies


@st.composite
def certificates(draw: Any, max_A: float = 4.0, max_B: int = 3, max_C: int = 3) -> SlowCertificate:
    """Random certificates with small constants; B and C run over quarters."""
    A = draw(st.fractions(min_value=Fraction(1, 4), max_value=Fraction(max_A), max_denominator=8))
    B = Fraction(draw(st.integers(min_value=0, max_value=4 * max_B)), 4)
    C = Fraction(draw(st.integers(min_value=0, max_value=4 * max_C)), 4)
    D = draw(st.integers(min_value=1, max_value=3))
    a = draw(st.sampled_from([2, 3, 10]))
    return SlowCertificate(
        A=mp.mpf(A.numerator) / A.denominator,
        B=mp.mpf(B.numerator) / B.denominator,
        C=mp.mpf(C.numerator) / C.denominator,
        D=D,
        a=a,
    )


@st.composite
def rationals(draw: Any, T: int) -> Fraction:
    q = draw(st.integers(min_value=1, max_value=T))
    p = draw(st.integers(min_value=-T, max_value=T))
    return Fraction(p, q)


small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


class TestEnumerationProperties:
    """Rationals of bounded height."""

    @given(st.integers(min_value=1, max_value=25), st.data())
    def test_every_rational_listed(self, T: int, data: Any) -> None:
        """Test that each p/q with |p|, q <= T appears, with height <= T."""
        values = enumerate_rationals(T)
        r = data.draw(rationals(T))
        assert r in values
        assert all(height(v) <= T for v in values)

    @given(small_rationals, small_rationals)
    def test_height(self, x: Fraction, y: Fraction) -> None:
        """Test that height is the largest numerator or denominator."""
        expected = max(abs(x.numerator), x.denominator, abs(y.numerator), y.denominator)
        assert height(x, y) == expected >= 1


class TestDetectionProperties:
    """Exact recovery from approximations."""

    @given(
        st.integers(min_value=1, max_value=200),
        st.data(),
        st.floats(min_value=-0.9, max_value=0.9),
    )
    def test_recovers(self, T: int, data: Any, noise: float) -> None:
        """Test that p/q within eps = 1/(8T^2) is recovered exactly."""
        r = data.draw(rationals(T))
        eps = Fraction(1, 8 * T * T)
        value = mp.mpf(r.numerator) / r.denominator + mp.mpf(noise) / (8 * T * T)
        assert detect_rational(value, eps, T) == r

    @given(st.integers(min_value=2, max_value=50), st.integers(min_value=1, max_value=50))
    def test_rejects_large_numerators(self, T: int, q: int) -> None:
        """Test that a reduced (T + 1)/q is never reported at height T."""
        p = T + 1
        assume(q <= T and math.gcd(p, q) == 1)
        assert detect_rational(mp.mpf(p) / q, Fraction(1, 8 * T * T), T) != Fraction(p, q)


class TestCoveringProperties:
    """Covering polynomials and covering sequences."""

    @given(st.integers(min_value=1, max_value=3), st.data())
    def test_fewer_than_mu_points(self, d: int, data: Any) -> None:
        """Test that fewer than mu points always lie on a nonzero curve of degree <= d."""
        mu = degree_data(d).mu
        points = data.draw(
            st.lists(st.tuples(small_rationals, small_rationals), min_size=1, max_size=mu - 1)
        )
        poly = covering_polynomial(points, d)
        assert poly.coefficients
        assert all(i + j <= d for i, j in poly.coefficients)
        assert all(poly(x, y) == 0 for x, y in points)

    @given(
        st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=1, max_size=8, unique=True),
        st.integers(min_value=1, max_value=3),
    )
    def test_points_on_a_line(self, xs: list[Fraction], d: int) -> None:
        """Test that points on y = 2x - 1 are covered by a polynomial vanishing on all of them."""
        points = [(x, 2 * x - 1) for x in xs]
        poly = covering_polynomial(points, d)
        assert all(poly(x, y) == 0 for x, y in points)

    @pytest.mark.slow
    @settings(max_examples=60, deadline=None)
    @given(
        certificates(max_A=2.0, max_B=1, max_C=1),
        st.integers(min_value=1, max_value=2),
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=2, max_value=10),
    )
    def test_sequence_within_count_bound(
        self, cert: SlowCertificate, d: int, T: int, factor: int
    ) -> None:
        """Test that the covering sequence never needs more intervals than the count bound."""
        N = effective_start(cert)
        limit = N * factor
        steps = len(list(covering_sequence(cert, d, T, limit, start=N))) - 1
        assert steps <= interval_count_bound(cert, d, T, limit)


class TestBoundProperties:
    """Monotonicity facts used by the bound."""

    @given(certificates(), st.integers(min_value=1, max_value=12), st.floats(min_value=0, max_value=20))
    def test_phi_decreasing(self, cert: SlowCertificate, p: int, log_ratio: float) -> None:
        """Test that phi_p decreases beyond the start for large enough x."""
        x = max(cert.a, mp.exp(cert.C + 1)) * mp.exp(log_ratio)
        assert phi_p(cert, p, 2 * x) <= phi_p(cert, p, x)

    @given(certificates(), certificates())
    def test_rules_symmetric(self, c1: SlowCertificate, c2: SlowCertificate) -> None:
        """Test that the sum and product rules do not depend on the order."""
        assert combine_sum(c1, c2) == combine_sum(c2, c1)
        assert combine_product(c1, c2) == combine_product(c2, c1)

    @given(certificates(), certificates(), st.integers(min_value=0, max_value=6), st.integers(min_value=3, max_value=1000))
    def test_sum_dominates(self, c1: SlowCertificate, c2: SlowCertificate, p: int, x: int) -> None:
        """Test that the sum certificate dominates both summands."""
        c = combine_sum(c1, c2)
        x = max(x, c.a)
        assert phi_p(c, p, x) >= phi_p(c1, p, x)
        assert phi_p(c, p, x) >= phi_p(c2, p, x)

    @given(st.integers(min_value=1, max_value=10**12))
    def test_degree_schedule(self, T: int) -> None:
        """Test T^nu(d) <= e^16 for the scheduled degree."""
        d = degree_schedule(T)
        nu = degree_data(d).nu
        assert mp.log(T) * nu.numerator / nu.denominator <= 16

    @given(
        st.integers(min_value=1, max_value=3),
        st.integers(min_value=1, max_value=3),
        st.floats(min_value=1, max_value=1e6),
        st.floats(min_value=1, max_value=1e6),
        st.integers(min_value=1, max_value=8),
    )
    def test_bezout_monotone(self, ell: int, q: int, x1: float, x2: float, d: int) -> None:
        """Test that the spiral and sinlog formulas grow with the length and the degree."""
        lo, hi = sorted((x1, x2))
        for b in (spiral_bezout(1, 2, ell, q), sinlog_bezout(ell)):
            assert b(lo, d) <= b(hi, d)
            assert b(lo, d) <= b(lo, d + 1)

    @settings(max_examples=25, deadline=None)
    @given(certificates())
    def test_bound_exponents_exact(self, cert: SlowCertificate) -> None:
        """Test that the log exponents are 2(B + C) and C + 1 without rounding."""
        curve = replace(catalog_curve("spiral"), cert=cert)
        report = global_bound(curve, 1000)
        B = to_fraction(cert.B)
        C = to_fraction(cert.C)
        assert report.beta_T == 2 * (B + C)
        assert report.beta_phi == C + 1
        assert report.exponents.log == 2 * (B + C) + (C + 1) + 4
        assert mp.isfinite(report.total)
        assert report.total > 0
