"""Tests for Bezout formulas and the empirical zero counter."""

from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from slowdet.bezout import (
    BezoutFormula,
    BezoutKind,
    bezout_audit,
    empirical_zero_count,
    expspiral_bezout,
    gamma_bezout,
    polynomial_bezout,
    random_polynomial,
    sinc_bezout,
    sinlog_bezout,
    spiral_bezout,
    zeta_bezout,
)
from slowdet.catalog import catalog_curve
from slowdet.error import ErrorCode, SlowdetError

TOL = mp.mpf("1e-25")


def above(x):
    """x nudged up so floor(log x / pi) is not decided by the last bit."""
    return x * (1 + mp.ldexp(1, -100))


class TestSpiral:
    """Tests for the spiral bound."""

    def test_degree_three(self) -> None:
        """Test F = G = l = q = 1, d = 3, L = e^10: 9600."""
        value = spiral_bezout(1, 1, 1, 1)(mp.exp(10), 3)
        assert abs(value - 9600) < TOL

    def test_degree_one(self) -> None:
        """Test F = G = l = q = 1, d = 1, L = e: 288."""
        assert abs(spiral_bezout(1, 1, 1, 1)(mp.e, 1) - 288) < TOL

    def test_monotone(self) -> None:
        """Test monotonicity in L and d."""
        b = spiral_bezout(1, 2, 2, 1)
        assert b(mp.exp(20), 3) >= b(mp.exp(10), 3)
        assert b(mp.exp(10), 4) >= b(mp.exp(10), 3)

    def test_rotation_speed(self) -> None:
        """Test that omega scales the number of turns."""
        slow = spiral_bezout(1, 1, 1, 1)
        fast = spiral_bezout(1, 1, 1, 1, omega=2)
        assert fast(mp.exp(10), 1) > slow(mp.exp(10), 1)

    def test_domain(self) -> None:
        """Test that L < 1 and d < 1 are rejected."""
        with pytest.raises(SlowdetError) as exc_info:
            spiral_bezout(1, 1, 1, 1)(mp.mpf("0.5"), 1)
        assert exc_info.value.code == ErrorCode.DOMAIN
        with pytest.raises(SlowdetError) as exc_info:
            spiral_bezout(1, 1, 1, 1)(10, 0)
        assert exc_info.value.code == ErrorCode.INVALID_INPUT


class TestSinlog:
    """Tests for the sin(c log^l x) graph bound."""

    def test_one_turn(self) -> None:
        """Test l = 1, d = 2, T = e^pi: 400."""
        assert abs(sinlog_bezout(1)(above(mp.exp(mp.pi)), 2) - 400) < TOL

    def test_small_threshold(self) -> None:
        """Test l = 1, d = 1, T = 2: 64."""
        assert abs(sinlog_bezout(1)(2, 1) - 64) < TOL

    def test_grows_with_degree(self) -> None:
        """Test the d^3 leading term."""
        b = sinlog_bezout(1)
        ratio = b(100, 200) / b(100, 100)
        assert 7 < ratio < 9


class TestOtherFamilies:
    """Tests for zeta, Gamma, polynomial and compact formulas."""

    def test_zeta(self) -> None:
        """Test c = 1 at x = e, d = 1: 1 + e."""
        assert abs(zeta_bezout(1)(mp.e, 1) - (1 + mp.e)) < TOL

    def test_zeta_linear_in_constant(self) -> None:
        """Test that doubling c doubles the bound."""
        assert abs(zeta_bezout(2)(10, 3) - 2 * zeta_bezout(1)(10, 3)) < TOL

    @pytest.mark.parametrize("c", [None, 0, -1])
    def test_zeta_needs_constant(self, c) -> None:
        """Test that a missing or non-positive constant is rejected."""
        with pytest.raises(SlowdetError) as exc_info:
            zeta_bezout(c)
        assert exc_info.value.code == ErrorCode.MISSING_BEZOUT

    def test_gamma(self) -> None:
        """Test c d log_+ x log_+ log_+ x at x = e^e, d = 2: 2e."""
        assert abs(gamma_bezout(1)(mp.e**mp.e, 2) - 2 * mp.e) < TOL

    def test_non_explicit(self) -> None:
        """Test that zeta and Gamma constants are flagged."""
        assert zeta_bezout(1).non_explicit
        assert gamma_bezout(1).non_explicit
        assert not spiral_bezout(1, 1, 1, 1).non_explicit

    def test_polynomial(self) -> None:
        """Test 2 log_+ x d + 1 at x = e^2, d = 3: 13."""
        b = polynomial_bezout({(1, 1): 2, (0, 0): 1})
        assert abs(b(mp.exp(2), 3) - 13) < TOL
        assert b.shape == (2, 0)

    def test_polynomial_rejects_negative(self) -> None:
        """Test that negative coefficients are rejected."""
        with pytest.raises(SlowdetError):
            polynomial_bezout({(1, 0): -1})

    def test_sinc(self) -> None:
        """Test sin(pi x) on an interval of length 2.5, d = 1: 192."""
        assert abs(sinc_bezout(mp.pi)(mp.mpf("2.5"), 1) - 192) < TOL

    def test_expspiral_matches_spiral(self) -> None:
        """Test that length 1 gives the spiral bound at L = e."""
        assert abs(expspiral_bezout(1)(1, 1) - spiral_bezout(1, 1, 1, 1)(mp.e, 1)) < TOL

    def test_shapes(self) -> None:
        """Test folded and literal shapes."""
        assert spiral_bezout(1, 1, 1, 1).shape == (4, 0)
        assert zeta_bezout(1).shape == (2, 0)
        assert zeta_bezout(1).factor_shape == (2, 1)
        assert gamma_bezout(1).shape == (0, 1)
        assert gamma_bezout(1).factor_shape == (2, 1)

    def test_folded_within_literal(self) -> None:
        """Test that folding never raises an exponent above the literal factor."""
        for b in (
            spiral_bezout(1, 2, 1, 3),
            sinlog_bezout(2),
            zeta_bezout(1),
            gamma_bezout(1),
            sinc_bezout(1),
            expspiral_bezout(1),
        ):
            assert all(f <= g for f, g in zip(b.shape, b.factor_shape, strict=True))

    def test_json(self) -> None:
        """Test that formulas survive serialization."""
        for b in (
            spiral_bezout(2, 1, 3, 1),
            polynomial_bezout({(0, 2): Fraction(1, 2), (0, 1): Fraction(3, 2)}, shape=(2, 0)),
            zeta_bezout("1.5"),
        ):
            back = BezoutFormula.from_json(b.to_json())
            assert back.kind is b.kind
            assert abs(back(100, 2) - b(100, 2)) < TOL

    def test_json_unknown_id(self) -> None:
        """Test that an unknown formula id is rejected."""
        with pytest.raises(SlowdetError):
            BezoutFormula.from_json({"id": "hyperbola"})


class TestZeroCount:
    """Tests for sign-change zero counting."""

    def test_sine_zeros(self) -> None:
        """Test P = Y on sin(pi x) around [0, 10]."""
        curve = catalog_curve("sin_pi_graph")
        result = empirical_zero_count({(0, 1): 1}, curve, (-0.5, 10.5))
        assert result.count >= 10
        assert result.nonfinite == 0

    def test_spiral_below_bound(self) -> None:
        """Test P = Y on the spiral over [e, e^(2 pi)]."""
        curve = catalog_curve("spiral")
        hi = float(mp.exp(2 * mp.pi))
        result = empirical_zero_count({(0, 1): 1}, curve, (float(mp.e), hi))
        assert result.count == 2
        assert result.count <= spiral_bezout(1, 1, 1, 1)(hi, 1)

    def test_sinlog_random_quadratic(self) -> None:
        """Test a random quadratic on the sinlog graph over [e, e^(3 pi)]."""
        curve = catalog_curve("sinlog")
        rng = np.random.default_rng(7)
        hi = float(mp.exp(3 * mp.pi))
        bound = sinlog_bezout(1)(hi, 2)
        for _ in range(10):
            poly = random_polynomial(rng, 2)
            assert empirical_zero_count(poly, curve, (float(mp.e), hi)).count <= bound

    def test_zero_polynomial(self) -> None:
        """Test that P = 0 is rejected."""
        with pytest.raises(SlowdetError):
            empirical_zero_count({(1, 0): 0}, catalog_curve("sin_pi_graph"), (0, 1))

    def test_empty_interval(self) -> None:
        """Test that lo >= hi is rejected."""
        with pytest.raises(SlowdetError):
            empirical_zero_count({(0, 1): 1}, catalog_curve("sin_pi_graph"), (2, 2))


class TestAudit:
    """Tests for randomized Bezout audits."""

    def test_random_polynomial_degree(self) -> None:
        """Test coefficient range and the presence of a degree-d term."""
        rng = np.random.default_rng(0)
        for d in (1, 2, 3):
            poly = random_polynomial(rng, d)
            assert max(i + j for i, j in poly) == d
            assert all(-3 <= c <= 3 and c != 0 for c in poly.values())

    def test_spiral(self) -> None:
        """Test a short spiral audit."""
        report = bezout_audit(catalog_curve("spiral"), trials=20, resolution=500)
        assert report.ok
        assert report.trials == 20
        assert 0 <= report.worst_ratio <= 1
        assert report.to_dict()["violations"] == []

    def test_compact(self) -> None:
        """Test a short audit of sin(pi x)."""
        report = bezout_audit(catalog_curve("sin_pi_graph"), trials=20, resolution=500)
        assert report.ok

    def test_deterministic(self) -> None:
        """Test that the seed fixes the outcome."""
        curve = catalog_curve("sinlog")
        a = bezout_audit(curve, trials=5, seed=3, resolution=300)
        b = bezout_audit(curve, trials=5, seed=3, resolution=300)
        assert a.worst_ratio == b.worst_ratio

    def test_missing_formula(self) -> None:
        """Test that a curve without a formula cannot be audited."""
        curve = replace(catalog_curve("spiral"), bezout=None)
        with pytest.raises(SlowdetError) as exc_info:
            bezout_audit(curve, trials=1)
        assert exc_info.value.code == ErrorCode.MISSING_BEZOUT

    def test_kind_names(self) -> None:
        """Test the identifiers used in curve files."""
        assert str(BezoutKind.SINLOG) == "sinlog_graph"
        assert BezoutKind("spiral") is BezoutKind.SPIRAL


@pytest.mark.slow
class TestBezoutAcceptance:
    """Full-length audits of the explicit families."""

    @pytest.mark.parametrize("name", ["spiral", "sinlog"])
    def test_two_hundred_trials(self, name) -> None:
        """Test that 200 random polynomial and interval pairs stay within the formula."""
        report = bezout_audit(catalog_curve(name), trials=200, seed=7)
        assert report.trials == 200
        assert report.ok, report.to_dict()["violations"][:3]
