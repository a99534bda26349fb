"""Tests for rational enumeration, detection and curve scans."""

import math
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from slowdet.catalog import catalog_curve
from slowdet.config import RunConfig
from slowdet.error import ErrorCode, SlowdetError
from slowdet.points import (
    PointStatus,
    RationalPoint,
    detect_rational,
    enumerate_rationals,
    farey,
    height,
    near_rational_mask,
    points_to_csv,
    rationals_in_window,
    scan_graph_points,
    scan_parametric_points,
    scan_points,
)


class TestEnumeration:
    """Tests for rationals of bounded height."""

    def test_height(self) -> None:
        """Test the max of numerators and denominators."""
        assert height(Fraction(-3, 4), Fraction(5, 2)) == 5
        assert height(Fraction(0), Fraction(1)) == 1

    def test_farey(self) -> None:
        """Test the Farey sequence of order 3."""
        assert list(farey(3)) == [(0, 1), (1, 3), (1, 2), (2, 3), (1, 1)]

    def test_small_thresholds(self) -> None:
        """Test T = 1 and T = 2 exhaustively."""
        assert enumerate_rationals(1) == [-1, 0, 1]
        assert enumerate_rationals(2) == [
            -2, -1, Fraction(-1, 2), 0, Fraction(1, 2), 1, 2,
        ]

    def test_brute_force_count(self) -> None:
        """Test T = 100 against a gcd filter over all (p, q)."""
        values = enumerate_rationals(100)
        brute = {Fraction(p, q) for p in range(-100, 101) for q in range(1, 101)}
        assert len(values) == len(brute)
        assert all(u < v for u, v in zip(values, values[1:], strict=False))

    def test_rejects_zero(self) -> None:
        """Test that T = 0 is invalid."""
        with pytest.raises(SlowdetError):
            enumerate_rationals(0)

    def test_window_batches(self) -> None:
        """Test the per-denominator numerators in [0, 1] at T = 3."""
        batches = {q: ps.tolist() for q, ps in rationals_in_window(3, 0, 1)}
        assert batches == {1: [0, 1], 2: [1], 3: [1, 2]}

    def test_window_respects_height(self) -> None:
        """Test that numerators never exceed T."""
        for q, ps in rationals_in_window(5, -100, 100):
            assert np.all(np.abs(ps) <= 5)
            assert all(math.gcd(int(p), q) == 1 for p in ps)


class TestDetection:
    """Tests for near-rational detection."""

    def test_half(self) -> None:
        """Test 0.5 perturbed by 1e-11 at T = 10."""
        assert detect_rational(mp.mpf("0.5") + mp.mpf("1e-11"), mp.mpf("1e-10"), 10) == Fraction(1, 2)

    def test_irrational(self) -> None:
        """Test that sin 1 has no approximation of height <= 100 within 1e-30."""
        with mp.workdps(60):
            value = mp.sin(1)
            assert detect_rational(value, mp.mpf("1e-30"), 100) is None

    def test_numerator_too_large(self) -> None:
        """Test that 50 is not of height <= 10."""
        assert detect_rational(50, Fraction(1, 1000), 10) is None

    def test_eps_too_large(self) -> None:
        """Test that uniqueness needs eps < 1/(4T^2)."""
        with pytest.raises(SlowdetError) as exc_info:
            detect_rational(mp.mpf("0.5"), mp.mpf("0.01"), 10)
        assert exc_info.value.code == ErrorCode.INVALID_INPUT

    def test_recovers_perturbed(self) -> None:
        """Test exact recovery of random p/q under small perturbations."""
        rng = np.random.default_rng(1)
        T = 50
        eps = Fraction(1, 8 * T * T)
        for _ in range(500):
            q = int(rng.integers(1, T + 1))
            p = int(rng.integers(-T, T + 1))
            r = Fraction(p, q)
            noise = mp.mpf(float(rng.uniform(-0.9, 0.9))) * mp.mpf(eps.numerator) / eps.denominator
            assert detect_rational(mp.mpf(p) / q + noise, eps, T) == r

    @pytest.mark.slow
    def test_planted_rationals(self) -> None:
        """Test exact recovery of 10^4 random p/q across heights up to 1000."""
        rng = np.random.default_rng(11)
        with mp.workdps(40):
            for _ in range(10**4):
                T = int(rng.integers(1, 1001))
                q = int(rng.integers(1, T + 1))
                p = int(rng.integers(-T, T + 1))
                eps = Fraction(1, 8 * T * T)
                noise = mp.mpf(float(rng.uniform(-0.99, 0.99))) / (8 * T * T)
                assert detect_rational(mp.mpf(p) / q + noise, eps, T) == Fraction(p, q)

    @pytest.mark.slow
    def test_surds(self) -> None:
        """Test that 10^4 random square roots of non-squares are never reported.

        For n >= 2 not a square and p, q <= T, |sqrt(n) - p/q| is at least
        1/(q^2 (2 sqrt(n) + 1)) > 1/(2 T^2), well above eps = 1/(8 T^2).
        """
        rng = np.random.default_rng(12)
        T = 100
        eps = Fraction(1, 8 * T * T)
        checked = 0
        with mp.workdps(60):
            while checked < 10**4:
                n = int(rng.integers(2, 10**6))
                if math.isqrt(n) ** 2 == n:
                    continue
                assert detect_rational(mp.sqrt(n), eps, T) is None, n
                checked += 1

    def test_prefilter(self) -> None:
        """Test the float prefilter on rationals, a surd and nan."""
        values = np.array([0.5, np.sqrt(2), 1 / 3 + 1e-12, np.nan, -7.0])
        assert near_rational_mask(values, 10).tolist() == [True, False, True, False, True]


class TestPoints:
    """Tests for the point record and CSV output."""

    def test_ordering_ignores_status(self) -> None:
        """Test that points compare by coordinates and height."""
        a = RationalPoint(Fraction(1), Fraction(0), 1, status=PointStatus.CANDIDATE)
        b = RationalPoint(Fraction(1), Fraction(0), 1, parameter=mp.mpf(1))
        assert a == b
        assert len({a, b}) == 1

    def test_csv(self) -> None:
        """Test the CSV columns."""
        points = [RationalPoint(Fraction(-1, 2), Fraction(3), 3, parameter=mp.mpf(2))]
        lines = points_to_csv(points).splitlines()
        assert lines[0] == "x_num,x_den,y_num,y_den,height,parameter,status"
        assert lines[1] == "-1,2,3,1,3,2.0,certified"

    def test_to_dict(self) -> None:
        """Test the JSON form of a point."""
        data = RationalPoint(Fraction(1, 2), Fraction(1), 2).to_dict()
        assert data == {"x": "1/2", "y": "1", "height": 2, "parameter": None, "status": "certified"}


class TestGraphScan:
    """Tests for exhaustive graph scans."""

    def test_sin_pi(self) -> None:
        """Test sin(pi x) at T = 20: integers, half-integers and sixths."""
        result = scan_graph_points(catalog_curve("sin_pi_graph"), 20, (-20, 20))
        xs = {p.x for p in result.points}
        assert all(Fraction(k) in xs for k in range(-20, 21))
        assert Fraction(1, 2) in xs
        assert Fraction(5, 6) in xs
        assert result.certified == 41 + 20 + 14
        assert result.candidates == 0
        assert not result.possible_undercount

    def test_exp2(self) -> None:
        """Test 2^x at T = 64: exactly (k, 2^k) for |k| <= 6."""
        result = scan_points(catalog_curve("exp2_graph"), 64)
        assert [(p.x, p.y) for p in result.points] == [
            (Fraction(k), Fraction(2) ** k) for k in range(-6, 7)
        ]
        assert result.certified == 13

    def test_sin_log(self) -> None:
        """Test sin(log x) at T = 50: only x = 1, and nothing certified."""
        result = scan_points(catalog_curve("sinlog"), 50)
        assert result.certified == 0
        assert [(p.x, p.y) for p in result.points] == [(Fraction(1), Fraction(0))]

    def test_sin_log_special_frequency(self) -> None:
        """Test sin(pi log x / log 2): the points x = 2^k are certified."""
        result = scan_points(catalog_curve("sinlog", c="pi/log2"), 64)
        certified = sorted(p.x for p in result.points if p.status is PointStatus.CERTIFIED)
        assert certified == [Fraction(2) ** k for k in range(7)]

    def test_threads_agree(self) -> None:
        """Test that a process pool gives the same points."""
        curve = catalog_curve("sin_pi_graph")
        serial = scan_graph_points(curve, 10, (-10, 10))
        parallel = scan_graph_points(curve, 10, (-10, 10), config=RunConfig(threads=2))
        assert serial.points == parallel.points
        assert serial.evaluated == parallel.evaluated

    def test_not_a_graph(self) -> None:
        """Test that parametric curves are refused."""
        with pytest.raises(SlowdetError) as exc_info:
            scan_graph_points(catalog_curve("spiral"), 10)
        assert exc_info.value.code == ErrorCode.NOT_APPLICABLE

    def test_window_outside_domain(self) -> None:
        """Test that the window must lie in the domain."""
        with pytest.raises(SlowdetError) as exc_info:
            scan_graph_points(catalog_curve("sinlog"), 10, (0, 5))
        assert exc_info.value.code == ErrorCode.INVALID_INPUT

    def test_result_dict(self) -> None:
        """Test the summary counts."""
        data = scan_points(catalog_curve("exp2_graph"), 8).to_dict()
        assert data["certified"] == 7
        assert data["candidates"] == 0
        assert data["evaluated"] > 0


class TestParametricScan:
    """Tests for bisection scans of parametrized curves."""

    def test_unbounded_spiral(self) -> None:
        """Test S_(pi/log 2) at T = 16: the points (+-2^k, 0)."""
        result = scan_points(catalog_curve("unbounded_spiral"), 16)
        assert result.certified == 9
        assert {p.x for p in result.points if p.status is PointStatus.CERTIFIED} == {
            Fraction((-1) ** k) * Fraction(2) ** k for k in range(-4, 5)
        }

    def test_refinement_finds_more(self) -> None:
        """Test that a coarse scan finds a subset of a fine one."""
        curve = catalog_curve("spiral")
        coarse = scan_parametric_points(curve, 10, resolution=200)
        fine = scan_parametric_points(curve, 10, resolution=2000)
        assert set(coarse.points) <= set(fine.points)

    def test_parameters_below_height_control(self) -> None:
        """Test that found parameters stay below phi(T)."""
        curve = catalog_curve("spiral_contracting")
        T = 64
        result = scan_points(curve, T)
        limit = curve.phi.evaluate(T)
        assert result.certified == 7
        assert all(p.parameter <= limit for p in result.points)

    def test_bad_resolution(self) -> None:
        """Test that resolution must be positive."""
        with pytest.raises(SlowdetError):
            scan_parametric_points(catalog_curve("spiral"), 10, resolution=0)
