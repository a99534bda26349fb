"""Tests for covering polynomials, determinant checks and covering plans."""

from dataclasses import replace
from fractions import Fraction

import pytest
from mpmath import mp

from slowdet.bounds import BoundMode, degree_data, degree_schedule, effective_start, interval_length
from slowdet.catalog import catalog_curve, make_exp2_slow, make_spiral, spiral_branches
from slowdet.config import RunConfig
from slowdet.covering import (
    CoveringPolynomial,
    MonomialMatrix,
    build_covering_plan,
    compact_bound,
    compact_cover,
    count_points,
    covering_polynomial,
    determinant_bound_check,
    monomials,
    plan_to_json,
    vanishing_condition,
)
from slowdet.error import ErrorCode, SlowdetError
from slowdet.points import PointStatus, RationalPoint
from slowdet.slow import SlowCertificate


def circle_point(t: Fraction) -> tuple[Fraction, Fraction]:
    return (1 - t * t) / (1 + t * t), 2 * t / (1 + t * t)


class TestMonomials:
    """Tests for monomial matrices."""

    def test_order(self) -> None:
        """Test the lexicographic exponent order."""
        assert monomials(1) == [(0, 0), (0, 1), (1, 0)]
        assert len(monomials(3)) == degree_data(3).mu

    def test_entries(self) -> None:
        """Test exact entries x^i y^j."""
        m = MonomialMatrix(((Fraction(1, 2), Fraction(3)),), 1)
        assert m.entries == [[1], [3], [Fraction(1, 2)]]
        assert m.point_rows() == [[1, 3, Fraction(1, 2)]]


class TestCoveringPolynomial:
    """Tests for exact covering polynomials."""

    def test_collinear(self) -> None:
        """Test three points on y = x with d = 1."""
        poly = covering_polynomial([(0, 0), (1, 1), (2, 2)], 1)
        assert poly.coefficients == {(0, 1): 1, (1, 0): -1}
        assert str(poly) == "-1*X + 1*Y"

    def test_parabola(self) -> None:
        """Test (1, 1), (2, 4), (3, 9) with d = 2."""
        points = [(Fraction(k), Fraction(k * k)) for k in (1, 2, 3)]
        poly = covering_polynomial(points, 2)
        assert poly.coefficients
        assert all(poly(x, y) == 0 for x, y in points)

    def test_circle(self) -> None:
        """Test five rational points on the unit circle: a multiple of x^2 + y^2 - 1."""
        points = [circle_point(Fraction(t)) for t in ("0", "1/2", "1/3", "2", "3")]
        poly = covering_polynomial(points, 2)
        assert poly.coefficients == {(0, 0): 1, (0, 2): -1, (2, 0): -1}

    def test_permutation_invariant(self) -> None:
        """Test that the order of the points does not matter."""
        points = [circle_point(Fraction(t)) for t in ("0", "1/2", "1/3", "2", "3")]
        assert covering_polynomial(points, 2) == covering_polynomial(points[::-1], 2)

    def test_duplicates_ignored(self) -> None:
        """Test that repeated points count once."""
        poly = covering_polynomial([(1, 2), (1, 2), (3, 4)], 1)
        assert poly(Fraction(1), Fraction(2)) == 0
        assert poly(Fraction(3), Fraction(4)) == 0

    def test_full_rank(self) -> None:
        """Test that three points in general position admit no line."""
        with pytest.raises(SlowdetError) as exc_info:
            covering_polynomial([(0, 0), (1, 0), (0, 1)], 1)
        assert exc_info.value.code == ErrorCode.INVARIANT_VIOLATION

    def test_rejects(self) -> None:
        """Test empty input and d = 0."""
        with pytest.raises(SlowdetError):
            covering_polynomial([], 1)
        with pytest.raises(SlowdetError):
            covering_polynomial([(0, 0)], 0)

    def test_json(self) -> None:
        """Test integer triples."""
        poly = CoveringPolynomial(1, {(1, 0): 2, (0, 0): -3})
        assert poly.to_json() == [[0, 0, -3], [1, 0, 2]]


class TestVanishingCondition:
    """Tests for T^(2d mu) C L^rho log^(C rho) N / N^rho < 1."""

    def test_small(self) -> None:
        """Test d = 1, A = 1, B = C = 0, T = N = 1, L = 0.1: 0.054 < 1."""
        cert = SlowCertificate(A=1, B=0, C=0)
        assert vanishing_condition(1, cert, 1, 1, mp.mpf("0.1"))
        assert not vanishing_condition(1, cert, 1, 1, 1)

    def test_chosen_length(self) -> None:
        """Test that the interval length satisfies the condition."""
        cert = SlowCertificate(A=2, B=1, C=1)
        for d, T, N in ((1, 3, 10), (2, 10, 100), (3, 50, 1000)):
            L = interval_length(degree_data(d), cert, T, N)
            assert vanishing_condition(d, cert, T, N, L)
            assert not vanishing_condition(d, cert, T, N, 4 * L)


class TestDeterminantCheck:
    """Tests for sampled determinants against their bound."""

    def test_spiral(self) -> None:
        """Test the spiral, d = 1, N = 10, L = 0.05: no violations."""
        report = determinant_bound_check(make_spiral(), 1, 10, mp.mpf("0.05"), trials=100)
        assert report.ok
        assert report.undecided == 0
        assert 0 < report.worst_ratio < 1
        assert report.to_dict()["violations"] == 0

    def test_degree_two(self) -> None:
        """Test the sinlog graph at d = 2."""
        report = determinant_bound_check(catalog_curve("sinlog"), 2, 20, mp.mpf("0.01"), trials=20)
        assert report.ok

    def test_left_of_start(self) -> None:
        """Test that N must be right of the certificate start."""
        with pytest.raises(SlowdetError) as exc_info:
            determinant_bound_check(make_spiral(), 1, 2, 1)
        assert exc_info.value.code == ErrorCode.DOMAIN

    def test_compact_curve(self) -> None:
        """Test that compact curves are refused."""
        with pytest.raises(SlowdetError) as exc_info:
            determinant_bound_check(catalog_curve("sin_pi_graph"), 1, 10, 1)
        assert exc_info.value.code == ErrorCode.NOT_APPLICABLE


class TestCoveringPlan:
    """Tests for covering plans of slow curves."""

    def test_spiral(self) -> None:
        """Test the spiral at T = 10: verified and within the interval count bound."""
        plan = build_covering_plan(make_spiral(), 10)
        assert plan.d == 2
        assert plan.verified
        assert plan.total_intervals <= plan.count_bound
        assert plan.mode is BoundMode.SLOW_PLUS
        assert plan.failures == ()

    def test_exp2_slow(self) -> None:
        """Test 2^-x at T = 256: the points (k, 2^-k) lie on their polynomials."""
        curve = make_exp2_slow()
        plan = build_covering_plan(curve, 256)
        assert plan.verified
        assert count_points(plan)["certified"] == 8
        for interval in plan.intervals:
            for p in interval.certified:
                assert interval.polynomial(*curve.to_curve_coordinates((p.x, p.y))) == 0

    def test_threshold_one(self) -> None:
        """Test T = 1: lines."""
        plan = build_covering_plan(make_spiral(), 1)
        assert plan.d == 1
        assert plan.verified

    def test_given_points(self) -> None:
        """Test a plan over supplied points."""
        contracting, _ = spiral_branches()
        T = 64
        plan = build_covering_plan(contracting, T, contracting.known_points(T))
        assert plan.verified
        assert len(plan.points) == 7
        assert plan.start >= contracting.cert.a

    def test_point_beyond_phi(self) -> None:
        """Test that a point past phi(T) fails the plan."""
        far = RationalPoint(Fraction(1, 10**6), Fraction(0), 10**6, parameter=mp.mpf(10**6))
        plan = build_covering_plan(make_spiral(), 10, [far])
        assert not plan.verified
        assert "beyond phi(T)" in plan.failures[0]

    def test_candidates_never_build_polynomials(self) -> None:
        """Test that candidates in general position leave their interval verified and uncovered."""
        curve = make_spiral()
        N = effective_start(curve.cert)
        candidates = [
            RationalPoint(
                Fraction(k), Fraction(k**3 + 1, 7), 7, parameter=N, status=PointStatus.CANDIDATE
            )
            for k in range(4)
        ]
        plan = build_covering_plan(curve, 1, candidates)
        assert plan.d == 1
        assert plan.failures == ()
        assert plan.verified
        (interval,) = [i for i in plan.intervals if i.points]
        assert len(interval.points) == 4
        assert interval.polynomial is None
        assert interval.verified
        data = plan_to_json(plan)
        assert [i["polynomial"] for i in data["intervals"] if i["points"]] == [None]

    def test_certified_point_among_candidates(self) -> None:
        """Test that only the certified point of a mixed interval constrains its polynomial."""
        curve = make_spiral()
        N = effective_start(curve.cert)
        certified = RationalPoint(Fraction(5), Fraction(-2), 5, parameter=N)
        candidates = [
            RationalPoint(
                Fraction(k), Fraction(k**3 + 1, 7), 7, parameter=N, status=PointStatus.CANDIDATE
            )
            for k in range(4)
        ]
        plan = build_covering_plan(curve, 1, [certified, *candidates])
        assert plan.verified
        (interval,) = [i for i in plan.intervals if i.points]
        assert len(interval.points) == 5
        assert interval.polynomial is not None
        assert interval.polynomial(Fraction(5), Fraction(-2)) == 0

    def test_missing_certificate(self) -> None:
        """Test that a slow curve needs a certificate."""
        curve = replace(make_spiral(), cert=None)
        with pytest.raises(SlowdetError) as exc_info:
            build_covering_plan(curve, 10, [])
        assert exc_info.value.code == ErrorCode.MISSING_CERTIFICATE

    def test_rejects_t(self) -> None:
        """Test that T = 0 is invalid."""
        with pytest.raises(SlowdetError):
            build_covering_plan(make_spiral(), 0)

    def test_json(self) -> None:
        """Test the serialized plan."""
        contracting, _ = spiral_branches()
        plan = build_covering_plan(contracting, 16, contracting.known_points(16))
        data = plan_to_json(plan)
        assert data["T"] == 16
        assert data["verified"] is True
        assert len(data["points"]) == 5
        ids = sorted(k for interval in data["intervals"] for k in interval["points"])
        assert ids == list(range(5))
        for interval in data["intervals"]:
            assert mp.mpf(interval["left"]) <= mp.mpf(interval["right"])
            assert all(len(t) == 3 for t in interval["polynomial"])


class TestCompactCover:
    """Tests for covering with measured derivative sups."""

    def test_sine_arch(self) -> None:
        """Test sin(pi x) on [0, 1] at T = 20."""
        curve = catalog_curve("sin_pi_graph")
        T = 20
        d = degree_schedule(T)
        cover = compact_cover(curve, (0, 1), T, d)
        assert cover.failures == ()
        assert cover.total >= len(cover.intervals) >= 1
        assert all(i.verified for i in cover.intervals)
        xs = {p.x for i in cover.intervals for p in i.points}
        assert {Fraction(0), Fraction(1, 6), Fraction(1, 2), Fraction(5, 6), Fraction(1)} <= xs

    def test_single_point(self) -> None:
        """Test an interval of length zero: one piece, any line."""
        point = RationalPoint(Fraction(0), Fraction(0), 1, parameter=mp.zero)
        cover = compact_cover(catalog_curve("sin_pi_graph"), (0, 0), 5, 1, [point])
        assert cover.total == 1
        assert len(cover.intervals) == 1
        assert cover.intervals[0].few_points
        assert cover.intervals[0].verified

    def test_expanding_branch(self) -> None:
        """Test the expanding spiral at T = 256 over its known points."""
        _, expanding = spiral_branches()
        T = 256
        points = expanding.known_points(T)
        cover = compact_cover(expanding, expanding.parameter_window(T), T, degree_schedule(T), points)
        assert cover.failures == ()
        covered = [p for i in cover.intervals for p in i.points]
        assert sorted(covered) == sorted(points)
        for interval in cover.intervals:
            for p in interval.points:
                assert interval.polynomial(p.x, p.y) == 0

    def test_empty_interval(self) -> None:
        """Test that lo > hi is rejected."""
        with pytest.raises(SlowdetError):
            compact_cover(catalog_curve("sin_pi_graph"), (1, 0), 5, 1, [])

    def test_plan(self) -> None:
        """Test a compact plan of 2^x over its known points."""
        curve = catalog_curve("exp2_graph")
        plan = build_covering_plan(curve, 16, curve.known_points(16))
        assert plan.mode is BoundMode.COMPACT
        assert plan.count_bound is None
        assert plan.verified
        assert plan.sup_safety == 2
        assert all(p.status is PointStatus.CERTIFIED for p in plan.points)


class TestCompactBound:
    """Tests for the compact-mode global bound."""

    def test_sin_pi(self) -> None:
        """Test a finite positive bound for sin(pi x)."""
        report = compact_bound(catalog_curve("sin_pi_graph"), 10)
        assert report.mode is BoundMode.COMPACT
        assert report.total > 0
        assert report.nT >= 1
        assert report.to_dict()["mode"] == "compact"

    def test_grows(self) -> None:
        """Test that the bound grows with T."""
        curve = catalog_curve("exp2_graph")
        assert compact_bound(curve, 20).total >= compact_bound(curve, 5).total

    def test_slow_curve(self) -> None:
        """Test that slow curves are refused."""
        with pytest.raises(SlowdetError) as exc_info:
            compact_bound(make_spiral(), 10)
        assert exc_info.value.code == ErrorCode.NOT_APPLICABLE


@pytest.mark.slow
class TestCoveringAcceptance:
    """Longer covering runs."""

    @pytest.mark.parametrize("T", [10, 100, 1024])
    def test_exp2_slow(self, T) -> None:
        """Test 2^-x plans at several thresholds."""
        plan = build_covering_plan(make_exp2_slow(), T)
        assert plan.verified
        assert plan.total_intervals <= plan.count_bound

    def test_unbounded_spiral(self) -> None:
        """Test S_(pi/log 2) at T = 2^10 over its 21 known points."""
        curve = catalog_curve("unbounded_spiral")
        T = 1024
        plan = build_covering_plan(curve, T, curve.known_points(T), config=RunConfig(threads=1))
        assert plan.verified
        assert len(plan.points) == 21

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["spiral", "sinlog"])
    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("N", [10, 100])
    def test_determinant_suite(self, name, d, N) -> None:
        """Test sampled determinants on intervals of the length the plan uses."""
        curve = catalog_curve(name)
        # smallest T whose scheduled degree is d
        T = {1: 3, 2: 8, 3: 21}[d]
        assert degree_schedule(T) == d
        L = interval_length(degree_data(d), curve.cert, T, N, precision=256)
        assert L > 0
        report = determinant_bound_check(curve, d, N, L, trials=25, seed=d * N, precision=256)
        assert report.trials == 25
        assert report.ok, report.to_dict()
