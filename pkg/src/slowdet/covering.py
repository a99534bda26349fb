"""The determinant method made constructive.

Rational points of height <= T on one short parameter interval lie on a
single algebraic curve of degree d. `build_covering_plan` cuts the
parameter range into such intervals, finds the points of each, and
recovers the covering polynomial from the exact nullspace of their
monomial matrix.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
from mpmath import mp

from slowdet.bounds import (
    BoundMode,
    BoundReport,
    BoundShape,
    covering_sequence,
    degree_data,
    degree_schedule,
    det_constant,
    determinant_sup_bound,
    effective_start,
    interval_count_bound,
    interval_length,
    permanent,
)
from slowdet.catalog import CurveSpec
from slowdet.config import RunConfig
from slowdet.error import SlowdetError
from slowdet.linalg import nullspace_vector
from slowdet.points import (
    PointStatus,
    RationalPoint,
    run_parallel,
    scan_points,
)
from slowdet.rounding import enclose, ilog, ipow, upper, working_precision
from slowdet.slow import SlowCertificate

logger = logging.getLogger(__name__)


def monomials(d: int) -> list[tuple[int, int]]:
    """Exponents (i, j) with i + j <= d in lexicographic order."""
    return [(i, j) for i in range(d + 1) for j in range(d + 1 - i)]


@dataclass(frozen=True)
class MonomialMatrix:
    """Rows indexed by monomials X^i Y^j, columns by points, with exact entries."""

    points: tuple[tuple[Fraction, Fraction], ...]
    d: int

    @property
    def exponents(self) -> list[tuple[int, int]]:
        return monomials(self.d)

    @property
    def entries(self) -> list[list[Fraction]]:
        return [[x**i * y**j for x, y in self.points] for i, j in self.exponents]

    def point_rows(self) -> list[list[Fraction]]:
        """The transpose: one row of monomial values per point."""
        return [[x**i * y**j for i, j in self.exponents] for x, y in self.points]


@dataclass(frozen=True)
class CoveringPolynomial:
    """Integer polynomial sum c_ij X^i Y^j in the parametrization's coordinates."""

    d: int
    coefficients: dict[tuple[int, int], int] = field(hash=False)

    def __call__(self, x: Fraction, y: Fraction) -> Fraction:
        return sum((c * x**i * y**j for (i, j), c in self.coefficients.items()), Fraction(0))

    def __str__(self) -> str:
        terms = []
        for (i, j), c in sorted(self.coefficients.items(), reverse=True):
            factors = [f"X^{i}" if i > 1 else "X" if i else "", f"Y^{j}" if j > 1 else "Y" if j else ""]
            mono = "*".join(f for f in factors if f)
            terms.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(terms).replace("+ -", "- ") or "0"

    def to_json(self) -> list[list[int]]:
        return [[i, j, c] for (i, j), c in sorted(self.coefficients.items())]


def covering_polynomial(
    points: Sequence[tuple[Fraction, Fraction]], d: int
) -> CoveringPolynomial:
    """A nonzero polynomial of degree <= d vanishing at every point.

    The coefficient vector spans (the first basis vector of) the nullspace
    of the point-by-monomial matrix, made integral and primitive with a
    positive first coefficient.

    Raises:
        SlowdetError: INVARIANT_VIOLATION if the monomial matrix has full rank
    """
    if d < 1:
        msg = f"degree must be at least 1, got {d}"
        raise SlowdetError.invalid_input(msg)
    distinct = tuple(dict.fromkeys((Fraction(x), Fraction(y)) for x, y in points))
    if not distinct:
        msg = "covering_polynomial needs at least one point"
        raise SlowdetError.invalid_input(msg)
    matrix = MonomialMatrix(distinct, d)
    exponents = matrix.exponents
    vector = nullspace_vector(matrix.point_rows(), len(exponents))
    if vector is None:
        msg = (
            f"{len(distinct)} points admit no curve of degree {d}: "
            "the vanishing condition fails on this interval"
        )
        raise SlowdetError.violation(msg, [(str(x), str(y)) for x, y in distinct])
    return CoveringPolynomial(
        d, {e: c for e, c in zip(exponents, vector, strict=True) if c}
    )


def vanishing_condition(
    d: int, cert: SlowCertificate, T: Any, N: Any, L: Any, *, precision: int | None = None
) -> bool:
    """T^(2d mu) C(d, A, B) L^rho log^(C rho) N / N^rho < 1, left side rounded up."""
    with working_precision(precision):
        dd = degree_data(d)
        iN = enclose(N)
        left = (
            ipow(enclose(T), 2 * d * dd.mu)
            * enclose(det_constant(d, cert.A, cert.B))
            * ipow(enclose(L), dd.rho)
            / ipow(iN, dd.rho)
        )
        if cert.C:
            left = left * ipow(ilog(iN), cert.C * dd.rho)
        return bool(upper(left) < 1)


# Determinant experiments


@dataclass(frozen=True)
class DeterminantReport:
    """Sampled |Delta| against the bound C L^rho log^(C rho) N / N^rho."""

    curve: str
    d: int
    N: Any
    L: Any
    trials: int
    bound: Any
    worst_ratio: Any
    violations: tuple[tuple[Any, ...], ...] = ()
    undecided: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "curve": self.curve,
            "d": self.d,
            "N": mp.nstr(self.N, 20),
            "L": mp.nstr(self.L, 20),
            "trials": self.trials,
            "bound": mp.nstr(self.bound, 12),
            "worst_ratio": mp.nstr(self.worst_ratio, 12),
            "violations": len(self.violations),
            "undecided": self.undecided,
        }


def _monomial_determinant(curve: CurveSpec, xs: Sequence[Any], d: int) -> Any:
    values = [curve.evaluate(x) for x in xs]
    rows = [[fx**i * gx**j for fx, gx in values] for i, j in monomials(d)]
    return mp.det(mp.matrix(rows))


def determinant_bound_check(
    curve: CurveSpec,
    d: int,
    N: Any,
    L: Any,
    trials: int = 100,
    *,
    seed: int = 0,
    precision: int | None = None,
) -> DeterminantReport:
    """Sample mu parameters in [N, N + L] and compare |Delta| with its bound.

    Each determinant is evaluated at two precisions; a comparison the
    difference cannot settle is retried at four times the precision and
    then counted as undecided.

    Raises:
        SlowdetError: If the curve has no certificate or N is left of its start
    """
    cert = curve.cert
    if cert is None or curve.mode is BoundMode.COMPACT:
        msg = f"{curve.name} has no slow certificate"
        raise SlowdetError.not_applicable(msg)
    with working_precision(precision):
        N, L = mp.mpf(N), mp.mpf(L)
        if N < effective_start(cert):
            msg = f"N={N} lies left of the certificate start {effective_start(cert)}"
            raise SlowdetError.domain(msg)
        if L < 0:
            msg = f"L must be nonnegative, got {L}"
            raise SlowdetError.invalid_input(msg)
        dd = degree_data(d)
        iN = enclose(N)
        bound_iv = (
            enclose(det_constant(d, cert.A, cert.B))
            * ipow(enclose(L), dd.rho)
            / ipow(iN, dd.rho)
            * ipow(enclose(max(mp.one, cert.D)), d * dd.mu)
        )
        if cert.C:
            bound_iv = bound_iv * ipow(ilog(iN), cert.C * dd.rho)
        bound = upper(bound_iv)
        rng = np.random.default_rng(seed)
        base = mp.prec

    worst = mp.zero
    violations: list[tuple[Any, ...]] = []
    undecided = 0
    for trial in range(trials):
        offsets = [mp.mpf(float(u)) for u in rng.random(dd.mu)]
        verdict = None
        for factor in (1, 4):
            with working_precision(base * factor):
                xs = [N + L * u for u in offsets]
                coarse = _monomial_determinant(curve, xs, d)
            with working_precision(base * factor * 2):
                fine = abs(_monomial_determinant(curve, xs, d))
                err = abs(abs(coarse) - fine) + mp.ldexp(fine, -base * factor)
                if fine + err <= bound:
                    verdict = True
                elif fine - err > bound:
                    verdict = False
                if verdict is not None:
                    ratio = fine / bound if bound else mp.inf if fine else mp.zero
                    worst = max(worst, ratio)
                    break
            logger.warning("trial %d undecided at %d bits, escalating", trial, base * factor)
        if verdict is None:
            undecided += 1
        elif not verdict:
            logger.info("determinant bound violated in trial %d", trial)
            violations.append(tuple(xs))
    return DeterminantReport(
        curve=curve.name,
        d=d,
        N=N,
        L=L,
        trials=trials,
        bound=bound,
        worst_ratio=worst,
        violations=tuple(violations),
        undecided=undecided,
    )


# Covering plans


@dataclass(frozen=True)
class CoveringInterval:
    """An occupied parameter interval with its points and covering polynomial."""

    left: Any
    right: Any
    points: tuple[RationalPoint, ...]
    polynomial: CoveringPolynomial | None = None
    few_points: bool = False  # fewer than mu points; any curve through them will do
    verified: bool = False
    error: str | None = None
    head: bool = False

    @property
    def certified(self) -> tuple[RationalPoint, ...]:
        return tuple(p for p in self.points if p.status is PointStatus.CERTIFIED)


@dataclass(frozen=True)
class BlockCover:
    """Compact-mode subdivision of one block [lo, hi] into `count` pieces of length L."""

    lo: Any
    hi: Any
    L: Any
    count: int
    sup: Any


@dataclass(frozen=True)
class CompactCover:
    intervals: tuple[CoveringInterval, ...]
    blocks: tuple[BlockCover, ...]
    total: int
    failures: tuple[str, ...] = ()


@dataclass(frozen=True)
class CoveringPlan:
    """Occupied intervals of a covering of the parameter range, with verdicts.

    ``total_intervals`` counts every interval of the partition, occupied or
    not; only occupied ones are listed.
    """

    curve: str
    mode: BoundMode
    T: int
    d: int
    start: Any
    end: Any
    intervals: tuple[CoveringInterval, ...]
    total_intervals: int
    count_bound: int | None
    failures: tuple[str, ...] = ()
    sup_safety: Any = None

    @property
    def verified(self) -> bool:
        within = self.count_bound is None or self.total_intervals <= self.count_bound
        return within and not self.failures and all(i.verified for i in self.intervals)

    @property
    def points(self) -> tuple[RationalPoint, ...]:
        return tuple(p for interval in self.intervals for p in interval.points)


def _cover_points(
    points: Sequence[RationalPoint], curve_coords: Sequence[tuple[Fraction, Fraction]], d: int
) -> tuple[CoveringPolynomial | None, bool, bool, str | None]:
    """Polynomial through the certified points of an interval and its check.

    Candidates are carried along but never enter the construction; an
    interval holding only candidates gets no polynomial.
    """
    certified = [c for p, c in zip(points, curve_coords, strict=True) if p.status is PointStatus.CERTIFIED]
    few = len(set(certified)) < degree_data(d).mu
    if not certified:
        return None, few, True, None
    try:
        poly = covering_polynomial(certified, d)
    except SlowdetError as e:
        return None, few, False, str(e)
    ok = all(poly(x, y) == 0 for x, y in certified)
    return poly, few, ok, None if ok else "polynomial does not vanish on a certified point"


def _assemble(
    curve: CurveSpec,
    groups: dict[Any, tuple[Any, Any, list[RationalPoint]]],
    d: int,
    threads: int,
    *,
    head: bool = False,
) -> list[CoveringInterval]:
    keys = sorted(groups, key=lambda k: groups[k][0])
    jobs = []
    for key in keys:
        pts = groups[key][2]
        jobs.append((pts, [curve.to_curve_coordinates((p.x, p.y)) for p in pts], d))
    results = run_parallel(_cover_points, jobs, threads)
    intervals = []
    for key, (poly, few, ok, error) in zip(keys, results, strict=True):
        left, right, pts = groups[key]
        intervals.append(
            CoveringInterval(
                left, right, tuple(sorted(pts, key=lambda p: p.parameter)), poly, few, ok,
                error, head,
            )
        )
        if error:
            logger.warning("interval [%s, %s]: %s", mp.nstr(left, 12), mp.nstr(right, 12), error)
    return intervals


def _find_points(curve: CurveSpec, T: int, window: tuple[Any, Any], config: RunConfig) -> list[RationalPoint]:
    return list(scan_points(curve, T, window, config=config).points)


def _block_sup_table(
    curve: CurveSpec, lo: Any, hi: Any, d: int, grid: int, safety: Any, precision: int
) -> tuple[list[list[Any]] | None, str | None]:
    """sigma[i][p]: safety times the max over a grid of |(f^a g^b)^(p)/p!|."""
    exps = monomials(d)
    order = len(exps) - 1
    table = [[mp.zero] * (order + 1) for _ in exps]
    with working_precision(precision):
        lo, hi = mp.mpf(lo), mp.mpf(hi)
        xs = [lo] if lo == hi else [lo + (hi - lo) * k / (grid - 1) for k in range(grid)]
        for x in xs:
            try:
                jf = curve.f.jet(x, order)
                jg = curve.g.jet(x, order)
            except SlowdetError as e:
                return None, f"sup estimation failed at x={mp.nstr(x, 15)}: {e}"
            pf = [jf**i for i in range(d + 1)]
            pg = [jg**j for j in range(d + 1)]
            for row, (i, j) in enumerate(exps):
                coeffs = (pf[i] * pg[j]).coeffs
                for p, c in enumerate(coeffs):
                    table[row][p] = max(table[row][p], abs(c))
        safety = mp.mpf(safety)
        return [[v * safety for v in row] for row in table], None


def _block_length(table: list[list[Any]], T: int, d: int, width: Any) -> Any:
    """Largest L <= width with T^(2d mu) L^rho perm(sigma) < 1."""
    dd = degree_data(d)
    perm = permanent(table)
    if perm == 0:
        return width
    value = upper(enclose(perm) * ipow(enclose(T), 2 * d * dd.mu))
    L = mp.power(value, -mp.mpf(1) / dd.rho) * (1 - mp.ldexp(1, 16 - mp.prec))
    height_factor = upper(ipow(enclose(T), 2 * d * dd.mu))
    while L > 0 and not determinant_sup_bound(table, L) * height_factor < 1:
        L /= 2
    return min(L, width)


def _blocks(lo: Any, hi: Any) -> list[tuple[Any, Any]]:
    n = max(1, int(mp.ceil(hi - lo)))
    step = (hi - lo) / n
    return [(lo + k * step, hi if k == n - 1 else lo + (k + 1) * step) for k in range(n)]


def compact_cover(
    curve: CurveSpec,
    interval: tuple[Any, Any],
    T: int,
    d: int,
    points: Iterable[RationalPoint] | None = None,
    *,
    config: RunConfig | None = None,
) -> CompactCover:
    """Cover [lo, hi] using derivative sups measured from jets.

    The interval is cut into unit blocks; on each block the sup table of the
    monomials' Taylor coefficients (grid maximum times config.sup_safety)
    fixes a length L for which the determinant of any mu points of height
    <= T must vanish, and the block is subdivided into pieces of length L.
    """
    config = config or RunConfig()
    with working_precision(config.precision):
        lo, hi = mp.mpf(interval[0]), mp.mpf(interval[1])
        if lo > hi:
            msg = f"empty interval [{lo}, {hi}]"
            raise SlowdetError.invalid_input(msg)
        if points is None:
            points = _find_points(curve, T, (lo, hi), config)
        blocks = _blocks(lo, hi) if hi > lo else [(lo, hi)]

    jobs = [
        (curve, b_lo, b_hi, d, config.compact_grid, config.sup_safety, config.precision)
        for b_lo, b_hi in blocks
    ]
    tables = run_parallel(_block_sup_table, jobs, config.threads)

    covers: list[BlockCover] = []
    failures: list[str] = []
    groups: dict[Any, tuple[Any, Any, list[RationalPoint]]] = {}
    pending = sorted(
        (p for p in points if p.parameter is not None and lo <= p.parameter <= hi),
        key=lambda p: p.parameter,
    )
    with working_precision(config.precision):
        for b, ((b_lo, b_hi), (table, error)) in enumerate(zip(blocks, tables, strict=True)):
            if table is None:
                failures.append(error or "sup estimation failed")
                continue
            width = b_hi - b_lo
            L = _block_length(table, T, d, width) if width > 0 else mp.zero
            if width > 0 and not L > 0:
                failures.append(f"no admissible length on [{b_lo}, {b_hi}]")
                continue
            count = 1 if width == 0 else int(mp.ceil(width / L))
            covers.append(BlockCover(b_lo, b_hi, L, count, max(max(row) for row in table)))
            logger.debug("block [%s, %s]: L=%s, %d pieces", mp.nstr(b_lo, 8), mp.nstr(b_hi, 8), mp.nstr(L, 8), count)
            last = b == len(blocks) - 1
            while pending and (pending[0].parameter < b_hi or (last and pending[0].parameter <= b_hi)):
                point = pending.pop(0)
                k = 0 if width == 0 else min(count - 1, int(mp.floor((point.parameter - b_lo) / L)))
                left = b_lo + k * L
                right = min(b_hi, left + L)
                groups.setdefault((b, k), (left, right, []))[2].append(point)

    intervals = _assemble(curve, groups, d, config.threads)
    failures += [f"[{mp.nstr(i.left, 12)}, {mp.nstr(i.right, 12)}]: {i.error}" for i in intervals if i.error]
    return CompactCover(
        intervals=tuple(intervals),
        blocks=tuple(covers),
        total=sum(c.count for c in covers),
        failures=tuple(failures),
    )


def _geometric_partition(
    cert: SlowCertificate,
    d: int,
    T: int,
    N: Any,
    end: Any,
    points: Sequence[RationalPoint],
) -> tuple[int, Any, dict[Any, tuple[Any, Any, list[RationalPoint]]]]:
    """For C = 0, L(x) = k x, so the partition points are N (1+k)^n."""
    k = interval_length(degree_data(d), cert, T, N) / N * (1 - mp.ldexp(1, 8 - mp.prec))
    step = mp.log1p(k)

    def node(n: int) -> Any:
        return N * mp.exp(n * step)

    total = max(1, int(mp.ceil(mp.log(end / N) / step)))
    while node(total) < end:
        total += 1
    groups: dict[Any, tuple[Any, Any, list[RationalPoint]]] = {}
    for point in points:
        n = int(mp.floor(mp.log(point.parameter / N) / step))
        while n > 0 and node(n) > point.parameter:
            n -= 1
        while node(n + 1) <= point.parameter:
            n += 1
        groups.setdefault(n, (node(n), node(n + 1), []))[2].append(point)
    return total, node(total), groups


def _iterated_partition(
    cert: SlowCertificate,
    d: int,
    T: int,
    N: Any,
    end: Any,
    points: Sequence[RationalPoint],
    max_steps: int,
) -> tuple[int, Any, dict[Any, tuple[Any, Any, list[RationalPoint]]]]:
    groups: dict[Any, tuple[Any, Any, list[RationalPoint]]] = {}
    pending = sorted(points, key=lambda p: p.parameter)
    left = None
    total = 0
    for x in covering_sequence(cert, d, T, end, start=N, max_steps=max_steps):
        if left is not None:
            while pending and pending[0].parameter < x:
                groups.setdefault(total, (left, x, []))[2].append(pending.pop(0))
            total += 1
        left = x
    if pending and groups:
        groups[max(groups)][2].extend(pending)
    elif pending:
        groups[0] = (N, left, pending)
    return max(total, 1), left, groups


def build_covering_plan(
    curve: CurveSpec,
    T: int,
    points: Iterable[RationalPoint] | None = None,
    *,
    config: RunConfig | None = None,
) -> CoveringPlan:
    """Partition the parameter range and cover the points of each piece.

    Slow curves are covered on [N, phi(T)] by the covering sequence, with
    [domain start, N] handed to `compact_cover`; compact curves are covered
    on their window. Points default to a scan of the window (certified
    known points plus candidates).

    Raises:
        SlowdetError: If the curve lacks a certificate or height control
    """
    config = config or RunConfig()
    if T < 1:
        msg = f"T must be a positive integer, got {T}"
        raise SlowdetError.invalid_input(msg)
    with working_precision(config.precision):
        d = degree_schedule(T)
        if curve.mode is BoundMode.COMPACT:
            window = curve.parameter_window(T)
            cover = compact_cover(curve, window, T, d, points, config=config)
            plan = CoveringPlan(
                curve=curve.name,
                mode=curve.mode,
                T=T,
                d=d,
                start=window[0],
                end=window[1],
                intervals=cover.intervals,
                total_intervals=cover.total,
                count_bound=None,
                failures=cover.failures,
                sup_safety=mp.mpf(config.sup_safety),
            )
            _log_plan(plan)
            return plan

        cert = curve.cert
        if cert is None:
            msg = f"{curve.name} has no certificate"
            raise SlowdetError.missing_certificate(msg)
        if curve.phi is None:
            msg = f"{curve.name} has no height control function"
            raise SlowdetError.missing_height_control(msg)
        N = effective_start(cert)
        phiT = max(curve.phi.evaluate(T), N)
        lo = curve.domain[0]
        if points is None:
            points = _find_points(curve, T, (lo, min(curve.domain[1], phiT)), config)
        points = [p for p in points if p.parameter is not None]

        failures: list[str] = []
        beyond = [p for p in points if p.parameter > phiT]
        for p in beyond:
            status = "certified" if p.status is PointStatus.CERTIFIED else "candidate"
            failures.append(f"{status} point ({p.x}, {p.y}) lies beyond phi(T)")
        body = [p for p in points if N <= p.parameter <= phiT]
        if cert.C == 0:
            total, end, groups = _geometric_partition(cert, d, T, N, phiT, body)
        else:
            total, end, groups = _iterated_partition(
                cert, d, T, N, phiT, body, config.max_covering_steps
            )
        intervals = _assemble(curve, groups, d, config.threads)

        head: list[CoveringInterval] = []
        head_total = 0
        if lo < N:
            head_points = [p for p in points if p.parameter < N]
            cover = compact_cover(curve, (lo, N), T, d, head_points, config=config)
            head = [
                CoveringInterval(
                    i.left, i.right, i.points, i.polynomial, i.few_points, i.verified, i.error, True
                )
                for i in cover.intervals
            ]
            head_total = cover.total
            failures += list(cover.failures)
        failures += [
            f"[{mp.nstr(i.left, 12)}, {mp.nstr(i.right, 12)}]: {i.error}" for i in intervals if i.error
        ]
        plan = CoveringPlan(
            curve=curve.name,
            mode=curve.mode,
            T=T,
            d=d,
            start=N,
            end=end,
            intervals=tuple(head + intervals),
            total_intervals=total + head_total,
            count_bound=interval_count_bound(cert, d, T, phiT) + head_total,
            failures=tuple(failures),
            sup_safety=mp.mpf(config.sup_safety) if head else None,
        )
        _log_plan(plan)
        return plan


def _log_plan(plan: CoveringPlan) -> None:
    logger.info(
        "covering plan for %s at T=%d: d=%d, %d intervals (%d occupied), %s",
        plan.curve, plan.T, plan.d, plan.total_intervals, len(plan.intervals),
        "verified" if plan.verified else "NOT verified",
    )


def compact_bound(
    curve: CurveSpec, T: int, *, config: RunConfig | None = None
) -> BoundReport:
    """Bound for a compact-mode curve: the Bezout bound summed over the subintervals.

    Raises:
        SlowdetError: If the curve is not in compact mode or has no Bezout formula
    """
    config = config or RunConfig()
    if curve.mode is not BoundMode.COMPACT:
        msg = f"{curve.name} is not a compact-mode curve; use global_bound"
        raise SlowdetError.not_applicable(msg)
    if curve.bezout is None:
        msg = f"{curve.name} has no Bezout formula"
        raise SlowdetError.missing_bezout(msg)
    if not curve.transcendental:
        msg = f"{curve.name} is not declared transcendental"
        raise SlowdetError.not_applicable(msg)
    with working_precision(config.precision):
        d = degree_schedule(T)
        window = curve.parameter_window(T)
        cover = compact_cover(curve, window, T, d, points=(), config=config)
        if cover.failures:
            msg = f"compact cover of {curve.name} failed: {cover.failures[0]}"
            raise SlowdetError.precision(msg, list(cover.failures))
        total = enclose(0)
        worst = mp.zero
        for block in cover.blocks:
            per_piece = curve.bezout(block.L, d)
            worst = max(worst, per_piece)
            total += enclose(block.count) * enclose(per_piece)
        shape = BoundShape(*curve.bezout.shape)
        return BoundReport(
            curve=curve.name,
            mode=BoundMode.COMPACT,
            T=mp.mpf(T),
            d=d,
            cert=None,
            N=window[0],
            phiT=window[1],
            L=min((b.L for b in cover.blocks), default=mp.zero),
            nT=cover.total,
            bezout=worst,
            alpha=mp.one,
            beta_T=0,
            beta_phi=0,
            total=upper(total),
            exponents=shape,
            factor_exponents=shape,
            bezout_non_explicit=curve.bezout.non_explicit,
        )


def plan_to_json(plan: CoveringPlan) -> dict[str, Any]:
    """Endpoints as full-precision decimal strings, polynomials as integer triples.

    Intervals refer to points by their index in the top-level point list.
    """
    digits = mp.dps + 2
    points = list(plan.points)
    ids = {id(p): k for k, p in enumerate(points)}
    return {
        "curve": plan.curve,
        "mode": plan.mode.value,
        "T": plan.T,
        "d": plan.d,
        "start": mp.nstr(plan.start, digits),
        "end": mp.nstr(plan.end, digits),
        "total_intervals": plan.total_intervals,
        "count_bound": plan.count_bound,
        "verified": plan.verified,
        "sup_safety": None if plan.sup_safety is None else mp.nstr(plan.sup_safety, 6),
        "failures": list(plan.failures),
        "points": [p.to_dict() for p in points],
        "intervals": [
            {
                "left": mp.nstr(i.left, digits),
                "right": mp.nstr(i.right, digits),
                "points": [ids[id(p)] for p in i.points],
                "polynomial": None if i.polynomial is None else i.polynomial.to_json(),
                "few_points": i.few_points,
                "verified": i.verified,
                "head": i.head,
                "error": i.error,
            }
            for i in plan.intervals
        ],
    }


def count_points(plan: CoveringPlan) -> dict[str, int]:
    certified = sum(len(i.certified) for i in plan.intervals)
    return {"certified": certified, "candidates": len(plan.points) - certified}

