"""Rational points of bounded height: enumeration, detection and curve scans.

Scans run a float prefilter with numpy over whole batches of rationals and
confirm the survivors at the working precision. A point found this way is
only a candidate; certified points come from a curve's known-point
generator.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np
from mpmath import mp

from slowdet.bounds import BoundMode
from slowdet.config import RunConfig
from slowdet.error import SlowdetError
from slowdet.grammar import MP, NUMPY
from slowdet.rounding import to_fraction, working_precision

if TYPE_CHECKING:
    from slowdet.catalog import CurveSpec

logger = logging.getLogger(__name__)

# Relative agreement a float value needs with a rational to reach confirmation
PREFILTER_TOLERANCE = 1e-9
BISECTION_STEPS = 60


class PointStatus(Enum):
    CERTIFIED = "certified"
    CANDIDATE = "candidate"

    def __str__(self) -> str:
        return self.value


def height(*coords: Fraction) -> int:
    """max of |numerator| and denominator over reduced coordinates."""
    return max(max(abs(c.numerator), c.denominator) for c in coords)


@dataclass(frozen=True, order=True)
class RationalPoint:
    """A rational point in natural coordinates.

    ``height`` is measured in the coordinates of the parametrization, which
    differ from (x, y) for scaled or inverted graph curves.
    """

    x: Fraction
    y: Fraction
    height: int
    parameter: Any = field(default=None, compare=False)
    status: PointStatus = field(default=PointStatus.CERTIFIED, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "x": str(self.x),
            "y": str(self.y),
            "height": self.height,
            "parameter": None if self.parameter is None else mp.nstr(self.parameter, 20),
            "status": self.status.value,
        }


def farey(T: int) -> Iterator[tuple[int, int]]:
    """The Farey sequence of order T as (numerator, denominator), 0/1 to 1/1."""
    a, b, c, d = 0, 1, 1, T
    yield a, b
    while c <= T:
        k = (T + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        yield a, b


def enumerate_rationals(T: int) -> list[Fraction]:
    """Every reduced p/q with |p| <= T and 1 <= q <= T, in increasing order."""
    if T < 1:
        msg = f"T must be a positive integer, got {T}"
        raise SlowdetError.invalid_input(msg)
    table = list(farey(T))
    positive = [Fraction(a, b) for a, b in table if a > 0]
    positive += [Fraction(b, a) for a, b in reversed(table) if 0 < a < b]
    return [-v for v in reversed(positive)] + [Fraction(0)] + positive


def detect_rational(value: Any, eps: Any, T: int) -> Fraction | None:
    """The unique rational of height <= T within eps of value, if any.

    Distinct rationals of height <= T are at least 1/T^2 apart, so for
    eps < 1/(4T^2) the nearest approximation with denominator <= T (taken
    from the continued fraction of the exact binary value) is the only
    possible answer.

    Raises:
        SlowdetError: If eps is too large for uniqueness
    """
    if T < 1:
        msg = f"T must be a positive integer, got {T}"
        raise SlowdetError.invalid_input(msg)
    eps = to_fraction(mp.mpf(eps)) if not isinstance(eps, Fraction) else eps
    if eps < 0 or eps * 4 * T * T >= 1:
        msg = f"eps={float(eps):.3g} is too large for uniqueness at T={T}"
        raise SlowdetError.invalid_input(msg)
    exact = to_fraction(value)
    candidate = exact.limit_denominator(T)
    if abs(candidate.numerator) > T or abs(candidate - exact) > eps:
        return None
    return candidate


def rationals_in_window(
    T: int, lo: Any, hi: Any, denominators: Iterable[int] | None = None
) -> Iterator[tuple[int, np.ndarray]]:
    """Per denominator q, the numerators of reduced p/q of height <= T in [lo, hi]."""
    lo_q, hi_q = to_fraction(lo), to_fraction(hi)
    for q in range(1, T + 1) if denominators is None else denominators:
        p_lo = max(-T, math.ceil(lo_q * q))
        p_hi = min(T, math.floor(hi_q * q))
        if p_lo > p_hi:
            continue
        ps = np.arange(p_lo, p_hi + 1, dtype=np.int64)
        ps = ps[np.gcd(ps, q) == 1]
        if ps.size:
            yield q, ps


def near_rational_mask(values: np.ndarray, T: int, tol: float = PREFILTER_TOLERANCE) -> np.ndarray:
    """Float prefilter: True where a convergent of height <= T lies within tol."""
    y = np.asarray(values, dtype=np.float64)
    hit = np.zeros(y.shape, dtype=bool)
    live = np.isfinite(y)
    bound = tol * np.maximum(1.0, np.abs(np.where(live, y, 0.0)))
    h1, h2 = np.ones_like(y), np.zeros_like(y)
    k1, k2 = np.zeros_like(y), np.ones_like(y)
    r = np.where(live, y, 0.0)
    for _ in range(64):
        if not live.any():
            break
        a = np.floor(r)
        h = a * h1 + h2
        k = a * k1 + k2
        live &= k <= T
        close = live & (np.abs(h) <= T) & (np.abs(y - h / np.where(k > 0, k, 1)) <= bound)
        hit |= close
        live &= ~close
        frac = r - a
        live &= frac > 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(live, 1.0 / np.where(live, frac, 1.0), 0.0)
        h1, h2, k1, k2 = h, h1, k, k1
    return hit


@dataclass(frozen=True)
class ScanResult:
    """Points found by a scan; the counts are lower bounds."""

    points: tuple[RationalPoint, ...]
    evaluated: int
    failures: tuple[str, ...] = ()
    possible_undercount: bool = False

    @property
    def certified(self) -> int:
        return sum(1 for p in self.points if p.status is PointStatus.CERTIFIED)

    @property
    def candidates(self) -> int:
        return sum(1 for p in self.points if p.status is PointStatus.CANDIDATE)

    def to_dict(self) -> dict[str, Any]:
        return {
            "certified": self.certified,
            "candidates": self.candidates,
            "evaluated": self.evaluated,
            "possible_undercount": self.possible_undercount,
            "failures": list(self.failures),
        }


def _evaluation_eps(value: Any, T: int, epsilon_factor: int) -> Fraction:
    noise = to_fraction(mp.ldexp(max(mp.one, abs(value)), -(mp.prec // 2)))
    return min(noise, Fraction(1, epsilon_factor * T * T))


def _merge(
    curve: CurveSpec, T: int, found: Iterable[RationalPoint], window: tuple[Any, Any]
) -> tuple[RationalPoint, ...]:
    merged: dict[tuple[Fraction, Fraction], RationalPoint] = {}
    for point in found:
        merged.setdefault((point.x, point.y), point)
    lo, hi = window
    for point in curve.known_points(T):
        if point.parameter is None or lo <= point.parameter <= hi:
            merged[(point.x, point.y)] = point
    return tuple(sorted(merged.values()))


def _chunks(items: Sequence[Any], n: int) -> list[Sequence[Any]]:
    size = max(1, -(-len(items) // n))
    return [items[i : i + size] for i in range(0, len(items), size)]


def run_parallel(worker: Any, jobs: list[tuple[Any, ...]], threads: int) -> list[Any]:
    """Apply worker to each job, in a process pool when threads > 1."""
    # mpmath precision is process-global, so parallel work runs in processes
    if threads <= 1 or len(jobs) <= 1:
        return [worker(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, *zip(*jobs, strict=True)))


def _check_window(curve: CurveSpec, window: tuple[Any, Any]) -> tuple[Any, Any]:
    lo, hi = mp.mpf(window[0]), mp.mpf(window[1])
    d_lo, d_hi = curve.domain
    if lo > hi or lo < d_lo or hi > d_hi:
        msg = f"window [{lo}, {hi}] is not inside the domain [{d_lo}, {d_hi}] of {curve.name}"
        raise SlowdetError.invalid_input(msg)
    return lo, hi


def scan_graph_points(
    curve: CurveSpec,
    T: int,
    window: tuple[Any, Any] | None = None,
    *,
    config: RunConfig | None = None,
) -> ScanResult:
    """Exhaustive scan of x = p/q of height <= T for rational curve values.

    Raises:
        SlowdetError: If the curve is not a graph or the window leaves the domain
    """
    config = config or RunConfig()
    if curve.graph is None:
        msg = f"{curve.name} is not a graph curve; use scan_parametric_points"
        raise SlowdetError.not_applicable(msg)
    if T < 1:
        msg = f"T must be a positive integer, got {T}"
        raise SlowdetError.invalid_input(msg)
    lo, hi = _check_window(curve, window or curve.parameter_window(T))
    denominators = list(range(1, T + 1))
    jobs = [
        (curve, T, lo, hi, list(chunk), config.precision, config.epsilon_factor)
        for chunk in _chunks(denominators, config.threads)
    ]
    found: list[RationalPoint] = []
    failures: list[str] = []
    evaluated = 0
    for points, fails, count in run_parallel(_scan_graph_chunk, jobs, config.threads):
        found += points
        failures += fails
        evaluated += count
    logger.info(
        "graph scan of %s at T=%d: %d evaluations, %d hits", curve.name, T, evaluated,
        len(found),
    )
    return ScanResult(
        points=_merge(curve, T, found, (lo, hi)),
        evaluated=evaluated,
        failures=tuple(failures),
        possible_undercount=bool(failures),
    )


def _scan_graph_chunk(
    curve: CurveSpec,
    T: int,
    lo: Any,
    hi: Any,
    denominators: Sequence[int],
    precision: int,
    epsilon_factor: int,
) -> tuple[list[RationalPoint], list[str], int]:
    found: list[RationalPoint] = []
    failures: list[str] = []
    evaluated = 0
    with working_precision(precision):
        for q, ps in rationals_in_window(T, lo, hi, denominators):
            evaluated += ps.size
            with np.errstate(all="ignore"):
                ys = curve.g.evaluate(ps / q, NUMPY)
            ys = np.broadcast_to(np.asarray(ys, dtype=np.float64), ps.shape)
            for p in ps[near_rational_mask(ys, T)]:
                x = Fraction(int(p), q)
                try:
                    value = curve.g.evaluate(mp.mpf(x.numerator) / x.denominator, MP)
                except SlowdetError as e:
                    logger.debug("evaluation failed at x=%s: %s", x, e)
                    failures.append(f"x={x}: {e}")
                    continue
                Y = detect_rational(value, _evaluation_eps(value, T, epsilon_factor), T)
                if Y is None:
                    continue
                natural = (x, Y * curve.graph.scale)
                found.append(
                    RationalPoint(
                        natural[0],
                        natural[1],
                        height(*curve.to_curve_coordinates(natural)),
                        parameter=mp.mpf(x.numerator) / x.denominator,
                        status=PointStatus.CANDIDATE,
                    )
                )
    return found, failures, evaluated


def _rational_table(T: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sorted values, numerators and denominators of height-<= T rationals in [lo, hi]."""
    nums: list[np.ndarray] = []
    dens: list[np.ndarray] = []
    for q, ps in rationals_in_window(T, lo, hi):
        nums.append(ps)
        dens.append(np.full(ps.shape, q, dtype=np.int64))
    if not nums:
        empty = np.zeros(0)
        return empty, empty.astype(np.int64), empty.astype(np.int64)
    p = np.concatenate(nums)
    q = np.concatenate(dens)
    values = p / q
    order = np.argsort(values, kind="stable")
    return values[order], p[order], q[order]


def parameter_grid(lo: Any, hi: Any, resolution: int, *, geometric: bool) -> np.ndarray:
    lo_f, hi_f = float(lo), float(hi)
    if geometric and lo_f > 0:
        return np.geomspace(lo_f, hi_f, resolution + 1)
    return np.linspace(lo_f, hi_f, resolution + 1)


def scan_parametric_points(
    curve: CurveSpec,
    T: int,
    resolution: int = 2000,
    window: tuple[Any, Any] | None = None,
    *,
    config: RunConfig | None = None,
) -> ScanResult:
    """Scan the parameter window for x with f(x) and g(x) both rational.

    The window is cut into `resolution` cells; in each cell every rational
    r of height <= T between the end values of f is located by vectorized
    bisection, then g is tested at the root. A cell where f is not visibly
    monotone may hide crossings, so the result is flagged as a possible
    undercount.
    """
    config = config or RunConfig()
    if T < 1 or resolution < 1:
        msg = f"need T >= 1 and resolution >= 1, got {T}, {resolution}"
        raise SlowdetError.invalid_input(msg)
    lo, hi = _check_window(curve, window or curve.parameter_window(T))
    grid = parameter_grid(lo, hi, resolution, geometric=curve.mode is not BoundMode.COMPACT)
    cells = list(zip(grid[:-1], grid[1:], strict=True))
    jobs = [
        (curve, T, list(chunk), config.precision, config.epsilon_factor)
        for chunk in _chunks(cells, config.threads)
    ]
    found: list[RationalPoint] = []
    failures: list[str] = []
    evaluated = 0
    undercount = False
    for points, fails, count, flagged in run_parallel(_scan_cells, jobs, config.threads):
        found += points
        failures += fails
        evaluated += count
        undercount |= flagged
    if undercount:
        logger.warning(
            "f is not monotone on some cells of %s; raise the resolution", curve.name
        )
    return ScanResult(
        points=_merge(curve, T, found, (lo, hi)),
        evaluated=evaluated,
        failures=tuple(failures),
        possible_undercount=undercount or bool(failures),
    )


def _scan_cells(
    curve: CurveSpec,
    T: int,
    cells: Sequence[tuple[float, float]],
    precision: int,
    epsilon_factor: int,
) -> tuple[list[RationalPoint], list[str], int, bool]:
    found: list[RationalPoint] = []
    failures: list[str] = []
    evaluated = 0
    undercount = False

    def f_np(x: Any) -> np.ndarray:
        with np.errstate(all="ignore"):
            return np.broadcast_to(
                np.asarray(curve.f.evaluate(x, NUMPY), dtype=np.float64), np.shape(x)
            )

    ends = np.array([c[0] for c in cells] + [cells[-1][1]]) if cells else np.zeros(0)
    if not cells:
        return found, failures, evaluated, undercount
    values = f_np(ends)
    mids = f_np((ends[:-1] + ends[1:]) / 2)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return found, ["f is not finite on the scanned cells"], 0, True
    v_lo, v_hi = float(finite.min()), float(finite.max())
    table, nums, dens = _rational_table(T, max(v_lo, -T), min(v_hi, T))

    with working_precision(precision):
        for i, (a, b) in enumerate(cells):
            fa, fb, fm = values[i], values[i + 1], mids[i]
            if not (np.isfinite(fa) and np.isfinite(fb)):
                failures.append(f"f not finite on [{a}, {b}]")
                continue
            low, high = min(fa, fb), max(fa, fb)
            if not low <= fm <= high:
                undercount = True
            start = np.searchsorted(table, low, side="left")
            stop = np.searchsorted(table, high, side="right")
            if start == stop:
                continue
            targets = table[start:stop]
            evaluated += targets.size
            roots = _bisect(f_np, a, b, fa >= fb, targets)
            with np.errstate(all="ignore"):
                gs = np.broadcast_to(
                    np.asarray(curve.g.evaluate(roots, NUMPY), dtype=np.float64),
                    roots.shape,
                )
            for j in np.nonzero(near_rational_mask(gs, T))[0]:
                r = Fraction(int(nums[start + j]), int(dens[start + j]))
                point = _confirm(curve, T, r, float(roots[j]), (a, b), epsilon_factor)
                if isinstance(point, str):
                    failures.append(point)
                elif point is not None:
                    found.append(point)
    return found, failures, evaluated, undercount


def _bisect(f_np: Any, a: float, b: float, falling: bool, targets: np.ndarray) -> np.ndarray:
    lo = np.full(targets.shape, a)
    hi = np.full(targets.shape, b)
    for _ in range(BISECTION_STEPS):
        mid = (lo + hi) / 2
        below = f_np(mid) < targets
        move_lo = ~below if falling else below
        lo = np.where(move_lo, mid, lo)
        hi = np.where(move_lo, hi, mid)
    return (lo + hi) / 2


def _confirm(
    curve: CurveSpec,
    T: int,
    r: Fraction,
    guess: float,
    cell: tuple[float, float],
    epsilon_factor: int,
) -> RationalPoint | str | None:
    target = mp.mpf(r.numerator) / r.denominator
    try:
        x = mp.findroot(lambda t: curve.f.evaluate(t, MP) - target, mp.mpf(guess))
    except (ValueError, ZeroDivisionError, SlowdetError) as e:
        return f"root of f = {r} near {guess}: {e}"
    width = cell[1] - cell[0]
    if not cell[0] - width <= x <= cell[1] + width:
        return None
    try:
        value = curve.g.evaluate(x, MP)
    except SlowdetError as e:
        return f"g at {mp.nstr(x, 15)}: {e}"
    Y = detect_rational(value, _evaluation_eps(value, T, epsilon_factor), T)
    if Y is None:
        return None
    return RationalPoint(r, Y, height(r, Y), parameter=x, status=PointStatus.CANDIDATE)


def points_to_csv(points: Iterable[RationalPoint]) -> str:
    """CSV with columns x_num, x_den, y_num, y_den, height, parameter, status."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["x_num", "x_den", "y_num", "y_den", "height", "parameter", "status"])
    for p in points:
        writer.writerow([
            p.x.numerator,
            p.x.denominator,
            p.y.numerator,
            p.y.denominator,
            p.height,
            "" if p.parameter is None else mp.nstr(p.parameter, 20),
            p.status.value,
        ])
    return buffer.getvalue()


def scan_points(
    curve: CurveSpec,
    T: int,
    window: tuple[Any, Any] | None = None,
    *,
    config: RunConfig | None = None,
) -> ScanResult:
    """Run the scan that fits the curve: exhaustive for graphs, bisection otherwise."""
    if curve.graph is not None:
        return scan_graph_points(curve, T, window, config=config)
    return scan_parametric_points(curve, T, window=window, config=config)
