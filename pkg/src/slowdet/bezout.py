"""Bezout bounds B(x, d) for the curve families, and an empirical zero counter.

A Bezout bound dominates the number of intersections of a curve segment
with any algebraic curve of degree d. The formulas are taken as given;
`empirical_zero_count` gives a lower bound on such counts so the formulas
can be audited.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np
from mpmath import mp

from slowdet.bounds import BoundMode
from slowdet.error import SlowdetError
from slowdet.rounding import decode_mpf, enclose, encode_mpf, ilog, ilog_plus, ipi, to_mpf, upper

if TYPE_CHECKING:
    from slowdet.catalog import CurveSpec

logger = logging.getLogger(__name__)


class BezoutKind(Enum):
    SPIRAL = "spiral"
    SINLOG = "sinlog_graph"
    ZETA = "zeta"
    GAMMA = "gamma"
    POLYNOMIAL = "polynomial"
    SINC = "sinc"
    EXPSPIRAL = "expspiral"

    def __str__(self) -> str:
        return self.value


# Exponents of (log T, log log T) in the Bezout factor once x = phi(T) and
# d = log T are substituted. The first (folded) entry is what the factor adds
# to the family's final bound after its powers of d and log x are absorbed
# into the leading log factors; Gamma's c d log x log log x keeps only its
# log log T there. The second entry is the factor taken literally, with every
# power of d and log x counted.
_SHAPES: dict[BezoutKind, tuple[tuple[int, int], tuple[int, int]]] = {
    BezoutKind.SPIRAL: ((4, 0), (4, 0)),
    BezoutKind.SINLOG: ((4, 0), (4, 0)),
    BezoutKind.ZETA: ((2, 0), (2, 1)),
    BezoutKind.GAMMA: ((0, 1), (2, 1)),
    BezoutKind.SINC: ((3, 0), (3, 0)),
    BezoutKind.EXPSPIRAL: ((4, 0), (4, 0)),
}

_NON_EXPLICIT = frozenset({BezoutKind.ZETA, BezoutKind.GAMMA})


@dataclass(frozen=True)
class BezoutFormula:
    """A family's Bezout bound, callable as ``formula(x, d)``.

    For the compact families (sinc, expspiral) x is the length of the
    parameter interval.
    """

    kind: BezoutKind
    params: dict[str, Any] = field(default_factory=dict, hash=False)

    def __call__(self, x: Any, d: int) -> Any:
        return self.evaluate(x, d)

    def evaluate(self, x: Any, d: int) -> Any:
        """B(x, d), rounded up."""
        if d < 1:
            msg = f"Bezout degree must be >= 1, got {d}"
            raise SlowdetError.invalid_input(msg)
        x = mp.mpf(x)
        p = self.params
        match self.kind:
            case BezoutKind.SPIRAL:
                if x < 1:
                    msg = f"spiral Bezout bound needs L >= 1, got {x}"
                    raise SlowdetError.domain(msg)
                return _spiral(p["F"], p["G"], p["ell"], p["q"], p.get("omega", 1), ilog(x), d)
            case BezoutKind.SINLOG:
                if x < 1:
                    msg = f"sinlog Bezout bound needs T >= 1, got {x}"
                    raise SlowdetError.domain(msg)
                ell = int(p["ell"])
                turns = _turns(enclose(max(1, abs(mp.mpf(p.get("c", 1))))) * ilog(x))
                return upper(4 * d * ell * enclose(d + ell + 2) ** 2 * turns)
            case BezoutKind.ZETA:
                value = enclose(d) + enclose(x) * ilog_plus(x)
                return upper(enclose(p["c"]) * value * d)
            case BezoutKind.GAMMA:
                lx = ilog_plus(x)
                return upper(enclose(p["c"]) * d * lx * ilog_plus(lx))
            case BezoutKind.POLYNOMIAL:
                lx = ilog_plus(x)
                total = enclose(0)
                for i, j, c in p["terms"]:
                    total += enclose(c) * lx**i * enclose(d) ** j
                return upper(total)
            case BezoutKind.SINC:
                if x < 0:
                    msg = f"interval length must be nonnegative, got {x}"
                    raise SlowdetError.domain(msg)
                turns = _turns(enclose(abs(mp.mpf(p["c"]))) * enclose(x))
                return upper(4 * d * enclose(d + 3) ** 2 * turns)
            case BezoutKind.EXPSPIRAL:
                if x < 0:
                    msg = f"interval length must be nonnegative, got {x}"
                    raise SlowdetError.domain(msg)
                return _spiral(1, 1, 1, 1, p["omega"], enclose(x), d)
        msg = f"unknown Bezout formula {self.kind}"
        raise SlowdetError.internal(msg)

    @property
    def shape(self) -> tuple[int, int]:
        if self.kind is BezoutKind.POLYNOMIAL:
            return tuple(self.params.get("shape", (0, 0)))  # type: ignore[return-value]
        return _SHAPES[self.kind][0]

    @property
    def factor_shape(self) -> tuple[int, int]:
        if self.kind is BezoutKind.POLYNOMIAL:
            return self.shape
        return _SHAPES[self.kind][1]

    @property
    def non_explicit(self) -> bool:
        """True when the family's constant is a configured stand-in."""
        return self.kind in _NON_EXPLICIT

    def to_json(self) -> dict[str, Any]:
        params: dict[str, Any] = {}
        for key, value in self.params.items():
            if key == "terms":
                params[key] = [[i, j, str(c)] for i, j, c in value]
            elif key == "shape":
                params[key] = list(value)
            elif key in ("ell", "q"):
                params[key] = int(value)
            else:
                params[key] = encode_mpf(value)
        return {"id": self.kind.value, "params": params}

    @staticmethod
    def from_json(data: dict[str, Any]) -> BezoutFormula:
        try:
            kind = BezoutKind(data["id"])
            params: dict[str, Any] = {}
            for key, value in data.get("params", {}).items():
                if key == "terms":
                    params[key] = tuple((int(i), int(j), Fraction(c)) for i, j, c in value)
                elif key == "shape":
                    params[key] = tuple(int(v) for v in value)
                elif key in ("ell", "q"):
                    params[key] = int(value)
                else:
                    params[key] = decode_mpf(value)
        except (KeyError, ValueError, TypeError) as e:
            msg = f"Invalid Bezout formula: {e}"
            raise SlowdetError.invalid_input(msg) from e
        return BezoutFormula(kind, params)


def _turns(value: Any) -> Any:
    """floor(value / pi) + 1, taken at the upper end of the enclosure."""
    return enclose(int(mp.floor(upper(enclose(value) / ipi()))) + 1)


def _spiral(F: Any, G: Any, ell: int, q: int, omega: Any, log_len: Any, d: int) -> Any:
    fg = enclose(F) + enclose(G)
    inner = enclose(d) * fg + ell + q + 2
    turns = _turns(enclose(omega) * log_len)
    return upper(4 * d * fg * ell * q * inner**2 * turns)


def spiral_bezout(F: Any, G: Any, ell: int, q: int, omega: Any = 1) -> BezoutFormula:
    """4d(F+G)lq(d(F+G)+l+q+2)^2 (floor(omega log L / pi) + 1)."""
    return BezoutFormula(
        BezoutKind.SPIRAL,
        {"F": to_mpf(F), "G": to_mpf(G), "ell": ell, "q": q, "omega": to_mpf(omega)},
    )


def sinlog_bezout(ell: int, c: Any = 1) -> BezoutFormula:
    """4dl(d+l+2)^2 (floor(max(1,|c|) log T / pi) + 1)."""
    return BezoutFormula(BezoutKind.SINLOG, {"ell": ell, "c": to_mpf(c)})


def zeta_bezout(c: Any) -> BezoutFormula:
    """c (d + x log_+ x) d, with x = phi(T) and d standing in for log T."""
    if c is None or to_mpf(c) <= 0:
        msg = "the zeta Bezout constant must be supplied and positive"
        raise SlowdetError.missing_bezout(msg)
    return BezoutFormula(BezoutKind.ZETA, {"c": to_mpf(c)})


def gamma_bezout(c: Any) -> BezoutFormula:
    """c d log_+ x log_+ log_+ x."""
    if c is None or to_mpf(c) <= 0:
        msg = "the Gamma Bezout constant must be supplied and positive"
        raise SlowdetError.missing_bezout(msg)
    return BezoutFormula(BezoutKind.GAMMA, {"c": to_mpf(c)})


def polynomial_bezout(
    terms: dict[tuple[int, int], Fraction | int], shape: tuple[int, int] | None = None
) -> BezoutFormula:
    """sum c_ij log_+^i x d^j with nonnegative c_ij."""
    if any(c < 0 for c in terms.values()) or any(i < 0 or j < 0 for i, j in terms):
        msg = "polynomial Bezout bounds need nonnegative exponents and coefficients"
        raise SlowdetError.invalid_input(msg)
    if shape is None:
        shape = (max((i + j for i, j in terms), default=0), 0)
    packed = tuple(sorted((i, j, Fraction(c)) for (i, j), c in terms.items()))
    return BezoutFormula(BezoutKind.POLYNOMIAL, {"terms": packed, "shape": shape})


def sinc_bezout(c: Any) -> BezoutFormula:
    """4d(d+3)^2 (floor(|c| length / pi) + 1) for sin(cx) on an interval."""
    return BezoutFormula(BezoutKind.SINC, {"c": to_mpf(c)})


def expspiral_bezout(omega: Any) -> BezoutFormula:
    """Spiral bound with F=G=l=q=1 and L = e^length, for S_omega on an interval."""
    return BezoutFormula(BezoutKind.EXPSPIRAL, {"omega": to_mpf(omega)})


# Empirical zero counting


Polynomial = dict[tuple[int, int], Fraction | int]


def evaluate_polynomial(poly: Polynomial, X: Any, Y: Any) -> Any:
    """P(X, Y) for scalar or array arguments."""
    return sum(float(c) * X**i * Y**j for (i, j), c in poly.items())


@dataclass(frozen=True)
class ZeroCount:
    count: int
    grid_points: int
    nonfinite: int = 0


def empirical_zero_count(
    poly: Polynomial,
    curve: CurveSpec,
    interval: tuple[Any, Any],
    resolution: int = 2000,
    *,
    refinements: int = 3,
) -> ZeroCount:
    """Lower bound on the zeros of x -> P(curve point at x) on the interval.

    P is evaluated in the curve's natural coordinates. Only sign changes
    between grid values whose magnitude clears a noise tolerance are
    counted, and the grid is doubled until the count stops growing.

    Raises:
        SlowdetError: If P is zero or the interval is empty
    """
    if not any(c != 0 for c in poly.values()):
        msg = "P must be a nonzero polynomial"
        raise SlowdetError.invalid_input(msg)
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        msg = f"empty interval [{lo}, {hi}]"
        raise SlowdetError.invalid_input(msg)

    best = ZeroCount(0, 0)
    n = resolution
    for _ in range(refinements + 1):
        xs = np.linspace(lo, hi, n)
        count, nonfinite = _sign_changes(poly, curve, xs)
        logger.debug("zero count on %d points: %d", n, count)
        if count <= best.count and best.grid_points:
            break
        best = ZeroCount(count, n, nonfinite)
        n *= 2
    if best.nonfinite:
        logger.warning("%d non-finite evaluations skipped", best.nonfinite)
    return best


def _sign_changes(poly: Polynomial, curve: CurveSpec, xs: Any) -> tuple[int, int]:
    X, Y = curve.natural_points(xs)
    values = evaluate_polynomial(poly, X, Y)
    finite = np.isfinite(values)
    scale = np.zeros_like(values)
    for i, j in poly:
        scale = np.maximum(scale, np.abs(X**i * Y**j))
    tolerance = 1e-9 * np.maximum(scale, 1.0)
    signs = np.where(finite & (np.abs(values) > tolerance), np.sign(values), 0)
    nonzero = signs[signs != 0]
    count = int(np.count_nonzero(nonzero[1:] != nonzero[:-1]))
    return count, int(np.count_nonzero(~finite))


@dataclass(frozen=True)
class AuditReport:
    """Outcome of `bezout_audit`: zero counts that exceeded the formula."""

    curve: str
    trials: int
    worst_ratio: float
    violations: tuple[tuple[Any, ...], ...] = ()
    non_explicit: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "curve": self.curve,
            "ok": self.ok,
            "trials": self.trials,
            "worst_ratio": self.worst_ratio,
            "non_explicit": self.non_explicit,
            "violations": [
                {"d": d, "interval": [lo, hi], "count": count, "bound": mp.nstr(bound, 15)}
                for d, lo, hi, count, bound in self.violations
            ],
        }


def random_polynomial(rng: np.random.Generator, d: int, coeff_range: int = 3) -> Polynomial:
    """Integer coefficients in [-coeff_range, coeff_range], with a degree-d term."""
    poly: Polynomial = {}
    for total in range(d + 1):
        for i in range(total, -1, -1):
            c = int(rng.integers(-coeff_range, coeff_range + 1))
            if c:
                poly[(i, total - i)] = c
    i = int(rng.integers(0, d + 1))
    poly[(i, d - i)] = int(rng.choice([-1, 1])) * int(rng.integers(1, coeff_range + 1))
    return poly


def _audit_interval(curve: CurveSpec, rng: np.random.Generator, span: float) -> tuple[float, float, Any]:
    """A random interval of the curve's domain and the formula argument for it."""
    if curve.mode is BoundMode.COMPACT:
        left = max(float(curve.domain[0]), -span)
        lo = float(rng.uniform(left, max(left, span)))
        hi = min(lo + float(rng.uniform(0.5, span)), float(curve.domain[1]))
        return lo, hi, hi - lo
    start = max(float(curve.domain[0]), float(curve.cert.a) if curve.cert else 1.0)
    hi = start * float(np.exp(rng.uniform(0.5, span)))
    hi = min(hi, float(curve.domain[1]))
    return start, hi, hi


def bezout_audit(
    curve: CurveSpec,
    trials: int = 200,
    *,
    d_max: int = 3,
    seed: int = 0,
    span: float = 3 * np.pi,
    resolution: int = 2000,
) -> AuditReport:
    """Compare empirical zero counts of random polynomials with the curve's formula.

    For slow curves each interval starts at the certificate start and the
    formula is evaluated at its right end; for compact curves it is
    evaluated at the interval length.

    Raises:
        SlowdetError: If the curve has no Bezout formula
    """
    formula = curve.bezout
    if formula is None:
        msg = f"{curve.name} has no Bezout formula"
        raise SlowdetError.missing_bezout(msg)
    if trials < 1 or d_max < 1:
        msg = f"trials and d_max must be positive, got {trials}, {d_max}"
        raise SlowdetError.invalid_input(msg)

    rng = np.random.default_rng(seed)
    violations: list[tuple[Any, ...]] = []
    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(1, d_max + 1))
        poly = random_polynomial(rng, d)
        lo, hi, arg = _audit_interval(curve, rng, span)
        if not lo < hi:
            continue
        count = empirical_zero_count(poly, curve, (lo, hi), resolution).count
        bound = formula(arg, d)
        worst = max(worst, count / float(bound))
        if count > bound:
            logger.warning("Bezout bound exceeded on [%g, %g], d=%d: %d > %s", lo, hi, d, count, bound)
            violations.append((d, lo, hi, count, bound))
    logger.info("Bezout audit of %s: %d trials, %d violations", curve.name, trials, len(violations))
    return AuditReport(curve.name, trials, worst, tuple(violations), formula.non_explicit)
