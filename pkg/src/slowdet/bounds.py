"""Explicit constants of the determinant method and the global point-count bound.

Upper-bound constants are rounded up and interval lengths rounded down, at
the working precision chosen with `slowdet.rounding.working_precision`.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from mpmath import iv, mp

from slowdet.error import SlowdetError
from slowdet.rounding import (
    enclose,
    ifactorial,
    ilog,
    ilog_plus,
    ipow,
    lower,
    to_fraction,
    upper,
    working_precision,
)
from slowdet.slow import SlowCertificate

if TYPE_CHECKING:
    from slowdet.catalog import CurveSpec

logger = logging.getLogger(__name__)

# The largest matrix whose permanent is computed exactly.
RYSER_LIMIT = 12


@dataclass(frozen=True)
class DegreeData:
    """mu monomials of degree <= d, rho = mu(mu-1)/2, nu = 4d/(mu-1)."""

    d: int
    mu: int
    rho: int
    nu: Fraction


def degree_data(d: int) -> DegreeData:
    if d < 1:
        msg = f"degree must be at least 1, got {d}"
        raise SlowdetError.invalid_input(msg)
    mu = (d + 1) * (d + 2) // 2
    return DegreeData(d=d, mu=mu, rho=mu * (mu - 1) // 2, nu=Fraction(4 * d, mu - 1))


def _det_constant_interval(d: int, A: Any, B: Any) -> Any:
    dd = degree_data(d)
    return (
        ifactorial(dd.mu)
        * ipow(enclose(A), dd.rho)
        * ipow(dd.mu, d * (dd.mu - 1))
        * ipow(dd.mu, enclose(B) * dd.rho)
    )


def det_constant(d: int, A: Any, B: Any, *, precision: int | None = None) -> Any:
    """C(d, A, B) = mu! A^rho mu^(d(mu-1)) mu^(B rho), rounded up.

    Raises:
        SlowdetError: PRECISION if the value overflows the working precision
    """
    with working_precision(precision):
        value = upper(_det_constant_interval(d, A, B))
        if not mp.isfinite(value):
            msg = f"C({d}, {A}, {B}) overflows at {mp.prec} bits"
            raise SlowdetError.precision(msg)
        return value


def length_constant(d: int, A: Any, B: Any, *, precision: int | None = None) -> Any:
    """C'(d, A, B) = C(d, A, B)^(-1/rho), rounded down."""
    if mp.mpf(A) <= 0:
        msg = f"length constant needs A > 0, got {A}"
        raise SlowdetError.invalid_input(msg)
    with working_precision(precision):
        rho = degree_data(d).rho
        value = lower(iv.exp(-ilog(_det_constant_interval(d, A, B)) / rho))
        if not value > 0:
            msg = f"C'({d}, {A}, {B}) underflows at {mp.prec} bits"
            raise SlowdetError.precision(msg)
        return value


def start_point(cert: SlowCertificate) -> Any:
    """N = e^C, or e^(C/E) when the certificate carries decay data; rounded up."""
    exponent = enclose(cert.C)
    if cert.decay is not None:
        exponent = exponent / enclose(cert.decay.E)
    return upper(iv.exp(exponent))


def effective_start(cert: SlowCertificate) -> Any:
    """Left end of covering plans: the certificate only holds from a."""
    return max(cert.a, start_point(cert))


def _length_margin() -> Any:
    # Keeps the vanishing condition strict after rounding of C and C'.
    return 1 - mp.ldexp(1, 28 - mp.prec)


def interval_length(
    dd: DegreeData, cert: SlowCertificate, T: Any, N: Any, *, precision: int | None = None
) -> Any:
    """L = C' N / log^C N * T^-nu, rounded down."""
    with working_precision(precision):
        N, T = mp.mpf(N), mp.mpf(T)
        if N < start_point(cert):
            msg = f"N={N} lies below the start point {start_point(cert)}"
            raise SlowdetError.domain(msg)
        if T < 1:
            msg = f"T must be >= 1, got {T}"
            raise SlowdetError.domain(msg)
        c_prime = length_constant(dd.d, cert.A, cert.B)
        return _length(dd, cert, c_prime, T, N)


def _length(dd: DegreeData, cert: SlowCertificate, c_prime: Any, T: Any, N: Any) -> Any:
    iN = enclose(N)
    value = enclose(c_prime) * iN * ipow(enclose(T), -dd.nu)
    if cert.C:
        value = value / ipow(ilog(iN), cert.C)
    return lower(value) * _length_margin()


def covering_sequence(
    cert: SlowCertificate,
    d: int,
    T: Any,
    limit: Any,
    *,
    start: Any = None,
    max_steps: int = 1_000_000,
) -> Iterator[Any]:
    """x_0 = start (default N), x_{n+1} = x_n + L(x_n), up to the first term >= limit.

    Raises:
        SlowdetError: If limit < x_0, or more than max_steps terms are needed
    """
    dd = degree_data(d)
    T = mp.mpf(T)
    x = start_point(cert) if start is None else mp.mpf(start)
    limit = mp.mpf(limit)
    if limit < x:
        msg = f"covering limit {limit} lies below x_0={x}"
        raise SlowdetError.invalid_input(msg)
    c_prime = length_constant(d, cert.A, cert.B)
    yield x
    steps = 0
    while x < limit:
        steps += 1
        if steps > max_steps:
            msg = f"covering needs more than {max_steps} steps; use the counted form"
            raise SlowdetError.invalid_input(msg)
        x = x + _length(dd, cert, c_prime, T, x)
        yield x


def interval_count_bound(
    cert: SlowCertificate, d: int, T: Any, phiT: Any, *, precision: int | None = None
) -> int:
    """ceil(T^nu log^(C+1) phi(T) / (log 2 min(1, C')) + 1)."""
    with working_precision(precision):
        phiT = mp.mpf(phiT)
        if phiT < start_point(cert):
            msg = f"phi(T)={phiT} lies below the start point {start_point(cert)}"
            raise SlowdetError.invalid_input(msg)
        dd = degree_data(d)
        c_prime = min(mp.one, length_constant(d, cert.A, cert.B))
        value = (
            ipow(enclose(T), dd.nu)
            * ipow(ilog(phiT), cert.C + 1)
            / (ilog(2) * enclose(c_prime))
            + 1
        )
        return int(mp.ceil(upper(value)))


def degree_schedule(T: Any) -> int:
    """max(1, floor(log_+ T)); keeps T^nu(d) <= e^16."""
    T = mp.mpf(T)
    if T < 1:
        msg = f"T must be >= 1, got {T}"
        raise SlowdetError.domain(msg)
    if T <= mp.e:
        return 1
    # nu(d) = 8/(d+3) leaves ample room, so a value within rounding of an
    # integer is taken as that integer
    return max(1, int(mp.floor(mp.log(T) + mp.ldexp(1, 16 - mp.prec))))


def monomial_derivative_bound(
    cert: SlowCertificate, alpha: tuple[int, int], p: int, x: Any
) -> Any:
    """(p+1)^|alpha| A^p p^(Bp) log^(Cp) x / x^p, rounded up."""
    total = alpha[0] + alpha[1]
    if p == 0:
        return upper(ipow(enclose(cert.D), total))
    ix = enclose(x)
    base = enclose(cert.A) * ipow(p, cert.B) * ipow(ilog(ix), cert.C) / ix
    return upper(ipow(p + 1, total) * base**p)


def vandermonde_product_bound(mu: int, B: Any) -> Any:
    """mu^(B mu(mu-1)/2), which dominates prod_{r<mu} r^(B r)."""
    return upper(ipow(mu, enclose(B) * (mu * (mu - 1) // 2)))


def permanent(rows: Sequence[Sequence[Any]]) -> Any:
    """Permanent of a nonnegative matrix, rounded up.

    Exact (Ryser's formula on the exact binary values) up to RYSER_LIMIT
    rows, and the product of row sums above that.
    """
    n = len(rows)
    if any(len(row) != n for row in rows):
        msg = "permanent needs a square matrix"
        raise SlowdetError.invalid_input(msg)
    if n == 0:
        return mp.one
    if n > RYSER_LIMIT:
        product = enclose(1)
        for row in rows:
            product *= sum((enclose(v) for v in row), enclose(0))
        return upper(product)

    exact = [[to_fraction(v) for v in row] for row in rows]
    scale = math.lcm(*(v.denominator for row in exact for v in row))
    ints = [[int(v * scale) for v in row] for row in exact]
    # Ryser with Gray-code updates of the row sums
    sums = [0] * n
    total = 0
    subset = 0
    for k in range(1, 1 << n):
        bit = (k & -k).bit_length() - 1
        subset ^= 1 << bit
        sign = 1 if subset >> bit & 1 else -1
        for i in range(n):
            sums[i] += sign * ints[i][bit]
        product = math.prod(sums)
        total += -product if (n - subset.bit_count()) % 2 else product
    return upper(enclose(Fraction(total, scale**n)))


def determinant_sup_bound(sigma: Sequence[Sequence[Any]], L: Any) -> Any:
    """L^rho times the permanent of the sup table sigma[i][p]."""
    mu = len(sigma)
    rho = mu * (mu - 1) // 2
    return upper(ipow(enclose(L), rho) * enclose(permanent(sigma)))


class BoundMode(Enum):
    SLOW = "slow"
    SLOW_PLUS = "slow_plus"
    COMPACT = "compact"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BoundShape:
    """Exponents of (log T, log log T) in a bound.

    Exponents are exact rationals; certificates with fractional B or C give
    fractional exponents.
    """

    log: Fraction | int
    loglog: Fraction | int

    def __add__(self, other: BoundShape) -> BoundShape:
        return BoundShape(self.log + other.log, self.loglog + other.loglog)

    def scaled(self, k: Fraction | int) -> BoundShape:
        return BoundShape(self.log * k, self.loglog * k)

    def as_tuple(self) -> tuple[Fraction | int, Fraction | int]:
        return (self.log, self.loglog)

    def to_json(self) -> list[int | str]:
        return [exponent_to_json(self.log), exponent_to_json(self.loglog)]


def exponent_to_json(value: Fraction | int) -> int | str:
    """Integers stay integers; other exponents become "p/q" strings."""
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else str(value)


@dataclass(frozen=True)
class BoundReport:
    """Every constant of the global bound, and the bound itself."""

    curve: str
    mode: BoundMode
    T: Any
    d: int
    cert: SlowCertificate | None
    N: Any
    phiT: Any
    L: Any
    nT: int
    bezout: Any
    alpha: Any
    beta_T: Fraction | int
    beta_phi: Fraction | int
    total: Any
    exponents: BoundShape
    factor_exponents: BoundShape
    bezout_non_explicit: bool = False

    def to_dict(self) -> dict[str, Any]:
        def num(v: Any) -> str:
            return mp.nstr(v, 20)

        return {
            "curve": self.curve,
            "mode": self.mode.value,
            "T": num(self.T),
            "d": self.d,
            "certificate": None if self.cert is None else self.cert.to_json(),
            "N": num(self.N),
            "phiT": num(self.phiT),
            "L": num(self.L),
            "nT": self.nT,
            "bezout": num(self.bezout),
            "alpha": num(self.alpha),
            "beta_T": exponent_to_json(self.beta_T),
            "beta_phi": exponent_to_json(self.beta_phi),
            "total": num(self.total),
            "exponents": self.exponents.to_json(),
            "factor_exponents": self.factor_exponents.to_json(),
            "bezout_non_explicit": self.bezout_non_explicit,
        }


def leading_constant(A: Any, B: Any) -> Any:
    """alpha = 2 e^16 / log 2 * max(1, A 2^B (1 + 1/log 2)^(2B) e^12 e^(4/e)).

    The factors bound T^nu, mu^B, mu^(2d/mu) and (mu!)^(2/(mu(mu-1))) for
    d = degree_schedule(T); the factor 2 absorbs the "+1" of the interval
    count.
    """
    iB = enclose(B)
    log2 = ilog(2)
    e = iv.exp(enclose(1))
    inverse_length = (
        enclose(A)
        * ipow(2, iB)
        * ipow(1 + 1 / log2, 2 * iB)
        * iv.exp(enclose(12))
        * iv.exp(4 / e)
    )
    factor = iv.mpf((max(mp.one, lower(inverse_length)), max(mp.one, upper(inverse_length))))
    return upper(2 * iv.exp(enclose(16)) / log2 * factor)


def global_bound(curve: CurveSpec, T: Any, *, precision: int | None = None) -> BoundReport:
    """The explicit bound on the rational points of height <= T on the curve.

    total = alpha log_+^(2(B+C)) T log_+^beta_phi phi(T) B(phi(T), d) with
    beta_phi = C + 1, or 1 when the certificate has decay data.

    Raises:
        SlowdetError: If the curve lacks a certificate, height control or
            Bezout formula, or is not a slow curve
    """
    with working_precision(precision):
        T = mp.mpf(T)
        if T < 1:
            msg = f"T must be >= 1, got {T}"
            raise SlowdetError.domain(msg)
        if curve.mode is BoundMode.COMPACT:
            msg = f"{curve.name} is a compact-mode curve; use compact_bound"
            raise SlowdetError.not_applicable(msg)
        if not curve.transcendental:
            msg = f"{curve.name} is not declared transcendental"
            raise SlowdetError.not_applicable(msg)
        cert = curve.cert
        if cert is None:
            msg = f"{curve.name} has no certificate"
            raise SlowdetError.missing_certificate(msg)
        if curve.phi is None:
            msg = f"{curve.name} has no height control function"
            raise SlowdetError.missing_height_control(msg)
        if curve.bezout is None:
            msg = f"{curve.name} has no Bezout formula"
            raise SlowdetError.missing_bezout(msg)

        d = degree_schedule(T)
        N = effective_start(cert)
        phiT = max(curve.phi.evaluate(T), N)
        L = interval_length(degree_data(d), cert, T, N)
        nT = interval_count_bound(cert, d, T, phiT)
        bezout = curve.bezout(phiT, d)
        alpha = leading_constant(cert.A, cert.B)

        slow_plus = cert.decay is not None
        beta_T = 2 * (to_fraction(cert.B) + to_fraction(cert.C))
        beta_phi = Fraction(1) if slow_plus else to_fraction(cert.C) + 1
        total = upper(
            enclose(alpha)
            * ipow(ilog_plus(T), beta_T)
            * ipow(ilog_plus(phiT), beta_phi)
            * enclose(bezout)
        )

        phi_shape = BoundShape(*curve.phi.log_shape())
        base = BoundShape(beta_T, 0) + phi_shape.scaled(beta_phi)
        report = BoundReport(
            curve=curve.name,
            mode=BoundMode.SLOW_PLUS if slow_plus else BoundMode.SLOW,
            T=T,
            d=d,
            cert=cert,
            N=N,
            phiT=phiT,
            L=L,
            nT=nT,
            bezout=bezout,
            alpha=alpha,
            beta_T=beta_T,
            beta_phi=beta_phi,
            total=total,
            exponents=base + BoundShape(*curve.bezout.shape),
            factor_exponents=base + BoundShape(*curve.bezout.factor_shape),
            bezout_non_explicit=curve.bezout.non_explicit,
        )
        logger.info(
            "bound for %s at T=%s: d=%d, total=%s", curve.name, mp.nstr(T, 10), d,
            mp.nstr(total, 10),
        )
        return report
