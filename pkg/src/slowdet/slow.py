"""Slow-function certificates, their closure rules, and height control.

A certificate (A, B, C, D, a) asserts |f^(p)(x)/p!| <= D (A p^B log^C x / x)^p
for x >= a and every p >= 0. The closure rules build certificates for sums,
products and compositions from certificates of the parts; `verify_certificate`
samples the inequality with jets.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any

from mpmath import mp

from slowdet.error import SlowdetError
from slowdet.grammar import MP, Const, Expr, expr_from_json
from slowdet.rounding import (
    decode_mpf,
    enclose,
    encode_mpf,
    ilog,
    ipow,
    upper,
)

logger = logging.getLogger(__name__)


class LimitClass(Enum):
    """Diophantine class of a limit value u."""

    RATIONAL = "rational"
    NON_U1_IRRATIONAL = "non-U1-irrational"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DecayData:
    """Decay of one coordinate towards u: |(f-u)^(p)/p!| <= x^-E phi_p(x).

    ``coordinate`` is 0 when the first coordinate decays and 1 for the second.
    """

    E: Any
    u: Expr = field(default_factory=lambda: Const("0"))
    u_class: LimitClass = LimitClass.RATIONAL
    coordinate: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "E": encode_mpf(self.E),
            "u": self.u.to_json(),
            "u_class": self.u_class.value,
            "coordinate": self.coordinate,
        }

    @staticmethod
    def from_json(data: dict[str, Any]) -> DecayData:
        return DecayData(
            E=decode_mpf(data["E"]),
            u=expr_from_json(data.get("u", ["const", "0"])),
            u_class=LimitClass(data.get("u_class", "rational")),
            coordinate=int(data.get("coordinate", 0)),
        )


@dataclass(frozen=True)
class SlowCertificate:
    """Constants of a slow function on [a, inf)."""

    A: Any
    B: Any
    C: Any
    D: Any = 1
    a: Any = field(default_factory=lambda: mp.e)
    decay: DecayData | None = None
    derivatives_only: bool = False  # the p = 0 bound D is not claimed

    def __post_init__(self) -> None:
        for name in ("A", "B", "C", "D", "a"):
            object.__setattr__(self, name, mp.mpf(getattr(self, name)))
        if min(self.A, self.B, self.C, self.D) < 0:
            msg = f"certificate constants must be nonnegative: {self}"
            raise SlowdetError.invalid_input(msg)
        if not all(mp.isfinite(v) for v in (self.A, self.B, self.C, self.D, self.a)):
            msg = "certificate constants must be finite"
            raise SlowdetError.invalid_input(msg)
        if self.a <= 1:
            msg = f"certificate validity start a must exceed 1, got {self.a}"
            raise SlowdetError.invalid_input(msg)

    @property
    def slow_plus(self) -> bool:
        return self.decay is not None

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            name: encode_mpf(getattr(self, name)) for name in ("A", "B", "C", "D", "a")
        }
        if self.decay is not None:
            data["decay"] = self.decay.to_json()
        if self.derivatives_only:
            data["derivatives_only"] = True
        return data

    @staticmethod
    def from_json(data: dict[str, Any]) -> SlowCertificate:
        """Parse a certificate; decimal strings and numbers are accepted too.

        Raises:
            SlowdetError: If a field is missing or malformed
        """
        try:
            decay = data.get("decay")
            return SlowCertificate(
                A=decode_mpf(data["A"]),
                B=decode_mpf(data["B"]),
                C=decode_mpf(data["C"]),
                D=decode_mpf(data.get("D", 1)),
                a=decode_mpf(data.get("a", "e")) if data.get("a") != "e" else mp.e,
                decay=DecayData.from_json(decay) if decay else None,
                derivatives_only=bool(data.get("derivatives_only", False)),
            )
        except (KeyError, ValueError, TypeError) as e:
            msg = f"Invalid certificate: {e}"
            raise SlowdetError.invalid_input(msg) from e


def zero_certificate(a: Any = 2) -> SlowCertificate:
    """Certificate of the zero function, neutral for `combine_sum`."""
    return SlowCertificate(0, 0, 0, 0, a)


def one_certificate(a: Any = 2) -> SlowCertificate:
    """Certificate of the constant 1, neutral for `combine_product` up to the factor 2."""
    return SlowCertificate(0, 0, 0, 1, a)


def phi_p(cert: SlowCertificate, p: int, x: Any) -> Any:
    """D (A p^B log^C x / x)^p, rounded up."""
    x = mp.mpf(x)
    if x < cert.a:
        msg = f"x={x} lies left of the certificate start a={cert.a}"
        raise SlowdetError.domain(msg)
    return upper(_phi_interval(cert, p, x))


def _phi_interval(cert: SlowCertificate, p: int, x: Any) -> Any:
    if p == 0:
        return enclose(cert.D)
    ix = enclose(x)
    base = enclose(cert.A) * ipow(p, cert.B) * ipow(ilog(ix), cert.C) / ix
    return enclose(cert.D) * base**p


@dataclass(frozen=True)
class Violation:
    p: int
    x: Any
    coefficient: Any
    bound: Any

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "x": mp.nstr(self.x, 20),
            "coefficient": mp.nstr(self.coefficient, 20),
            "bound": mp.nstr(self.bound, 20),
        }


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of a sampled certificate check."""

    ok: bool
    checked: int
    worst_ratio: Any
    worst_at: tuple[int, Any] | None
    violation: Violation | None = None
    failures: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "checked": self.checked,
            "worst_ratio": mp.nstr(self.worst_ratio, 12),
            "worst_at": None
            if self.worst_at is None
            else {"p": self.worst_at[0], "x": mp.nstr(self.worst_at[1], 20)},
            "violation": None if self.violation is None else self.violation.to_dict(),
            "failures": list(self.failures),
        }


def verify_certificate(
    f: Expr,
    cert: SlowCertificate,
    p_max: int,
    xs: Iterable[Any],
    *,
    decay: bool = False,
) -> CertificateReport:
    """Check |f^(p)(x)/p!| <= phi_p(x) for p <= p_max at the sample points.

    With ``decay=True`` the slow_+ inequality for f - u is checked instead,
    using the certificate's decay data.
    """
    if p_max < 1:
        msg = f"p_max must be at least 1, got {p_max}"
        raise SlowdetError.invalid_input(msg)
    if decay and cert.decay is None:
        msg = "decay check requested on a certificate without decay data"
        raise SlowdetError.invalid_input(msg)

    worst = mp.zero
    worst_at: tuple[int, Any] | None = None
    failures: list[str] = []
    checked = 0
    u = cert.decay.u.evaluate(0, MP) if decay and cert.decay else mp.zero
    p_min = 1 if cert.derivatives_only else 0

    for x in xs:
        x = mp.mpf(x)
        if x < cert.a:
            msg = f"sample x={x} lies left of the certificate start a={cert.a}"
            raise SlowdetError.domain(msg)
        try:
            coeffs = f.jet(x, p_max).coeffs
        except SlowdetError as e:
            logger.warning("evaluation failed at x=%s: %s", x, e)
            failures.append(f"x={mp.nstr(x, 15)}: {e}")
            continue
        for p in range(p_min, p_max + 1):
            c = coeffs[p] - u if p == 0 else coeffs[p]
            bound = phi_p(cert, p, x)
            if decay:
                assert cert.decay is not None
                bound = upper(enclose(bound) * ipow(enclose(x), -cert.decay.E))
            checked += 1
            ratio = abs(c) / bound if bound else mp.inf if c else mp.zero
            if ratio > worst:
                worst, worst_at = ratio, (p, x)
            if abs(c) > bound:
                logger.info("certificate violated at p=%d, x=%s", p, x)
                return CertificateReport(
                    ok=False,
                    checked=checked,
                    worst_ratio=worst,
                    worst_at=worst_at,
                    violation=Violation(p, x, abs(c), bound),
                    failures=tuple(failures),
                )

    return CertificateReport(
        ok=not failures,
        checked=checked,
        worst_ratio=worst,
        worst_at=worst_at,
        failures=tuple(failures),
    )


def verify_decay(
    f: Expr, cert: SlowCertificate, p_max: int, xs: Iterable[Any]
) -> CertificateReport:
    return verify_certificate(f, cert, p_max, xs, decay=True)


def log_grid(lo: Any, hi: Any, n: int) -> list[Any]:
    """n log-spaced sample points from lo to hi inclusive."""
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    if n == 1:
        return [lo]
    step = (mp.log(hi) - mp.log(lo)) / (n - 1)
    return [lo] + [mp.exp(mp.log(lo) + k * step) for k in range(1, n - 1)] + [hi]


# Closure rules


def combine_sum(c1: SlowCertificate, c2: SlowCertificate) -> SlowCertificate:
    return SlowCertificate(
        A=max(c1.A, c2.A),
        B=max(c1.B, c2.B),
        C=max(c1.C, c2.C),
        D=c1.D + c2.D,
        a=max(c1.a, c2.a),
        derivatives_only=c1.derivatives_only or c2.derivatives_only,
    )


def combine_product(c1: SlowCertificate, c2: SlowCertificate) -> SlowCertificate:
    # (p+1) terms in the Leibniz sum, absorbed by (p+1) <= 2^p
    return SlowCertificate(
        A=2 * max(c1.A, c2.A),
        B=max(c1.B, c2.B),
        C=max(c1.C, c2.C),
        D=c1.D * c2.D,
        a=max(c1.a, c2.a),
        derivatives_only=c1.derivatives_only or c2.derivatives_only,
    )


def compose_bounded(alpha: Any, c: SlowCertificate) -> SlowCertificate:
    """Certificate of f∘s where |f^(p)| <= alpha^p and s has certificate c."""
    alpha = mp.mpf(alpha)
    if alpha < 1:
        msg = f"outer derivative bound alpha must be >= 1, got {alpha}"
        raise SlowdetError.invalid_input(msg)
    return SlowCertificate(
        A=upper(enclose(c.A) * enclose(alpha)),
        B=c.B + 1,
        C=c.C,
        D=c.D,
        a=c.a,
    )


def compose_logpow(alpha: Any, ell: int) -> SlowCertificate:
    """Certificate of f∘log^ell where |f^(p)| <= alpha^p."""
    alpha = mp.mpf(alpha)
    if alpha < 1 or ell < 1:
        msg = f"compose_logpow needs alpha >= 1 and ell >= 1, got {alpha}, {ell}"
        raise SlowdetError.invalid_input(msg)
    return SlowCertificate(A=alpha * 2**ell, B=ell + 1, C=ell - 1, D=1, a=mp.e)


def logpow_certificate(ell: int) -> SlowCertificate:
    """Derivative constants of log^ell itself (its values are unbounded)."""
    return SlowCertificate(
        A=2**ell, B=ell, C=ell - 1, D=1, a=mp.e, derivatives_only=True
    )


def logpow_coeff_bound(ell: int, p: int, x: Any) -> Any:
    """2^ell p^ell log^(ell-1) x / x^p, rounded up."""
    x = mp.mpf(x)
    if x < mp.e or p < 1:
        msg = f"logpow_coeff_bound needs x >= e and p >= 1, got x={x}, p={p}"
        raise SlowdetError.domain(msg)
    ix = enclose(x)
    return upper(
        enclose(2**ell) * ipow(p, ell) * ipow(ilog(ix), ell - 1) / ipow(ix, p)
    )


def power_decay_certificate(F: Any, a: Any = 2) -> SlowCertificate:
    """Certificate of x^-F, which decays to 0 at rate x^-F."""
    F = mp.mpf(F)
    return SlowCertificate(
        A=F + 1, B=0, C=0, D=1, a=a, decay=DecayData(E=F)
    )


def damp_power(F: Any, alpha: Any, c: SlowCertificate) -> SlowCertificate:
    """Certificate of x^-F (f∘s)(x) where |f^(p)| <= alpha^p and s has certificate c."""
    F, alpha = mp.mpf(F), mp.mpf(alpha)
    if F <= 0 or alpha < 1:
        msg = f"damp_power needs F > 0 and alpha >= 1, got {F}, {alpha}"
        raise SlowdetError.invalid_input(msg)
    A = upper(2 * (enclose(F) + 1) * enclose(alpha) * enclose(c.A))
    return SlowCertificate(
        A=A, B=c.B + 1, C=c.C, D=1, a=c.a, decay=DecayData(E=F)
    )


def merge_coordinates(c_f: SlowCertificate, c_g: SlowCertificate) -> SlowCertificate:
    """One certificate for both coordinates.

    Decay data is taken from the first coordinate when it has any, otherwise
    from the second.
    """
    decay = c_f.decay
    if decay is None and c_g.decay is not None:
        decay = replace(c_g.decay, coordinate=1)
    return SlowCertificate(
        A=max(c_f.A, c_g.A),
        B=max(c_f.B, c_g.B),
        C=max(c_f.C, c_g.C),
        D=max(c_f.D, c_g.D),
        a=max(c_f.a, c_g.a),
        decay=decay,
    )


# Height control


class HeightKind(Enum):
    POWER = "power"
    LOG_OF_T = "log-of-T"
    INVERSE = "inverse"
    CUSTOM = "custom"

    def __str__(self) -> str:
        return self.value


class HeightCase(Enum):
    """Situations in which a height control function is available."""

    DECREASING_TO_RATIONAL = "decreasing-to-rational"
    BOUNDED_DECAY_RATIONAL = "bounded-decay-rational"
    RATIONAL_LIMIT = "rational-limit"
    IRRATIONAL_LIMIT = "irrational-limit"
    LOG_OF_T = "log-of-T"
    GRAPH_DEFAULT = "graph-default"
    CUSTOM = "custom"


@dataclass(frozen=True)
class HeightControl:
    """phi(T): rational points of height <= T have parameter in [a, phi(T)].

    POWER: max over terms of (scale * T)^exponent.
    LOG_OF_T: log(m * T) / s.
    INVERSE: smallest x where every decreasing expr drops to K / T.
    CUSTOM: an expression in T.
    Every kind is clamped below by a.
    """

    kind: HeightKind
    a: Any
    terms: tuple[tuple[Any, Any], ...] = ()
    m: Any = 1
    s: Any = 1
    K: Any = 1
    exprs: tuple[Expr, ...] = ()
    expr: Expr | None = None
    shape: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", mp.mpf(self.a))
        object.__setattr__(
            self,
            "terms",
            tuple((mp.mpf(sc), mp.mpf(ex)) for sc, ex in self.terms),
        )
        for name in ("m", "s", "K"):
            object.__setattr__(self, name, mp.mpf(getattr(self, name)))
        if self.kind is HeightKind.POWER and not self.terms:
            msg = "power height control needs at least one (scale, exponent) term"
            raise SlowdetError.invalid_input(msg)
        if self.kind is HeightKind.CUSTOM and self.expr is None:
            msg = "custom height control needs an expression in T"
            raise SlowdetError.invalid_input(msg)
        if self.kind is HeightKind.INVERSE and not self.exprs:
            msg = "inverse height control needs the decreasing coordinate functions"
            raise SlowdetError.invalid_input(msg)

    def evaluate(self, T: Any) -> Any:
        """phi(T), rounded up."""
        T = mp.mpf(T)
        if T < 1:
            msg = f"height threshold T must be >= 1, got {T}"
            raise SlowdetError.domain(msg)
        match self.kind:
            case HeightKind.POWER:
                value = max(
                    upper(ipow(enclose(sc) * enclose(T), ex)) for sc, ex in self.terms
                )
            case HeightKind.LOG_OF_T:
                value = upper(ilog(enclose(self.m) * enclose(T)) / enclose(self.s))
            case HeightKind.INVERSE:
                value = min(_solve_decreasing(e, self.K / T, self.a) for e in self.exprs)
            case HeightKind.CUSTOM:
                assert self.expr is not None
                value = self.expr.evaluate(T, MP) * (1 + mp.ldexp(1, 8 - mp.prec))
        return max(self.a, value)

    def log_shape(self) -> tuple[int, int]:
        """Exponents of (log T, log log T) in log phi(T), up to constants."""
        if self.shape is not None:
            return self.shape
        if self.kind is HeightKind.LOG_OF_T:
            return (0, 1)
        return (1, 0)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.value, "a": encode_mpf(self.a)}
        match self.kind:
            case HeightKind.POWER:
                data["terms"] = [[encode_mpf(sc), encode_mpf(ex)] for sc, ex in self.terms]
            case HeightKind.LOG_OF_T:
                data["m"] = encode_mpf(self.m)
                data["s"] = encode_mpf(self.s)
            case HeightKind.INVERSE:
                data["K"] = encode_mpf(self.K)
                data["exprs"] = [e.to_json() for e in self.exprs]
            case HeightKind.CUSTOM:
                assert self.expr is not None
                data["expr"] = self.expr.to_json()
        if self.shape is not None:
            data["shape"] = list(self.shape)
        return data

    @staticmethod
    def from_json(data: dict[str, Any]) -> HeightControl:
        try:
            kind = HeightKind(data["kind"])
            shape = data.get("shape")
            return HeightControl(
                kind=kind,
                a=decode_mpf(data["a"]),
                terms=tuple(
                    (decode_mpf(sc), decode_mpf(ex)) for sc, ex in data.get("terms", [])
                ),
                m=decode_mpf(data.get("m", 1)),
                s=decode_mpf(data.get("s", 1)),
                K=decode_mpf(data.get("K", 1)),
                exprs=tuple(expr_from_json(e) for e in data.get("exprs", [])),
                expr=expr_from_json(data["expr"]) if "expr" in data else None,
                shape=tuple(shape) if shape else None,
            )
        except (KeyError, ValueError, TypeError) as e:
            msg = f"Invalid height control: {e}"
            raise SlowdetError.invalid_input(msg) from e


def _solve_decreasing(f: Expr, target: Any, a: Any) -> Any:
    """Upper end of a bracket for f(x) = target, f decreasing to 0 on [a, inf)."""
    lo = mp.mpf(a)
    if abs(f.evaluate(lo)) <= target:
        return lo
    hi = lo * 2
    while abs(f.evaluate(hi)) > target:
        lo, hi = hi, hi * 2
        if hi > mp.ldexp(1, 200):
            msg = "decreasing coordinate does not reach the target; is it decreasing?"
            raise SlowdetError.domain(msg)
    for _ in range(mp.prec):
        mid = (lo + hi) / 2
        if abs(f.evaluate(mid)) > target:
            lo = mid
        else:
            hi = mid
    return hi


def _denominator(u: Expr | Fraction | str) -> int:
    if isinstance(u, Fraction):
        return u.denominator
    if isinstance(u, str):
        return Fraction(u).denominator
    if isinstance(u, Const) and u.rational() is not None:
        rational = u.rational()
        assert rational is not None
        return rational.denominator
    msg = f"limit value {u!r} is not a declared rational"
    raise SlowdetError.invalid_input(msg)


def height_control(case: HeightCase, a: Any, **params: Any) -> HeightControl:
    """Build the height control function for one of the supported situations.

    Parameters by case:
        DECREASING_TO_RATIONAL: exprs (f - u, g - v as expressions), K
        BOUNDED_DECAY_RATIONAL: E_f, E_g, u, v (rationals), optional D_f, D_g
        RATIONAL_LIMIT: E, u (rational), optional D
        IRRATIONAL_LIMIT: E, K, u_class
        LOG_OF_T: m, s
        GRAPH_DEFAULT: none
        CUSTOM: expr (in the variable T), optional shape

    Raises:
        SlowdetError: If the case cannot produce a height control function
    """
    try:
        match case:
            case HeightCase.DECREASING_TO_RATIONAL:
                return HeightControl(
                    HeightKind.INVERSE, a, K=params.get("K", 1), exprs=tuple(params["exprs"])
                )
            case HeightCase.BOUNDED_DECAY_RATIONAL:
                terms = (
                    (
                        _denominator(params["u"]) * mp.mpf(params.get("D_f", 1)),
                        1 / mp.mpf(params["E_f"]),
                    ),
                    (
                        _denominator(params["v"]) * mp.mpf(params.get("D_g", 1)),
                        1 / mp.mpf(params["E_g"]),
                    ),
                )
                return HeightControl(HeightKind.POWER, a, terms=terms)
            case HeightCase.RATIONAL_LIMIT:
                # |p/q - u| >= 1/(den(u) q) unless equal, and |f - u| <= D x^-E
                den = _denominator(params["u"]) * mp.mpf(params.get("D", 1))
                return HeightControl(
                    HeightKind.POWER, a, terms=((den, 1 / mp.mpf(params["E"])),)
                )
            case HeightCase.IRRATIONAL_LIMIT:
                u_class = LimitClass(params.get("u_class", LimitClass.UNKNOWN))
                if u_class is not LimitClass.NON_U1_IRRATIONAL:
                    msg = (
                        "an irrational limit needs a declared irrationality measure "
                        "(u_class non-U1-irrational with K)"
                    )
                    raise SlowdetError.missing_height_control(msg)
                exponent = mp.mpf(params["K"]) / mp.mpf(params["E"])
                return HeightControl(HeightKind.POWER, a, terms=((1, exponent),))
            case HeightCase.LOG_OF_T:
                return HeightControl(HeightKind.LOG_OF_T, a, m=params["m"], s=params["s"])
            case HeightCase.GRAPH_DEFAULT:
                return HeightControl(HeightKind.POWER, a, terms=((1, 1),))
            case HeightCase.CUSTOM:
                return HeightControl(
                    HeightKind.CUSTOM, a, expr=params["expr"], shape=params.get("shape")
                )
    except KeyError as e:
        msg = f"height control case {case.value} is missing parameter {e}"
        raise SlowdetError.invalid_input(msg) from e
    msg = f"unsupported height control case {case}"
    raise SlowdetError.invalid_input(msg)


def with_start(cert: SlowCertificate, a: Any) -> SlowCertificate:
    return replace(cert, a=mp.mpf(a))

