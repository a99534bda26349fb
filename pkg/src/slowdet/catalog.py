"""Curve specifications and the constructors of the supported families.

A `CurveSpec` bundles a parametrization x -> (f(x), g(x)) with what the
bound pipeline needs about it: a slow certificate (or, in compact mode, a
parameter window whose derivative sups are measured from jets), a height
control function, a Bezout formula and the transcendence declaration.

Graph curves y = h(x) are handled through the adapter x -> (1/x, h(x)/scale):
points are reported in natural coordinates (x, h(x)) while heights are
measured on the adapted curve.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np
from mpmath import iv, mp

from slowdet.bezout import (
    BezoutFormula,
    expspiral_bezout,
    gamma_bezout,
    polynomial_bezout,
    sinc_bezout,
    sinlog_bezout,
    spiral_bezout,
    zeta_bezout,
)
from slowdet.bounds import BoundMode, start_point
from slowdet.error import SlowdetError
from slowdet.grammar import (
    MP,
    NUMPY,
    Const,
    Expr,
    GammaInverse,
    X,
    Zeta,
    const,
    cos,
    exp,
    log,
    power,
    recip,
    sin,
)
from slowdet.points import PointStatus, RationalPoint, height
from slowdet.rounding import enclose, to_mpf, upper
from slowdet.slow import (
    CertificateReport,
    DecayData,
    HeightCase,
    HeightControl,
    LimitClass,
    SlowCertificate,
    combine_product,
    compose_logpow,
    damp_power,
    height_control,
    log_grid,
    logpow_certificate,
    merge_coordinates,
    power_decay_certificate,
    verify_certificate,
    verify_decay,
)
from slowdet.special import gamma_decay_minimum, gamma_log_ratio_infimum

logger = logging.getLogger(__name__)

PI_OVER_LOG2 = "pi/log2"


def coefficient(value: Any) -> Expr:
    """A constant as a grammar expression; ``"pi/log2"`` is recognized by name."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, str) and value.replace(" ", "") == PI_OVER_LOG2:
        return Const("pi") / log(const(2))
    if isinstance(value, mp.mpf):
        return const(mp.nstr(value, mp.dps + 5, min_fixed=-mp.inf, max_fixed=mp.inf))
    return const(value)


def _value(e: Expr) -> Any:
    return e.evaluate(mp.zero, MP)


def _is_pi_over_log2(value: Any) -> bool:
    return abs(mp.mpf(value) - mp.pi / mp.log(2)) <= mp.ldexp(1, -(mp.prec // 2))


def _scaled(c: Expr, e: Expr) -> Expr:
    return e if c == Const("1") else c * e


# Adapters and windows


@dataclass(frozen=True)
class GraphAdapter:
    """Marks a graph curve: natural points are (x, scale * g(x)).

    With ``inverted`` the parametrized curve is (1/x, g(x)), otherwise (x, g(x)).
    """

    scale: int = 1
    inverted: bool = True


@dataclass(frozen=True)
class WindowRule:
    """One end of a compact parameter window: const + log_coeff log T + linear_coeff T."""

    const: Any = 0
    log_coeff: Any = 0
    linear_coeff: Any = 0

    def at(self, T: Any) -> Any:
        T = mp.mpf(T)
        return (
            mp.mpf(self.const)
            + mp.mpf(self.log_coeff) * mp.log(T)
            + mp.mpf(self.linear_coeff) * T
        )


@dataclass(frozen=True)
class LimitPoint:
    """Declared limit (u, v) of the curve with the Diophantine class of each value."""

    u: Expr
    v: Expr
    u_class: LimitClass = LimitClass.RATIONAL
    v_class: LimitClass = LimitClass.RATIONAL


# Known points


class KnownKind(Enum):
    SINLOG = "sinlog"
    SPIRAL_OMEGA = "spiral_omega"
    EXP2 = "exp2"
    EXP2_SLOW = "exp2_slow"
    SIN_PI = "sin_pi"
    GAMMA = "gamma"
    ORIGIN = "origin"

    def __str__(self) -> str:
        return self.value


# sin(pi p/6) for p mod 12 coprime to 6
_SIXTHS = {1: Fraction(1, 2), 5: Fraction(1, 2), 7: Fraction(-1, 2), 11: Fraction(-1, 2)}


@dataclass(frozen=True)
class KnownPoints:
    """Generator of exactly known rational points, in natural coordinates."""

    kind: KnownKind
    params: dict[str, Any] = field(default_factory=dict, hash=False)

    def generate(self, T: int) -> Iterator[tuple[Fraction, Fraction, Any]]:
        """(x, y, parameter) for every known point that can have height <= T.

        The caller filters by the height of the adapted coordinates.
        """
        n = max(0, int(T).bit_length() - 1)  # largest k with 2^k <= T
        match self.kind:
            case KnownKind.SINLOG:
                a = Fraction(self.params.get("a", 0))
                for k in range(n + 1):
                    y = a * _sign(k) if self.params.get("outer") == "cos" else Fraction(0)
                    yield Fraction(2**k), y, mp.mpf(2) ** k
            case KnownKind.SPIRAL_OMEGA:
                branch = self.params.get("branch", "full")
                ks = {
                    "full": range(-n, n + 1),
                    "expanding": range(n + 1),
                    "contracting": range(n + 1),
                }[branch]
                for k in ks:
                    if branch == "contracting":
                        yield Fraction(_sign(k), 2**k), Fraction(0), mp.mpf(2) ** k
                    else:
                        yield _sign(k) * Fraction(2) ** k, Fraction(0), k * mp.log(2)
            case KnownKind.EXP2:
                for k in range(-n, n + 1):
                    yield Fraction(k), Fraction(2) ** k, mp.mpf(k)
            case KnownKind.EXP2_SLOW:
                for k in range(1, n + 1):
                    yield Fraction(k), Fraction(1, 2**k), mp.mpf(k)
            case KnownKind.SIN_PI:
                yield from _niven_points(int(T))
            case KnownKind.GAMMA:
                k, factorial = 1, 1
                while factorial <= T:
                    yield Fraction(factorial), Fraction(1, k + 1), mp.mpf(factorial)
                    k += 1
                    factorial *= k
            case KnownKind.ORIGIN:
                yield Fraction(0), Fraction(0), mp.zero

    def to_json(self) -> dict[str, Any]:
        params = {k: str(v) if isinstance(v, Fraction) else v for k, v in self.params.items()}
        return {"kind": self.kind.value, "params": params}

    @staticmethod
    def from_json(data: dict[str, Any]) -> KnownPoints:
        try:
            kind = KnownKind(data["kind"])
            params = dict(data.get("params", {}))
            if "a" in params:
                params["a"] = Fraction(params["a"])
        except (KeyError, ValueError, TypeError) as e:
            msg = f"Invalid known-point generator: {e}"
            raise SlowdetError.invalid_input(msg) from e
        return KnownPoints(kind, params)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _niven_points(T: int) -> Iterator[tuple[Fraction, Fraction, Any]]:
    """Rational x of height <= T where sin(pi x) is rational."""
    for p in range(-T, T + 1):
        yield Fraction(p), Fraction(0), mp.mpf(p)
        if p % 2:
            yield Fraction(p, 2), Fraction(_sign((p - 1) // 2)), mp.mpf(p) / 2
        if p % 2 and p % 3 and T >= 6:
            yield Fraction(p, 6), _SIXTHS[p % 12], mp.mpf(p) / 6


# Curve specification


@dataclass(frozen=True)
class CurveSpec:
    """A parametrized plane curve together with its bound hypotheses."""

    name: str
    mode: BoundMode
    f: Expr
    g: Expr
    domain: tuple[Any, Any]
    cert: SlowCertificate | None = None
    phi: HeightControl | None = None
    bezout: BezoutFormula | None = None
    transcendental: bool = True
    graph: GraphAdapter | None = None
    window: tuple[WindowRule, WindowRule] | None = None
    known: KnownPoints | None = None
    limit: LimitPoint | None = None
    params: dict[str, Any] = field(default_factory=dict, hash=False)
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        lo, hi = mp.mpf(self.domain[0]), mp.mpf(self.domain[1])
        if not lo < hi:
            msg = f"empty parameter domain [{lo}, {hi}] for {self.name}"
            raise SlowdetError.invalid_input(msg)
        object.__setattr__(self, "domain", (lo, hi))
        if self.mode is BoundMode.COMPACT and self.window is None:
            msg = f"compact-mode curve {self.name} needs a parameter window"
            raise SlowdetError.invalid_input(msg)

    def evaluate(self, x: Any) -> tuple[Any, Any]:
        """(f(x), g(x)) at the working precision."""
        x = mp.mpf(x)
        return self.f.evaluate(x, MP), self.g.evaluate(x, MP)

    def natural_points(self, xs: Any) -> tuple[np.ndarray, np.ndarray]:
        """Float natural coordinates at an array of parameters."""
        xs = np.asarray(xs, dtype=np.float64)
        with np.errstate(all="ignore"):
            gs = np.broadcast_to(np.asarray(self.g.evaluate(xs, NUMPY), dtype=np.float64), xs.shape)
            if self.graph is not None:
                return xs, gs * self.graph.scale
            fs = np.broadcast_to(np.asarray(self.f.evaluate(xs, NUMPY), dtype=np.float64), xs.shape)
        return fs, gs

    def to_curve_coordinates(self, natural: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
        """Coordinates on the parametrized curve, where heights are measured."""
        x, y = natural
        if self.graph is None:
            return x, y
        y = y / self.graph.scale
        if self.graph.inverted:
            if x == 0:
                msg = f"x = 0 has no image on the inverted graph {self.name}"
                raise SlowdetError.domain(msg)
            return 1 / x, y
        return x, y

    def parameter_window(self, T: Any) -> tuple[Any, Any]:
        """Parameters that can carry points of height <= T, clipped to the domain."""
        lo, hi = self.domain
        if self.window is not None:
            w_lo, w_hi = self.window[0].at(T), self.window[1].at(T)
            slack = mp.ldexp(1 + abs(w_lo) + abs(w_hi), -(mp.prec // 2))
            return max(lo, w_lo - slack), min(hi, w_hi + slack)
        if self.phi is None:
            msg = f"{self.name} has neither a window nor a height control function"
            raise SlowdetError.missing_height_control(msg)
        return lo, min(hi, max(lo, self.phi.evaluate(T)))

    def known_points(self, T: int) -> list[RationalPoint]:
        """Certified points of height <= T from the known-point generator."""
        if self.known is None:
            return []
        points = []
        for x, y, parameter in self.known.generate(T):
            h = height(*self.to_curve_coordinates((x, y)))
            if h <= T:
                points.append(RationalPoint(x, y, h, parameter, PointStatus.CERTIFIED))
        return sorted(set(points))

    def decaying_coordinate(self) -> Expr | None:
        if self.cert is None or self.cert.decay is None:
            return None
        return self.f if self.cert.decay.coordinate == 0 else self.g


@dataclass(frozen=True)
class CurveCheck:
    """Sampled certificate checks of both coordinates and of the decay."""

    curve: str
    reports: dict[str, CertificateReport]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "curve": self.curve,
            "ok": self.ok,
            "checks": {name: r.to_dict() for name, r in self.reports.items()},
        }


def verify_curve(curve: CurveSpec, p_max: int = 12, n: int = 20) -> CurveCheck:
    """Check the curve's certificate on a log grid from its start to 2^20 times that.

    Raises:
        SlowdetError: If the curve has no certificate
    """
    cert = curve.cert
    if cert is None:
        msg = f"{curve.name} has no slow certificate to verify"
        raise SlowdetError.not_applicable(msg)
    lo = max(cert.a, curve.domain[0])
    xs = log_grid(lo, lo * 2**20, n)
    reports = {
        "f": verify_certificate(curve.f, cert, p_max, xs),
        "g": verify_certificate(curve.g, cert, p_max, xs),
    }
    decaying = curve.decaying_coordinate()
    if decaying is not None:
        reports["decay"] = verify_decay(decaying, cert, p_max, xs)
    check = CurveCheck(curve.name, reports)
    logger.info("certificate check of %s: %s", curve.name, "ok" if check.ok else "FAILED")
    return check


# Constructors


def _label(family: str, **params: Any) -> str:
    inner = ",".join(f"{k}={v}" for k, v in params.items())
    return f"{family}[{inner}]" if inner else family


def _positive(name: str, value: Any) -> Any:
    value = to_mpf(value)
    if not value > 0:
        msg = f"{name} must be positive, got {value}"
        raise SlowdetError.invalid_input(msg)
    return value


def _exponent(value: Any) -> Fraction:
    return Fraction(str(value)) if not isinstance(value, Fraction) else value


def make_spiral(F: Any = 1, G: Any = 1, ell: int = 1, q: int = 1) -> CurveSpec:
    """The spiral x -> (x^-F sin(log^ell x), x^-G cos(log^q x))."""
    F_, G_ = _positive("F", F), _positive("G", G)
    if ell < 1 or q < 1:
        msg = f"ell and q must be positive integers, got {ell}, {q}"
        raise SlowdetError.invalid_input(msg)
    m = max(ell, q)
    E = max(F_, G_)
    cert = SlowCertificate(
        A=2 * (E + 1) * m,
        B=m + 1,
        C=m - 1,
        D=1,
        a=mp.e,
        decay=DecayData(E=E, coordinate=0 if F_ >= G_ else 1),
    )
    f = power(X, -_exponent(F)) * sin(log(X) ** ell if ell > 1 else log(X))
    g = power(X, -_exponent(G)) * cos(log(X) ** q if q > 1 else log(X))
    return CurveSpec(
        name=_label("spiral", F=F, G=G, ell=ell, q=q),
        mode=BoundMode.SLOW_PLUS,
        f=f,
        g=g,
        domain=(start_point(cert), mp.inf),
        cert=cert,
        phi=height_control(
            HeightCase.BOUNDED_DECAY_RATIONAL, cert.a, E_f=F_, E_g=G_, u="0", v="0"
        ),
        bezout=spiral_bezout(F_, G_, ell, q),
        limit=LimitPoint(const(0), const(0)),
        params={"F": F, "G": G, "ell": ell, "q": q},
    )


def make_sinlog_graph(
    a_coef: Any = 1, c: Any = 1, ell: int = 1, outer: str = "sin"
) -> CurveSpec:
    """Graph of a_coef * outer(c log^ell x), drawn as (1/x, g(x)/floor(|a_coef|+1))."""
    if outer not in ("sin", "cos"):
        msg = f"outer function must be sin or cos, got {outer!r}"
        raise SlowdetError.invalid_input(msg)
    if ell < 1:
        msg = f"ell must be a positive integer, got {ell}"
        raise SlowdetError.invalid_input(msg)
    a_expr, c_expr = coefficient(a_coef), coefficient(c)
    a_value, c_value = _value(a_expr), _value(c_expr)
    if a_value == 0 or c_value == 0:
        msg = "a_coef and c must be nonzero"
        raise SlowdetError.invalid_input(msg)
    scale = int(mp.floor(abs(a_value) + 1))
    inner = _scaled(c_expr, log(X) ** ell if ell > 1 else log(X))
    wave = sin(inner) if outer == "sin" else cos(inner)
    g = _scaled(a_expr * const(Fraction(1, scale)), wave)
    cert_g = compose_logpow(max(mp.one, abs(c_value)), ell)
    cert = merge_coordinates(power_decay_certificate(1, a=cert_g.a), cert_g)

    known = None
    if ell == 1 and _is_pi_over_log2(c_value):
        if outer == "sin":
            known = KnownPoints(KnownKind.SINLOG, {"outer": "sin"})
        elif isinstance(a_expr, Const) and a_expr.rational() is not None:
            known = KnownPoints(KnownKind.SINLOG, {"outer": "cos", "a": a_expr.rational()})
    return CurveSpec(
        name=_label("sinlog", a=a_coef, c=c, ell=ell, outer=outer),
        mode=BoundMode.SLOW_PLUS,
        f=recip(X),
        g=g,
        domain=(1, mp.inf),
        cert=cert,
        phi=height_control(HeightCase.GRAPH_DEFAULT, cert.a),
        bezout=sinlog_bezout(ell, c_value),
        graph=GraphAdapter(scale=scale),
        known=known,
        params={"a_coef": a_coef, "c": c, "ell": ell, "outer": outer, "scale": scale},
    )


class OuterKind(Enum):
    SIN = "sin"
    COS = "cos"
    IDENTITY = "identity"


@dataclass(frozen=True)
class Outer:
    """Outer function with |h^(p)| <= alpha^p: sin(c t), cos(c t), or the identity."""

    kind: OuterKind = OuterKind.SIN
    c: Any = 1

    def apply(self, t: Expr) -> Expr:
        inner = _scaled(coefficient(self.c), t)
        match self.kind:
            case OuterKind.SIN:
                return sin(inner)
            case OuterKind.COS:
                return cos(inner)
            case OuterKind.IDENTITY:
                return t
        msg = f"unknown outer function {self.kind}"
        raise SlowdetError.internal(msg)

    @property
    def alpha(self) -> Any:
        return max(mp.one, abs(_value(coefficient(self.c))))


@dataclass(frozen=True)
class Inner:
    """Slow inner function: log^ell by default, or an expression with its certificate."""

    ell: int = 1
    expr: Expr | None = None
    cert: SlowCertificate | None = None

    def build(self) -> tuple[Expr, SlowCertificate]:
        if self.expr is None:
            if self.ell < 1:
                msg = f"ell must be a positive integer, got {self.ell}"
                raise SlowdetError.invalid_input(msg)
            return (log(X) ** self.ell if self.ell > 1 else log(X)), logpow_certificate(self.ell)
        if self.cert is None:
            raise SlowdetError.missing_certificate("a custom inner function needs a certificate")
        return self.expr, self.cert


def _limit_expr(value: Any) -> Expr:
    return value if isinstance(value, Expr) else const(value)


def _coordinate(
    outer: Outer, inner: Inner, F: Any, u: Expr, u_class: LimitClass
) -> tuple[Expr, SlowCertificate]:
    """u + x^-F outer(s(x)) and its certificate, with decay towards u at rate F."""
    s, cert_s = inner.build()
    if outer.kind is OuterKind.IDENTITY:
        if cert_s.derivatives_only:
            msg = "the identity outer function needs a bounded slow inner function"
            raise SlowdetError.invalid_input(msg)
        cert = combine_product(power_decay_certificate(F, a=cert_s.a), cert_s)
    else:
        cert = damp_power(F, outer.alpha, cert_s)
    cert = replace(cert, decay=DecayData(E=mp.mpf(F), u=u, u_class=u_class))
    expr = power(X, -_exponent(F)) * outer.apply(s)
    if u != Const("0"):
        expr = u + expr
    return expr, cert


_ELEMENTARY_CONDITIONS = (
    "(1) u rational and f without zeros",
    "(2) v rational and g without zeros",
    "(3) u and v both rational",
    "(4) u irrational with a declared irrationality exponent K (not a U1 number)",
    "(5) v irrational with a declared irrationality exponent K (not a U1 number)",
)


def _elementary_phi(
    a: Any,
    F: Any,
    G: Any,
    cert_f: SlowCertificate,
    cert_g: SlowCertificate,
    limit: LimitPoint,
    K: Any,
    f_zero_free: bool,
    g_zero_free: bool,
) -> HeightControl:
    rational_u = limit.u_class is LimitClass.RATIONAL
    rational_v = limit.v_class is LimitClass.RATIONAL
    if rational_u and rational_v:
        return height_control(
            HeightCase.BOUNDED_DECAY_RATIONAL, a, E_f=F, E_g=G, u=limit.u, v=limit.v,
            D_f=cert_f.D, D_g=cert_g.D,
        )
    if rational_u and f_zero_free:
        return height_control(HeightCase.RATIONAL_LIMIT, a, E=F, u=limit.u, D=cert_f.D)
    if rational_v and g_zero_free:
        return height_control(HeightCase.RATIONAL_LIMIT, a, E=G, u=limit.v, D=cert_g.D)
    for klass, E in ((limit.u_class, F), (limit.v_class, G)):
        if klass is LimitClass.NON_U1_IRRATIONAL and K is not None:
            return height_control(
                HeightCase.IRRATIONAL_LIMIT, a, E=E, K=K, u_class=klass
            )
    msg = "no admissible (u, v) class; one of these is required: " + "; ".join(
        _ELEMENTARY_CONDITIONS
    )
    raise SlowdetError.missing_height_control(msg, list(_ELEMENTARY_CONDITIONS))


def make_elementary(
    f_desc: Outer,
    g_desc: Outer,
    s_desc: Inner,
    sigma_desc: Inner,
    F: Any,
    G: Any,
    u: Any = 0,
    v: Any = 0,
    *,
    u_class: LimitClass = LimitClass.RATIONAL,
    v_class: LimitClass = LimitClass.RATIONAL,
    K: Any = None,
    f_zero_free: bool = False,
    g_zero_free: bool = False,
    bezout: BezoutFormula | None = None,
    transcendental: bool = True,
    name: str = "elementary",
) -> CurveSpec:
    """The curve x -> (u + x^-F f(s(x)), v + x^-G g(sigma(x))).

    With the default log-power inner functions and sin/cos outer functions
    the spiral Bezout formula applies; otherwise ``bezout`` must be given.

    Raises:
        SlowdetError: If no (u, v) condition yields a height control function
    """
    F_, G_ = _positive("F", F), _positive("G", G)
    limit = LimitPoint(_limit_expr(u), _limit_expr(v), u_class, v_class)
    for value, klass in ((limit.u, u_class), (limit.v, v_class)):
        rational = isinstance(value, Const) and value.rational() is not None
        if (klass is LimitClass.RATIONAL) != rational:
            msg = f"limit value {value.to_json()} does not match its class {klass}"
            raise SlowdetError.invalid_input(msg)
    f, cert_f = _coordinate(f_desc, s_desc, F, limit.u, u_class)
    g, cert_g = _coordinate(g_desc, sigma_desc, G, limit.v, v_class)
    cert = merge_coordinates(cert_f, cert_g)
    if G_ > F_:
        cert = replace(cert, decay=replace(cert_g.decay, coordinate=1))
    phi = _elementary_phi(cert.a, F_, G_, cert_f, cert_g, limit, K, f_zero_free, g_zero_free)

    if bezout is None:
        standard = (
            s_desc.expr is None
            and sigma_desc.expr is None
            and OuterKind.IDENTITY not in (f_desc.kind, g_desc.kind)
        )
        if not standard:
            raise SlowdetError.missing_bezout(
                "custom inner or identity outer functions need an explicit Bezout formula"
            )
        bezout = spiral_bezout(
            F_, G_, s_desc.ell, sigma_desc.ell, max(f_desc.alpha, g_desc.alpha)
        )
    return CurveSpec(
        name=name,
        mode=BoundMode.SLOW_PLUS,
        f=f,
        g=g,
        domain=(cert.a, mp.inf),
        cert=cert,
        phi=phi,
        bezout=bezout,
        transcendental=transcendental,
        limit=limit,
        params={"F": F, "G": G, "ell": s_desc.ell, "q": sigma_desc.ell},
    )


def make_graph(
    name: str,
    h: Expr,
    cert: SlowCertificate,
    phi: HeightControl | None = None,
    bezout: BezoutFormula | None = None,
    *,
    scale: int = 1,
    domain: tuple[Any, Any] | None = None,
    known: KnownPoints | None = None,
    transcendental: bool = True,
    params: dict[str, Any] | None = None,
    notes: tuple[str, ...] = (),
) -> CurveSpec:
    """Graph of h drawn as (1/x, h(x)/scale); ``cert`` certifies h/scale."""
    if scale < 1:
        msg = f"graph scale must be a positive integer, got {scale}"
        raise SlowdetError.invalid_input(msg)
    g = h if scale == 1 else h * const(Fraction(1, scale))
    merged = merge_coordinates(power_decay_certificate(1, a=cert.a), cert)
    return CurveSpec(
        name=name,
        mode=BoundMode.SLOW_PLUS,
        f=recip(X),
        g=g,
        domain=domain or (merged.a, mp.inf),
        cert=merged,
        phi=phi or height_control(HeightCase.GRAPH_DEFAULT, merged.a),
        bezout=bezout,
        transcendental=transcendental,
        graph=GraphAdapter(scale=scale),
        known=known,
        params=params or {},
        notes=notes,
    )


def _rounded_up(value: Any) -> Any:
    return value * (1 + mp.ldexp(1, 8 - mp.prec))


def make_zeta(a_left: Any = 2, c: Any = 1) -> CurveSpec:
    """Graph of zeta / M_a on [a_left, inf), M_a = ceil(zeta(a_left)).

    Raises:
        SlowdetError: If a_left <= 1
    """
    a = to_mpf(a_left)
    if not a > 1:
        msg = f"a_left must exceed 1, got {a}"
        raise SlowdetError.invalid_input(msg)
    M = int(mp.ceil(mp.zeta(a)))
    lam = mp.mpf(1) / 2 - 1 / (2 * a)
    mid = mp.zeta(a / 2 + mp.mpf(1) / 2)
    A = upper(enclose(_rounded_up(mid)) / (enclose(lam) * iv.exp(1)))
    m_a = _rounded_up(mid - 1)
    cert = SlowCertificate(A=A, B=1, C=0, D=1, a=a)
    # |zeta(x) - 1| <= m_a 2^(-lam x) and zeta/M_a - 1/M_a >= 1/(M_a T) at a point of height T
    phi = height_control(
        HeightCase.LOG_OF_T, a, m=m_a, s=lam * mp.log(2) * (1 - mp.ldexp(1, 8 - mp.prec))
    )
    return make_graph(
        _label("zeta", a_left=a_left),
        Zeta(X),
        cert,
        phi,
        zeta_bezout(c),
        scale=M,
        params={"a_left": a_left, "M_a": M, "lambda": lam, "m_a": m_a, "A": A, "c": c},
        notes=("the zeta Bezout constant is not explicit",),
    )


def make_gamma(c: Any = 1) -> CurveSpec:
    """Graph of 1/f on [1, inf), f the increasing branch of the inverse of Gamma.

    A rational point (y, 1/f(y)) corresponds to the point (f(y), y) of the
    graph of Gamma, with the same height.
    """
    delta = gamma_log_ratio_infimum(2)
    A = upper(4 / (enclose(delta) * iv.exp(2)))
    x_d, D_gamma = gamma_decay_minimum()
    cert = SlowCertificate(A=A, B=4, C=1, D=1, a=2)
    return make_graph(
        "gamma",
        recip(GammaInverse(X)),
        cert,
        bezout=gamma_bezout(c),
        domain=(1, mp.inf),
        known=KnownPoints(KnownKind.GAMMA),
        params={"delta": delta, "A": A, "D": D_gamma, "D_at": x_d, "c": c},
        notes=(
            "branch: increasing inverse of Gamma, f(y) >= 2 for y >= 1",
            "the Gamma Bezout constant is not explicit",
        ),
    )


def make_exp2_slow() -> CurveSpec:
    """Graph of 2^-x on [1, inf); its rational points are (k, 2^-k)."""
    cert = SlowCertificate(A=1, B=0, C=0, D=1, a=2)
    return make_graph(
        "exp2_slow",
        exp(-(log(const(2)) * X)),
        cert,
        height_control(HeightCase.LOG_OF_T, cert.a, m=1, s=mp.log(2)),
        polynomial_bezout({(0, 2): 1, (0, 1): 2}, shape=(2, 0)),
        domain=(1, mp.inf),
        known=KnownPoints(KnownKind.EXP2_SLOW),
    )


# Compact test curves


class TestCurveKind(Enum):
    UNBOUNDED_SPIRAL = "unbounded_spiral"
    EXP2_GRAPH = "exp2_graph"
    SIN_PI_GRAPH = "sin_pi_graph"
    SIN_C_GRAPH = "sin_c_graph"

    __test__ = False

    def __str__(self) -> str:
        return self.value


def make_test_curve(kind: TestCurveKind | str, omega: Any = PI_OVER_LOG2, c: Any = 1) -> CurveSpec:
    """Compact-mode curves: S_omega, the graph of 2^x, sin(pi x) and sin(c x)."""
    kind = TestCurveKind(kind)
    whole = (-mp.inf, mp.inf)
    match kind:
        case TestCurveKind.UNBOUNDED_SPIRAL:
            w = coefficient(omega)
            w_value = _value(w)
            known = None
            if _is_pi_over_log2(w_value):
                known = KnownPoints(KnownKind.SPIRAL_OMEGA, {"branch": "full"})
            return CurveSpec(
                name=_label("unbounded_spiral", omega=omega),
                mode=BoundMode.COMPACT,
                f=exp(X) * cos(w * X),
                g=exp(X) * sin(w * X),
                domain=whole,
                bezout=expspiral_bezout(w_value),
                window=(WindowRule(log_coeff=-1), WindowRule(const=mp.log(2) / 2, log_coeff=1)),
                known=known,
                params={"omega": omega},
            )
        case TestCurveKind.EXP2_GRAPH:
            rate = 1 / mp.log(2)
            return CurveSpec(
                name="exp2_graph",
                mode=BoundMode.COMPACT,
                f=X,
                g=exp(log(const(2)) * X),
                domain=whole,
                # a degree-d curve meets the graph at most mu - 1 times
                bezout=polynomial_bezout(
                    {(0, 2): Fraction(1, 2), (0, 1): Fraction(3, 2)}, shape=(2, 0)
                ),
                graph=GraphAdapter(inverted=False),
                window=(WindowRule(log_coeff=-rate), WindowRule(log_coeff=rate)),
                known=KnownPoints(KnownKind.EXP2),
            )
        case TestCurveKind.SIN_PI_GRAPH:
            return _sin_graph("sin_pi_graph", Const("pi"), KnownPoints(KnownKind.SIN_PI))
        case TestCurveKind.SIN_C_GRAPH:
            c_expr = coefficient(c)
            known = KnownPoints(KnownKind.ORIGIN)
            if abs(_value(c_expr) - mp.pi) <= mp.ldexp(1, -(mp.prec // 2)):
                known = KnownPoints(KnownKind.SIN_PI)
            return _sin_graph(_label("sin_c_graph", c=c), c_expr, known, {"c": c})
    msg = f"unknown test curve {kind}"
    raise SlowdetError.internal(msg)


def _sin_graph(
    name: str, c: Expr, known: KnownPoints, params: dict[str, Any] | None = None
) -> CurveSpec:
    c_value = _value(c)
    if c_value == 0:
        msg = "sin(c x) needs c != 0"
        raise SlowdetError.invalid_input(msg)
    return CurveSpec(
        name=name,
        mode=BoundMode.COMPACT,
        f=X,
        g=sin(_scaled(c, X)),
        domain=(-mp.inf, mp.inf),
        bezout=sinc_bezout(c_value),
        graph=GraphAdapter(inverted=False),
        window=(WindowRule(linear_coeff=-1), WindowRule(linear_coeff=1)),
        known=known,
        params=params or {},
    )


def spiral_branches(omega: Any = PI_OVER_LOG2) -> tuple[CurveSpec, CurveSpec]:
    """S_omega split at x = 0.

    The contracting branch x <= 0 becomes slow under x = -log t, t >= 1:
    t -> (cos(omega log t)/t, -sin(omega log t)/t). The expanding branch
    x >= 0 runs in compact mode up to log(sqrt(2) T), past which a
    coordinate exceeds T in absolute value.
    """
    w = coefficient(omega)
    w_value = _value(w)
    alpha = max(mp.one, abs(w_value))
    cert = SlowCertificate(A=4 * alpha, B=2, C=0, D=1, a=mp.e, decay=DecayData(E=1))
    special_omega = _is_pi_over_log2(w_value)
    angle = _scaled(w, log(X))
    contracting = CurveSpec(
        name=_label("spiral_contracting", omega=omega),
        mode=BoundMode.SLOW_PLUS,
        f=recip(X) * cos(angle),
        g=-(recip(X) * sin(angle)),
        domain=(1, mp.inf),
        cert=cert,
        phi=height_control(
            HeightCase.BOUNDED_DECAY_RATIONAL, cert.a, E_f=1, E_g=1, u="0", v="0"
        ),
        bezout=spiral_bezout(1, 1, 1, 1, w_value),
        known=KnownPoints(KnownKind.SPIRAL_OMEGA, {"branch": "contracting"})
        if special_omega
        else None,
        limit=LimitPoint(const(0), const(0)),
        params={"omega": omega},
    )
    expanding = CurveSpec(
        name=_label("spiral_expanding", omega=omega),
        mode=BoundMode.COMPACT,
        f=exp(X) * cos(w * X),
        g=exp(X) * sin(w * X),
        domain=(0, mp.inf),
        bezout=expspiral_bezout(w_value),
        window=(WindowRule(), WindowRule(const=mp.log(2) / 2, log_coeff=1)),
        known=KnownPoints(KnownKind.SPIRAL_OMEGA, {"branch": "expanding"})
        if special_omega
        else None,
        params={"omega": omega},
    )
    return contracting, expanding


# Registry for "catalog:<name>:k=v,..." references


def _contracting(omega: Any = PI_OVER_LOG2) -> CurveSpec:
    return spiral_branches(omega)[0]


def _expanding(omega: Any = PI_OVER_LOG2) -> CurveSpec:
    return spiral_branches(omega)[1]


CATALOG: dict[str, Callable[..., CurveSpec]] = {
    "spiral": make_spiral,
    "sinlog": make_sinlog_graph,
    "zeta": make_zeta,
    "gamma": make_gamma,
    "exp2_slow": make_exp2_slow,
    "spiral_contracting": _contracting,
    "spiral_expanding": _expanding,
    "unbounded_spiral": lambda omega=PI_OVER_LOG2: make_test_curve(
        TestCurveKind.UNBOUNDED_SPIRAL, omega=omega
    ),
    "exp2_graph": lambda: make_test_curve(TestCurveKind.EXP2_GRAPH),
    "sin_pi_graph": lambda: make_test_curve(TestCurveKind.SIN_PI_GRAPH),
    "sin_c_graph": lambda c=1: make_test_curve(TestCurveKind.SIN_C_GRAPH, c=c),
}


def catalog_curve(name: str, **params: Any) -> CurveSpec:
    """Build a catalog curve by name.

    Raises:
        SlowdetError: If the name is unknown or the parameters do not fit
    """
    try:
        factory = CATALOG[name]
    except KeyError:
        msg = f"unknown catalog curve {name!r}; known: {', '.join(sorted(CATALOG))}"
        raise SlowdetError.invalid_input(msg) from None
    try:
        return factory(**params)
    except TypeError as e:
        msg = f"bad parameters for catalog curve {name!r}: {e}"
        raise SlowdetError.invalid_input(msg) from e
