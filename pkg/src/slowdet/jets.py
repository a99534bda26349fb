"""Truncated Taylor arithmetic.

A `Jet` holds c_p = f^(p)(x)/p! for p = 0..P at a center x. All
operations are the classical recurrences on coefficients, so a jet of an
expression is obtained by evaluating the expression on the jet of the
identity.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

from mpmath import mp

from slowdet.error import SlowdetError


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients of a function at ``center`` up to ``order``."""

    center: Any
    coeffs: tuple[Any, ...]
    precision: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if not self.coeffs:
            msg = "a jet needs at least the constant coefficient"
            raise SlowdetError.invalid_input(msg)
        if not self.precision:
            object.__setattr__(self, "precision", mp.prec)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> Any:
        return self.coeffs[0]

    def __getitem__(self, p: int) -> Any:
        return self.coeffs[p]

    def __add__(self, other: Jet | Any) -> Jet:
        return jet_add(self, _lift(other, self))

    __radd__ = __add__

    def __sub__(self, other: Jet | Any) -> Jet:
        return jet_add(self, jet_neg(_lift(other, self)))

    def __rsub__(self, other: Any) -> Jet:
        return jet_add(_lift(other, self), jet_neg(self))

    def __mul__(self, other: Jet | Any) -> Jet:
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return jet_scale(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> Jet:
        return jet_neg(self)

    def __truediv__(self, other: Jet | Any) -> Jet:
        if isinstance(other, Jet):
            return jet_mul(self, jet_recip(other))
        return jet_scale(self, 1 / mp.mpf(other))

    def __pow__(self, n: int) -> Jet:
        return jet_pow_int(self, n)


def _lift(value: Jet | Any, like: Jet) -> Jet:
    if isinstance(value, Jet):
        return value
    return constant_jet(value, like.center, like.order)


def _check_compatible(j1: Jet, j2: Jet) -> None:
    if j1.order != j2.order:
        msg = f"jet orders differ: {j1.order} != {j2.order}"
        raise SlowdetError.invalid_input(msg)
    if j1.center != j2.center:
        msg = f"jet centers differ: {j1.center} != {j2.center}"
        raise SlowdetError.invalid_input(msg)


def _make(center: Any, coeffs: Sequence[Any]) -> Jet:
    return Jet(center, tuple(coeffs))


def variable_jet(center: Any, order: int) -> Jet:
    """Jet of the identity function x at ``center``."""
    center = mp.mpf(center)
    coeffs = [center] + [mp.one] + [mp.zero] * (order - 1)
    return _make(center, coeffs[: order + 1])


def constant_jet(value: Any, center: Any, order: int) -> Jet:
    return _make(mp.mpf(center), [mp.mpf(value)] + [mp.zero] * order)


def jet_add(j1: Jet, j2: Jet) -> Jet:
    _check_compatible(j1, j2)
    return _make(j1.center, [a + b for a, b in zip(j1.coeffs, j2.coeffs, strict=True)])


def jet_neg(j: Jet) -> Jet:
    return _make(j.center, [-c for c in j.coeffs])


def jet_scale(j: Jet, factor: Any) -> Jet:
    factor = mp.mpf(factor)
    return _make(j.center, [factor * c for c in j.coeffs])


def jet_mul(j1: Jet, j2: Jet) -> Jet:
    """Cauchy product."""
    _check_compatible(j1, j2)
    a, b = j1.coeffs, j2.coeffs
    out = [mp.fsum(a[k] * b[n - k] for k in range(n + 1)) for n in range(len(a))]
    return _make(j1.center, out)


def jet_recip(j: Jet) -> Jet:
    a = j.coeffs
    if a[0] == 0:
        msg = "reciprocal of a jet with zero constant term"
        raise SlowdetError.domain(msg)
    u = [1 / a[0]]
    for n in range(1, len(a)):
        u.append(-mp.fsum(a[k] * u[n - k] for k in range(1, n + 1)) / a[0])
    return _make(j.center, u)


def jet_pow_int(j: Jet, n: int) -> Jet:
    """Integer power by repeated squaring; negative powers go through the reciprocal."""
    if n < 0:
        return jet_pow_int(jet_recip(j), -n)
    result = constant_jet(1, j.center, j.order)
    base = j
    while n:
        if n & 1:
            result = jet_mul(result, base)
        n >>= 1
        if n:
            base = jet_mul(base, base)
    return result


def jet_exp(j: Jet) -> Jet:
    a = j.coeffs
    u = [mp.exp(a[0])]
    for n in range(1, len(a)):
        u.append(mp.fsum(k * a[k] * u[n - k] for k in range(1, n + 1)) / n)
    return _make(j.center, u)


def jet_log(j: Jet) -> Jet:
    a = j.coeffs
    if a[0] <= 0:
        msg = f"log of a jet with non-positive value {a[0]}"
        raise SlowdetError.domain(msg)
    u = [mp.log(a[0])]
    for n in range(1, len(a)):
        s = mp.fsum(k * u[k] * a[n - k] for k in range(1, n))
        u.append((a[n] - s / n) / a[0])
    return _make(j.center, u)


def jet_sincos(j: Jet) -> tuple[Jet, Jet]:
    """Sine and cosine jets, computed together."""
    a = j.coeffs
    s = [mp.sin(a[0])]
    c = [mp.cos(a[0])]
    for n in range(1, len(a)):
        s.append(mp.fsum(k * a[k] * c[n - k] for k in range(1, n + 1)) / n)
        c.append(-mp.fsum(k * a[k] * s[n - k] for k in range(1, n + 1)) / n)
    return _make(j.center, s), _make(j.center, c)


def jet_sin(j: Jet) -> Jet:
    return jet_sincos(j)[0]


def jet_cos(j: Jet) -> Jet:
    return jet_sincos(j)[1]


def jet_pow_real(j: Jet, exponent: Any) -> Jet:
    """j**F for real F; the constant term must be positive."""
    a = j.coeffs
    if a[0] <= 0:
        msg = f"real power of a jet with non-positive value {a[0]}"
        raise SlowdetError.domain(msg)
    F = mp.mpf(exponent)
    u = [mp.power(a[0], F)]
    for n in range(1, len(a)):
        s = mp.fsum((F * k - (n - k)) * a[k] * u[n - k] for k in range(1, n + 1))
        u.append(s / (n * a[0]))
    return _make(j.center, u)


def jet_atan(j: Jet) -> Jet:
    a = j.coeffs
    w = jet_recip(jet_add(constant_jet(1, j.center, j.order), jet_mul(j, j))).coeffs
    u = [mp.atan(a[0])]
    for n in range(1, len(a)):
        u.append(mp.fsum(k * a[k] * w[n - k] for k in range(1, n + 1)) / n)
    return _make(j.center, u)


def series_compose(outer: Sequence[Any], inner: Sequence[Any]) -> list[Any]:
    """Coefficients of sum_k outer[k] * t(h)^k where t has zero constant term.

    Horner evaluation on truncated power series.
    """
    order = len(inner) - 1
    t = [mp.zero] + list(inner[1:])
    result = [mp.zero] * (order + 1)
    for coeff in reversed(outer[: order + 1]):
        # result = result * t + coeff
        product = [
            mp.fsum(result[k] * t[n - k] for k in range(n)) if n else mp.zero
            for n in range(order + 1)
        ]
        product[0] += coeff
        result = product
    return result


def jet_compose(outer: Jet, inner: Jet) -> Jet:
    """Jet of f∘g at x from the jet of f at g(x) and the jet of g at x."""
    if outer.order < inner.order:
        msg = f"outer jet order {outer.order} is below inner order {inner.order}"
        raise SlowdetError.invalid_input(msg)
    tolerance = mp.ldexp(max(1, abs(inner.value)), 16 - mp.prec)
    if abs(outer.center - inner.value) > tolerance:
        msg = f"outer jet centered at {outer.center}, inner value is {inner.value}"
        raise SlowdetError.invalid_input(msg)
    return _make(inner.center, series_compose(outer.coeffs, inner.coeffs))


def jet_inverse(j: Jet) -> Jet:
    """Jet of the inverse function at j.value, by order-by-order reversion."""
    a = j.coeffs
    if a[1] == 0:
        msg = "inverse jet needs a nonzero first derivative"
        raise SlowdetError.domain(msg)
    order = j.order
    b = [j.center, 1 / a[1]] + [mp.zero] * (order - 1)
    b = b[: order + 1]
    for n in range(2, order + 1):
        # The composition a∘b must be the identity up to order n
        composed = series_compose([mp.zero, *a[1:]], b[: n + 1])
        b[n] = -composed[n] / a[1]
    return _make(a[0], b)
