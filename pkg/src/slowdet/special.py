"""Riemann zeta and inverse Gamma, as values and as jets.

Zeta is summed by Euler-Maclaurin carried out on jets in s, so every
derivative comes with the same remainder estimate. The inverse of Gamma
is taken on its increasing branch and its jets come from reverting the
Gamma jet, which is itself the exponential of the log-Gamma jet built
from polygamma values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cache
from typing import Any

from mpmath import mp

from slowdet.error import SlowdetError
from slowdet.jets import (
    Jet,
    constant_jet,
    jet_exp,
    jet_inverse,
    jet_mul,
    jet_recip,
    variable_jet,
)

logger = logging.getLogger(__name__)

MAX_BERNOULLI_TERMS = 200


@dataclass(frozen=True)
class ZetaJet:
    """Zeta jet together with a per-coefficient remainder estimate."""

    jet: Jet
    tail: tuple[Any, ...]
    cutoff: int
    terms: int


def _direct_terms(s0: Any, order: int, cutoff: int) -> list[Any]:
    # sum_{n < N} n^{-s}: coefficient p is n^{-s0} (-log n)^p / p!
    coeffs = [mp.zero] * (order + 1)
    for n in range(1, cutoff):
        ln = mp.log(n)
        term = mp.power(n, -s0)
        for p in range(order + 1):
            coeffs[p] += term
            term = -term * ln / (p + 1)
    return coeffs


def zeta_jet(s0: Any, order: int, cutoff: int | None = None) -> ZetaJet:
    """Jet of zeta at a real point s0 > 1.

    The Euler-Maclaurin correction terms are summed until the next term
    falls below 2^(-prec/2) relative to the value; the first omitted term,
    doubled, is reported as the remainder estimate.
    """
    s0 = mp.mpf(s0)
    if s0 <= 1:
        msg = f"zeta is evaluated on s > 1 only, got {s0}"
        raise SlowdetError.domain(msg)
    if cutoff is None:
        cutoff = max(20, mp.prec // 4)
    s = variable_jet(s0, order)
    log_n = mp.log(cutoff)

    # N^{-s} as a jet
    n_pow = jet_exp(s * (-log_n))
    head = _direct_terms(s0, order, cutoff)
    integral = jet_mul(n_pow * mp.mpf(cutoff), jet_recip(s - 1))
    total = [h + a + b / 2 for h, a, b in zip(head, integral.coeffs, n_pow.coeffs, strict=True)]

    threshold = mp.ldexp(1, -(mp.prec // 2)) * (1 + abs(total[0]))
    rising = s  # (s)_{2k-1}
    scale = mp.mpf(cutoff) ** -1  # N^{-(2k-1)}
    tail: list[Any] = []
    terms = 0
    for k in range(1, MAX_BERNOULLI_TERMS + 1):
        factor = mp.bernoulli(2 * k) / mp.factorial(2 * k) * scale
        term = jet_mul(rising, n_pow) * factor
        if max(abs(c) for c in term.coeffs) < threshold:
            tail = [2 * abs(c) for c in term.coeffs]
            break
        total = [t + c for t, c in zip(total, term.coeffs, strict=True)]
        terms = k
        rising = jet_mul(rising, jet_mul(s + (2 * k - 1), s + 2 * k))
        scale /= cutoff * cutoff
    else:
        logger.warning("zeta(%s): Euler-Maclaurin did not settle, doubling the cutoff", s0)
        return zeta_jet(s0, order, cutoff * 2)

    return ZetaJet(Jet(s0, tuple(total)), tuple(tail), cutoff, terms)


def zeta_value(s0: Any) -> Any:
    return zeta_jet(s0, 0).jet.value


@cache
def _gamma_min(prec: int) -> tuple[Any, Any]:
    with mp.workprec(prec):
        x_min = mp.findroot(mp.digamma, mp.mpf("1.4616321449683623"))
        return x_min, mp.gamma(x_min)


def gamma_minimum() -> tuple[Any, Any]:
    """Location and value of the minimum of Gamma on (0, inf)."""
    return _gamma_min(mp.prec)


def gamma_inverse(y: Any, ctx: Any = mp) -> Any:
    """Inverse of Gamma on its increasing branch, by bisection then Newton.

    Works with any mpmath context (``mp`` or ``fp``).
    """
    x_min, y_min = gamma_minimum()
    x_min = ctx.convert(x_min)
    y = ctx.convert(y)
    if y < ctx.convert(y_min):
        msg = f"gamma_inverse is defined for y >= {ctx.nstr(y_min, 8)}, got {y}"
        raise SlowdetError.domain(msg)
    target = ctx.log(y)

    def g(x: Any) -> Any:
        return ctx.loggamma(x) - target

    lo, hi = x_min, ctx.convert(2)
    while g(hi) < 0:
        lo, hi = hi, hi * 2
    for _ in range(8):
        mid = (lo + hi) / 2
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid

    x = hi
    tol = ctx.ldexp(1, 4 - ctx.prec) if ctx is mp else 1e-14
    for _ in range(100):
        step = g(x) / ctx.digamma(x)
        candidate = x - step
        if not lo <= candidate <= hi:
            candidate = (lo + hi) / 2
        if g(candidate) < 0:
            lo = candidate
        else:
            hi = candidate
        if abs(candidate - x) <= tol * abs(candidate):
            return candidate
        x = candidate
    return x


def gamma_jet(x0: Any, order: int) -> Jet:
    """Jet of Gamma at x0 > 0 via the exponential of the log-Gamma jet."""
    x0 = mp.mpf(x0)
    if x0 <= 0:
        msg = f"gamma_jet needs a positive center, got {x0}"
        raise SlowdetError.domain(msg)
    coeffs = [mp.loggamma(x0)]
    for k in range(1, order + 1):
        coeffs.append(mp.polygamma(k - 1, x0) / mp.factorial(k))
    return jet_exp(Jet(x0, tuple(coeffs)))


def gamma_inverse_jet(y0: Any, order: int) -> Jet:
    """Jet of the inverse of Gamma at y0 on the increasing branch."""
    y0 = mp.mpf(y0)
    x0 = gamma_inverse(y0)
    if order == 0:
        return constant_jet(x0, y0, 0)
    reverted = jet_inverse(gamma_jet(x0, order))
    return Jet(y0, reverted.coeffs)


@cache
def _gamma_decay(prec: int) -> tuple[Any, Any]:
    with mp.workprec(prec):
        x_star = mp.findroot(lambda x: mp.digamma(x) - 1, mp.mpf("3.2"))
        return x_star, mp.gamma(x_star) * mp.exp(-x_star)


def gamma_decay_minimum() -> tuple[Any, Any]:
    """Point and value of min_{x >= 1} Gamma(x) e^{-x}."""
    return _gamma_decay(mp.prec)


def gamma_log_ratio_infimum(y_start: Any, span: int = 64) -> Any:
    """Lower estimate of inf_{y >= y_start} log y / f(y) with f the inverse of Gamma.

    log Gamma(x) / x is increasing past its minimum, so the infimum sits at
    the left end; the grid guards against a start left of that minimum.
    """
    x_start = gamma_inverse(y_start)
    xs = [x_start + mp.mpf(k) / 4 for k in range(span)]
    ratio = min(mp.loggamma(x) / x for x in xs)
    return ratio * (1 - mp.ldexp(1, 16 - mp.prec))
