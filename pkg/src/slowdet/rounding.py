"""Directed rounding on top of the mpmath interval context.

Upper-bound constants are taken from the upper end of an enclosing
interval and length constants from the lower end, so that every number
handed back to the bound pipeline stays on the safe side of the exact
value at the current working precision.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from contextlib import contextmanager
from fractions import Fraction
from typing import Any

from mpmath import iv, mp

DEFAULT_PRECISION = 128


@contextmanager
def working_precision(bits: int | None) -> Iterator[None]:
    """Set the precision of both the `mp` and `iv` contexts.

    The mpmath contexts are process-global, so concurrent work is run in
    worker processes rather than threads.
    """
    if bits is None:
        yield
        return
    saved = (mp.prec, iv.prec)
    mp.prec = bits
    iv.prec = bits
    try:
        yield
    finally:
        mp.prec, iv.prec = saved


def enclose(value: Any) -> Any:
    """Return an interval containing ``value`` exactly."""
    if isinstance(value, iv.mpf):
        return value
    if isinstance(value, Fraction):
        return iv.mpf(value.numerator) / iv.mpf(value.denominator)
    if isinstance(value, str) and "/" in value:
        return enclose(Fraction(value))
    return iv.mpf(value)


def upper(value: Any) -> Any:
    """Upper endpoint of an interval as an `mp` number."""
    return mp.make_mpf(enclose(value)._mpi_[1])


def lower(value: Any) -> Any:
    """Lower endpoint of an interval as an `mp` number."""
    return mp.make_mpf(enclose(value)._mpi_[0])


def ipow(base: Any, exponent: Any) -> Any:
    """Interval power; integer exponents avoid the exp/log detour."""
    base = enclose(base)
    if isinstance(exponent, mp.mpf) and exponent == int(exponent):
        exponent = int(exponent)
    if isinstance(exponent, int) or (
        isinstance(exponent, Fraction) and exponent.denominator == 1
    ):
        return base ** int(exponent)
    return iv.exp(enclose(exponent) * iv.ln(base))


def ilog(value: Any) -> Any:
    return iv.ln(enclose(value))


def ilog_plus(value: Any) -> Any:
    """Interval for log_+ x = max(1, log x)."""
    lg = ilog(value)
    a, b = lower(lg), upper(lg)
    one = mp.mpf(1)
    return iv.mpf((max(a, one), max(b, one)))


def ifactorial(n: int) -> Any:
    return enclose(math.factorial(n))


def log_plus(x: Any) -> Any:
    """Plain-precision log_+ x = max(1, log x)."""
    x = mp.mpf(x)
    if x <= mp.e:
        return mp.mpf(1)
    return mp.log(x)


def to_fraction(value: Any) -> Fraction:
    """Exact rational value of a binary floating point number."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    sign, man, exp, _ = mp.mpf(value)._mpf_
    if man == 0:
        return Fraction(0)
    q = Fraction(man) * Fraction(2) ** exp
    return -q if sign else q


def encode_mpf(value: Any) -> str:
    """Exact text form ``"<mantissa>p<exponent>"`` of an `mp` number."""
    sign, man, exp, _ = mp.mpf(value)._mpf_
    if man == 0:
        return "0p0"
    return f"{'-' if sign else ''}{man}p{exp}"


def decode_mpf(text: str | float | int) -> Any:
    """Inverse of `encode_mpf`; decimal strings and numbers are also accepted."""
    if isinstance(text, str) and "p" in text:
        man, exp = text.split("p")
        return mp.mpf((int(man), int(exp)))
    if isinstance(text, str) and "/" in text:
        q = Fraction(text)
        return mp.mpf(q.numerator) / q.denominator
    return mp.mpf(text)


def ipi() -> Any:
    """Interval enclosing pi at the current precision."""
    with mp.workprec(iv.prec + 16):
        mid = mp.pi
        rad = mp.ldexp(mid, -iv.prec)
        lo, hi = mid - rad, mid + rad
    return iv.mpf((lo, hi))


def to_mpf(value: Any) -> Any:
    """An `mp` number from an int, float, Fraction, mpf or "p/q" / decimal string."""
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, str):
        return decode_mpf(value.strip())
    return mp.mpf(value)
