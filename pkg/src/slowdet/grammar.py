"""Function grammar for curve coordinates.

Expressions are small immutable trees that serialize to nested JSON
arrays, e.g. ``["mul", ["pow_real", ["var"], "-1"], ["sin", ["log", ["var"]]]]``.
They evaluate on points with a numeric backend (`mp`, `fp` or numpy
arrays) and on jets, which is how derivatives are obtained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, ClassVar, Protocol

import numpy as np
from mpmath import fp, mp

from slowdet import jets, special
from slowdet.error import SlowdetError
from slowdet.jets import Jet
from slowdet.rounding import working_precision

_NAMED_CONSTANTS = {"pi", "e"}


class Backend(Protocol):
    """Elementary operations used by `Expr.evaluate`."""

    def const(self, text: str) -> Any: ...
    def exp(self, x: Any) -> Any: ...
    def log(self, x: Any) -> Any: ...
    def sin(self, x: Any) -> Any: ...
    def cos(self, x: Any) -> Any: ...
    def atan(self, x: Any) -> Any: ...
    def power(self, x: Any, exponent: Any) -> Any: ...
    def zeta(self, x: Any) -> Any: ...
    def gamma_inverse(self, x: Any) -> Any: ...


class MpmathBackend:
    """Backend over an mpmath context (``mp`` or ``fp``)."""

    def __init__(self, ctx: Any = mp) -> None:
        self.ctx = ctx

    def const(self, text: str) -> Any:
        if text == "pi":
            return self.ctx.pi
        if text == "e":
            return self.ctx.e
        if "/" in text:
            q = Fraction(text)
            return self.ctx.convert(q.numerator) / q.denominator
        return self.ctx.convert(text) if self.ctx is mp else float(text)

    def exp(self, x: Any) -> Any:
        return self.ctx.exp(x)

    def log(self, x: Any) -> Any:
        if x <= 0:
            msg = f"log of non-positive value {x}"
            raise SlowdetError.domain(msg)
        return self.ctx.log(x)

    def sin(self, x: Any) -> Any:
        return self.ctx.sin(x)

    def cos(self, x: Any) -> Any:
        return self.ctx.cos(x)

    def atan(self, x: Any) -> Any:
        return self.ctx.atan(x)

    def power(self, x: Any, exponent: Any) -> Any:
        if x <= 0:
            msg = f"real power of non-positive value {x}"
            raise SlowdetError.domain(msg)
        return self.ctx.power(x, exponent)

    def zeta(self, x: Any) -> Any:
        if self.ctx is mp:
            return special.zeta_value(x)
        return self.ctx.zeta(x)

    def gamma_inverse(self, x: Any) -> Any:
        return special.gamma_inverse(x, self.ctx)


class NumpyBackend:
    """Vectorized float backend; zeta and inverse Gamma fall back to scalar calls."""

    def const(self, text: str) -> Any:
        if text == "pi":
            return math.pi
        if text == "e":
            return math.e
        return float(Fraction(text)) if "/" in text else float(text)

    def exp(self, x: Any) -> Any:
        return np.exp(x)

    def log(self, x: Any) -> Any:
        return np.log(x)

    def sin(self, x: Any) -> Any:
        return np.sin(x)

    def cos(self, x: Any) -> Any:
        return np.cos(x)

    def atan(self, x: Any) -> Any:
        return np.arctan(x)

    def power(self, x: Any, exponent: Any) -> Any:
        return np.power(x, exponent)

    def zeta(self, x: Any) -> Any:
        return np.vectorize(lambda s: float(fp.zeta(s)), otypes=[float])(x)

    def gamma_inverse(self, x: Any) -> Any:
        return np.vectorize(
            lambda y: float(special.gamma_inverse(y, fp)), otypes=[float]
        )(x)


MP = MpmathBackend(mp)
FP = MpmathBackend(fp)
NUMPY = NumpyBackend()


class Expr:
    """Base class of grammar nodes."""

    tag: ClassVar[str] = ""

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        raise NotImplementedError

    def on_jet(self, j: Jet) -> Jet:
        raise NotImplementedError

    def to_json(self) -> list[Any]:
        raise NotImplementedError

    def jet(self, center: Any, order: int) -> Jet:
        """Jet of this expression (as a function of the variable) at center."""
        return self.on_jet(jets.variable_jet(center, order))

    def is_constant(self) -> bool:
        return all(child.is_constant() for child in self.children())

    def children(self) -> tuple[Expr, ...]:
        return ()

    # Builders used by the catalog
    def __add__(self, other: Expr | int | str) -> Expr:
        return Add((self, as_expr(other)))

    def __radd__(self, other: Expr | int | str) -> Expr:
        return Add((as_expr(other), self))

    def __sub__(self, other: Expr | int | str) -> Expr:
        return Add((self, Neg(as_expr(other))))

    def __mul__(self, other: Expr | int | str) -> Expr:
        return Mul((self, as_expr(other)))

    def __rmul__(self, other: Expr | int | str) -> Expr:
        return Mul((as_expr(other), self))

    def __truediv__(self, other: Expr | int | str) -> Expr:
        return Mul((self, Recip(as_expr(other))))

    def __neg__(self) -> Expr:
        return Neg(self)

    def __pow__(self, n: int) -> Expr:
        return PowInt(self, n)


def as_expr(value: Expr | int | str | Fraction) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(str(value))


@dataclass(frozen=True)
class Const(Expr):
    """Constant: an integer, a rational "p/q", a decimal string, "pi" or "e"."""

    value: str
    tag: ClassVar[str] = "const"

    def __post_init__(self) -> None:
        if self.value in _NAMED_CONSTANTS:
            return
        try:
            Fraction(self.value)
        except (ValueError, ZeroDivisionError) as e:
            msg = f"Invalid constant {self.value!r}"
            raise SlowdetError.invalid_input(msg) from e

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return backend.const(self.value)

    def on_jet(self, j: Jet) -> Jet:
        return jets.constant_jet(MP.const(self.value), j.center, j.order)

    def to_json(self) -> list[Any]:
        return ["const", self.value]

    def rational(self) -> Fraction | None:
        if self.value in _NAMED_CONSTANTS:
            return None
        return Fraction(self.value)


@dataclass(frozen=True)
class Var(Expr):
    """The curve parameter."""

    tag: ClassVar[str] = "var"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return x

    def on_jet(self, j: Jet) -> Jet:
        return j

    def to_json(self) -> list[Any]:
        return ["var"]

    def is_constant(self) -> bool:
        return False


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple[Expr, ...]
    tag: ClassVar[str] = "add"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        total = self.terms[0].evaluate(x, backend)
        for term in self.terms[1:]:
            total = total + term.evaluate(x, backend)
        return total

    def on_jet(self, j: Jet) -> Jet:
        total = self.terms[0].on_jet(j)
        for term in self.terms[1:]:
            total = jets.jet_add(total, term.on_jet(j))
        return total

    def to_json(self) -> list[Any]:
        return ["add", *(t.to_json() for t in self.terms)]

    def children(self) -> tuple[Expr, ...]:
        return self.terms


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple[Expr, ...]
    tag: ClassVar[str] = "mul"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        product = self.factors[0].evaluate(x, backend)
        for factor in self.factors[1:]:
            product = product * factor.evaluate(x, backend)
        return product

    def on_jet(self, j: Jet) -> Jet:
        product = self.factors[0].on_jet(j)
        for factor in self.factors[1:]:
            product = jets.jet_mul(product, factor.on_jet(j))
        return product

    def to_json(self) -> list[Any]:
        return ["mul", *(f.to_json() for f in self.factors)]

    def children(self) -> tuple[Expr, ...]:
        return self.factors


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr
    tag: ClassVar[str] = "neg"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return -self.arg.evaluate(x, backend)

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_neg(self.arg.on_jet(j))

    def to_json(self) -> list[Any]:
        return ["neg", self.arg.to_json()]

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Recip(Expr):
    arg: Expr
    tag: ClassVar[str] = "recip"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        value = self.arg.evaluate(x, backend)
        if not isinstance(value, np.ndarray) and value == 0:
            msg = "reciprocal of zero"
            raise SlowdetError.domain(msg)
        return 1 / value

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_recip(self.arg.on_jet(j))

    def to_json(self) -> list[Any]:
        return ["recip", self.arg.to_json()]

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class PowInt(Expr):
    arg: Expr
    n: int
    tag: ClassVar[str] = "pow_int"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return self.arg.evaluate(x, backend) ** self.n

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_pow_int(self.arg.on_jet(j), self.n)

    def to_json(self) -> list[Any]:
        return ["pow_int", self.arg.to_json(), self.n]

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class PowReal(Expr):
    arg: Expr
    exponent: str
    tag: ClassVar[str] = "pow_real"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        exponent = backend.const(self.exponent)
        return backend.power(self.arg.evaluate(x, backend), exponent)

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_pow_real(self.arg.on_jet(j), MP.const(self.exponent))

    def to_json(self) -> list[Any]:
        return ["pow_real", self.arg.to_json(), self.exponent]

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class _Unary(Expr):
    arg: Expr

    def to_json(self) -> list[Any]:
        return [self.tag, self.arg.to_json()]

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Exp(_Unary):
    tag: ClassVar[str] = "exp"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return backend.exp(self.arg.evaluate(x, backend))

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_exp(self.arg.on_jet(j))


@dataclass(frozen=True)
class Log(_Unary):
    tag: ClassVar[str] = "log"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return backend.log(self.arg.evaluate(x, backend))

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_log(self.arg.on_jet(j))


@dataclass(frozen=True)
class Sin(_Unary):
    tag: ClassVar[str] = "sin"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return backend.sin(self.arg.evaluate(x, backend))

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_sin(self.arg.on_jet(j))


@dataclass(frozen=True)
class Cos(_Unary):
    tag: ClassVar[str] = "cos"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return backend.cos(self.arg.evaluate(x, backend))

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_cos(self.arg.on_jet(j))


@dataclass(frozen=True)
class Atan(_Unary):
    tag: ClassVar[str] = "atan"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return backend.atan(self.arg.evaluate(x, backend))

    def on_jet(self, j: Jet) -> Jet:
        return jets.jet_atan(self.arg.on_jet(j))


@dataclass(frozen=True)
class Zeta(_Unary):
    tag: ClassVar[str] = "zeta"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return backend.zeta(self.arg.evaluate(x, backend))

    def on_jet(self, j: Jet) -> Jet:
        inner = self.arg.on_jet(j)
        outer = special.zeta_jet(inner.value, inner.order).jet
        return jets.jet_compose(outer, inner)


@dataclass(frozen=True)
class GammaInverse(_Unary):
    tag: ClassVar[str] = "gamma_inverse"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return backend.gamma_inverse(self.arg.evaluate(x, backend))

    def on_jet(self, j: Jet) -> Jet:
        inner = self.arg.on_jet(j)
        outer = special.gamma_inverse_jet(inner.value, inner.order)
        return jets.jet_compose(outer, inner)


@dataclass(frozen=True)
class Compose(Expr):
    """outer(inner(x)); ``outer`` is written in terms of its own variable."""

    outer: Expr
    inner: Expr
    tag: ClassVar[str] = "compose"

    def evaluate(self, x: Any, backend: Backend = MP) -> Any:
        return self.outer.evaluate(self.inner.evaluate(x, backend), backend)

    def on_jet(self, j: Jet) -> Jet:
        inner = self.inner.on_jet(j)
        outer = self.outer.jet(inner.value, inner.order)
        return jets.jet_compose(outer, inner)

    def to_json(self) -> list[Any]:
        return ["compose", self.outer.to_json(), self.inner.to_json()]

    def children(self) -> tuple[Expr, ...]:
        return (self.outer, self.inner)


_UNARY: dict[str, type[_Unary]] = {
    cls.tag: cls for cls in (Exp, Log, Sin, Cos, Atan, Zeta, GammaInverse)
}


def expr_from_json(data: Any) -> Expr:
    """Parse a grammar expression from its JSON array form.

    Raises:
        SlowdetError: If the array is not a valid expression
    """
    if not isinstance(data, list) or not data or not isinstance(data[0], str):
        msg = f"Invalid expression: {data!r}"
        raise SlowdetError.invalid_input(msg)

    tag, args = data[0], data[1:]
    match tag:
        case "const":
            _expect_arity(data, 1)
            return Const(str(args[0]))
        case "var":
            _expect_arity(data, 0)
            return Var()
        case "add" | "mul":
            if not args:
                msg = f"{tag} needs at least one operand"
                raise SlowdetError.invalid_input(msg)
            children = tuple(expr_from_json(a) for a in args)
            return Add(children) if tag == "add" else Mul(children)
        case "neg":
            _expect_arity(data, 1)
            return Neg(expr_from_json(args[0]))
        case "recip":
            _expect_arity(data, 1)
            return Recip(expr_from_json(args[0]))
        case "pow_int":
            _expect_arity(data, 2)
            if not isinstance(args[1], int):
                msg = f"pow_int exponent must be an integer, got {args[1]!r}"
                raise SlowdetError.invalid_input(msg)
            return PowInt(expr_from_json(args[0]), args[1])
        case "pow_real":
            _expect_arity(data, 2)
            Const(str(args[1]))  # validates the exponent text
            return PowReal(expr_from_json(args[0]), str(args[1]))
        case "compose":
            _expect_arity(data, 2)
            return Compose(expr_from_json(args[0]), expr_from_json(args[1]))
        case _ if tag in _UNARY:
            _expect_arity(data, 1)
            return _UNARY[tag](expr_from_json(args[0]))
        case _:
            msg = f"Unknown expression node: {tag}"
            raise SlowdetError.invalid_input(msg)


def _expect_arity(data: list[Any], n: int) -> None:
    if len(data) != n + 1:
        msg = f"{data[0]} expects {n} argument(s), got {len(data) - 1}"
        raise SlowdetError.invalid_input(msg)


# Convenience constructors
X = Var()


def const(value: int | str | Fraction) -> Const:
    return Const(str(value))


def exp(e: Expr) -> Expr:
    return Exp(e)


def log(e: Expr) -> Expr:
    return Log(e)


def sin(e: Expr) -> Expr:
    return Sin(e)


def cos(e: Expr) -> Expr:
    return Cos(e)


def atan(e: Expr) -> Expr:
    return Atan(e)


def power(e: Expr, exponent: int | str | Fraction) -> Expr:
    return PowReal(e, str(exponent))


def recip(e: Expr) -> Expr:
    return Recip(e)


def derivative_coefficient(f: Expr, x: Any, p: int, *, precision: int | None = None) -> Any:
    """f^(p)(x)/p!, read off the order-p jet of f at x.

    Raises:
        SlowdetError: If p is negative or x lies outside the domain of f
    """
    if p < 0:
        msg = f"derivative order must be >= 0, got {p}"
        raise SlowdetError.invalid_input(msg)
    with working_precision(precision):
        return f.jet(x, p).coeffs[p]
