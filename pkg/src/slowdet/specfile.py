"""Curve-spec files and catalog references.

A curve spec is a JSON (or TOML) document with schema ``slowdet.curve/1``.
Numbers are written as exact binary ``"<mantissa>p<exponent>"`` strings so
that a spec round-trips bit for bit. Wherever a spec file is accepted, a
reference ``catalog:<name>[:k=v,...]`` builds a catalog curve instead.
"""

from __future__ import annotations

import json
import logging
import re
import tomllib
from pathlib import Path
from typing import Any

from mpmath import mp

from slowdet.bezout import BezoutFormula
from slowdet.bounds import BoundMode
from slowdet.catalog import (
    CurveSpec,
    GraphAdapter,
    KnownPoints,
    LimitPoint,
    WindowRule,
    catalog_curve,
)
from slowdet.error import SlowdetError
from slowdet.grammar import expr_from_json
from slowdet.rounding import decode_mpf, encode_mpf, to_mpf
from slowdet.slow import HeightControl, LimitClass, SlowCertificate

logger = logging.getLogger(__name__)

SCHEMA = "slowdet.curve/1"
CATALOG_PREFIX = "catalog:"

_INT = re.compile(r"[+-]?\d+")


def _encode_number(value: Any) -> str:
    value = to_mpf(value)
    if mp.isinf(value):
        return "inf" if value > 0 else "-inf"
    return encode_mpf(value)


def _decode_number(text: Any) -> Any:
    if text in ("inf", "+inf"):
        return mp.inf
    if text == "-inf":
        return -mp.inf
    return decode_mpf(text)


def _encode_param(value: Any) -> Any:
    if isinstance(value, bool | int | str):
        return value
    if isinstance(value, mp.mpf):
        return encode_mpf(value)
    return str(value)


def curve_to_json(curve: CurveSpec) -> dict[str, Any]:
    """The curve-file document describing a curve."""
    data: dict[str, Any] = {
        "schema": SCHEMA,
        "name": curve.name,
        "mode": curve.mode.value,
        "f": curve.f.to_json(),
        "g": curve.g.to_json(),
        "domain": [_encode_number(v) for v in curve.domain],
        "transcendental": curve.transcendental,
    }
    if curve.cert is not None:
        data["certificate"] = curve.cert.to_json()
    if curve.phi is not None:
        data["phi"] = curve.phi.to_json()
    if curve.bezout is not None:
        data["bezout"] = curve.bezout.to_json()
    if curve.graph is not None:
        data["graph"] = {"scale": curve.graph.scale, "inverted": curve.graph.inverted}
    if curve.window is not None:
        data["window"] = [
            [encode_mpf(to_mpf(v)) for v in (r.const, r.log_coeff, r.linear_coeff)]
            for r in curve.window
        ]
    if curve.known is not None:
        data["known_points"] = curve.known.to_json()
    if curve.limit is not None:
        data["limit"] = {
            "u": curve.limit.u.to_json(),
            "v": curve.limit.v.to_json(),
            "u_class": curve.limit.u_class.value,
            "v_class": curve.limit.v_class.value,
        }
    if curve.params:
        data["params"] = {k: _encode_param(v) for k, v in curve.params.items()}
    if curve.notes:
        data["notes"] = list(curve.notes)
    return data


def curve_from_json(data: dict[str, Any]) -> CurveSpec:
    """Parse a spec document.

    Raises:
        SlowdetError: If the schema is wrong or a field is missing or malformed
    """
    if not isinstance(data, dict):
        msg = "a curve spec must be a table"
        raise SlowdetError.invalid_input(msg)
    if data.get("schema", SCHEMA) != SCHEMA:
        msg = f"unsupported curve spec schema {data.get('schema')!r}; expected {SCHEMA}"
        raise SlowdetError.invalid_input(msg)
    try:
        graph = data.get("graph")
        window = data.get("window")
        limit = data.get("limit")
        return CurveSpec(
            name=str(data["name"]),
            mode=BoundMode(data.get("mode", "slow")),
            f=expr_from_json(data["f"]),
            g=expr_from_json(data["g"]),
            domain=(_decode_number(data["domain"][0]), _decode_number(data["domain"][1])),
            cert=SlowCertificate.from_json(data["certificate"]) if "certificate" in data else None,
            phi=HeightControl.from_json(data["phi"]) if "phi" in data else None,
            bezout=BezoutFormula.from_json(data["bezout"]) if "bezout" in data else None,
            transcendental=bool(data.get("transcendental", False)),
            graph=GraphAdapter(int(graph.get("scale", 1)), bool(graph.get("inverted", True)))
            if graph
            else None,
            window=tuple(
                WindowRule(*(decode_mpf(v) for v in rule)) for rule in window
            )  # type: ignore[arg-type]
            if window
            else None,
            known=KnownPoints.from_json(data["known_points"]) if "known_points" in data else None,
            limit=LimitPoint(
                expr_from_json(limit["u"]),
                expr_from_json(limit["v"]),
                LimitClass(limit.get("u_class", "rational")),
                LimitClass(limit.get("v_class", "rational")),
            )
            if limit
            else None,
            params=dict(data.get("params", {})),
            notes=tuple(data.get("notes", ())),
        )
    except (KeyError, ValueError, TypeError, IndexError) as e:
        msg = f"Invalid curve spec: {e!r}"
        raise SlowdetError.invalid_input(msg) from e


def parse_catalog_ref(ref: str) -> tuple[str, dict[str, Any]]:
    """Split ``catalog:<name>[:k=v,...]`` into the name and its parameters.

    Integer values become ints; everything else stays a string for the
    constructor to interpret ("1/2", "0.75", "pi/log2", "cos").
    """
    if not ref.startswith(CATALOG_PREFIX):
        msg = f"not a catalog reference: {ref!r}"
        raise SlowdetError.invalid_input(msg)
    name, _, rest = ref[len(CATALOG_PREFIX) :].partition(":")
    params: dict[str, Any] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key:
            msg = f"catalog parameter {item!r} is not of the form key=value"
            raise SlowdetError.invalid_input(msg)
        params[key.strip()] = int(value) if _INT.fullmatch(value.strip()) else value.strip()
    return name, params


def load_curve(ref: str | Path, *, overrides: dict[str, Any] | None = None) -> CurveSpec:
    """Load a curve from a spec file or build it from a catalog reference.

    ``overrides`` supplies catalog parameters not given in the reference,
    such as configured Bezout constants.

    Raises:
        SlowdetError: If the file cannot be read or parsed
    """
    text_ref = str(ref)
    if text_ref.startswith(CATALOG_PREFIX):
        name, params = parse_catalog_ref(text_ref)
        for key, value in (overrides or {}).items():
            params.setdefault(key, value)
        logger.debug("catalog curve %s with %s", name, params)
        return catalog_curve(name, **params)

    path = Path(ref)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        msg = f"Cannot read curve spec {path}: {e}"
        raise SlowdetError.invalid_input(msg) from e
    try:
        data = tomllib.loads(text) if path.suffix == ".toml" else json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        msg = f"Malformed curve spec {path}: {e}"
        raise SlowdetError.invalid_input(msg) from e
    return curve_from_json(data)


def dump_curve(curve: CurveSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(curve_to_json(curve), indent=2) + "\n", encoding="utf-8")
