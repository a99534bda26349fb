"""Run reports: one JSON document per run, with CSV and TSV sidecars."""

from __future__ import annotations

import json
import logging
import math
import time
from collections.abc import Iterable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from mpmath import mp

from slowdet.config import RunConfig
from slowdet.error import SlowdetError

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "slowdet.report/1"


@dataclass
class RunReport:
    """Self-describing result of one command.

    Everything except ``timings`` is a function of the curve, T, seed and
    precision, so two runs with timings off produce identical bytes.
    """

    command: str
    curve: str
    config: RunConfig
    T: int | None = None
    status: str = "ok"
    result: dict[str, Any] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "curve": self.curve,
            "T": self.T,
            "status": self.status,
            "config": self.config.to_dict(),
            "result": self.result,
        }
        if self.config.timings:
            data["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_default) + "\n"

    def write(self, path: str | Path | None) -> str:
        """Write the report to ``path`` (stdout when None) and return its text."""
        text = self.to_json()
        if path is None:
            print(text, end="")
        else:
            Path(path).write_text(text, encoding="utf-8")
            logger.info("report written to %s", path)
        return text

    @contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[stage] = time.perf_counter() - start


def _default(value: Any) -> Any:
    if isinstance(value, mp.mpf):
        return mp.nstr(value, 20)
    return str(value)


def check_consistency(certified: int, bound: Any, *, verified: bool) -> None:
    """A verified plan can never hold more certified points than the bound.

    Raises:
        SlowdetError: If the certified count exceeds the bound
    """
    if verified and certified > bound:
        msg = f"{certified} certified points exceed the bound {mp.nstr(bound, 15)}"
        raise SlowdetError.violation(msg, {"certified": certified, "bound": str(bound)})


def order_estimate(count: int, T: Any) -> float | None:
    """log #X / log log T, the finite-order statistic at a single height.

    None when the count is zero or log log T is not positive.
    """
    if count <= 0:
        return None
    loglog = math.log(math.log(float(T))) if float(T) > math.e else 0.0
    if loglog <= 0:
        return None
    return math.log(count) / loglog


@dataclass(frozen=True)
class ReportRow:
    T: int
    certified: int
    candidates: int
    bound: Any
    d: int | None = None

    @property
    def order(self) -> float | None:
        return order_estimate(self.certified, self.T)

    def to_dict(self) -> dict[str, Any]:
        return {
            "T": self.T,
            "certified": self.certified,
            "candidates": self.candidates,
            "bound": None if self.bound is None else mp.nstr(self.bound, 15),
            "d": self.d,
            "order": self.order,
        }


def rows_to_tsv(rows: Iterable[ReportRow]) -> str:
    """Plot-ready table: T, certified, candidates, bound, order estimate."""
    lines = ["T\tcertified\tcandidates\tbound\torder"]
    for row in rows:
        bound = "-" if row.bound is None else mp.nstr(row.bound, 15)
        order = "-" if row.order is None else f"{row.order:.6f}"
        lines.append(f"{row.T}\t{row.certified}\t{row.candidates}\t{bound}\t{order}")
    return "\n".join(lines) + "\n"
