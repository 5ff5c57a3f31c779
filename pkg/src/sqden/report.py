"""Figure data and CSV/JSON output for search and prime-scan results."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import singledispatch
from pathlib import Path
from typing import Optional, Union

from .primes import ConjectureSummary, PrimeApproximation, PrimeScan
from .search import (
    Approximation,
    ConvergentStats,
    SearchConfig,
    SearchReport,
    expected_count,
)

SEARCH_COLUMNS = ("b", "a", "alpha", "source", "Q", "quality", "reduced")
PRIME_COLUMNS = ("Q", "P", "alpha", "p", "a", "quality", "alpha_over_lnQ")
FIGURE_COLUMNS = ("b", "count", "curve_simple", "curve_full")


@dataclass(frozen=True)
class FigurePoint:
    b: int
    count: int
    curve_simple: float  # 1 + 2 ln b
    curve_full: float  # 2c(gamma + ln b)


@dataclass
class FigureSeries:
    B: int
    c: Fraction
    points: list[FigurePoint]


def _point(b: int, count: int, c: Fraction) -> FigurePoint:
    return FigurePoint(b, count, 1 + 2 * math.log(b), float(expected_count(b, c)))


def build_figure_series(report: SearchReport, cfg: SearchConfig) -> FigureSeries:
    """Cumulative hit count against both expectation curves.

    One point per approximation plus endpoints at b = 1 and b = B.
    """
    bs = [a.b for a in report.approximations]
    if bs != sorted(bs):
        raise ValueError("report approximations must be sorted by b")
    points = []
    if not bs or bs[0] != 1:
        points.append(_point(1, 0, cfg.c))
    for i, b in enumerate(bs, 1):
        points.append(_point(b, i, cfg.c))
    if points[-1].b != cfg.B:
        points.append(_point(cfg.B, len(bs), cfg.c))
    return FigureSeries(cfg.B, cfg.c, points)


# -- scalar formatting -------------------------------------------------------------

def format_fraction(x: Fraction) -> str:
    """Exact decimal when the expansion terminates, else ``p/q``."""
    den = x.denominator
    k2 = k5 = 0
    while den % 2 == 0:
        den //= 2
        k2 += 1
    while den % 5 == 0:
        den //= 5
        k5 += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    with localcontext() as ctx:
        ctx.prec = len(str(abs(x.numerator))) + max(k2, k5) + 5
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return format(d.normalize(), "f") if d else "0"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


# -- dict round trips --------------------------------------------------------------

def approximation_from_dict(d: dict) -> Approximation:
    return Approximation(
        b=d["b"], a=d["a"], alpha=d["alpha"], source=d["source"],
        quality=parse_fraction(d["quality"]), reduced=d["reduced"],
        conv_index=d.get("conv_index"), P=d.get("P"), Q=d.get("Q"),
    )


def report_to_dict(report: SearchReport) -> dict:
    return _jsonable(report)


def report_from_dict(d: dict) -> SearchReport:
    return SearchReport(
        xi=d["xi"],
        config=dict(d["config"]),
        approximations=[approximation_from_dict(a) for a in d["approximations"]],
        convergents=[ConvergentStats(**s) for s in d["convergents"]],
        expected_curve=[(int(b), float(v)) for b, v in d["expected_curve"]],
        totals=dict(d["totals"]),
    )


def series_to_dict(series: FigureSeries) -> dict:
    return _jsonable(series)


def series_from_dict(d: dict) -> FigureSeries:
    return FigureSeries(int(d["B"]), parse_fraction(d["c"]), [FigurePoint(**p) for p in d["points"]])


def prime_from_dict(d: dict) -> PrimeApproximation:
    d = dict(d)
    d["quality"] = parse_fraction(d["quality"])
    return PrimeApproximation(**d)


def prime_scan_from_dict(d: dict) -> PrimeScan:
    return PrimeScan([prime_from_dict(h) for h in d["hits"]], ConjectureSummary(**d["summary"]))


# -- renderers ---------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _ratio(value: Optional[float]) -> str:
    return "" if value is None else repr(value)


def _search_rows(items):
    for a in items:
        yield (a.b, a.a, a.alpha, a.source, "" if a.Q is None else a.Q,
               format_fraction(a.quality), "true" if a.reduced else "false")


@singledispatch
def to_csv(obj) -> str:
    if isinstance(obj, list) and all(isinstance(a, Approximation) for a in obj):
        return _csv(SEARCH_COLUMNS, _search_rows(obj))
    raise TypeError(f"no CSV layout for {type(obj).__name__}")


@to_csv.register
def _(obj: SearchReport) -> str:
    return _csv(SEARCH_COLUMNS, _search_rows(obj.approximations))


@to_csv.register
def _(obj: FigureSeries) -> str:
    return _csv(FIGURE_COLUMNS, ((p.b, p.count, repr(p.curve_simple), repr(p.curve_full)) for p in obj.points))


@to_csv.register
def _(obj: PrimeScan) -> str:
    rows = ((h.Q, h.P, h.alpha, h.p, h.a, format_fraction(h.quality), _ratio(h.alpha_over_lnQ))
            for h in obj.hits)
    return _csv(PRIME_COLUMNS, rows)


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


Destination = Union[str, Path, None]


def emit(obj, fmt: str = "csv", destination: Destination = None) -> None:
    """Write ``obj`` as CSV or JSON to a path, or to standard output when None."""
    if fmt == "csv":
        text = to_csv(obj)
    elif fmt == "json":
        text = to_json(obj)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(destination)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as err:
        raise OSError(f"cannot write {path}: {err.strerror or err}") from err
