import csv
import io
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sqden.primes import conjecture_scan
from sqden.realnum import RealSpec, parse_real_spec
from sqden.report import (
    FIGURE_COLUMNS,
    PRIME_COLUMNS,
    SEARCH_COLUMNS,
    FigureSeries,
    build_figure_series,
    emit,
    format_fraction,
    parse_fraction,
    prime_scan_from_dict,
    report_from_dict,
    report_to_dict,
    series_from_dict,
    series_to_dict,
    to_csv,
    to_json,
)
from sqden.search import EULER_GAMMA, SearchConfig, SearchReport, brute_force_scan, full_search

PI = RealSpec.constant("pi")


@pytest.fixture(scope="module")
def pi_run():
    cfg = SearchConfig(B=10**5)
    return full_search(PI, cfg), cfg


def empty_report(B):
    return SearchReport("x", {}, [], [], [], {})


def test_empty_report_gives_two_endpoints():
    series = build_figure_series(empty_report(10), SearchConfig(B=10, brute_cutoff=10))
    assert [(p.b, p.count) for p in series.points] == [(1, 0), (10, 0)]
    assert series.points[0].curve_simple == 1
    assert math.isclose(series.points[0].curve_full, 2 * float(EULER_GAMMA))


def test_series_monotone(pi_run):
    report, cfg = pi_run
    pts = build_figure_series(report, cfg).points
    assert [p.b for p in pts] == sorted(p.b for p in pts)
    assert all(x.count <= y.count for x, y in zip(pts, pts[1:]))
    assert pts[0].b == 1 and pts[-1].b == cfg.B
    assert pts[-1].count == len(report.approximations)
    for p in pts:
        assert math.isclose(p.curve_simple, 1 + 2 * math.log(p.b))
        assert math.isclose(p.curve_full, 2 * (float(EULER_GAMMA) + math.log(p.b)))


def test_series_rejects_unsorted(pi_run):
    report, cfg = pi_run
    shuffled = SearchReport(report.xi, report.config, report.approximations[::-1], [], [], {})
    with pytest.raises(ValueError):
        build_figure_series(shuffled, cfg)


def test_empty_csv_is_header_only():
    assert to_csv([]) == ",".join(SEARCH_COLUMNS) + "\n"
    assert to_csv(FigureSeries(1, Fraction(1), [])) == ",".join(FIGURE_COLUMNS) + "\n"


def test_csv_rows_and_columns(pi_run):
    report, cfg = pi_run
    text = to_csv(report)
    assert text.endswith("\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(SEARCH_COLUMNS)
    assert len(rows) == len(report.approximations) + 1
    for row, a in zip(rows[1:], report.approximations):
        assert int(row[0]) == a.b and int(row[1]) == a.a and int(row[2]) == a.alpha
        assert row[3] == a.source
        assert parse_fraction(row[5]) == a.quality
        assert row[6] in ("true", "false")
    series = build_figure_series(report, cfg)
    rows = list(csv.reader(io.StringIO(to_csv(series))))
    assert rows[0] == list(FIGURE_COLUMNS) and len(rows) == len(series.points) + 1


def test_prime_csv_columns():
    scan = conjecture_scan(PI, 6)
    rows = list(csv.reader(io.StringIO(to_csv(scan))))
    assert rows[0] == list(PRIME_COLUMNS)
    assert len(rows) == len(scan.hits) + 1


def test_csv_is_deterministic():
    a = full_search(PI, SearchConfig(B=20000, workers=1))
    b = full_search(PI, SearchConfig(B=20000, workers=2))
    assert to_csv(a) == to_csv(b)
    assert to_json(a) == to_json(b)


def test_report_json_round_trip(pi_run):
    report, _ = pi_run
    assert report_from_dict(json.loads(to_json(report))) == report
    assert report_from_dict(report_to_dict(report)) == report


def test_series_json_round_trip(pi_run):
    report, cfg = pi_run
    series = build_figure_series(report, cfg)
    assert series_from_dict(json.loads(to_json(series))) == series
    assert series_from_dict(series_to_dict(series)) == series


def test_prime_scan_json_round_trip():
    scan = conjecture_scan(PI, 8)
    assert prime_scan_from_dict(json.loads(to_json(scan))) == scan


def test_rational_report_round_trip():
    report = full_search(parse_real_spec("1/8"), SearchConfig(B=50, brute_cutoff=50, c=2))
    assert report_from_dict(json.loads(to_json(report))) == report


@given(st.fractions())
def test_format_fraction_round_trip(x):
    assert parse_fraction(format_fraction(x)) == x


@pytest.mark.parametrize("x, text", [
    (Fraction(0), "0"), (Fraction(1, 4), "0.25"), (Fraction(-5, 2), "-2.5"),
    (Fraction(1, 3), "1/3"), (Fraction(10**30, 1), str(10**30)), (Fraction(1, 10**25), "0." + "0" * 24 + "1"),
])
def test_format_fraction_examples(x, text):
    assert format_fraction(x) == text


def test_emit_to_file_and_stdout(tmp_path, capsys, pi_run):
    report, _ = pi_run
    path = tmp_path / "out.csv"
    emit(report, "csv", path)
    assert path.read_text(encoding="utf-8") == to_csv(report)
    emit(report, "json", str(tmp_path / "out.json"))
    assert report_from_dict(json.loads((tmp_path / "out.json").read_text())) == report
    emit(report.approximations, "csv", "-")
    assert capsys.readouterr().out == to_csv(report)


def test_emit_errors(tmp_path):
    hits = brute_force_scan(PI, 10)
    bad = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="missing"):
        emit(hits, "csv", bad)
    with pytest.raises(ValueError):
        emit(hits, "xml", None)
    with pytest.raises(TypeError):
        to_csv(42)
