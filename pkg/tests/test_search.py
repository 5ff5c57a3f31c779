import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from conftest import CONSTANT_NAMES, mp_constant
from sqden.cf import convergents
from sqden.realnum import RealSpec, make_real, parse_real_spec
from sqden.search import (
    EULER_GAMMA,
    SearchConfig,
    brute_force_scan,
    ceil_pow,
    convergent_search,
    expected_count,
    full_search,
    merge_approximations,
    round_down,
    round_up,
    verify_approximation,
    Approximation,
)

PI = RealSpec.constant("pi")
RECORD_A = 36266840658555398816245943123914613560
RECORD_B = 3397660065732068041


def naive_hits(name, B, c=1, dps=60):
    """Direct mpmath evaluation of every b, sharing nothing with the package."""
    out = []
    with mpmath.workdps(dps):
        xi = mp_constant(name, dps)
        for b in range(1, B + 1):
            t = xi * b * b
            a = int(mpmath.nint(t))
            if abs(t - a) * b < c:
                out.append((b, a))
    return out


def pairs(items):
    return [(x.b, x.a) for x in items]


# -- brute force ------------------------------------------------------------------

def test_brute_quarter_includes_exact_hit():
    hits = brute_force_scan(parse_real_spec("1/4"), 10)
    hit = next(h for h in hits if h.b == 2)
    assert hit.a == 1 and hit.quality == 0 and hit.source == "brute" and hit.alpha == 0


def test_brute_pi_b1():
    assert pairs(brute_force_scan(PI, 1)) == [(1, 3)]


@pytest.mark.parametrize("name", CONSTANT_NAMES)
def test_brute_matches_naive_oracle(name):
    spec = RealSpec.constant(name)
    assert pairs(brute_force_scan(spec, 5000)) == naive_hits(name, 5000)


def test_brute_pi_1000_frozen():
    hits = pairs(brute_force_scan(PI, 1000))
    assert hits == naive_hits("pi", 1000)
    assert hits[:3] == [(1, 3), (2, 13), (3, 28)]


def test_brute_respects_c():
    loose = set(pairs(brute_force_scan(PI, 3000, Fraction(2))))
    tight = set(pairs(brute_force_scan(PI, 3000, Fraction(1, 2))))
    base = set(pairs(brute_force_scan(PI, 3000)))
    assert tight <= base <= loose
    assert loose == set(naive_hits("pi", 3000, 2))


def test_tie_goes_to_even_numerator():
    # b^2 * 1/8 = 1/2 at b = 2: a = 0 (even), quality exactly 1
    hits = brute_force_scan(parse_real_spec("1/8"), 2, Fraction(2))
    hit = next(h for h in hits if h.b == 2)
    assert hit.a == 0 and hit.quality == 1


def test_brute_rejects_bad_bound():
    with pytest.raises(ValueError):
        brute_force_scan(PI, 0)


# -- verification -----------------------------------------------------------------

def test_verify_pi_three():
    v = verify_approximation(PI, 3, 1)
    assert v.accepted
    assert v.quality_low <= Fraction(1416, 10000) <= v.quality_high + Fraction(1, 10000)
    assert abs(float(v.quality_high) - 0.14159265) < 1e-7


def test_verify_rejects_with_side():
    v = verify_approximation(PI, 31, 3)
    assert not v.accepted
    with mpmath.workdps(40):
        ref = abs(mpmath.pi - mpmath.mpf(31) / 9) * 27  # about 8.177
    with mpmath.workdps(40):
        lo = mpmath.mpf(v.quality_low.numerator) / v.quality_low.denominator
        hi = mpmath.mpf(v.quality_high.numerator) / v.quality_high.denominator
        assert lo <= ref <= hi
    assert abs(float(v.quality_low) - 8.177) < 1e-3
    assert "above" in v.reason
    v = verify_approximation(PI, 27, 3)
    assert not v.accepted and "below" in v.reason


def test_verify_record_pair():
    v = verify_approximation(PI, RECORD_A, RECORD_B)
    assert v.accepted and v.quality_high < 1
    assert 0.64 < float(v.quality_low) <= float(v.quality_high) < 0.66


def test_verify_requires_positive_b():
    with pytest.raises(ValueError):
        verify_approximation(PI, 1, 0)


def test_verify_exact_rational_boundary():
    # |1/4 - 0/1| * 1 = 1/4 is not < 1/4
    assert not verify_approximation(parse_real_spec("1/4"), 0, 1, Fraction(1, 4)).accepted
    assert verify_approximation(parse_real_spec("1/4"), 0, 1, Fraction(1, 3)).accepted


# -- convergent stage -------------------------------------------------------------

def test_convergent_113_work_count():
    conv = convergents([3, 7, 15, 1])[3]
    assert (conv.P, conv.Q) == (355, 113)
    cfg = SearchConfig(B=10**6, brute_cutoff=1)
    hits, stats = convergent_search(PI, conv, cfg)
    assert stats.alpha_bound == 6
    assert stats.congruences_solved == 13
    assert stats.band_high == ceil_pow(113, Fraction(3, 4)) == 35
    for h in hits:
        assert (355 * h.b * h.b - h.alpha) % 113 == 0
        assert h.a * 113 == 355 * h.b * h.b - h.alpha
        assert 1 < h.b <= 35


def test_convergent_rejects_unreduced():
    from sqden.cf import Convergent
    with pytest.raises(ValueError):
        convergent_search(PI, Convergent(0, 6, 4, Fraction(1)), SearchConfig(B=100))


# -- full search ------------------------------------------------------------------

@pytest.mark.parametrize("name", CONSTANT_NAMES)
def test_full_search_equals_brute(name):
    spec = RealSpec.constant(name)
    report = full_search(spec, SearchConfig(B=200_000))
    assert pairs(report.approximations) == pairs(brute_force_scan(spec, 200_000))
    assert report.totals["complete"]


@settings(max_examples=8, deadline=None)
@given(st.integers(500, 5000), st.sampled_from(CONSTANT_NAMES))
def test_full_search_any_cutoff(cutoff, name):
    spec = RealSpec.constant(name)
    report = full_search(spec, SearchConfig(B=30_000, brute_cutoff=cutoff))
    assert pairs(report.approximations) == pairs(brute_force_scan(spec, 30_000))


def test_tiny_cutoff_needs_brute_prefix():
    # the congruence stage is asymptotic; very small b are left to brute force
    report = full_search(PI, SearchConfig(B=30_000, brute_cutoff=1))
    found = set(pairs(report.approximations))
    oracle = set(pairs(brute_force_scan(PI, 30_000)))
    assert found <= oracle
    assert {b for b, _ in oracle - found} <= set(range(2, 300))


def test_report_invariants():
    cfg = SearchConfig(B=10**6)
    report = full_search(PI, cfg)
    bs = [a.b for a in report.approximations]
    assert bs == sorted(set(bs))
    for s in report.convergents:
        assert s.congruences_solved == 2 * ceil_pow(s.Q, cfg.alpha_exponent) + 1
        assert s.congruences_solved == 2 * s.alpha_bound + 1
    # band coverage: every b in (cutoff, B] lies under some processed band
    assert max(s.band_high for s in report.convergents) >= cfg.B
    # the scan stops at the first convergent past both stopping bounds
    def past(Q):
        return ceil_pow(Q, cfg.b_exponent) >= cfg.B and ceil_pow(Q, 1 - cfg.alpha_exponent) >= cfg.B
    qs = [s.Q for s in report.convergents]
    assert past(qs[-1]) and not any(past(q) for q in qs[:-1])
    assert report.totals["hits"] == len(bs)
    assert report.totals["brute_hits"] + report.totals["convergent_hits"] == len(bs)
    for a in report.approximations:
        assert a.quality < 1
        assert a.reduced == (math.gcd(a.a, a.b * a.b) == 1)
        if a.source == "convergent":
            assert a.b > cfg.brute_cutoff
            assert (a.P * a.b * a.b - a.alpha) % a.Q == 0
            assert a.a * a.Q == a.P * a.b * a.b - a.alpha
        else:
            assert a.b <= cfg.brute_cutoff


def test_every_hit_reverifies():
    real = make_real(PI, 80)
    for a in full_search(PI, SearchConfig(B=10**5)).approximations:
        v = verify_approximation(PI, a.a, a.b, real=real)
        assert v.accepted and v.quality_high <= a.quality


def test_rational_search_flags_incomplete():
    report = full_search(parse_real_spec("355/113"), SearchConfig(B=5000))
    assert not report.totals["complete"]
    assert all(a.b <= 1000 for a in report.approximations)
    exact = [a for a in report.approximations if a.quality == 0]
    assert [a.b for a in exact] == [113, 226, 339, 452, 565, 678, 791, 904]


def test_thread_count_does_not_change_output():
    one = full_search(PI, SearchConfig(B=10**5, workers=1))
    two = full_search(PI, SearchConfig(B=10**5, workers=2))
    assert one.approximations == two.approximations
    assert one.convergents == two.convergents
    assert brute_force_scan(PI, 20000, workers=3) == brute_force_scan(PI, 20000)


def test_expected_curve_points():
    report = full_search(PI, SearchConfig(B=10**4))
    bs = [b for b, _ in report.expected_curve]
    assert bs == sorted(bs) and bs[-1] == 10**4
    values = [v for _, v in report.expected_curve]
    assert values == sorted(values)


# -- helpers and config -----------------------------------------------------------

def test_expected_count_examples():
    assert expected_count(1, Fraction(3)) == 6 * EULER_GAMMA
    assert abs(float(expected_count(10**6)) - 28.7862) < 1e-3
    vals = [expected_count(b) for b in (1, 2, 10, 1000, 10**9)]
    assert vals == sorted(vals)
    with pytest.raises(ValueError):
        expected_count(0)


def test_euler_constant_matches_oracle():
    with mpmath.workdps(50):
        assert abs(mpmath.mpf(EULER_GAMMA.numerator) / EULER_GAMMA.denominator - mpmath.euler) < mpmath.mpf(10) ** -39


@given(st.integers(0, 5000), st.sampled_from([Fraction(1, 3), Fraction(7, 20), Fraction(3, 4), Fraction(2, 3), Fraction(1, 2)]))
def test_ceil_pow_matches_definition(n, e):
    m = ceil_pow(n, e)
    target = Fraction(n) ** e.numerator
    assert m ** e.denominator >= target
    assert m == 0 or (m - 1) ** e.denominator < target


@given(st.fractions(min_value=Fraction(1, 10**30), max_value=Fraction(10**30)))
def test_rounding_brackets(x):
    assert round_down(x) <= x <= round_up(x)
    assert round_up(x) - round_down(x) <= x * Fraction(1, 10**18)


@pytest.mark.parametrize("kwargs", [
    dict(B=0), dict(B=10, c=0), dict(B=10, alpha_exponent=Fraction(1, 4)),
    dict(B=10, b_exponent=Fraction(1, 2)), dict(B=10, b_exponent=1),
    dict(B=10, brute_cutoff=11), dict(B=10, workers=0),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)


def test_config_accepts_floats():
    cfg = SearchConfig(B=1000, c=1.5, alpha_exponent=0.35)
    assert cfg.c == Fraction(3, 2) and cfg.alpha_exponent == Fraction(7, 20)


def test_merge_keeps_smallest_quality():
    x = Approximation(5, 1, 0, "brute", Fraction(1, 2), True)
    y = Approximation(5, 2, 1, "convergent", Fraction(1, 4), True)
    z = Approximation(3, 1, 0, "brute", Fraction(1, 3), True)
    assert merge_approximations([[x, z], [y]]) == [z, y]
