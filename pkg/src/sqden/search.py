"""Search for approximations a/b**2 of xi with |xi - a/b**2| < c/b**3.

Small denominators are scanned directly.  Beyond ``brute_cutoff`` each
convergent P/Q of xi is used to solve P*b**2 = alpha (mod Q) for all small
|alpha|; every root b in the band is a candidate with a = (P*b**2 - alpha)/Q,
and each candidate is certified against xi itself.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .cf import DEFAULT_MAX_DIGITS, Convergent, iter_convergents, iter_partial_quotients
from .modular import (
    DEFAULT_RHO_BUDGET,
    DEFAULT_ROOT_CAP,
    FactorizationError,
    factorize,
    solve_quadratic_congruence,
)
from .realnum import (
    Comparison,
    PrecisionReal,
    RealSpec,
    certified_compare,
    default_digits,
    escalate,
    ln_interval,
    make_real,
)

# Euler's constant to 40 places; only feeds the expectation heuristics
EULER_GAMMA = Fraction("0.5772156649015328606065120900824024310422")

QUALITY_DIGITS = 20


def _iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def ceil_pow(n: int, exponent: Fraction) -> int:
    """ceil(n ** exponent) for a rational exponent, in exact integer arithmetic."""
    target = n**exponent.numerator
    m = _iroot(target, exponent.denominator)
    if m**exponent.denominator < target:
        m += 1
    return m


def round_up(x: Fraction, digits: int = QUALITY_DIGITS) -> Fraction:
    """Round a non-negative rational up to ``digits`` significant decimals."""
    if x == 0:
        return x
    exp = math.floor(math.log10(x.numerator) - math.log10(x.denominator)) - digits + 1
    scale = Fraction(10) ** -exp
    return Fraction(math.ceil(x * scale)) / scale


def round_down(x: Fraction, digits: int = QUALITY_DIGITS) -> Fraction:
    if x <= 0:
        return Fraction(0)
    exp = math.floor(math.log10(x.numerator) - math.log10(x.denominator)) - digits + 1
    scale = Fraction(10) ** -exp
    return Fraction(math.floor(x * scale)) / scale


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class SearchConfig:
    B: int
    c: Fraction = Fraction(1)
    alpha_exponent: Fraction = Fraction(7, 20)
    b_exponent: Fraction = Fraction(3, 4)
    brute_cutoff: int = 1000
    root_cap: int = DEFAULT_ROOT_CAP
    digits: Optional[int] = None
    max_digits: int = DEFAULT_MAX_DIGITS
    rho_budget: int = DEFAULT_RHO_BUDGET
    workers: int = 1

    def __post_init__(self):
        for name in ("c", "alpha_exponent", "b_exponent"):
            object.__setattr__(self, name, _as_fraction(getattr(self, name)))
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not Fraction(1, 3) <= self.alpha_exponent < 1:
            raise ValueError("alpha_exponent must lie in [1/3, 1)")
        if not Fraction(2, 3) <= self.b_exponent < 1:
            raise ValueError("b_exponent must lie in [2/3, 1)")
        if not 1 <= self.brute_cutoff <= self.B:
            raise ValueError("brute_cutoff must lie in [1, B]")
        if self.root_cap < 1 or self.workers < 1:
            raise ValueError("root_cap and workers must be positive")

    @property
    def working_digits(self) -> int:
        return self.digits or default_digits(self.B)


@dataclass(frozen=True)
class Approximation:
    b: int
    a: int
    alpha: int
    source: str  # "brute" or "convergent"
    quality: Fraction  # certified upper bound on |xi - a/b**2| * b**3
    reduced: bool
    conv_index: Optional[int] = None
    P: Optional[int] = None
    Q: Optional[int] = None

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.b * self.b)


@dataclass
class ConvergentStats:
    index: int
    P: int
    Q: int
    alpha_bound: int
    band_low: int  # exclusive
    band_high: int  # inclusive
    congruences_solved: int = 0
    roots_in_band: int = 0
    candidates_rejected: int = 0
    hits: int = 0
    truncated: bool = False
    skipped: Optional[str] = None

    @property
    def complete(self) -> bool:
        return self.skipped is None and not self.truncated


@dataclass
class SearchReport:
    xi: str
    config: dict
    approximations: list[Approximation]
    convergents: list[ConvergentStats]
    expected_curve: list[tuple[int, float]]
    totals: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Verification:
    accepted: bool
    a: int
    b: int
    quality_low: Fraction
    quality_high: Fraction
    digits: int
    reason: str = ""


# -- certification -------------------------------------------------------------

def _nearest(n: int, D: int) -> int:
    a, r = divmod(2 * n + D, 2 * D)
    if r == 0 and a & 1:
        # exact tie at a half-integer: prefer the even neighbour
        a -= 1
    return a


def _certify_b(spec: RealSpec, real: PrecisionReal, b: int, c: Fraction,
               max_digits: int) -> tuple[int, Fraction] | None:
    """Decide whether the nearest a to b**2*xi gives quality < c.

    Returns (a, quality upper bound) on acceptance, None on rejection;
    escalates precision until both the nearest integer and the comparison
    are certain.
    """
    b2 = b * b
    while True:
        X, D, E = real.fixed()
        n = b2 * X
        err = b2 * E
        a = _nearest(n, D)
        dist = abs(n - a * D)
        if Fraction(max(dist - err, 0) * b, D) >= c:
            return None
        if E == 0 or 2 * (dist + err) < D:
            hi = Fraction((dist + err) * b, D)
            if hi < c:
                return a, round_up(hi)
        real = escalate(spec, real, max_digits)


def _scan_range(spec: RealSpec, real: PrecisionReal, start: int, stop: int,
                c: Fraction, max_digits: int) -> list[Approximation]:
    X, D, E = real.fixed()
    cn, cd = c.numerator, c.denominator
    two_d = 2 * D
    limit = cn * D
    out = []
    for b in range(start, stop):
        b2 = b * b
        n = b2 * X
        a = (2 * n + D) // two_d
        # cheap certified reject covers nearly every b
        if (abs(n - a * D) - b2 * E) * b * cd >= limit:
            continue
        hit = _certify_b(spec, real, b, c, max_digits)
        if hit is not None:
            a, q = hit
            out.append(Approximation(b, a, 0, "brute", q, math.gcd(a, b2) == 1))
    return out


def _parallel_map(fn: Callable, jobs: Sequence[tuple], workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        return [f.result() for f in futures]


def brute_force_scan(spec: RealSpec, B: int, c=1, *, real: PrecisionReal | None = None,
                     workers: int = 1, max_digits: int = DEFAULT_MAX_DIGITS) -> list[Approximation]:
    """Every b <= B whose nearest numerator a gives |xi - a/b**2| < c/b**3."""
    if B < 1:
        raise ValueError("B must be >= 1")
    c = _as_fraction(c)
    if real is None:
        real = make_real(spec, default_digits(B))
    chunks = max(1, workers * 4) if workers > 1 else 1
    step = -(-B // chunks)
    jobs = [(spec, real, lo, min(lo + step, B + 1), c, max_digits)
            for lo in range(1, B + 1, step)]
    out: list[Approximation] = []
    for part in _parallel_map(_scan_range, jobs, workers):
        out.extend(part)
    return out


def verify_approximation(spec: RealSpec, a: int, b: int, c=1, *,
                         real: PrecisionReal | None = None,
                         max_digits: int = DEFAULT_MAX_DIGITS) -> Verification:
    """Certify |xi - a/b**2| * b**3 against c, refining until decidable."""
    if b < 1:
        raise ValueError("b must be >= 1")
    c = _as_fraction(c)
    if real is None:
        real = make_real(spec, default_digits(b))
    b2 = b * b
    while True:
        q = abs(real * b2 - a) * b
        verdict = certified_compare(q, c)
        if verdict is not Comparison.UNDECIDABLE:
            break
        real = escalate(spec, real, max_digits)
    lo, hi = round_down(q.lower), round_up(q.upper)
    if verdict is Comparison.BELOW:
        return Verification(True, a, b, lo, hi, real.digits)
    side = "above" if Fraction(a, b2) > real.center else "below"
    reason = f"quality >= {c} (a/b^2 lies {side} xi, quality at least {float(q.lower):.6g})"
    return Verification(False, a, b, lo, hi, real.digits, reason)


# -- convergent stage ----------------------------------------------------------

def convergent_search(spec: RealSpec, conv: Convergent, cfg: SearchConfig, *,
                      real: PrecisionReal | None = None) -> tuple[list[Approximation], ConvergentStats]:
    """Candidates from one convergent, certified against xi."""
    P, Q = conv.P, conv.Q
    if math.gcd(P, Q) != 1:
        raise ValueError(f"convergent {P}/{Q} is not reduced")
    if real is None:
        real = make_real(spec, cfg.working_digits)
    m = ceil_pow(Q, cfg.alpha_exponent)
    high = min(ceil_pow(Q, cfg.b_exponent), cfg.B)
    stats = ConvergentStats(conv.index, P, Q, m, cfg.brute_cutoff, high)
    try:
        Qf = factorize(Q, cfg.rho_budget)
    except FactorizationError as err:
        stats.skipped = str(err)
        return [], stats
    found: dict[int, Approximation] = {}
    for alpha in range(-m, m + 1):
        roots = solve_quadratic_congruence(P, alpha, Qf, cfg.root_cap, limit=high)
        stats.congruences_solved += 1
        stats.truncated |= roots.truncated
        for b in roots:
            if b <= cfg.brute_cutoff:
                continue
            stats.roots_in_band += 1
            num = P * b * b - alpha
            a, rem = divmod(num, Q)
            if rem:
                raise AssertionError(f"root {b} does not satisfy P*b^2 = {alpha} mod {Q}")
            hit = _certify_b(spec, real, b, cfg.c, cfg.max_digits)
            if hit is None or hit[0] != a:
                stats.candidates_rejected += 1
                continue
            if b in found:
                continue
            found[b] = Approximation(b, a, alpha, "convergent", hit[1],
                                     math.gcd(a, b * b) == 1, conv.index, P, Q)
    stats.hits = len(found)
    return sorted(found.values(), key=lambda x: x.b), stats


def expected_count(B: int, c=1, digits: int = 30) -> Fraction:
    """Heuristic hit count 2c(gamma + ln B) for denominators up to B."""
    if B < 1:
        raise ValueError("B must be >= 1")
    c = _as_fraction(c)
    return 2 * c * (EULER_GAMMA + ln_interval(B, digits).center)


def search_convergents(spec: RealSpec, real: PrecisionReal, cfg: SearchConfig) -> Iterable[Convergent]:
    """Convergents in order, through the first one past both stopping bounds.

    A hit b with quality q < c has |alpha| = Q*q/b + O(b**2/Q'), so it shows
    up in the alpha window of convergents with Q**(1 - alpha_exponent) of the
    order of c*b.  The scan therefore runs until Q**(1 - alpha_exponent)
    reaches c*B, and at least until the b band reaches B.
    """
    reach = cfg.c * cfg.B
    tail = 1 - cfg.alpha_exponent
    for conv in iter_convergents(iter_partial_quotients(spec, real, cfg.max_digits)):
        yield conv
        if ceil_pow(conv.Q, cfg.b_exponent) >= cfg.B and ceil_pow(conv.Q, tail) >= reach:
            return


def merge_approximations(groups: Iterable[Iterable[Approximation]]) -> list[Approximation]:
    """Deduplicate by b keeping the witness closest to xi; sort by (b, a)."""
    best: dict[int, Approximation] = {}
    for group in groups:
        for item in group:
            cur = best.get(item.b)
            if cur is None or item.quality < cur.quality:
                best[item.b] = item
    return sorted(best.values(), key=lambda x: (x.b, x.a))


def full_search(spec: RealSpec, cfg: SearchConfig) -> SearchReport:
    real = make_real(spec, cfg.working_digits)
    brute = brute_force_scan(spec, cfg.brute_cutoff, cfg.c, real=real,
                             workers=cfg.workers, max_digits=cfg.max_digits)
    convs = list(search_convergents(spec, real, cfg))
    jobs = [(spec, conv, cfg, real) for conv in convs]
    results = _parallel_map(_convergent_job, jobs, cfg.workers)
    stats = [s for _, s in results]
    approximations = merge_approximations([brute] + [hits for hits, _ in results])

    covered = cfg.brute_cutoff
    for s in stats:
        if s.complete:
            covered = max(covered, s.band_high)
    curve_points = sorted({a.b for a in approximations} | {cfg.B})
    expected_curve = [(b, float(expected_count(b, cfg.c))) for b in curve_points]
    totals = {
        "hits": len(approximations),
        "brute_hits": sum(a.source == "brute" for a in approximations),
        "convergent_hits": sum(a.source == "convergent" for a in approximations),
        "reduced_hits": sum(a.reduced for a in approximations),
        "convergents_processed": len(stats),
        "congruences_solved": sum(s.congruences_solved for s in stats),
        "max_Q": max((s.Q for s in stats), default=0),
        "covered_up_to": covered,
        "complete": covered >= cfg.B,
        "expected_at_B": float(expected_count(cfg.B, cfg.c)),
    }
    return SearchReport(str(spec), config_dict(cfg), approximations, stats, expected_curve, totals)


def _convergent_job(spec, conv, cfg, real):
    return convergent_search(spec, conv, cfg, real=real)


def config_dict(cfg: SearchConfig) -> dict:
    return {
        "B": cfg.B,
        "c": str(cfg.c),
        "alpha_exponent": str(cfg.alpha_exponent),
        "b_exponent": str(cfg.b_exponent),
        "brute_cutoff": cfg.brute_cutoff,
        "root_cap": cfg.root_cap,
        "digits": cfg.working_digits,
        "max_digits": cfg.max_digits,
        "rho_budget": cfg.rho_budget,
    }
