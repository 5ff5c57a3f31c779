"""Approximations a/p with p prime, via linear congruences on convergents.

For a convergent P/Q the solutions of P*x = alpha (mod Q) give
|xi - a/x| <= |xi - P/Q| + |alpha|/(x*Q) with a = (P*x - alpha)/Q, so a
prime x reached with a small |alpha| is a good prime-denominator
approximation.  Quality is measured as |xi - a/p| * p**2 / ln p.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from .cf import DEFAULT_MAX_DIGITS, Convergent, iter_convergents, iter_partial_quotients
from .modular import is_probable_prime, solve_linear_congruence
from .realnum import PrecisionReal, RealSpec, escalate, ln_interval, make_real
from .search import round_up

DEFAULT_ALPHA_FACTOR = 8


@dataclass(frozen=True)
class PrimeApproximation:
    p: int
    a: int
    alpha: int
    P: int
    Q: int
    conv_index: int
    quality: Fraction  # certified upper bound on |xi - a/p| * p**2 / ln p
    alpha_over_lnQ: Optional[float]
    step: int  # j in p = x + j*Q; j > 0 means p lies beyond [0, Q)


@dataclass
class ConjectureSummary:
    convergents_scanned: int
    hits: int
    max_alpha_over_lnQ: Optional[float]
    mean_alpha_over_lnQ: Optional[float]
    quality_min: Optional[float]
    quality_median: Optional[float]
    quality_max: Optional[float]
    misses: list[int] = field(default_factory=list)  # convergent indices without a hit


@dataclass
class PrimeScan:
    hits: list[PrimeApproximation]
    summary: ConjectureSummary

    def __iter__(self):
        return iter((self.hits, self.summary))


def alpha_order() -> Iterator[int]:
    """0, 1, -1, 2, -2, ..."""
    yield 0
    k = 1
    while True:
        yield k
        yield -k
        k += 1


def _quality(spec: RealSpec, real: PrecisionReal, a: int, p: int,
             max_digits: int) -> tuple[Fraction, PrecisionReal]:
    """Upper bound on |xi - a/p| * p**2 / ln p, tightened until it is finite and sharp."""
    ln_p = ln_interval(p, max(real.digits, 30))
    while True:
        dist = abs(real * p - a)
        # |xi*p - a| * p is the numerator; the interval radius must not dominate
        if dist.upper == 0 or dist.radius * 1000 <= dist.upper:
            return round_up(dist.upper * p / ln_p.lower), real
        real = escalate(spec, real, max_digits)


def prime_denominator_search(spec: RealSpec, conv: Convergent, alpha_max: int, *,
                             real: PrecisionReal | None = None,
                             max_digits: int = DEFAULT_MAX_DIGITS) -> PrimeApproximation | None:
    """First prime solution of P*x = alpha (mod Q) in canonical alpha order.

    For each alpha the progression x, x + Q, x + 2Q, ... is scanned up to Q**2
    so the prime found is of the order of Q rather than a tiny residue.
    """
    P, Q = conv.P, conv.Q
    if math.gcd(P, Q) != 1:
        raise ValueError(f"convergent {P}/{Q} is not reduced")
    if real is None:
        real = make_real(spec, 2 * len(str(Q)) + 30)
    limit = Q * Q
    for alpha in alpha_order():
        if abs(alpha) > alpha_max:
            return None
        x = solve_linear_congruence(P, alpha, Q).x
        g = math.gcd(x, Q)
        if g > 1:
            # g divides every term, so g itself is the only possible prime
            steps = [(g - x) // Q] if g >= x and (g - x) % Q == 0 else []
        else:
            steps = range((limit - x) // Q + 1)
        for j in steps:
            p = x + j * Q
            if not is_probable_prime(p):
                continue
            a, rem = divmod(P * p - alpha, Q)
            if rem:
                raise AssertionError(f"{P}*{p} is not {alpha} mod {Q}")
            quality, real = _quality(spec, real, a, p, max_digits)
            ratio = abs(alpha) / math.log(Q) if Q > 1 else None
            return PrimeApproximation(p, a, alpha, P, Q, conv.index, quality, ratio, j)
    return None


def conjecture_scan(spec: RealSpec, num_convergents: int,
                    alpha_max_factor=DEFAULT_ALPHA_FACTOR, *,
                    max_digits: int = DEFAULT_MAX_DIGITS) -> PrimeScan:
    """Run the prime search on the first ``num_convergents`` convergents.

    alpha_max is ceil(alpha_max_factor * ln Q) per convergent.  A rational xi
    simply runs out of convergents early.
    """
    if num_convergents < 1:
        raise ValueError("num_convergents must be >= 1")
    factor = Fraction(alpha_max_factor)
    real = make_real(spec, 60)
    hits: list[PrimeApproximation] = []
    misses: list[int] = []
    scanned = 0
    for conv in iter_convergents(iter_partial_quotients(spec, real, max_digits)):
        if scanned == num_convergents:
            break
        scanned += 1
        alpha_max = math.ceil(factor * ln_interval(conv.Q, 30).upper) if conv.Q > 1 else 0
        digits = max(real.digits, 2 * len(str(conv.Q)) + 30)
        if digits > real.digits:
            real = make_real(spec, digits)
        hit = prime_denominator_search(spec, conv, alpha_max, real=real, max_digits=max_digits)
        if hit is None:
            misses.append(conv.index)
        else:
            hits.append(hit)
    ratios = [h.alpha_over_lnQ for h in hits if h.alpha_over_lnQ is not None]
    qualities = [float(h.quality) for h in hits]
    summary = ConjectureSummary(
        convergents_scanned=scanned,
        hits=len(hits),
        max_alpha_over_lnQ=max(ratios) if ratios else None,
        mean_alpha_over_lnQ=statistics.fmean(ratios) if ratios else None,
        quality_min=min(qualities) if qualities else None,
        quality_median=statistics.median(qualities) if qualities else None,
        quality_max=max(qualities) if qualities else None,
        misses=misses,
    )
    return PrimeScan(hits, summary)
