"""Certified continued-fraction expansion and convergents."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .realnum import PrecisionError, PrecisionReal, RealSpec, escalate

DEFAULT_MAX_DIGITS = 20000


@dataclass(frozen=True)
class Convergent:
    index: int
    P: int
    Q: int
    residual_bound: Fraction

    @property
    def value(self) -> Fraction:
        return Fraction(self.P, self.Q)


@dataclass(frozen=True)
class Quotients:
    """Partial quotients plus whether the expansion ended (xi is rational)."""

    terms: list[int]
    terminated: bool

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]


def _interval_quotients(lo: Fraction, hi: Fraction) -> Iterator[int | None]:
    """Yield the quotients shared by every real in ``[lo, hi]``.

    The reals sharing a prefix of partial quotients form an interval, so a
    term common to both endpoints is common to everything between them.
    Yields ``None`` when the expansion of an exact point has terminated.
    """
    p1, q1 = lo.numerator, lo.denominator
    p2, q2 = hi.numerator, hi.denominator
    exact = lo == hi
    while True:
        a1, r1 = divmod(p1, q1)
        a2, r2 = divmod(p2, q2)
        if a1 != a2:
            return
        if exact:
            if r1 == 0:
                # canonical form: last term >= 2 unless it is the only term
                yield a1
                yield None
                return
            yield a1
        else:
            if r1 == 0 or r2 == 0:
                return
            yield a1
        p1, q1 = q1, r1
        p2, q2 = q2, r2


def iter_partial_quotients(spec: RealSpec, real: PrecisionReal,
                           max_digits: int = DEFAULT_MAX_DIGITS) -> Iterator[int]:
    """Lazily yield certified partial quotients, refining precision on demand.

    Stops cleanly when xi is exactly rational; raises PrecisionError when the
    precision ceiling is reached first.
    """
    emitted = 0
    while True:
        for i, a in enumerate(_interval_quotients(real.lower, real.upper)):
            if a is None:
                return
            if i < emitted:
                continue
            yield a
            emitted += 1
        try:
            real = escalate(spec, real, max_digits)
        except PrecisionError as err:
            raise PrecisionError(f"{err} after {emitted} partial quotients", err.digits) from None


def partial_quotients(spec: RealSpec, real: PrecisionReal, max_terms: int,
                      max_digits: int = DEFAULT_MAX_DIGITS) -> Quotients:
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    terms: list[int] = []
    it = iter_partial_quotients(spec, real, max_digits)
    for a in it:
        terms.append(a)
        if len(terms) == max_terms:
            break
    else:
        return Quotients(terms, True)
    # we stopped on the cap; the expansion may still happen to end right here
    exact = spec.exact_value
    terminated = exact is not None and _convergent_value(terms) == exact
    return Quotients(terms, terminated)


def _convergent_value(terms: list[int]) -> Fraction:
    value = Fraction(terms[-1])
    for t in reversed(terms[:-1]):
        value = t + 1 / value
    return value


def iter_convergents(quotients) -> Iterator[Convergent]:
    """Convergents from an iterable of quotients, one quotient of lookahead.

    The residual bound of convergent n is 1/(Q_n Q_{n+1}) when the next
    quotient is known, else 1/Q_n**2.
    """
    p_prev, q_prev = 1, 0
    p, q = None, None
    index = -1
    for a in quotients:
        if p is not None:
            q_next = a * q + q_prev
            yield Convergent(index, p, q, Fraction(1, q * q_next))
            p, p_prev = a * p + p_prev, p
            q, q_prev = q_next, q
        else:
            p, q = a, 1
        index += 1
    if p is not None:
        yield Convergent(index, p, q, Fraction(1, q * q))


def convergents(quotients) -> list[Convergent]:
    quotients = list(quotients)
    if not quotients:
        raise ValueError("need at least one partial quotient")
    if any(a < 1 for a in quotients[1:]):
        raise ValueError("partial quotients after the first must be >= 1")
    return list(iter_convergents(quotients))
