"""Interval-certified arbitrary-precision reals.

Every target value is held as an exact rational ``center`` with an exact
rational ``radius``; the true value always lies in ``[center - radius,
center + radius]``.  Named constants are computed with integer fixed-point
arithmetic where every rounding step is accounted for, so the enclosures are
rigorous rather than merely "accurate to working precision".
"""

from __future__ import annotations

import decimal
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

CONSTANTS = ("pi", "e", "sqrt2", "golden", "euler-gamma")
_ALIASES = {
    "gamma": "euler-gamma",
    "euler_gamma": "euler-gamma",
    "euler": "euler-gamma",
    "phi": "golden",
    "sqrt(2)": "sqrt2",
}

MIN_DIGITS = 10

_LOG2_10 = math.log2(10)


class PrecisionError(RuntimeError):
    """Raised when a decision needs more precision than the ceiling allows."""

    def __init__(self, message: str, digits: int | None = None):
        super().__init__(message)
        self.digits = digits


class Comparison(enum.Enum):
    BELOW = "below"
    ABOVE = "above"
    UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class RealSpec:
    """Definition of a target real.

    ``kind`` is one of ``named-constant``, ``decimal-literal``, ``rational``
    or ``cf-terms``.  Decimal literals are taken as the exact rational they
    spell out, so ``"3.14159"`` means 314159/100000 and nothing more.
    """

    kind: str
    payload: Union[str, tuple[int, int], tuple[int, ...]]

    def __post_init__(self):
        if self.kind == "named-constant":
            name = _ALIASES.get(self.payload, self.payload)
            if name not in CONSTANTS:
                raise ValueError(f"unknown constant {self.payload!r}; expected one of {CONSTANTS}")
            object.__setattr__(self, "payload", name)
        elif self.kind == "decimal-literal":
            _parse_decimal(self.payload)
        elif self.kind == "rational":
            num, den = self.payload
            if den == 0:
                raise ValueError("rational with zero denominator")
            if den < 0:
                num, den = -num, -den
            object.__setattr__(self, "payload", (int(num), int(den)))
        elif self.kind == "cf-terms":
            terms = tuple(int(t) for t in self.payload)
            if not terms:
                raise ValueError("cf-terms needs at least one term")
            if any(t < 1 for t in terms[1:]):
                raise ValueError("cf-terms after the first must be >= 1")
            object.__setattr__(self, "payload", terms)
        else:
            raise ValueError(f"unknown real kind {self.kind!r}")

    @classmethod
    def constant(cls, name: str) -> "RealSpec":
        return cls("named-constant", name)

    @classmethod
    def rational(cls, num: int, den: int = 1) -> "RealSpec":
        return cls("rational", (num, den))

    @property
    def gcd(self) -> int | None:
        if self.kind == "rational":
            return math.gcd(*self.payload)
        return None

    @property
    def exact_value(self) -> Fraction | None:
        """The value as a Fraction when this denotes a rational, else None."""
        if self.kind == "rational":
            return Fraction(*self.payload)
        if self.kind == "decimal-literal":
            return _parse_decimal(self.payload)
        if self.kind == "cf-terms":
            value = Fraction(self.payload[-1])
            for t in reversed(self.payload[:-1]):
                value = t + 1 / value
            return value
        return None

    def __str__(self) -> str:
        if self.kind == "named-constant":
            return self.payload
        if self.kind == "decimal-literal":
            return self.payload
        if self.kind == "rational":
            return f"{self.payload[0]}/{self.payload[1]}"
        return ",".join(map(str, self.payload))


def parse_real_spec(text: str) -> RealSpec:
    """Parse the command-line form of a target real.

    ``pi``/``e``/``sqrt2``/``golden``/``gamma`` name constants, ``p/q`` is a
    rational, a comma-separated list is a continued fraction, and anything
    else must be a decimal literal.
    """
    s = text.strip()
    low = s.lower()
    if low in CONSTANTS or low in _ALIASES:
        return RealSpec.constant(low)
    if "," in s:
        try:
            terms = tuple(int(t) for t in s.strip("[]").split(","))
        except ValueError:
            raise ValueError(f"malformed cf-terms {text!r}") from None
        return RealSpec("cf-terms", terms)
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            return RealSpec.rational(int(num), int(den))
        except ValueError:
            raise ValueError(f"malformed rational {text!r}") from None
    return RealSpec("decimal-literal", s)


def _parse_decimal(text: str) -> Fraction:
    try:
        d = decimal.Decimal(text)
    except decimal.InvalidOperation:
        raise ValueError(f"malformed decimal literal {text!r}") from None
    if not d.is_finite():
        raise ValueError(f"malformed decimal literal {text!r}")
    return Fraction(d)


@dataclass(frozen=True)
class PrecisionReal:
    center: Fraction
    radius: Fraction
    digits: int

    @property
    def lower(self) -> Fraction:
        return self.center - self.radius

    @property
    def upper(self) -> Fraction:
        return self.center + self.radius

    @property
    def exact(self) -> bool:
        return self.radius == 0

    def contains(self, value) -> bool:
        return self.lower <= Fraction(value) <= self.upper

    def fixed(self) -> tuple[int, int, int]:
        """Integer view ``(X, D, E)`` with ``|xi*D - X| <= E``.

        Exact values keep their own denominator (E = 0); inexact ones are put
        on a power-of-two grid.  Hot loops use this to avoid Fraction overhead.
        """
        if self.radius == 0:
            return self.center.numerator, self.center.denominator, 0
        bits = _bits_for(self.digits)
        scale = 1 << bits
        x = math.floor(self.center * scale)
        err = math.ceil(self.radius * scale) + 1
        return x, scale, err

    def __mul__(self, other):
        if isinstance(other, PrecisionReal):
            cands = [a * b for a in (self.lower, self.upper) for b in (other.lower, other.upper)]
            return _from_bounds(min(cands), max(cands), min(self.digits, other.digits))
        other = Fraction(other)
        return PrecisionReal(self.center * other, self.radius * abs(other), self.digits)

    __rmul__ = __mul__

    def __sub__(self, other):
        if isinstance(other, PrecisionReal):
            return PrecisionReal(self.center - other.center, self.radius + other.radius,
                                 min(self.digits, other.digits))
        return PrecisionReal(self.center - Fraction(other), self.radius, self.digits)

    def __add__(self, other):
        if isinstance(other, PrecisionReal):
            return PrecisionReal(self.center + other.center, self.radius + other.radius,
                                 min(self.digits, other.digits))
        return PrecisionReal(self.center + Fraction(other), self.radius, self.digits)

    __radd__ = __add__

    def __abs__(self):
        lo, hi = self.lower, self.upper
        if lo >= 0:
            return self
        if hi <= 0:
            return PrecisionReal(-self.center, self.radius, self.digits)
        top = max(-lo, hi)
        return PrecisionReal(top / 2, top / 2, self.digits)

    def __str__(self) -> str:
        return f"{decimal_string(self.center, self.digits)} +/- {float(self.radius):.3g}"


def _bits_for(digits: int) -> int:
    return math.ceil(digits * _LOG2_10) + 16


def _from_bounds(lo: Fraction, hi: Fraction, digits: int) -> PrecisionReal:
    """Outward-round ``[lo, hi]`` onto a dyadic grid to keep denominators small."""
    bits = _bits_for(digits) + 8
    scale = 1 << bits
    lo_i = math.floor(lo * scale)
    hi_i = math.ceil(hi * scale)
    return PrecisionReal(Fraction(lo_i + hi_i, 2 * scale), Fraction(hi_i - lo_i, 2 * scale), digits)


def decimal_string(x: Fraction, digits: int) -> str:
    """Render ``x`` with ``digits`` significant decimal digits (for display only)."""
    with decimal.localcontext() as ctx:
        ctx.prec = max(digits, 1)
        return str(decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator))


# -- constants ---------------------------------------------------------------
# Each routine returns (X, E) on the grid 2**-bits with |c * 2**bits - X| <= E.

def _atan_inv(x: int, scale: int) -> tuple[int, int]:
    # atan(1/x) by its alternating series; each floor loses < 1 ulp and the
    # truncation error is below the first omitted term (< 1 ulp at exit).
    total = 0
    power = scale // x
    x2 = x * x
    k = 0
    while power:
        term = power // (2 * k + 1)
        total += -term if k & 1 else term
        power //= x2
        k += 1
    return total, 2 * k + 2


def _pi_fixed(bits: int) -> tuple[int, int]:
    scale = 1 << bits
    a, ea = _atan_inv(5, scale)
    b, eb = _atan_inv(239, scale)
    return 16 * a - 4 * b, 16 * ea + 4 * eb


def _e_fixed(bits: int) -> tuple[int, int]:
    term = 1 << bits
    total = 0
    k = 0
    while term:
        total += term
        k += 1
        term //= k
    # computed terms undershoot by < 2 ulp each; tail after exit < 2 ulp
    return total, 2 * k + 4


def _sqrt2_fixed(bits: int) -> tuple[int, int]:
    return math.isqrt(2 << (2 * bits)), 1


def _golden_fixed(bits: int) -> tuple[int, int]:
    scale = 1 << bits
    return (scale + math.isqrt(5 << (2 * bits))) // 2, 1


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _ln_bounds(n: int, digits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ln(n) from decimal's correctly rounded logarithm."""
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        value = decimal.Decimal(n).ln()
        ulp = decimal.Decimal(1).scaleb(value.adjusted() - digits + 1)
    v = Fraction(value)
    u = Fraction(ulp)
    return v - u, v + u


def ln_interval(n, digits: int) -> PrecisionReal:
    """Certified enclosure of the natural log of a positive rational ``n``."""
    n = Fraction(n)
    if n <= 0:
        raise ValueError("ln of a non-positive number")
    if n == 1:
        return PrecisionReal(Fraction(0), Fraction(0), digits)
    lo_n, hi_n = _ln_bounds(n.numerator, digits + 5)
    lo_d, hi_d = _ln_bounds(n.denominator, digits + 5) if n.denominator > 1 else (Fraction(0), Fraction(0))
    return _from_bounds(lo_n - hi_d, hi_n - lo_d, digits)


def _gamma_bounds(bits: int) -> tuple[Fraction, Fraction]:
    """Euler's constant via the Brent-McMillan Bessel-function formula.

    gamma = A/B - ln n - K0(2n)/I0(2n), with B = sum t_k, A = sum t_k H_k,
    t_k = (n^k/k!)^2 and 0 < K0(2n)/I0(2n) < pi*exp(-4n).  The sums are run
    twice, once rounding down and once rounding up, giving a rigorous bracket.
    """
    n = max(2, math.ceil((bits + 8) * math.log(2) / 4))
    guard = 64 + 2 * n.bit_length()
    scale = 1 << (bits + guard)
    n2 = n * n
    t_lo = t_hi = scale
    u_lo = u_hi = 0
    a_lo = a_hi = 0
    b_lo = b_hi = scale
    k = 0
    while True:
        k += 1
        t_lo = t_lo * n2 // (k * k)
        t_hi = _ceil_div(t_hi * n2, k * k)
        u_lo = (u_lo * n2 // k + t_lo) // k
        u_hi = _ceil_div(_ceil_div(u_hi * n2, k) + t_hi, k)
        a_lo += u_lo
        a_hi += u_hi
        b_lo += t_lo
        b_hi += t_hi
        if k > 2 * n and t_hi <= 1 and u_hi <= 1:
            break
    # geometric tails: term ratios are < 1/4 for t and < 1/2 for u once k > 2n
    a_hi += u_hi
    b_hi += t_hi
    digits = math.ceil(bits / _LOG2_10) + 10
    ln_lo, ln_hi = _ln_bounds(n, digits)
    # 4*exp(-4n) > pi*exp(-4n); exp(-4n) <= 2**-floor(4n*log2(e))
    shift = math.floor(4 * n * 1.4426950408889634) - 1
    bessel = Fraction(4, 1 << shift)
    lo = Fraction(a_lo, b_hi) - ln_hi - bessel
    hi = Fraction(a_hi, b_lo) - ln_lo
    return lo, hi


_FIXED = {
    "pi": _pi_fixed,
    "e": _e_fixed,
    "sqrt2": _sqrt2_fixed,
    "golden": _golden_fixed,
}


def make_real(spec: RealSpec, digits: int) -> PrecisionReal:
    """Enclose ``spec`` at roughly ``digits`` significant decimal digits."""
    if digits < MIN_DIGITS:
        raise ValueError(f"digits must be >= {MIN_DIGITS}, got {digits}")
    exact = spec.exact_value
    if exact is not None:
        return PrecisionReal(exact, Fraction(0), digits)
    name = spec.payload
    bits = _bits_for(digits)
    if name == "euler-gamma":
        lo, hi = _gamma_bounds(bits)
        return _from_bounds(lo, hi, digits)
    x, err = _FIXED[name](bits)
    scale = 1 << bits
    return PrecisionReal(Fraction(x, scale), Fraction(err, scale), digits)


def refine(spec: RealSpec, real: PrecisionReal, digits: int) -> PrecisionReal:
    if digits <= real.digits:
        raise ValueError(f"refine needs more digits than {real.digits}, got {digits}")
    return make_real(spec, digits)


def certified_compare(x: PrecisionReal, threshold) -> Comparison:
    """Place the whole interval ``x`` against an exact threshold.

    BELOW means every point is strictly less than the threshold, ABOVE means
    every point is at or above it.  Anything else is UNDECIDABLE.
    """
    t = Fraction(threshold)
    if x.upper < t:
        return Comparison.BELOW
    if x.lower >= t:
        return Comparison.ABOVE
    return Comparison.UNDECIDABLE


def default_digits(max_b: int) -> int:
    """Working precision for a search up to ``max_b``: b**3 eats 3*log10(B) digits."""
    return max(MIN_DIGITS, math.ceil(3 * math.log10(max(max_b, 2))) + 30)


def escalate(spec: RealSpec, real: PrecisionReal, max_digits: int) -> PrecisionReal:
    """Double the working precision, or raise once past ``max_digits``."""
    digits = real.digits * 2
    if digits > max_digits:
        raise PrecisionError(f"precision ceiling of {max_digits} digits exceeded for {spec}", real.digits)
    return refine(spec, real, digits)

