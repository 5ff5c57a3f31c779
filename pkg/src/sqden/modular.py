"""Factorization, primality and root enumeration for congruences mod Q."""

from __future__ import annotations

import heapq
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable

TRIAL_LIMIT = 10**6
DEFAULT_ROOT_CAP = 2**16
DEFAULT_RHO_BUDGET = 10**8

# the first seven prime bases decide primality exactly below this bound
_SMALL_WITNESSES = (2, 3, 5, 7, 11, 13, 17)
_DETERMINISTIC_LIMIT = 341_550_071_728_321
_MR_ROUNDS = 64


def _sieve(limit: int) -> list[int]:
    bs = bytearray(b"\x01") * (limit + 1)
    bs[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if bs[i]:
            bs[i * i::i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, v in enumerate(bs) if v]


_PRIMES: list[int] | None = None


def small_primes() -> list[int]:
    global _PRIMES
    if _PRIMES is None:
        _PRIMES = _sieve(TRIAL_LIMIT)
    return _PRIMES


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; exact for n < 3.4e14, error below 4**-64 beyond."""
    if n < 2:
        return False
    for p in _SMALL_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _DETERMINISTIC_LIMIT:
        return all(_mr_round(n, d, s, a) for a in _SMALL_WITNESSES)
    rng = random.Random(n)
    return all(_mr_round(n, d, s, rng.randrange(2, n - 1)) for _ in range(_MR_ROUNDS))


@dataclass(frozen=True)
class FactoredInteger:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(sorted((int(p), int(e)) for p, e in self.factors)))

    @property
    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factors]


class FactorizationError(RuntimeError):
    """Pollard-rho ran out of budget; ``partial`` holds what was found."""

    def __init__(self, n: int, partial: dict[int, int], remainder: int):
        super().__init__(f"could not finish factoring {n}: composite remainder {remainder}")
        self.n = n
        self.partial = partial
        self.remainder = remainder


def _brent(n: int, c: int, budget: int) -> tuple[int, int]:
    """One Pollard-rho run with Brent's cycle detection.

    Returns (divisor, iterations used); divisor is n or 1 on failure.
    """
    y, r, q = 2, 1, 1
    m = 128
    g = 1
    used = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        used += r
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        used += k
        r *= 2
        if used > budget:
            return 1, used
    if g == n:
        # batch gcd overshot; step back one at a time
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g, used


def _split(n: int, budget: int) -> tuple[int, int]:
    used = 0
    for c in itertools.count(1):
        g, spent = _brent(n, c, budget - used)
        used += spent
        if 1 < g < n:
            return g, used
        if used > budget:
            return 1, used


def factorize(n: int, rho_budget: int = DEFAULT_RHO_BUDGET) -> FactoredInteger:
    """Trial division to 10**6, then Brent's rho on what remains.

    ``rho_budget`` caps the rho iterations spent per composite cofactor.
    """
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    found: dict[int, int] = {}
    m = n
    for p in small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
    stack = [m] if m > 1 else []
    while stack:
        k = stack.pop()
        if k < TRIAL_LIMIT**2 or is_probable_prime(k):
            # anything left below 10**12 with no factor under 10**6 is prime
            found[k] = found.get(k, 0) + 1
            continue
        root = math.isqrt(k)
        if root * root == k:
            stack += [root, root]
            continue
        d, _ = _split(k, rho_budget)
        if d == 1:
            rest = math.prod(stack) * k
            raise FactorizationError(n, found, rest)
        stack += [d, k // d]
    return FactoredInteger(n, tuple(found.items()))


@dataclass(frozen=True)
class CongruenceRoots:
    modulus: int
    roots: tuple[int, ...]
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(sorted(set(self.roots))))

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def legendre(c: int, p: int) -> int:
    c %= p
    if c == 0:
        return 0
    return 1 if pow(c, (p - 1) // 2, p) == 1 else -1


def _tonelli(c: int, p: int) -> int:
    if p % 4 == 3:
        return pow(c, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = next(z for z in small_primes() if legendre(z, p) == -1)
    m = s
    cc = pow(z, q, p)
    t = pow(c, q, p)
    r = pow(c, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(cc, 1 << (m - i - 1), p)
        m = i
        cc = b * b % p
        t = t * cc % p
        r = r * b % p
    return r


def sqrt_mod_prime(c: int, p: int) -> CongruenceRoots:
    """All x in [0, p) with x*x = c (mod p), by Tonelli-Shanks."""
    c %= p
    if c == 0:
        return CongruenceRoots(p, (0,))
    if p == 2:
        return CongruenceRoots(2, (1,))
    if legendre(c, p) != 1:
        return CongruenceRoots(p, ())
    r = _tonelli(c, p)
    return CongruenceRoots(p, (r, p - r))


def _unit_roots(u: int, p: int, f: int) -> list[int]:
    """Roots of x*x = u (mod p**f) for u prime to p."""
    mod = p**f
    if p == 2:
        if f == 1:
            return [1]
        if f == 2:
            return [1, 3] if u % 4 == 1 else []
        if u % 8 != 1:
            return []
        x = 1
        for i in range(3, f):
            if (x * x - u) % (1 << (i + 1)):
                x += 1 << (i - 1)
        half = mod >> 1
        return [x, mod - x, (x + half) % mod, (mod - x + half) % mod]
    base = sqrt_mod_prime(u, p).roots
    if not base:
        return []
    x = base[0]
    k = 1
    while k < f:
        # Newton step doubles the p-adic precision
        k = min(2 * k, f)
        mk = p**k
        x = (x - (x * x - u) * pow(2 * x, -1, mk)) % mk
    return [x, (mod - x) % mod]


def roots_mod_prime_power(c: int, p: int, e: int) -> CongruenceRoots:
    """All x in [0, p**e) with x*x = c (mod p**e)."""
    if e < 1:
        raise ValueError("exponent must be >= 1")
    mod = p**e
    c %= mod
    if c == 0:
        step = p ** ((e + 1) // 2)
        return CongruenceRoots(mod, tuple(range(0, mod, step)))
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    if v % 2:
        return CongruenceRoots(mod, ())
    k = v // 2
    f = e - v
    ys = _unit_roots(c, p, f)
    if k == 0:
        return CongruenceRoots(mod, tuple(ys))
    # x = p**k * y with y known mod p**f, i.e. p**k lifts mod p**(e-k)
    pk = p**k
    pf = p**f
    out = [(pk * (y + j * pf)) % mod for y in ys for j in range(pk)]
    return CongruenceRoots(mod, tuple(out))


def crt_combine(parts: Iterable[CongruenceRoots], cap: int = DEFAULT_ROOT_CAP,
                limit: int | None = None) -> CongruenceRoots:
    """Recombine per-modulus roots over pairwise coprime moduli.

    With ``limit`` set, only recombined roots <= limit are kept; this filter
    is applied before the ``cap`` so band-limited callers rarely truncate.
    """
    parts = list(parts)
    moduli = [part.modulus for part in parts]
    for a, b in itertools.combinations(moduli, 2):
        if math.gcd(a, b) != 1:
            raise ValueError(f"moduli {a} and {b} are not coprime")
    modulus = math.prod(moduli)
    if any(len(part) == 0 for part in parts):
        return CongruenceRoots(modulus, ())
    coeffs = []
    for m in moduli:
        rest = modulus // m
        coeffs.append(rest * pow(rest, -1, m) % modulus if m > 1 else 0)

    def combos():
        for choice in itertools.product(*(part.roots for part in parts)):
            r = sum(c * x for c, x in zip(coeffs, choice)) % modulus
            if limit is None or r <= limit:
                yield r

    total = math.prod(len(part) for part in parts)
    if total <= cap:
        return CongruenceRoots(modulus, tuple(combos()))
    kept = heapq.nsmallest(cap + 1, combos())
    if len(kept) > cap:
        return CongruenceRoots(modulus, tuple(kept[:cap]), truncated=True)
    return CongruenceRoots(modulus, tuple(kept))


def solve_quadratic_congruence(P: int, alpha: int, Qf: FactoredInteger,
                               cap: int = DEFAULT_ROOT_CAP,
                               limit: int | None = None) -> CongruenceRoots:
    """All b in [0, Q) with P*b*b = alpha (mod Q); see crt_combine for ``limit``."""
    Q = Qf.n
    if math.gcd(P, Q) != 1:
        raise ValueError(f"gcd(P, Q) != 1 for P={P}, Q={Q}")
    if math.prod(p**e for p, e in Qf.factors) != Q:
        raise ValueError(f"incomplete factorization of {Q}")
    if Q == 1:
        return CongruenceRoots(1, (0,))
    c = alpha * pow(P, -1, Q) % Q
    parts = [roots_mod_prime_power(c % p**e, p, e) for p, e in Qf.factors]
    return crt_combine(parts, cap, limit)


@dataclass(frozen=True)
class LinearSolution:
    """Smallest solution ``x`` of P*x = alpha, valid modulo ``modulus``."""

    x: int
    modulus: int
    gcd: int = field(default=1)


def solve_linear_congruence(P: int, alpha: int, Q: int) -> LinearSolution | None:
    if Q < 1:
        raise ValueError("modulus must be positive")
    g = math.gcd(P, Q)
    if alpha % g:
        return None
    m = Q // g
    if m == 1:
        return LinearSolution(0, 1, g)
    x = (alpha // g) * pow(P // g, -1, m) % m
    return LinearSolution(x, m, g)
