"""Approximating reals by rationals a/b**2 (and a/p with p prime)."""

from .cf import Convergent, convergents, partial_quotients
from .modular import (
    CongruenceRoots,
    FactoredInteger,
    crt_combine,
    factorize,
    is_probable_prime,
    roots_mod_prime_power,
    solve_linear_congruence,
    solve_quadratic_congruence,
    sqrt_mod_prime,
)
from .primes import PrimeApproximation, conjecture_scan, prime_denominator_search
from .realnum import (
    Comparison,
    PrecisionReal,
    RealSpec,
    certified_compare,
    make_real,
    parse_real_spec,
    refine,
)
from .report import FigureSeries, build_figure_series, emit
from .search import (
    Approximation,
    SearchConfig,
    SearchReport,
    brute_force_scan,
    convergent_search,
    expected_count,
    full_search,
    verify_approximation,
)

__version__ = "0.1.0"
