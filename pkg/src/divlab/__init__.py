"""divlab: a laboratory for generalized divisor functions f_s(n).

Exact big-rational evaluation for integer s, certified high-precision
arithmetic for fractional s, and constructions over the range of f_s:
linked decreasing sequences (trains), greedy density solvers, quantitative
density-strength sequences, complement certificates and moment statistics.
"""

from .bounded import BoundedReal, refine
from .config import Caps, RunConfig, load_config
from .divisor import Exponent, f_prime_power, f_s, f_s_brute, f_s_of_int, sigma_s
from .errors import (
    DivlabError,
    DomainError,
    InvariantViolation,
    ResourceLimitError,
    UndecidableComparison,
)
from .primes import (
    Factorization,
    PrimeTable,
    factorize,
    is_prime,
    next_prime,
    parse_factored,
    prev_prime,
    sieve_upto,
    smallest_prime_not_in,
)
from .trains import Car, RangeSolution, Train, car, range_solutions, train
from .density import (
    ApproxSolution,
    GreedySelection,
    RuptureReport,
    approximate,
    choose_exponents,
    greedy_select,
    range_upper_bound,
    rupture_report,
    tail_product_bound,
)
from .wolke import WolkeConfig, WolkeSequence, WolkeStep, build, extend, initial_n0
from .complement import (
    ExcludedValue,
    MembershipVerdict,
    complement_point,
    excluded_shifted,
    excluded_simple,
    membership_scan,
    verdict,
)
from .stats import MomentReport, expectation_curve, moment_scan, variance_report, zeta

__version__ = "0.1.0"

__all__ = [
    "BoundedReal", "refine", "Caps", "RunConfig", "load_config",
    "Exponent", "f_prime_power", "f_s", "f_s_brute", "f_s_of_int", "sigma_s",
    "DivlabError", "DomainError", "InvariantViolation", "ResourceLimitError",
    "UndecidableComparison",
    "Factorization", "PrimeTable", "factorize", "is_prime", "next_prime",
    "parse_factored", "prev_prime", "sieve_upto", "smallest_prime_not_in",
    "Car", "RangeSolution", "Train", "car", "range_solutions", "train",
    "ApproxSolution", "GreedySelection", "RuptureReport", "approximate",
    "choose_exponents", "greedy_select", "range_upper_bound", "rupture_report",
    "tail_product_bound",
    "WolkeConfig", "WolkeSequence", "WolkeStep", "build", "extend", "initial_n0",
    "ExcludedValue", "MembershipVerdict", "complement_point", "excluded_shifted",
    "excluded_simple", "membership_scan", "verdict",
    "MomentReport", "expectation_curve", "moment_scan", "variance_report", "zeta",
    "__version__",
]
