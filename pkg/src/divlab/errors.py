"""Exception hierarchy shared by every module.

Exit-code mapping used by the CLI: DomainError -> 2, ResourceLimitError -> 3,
InvariantViolation -> 4.
"""


class DivlabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DivlabError):
    """Input outside the documented domain of an operation."""


class ResourceLimitError(DivlabError):
    """A configured cap (primes, exponents, scan range, memory) was reached."""


class UndecidableComparison(ResourceLimitError):
    """A bounded-real comparison stayed undecidable after the maximum number
    of precision doublings.  Carries the name of the comparison."""

    def __init__(self, name: str, bits: int):
        super().__init__(
            f"comparison {name!r} undecidable at {bits} bits after retries"
        )
        self.name = name
        self.bits = bits


class InvariantViolation(DivlabError):
    """A structural invariant that is proven to hold was observed broken;
    this always signals an implementation bug."""
