"""Exception types shared across the package."""


class StdPermError(Exception):
    """Base class for all package errors."""


class NonPrimitive(StdPermError, ValueError):
    """A word that must be primitive is a nontrivial power."""


class CapExceeded(StdPermError, ValueError):
    """An enumeration would exceed its configured size cap."""


class NoSuchCycle(StdPermError, ValueError):
    """The requested typed cycle does not occur in the sequence."""


class InternalInvariant(StdPermError, AssertionError):
    """A structural invariant that should always hold was violated."""


class GroundSetMismatch(StdPermError, ValueError):
    """Two set partitions are not over the same ground set."""


class Degenerate(StdPermError, ValueError):
    """A statistical test has too few cells to be meaningful."""


class RViolation(StdPermError, ValueError):
    """Some symbol probability exceeds the allowed bound R."""


class UnknownSymbol(StdPermError, ValueError):
    """A symbol lies outside the support of a distribution."""


class ParseError(StdPermError, ValueError):
    """Malformed textual input (sequences, words, distribution specs)."""
