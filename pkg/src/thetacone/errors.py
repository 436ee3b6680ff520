"""Exception types shared across the package."""


class ThetaconeError(Exception):
    """Base class for all package errors."""


class ValidationError(ThetaconeError):
    """Malformed input data: bad descriptor, bad JSON, schema mismatch."""


class NotInComplexError(ThetaconeError):
    """A lattice vector whose support is not a cone of the complex."""


class InconsistentStrataError(ValidationError):
    """Closing the declared strata produced a cone the caller marked empty."""


class MissingInvariantError(ThetaconeError):
    """A structure-constant computation needs counts not present in the table.

    ``missing`` lists (p, q, r, beta) tuples for exactly the required entries.
    """

    def __init__(self, missing):
        self.missing = sorted(missing)
        lines = ", ".join(
            "N[p=%s,q=%s,r=%s,beta=%s]" % (p, q, r, b) for p, q, r, b in self.missing
        )
        super().__init__("missing invariants: " + lines)


class UnboundedFamilyError(ThetaconeError):
    """The intersection pairing has a nonnegative kernel class.

    Candidate (r, beta) families are then infinite before truncation; callers
    that cannot tolerate this should treat the flag as fatal.
    """


class ScatteringError(ThetaconeError):
    """Wall-structure computation failed (inconsistency, bad wall data)."""
