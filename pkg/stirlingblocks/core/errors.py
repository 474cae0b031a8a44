"""
Exception hierarchy for stirlingblocks.

Domain errors subclass ``ValueError`` so callers that only know the
standard library still catch bad input.
"""

from typing import Optional, Sequence


class StirlingBlocksError(Exception):
    """Root of every error raised by the package"""


class DomainError(StirlingBlocksError, ValueError):
    """An operation was called outside its precondition"""


class PatternSyntaxError(DomainError):
    """Pattern text could not be parsed"""


class InvalidWordError(DomainError):
    """Word is not a k-Stirling permutation (or could not be parsed)"""


class InvalidTreeError(DomainError):
    """Tree text could not be parsed or the tree is not in LT_n"""


class SpecError(DomainError):
    """Malformed pattern-sequence document"""


class ConfigurationError(StirlingBlocksError):
    """Environment settings failed validation"""


class VariableMismatchError(StirlingBlocksError):
    """Two series or polynomials were combined over different variable lists"""


class CompositionError(StirlingBlocksError):
    """Inner series of a composition has a nonzero constant term"""


class VerificationError(StirlingBlocksError):
    """Two computation routes disagree, or a route produced a non-integral count"""

    def __init__(
        self,
        message: str,
        spec_name: Optional[str] = None,
        order: Optional[int] = None,
        routes: Optional[Sequence[str]] = None,
    ):
        super().__init__(message)
        self.spec_name = spec_name
        self.order = order
        self.routes = tuple(routes) if routes is not None else ()
