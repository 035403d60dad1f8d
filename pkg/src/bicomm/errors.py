"""Exception hierarchy.

Input problems raise subclasses of ``ValueError`` so ordinary callers can
catch them generically; failed self-checks raise ``VerificationError``.
"""


class BicommError(Exception):
    """Base class for all package errors."""


class ShapeError(BicommError, ValueError):
    """Matrices of incompatible shapes were combined."""


class NotInvariantError(BicommError, ValueError):
    """A subspace that must be invariant under a representation is not."""


class RepresentationError(BicommError, ValueError):
    """Image data does not define a homomorphism of the reference algebra."""


class VerificationError(BicommError):
    """Two independent computations of the same object disagree.

    This flags either a bug or a tolerance that is too tight for the input.
    """


class ImplicationError(VerificationError):
    """A property report violates a known implication between properties."""


class WorkspaceError(BicommError, ValueError):
    """A workspace file could not be parsed or resolved."""
