"""Exception types shared across the package."""


class WeilError(Exception):
    """Base class for all library errors."""


class AlgebraMismatch(WeilError):
    """Operands belong to different algebras or have inconsistent arity."""


class CapacityError(WeilError):
    """Requested algebra exceeds the configured dimension cap."""


class AlgebraValidationError(WeilError):
    """A structure-constant table violates a defining axiom."""


class NotCommutative(AlgebraValidationError):
    pass


class NotAssociative(AlgebraValidationError):
    pass


class NoUnit(AlgebraValidationError):
    """Basis element 0 does not act as the multiplicative unit."""


class NotLocal(AlgebraValidationError):
    """No nilpotent maximal ideal of codimension one."""


class NotInvertible(WeilError):
    """Element has (numerically) zero augmentation, hence no inverse."""


class SingularRealPart(WeilError):
    """The entrywise-augmentation matrix is singular, so the Neumann
    construction of the inverse does not apply."""


class DomainError(WeilError):
    """Primitive applied outside the domain of its real counterpart."""


class DegreeError(WeilError):
    """Operation undefined for this form or cochain degree."""


class ArityError(WeilError):
    """Variable index or point length inconsistent with the declared arity."""


class ParseError(WeilError):
    """Input text rejected; ``offset`` is the byte position for expression
    sources and None for structural (JSON) sources."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None
                         else f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifier(ParseError):
    """Identifier is neither a coordinate nor a known primitive."""


class InvalidPoissonStructure(WeilError):
    """Bivector failed the sampled Jacobi validation."""


class InvalidSymplecticStructure(WeilError):
    """Two-form failed closedness or nondegeneracy validation."""
