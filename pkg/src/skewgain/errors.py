"""Exception types for validation failures across the package."""


class SkewgainError(ValueError):
    """Common base so callers can catch any package-level validation error."""


class DimensionMismatch(SkewgainError):
    """Operands or document fields disagree about dimensions."""


class NotHermitian(SkewgainError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NotPositiveSemidefinite(SkewgainError):
    """An eigenvalue sits below the tolerated numerical-negativity floor."""


class NumericalInstability(SkewgainError):
    """A quantity that must be real or nonnegative came out too far off."""


class StateValidation(SkewgainError):
    """Density-matrix invariants (hermiticity, trace, positivity) violated."""


class DegenerateObservable(SkewgainError):
    """Observable eigenvalues are not pairwise distinct."""


class NotSorted(SkewgainError):
    """Eigenvalues were required in ascending order."""


class IncompleteKrausSet(SkewgainError):
    """Kraus operators do not sum to the identity.  Carries the deficit norm."""

    def __init__(self, message: str, deficit: float):
        super().__init__(message)
        self.deficit = deficit


class BadEnsemble(SkewgainError):
    """Ensemble weights are not a valid probability distribution."""


class InvalidConfig(SkewgainError):
    """Search configuration failed validation."""
