"""Exception types shared across the package."""


class EllsurfError(Exception):
    pass


class NonConvergent(EllsurfError):
    """Infinite product cannot converge for the given nome."""


class DomainError(EllsurfError):
    """Argument outside the domain of definition."""


class PoleHit(EllsurfError):
    """Evaluation requested too close to a pole or inverted zero."""


class IndeterminateRank(EllsurfError):
    """Singular value spectrum has no clear cutoff at the requested tolerance."""


class DegenerateMultiplier(EllsurfError):
    """Requested theta space is empty or its multiplier is ambiguous."""


class TorsionDegenerate(EllsurfError):
    """Lowering-operator denominator vanishes at torsion q without cancellation."""


class PathBudgetExceeded(EllsurfError):
    """Word enumeration exceeded the configured budget."""


class MultiplierMismatch(EllsurfError):
    """Coefficient does not satisfy the functional equation required by its degree."""


class DegenerateChoice(EllsurfError):
    """Auxiliary points make a construction denominator vanish."""


class NotTorsion(EllsurfError):
    """Operation requires q to be a root of unity."""


class UnsupportedResonance(EllsurfError):
    """Exact parameter configuration falls outside the implemented case analysis."""

    def __init__(self, message, root=None):
        super().__init__(message)
        self.root = root


class NonTermination(EllsurfError):
    """Reduction loop exceeded its iteration bound."""


class ParityViolation(EllsurfError):
    """K-theory twist parameter has the wrong parity."""


class SingularFlattening(EllsurfError):
    """Tensor flattening is not invertible over the rationals."""


class DegenerateLine(EllsurfError):
    """Random line hit the indeterminacy locus of a birational map."""


class InterpolationRankDeficit(EllsurfError):
    """Rational reconstruction system has no admissible solution."""


class SingularMatrix(EllsurfError):
    """Matrix is not invertible over the Laurent field."""


class TotalMismatch(EllsurfError):
    """Coweights with different totals are incomparable."""


class DecompositionMismatch(EllsurfError):
    """Prescribed coweights do not sum to the coweight of the matrix."""


class ContourPinch(EllsurfError):
    """No circle separates the inward and outward pole families."""


class UsageError(EllsurfError):
    """Invalid command line invocation."""
