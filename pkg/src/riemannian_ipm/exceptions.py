"""Exception hierarchy shared by the library and the command line front end."""


class RipmError(Exception):
    """Base class for all library errors."""


class ManifoldMismatch(RipmError, ValueError):
    """A point or tangent does not belong to the manifold it was used with."""


class UnsupportedManifold(RipmError, ValueError):
    """The requested operation is not available on this manifold."""


class DomainError(RipmError, ValueError):
    """A function was evaluated outside its open domain."""


class DegenerateInput(RipmError, ValueError):
    """Problem data violates a solver precondition (duplicates, collinearity, ...)."""


class NumericalFailure(RipmError, ArithmeticError):
    """Base class for failures of the numerical machinery."""


class HessianNotPD(NumericalFailure):
    """Cholesky factorization of the Hessian failed."""


class MaxIterations(NumericalFailure):
    """An iteration cap was reached before the stopping rule fired."""


class AssertionBreach(NumericalFailure):
    """A centering invariant of the path-following method was violated."""


class PreconditionViolated(RipmError, ValueError):
    """A documented precondition of an algorithm does not hold."""


class NullConeUnderflow(NumericalFailure):
    """The transformed vector norm underflowed (vector is close to the null cone)."""
