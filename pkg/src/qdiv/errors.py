"""Exception types raised across the package."""


class QdivError(ValueError):
    """Base class for all library errors."""


class ParameterError(QdivError):
    """A scalar parameter or shape is outside the admissible range."""


class HermiticityError(QdivError):
    """Input expected to be Hermitian is not, beyond tolerance."""

    def __init__(self, asymmetry, tol):
        self.asymmetry = float(asymmetry)
        self.tol = float(tol)
        super().__init__(
            f"matrix is not Hermitian: ||H - H^dag|| = {self.asymmetry:.3e} "
            f"exceeds tolerance {self.tol:.1e}"
        )


class DomainError(QdivError):
    """A scalar function is undefined or invalid on part of a spectrum."""


class PreconditionError(QdivError):
    """A state fails a rank or support precondition (e.g. a singular reference state)."""


class DegenerateInstanceError(PreconditionError):
    """A randomly drawn instance is numerically degenerate; callers resample."""


class CapExceededError(QdivError):
    """A tensor power would exceed the dimension cap."""

    def __init__(self, dim, n, cap):
        self.dim, self.n, self.cap = int(dim), int(n), int(cap)
        super().__init__(f"dimension {dim}^{n} = {dim ** n} exceeds the cap {cap} at n = {n}")
