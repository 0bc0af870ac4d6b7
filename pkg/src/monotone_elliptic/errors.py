"""Exception hierarchy for the solver library."""


class MonotoneEllipticError(Exception):
    """Base class for all library errors."""


class GridError(MonotoneEllipticError):
    """Invalid grid geometry or construction parameters."""


class FieldError(MonotoneEllipticError):
    """Scalar field misaligned with its grid or carrying invalid values."""


class LinearSolveError(MonotoneEllipticError):
    """The linear Dirichlet solve failed or did not meet its residual contract."""


class MaximumPrincipleError(MonotoneEllipticError):
    """The sup-norm bound (d^2/8)*||rhs|| was violated; indicates a solver or mask bug."""


class SpecValidationError(MonotoneEllipticError):
    """A system definition violates one of the structural conditions (a)-(d)."""


class SubsolutionError(MonotoneEllipticError):
    """Subsolution construction could not certify the nodal inequality."""


class MonotonicityError(MonotoneEllipticError):
    """An iteration step decreased somewhere beyond the allowed solver slack."""


class BoundViolationError(MonotoneEllipticError):
    """An iterate escaped the a-priori / fixed-point bound."""


class BoundUnavailableError(MonotoneEllipticError):
    """No boundedness path applies: growth envelope absent and no positive fixed point found."""


class ExhaustionError(MonotoneEllipticError):
    """A truncation run failed or cross-truncation monotonicity was violated."""


class ConfigError(MonotoneEllipticError):
    """Malformed or invalid run configuration."""
