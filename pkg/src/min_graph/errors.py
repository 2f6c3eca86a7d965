"""Exceptions raised by the min_graph library.

Verdicts (failed claims, violated constraints, inconclusive ledgers) are report
content and never raised. These exceptions cover bad arguments and numerical
operations that cannot produce a meaningful result. The CLI turns any
MinGraphError into a click.ClickException.
"""


class MinGraphError(Exception):
    """Base class for every library error."""


class ArgumentError(MinGraphError, ValueError):
    """An argument is outside the range an operation accepts."""


class WarpDomainError(ArgumentError):
    """A warp function was evaluated outside its domain."""


class WarpConstructionError(MinGraphError):
    """A piecewise warp could not be built (e.g. the smoothing lost positivity)."""


class PoleError(ArgumentError):
    """A curvature formula was evaluated at or below the pole r = 0."""


class ManifoldError(MinGraphError, ValueError):
    """Unsupported manifold kind, failed closure at the pole or a rejected fiber."""


class PreconditionError(MinGraphError, ValueError):
    """Input data does not satisfy an operation's precondition."""


class GridShapeError(PreconditionError):
    """Two sampled objects are defined on incompatible grids."""


class FeasibilityError(MinGraphError):
    """No admissible solution exists for the requested inputs."""


class SolverError(MinGraphError):
    """A linear or nonlinear solve failed."""


class HypothesisError(PreconditionError):
    """Curvature hypotheses required by a bound are not certified."""


class SearchError(MinGraphError):
    """A parameter search found no admissible candidate."""
