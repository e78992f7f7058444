"""Exception hierarchy.

Every :class:`InertiaError` is a *domain* error: the input was well formed but
mathematically unsuitable (a degenerate form, a splitting that is not a
q-splitting, an orbit test with a certified negative answer...). Errors tied to
a location carry ``vertex`` and/or ``edge`` indices and mention them in the
message.
"""


class InertiaError(Exception):
    def __init__(self, message, *, vertex=None, edge=None):
        where = []
        if vertex is not None:
            where.append(f"vertex {vertex}")
        if edge is not None:
            where.append(f"edge {edge}")
        if where:
            message = f"{message} (at {', '.join(where)})"
        super().__init__(message)
        self.vertex = vertex
        self.edge = edge


class DegenerateForm(InertiaError):
    pass


class SingularMatrix(InertiaError):
    pass


class NotPositiveDefinite(InertiaError):
    pass


class NonPositiveSpectrum(InertiaError):
    pass


class NotDefiniteOnSummand(InertiaError):
    pass


class ConvergenceError(InertiaError):
    pass


class BundleMismatch(InertiaError):
    pass


class InconsistentInertia(InertiaError):
    pass


class AdjacencyViolation(InertiaError):
    """Consecutive samples of a subbundle are too far apart to be tracked."""


class SamplingTooCoarse(InertiaError):
    pass


class NotQSplitting(InertiaError):
    pass


class StepTooCoarse(InertiaError):
    """A discretised path has a jump; retry with more steps."""


class Unsupported(InertiaError):
    pass


class NotConnected(InertiaError):
    """Two forms lie in different orbits; ``invariants`` holds the evidence."""

    def __init__(self, message, *, invariants=None, **kwargs):
        super().__init__(message, **kwargs)
        self.invariants = invariants


class DocumentError(ValueError):
    """Malformed or schema-invalid bundle document."""
