"""Exception hierarchy shared by all pipeline stages."""


class StarpatchError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInput(StarpatchError):
    """Input geometry is degenerate (e.g. all points collinear)."""


class ParseError(StarpatchError):
    """Complex document is malformed or violates a structural invariant."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class DegenerateBoundaryVertex(StarpatchError):
    """Boundary vertex degree too low for the boundary radius formula."""


class NonConvergence(StarpatchError):
    """Radius iteration did not reach tolerance within the sweep budget."""

    def __init__(self, message, worst_residual=None, sweeps=None):
        super().__init__(message)
        self.worst_residual = worst_residual
        self.sweeps = sweeps


class NothingToSolve(StarpatchError):
    """Disk complex has no interior vertices; boundary radii returned as-is."""

    def __init__(self, message, radii=None):
        super().__init__(message)
        self.radii = radii


class LayoutInconsistency(StarpatchError):
    """Laid-out centers violate a tangency beyond tolerance."""


class EmptySelection(StarpatchError):
    """Interior selection removed every circle."""


class TooFewNeighbors(StarpatchError):
    """Circle has fewer tangencies than a cyclic polygon needs."""


class GadgetGeometryError(StarpatchError):
    """Gadget surgery could not be applied to the packing."""


class DegeneratePolygon(StarpatchError):
    """Polygon has no spread; symmetry measure undefined."""


class IncompatibleAngle(StarpatchError):
    """Contact angle produces a degenerate or inverted star."""


class StarDistortion(StarpatchError):
    """Chord bisector misses the inner circle; points too uneven."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class MotifFailure(StarpatchError):
    """Ray matching failed; the polygon is too distorted for a motif."""

    def __init__(self, message, polygon_id=None):
        super().__init__(message)
        self.polygon_id = polygon_id


class EmptyScene(StarpatchError):
    """Nothing to render."""
