"""Exception and warning types raised by the library."""


class GridError(ValueError):
    """Invalid grid parameters or mismatched grids."""


class RepresentationError(ValueError):
    """A field was passed in the wrong (position/momentum) representation."""


class NodeError(ValueError):
    """A ratio quantity was requested at a node of the wavefunction."""


class OrthogonalPostSelectionError(ZeroDivisionError):
    """Post-selected state has (numerically) zero overlap with the pre-selected state."""


class OperatorError(ValueError):
    """Unsupported operator descriptor or star-product symbol."""


class NormalizationWarning(UserWarning):
    """Input state is not normalized; the result is still returned."""
