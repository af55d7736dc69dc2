"""Exception types raised by the package.

All input and configuration problems derive from ChainclustError so the
CLI can map them to a single exit code.
"""


class ChainclustError(Exception):
    """Base class for all chainclust errors."""


class ParseError(ChainclustError):
    """A CSV or constraint file could not be parsed."""


class EmptyDataset(ChainclustError):
    """The input file contains no data rows."""


class DimensionError(ChainclustError):
    """A requested dimensionality is outside the valid range."""


class DegenerateScale(ChainclustError):
    """The kNN distance scale is zero, so the similarity kernel is undefined."""


class ContradictoryConstraints(ChainclustError):
    """A cannot-link pair falls inside a single must-link clique."""

    def __init__(self, pair, clique):
        self.pair = tuple(pair)
        self.clique = tuple(sorted(clique))
        super().__init__(
            f"cannot-link pair {self.pair} contradicts the must-link clique "
            f"{list(self.clique)}: both points are forced into one cluster"
        )


class NoIncorrectLabelAvailable(ChainclustError):
    """Label corruption was requested but only one class exists."""


class InfeasibleSideInfo(ChainclustError):
    """No pair of classes satisfies the side-information coverage requirement."""


class InvalidInitialization(ChainclustError):
    """A supplied initial partition violates a must-link clique."""


class ShapeError(ChainclustError):
    """Two partitions that should align have different lengths."""
