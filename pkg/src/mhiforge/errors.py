"""Error types shared by all modules.

The CLI prints the class name verbatim, so names are part of the interface.
"""


class MhiError(Exception):
    """Base class for data errors raised by mhiforge."""

    @property
    def name(self) -> str:
        return type(self).__name__


class FileNotFound(MhiError, FileNotFoundError):
    pass


class DimensionMismatch(MhiError, ValueError):
    pass


class UnsupportedFormat(MhiError, ValueError):
    pass


class EmptyStream(MhiError, ValueError):
    pass


class InsufficientFrames(MhiError, ValueError):
    pass


class NonFiniteInput(MhiError, ValueError):
    pass


class InvalidWeights(MhiError, ValueError):
    pass


class InvalidBoundingBox(MhiError, ValueError):
    pass


class BoxTooLarge(MhiError, ValueError):
    pass


class IncompleteTrainSet(MhiError, ValueError):
    pass
