"""Exception types raised across the package."""


class FloodVibeError(Exception):
    """Base class for all package errors."""


class MissingChannel(FloodVibeError, KeyError):
    pass


class InvalidKernel(FloodVibeError, ValueError):
    pass


class DimensionMismatch(FloodVibeError, ValueError):
    pass


class LengthMismatch(FloodVibeError, ValueError):
    pass


class EmptyWarmup(FloodVibeError, ValueError):
    pass


class InvalidSpec(FloodVibeError, ValueError):
    pass


class InvalidFrame(FloodVibeError, ValueError):
    """A frame or map violates its structural invariants."""


class SchemaError(FloodVibeError, ValueError):
    """Manifest content is malformed. ``pointer`` is a JSON-pointer to the field."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        self.message = message
        super().__init__(f"{pointer}: {message}")


class FormatError(FloodVibeError, ValueError):
    """Malformed binary file. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int, path=None):
        self.offset = offset
        self.path = path
        where = f"{path}: " if path is not None else ""
        super().__init__(f"{where}{message} (at byte offset {offset})")


class BadMagic(FormatError):
    pass


class TruncatedPayload(FormatError):
    pass


class UnsupportedVersion(FormatError):
    pass


class NonBinaryValue(FormatError):
    pass


class FrameError(FloodVibeError):
    """Wraps a failure while processing one frame of a sequence."""

    def __init__(self, frame_index: int, cause: Exception):
        self.frame_index = frame_index
        self.cause = cause
        super().__init__(f"frame {frame_index}: {cause}")


class ValidationError(FloodVibeError, ValueError):
    """A manifest failed validation; ``problems`` lists every violation."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
