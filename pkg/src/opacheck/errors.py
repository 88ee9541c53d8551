"""Exception types shared across the package."""


class OpacheckError(Exception):
    """Base class for all library-specific errors."""


class ValidationError(OpacheckError):
    """A system failed its structural checks; carries the diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class StateSpaceLimitError(OpacheckError):
    """A construction would exceed its configured state cap.

    Signals state-space blowup, not malformed input: raise the cap or
    shrink the instance.
    """


class InconclusiveBoundError(OpacheckError):
    """The brute-force search exhausted its length budget without being able
    to certify a verdict."""


class TransformPreconditionError(OpacheckError):
    """Input system does not meet a transformation's preconditions."""


class NameCollisionError(OpacheckError):
    """A fresh state or event name required by a transformation already
    exists in the input; pass a rename hint."""


class DesParseError(OpacheckError):
    """Syntax error in the textual system format."""

    def __init__(self, line: int, msg: str):
        self.line = line
        super().__init__(f"line {line}: {msg}")
