"""Exception hierarchy shared by all intentcite modules.

The CLI maps these onto exit codes: data/validation problems exit 1,
usage problems exit 2 (argparse), convergence failures exit 3.
"""


class IntentCiteError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(IntentCiteError):
    """Input data violates a documented precondition or invariant."""


class ParameterError(IntentCiteError):
    """A caller-supplied parameter is out of its documented range."""


class FormatError(IntentCiteError):
    """A binary or text file does not conform to its declared format."""


class CorruptionError(FormatError):
    """A file with a valid header is truncated or has trailing garbage.

    ``offset`` is the byte position at which the problem was detected.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
