"""Exception taxonomy shared by the engine, the simulation harness and the API.

Every error carries a stable ``code`` string; the HTTP layer maps it straight
into the ``{code, message}`` error body.
"""


class PragmexError(Exception):
    """Base class for all package errors."""

    code = "Error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class RegexSyntaxError(PragmexError):
    """Input text is not a word of the regex sub-grammar."""

    code = "SyntaxError"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class InvalidArgument(PragmexError):
    code = "InvalidArgument"


class UnknownUtterance(PragmexError):
    """An example refers to an utterance outside the matrix universe."""

    code = "UnknownUtterance"


class InconsistentSpec(PragmexError):
    """No concept in the domain is consistent with the given examples."""

    code = "InconsistentSpec"


class InvalidString(PragmexError):
    """Example string is not a binary string within the length limit."""

    code = "InvalidString"


class SignNotAllowed(PragmexError):
    code = "SignNotAllowed"


class DuplicateExample(PragmexError):
    code = "DuplicateExample"


class UnknownConcept(PragmexError):
    """A pinned target is not one of the domain's concepts."""

    code = "UnknownConcept"


class NotFound(PragmexError):
    code = "NotFound"


class InvalidState(PragmexError):
    code = "InvalidState"


class Exhausted(PragmexError):
    """A simulated speaker has no eligible utterance left."""

    code = "Exhausted"
