class CtxFilterError(Exception):
    """Base class for all errors raised by ctxfilter."""


class FormatError(CtxFilterError):
    """A file or document does not follow its declared format."""


class ValidationError(CtxFilterError, ValueError):
    """Inputs are well-formed but violate a contract (shape, range, inventory)."""
