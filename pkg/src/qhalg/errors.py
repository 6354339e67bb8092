class QHAlgError(ValueError):
    """Base class for input and precondition errors raised by qhalg."""


class UnsupportedInput(QHAlgError):
    pass
