"""Exception types shared across the package."""


class QSwitchError(Exception):
    """Base class for all errors raised by qswitch."""


class ValidationError(QSwitchError, ValueError):
    """An input violates a documented invariant (shape, normalization, ...)."""


class SizeCapError(QSwitchError, ValueError):
    """An operation would materialize a tensor space larger than the cap."""

    def __init__(self, required, cap, advice=""):
        self.required = required
        self.cap = cap
        msg = f"operation needs a space of dimension {required}, above the cap of {cap}"
        if advice:
            msg += f"; {advice}"
        super().__init__(msg)
