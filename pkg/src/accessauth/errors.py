"""Exception types raised across the package."""


class AccessAuthError(Exception):
    """Base class for every error raised by accessauth."""


class InvalidPolynomial(AccessAuthError, ValueError):
    pass


class EmptySeed(AccessAuthError, ValueError):
    pass


class AllZeroSeed(AccessAuthError, ValueError):
    """The folded register state is all-zero; re-derive with the other seed variant."""


class InvalidDimensions(AccessAuthError, ValueError):
    pass


class LengthMismatch(AccessAuthError, ValueError):
    pass


class DegenerateSelection(AccessAuthError, ValueError):
    """No usable seed: empty complemented selection or a zero sum."""


class NonPositiveDistance(AccessAuthError, ValueError):
    pass


class DimensionMismatch(AccessAuthError, ValueError):
    pass


class WindowExhausted(AccessAuthError, IndexError):
    """Schedule position beyond the window; refresh first."""


class InsufficientCalibration(AccessAuthError, ValueError):
    pass


class ZeroVector(AccessAuthError, ValueError):
    pass


class OutOfRangeProbability(AccessAuthError, ValueError):
    pass


class ValidationError(AccessAuthError, ValueError):
    """Configuration failed validation; ``errors`` maps field name to message."""

    def __init__(self, errors):
        self.errors = dict(errors)
        msg = "; ".join(f"{k}: {v}" for k, v in self.errors.items())
        super().__init__(msg)


class TrialFailed(AccessAuthError, RuntimeError):
    """A Monte Carlo trial raised; ``trial`` says which one."""

    def __init__(self, trial: int, cause: Exception):
        super().__init__(f"trial {trial}: {type(cause).__name__}: {cause}")
        self.trial = trial


class ResultsError(AccessAuthError, OSError):
    """Results could not be emitted."""


class SupportTooLarge(UserWarning):
    """More transmitters than resources; LS solved in the minimum-norm sense."""


class NonPrimitivePolynomial(UserWarning):
    pass
