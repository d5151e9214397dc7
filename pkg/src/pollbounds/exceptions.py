"""Exception and warning types raised by pollbounds."""


class PollError(ValueError):
    """Base class for every input or consistency error raised by the package."""


class ValidationError(PollError):
    """A field failed validation.

    ``field`` names the offending input so front ends can report it.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ZeroTwoPartyTotal(ValidationError):
    pass


class MissingRateInputs(ValidationError):
    pass


class RateOutOfRange(ValidationError):
    pass


class ZeroPopulationShare(ValidationError):
    pass


class ImpliedRateOutOfRange(ValidationError):
    pass


class SharesDoNotSumToOne(ValidationError):
    pass


class MixedRegimeKinds(ValidationError):
    pass


class UnsupportedFormat(ValidationError):
    pass


class InfeasibleShiftBound(PollError):
    """The shift bounds leave no proper value for respondent preference."""


class TooManyStrataForOracle(PollError):
    pass


class FeasibilityWarning(UserWarning):
    """A sample share falls outside the range an assumption allows."""


class TallyConsistencyWarning(UserWarning):
    """Percentages handed in for a tally do not add up to 100."""
